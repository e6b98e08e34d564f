#pragma once
// Small mesh builders and brute-force oracles shared by the tests.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <vector>

#include "topogen/mesh.hpp"
#include "topogen/rng.hpp"
#include "topogen/seeds.hpp"
#include "topogen/wfc.hpp"

namespace testutil {

using topogen::TriangleMesh;
using topogen::Vec3;

inline TriangleMesh unit_cube() {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) m.vertices.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  // outward winding
  m.triangles = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                 {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

inline TriangleMesh tetrahedron() {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  return m;
}

/// n x m quad grid on a torus, two triangles per quad: V = nm, E = 3nm, F = 2nm.
inline TriangleMesh torus(int n, int m, double big = 2.0, double small = 0.7) {
  TriangleMesh t;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const double u = 2 * std::numbers::pi * i / n, v = 2 * std::numbers::pi * j / m;
      t.vertices.emplace_back((big + small * std::cos(v)) * std::cos(u),
                              (big + small * std::cos(v)) * std::sin(u), small * std::sin(v));
    }
  auto id = [&](int i, int j) { return ((i + n) % n) * m + (j + m) % m; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      t.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      t.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return t;
}

/// Icosphere of the given subdivision level, radius r, centred at c.
inline TriangleMesh sphere(int level, double r = 1.0, Vec3 c = Vec3::Zero()) {
  TriangleMesh m;
  const double p = (1 + std::sqrt(5.0)) / 2;
  m.vertices = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
                {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                 {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                 {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                 {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) m = topogen::subdivide(m);
  for (auto& v : m.vertices) v = c + r * v.normalized();
  return m;
}

/// Independent recount of V - E + F using a set of undirected edges.
inline std::int64_t chi_recount(const TriangleMesh& m) {
  std::set<std::pair<int, int>> e;
  std::set<int> used;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      e.insert({std::min(a, b), std::max(a, b)});
      used.insert(a);
    }
  return static_cast<std::int64_t>(used.size()) - static_cast<std::int64_t>(e.size()) +
         static_cast<std::int64_t>(m.triangles.size());
}

/// Union-find component count over vertices that appear in triangles.
inline int component_recount(const TriangleMesh& m) {
  std::vector<int> parent(m.vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::set<int> used;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) {
      used.insert(t[k]);
      parent[find(t[k])] = find(t[(k + 1) % 3]);
    }
  std::set<int> roots;
  for (int v : used) roots.insert(find(v));
  return static_cast<int>(roots.size());
}

/// Random small perturbation of every vertex.
inline TriangleMesh jittered(TriangleMesh m, double mag, std::uint64_t seed) {
  topogen::CounterRng rng(seed, 99);
  for (auto& v : m.vertices)
    v += Vec3(rng.uniform(-mag, mag), rng.uniform(-mag, mag), rng.uniform(-mag, mag));
  return m;
}

/// Maze of 6x6x6 tiles with mostly empty tiles, as the dataset defaults use.
inline topogen::OccupancyGrid desk_env(std::uint64_t seed) {
  const auto tiles = topogen::default_tileset();
  topogen::CollapseOptions opt;
  opt.weights.assign(tiles.size(), 1.0);
  opt.weights[0] = 30.0;
  return topogen::voxelize(topogen::collapse({6, 6, 6}, tiles, seed, opt), tiles, 1.0);
}

/// Seeds of the given genera (linked pairs as index pairs) placed in `env`
/// at half scale.
inline std::vector<TriangleMesh> placed(const std::vector<int>& genera,
                                        const topogen::OccupancyGrid& env,
                                        std::uint64_t seed,
                                        std::vector<std::pair<int, int>> links = {}) {
  std::vector<topogen::SeedSpec> specs;
  for (int g : genera) specs.push_back({g, std::nullopt, 0.5});
  for (auto [a, b] : links) {
    specs[a].linked_to = b;
    specs[b].linked_to = a;
  }
  return topogen::place_seeds(specs, env, seed).meshes;
}

}  // namespace testutil
