#include "topogen/seeds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "topogen/rng.hpp"

namespace topogen {
namespace {

using Lattice = std::array<int, 3>;

struct Face {
  Lattice cell;
  int dir;                       // Direction index, outward normal
  std::array<Lattice, 4> corner; // counter-clockwise seen from outside
};

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

TriangleMesh boundary_surface(const VoxelSolid& s) {
  const auto& dims = s.dims;
  std::vector<Face> faces;
  std::vector<int> face_id(dims.size() * 6, -1);

  for (int z = 0; z < dims.nz; ++z)
    for (int y = 0; y < dims.ny; ++y)
      for (int x = 0; x < dims.nx; ++x) {
        if (!s.at(x, y, z)) continue;
        for (int d = 0; d < 6; ++d) {
          const int a = d / 2;
          const int sg = d % 2 == 0 ? 1 : -1;
          Lattice n{x, y, z};
          n[a] += sg;
          if (s.at(n[0], n[1], n[2])) continue;
          Face f;
          f.cell = {x, y, z};
          f.dir = d;
          const int u = (a + 1) % 3, w = (a + 2) % 3;
          const int uv[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
          for (int k = 0; k < 4; ++k) {
            const int kk = sg > 0 ? k : 3 - k;
            Lattice c = f.cell;
            c[a] += sg > 0 ? 1 : 0;
            c[u] += uv[kk][0];
            c[w] += uv[kk][1];
            f.corner[k] = c;
          }
          face_id[dims.index(x, y, z) * 6 + d] = static_cast<int>(faces.size());
          faces.push_back(f);
        }
      }

  auto lookup = [&](const Lattice& c, int d) {
    const int id = face_id[dims.index(c[0], c[1], c[2]) * 6 + d];
    if (id < 0) throw std::logic_error("boundary_surface: missing partner face");
    return id;
  };

  // Union (face, corner) slots across each face edge, pairing the two faces
  // that continue the surface around the edge. Diagonal-only contacts wrap
  // around their own cell, which splits non-manifold vertices and edges.
  std::vector<int> parent(faces.size() * 4);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    const Face& f = faces[fi];
    const int a = f.dir / 2;
    const int sg = f.dir % 2 == 0 ? 1 : -1;
    for (int k = 0; k < 4; ++k) {
      const Lattice& p = f.corner[k];
      const Lattice& q = f.corner[(k + 1) % 4];
      // In-plane direction from the face centre towards this edge.
      int t_axis = -1, t_sign = 0;
      for (int ax = 0; ax < 3; ++ax) {
        if (ax == a || p[ax] != q[ax]) continue;
        t_axis = ax;
        t_sign = p[ax] > f.cell[ax] ? 1 : -1;
      }
      const int t_dir = 2 * t_axis + (t_sign > 0 ? 0 : 1);
      Lattice side = f.cell;
      side[t_axis] += t_sign;
      Lattice diag = side;
      diag[a] += sg;
      const bool side_solid = s.at(side[0], side[1], side[2]);
      const bool diag_solid = s.at(diag[0], diag[1], diag[2]);
      int g;
      if (side_solid && diag_solid) g = lookup(diag, t_dir ^ 1);
      else if (side_solid) g = lookup(side, f.dir);
      else g = lookup(f.cell, t_dir);
      for (const Lattice* c : {&p, &q}) {
        for (int m = 0; m < 4; ++m) {
          if (faces[g].corner[m] != *c) continue;
          const int r1 = find_root(parent, static_cast<int>(fi * 4 + (c == &p ? k : (k + 1) % 4)));
          const int r2 = find_root(parent, g * 4 + m);
          if (r1 != r2) parent[std::max(r1, r2)] = std::min(r1, r2);
        }
      }
    }
  }

  TriangleMesh mesh;
  std::vector<int> vertex_of(parent.size(), -1);
  auto vertex = [&](std::size_t fi, int k) {
    const int r = find_root(parent, static_cast<int>(fi * 4 + k));
    if (vertex_of[r] < 0) {
      vertex_of[r] = static_cast<int>(mesh.vertices.size());
      const auto& c = faces[fi].corner[k];
      mesh.vertices.push_back(s.origin + Vec3(c[0], c[1], c[2]));
    }
    return vertex_of[r];
  };
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    const int v[4] = {vertex(fi, 0), vertex(fi, 1), vertex(fi, 2), vertex(fi, 3)};
    mesh.triangles.push_back({v[0], v[1], v[2]});
    mesh.triangles.push_back({v[0], v[2], v[3]});
  }
  return mesh;
}

VoxelSolid seed_solid(int genus) {
  if (genus < 0) throw std::invalid_argument("seed genus must be >= 0");
  VoxelSolid s({4 * genus + 3, 3, 3});
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < s.dims.nx; ++x) s.set(x, y, z);
  for (int k = 0; k < genus; ++k)
    for (int z = 0; z < 3; ++z) s.set(4 * k + 3, 1, z, false);
  return s;
}

int relax(std::vector<TriangleMesh*> meshes, int rounds, double lambda) {
  std::vector<std::vector<std::vector<int>>> nbrs;
  for (const TriangleMesh* m : meshes) {
    std::vector<std::vector<int>> n(m->vertices.size());
    for (const auto& e : edges(*m)) {
      n[e.first].push_back(e.second);
      n[e.second].push_back(e.first);
    }
    nbrs.push_back(std::move(n));
  }
  int kept = 0;
  for (int round = 0; round < rounds; ++round) {
    std::vector<TriangleMesh> next;
    for (std::size_t i = 0; i < meshes.size(); ++i) {
      const TriangleMesh& m = *meshes[i];
      TriangleMesh out = m;
      for (std::size_t v = 0; v < m.vertices.size(); ++v) {
        if (nbrs[i][v].empty()) continue;
        Vec3 avg = Vec3::Zero();
        for (int u : nbrs[i][v]) avg += m.vertices[u];
        avg /= static_cast<double>(nbrs[i][v].size());
        out.vertices[v] = m.vertices[v] + lambda * (avg - m.vertices[v]);
      }
      const double v0 = enclosed_volume(m), v1 = enclosed_volume(out);
      if (v0 > 0.0 && v1 > 0.0) {
        Vec3 c = Vec3::Zero();
        for (const auto& p : out.vertices) c += p;
        c /= static_cast<double>(out.vertices.size());
        const double s = std::cbrt(v0 / v1);
        for (auto& p : out.vertices) p = c + s * (p - c);
      }
      next.push_back(std::move(out));
    }
    bool ok = true;
    for (const auto& m : next) ok = ok && !has_degenerate_triangle(m);
    if (ok) ok = detect_self_intersections(merge(next)).empty();
    if (!ok) break;
    for (std::size_t i = 0; i < meshes.size(); ++i) *meshes[i] = std::move(next[i]);
    ++kept;
  }
  return kept;
}

TriangleMesh make_seed(int genus, int smoothing_rounds) {
  TriangleMesh m = subdivide(boundary_surface(seed_solid(genus)));
  relax({&m}, smoothing_rounds);
  return m;
}

std::pair<TriangleMesh, TriangleMesh> make_linked_pair(int genus_a, int genus_b,
                                                       int smoothing_rounds) {
  if (genus_a < 1 || genus_b < 1)
    throw std::invalid_argument(
        "linked pair needs genus >= 1 on both objects (got " +
        std::to_string(genus_a) + ", " + std::to_string(genus_b) + ")");
  // A: plate in the xy plane, one cell thick, with 3x3 holes every 4 cells.
  // B: the same kind of plate in the xz plane, shifted by 2 cells in x so
  // that B's first bar passes through A's first hole and A's second bar
  // through B's first hole. All clearances are one cell.
  const int z0 = 2;
  const int len_a = 4 * genus_a + 1, len_b = 4 * genus_b + 1;
  const int nx = std::max(len_a, 2 + len_b);
  VoxelSolid a({nx, 5, 5}), b({nx, 5, 5});
  for (int x = 0; x < len_a; ++x)
    for (int y = 0; y < 5; ++y) {
      const bool hole = x % 4 != 0 && y >= 1 && y <= 3;
      if (!hole) a.set(x, y, z0);
    }
  for (int x = 0; x < len_b; ++x)
    for (int z = 0; z < 5; ++z) {
      const bool hole = x % 4 != 0 && z >= 1 && z <= 3;
      if (!hole) b.set(2 + x, 2, z);
    }
  TriangleMesh ma = subdivide(boundary_surface(a));
  TriangleMesh mb = subdivide(boundary_surface(b));
  relax({&ma, &mb}, smoothing_rounds);
  return {std::move(ma), std::move(mb)};
}

const std::vector<Rotation>& axis_rotations() {
  static const std::vector<Rotation> rots = [] {
    std::vector<Rotation> out;
    std::array<int, 3> perm{0, 1, 2};
    do {
      for (int signs = 0; signs < 8; ++signs) {
        Rotation r = Rotation::Zero();
        for (int i = 0; i < 3; ++i) r(i, perm[i]) = (signs >> i & 1) ? -1.0 : 1.0;
        if (r.determinant() > 0.0) out.push_back(r);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
  }();
  return rots;
}

void validate_specs(const std::vector<SeedSpec>& specs, int max_genus) {
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    if (s.genus < 0 || s.genus > max_genus)
      throw std::invalid_argument("seed " + std::to_string(i) + ": genus out of range");
    if (!(s.scale > 0.0))
      throw std::invalid_argument("seed " + std::to_string(i) + ": scale must be positive");
    if (!s.linked_to) continue;
    if (s.genus < 1)
      throw std::invalid_argument("seed " + std::to_string(i) + ": a linked seed needs genus >= 1");
    const int j = *s.linked_to;
    if (j < 0 || j >= static_cast<int>(specs.size()) || j == static_cast<int>(i) ||
        specs[j].linked_to != static_cast<int>(i))
      throw std::invalid_argument("seed " + std::to_string(i) +
                                  ": linked_to must reference a partner that links back");
  }
}

namespace {

double box_distance(const Aabb& a, const Aabb& b) {
  const Vec3 gap = (a.lo - b.hi).cwiseMax(b.lo - a.hi).cwiseMax(0.0);
  return gap.norm();
}

bool fits_free_space(const std::vector<TriangleMesh>& unit, const OccupancyGrid& env) {
  const double cs = env.cell_size;
  for (const auto& m : unit)
    for (const auto& t : m.triangles) {
      Aabb b;
      for (int v : t) b.expand(m.vertices[v]);
      int lo[3], hi[3];
      for (int a = 0; a < 3; ++a) {
        lo[a] = static_cast<int>(std::floor(b.lo[a] / cs));
        hi[a] = static_cast<int>(std::floor(b.hi[a] / cs));
      }
      if (lo[0] < 0 || lo[1] < 0 || lo[2] < 0 || hi[0] >= env.dims.nx ||
          hi[1] >= env.dims.ny || hi[2] >= env.dims.nz)
        return false;
      for (int z = lo[2]; z <= hi[2]; ++z)
        for (int y = lo[1]; y <= hi[1]; ++y)
          for (int x = lo[0]; x <= hi[0]; ++x)
            if (env.occupied_at(x, y, z)) return false;
    }
  return true;
}

}  // namespace

PlacedSeeds place_seeds(const std::vector<SeedSpec>& specs,
                        const OccupancyGrid& env, std::uint64_t rng_seed,
                        int max_attempts) {
  if (specs.empty() || specs.size() > 3)
    throw std::invalid_argument("place_seeds: expected 1 to 3 seeds");
  validate_specs(specs);

  // Placement units: single seeds and linked pairs, in order of first index.
  struct Unit {
    std::vector<int> members;
    std::vector<TriangleMesh> meshes;  // voxel units, scaled, min corner at 0
  };
  std::vector<Unit> units;
  std::vector<bool> taken(specs.size(), false);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (taken[i]) continue;
    Unit u;
    if (specs[i].linked_to) {
      const int j = *specs[i].linked_to;
      auto [ma, mb] = make_linked_pair(specs[i].genus, specs[j].genus);
      u.members = {static_cast<int>(i), j};
      u.meshes = {std::move(ma), std::move(mb)};
      taken[j] = true;
    } else {
      u.members = {static_cast<int>(i)};
      u.meshes = {make_seed(specs[i].genus)};
    }
    taken[i] = true;
    Aabb b;
    for (const auto& m : u.meshes) b.expand(bounds(m));
    for (auto& m : u.meshes) m = transformed(m, specs[i].scale, -specs[i].scale * b.lo);
    units.push_back(std::move(u));
  }

  CounterRng rng(rng_seed, 0x91AC);
  const Aabb world = env.box();
  const auto& rots = axis_rotations();
  PlacedSeeds out;
  out.meshes.resize(specs.size());
  out.placements.resize(specs.size());
  std::vector<Aabb> placed_boxes;

  for (const auto& unit : units) {
    bool done = false;
    for (int attempt = 0; attempt < max_attempts && !done; ++attempt) {
      const int r = static_cast<int>(rng.below(rots.size()));
      std::vector<TriangleMesh> cand = unit.meshes;
      Aabb b;
      for (auto& m : cand) {
        for (auto& p : m.vertices) p = rots[r] * p;
        b.expand(bounds(m));
      }
      const Vec3 room = world.extent() - b.extent();
      if ((room.array() < 0.0).any()) continue;
      const Vec3 pos(rng.uniform(0.0, room.x()), rng.uniform(0.0, room.y()),
                     rng.uniform(0.0, room.z()));
      const Vec3 shift = pos - b.lo;
      for (auto& m : cand)
        for (auto& p : m.vertices) p += shift;
      Aabb placed;
      placed.lo = b.lo + shift;
      placed.hi = b.hi + shift;
      bool clear = std::all_of(placed_boxes.begin(), placed_boxes.end(), [&](const Aabb& o) {
        return box_distance(o, placed) >= env.cell_size;
      });
      if (!clear || !fits_free_space(cand, env)) continue;
      for (std::size_t k = 0; k < unit.members.size(); ++k) {
        out.meshes[unit.members[k]] = std::move(cand[k]);
        out.placements[unit.members[k]] = {pos, r};
      }
      placed_boxes.push_back(placed);
      done = true;
    }
    if (!done)
      throw PlacementError("no valid placement for seed " +
                           std::to_string(unit.members.front()) + " of scene seed " +
                           std::to_string(rng_seed) + " after " +
                           std::to_string(max_attempts) + " attempts");
  }
  return out;
}

}  // namespace topogen
