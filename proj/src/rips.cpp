#include "topogen/rips.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>
#include <unordered_map>

namespace topogen {

std::vector<Interval> Barcode::in_dim(int dim) const {
  std::vector<Interval> out;
  for (const auto& iv : intervals)
    if (iv.dim == dim) out.push_back(iv);
  return out;
}

Filtration build_rips(const std::vector<Vec3>& points, double max_radius, int max_dim,
                      std::size_t max_points) {
  if (points.size() > max_points)
    throw SizeGuardError("Rips filtration limited to " + std::to_string(max_points) +
                         " points (got " + std::to_string(points.size()) +
                         "); subsample the cloud or raise the limit");
  if (max_dim < 0 || max_dim > 2) throw std::invalid_argument("max_dim must be 0, 1 or 2");
  const int n = static_cast<int>(points.size());
  std::vector<double> dist(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dist[i * n + j] = (points[i] - points[j]).norm();

  Filtration f;
  for (int i = 0; i < n; ++i) f.simplices.push_back({{i, 0, 0}, 0, 0.0});
  if (max_dim >= 1) {
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (dist[i * n + j] <= max_radius) {
          f.simplices.push_back({{i, j, 0}, 1, dist[i * n + j]});
          adj[i].push_back(j);
        }
    if (max_dim >= 2)
      for (int i = 0; i < n; ++i)
        for (std::size_t a = 0; a < adj[i].size(); ++a)
          for (std::size_t b = a + 1; b < adj[i].size(); ++b) {
            const int j = adj[i][a], k = adj[i][b];
            if (dist[j * n + k] > max_radius) continue;
            const double d = std::max({dist[i * n + j], dist[i * n + k], dist[j * n + k]});
            f.simplices.push_back({{i, j, k}, 2, d});
          }
  }
  std::sort(f.simplices.begin(), f.simplices.end(), [](const Simplex& a, const Simplex& b) {
    if (a.birth != b.birth) return a.birth < b.birth;
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.vertices < b.vertices;
  });
  return f;
}

Barcode persistence(const Filtration& filtration) {
  const auto& s = filtration.simplices;
  const std::size_t m = s.size();
  std::unordered_map<long long, int> vertex_pos, edge_pos;
  auto key = [](int a, int b) { return (static_cast<long long>(a) << 32) | b; };
  for (std::size_t i = 0; i < m; ++i) {
    if (s[i].dim == 0) vertex_pos[s[i].vertices[0]] = static_cast<int>(i);
    if (s[i].dim == 1) edge_pos[key(s[i].vertices[0], s[i].vertices[1])] = static_cast<int>(i);
  }

  // Boundary columns as ascending row lists.
  std::vector<std::vector<int>> cols(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& v = s[i].vertices;
    auto& c = cols[i];
    if (s[i].dim == 1) {
      c = {vertex_pos.at(v[0]), vertex_pos.at(v[1])};
    } else if (s[i].dim == 2) {
      c = {edge_pos.at(key(v[0], v[1])), edge_pos.at(key(v[0], v[2])),
           edge_pos.at(key(v[1], v[2]))};
    }
    std::sort(c.begin(), c.end());
  }

  std::vector<int> pivot_owner(m, -1);
  std::vector<char> negative(m, 0), paired(m, 0);
  Barcode bc;
  std::vector<int> merged;
  for (std::size_t j = 0; j < m; ++j) {
    auto& c = cols[j];
    while (!c.empty() && pivot_owner[c.back()] >= 0) {
      const auto& other = cols[pivot_owner[c.back()]];
      merged.clear();
      std::set_symmetric_difference(c.begin(), c.end(), other.begin(), other.end(),
                                    std::back_inserter(merged));
      c.swap(merged);
    }
    if (c.empty()) continue;
    const int low = c.back();
    pivot_owner[low] = static_cast<int>(j);
    negative[j] = 1;
    paired[low] = 1;
    if (s[j].birth > s[low].birth)
      bc.intervals.push_back({s[low].dim, s[low].birth, s[j].birth});
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (negative[i] || paired[i] || s[i].dim > 1) continue;
    bc.intervals.push_back({s[i].dim, s[i].birth, std::numeric_limits<double>::infinity()});
  }
  std::stable_sort(bc.intervals.begin(), bc.intervals.end(),
                   [](const Interval& a, const Interval& b) {
                     if (a.dim != b.dim) return a.dim < b.dim;
                     return a.birth < b.birth;
                   });
  return bc;
}

BettiPair betti_at(const Barcode& barcode, double radius) {
  BettiPair b;
  for (const auto& iv : barcode.intervals) {
    if (!(iv.birth <= radius && radius < iv.death)) continue;
    if (iv.dim == 0) ++b.b0;
    else if (iv.dim == 1) ++b.b1;
  }
  return b;
}

void write_barcode_csv(std::ostream& os, const Barcode& barcode) {
  os << "dim,birth,death\n" << std::setprecision(9);
  for (const auto& iv : barcode.intervals) {
    os << iv.dim << ',' << iv.birth << ',';
    if (std::isinf(iv.death)) os << "inf";
    else os << iv.death;
    os << '\n';
  }
}

}  // namespace topogen
