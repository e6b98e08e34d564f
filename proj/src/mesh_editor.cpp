#include "topogen/mesh_editor.hpp"

#include <algorithm>

#include <Eigen/Geometry>

namespace topogen {
namespace {

// Rotates `t` so that it starts with `v`.
Triangle starting_at(const Triangle& t, int v) {
  if (t[0] == v) return t;
  if (t[1] == v) return {t[1], t[2], t[0]};
  return {t[2], t[0], t[1]};
}

void erase_value(std::vector<int>& xs, int v) {
  xs.erase(std::remove(xs.begin(), xs.end(), v), xs.end());
}

}  // namespace

MeshEditor::MeshEditor(TriangleMesh mesh)
    : mesh_(std::move(mesh)),
      vertex_tris_(mesh_.vertices.size()),
      alive_(mesh_.triangles.size(), 1) {
  for (std::size_t t = 0; t < mesh_.triangles.size(); ++t)
    for (int v : mesh_.triangles[t])
      vertex_tris_[v].push_back(static_cast<int>(t));
}

std::vector<int> MeshEditor::edge_triangles(Edge edge) const {
  std::vector<int> out;
  if (edge.first == edge.second) return out;
  const auto n = static_cast<int>(vertex_tris_.size());
  if (edge.first < 0 || edge.second >= n) return out;
  for (int t : vertex_tris_[edge.first]) {
    if (!alive_[t]) continue;
    const auto& tri = mesh_.triangles[t];
    if (tri[0] == edge.second || tri[1] == edge.second ||
        tri[2] == edge.second)
      out.push_back(t);
  }
  return out;
}

bool MeshEditor::has_edge(Edge edge) const {
  return !edge_triangles(edge).empty();
}

double MeshEditor::edge_length(Edge edge) const {
  return (mesh_.vertices[edge.first] - mesh_.vertices[edge.second]).norm();
}

std::vector<int> MeshEditor::neighbours(int v) const {
  std::vector<int> out;
  for (int t : vertex_tris_[v]) {
    if (!alive_[t]) continue;
    for (int u : mesh_.triangles[t])
      if (u != v) out.push_back(u);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Edge> MeshEditor::edges() const {
  std::vector<Edge> out;
  for (std::size_t t = 0; t < mesh_.triangles.size(); ++t) {
    if (!alive_[t]) continue;
    const auto& tri = mesh_.triangles[t];
    for (int k = 0; k < 3; ++k) out.emplace_back(tri[k], tri[(k + 1) % 3]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool MeshEditor::split(Edge edge) {
  const auto tris = edge_triangles(edge);
  if (tris.size() != 2) return false;
  const int a = edge.first, b = edge.second;
  // t1 traverses a -> b, t2 traverses b -> a.
  int t1 = tris[0], t2 = tris[1];
  Triangle r1 = starting_at(mesh_.triangles[t1], a);
  if (r1[1] != b) {
    std::swap(t1, t2);
    r1 = starting_at(mesh_.triangles[t1], a);
  }
  const Triangle r2 = starting_at(mesh_.triangles[t2], b);
  if (r1[1] != b || r2[1] != a) return false;  // inconsistent winding
  const int c = r1[2], d = r2[2];

  const int m = static_cast<int>(mesh_.vertices.size());
  mesh_.vertices.push_back(0.5 * (mesh_.vertices[a] + mesh_.vertices[b]));
  vertex_tris_.emplace_back();

  const int t3 = static_cast<int>(mesh_.triangles.size());
  const int t4 = t3 + 1;
  mesh_.triangles[t1] = {a, m, c};
  mesh_.triangles.push_back({m, b, c});
  mesh_.triangles[t2] = {b, m, d};
  mesh_.triangles.push_back({m, a, d});
  alive_.push_back(1);
  alive_.push_back(1);
  if (!mesh_.object_ids.empty()) {
    mesh_.object_ids.push_back(mesh_.object_ids[t1]);
    mesh_.object_ids.push_back(mesh_.object_ids[t2]);
  }

  erase_value(vertex_tris_[b], t1);
  vertex_tris_[b].push_back(t3);
  vertex_tris_[c].push_back(t3);
  erase_value(vertex_tris_[a], t2);
  vertex_tris_[a].push_back(t4);
  vertex_tris_[d].push_back(t4);
  vertex_tris_[m] = {t1, t3, t2, t4};
  return true;
}

bool MeshEditor::link_condition(Edge edge) const {
  const auto tris = edge_triangles(edge);
  if (tris.size() != 2) return false;
  const int a = edge.first, b = edge.second;
  auto third = [&](int t) {
    for (int v : mesh_.triangles[t])
      if (v != a && v != b) return v;
    return -1;
  };
  const int c = third(tris[0]), d = third(tris[1]);
  if (c == d) return false;

  const auto na = neighbours(a), nb = neighbours(b);
  std::vector<int> common;
  std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(),
                        std::back_inserter(common));
  if (common.size() != 2) return false;
  if (!((common[0] == std::min(c, d)) && (common[1] == std::max(c, d))))
    return false;

  // Link edges: the edge opposite the vertex in every incident triangle.
  auto link_edges = [&](int v, int other) {
    std::vector<Edge> out;
    for (int t : vertex_tris_[v]) {
      if (!alive_[t]) continue;
      const Triangle r = starting_at(mesh_.triangles[t], v);
      if (r[1] == other || r[2] == other) continue;
      out.emplace_back(r[1], r[2]);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto la = link_edges(a, b), lb = link_edges(b, a);
  std::vector<Edge> shared;
  std::set_intersection(la.begin(), la.end(), lb.begin(), lb.end(),
                        std::back_inserter(shared));
  return shared.empty();
}

bool MeshEditor::collapse(Edge edge) {
  if (!link_condition(edge)) return false;
  const int a = edge.first, b = edge.second;
  const auto removed = edge_triangles(edge);
  const Vec3 mid = 0.5 * (mesh_.vertices[a] + mesh_.vertices[b]);

  // Every surviving triangle around a or b must keep a non-degenerate area
  // and its facing direction.
  auto check = [&](int v) {
    for (int t : vertex_tris_[v]) {
      if (!alive_[t] || t == removed[0] || t == removed[1]) continue;
      const auto& tri = mesh_.triangles[t];
      std::array<Vec3, 3> before, after;
      for (int k = 0; k < 3; ++k) {
        before[k] = mesh_.vertices[tri[k]];
        after[k] = (tri[k] == a || tri[k] == b) ? mid : before[k];
      }
      const Vec3 n0 = (before[1] - before[0]).cross(before[2] - before[0]);
      const Vec3 n1 = (after[1] - after[0]).cross(after[2] - after[0]);
      if (0.25 * n1.squaredNorm() < kDegenerateAreaSq) return false;
      if (n0.dot(n1) <= 0.0) return false;
    }
    return true;
  };
  if (!check(a) || !check(b)) return false;

  for (int t : removed) {
    alive_[t] = 0;
    for (int v : mesh_.triangles[t]) erase_value(vertex_tris_[v], t);
  }
  for (int t : vertex_tris_[b]) {
    if (!alive_[t]) continue;
    for (int& v : mesh_.triangles[t])
      if (v == b) v = a;
    vertex_tris_[a].push_back(t);
  }
  vertex_tris_[b].clear();
  mesh_.vertices[a] = mid;
  return true;
}

TriangleMesh MeshEditor::finish() const {
  TriangleMesh out;
  std::vector<int> remap(mesh_.vertices.size(), -1);
  for (std::size_t t = 0; t < mesh_.triangles.size(); ++t) {
    if (!alive_[t]) continue;
    for (int v : mesh_.triangles[t]) remap[v] = 0;
  }
  for (std::size_t v = 0; v < mesh_.vertices.size(); ++v) {
    if (remap[v] < 0) continue;
    remap[v] = static_cast<int>(out.vertices.size());
    out.vertices.push_back(mesh_.vertices[v]);
  }
  for (std::size_t t = 0; t < mesh_.triangles.size(); ++t) {
    if (!alive_[t]) continue;
    const auto& tri = mesh_.triangles[t];
    out.triangles.push_back({remap[tri[0]], remap[tri[1]], remap[tri[2]]});
    if (!mesh_.object_ids.empty()) out.object_ids.push_back(mesh_.object_ids[t]);
  }
  return out;
}

}  // namespace topogen
