#pragma once

#include <vector>

#include "topogen/mesh.hpp"

namespace topogen {

/// Mutable triangle mesh with vertex-to-triangle incidence, for running
/// many local edits in a row. Removed triangles are tombstoned until
/// `finish()` compacts the mesh.
class MeshEditor {
 public:
  explicit MeshEditor(TriangleMesh mesh);

  /// Triangles (alive) incident to both endpoints of `edge`.
  [[nodiscard]] std::vector<int> edge_triangles(Edge edge) const;
  [[nodiscard]] bool has_edge(Edge edge) const;
  [[nodiscard]] double edge_length(Edge edge) const;

  /// Midpoint split. Returns false (and leaves the mesh unchanged) when the
  /// edge does not have exactly two incident triangles.
  bool split(Edge edge);

  /// Collapse to midpoint; false if the link condition or the geometric
  /// checks fail.
  bool collapse(Edge edge);

  /// Link condition for closed triangle surfaces: the endpoint links meet
  /// exactly in the two opposite vertices and share no link edge.
  [[nodiscard]] bool link_condition(Edge edge) const;

  /// Alive undirected edges, sorted.
  [[nodiscard]] std::vector<Edge> edges() const;

  [[nodiscard]] const std::vector<Vec3>& vertices() const {
    return mesh_.vertices;
  }

  /// Compacted mesh: dead triangles and unreferenced vertices removed, order
  /// otherwise preserved.
  [[nodiscard]] TriangleMesh finish() const;

 private:
  [[nodiscard]] std::vector<int> neighbours(int v) const;

  TriangleMesh mesh_;
  std::vector<std::vector<int>> vertex_tris_;
  std::vector<char> alive_;
};

}  // namespace topogen
