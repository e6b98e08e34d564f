#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace topogen {

using Vec3 = Eigen::Vector3d;
using Triangle = std::array<int, 3>;

/// Raised when a mesh references vertices that do not exist.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a local edit is requested on an edge it cannot be applied to.
class UnsupportedEditError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Indexed triangle surface. Triangles are wound counter-clockwise when seen
/// from outside. `object_ids` is either empty or holds one id per triangle.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<int> object_ids;

  [[nodiscard]] bool empty() const { return triangles.empty(); }
  [[nodiscard]] int object_id(std::size_t tri) const {
    return object_ids.empty() ? 0 : object_ids[tri];
  }
};

/// Undirected edge, always stored with first < second.
struct Edge {
  int first = 0;
  int second = 0;

  Edge() = default;
  Edge(int a, int b) : first(a < b ? a : b), second(a < b ? b : a) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using TrianglePair = std::pair<int, int>;

struct MeshDiagnostics {
  std::int64_t vertex_count = 0;
  std::int64_t edge_count = 0;
  std::int64_t face_count = 0;
  std::int64_t euler_characteristic = 0;
  int component_count = 0;
  bool is_closed = false;
  bool is_oriented = false;
  bool has_degenerate = false;
  std::vector<TrianglePair> self_intersections;
};

/// Squared-area threshold below which a triangle counts as degenerate.
inline constexpr double kDegenerateAreaSq = 1e-12;

// ---------------------------------------------------------------------------
// Combinatorics

/// Throws StructuralError if any triangle index is out of range.
void check_indices(const TriangleMesh& mesh);

/// Sorted, de-duplicated list of undirected edges.
std::vector<Edge> edges(const TriangleMesh& mesh);

/// V - E + F, with E counting each undirected edge once.
std::int64_t euler_characteristic(const TriangleMesh& mesh);

/// Splits the mesh into edge-connected pieces. Each piece has its own
/// compacted vertex list; pieces are ordered by their smallest original
/// triangle index and keep the relative triangle order.
std::vector<TriangleMesh> connected_components(const TriangleMesh& mesh);

/// Number of edge-connected triangle groups.
int component_count(const TriangleMesh& mesh);

/// Full combinatorial and geometric report. Never throws on bad topology;
/// only on out-of-range indices.
MeshDiagnostics validate_manifold(const TriangleMesh& mesh);

/// Concatenates meshes, assigning object id i to all triangles of meshes[i].
TriangleMesh merge(const std::vector<TriangleMesh>& meshes);

// ---------------------------------------------------------------------------
// Geometry

double triangle_area(const TriangleMesh& mesh, std::size_t tri);
double surface_area(const TriangleMesh& mesh);
/// Signed enclosed volume (positive for outward-facing closed surfaces).
double enclosed_volume(const TriangleMesh& mesh);
double mean_edge_length(const TriangleMesh& mesh);
bool has_degenerate_triangle(const TriangleMesh& mesh,
                             double area_sq_tol = kDegenerateAreaSq);

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void expand(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void expand(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  [[nodiscard]] bool valid() const { return (lo.array() <= hi.array()).all(); }
  [[nodiscard]] bool overlaps(const Aabb& b) const {
    return (lo.array() <= b.hi.array()).all() &&
           (b.lo.array() <= hi.array()).all();
  }
  [[nodiscard]] Vec3 extent() const { return hi - lo; }
  [[nodiscard]] Vec3 center() const { return 0.5 * (lo + hi); }
};

Aabb bounds(const TriangleMesh& mesh);
Aabb bounds(const std::vector<Vec3>& points);

/// Applies p -> scale * p + offset to every vertex.
TriangleMesh transformed(const TriangleMesh& mesh, double scale,
                         const Vec3& offset);

// ---------------------------------------------------------------------------
// Local edits

/// Midpoint subdivision: every triangle becomes four. Object ids carry over.
TriangleMesh subdivide(const TriangleMesh& mesh);

/// Inserts a vertex at the midpoint of `edge` and replaces the two incident
/// triangles by four. Throws UnsupportedEditError unless the edge has exactly
/// two incident triangles.
TriangleMesh edge_split(const TriangleMesh& mesh, Edge edge);

/// Merges the endpoints of `edge` at its midpoint. Returns nullopt when the
/// link condition fails, or when the result would contain a degenerate or
/// flipped triangle.
std::optional<TriangleMesh> edge_collapse(const TriangleMesh& mesh, Edge edge);

// ---------------------------------------------------------------------------
// Intersections

/// All pairs (i < j) of triangles that share no vertex and whose closed
/// triangles intersect, found via a bounding-volume hierarchy. Sorted.
std::vector<TrianglePair> detect_self_intersections(const TriangleMesh& mesh);

/// Reference all-pairs version of detect_self_intersections.
std::vector<TrianglePair> detect_self_intersections_brute(
    const TriangleMesh& mesh);

/// Closed triangle-triangle intersection test with tolerance `eps`.
bool triangles_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2,
                         const Vec3& b0, const Vec3& b1, const Vec3& b2,
                         double eps = 1e-9);

// ---------------------------------------------------------------------------
// I/O

void write_off(std::ostream& os, const TriangleMesh& mesh);
TriangleMesh read_off(std::istream& is);
/// OBJ with `v`/`f` records; triangles grouped by `g object_<id>`.
void write_obj(std::ostream& os, const TriangleMesh& mesh);
TriangleMesh read_obj(std::istream& is);

void save_mesh(const std::string& path, const TriangleMesh& mesh);
TriangleMesh load_mesh(const std::string& path);

}  // namespace topogen
