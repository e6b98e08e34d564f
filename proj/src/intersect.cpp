// Triangle-triangle intersection and BVH-accelerated self-intersection
// queries.

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Geometry>

#include "topogen/mesh.hpp"

namespace topogen {
namespace {

using Vec2 = Eigen::Vector2d;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

bool segments_touch_2d(const Vec2& p0, const Vec2& p1, const Vec2& q0,
                       const Vec2& q1, double eps) {
  const double d1 = cross2(p1 - p0, q0 - p0);
  const double d2 = cross2(p1 - p0, q1 - p0);
  const double d3 = cross2(q1 - q0, p0 - q0);
  const double d4 = cross2(q1 - q0, p1 - q0);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  return point_segment_dist(q0, p0, p1) <= eps ||
         point_segment_dist(q1, p0, p1) <= eps ||
         point_segment_dist(p0, q0, q1) <= eps ||
         point_segment_dist(p1, q0, q1) <= eps;
}

bool point_in_triangle_2d(const Vec2& p, const Vec2& a, const Vec2& b,
                          const Vec2& c) {
  const double s0 = cross2(b - a, p - a);
  const double s1 = cross2(c - b, p - b);
  const double s2 = cross2(a - c, p - c);
  return (s0 >= 0 && s1 >= 0 && s2 >= 0) || (s0 <= 0 && s1 <= 0 && s2 <= 0);
}

struct Projector {
  int u, v;
  explicit Projector(const Vec3& n) {
    int drop = 0;
    n.cwiseAbs().maxCoeff(&drop);
    u = (drop + 1) % 3;
    v = (drop + 2) % 3;
  }
  Vec2 operator()(const Vec3& p) const { return {p[u], p[v]}; }
};

// Coplanar (within tolerance) segment against a triangle with normal n.
bool coplanar_segment_triangle(const Vec3& p, const Vec3& q, const Vec3& a,
                               const Vec3& b, const Vec3& c, const Vec3& n,
                               double eps) {
  const Projector proj(n);
  const Vec2 P = proj(p), Q = proj(q), A = proj(a), B = proj(b), C = proj(c);
  if (point_in_triangle_2d(P, A, B, C) || point_in_triangle_2d(Q, A, B, C))
    return true;
  return segments_touch_2d(P, Q, A, B, eps) ||
         segments_touch_2d(P, Q, B, C, eps) ||
         segments_touch_2d(P, Q, C, A, eps);
}

// Closed segment pq against closed triangle abc with unit normal n.
bool segment_hits_triangle(const Vec3& p, const Vec3& q, const Vec3& a,
                           const Vec3& b, const Vec3& c, const Vec3& n,
                           double eps) {
  const double dp = n.dot(p - a);
  const double dq = n.dot(q - a);
  if ((dp > eps && dq > eps) || (dp < -eps && dq < -eps)) return false;
  if (std::abs(dp) <= eps && std::abs(dq) <= eps)
    return coplanar_segment_triangle(p, q, a, b, c, n, eps);
  const double t = std::clamp(dp / (dp - dq), 0.0, 1.0);
  const Vec3 x = p + t * (q - p);
  const Vec3* vs[3] = {&a, &b, &c};
  for (int k = 0; k < 3; ++k) {
    const Vec3& v0 = *vs[k];
    const Vec3& v1 = *vs[(k + 1) % 3];
    const Vec3 e = v1 - v0;
    if (e.cross(x - v0).dot(n) < -eps * e.norm()) return false;
  }
  return true;
}

}  // namespace

bool triangles_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2,
                         const Vec3& b0, const Vec3& b1, const Vec3& b2,
                         double eps) {
  Vec3 na = (a1 - a0).cross(a2 - a0);
  Vec3 nb = (b1 - b0).cross(b2 - b0);
  const double la = na.norm(), lb = nb.norm();
  if (la == 0.0 || lb == 0.0) return false;
  na /= la;
  nb /= lb;

  // Plane separation.
  const double db[3] = {na.dot(b0 - a0), na.dot(b1 - a0), na.dot(b2 - a0)};
  if ((db[0] > eps && db[1] > eps && db[2] > eps) ||
      (db[0] < -eps && db[1] < -eps && db[2] < -eps))
    return false;
  const double da[3] = {nb.dot(a0 - b0), nb.dot(a1 - b0), nb.dot(a2 - b0)};
  if ((da[0] > eps && da[1] > eps && da[2] > eps) ||
      (da[0] < -eps && da[1] < -eps && da[2] < -eps))
    return false;

  if (std::abs(db[0]) <= eps && std::abs(db[1]) <= eps &&
      std::abs(db[2]) <= eps) {
    const Projector proj(na);
    const Vec2 A[3] = {proj(a0), proj(a1), proj(a2)};
    const Vec2 B[3] = {proj(b0), proj(b1), proj(b2)};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (segments_touch_2d(A[i], A[(i + 1) % 3], B[j], B[(j + 1) % 3], eps))
          return true;
    return point_in_triangle_2d(A[0], B[0], B[1], B[2]) ||
           point_in_triangle_2d(B[0], A[0], A[1], A[2]);
  }

  // An intersecting pair in general position always has an edge of one
  // triangle crossing the other.
  return segment_hits_triangle(a0, a1, b0, b1, b2, nb, eps) ||
         segment_hits_triangle(a1, a2, b0, b1, b2, nb, eps) ||
         segment_hits_triangle(a2, a0, b0, b1, b2, nb, eps) ||
         segment_hits_triangle(b0, b1, a0, a1, a2, na, eps) ||
         segment_hits_triangle(b1, b2, a0, a1, a2, na, eps) ||
         segment_hits_triangle(b2, b0, a0, a1, a2, na, eps);
}

namespace {

constexpr double kIntersectEps = 1e-9;

bool share_vertex(const Triangle& s, const Triangle& t) {
  for (int u : s)
    for (int v : t)
      if (u == v) return true;
  return false;
}

bool test_pair(const TriangleMesh& m, int i, int j) {
  const auto& s = m.triangles[i];
  const auto& t = m.triangles[j];
  if (share_vertex(s, t)) return false;
  const auto& V = m.vertices;
  return triangles_intersect(V[s[0]], V[s[1]], V[s[2]], V[t[0]], V[t[1]],
                             V[t[2]], kIntersectEps);
}

class Bvh {
 public:
  explicit Bvh(const TriangleMesh& mesh) : mesh_(mesh) {
    const std::size_t n = mesh.triangles.size();
    boxes_.resize(n);
    centroids_.resize(n);
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    for (std::size_t t = 0; t < n; ++t) {
      Aabb b;
      for (int v : mesh.triangles[t]) b.expand(mesh.vertices[v]);
      b.lo.array() -= kIntersectEps;
      b.hi.array() += kIntersectEps;
      boxes_[t] = b;
      centroids_[t] = b.center();
    }
    if (n > 0) build(0, static_cast<int>(n));
  }

  std::vector<TrianglePair> self_pairs() const {
    std::vector<TrianglePair> out;
    if (!nodes_.empty()) self_query(0, out);
    for (auto& p : out)
      if (p.first > p.second) std::swap(p.first, p.second);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  static constexpr int kLeafSize = 4;

  struct Node {
    Aabb box;
    int begin = 0, end = 0;  // range into order_
    int left = -1, right = -1;
    [[nodiscard]] bool leaf() const { return left < 0; }
  };

  int build(int begin, int end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    Aabb box, cbox;
    for (int i = begin; i < end; ++i) {
      box.expand(boxes_[order_[i]]);
      cbox.expand(centroids_[order_[i]]);
    }
    nodes_[id].box = box;
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    if (end - begin <= kLeafSize) return id;
    int axis = 0;
    cbox.extent().maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end, [&](int a, int b) {
                       const double ca = centroids_[a][axis];
                       const double cb = centroids_[b][axis];
                       return ca != cb ? ca < cb : a < b;
                     });
    const int l = build(begin, mid);
    const int r = build(mid, end);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  void leaf_pairs(const Node& a, const Node& b, bool same,
                  std::vector<TrianglePair>& out) const {
    for (int i = a.begin; i < a.end; ++i) {
      const int ti = order_[i];
      for (int j = same ? i + 1 : b.begin; j < b.end; ++j) {
        const int tj = order_[j];
        if (!boxes_[ti].overlaps(boxes_[tj])) continue;
        if (test_pair(mesh_, ti, tj)) out.emplace_back(ti, tj);
      }
    }
  }

  void self_query(int n, std::vector<TrianglePair>& out) const {
    const Node& node = nodes_[n];
    if (node.leaf()) {
      leaf_pairs(node, node, true, out);
      return;
    }
    self_query(node.left, out);
    self_query(node.right, out);
    cross_query(node.left, node.right, out);
  }

  void cross_query(int a, int b, std::vector<TrianglePair>& out) const {
    const Node& na = nodes_[a];
    const Node& nb = nodes_[b];
    if (!na.box.overlaps(nb.box)) return;
    if (na.leaf() && nb.leaf()) {
      leaf_pairs(na, nb, false, out);
    } else if (nb.leaf() || (!na.leaf() && na.end - na.begin >= nb.end - nb.begin)) {
      cross_query(na.left, b, out);
      cross_query(na.right, b, out);
    } else {
      cross_query(a, nb.left, out);
      cross_query(a, nb.right, out);
    }
  }

  const TriangleMesh& mesh_;
  std::vector<Aabb> boxes_;
  std::vector<Vec3> centroids_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace

std::vector<TrianglePair> detect_self_intersections(const TriangleMesh& mesh) {
  check_indices(mesh);
  return Bvh(mesh).self_pairs();
}

std::vector<TrianglePair> detect_self_intersections_brute(
    const TriangleMesh& mesh) {
  check_indices(mesh);
  std::vector<TrianglePair> out;
  const int n = static_cast<int>(mesh.triangles.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (test_pair(mesh, i, j)) out.emplace_back(i, j);
  return out;
}

}  // namespace topogen
