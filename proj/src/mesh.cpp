#include "topogen/mesh.hpp"

#include <algorithm>
#include <map>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>

#include <Eigen/Geometry>

#include "topogen/mesh_editor.hpp"

namespace topogen {
namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

struct HalfEdge {
  std::uint64_t key;
  int tri;
  bool forward;  // traversed low -> high

  bool operator<(const HalfEdge& o) const {
    return key != o.key ? key < o.key : tri < o.tri;
  }
};

std::vector<HalfEdge> sorted_half_edges(const TriangleMesh& mesh) {
  std::vector<HalfEdge> hes;
  hes.reserve(mesh.triangles.size() * 3);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int u = tri[k], v = tri[(k + 1) % 3];
      hes.push_back({edge_key(u, v), static_cast<int>(t), u < v});
    }
  }
  std::sort(hes.begin(), hes.end());
  return hes;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // Keeps the smaller index as the root.
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[b] = a;
    else parent_[a] = b;
  }

 private:
  std::vector<int> parent_;
};

std::vector<int> component_labels(const TriangleMesh& mesh, int* count) {
  const auto hes = sorted_half_edges(mesh);
  DisjointSets ds(mesh.triangles.size());
  for (std::size_t i = 1; i < hes.size(); ++i)
    if (hes[i].key == hes[i - 1].key) ds.unite(hes[i].tri, hes[i - 1].tri);
  std::vector<int> label(mesh.triangles.size(), -1);
  std::vector<int> root_label(mesh.triangles.size(), -1);
  int next = 0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    int r = ds.find(static_cast<int>(t));
    if (root_label[r] < 0) root_label[r] = next++;
    label[t] = root_label[r];
  }
  if (count) *count = next;
  return label;
}

Vec3 tri_cross(const TriangleMesh& m, const Triangle& t) {
  return (m.vertices[t[1]] - m.vertices[t[0]])
      .cross(m.vertices[t[2]] - m.vertices[t[0]]);
}

}  // namespace

void check_indices(const TriangleMesh& mesh) {
  const auto n = static_cast<int>(mesh.vertices.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int v : mesh.triangles[t])
      if (v < 0 || v >= n)
        throw StructuralError("triangle " + std::to_string(t) +
                              " references vertex " + std::to_string(v) +
                              " but mesh has " + std::to_string(n) +
                              " vertices");
  if (!mesh.object_ids.empty() &&
      mesh.object_ids.size() != mesh.triangles.size())
    throw StructuralError("object_ids size does not match triangle count");
}

std::vector<Edge> edges(const TriangleMesh& mesh) {
  std::vector<Edge> out;
  out.reserve(mesh.triangles.size() * 3);
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) out.emplace_back(t[k], t[(k + 1) % 3]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::int64_t euler_characteristic(const TriangleMesh& mesh) {
  check_indices(mesh);
  return static_cast<std::int64_t>(mesh.vertices.size()) -
         static_cast<std::int64_t>(edges(mesh).size()) +
         static_cast<std::int64_t>(mesh.triangles.size());
}

int component_count(const TriangleMesh& mesh) {
  int n = 0;
  component_labels(mesh, &n);
  return n;
}

std::vector<TriangleMesh> connected_components(const TriangleMesh& mesh) {
  check_indices(mesh);
  int count = 0;
  const auto label = component_labels(mesh, &count);
  std::vector<TriangleMesh> parts(count);
  std::vector<std::vector<int>> remap(
      count, std::vector<int>());  // lazily sized per part
  for (auto& r : remap) r.assign(mesh.vertices.size(), -1);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    auto& part = parts[label[t]];
    auto& map = remap[label[t]];
    Triangle nt{};
    for (int k = 0; k < 3; ++k) {
      int v = mesh.triangles[t][k];
      if (map[v] < 0) {
        map[v] = static_cast<int>(part.vertices.size());
        part.vertices.push_back(mesh.vertices[v]);
      }
      nt[k] = map[v];
    }
    part.triangles.push_back(nt);
    if (!mesh.object_ids.empty()) part.object_ids.push_back(mesh.object_ids[t]);
  }
  return parts;
}

MeshDiagnostics validate_manifold(const TriangleMesh& mesh) {
  check_indices(mesh);
  MeshDiagnostics d;
  d.vertex_count = static_cast<std::int64_t>(mesh.vertices.size());
  d.face_count = static_cast<std::int64_t>(mesh.triangles.size());

  const auto hes = sorted_half_edges(mesh);
  bool closed = true;
  bool manifold_edges = true;
  // Dual graph: for each manifold edge, the two triangles and whether their
  // current windings agree across it.
  struct DualLink {
    int other;
    bool agree;
  };
  std::vector<std::vector<DualLink>> dual(mesh.triangles.size());
  for (std::size_t i = 0; i < hes.size();) {
    std::size_t j = i;
    while (j < hes.size() && hes[j].key == hes[i].key) ++j;
    ++d.edge_count;
    const std::size_t n = j - i;
    if (n != 2) {
      closed = false;
      if (n > 2) manifold_edges = false;
    } else {
      const bool agree = hes[i].forward != hes[i + 1].forward;
      dual[hes[i].tri].push_back({hes[i + 1].tri, agree});
      dual[hes[i + 1].tri].push_back({hes[i].tri, agree});
    }
    i = j;
  }
  d.euler_characteristic = d.vertex_count - d.edge_count + d.face_count;

  // Propagate a flip flag over the dual graph. Orientable iff no conflict;
  // oriented iff additionally the stored winding needs no flips.
  std::vector<int> flip(mesh.triangles.size(), -1);
  bool orientable = manifold_edges;
  bool needs_flip = false;
  int components = 0;
  for (std::size_t s = 0; s < mesh.triangles.size() && orientable; ++s) {
    if (flip[s] >= 0) continue;
    ++components;
    flip[s] = 0;
    std::queue<int> q;
    q.push(static_cast<int>(s));
    while (!q.empty() && orientable) {
      int t = q.front();
      q.pop();
      for (const auto& link : dual[t]) {
        const int want = link.agree ? flip[t] : 1 - flip[t];
        if (flip[link.other] < 0) {
          flip[link.other] = want;
          needs_flip = needs_flip || want == 1;
          q.push(link.other);
        } else if (flip[link.other] != want) {
          orientable = false;
          break;
        }
      }
    }
  }
  d.component_count = component_count(mesh);
  d.is_closed = closed && !mesh.triangles.empty();
  d.is_oriented = orientable && !needs_flip;
  d.has_degenerate = has_degenerate_triangle(mesh);
  d.self_intersections = detect_self_intersections(mesh);
  return d;
}

TriangleMesh merge(const std::vector<TriangleMesh>& meshes) {
  TriangleMesh out;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    const int base = static_cast<int>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), meshes[i].vertices.begin(),
                        meshes[i].vertices.end());
    for (const auto& t : meshes[i].triangles) {
      out.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
      out.object_ids.push_back(static_cast<int>(i));
    }
  }
  return out;
}

double triangle_area(const TriangleMesh& mesh, std::size_t tri) {
  return 0.5 * tri_cross(mesh, mesh.triangles[tri]).norm();
}

double surface_area(const TriangleMesh& mesh) {
  double a = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    a += triangle_area(mesh, t);
  return a;
}

double enclosed_volume(const TriangleMesh& mesh) {
  double v = 0.0;
  for (const auto& t : mesh.triangles)
    v += mesh.vertices[t[0]].dot(
        mesh.vertices[t[1]].cross(mesh.vertices[t[2]]));
  return v / 6.0;
}

double mean_edge_length(const TriangleMesh& mesh) {
  const auto es = edges(mesh);
  if (es.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& e : es)
    sum += (mesh.vertices[e.first] - mesh.vertices[e.second]).norm();
  return sum / static_cast<double>(es.size());
}

bool has_degenerate_triangle(const TriangleMesh& mesh, double area_sq_tol) {
  for (const auto& t : mesh.triangles)
    if (0.25 * tri_cross(mesh, t).squaredNorm() < area_sq_tol) return true;
  return false;
}

Aabb bounds(const TriangleMesh& mesh) { return bounds(mesh.vertices); }

Aabb bounds(const std::vector<Vec3>& points) {
  Aabb b;
  for (const auto& p : points) b.expand(p);
  return b;
}

TriangleMesh transformed(const TriangleMesh& mesh, double scale,
                         const Vec3& offset) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = scale * v + offset;
  return out;
}

TriangleMesh subdivide(const TriangleMesh& mesh) {
  check_indices(mesh);
  TriangleMesh out;
  out.vertices = mesh.vertices;
  std::map<Edge, int> mid;
  auto midpoint = [&](int a, int b) {
    const Edge e(a, b);
    auto it = mid.find(e);
    if (it != mid.end()) return it->second;
    const int m = static_cast<int>(out.vertices.size());
    out.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
    mid.emplace(e, m);
    return m;
  };
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto [a, b, c] = mesh.triangles[t];
    const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    out.triangles.insert(out.triangles.end(), {{a, ab, ca}, {ab, b, bc}, {ca, bc, c}, {ab, bc, ca}});
    if (!mesh.object_ids.empty())
      out.object_ids.insert(out.object_ids.end(), 4, mesh.object_ids[t]);
  }
  return out;
}

TriangleMesh edge_split(const TriangleMesh& mesh, Edge edge) {
  check_indices(mesh);
  MeshEditor ed(mesh);
  if (!ed.split(edge))
    throw UnsupportedEditError("edge (" + std::to_string(edge.first) + ", " +
                               std::to_string(edge.second) +
                               ") is not an interior edge");
  return ed.finish();
}

std::optional<TriangleMesh> edge_collapse(const TriangleMesh& mesh,
                                          Edge edge) {
  check_indices(mesh);
  MeshEditor ed(mesh);
  if (ed.edge_triangles(edge).size() != 2)
    throw UnsupportedEditError("edge (" + std::to_string(edge.first) + ", " +
                               std::to_string(edge.second) +
                               ") is not an interior edge");
  if (!ed.collapse(edge)) return std::nullopt;
  return ed.finish();
}

// ---------------------------------------------------------------------------
// I/O

namespace {

// Next non-empty, non-comment line.
bool next_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

void write_off(std::ostream& os, const TriangleMesh& mesh) {
  os << "OFF\n"
     << mesh.vertices.size() << ' ' << mesh.triangles.size() << " 0\n";
  os << std::setprecision(17);
  for (const auto& v : mesh.vertices)
    os << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles)
    os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

TriangleMesh read_off(std::istream& is) {
  std::string line;
  if (!next_line(is, line)) throw StructuralError("OFF: empty input");
  std::istringstream head(line);
  std::string magic;
  head >> magic;
  if (magic != "OFF") throw StructuralError("OFF: missing header");
  std::size_t nv = 0, nf = 0, ne = 0;
  if (!(head >> nv)) {
    if (!next_line(is, line)) throw StructuralError("OFF: missing counts");
    head = std::istringstream(line);
    head >> nv;
  }
  if (!(head >> nf >> ne)) throw StructuralError("OFF: malformed counts");
  TriangleMesh mesh;
  mesh.vertices.reserve(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    if (!next_line(is, line)) throw StructuralError("OFF: truncated vertices");
    std::istringstream ls(line);
    Vec3 p;
    if (!(ls >> p.x() >> p.y() >> p.z()))
      throw StructuralError("OFF: bad vertex line " + std::to_string(i));
    mesh.vertices.push_back(p);
  }
  for (std::size_t i = 0; i < nf; ++i) {
    if (!next_line(is, line)) throw StructuralError("OFF: truncated faces");
    std::istringstream ls(line);
    int k = 0;
    Triangle t{};
    if (!(ls >> k >> t[0] >> t[1] >> t[2]) || k != 3)
      throw StructuralError("OFF: face " + std::to_string(i) +
                            " is not a triangle");
    mesh.triangles.push_back(t);
  }
  check_indices(mesh);
  return mesh;
}

void write_obj(std::ostream& os, const TriangleMesh& mesh) {
  os << std::setprecision(17);
  for (const auto& v : mesh.vertices)
    os << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  int current = std::numeric_limits<int>::min();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (!mesh.object_ids.empty() && mesh.object_ids[t] != current) {
      current = mesh.object_ids[t];
      os << "g object_" << current << '\n';
    }
    const auto& tri = mesh.triangles[t];
    os << "f " << tri[0] + 1 << ' ' << tri[1] + 1 << ' ' << tri[2] + 1 << '\n';
  }
}

TriangleMesh read_obj(std::istream& is) {
  TriangleMesh mesh;
  std::string line;
  int current = -1;
  bool any_group = false;
  while (next_line(is, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z()))
        throw StructuralError("OBJ: bad vertex record");
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        int i = std::stoi(tok.substr(0, tok.find('/')));
        idx.push_back(i < 0 ? static_cast<int>(mesh.vertices.size()) + i
                            : i - 1);
      }
      if (idx.size() != 3) throw StructuralError("OBJ: face is not a triangle");
      mesh.triangles.push_back({idx[0], idx[1], idx[2]});
      mesh.object_ids.push_back(current);
    } else if (tag == "g") {
      std::string name;
      ls >> name;
      const std::string prefix = "object_";
      if (name.rfind(prefix, 0) == 0) {
        current = std::stoi(name.substr(prefix.size()));
        any_group = true;
      }
    }
  }
  if (!any_group) mesh.object_ids.clear();
  check_indices(mesh);
  return mesh;
}

void save_mesh(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".obj")
    write_obj(os, mesh);
  else
    write_off(os, mesh);
}

TriangleMesh load_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".obj")
    return read_obj(is);
  return read_off(is);
}

}  // namespace topogen
