#include "topogen/growth.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include <Eigen/Geometry>
#include <Eigen/SparseCholesky>

#include "topogen/mesh_editor.hpp"
#include "topogen/rng.hpp"

namespace topogen {

void GrowthConfig::validate() const {
  if (w_area < 0 || w_rep < 0 || w_env < 0)
    throw std::invalid_argument("growth weights must be non-negative");
  if (w_area == 0 && w_rep == 0 && w_env == 0)
    throw std::invalid_argument("growth weights must not all be zero");
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
  if (remesh_every < 1) throw std::invalid_argument("remesh_every must be >= 1");
  if (max_halvings < 0) throw std::invalid_argument("max_halvings must be >= 0");
  if (smoothing < 0) throw std::invalid_argument("smoothing must be >= 0");
  if (step_size < 0) throw std::invalid_argument("step_size must be >= 0");
  if ((edge_min != 0 || edge_max != 0) && !(edge_min < edge_max))
    throw std::invalid_argument("edge_min must be smaller than edge_max");
}

void GrowthTrace::write_csv(std::ostream& os) const {
  os << "iteration,area,energy,chi,components,accepted\n";
  os << std::setprecision(12);
  for (const auto& r : records)
    os << r.iteration << ',' << r.area << ',' << r.repulsive_energy << ','
       << r.chi << ',' << r.component_count << ',' << (r.accepted ? 1 : 0)
       << '\n';
}

namespace {

constexpr double kMinDistSq = 1e-18;  // (1e-9)^2

struct SurfaceGeometry {
  std::vector<Vec3> cross;        // per triangle, (b - a) x (c - a)
  std::vector<double> area;       // per vertex, one third of incident area
  std::vector<Vec3> normal_sum;   // per vertex, sum of cross / 2
  std::vector<Vec3> normal;       // per vertex, unit (or zero)
  std::vector<double> normal_len;
  double total_area = 0.0;
};

SurfaceGeometry surface_geometry(const TriangleMesh& m) {
  SurfaceGeometry g;
  const std::size_t nv = m.vertices.size();
  g.cross.resize(m.triangles.size());
  g.area.assign(nv, 0.0);
  g.normal_sum.assign(nv, Vec3::Zero());
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    const Vec3 c = (m.vertices[tri[1]] - m.vertices[tri[0]])
                       .cross(m.vertices[tri[2]] - m.vertices[tri[0]]);
    g.cross[t] = c;
    const double a = 0.5 * c.norm();
    g.total_area += a;
    for (int v : tri) {
      g.area[v] += a / 3.0;
      g.normal_sum[v] += 0.5 * c;
    }
  }
  g.normal.resize(nv);
  g.normal_len.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const double len = g.normal_sum[v].norm();
    g.normal_len[v] = len;
    g.normal[v] = len > 0.0 ? Vec3(g.normal_sum[v] / len) : Vec3::Zero();
  }
  return g;
}

// Accumulators for the chain rule: objective derivatives with respect to the
// per-vertex areas, the per-vertex unit normals, and positions directly.
struct PartialGrads {
  std::vector<double> d_area;
  std::vector<Vec3> d_normal;
  std::vector<Vec3> d_pos;
  explicit PartialGrads(std::size_t n)
      : d_area(n, 0.0), d_normal(n, Vec3::Zero()), d_pos(n, Vec3::Zero()) {}
};

// Pairwise tangent-point kernel. Each unordered pair i < j contributes
// K_ij + K_ji = A_i A_j (s_i^2 + s_j^2) / r^6 with s = n . (x_i - x_j). Adds
// `weight` times the partial derivatives to `pg` when given.
double tangent_point_pass(const TriangleMesh& m, const SurfaceGeometry& g,
                          double weight, PartialGrads* pg) {
  const std::size_t n = m.vertices.size();
  std::vector<double> px(n), py(n), pz(n), nx(n), ny(n), nz(n);
  for (std::size_t i = 0; i < n; ++i) {
    px[i] = m.vertices[i].x();
    py[i] = m.vertices[i].y();
    pz[i] = m.vertices[i].z();
    nx[i] = g.normal[i].x();
    ny[i] = g.normal[i].y();
    nz[i] = g.normal[i].z();
  }
  const auto& A = g.area;
  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    double gai = 0.0;
    double gni[3] = {0, 0, 0}, gxi[3] = {0, 0, 0};
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = px[i] - px[j], dy = py[i] - py[j], dz = pz[i] - pz[j];
      double r2 = dx * dx + dy * dy + dz * dz;
      const bool clamped = r2 < kMinDistSq;
      if (clamped) r2 = kMinDistSq;
      const double q = 1.0 / (r2 * r2 * r2);
      const double si = nx[i] * dx + ny[i] * dy + nz[i] * dz;
      const double sj = nx[j] * dx + ny[j] * dy + nz[j] * dz;
      const double ss = si * si + sj * sj;
      const double w = A[i] * A[j];
      row += w * ss * q;
      if (!pg) continue;
      const double ssq = ss * q * weight;
      gai += A[j] * ssq;
      pg->d_area[j] += A[i] * ssq;
      const double ci = 2.0 * w * si * q * weight;
      const double cj = 2.0 * w * sj * q * weight;
      gni[0] += ci * dx;
      gni[1] += ci * dy;
      gni[2] += ci * dz;
      pg->d_normal[j] += Vec3(cj * dx, cj * dy, cj * dz);
      const double radial = clamped ? 0.0 : 6.0 * w * ssq / r2;
      const double gdx = ci * nx[i] + cj * nx[j] - radial * dx;
      const double gdy = ci * ny[i] + cj * ny[j] - radial * dy;
      const double gdz = ci * nz[i] + cj * nz[j] - radial * dz;
      gxi[0] += gdx;
      gxi[1] += gdy;
      gxi[2] += gdz;
      pg->d_pos[j] -= Vec3(gdx, gdy, gdz);
    }
    energy += row;
    if (pg) {
      pg->d_area[i] += gai;
      pg->d_normal[i] += Vec3(gni[0], gni[1], gni[2]);
      pg->d_pos[i] += Vec3(gxi[0], gxi[1], gxi[2]);
    }
  }
  return energy;
}

double tangent_point_value(const TriangleMesh& m, const SurfaceGeometry& g) {
  return tangent_point_pass(m, g, 1.0, nullptr);
}

double environment_pass(const TriangleMesh& m, const SurfaceGeometry& g,
                        const OccupancyGrid& env, double weight,
                        PartialGrads* pg) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    Vec3 grad;
    const double depth = penetration_depth(env, m.vertices[i], pg ? &grad : nullptr);
    if (depth <= 0.0) continue;
    total += g.area[i] * depth * depth;
    if (pg) {
      pg->d_area[i] += weight * depth * depth;
      pg->d_pos[i] += weight * g.area[i] * 2.0 * depth * grad;
    }
  }
  return total;
}

}  // namespace

std::vector<double> vertex_areas(const TriangleMesh& mesh) {
  return surface_geometry(mesh).area;
}

std::vector<Vec3> vertex_normals(const TriangleMesh& mesh) {
  return surface_geometry(mesh).normal;
}

double tangent_point_energy(const TriangleMesh& mesh) {
  check_indices(mesh);
  return tangent_point_value(mesh, surface_geometry(mesh));
}

double penetration_depth(const OccupancyGrid& env, const Vec3& p, Vec3* gradient) {
  if (gradient) gradient->setZero();
  const double cs = env.cell_size;
  int c[3];
  bool inside = true;
  for (int a = 0; a < 3; ++a) {
    c[a] = static_cast<int>(std::floor(p[a] / cs));
    const int n = a == 0 ? env.dims.nx : a == 1 ? env.dims.ny : env.dims.nz;
    if (c[a] < 0 || c[a] >= n) inside = false;
  }
  if (inside && !env.occupied_at(c[0], c[1], c[2])) return 0.0;

  constexpr int kWindow = 3;
  const int n[3] = {env.dims.nx, env.dims.ny, env.dims.nz};
  int lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    const int centre = std::clamp(c[a], 0, n[a] - 1);
    lo[a] = std::max(0, centre - kWindow);
    hi[a] = std::min(n[a] - 1, centre + kWindow);
  }
  double best = std::numeric_limits<double>::infinity();
  Vec3 best_point = p;
  for (int z = lo[2]; z <= hi[2]; ++z)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int x = lo[0]; x <= hi[0]; ++x) {
        if (env.occupied_at(x, y, z)) continue;
        const Vec3 bl(x * cs, y * cs, z * cs);
        const Vec3 closest = p.cwiseMax(bl).cwiseMin(bl + Vec3::Constant(cs));
        const double d = (p - closest).norm();
        if (d < best) {
          best = d;
          best_point = closest;
        }
      }
  if (!std::isfinite(best)) return kWindow * cs;
  if (gradient && best > 0.0) *gradient = (p - best_point) / best;
  return best;
}

double environment_penalty(const TriangleMesh& mesh, const OccupancyGrid& env) {
  return environment_pass(mesh, surface_geometry(mesh), env, 1.0, nullptr);
}

ObjectiveTerms growth_objective(const TriangleMesh& mesh, const OccupancyGrid* env,
                                const GrowthConfig& cfg) {
  const SurfaceGeometry g = surface_geometry(mesh);
  ObjectiveTerms t;
  t.area = g.total_area;
  t.repulsive = tangent_point_value(mesh, g);
  t.environment = env && cfg.w_env != 0.0 ? environment_pass(mesh, g, *env, 1.0, nullptr) : 0.0;
  t.total = cfg.w_rep * t.repulsive - cfg.w_area * t.area + cfg.w_env * t.environment;
  return t;
}

std::vector<Vec3> growth_gradient(const TriangleMesh& mesh, const OccupancyGrid* env,
                                  const GrowthConfig& cfg) {
  check_indices(mesh);
  const SurfaceGeometry g = surface_geometry(mesh);
  const std::size_t nv = mesh.vertices.size();
  PartialGrads pg(nv);
  if (cfg.w_rep != 0.0) tangent_point_pass(mesh, g, cfg.w_rep, &pg);
  if (env && cfg.w_env != 0.0) environment_pass(mesh, g, *env, cfg.w_env, &pg);

  // Unit normal n = N / |N|: project and scale to get d/dN.
  std::vector<Vec3> d_sum(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const Vec3& n = g.normal[v];
    d_sum[v] = g.normal_len[v] > 0.0
                   ? Vec3((pg.d_normal[v] - n * n.dot(pg.d_normal[v])) / g.normal_len[v])
                   : Vec3::Zero();
  }
  std::vector<Vec3> grad = pg.d_pos;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec3& c = g.cross[t];
    const double len = c.norm();
    // d/d(cross): area terms (area = |c|/2, each vertex gets a third) plus
    // the normal sums (each vertex sum holds c/2).
    double d_tri_area = -cfg.w_area;
    for (int v : tri) d_tri_area += pg.d_area[v] / 3.0;
    Vec3 dc = 0.5 * (d_sum[tri[0]] + d_sum[tri[1]] + d_sum[tri[2]]);
    if (len > 0.0) dc += d_tri_area * 0.5 * c / len;
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& e = mesh.vertices[tri[2]];
    grad[tri[0]] += dc.cross(e - b);
    grad[tri[1]] += dc.cross(a - e);
    grad[tri[2]] += dc.cross(b - a);
  }
  return grad;
}

std::vector<Vec3> smoothed_direction(const TriangleMesh& mesh, const std::vector<Vec3>& g,
                                     double alpha) {
  if (alpha <= 0.0) return g;
  const int n = static_cast<int>(mesh.vertices.size());
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> diag(n, 1.0);
  for (const auto& e : edges(mesh)) {
    trip.emplace_back(e.first, e.second, -alpha);
    trip.emplace_back(e.second, e.first, -alpha);
    diag[e.first] += alpha;
    diag[e.second] += alpha;
  }
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, diag[i]);
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
  Eigen::MatrixXd rhs(n, 3);
  for (int i = 0; i < n; ++i) rhs.row(i) = g[i].transpose();
  const Eigen::MatrixXd x = solver.solve(rhs);
  std::vector<Vec3> out(n);
  for (int i = 0; i < n; ++i) out[i] = x.row(i).transpose();
  return out;
}

std::vector<TriangleMesh> split_objects(const TriangleMesh& mesh, int count) {
  std::vector<TriangleMesh> out(count);
  std::vector<int> owner(mesh.vertices.size(), -1);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const int o = mesh.object_id(t);
    if (o < 0 || o >= count) throw std::invalid_argument("object id out of range");
    for (int v : mesh.triangles[t]) owner[v] = o;
  }
  // vertices keep their relative order
  std::vector<int> remap(mesh.vertices.size(), -1);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (owner[v] < 0) continue;
    remap[v] = static_cast<int>(out[owner[v]].vertices.size());
    out[owner[v]].vertices.push_back(mesh.vertices[v]);
  }
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    out[mesh.object_id(t)].triangles.push_back({remap[tri[0]], remap[tri[1]], remap[tri[2]]});
  }
  return out;
}

int remesh(TriangleMesh& mesh, double edge_min, double edge_max) {
  MeshEditor ed(mesh);
  int edits = 0;
  auto by_length = [&](bool longest_first, double bound) {
    std::vector<std::pair<double, Edge>> es;
    for (const Edge& e : ed.edges()) {
      const double l = ed.edge_length(e);
      if (longest_first ? l > bound : l < bound) es.emplace_back(l, e);
    }
    std::sort(es.begin(), es.end(), [&](const auto& x, const auto& y) {
      if (x.first != y.first) return longest_first ? x.first > y.first : x.first < y.first;
      return x.second < y.second;
    });
    return es;
  };
  for (const auto& [len, e] : by_length(true, edge_max)) {
    if (ed.edge_length(e) > edge_max && ed.split(e)) ++edits;
  }
  for (const auto& [len, e] : by_length(false, edge_min)) {
    if (!ed.has_edge(e) || ed.edge_length(e) >= edge_min) continue;
    if (ed.collapse(e)) ++edits;
  }
  mesh = ed.finish();
  return edits;
}

namespace {

std::vector<std::int64_t> object_chis(const TriangleMesh& u, int count) {
  std::vector<std::int64_t> chis;
  for (const auto& m : split_objects(u, count)) chis.push_back(euler_characteristic(m));
  return chis;
}

bool geometry_ok(const TriangleMesh& u) {
  return !has_degenerate_triangle(u) && detect_self_intersections(u).empty();
}

}  // namespace

GrowthResult grow(const std::vector<TriangleMesh>& meshes, const OccupancyGrid* env,
                  const GrowthConfig& cfg, const std::vector<int>& stages) {
  cfg.validate();
  if (!std::is_sorted(stages.begin(), stages.end()))
    throw std::invalid_argument("growth stages must be sorted");
  for (int s : stages)
    if (s < 0 || s > cfg.max_iterations)
      throw std::invalid_argument("growth stage outside [0, max_iterations]");
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    const auto d = validate_manifold(meshes[i]);
    if (!d.is_closed || !d.is_oriented)
      throw std::invalid_argument("growth input " + std::to_string(i) +
                                  " is not a closed oriented surface");
  }
  const int count = static_cast<int>(meshes.size());
  TriangleMesh current = merge(meshes);
  if (!detect_self_intersections(current).empty())
    throw std::invalid_argument("growth input meshes intersect");

  GrowthResult result;
  std::size_t next_stage = 0;
  auto snapshot = [&](int iteration) {
    while (next_stage < stages.size() && stages[next_stage] == iteration) {
      result.stages.push_back(split_objects(current, count));
      ++next_stage;
    }
  };
  snapshot(0);
  if (cfg.max_iterations == 0 || current.triangles.empty()) {
    result.meshes = meshes;
    while (next_stage < stages.size()) {
      result.stages.push_back(meshes);
      ++next_stage;
    }
    return result;
  }

  const double mean_edge = mean_edge_length(current);
  const double edge_min = cfg.edge_min > 0 ? cfg.edge_min : 0.5 * mean_edge;
  const double edge_max = cfg.edge_max > 0 ? cfg.edge_max : 2.0 * mean_edge;
  const double base_step = cfg.step_size > 0 ? cfg.step_size : 0.1 * mean_edge;
  const auto chis = object_chis(current, count);

  if (cfg.jitter > 0.0) {
    CounterRng rng(cfg.rng_seed, 0x317E);
    TriangleMesh jittered = current;
    const double mag = cfg.jitter * edge_min;
    for (auto& p : jittered.vertices)
      p += Vec3(rng.uniform(-mag, mag), rng.uniform(-mag, mag), rng.uniform(-mag, mag));
    if (geometry_ok(jittered)) current = std::move(jittered);
  }

  ObjectiveTerms terms = growth_objective(current, env, cfg);
  int accepted_steps = 0;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const auto grad = smoothed_direction(current, growth_gradient(current, env, cfg),
                                         cfg.smoothing);
    double gmax = 0.0;
    for (const auto& gv : grad) gmax = std::max(gmax, gv.norm());

    GrowthRecord rec;
    rec.iteration = it;
    if (gmax > 0.0 && std::isfinite(gmax)) {
      double step = base_step;
      for (int h = 0; h <= cfg.max_halvings && !rec.accepted; ++h, step *= 0.5) {
        TriangleMesh trial = current;
        const double scale = step / gmax;
        for (std::size_t v = 0; v < trial.vertices.size(); ++v)
          trial.vertices[v] -= scale * grad[v];
        if (has_degenerate_triangle(trial)) continue;
        const ObjectiveTerms t = growth_objective(trial, env, cfg);
        if (!(t.total <= terms.total + 1e-9)) continue;
        if (!detect_self_intersections(trial).empty()) continue;
        current = std::move(trial);
        terms = t;
        rec.accepted = true;
        rec.step = step;
      }
    }
    if (rec.accepted && ++accepted_steps % cfg.remesh_every == 0) {
      TriangleMesh edited = current;
      remesh(edited, edge_min, edge_max);
      if (geometry_ok(edited) && object_chis(edited, count) == chis) {
        current = std::move(edited);
        terms = growth_objective(current, env, cfg);
      }
    }
    rec.area = terms.area;
    rec.repulsive_energy = terms.repulsive;
    rec.chi = euler_characteristic(current);
    rec.component_count = component_count(current);
    result.trace.records.push_back(rec);
    snapshot(it);
  }
  result.meshes = split_objects(current, count);
  return result;
}

}  // namespace topogen
