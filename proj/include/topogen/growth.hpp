#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "topogen/mesh.hpp"
#include "topogen/wfc.hpp"

namespace topogen {

/// Objective F = w_rep * E_tp - w_area * Area + w_env * P_env, minimised by
/// normalised gradient steps with halving and hard intersection rollback.
struct GrowthConfig {
  double w_area = 1.0;
  double w_rep = 0.2;
  double w_env = 10.0;
  /// Largest vertex displacement of a full step, scene units. 0 selects
  /// 0.1 x the mean seed edge length.
  double step_size = 0.0;
  int max_iterations = 200;
  int max_halvings = 8;
  int remesh_every = 10;
  /// Remeshing bounds, scene units. 0 selects 0.5x / 2x the mean seed edge.
  double edge_min = 0.0;
  double edge_max = 0.0;
  std::uint64_t rng_seed = 0;
  /// Initial vertex jitter, as a fraction of edge_min.
  double jitter = 0.05;
  /// Descent direction is (I + smoothing * L)^-1 g with L the graph
  /// Laplacian of the mesh; 0 steps along the raw gradient.
  double smoothing = 4.0;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

struct GrowthRecord {
  int iteration = 0;
  double area = 0.0;
  double repulsive_energy = 0.0;
  std::int64_t chi = 0;
  int component_count = 0;
  bool accepted = false;
  double step = 0.0;
};

struct GrowthTrace {
  std::vector<GrowthRecord> records;
  void write_csv(std::ostream& os) const;
};

struct GrowthResult {
  std::vector<TriangleMesh> meshes;
  GrowthTrace trace;
  /// Snapshots for the requested stages, each one mesh per object.
  std::vector<std::vector<TriangleMesh>> stages;
};

/// One third of the incident triangle area per vertex.
std::vector<double> vertex_areas(const TriangleMesh& mesh);

/// Normalised area-weighted vertex normals.
std::vector<Vec3> vertex_normals(const TriangleMesh& mesh);

/// Sum over ordered vertex pairs i != j of
///   A_i A_j (n_i . (x_i - x_j))^2 / |x_i - x_j|^6,
/// with distances below 1e-9 clamped. Invariant under uniform scaling.
double tangent_point_energy(const TriangleMesh& mesh);

/// Distance from `p` to the nearest free cell of `env` (cells outside the
/// grid count as blocked); 0 in free space. Optionally returns d(depth)/dp.
double penetration_depth(const OccupancyGrid& env, const Vec3& p,
                         Vec3* gradient = nullptr);

/// Sum_i A_i * depth_i^2.
double environment_penalty(const TriangleMesh& mesh, const OccupancyGrid& env);

struct ObjectiveTerms {
  double area = 0.0;
  double repulsive = 0.0;
  double environment = 0.0;
  double total = 0.0;
};

ObjectiveTerms growth_objective(const TriangleMesh& mesh,
                                const OccupancyGrid* env,
                                const GrowthConfig& cfg);

/// Analytic gradient of growth_objective with respect to every vertex.
std::vector<Vec3> growth_gradient(const TriangleMesh& mesh,
                                  const OccupancyGrid* env,
                                  const GrowthConfig& cfg);

/// Solves (I + alpha * L) d = g, L the uniform graph Laplacian. The operator
/// is symmetric positive definite, so d is a descent direction for g.
std::vector<Vec3> smoothed_direction(const TriangleMesh& mesh,
                                     const std::vector<Vec3>& g, double alpha);

/// Grows the objects jointly. The union must be intersection-free and every
/// object closed and oriented. `stages` (sorted iteration counts, each
/// <= max_iterations) requests snapshots; stage k is the state after k loop
/// iterations, whether or not they were accepted.
GrowthResult grow(const std::vector<TriangleMesh>& meshes,
                  const OccupancyGrid* env, const GrowthConfig& cfg,
                  const std::vector<int>& stages = {});

/// One split pass (edges longer than edge_max) followed by one collapse pass
/// (edges shorter than edge_min). Returns the number of edits.
int remesh(TriangleMesh& mesh, double edge_min, double edge_max);

/// Per-object meshes from a union mesh whose object ids are 0..count-1.
std::vector<TriangleMesh> split_objects(const TriangleMesh& mesh, int count);

}  // namespace topogen
