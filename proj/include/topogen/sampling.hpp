#pragma once

#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

#include "topogen/mesh.hpp"

namespace topogen {

/// Points with per-point genus label and object id (the index of the mesh
/// the point was drawn from).
struct LabeledCloud {
  std::vector<Vec3> points;
  std::vector<int> genus_label;
  std::vector<int> object_id;
  std::uint64_t rng_seed = 0;

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

/// Area-weighted uniform sampling over the union of all triangles, followed
/// by uniform barycentric placement. Point k depends only on (seed, k).
LabeledCloud sample_cloud(const std::vector<TriangleMesh>& objects,
                          const std::vector<int>& genera, std::size_t n,
                          std::uint64_t rng_seed);

/// Global point-cloud augmentation, applied in this order: per-axis mirror,
/// rotation about x then y then z, per-axis scale, per-axis shift, per-point
/// Gaussian jitter.
struct AugmentConfig {
  double mirror_prob = 0.5;
  /// Angles are uniform in [0, rotation_max) per axis.
  double rotation_max = 2.0 * std::numbers::pi;
  /// Per-axis scale uniform in [1 - scale_spread, 1 + scale_spread].
  double scale_spread = 0.5;
  /// Per-axis shift uniform in [-shift_range, shift_range].
  double shift_range = 25.0;
  double jitter_sigma = 0.025;
  std::uint64_t rng_seed = 0;

  /// All steps disabled.
  static AugmentConfig identity();
};

LabeledCloud augment(const LabeledCloud& cloud, const AugmentConfig& cfg);

/// CSV with header `x,y,z,genus,object_id`, coordinates at 9 significant
/// digits.
void write_cloud_csv(std::ostream& os, const LabeledCloud& cloud);
LabeledCloud read_cloud_csv(std::istream& is);
void save_cloud(const std::string& path, const LabeledCloud& cloud);
LabeledCloud load_cloud(const std::string& path);

/// One integer label per line.
std::vector<int> read_labels(std::istream& is);
std::vector<int> load_labels(const std::string& path);
void write_labels(std::ostream& os, const std::vector<int>& labels);

}  // namespace topogen
