#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "topogen/growth.hpp"
#include "topogen/metrics.hpp"
#include "topogen/topology.hpp"
#include "topogen/wfc.hpp"

namespace topogen {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::array<const char*, 3> kSplitNames{"train", "val", "test"};

struct DatasetConfig {
  std::array<int, 3> counts{5725, 1610, 965};  // train, val, test
  int min_objects = 1;
  int max_objects = 3;
  int min_genus = 0;
  int max_genus = 3;
  std::size_t points_per_cloud = 4096;
  GridDims env_dims{6, 6, 6};  // tiles
  double cell_size = 1.0;
  /// Weight of the empty tile relative to 1 for every other tile.
  double empty_weight = 30.0;
  /// Scene units per seed voxel.
  double seed_scale = 0.5;
  GrowthConfig growth;
  /// Each scene stops growing at one of these iteration counts.
  std::vector<int> growth_stages{20, 40, 60};
  double linked_fraction = 0.15;
  std::uint64_t master_seed = 0;
  /// Edge of the cube the point cloud is scaled into, centred on the origin.
  double normalization = 100.0;
  int max_retries = 3;
  /// 0 uses the hardware concurrency.
  int threads = 1;

  void validate() const;
};

/// Strict: unknown keys and type mismatches throw ConfigError.
DatasetConfig dataset_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DatasetConfig& cfg);
DatasetConfig load_dataset_config(const std::string& path);

/// Strict parse of a GrowthConfig object layered over `base`.
GrowthConfig growth_config_from_json(const nlohmann::json& j, GrowthConfig base = {});
nlohmann::json to_json(const GrowthConfig& cfg);

struct ObjectPlan {
  int genus = 0;
  std::optional<int> linked_to;
};

struct ScenePlan {
  int scene_id = 0;
  int split = 0;  // index into kSplitNames
  std::vector<ObjectPlan> objects;
};

struct DatasetPlan {
  std::vector<ScenePlan> scenes;
  std::vector<std::string> warnings;
};

/// Balanced object counts per split, balanced genus totals overall, linked
/// pairs on a fraction of eligible multi-object scenes. Deterministic.
DatasetPlan plan_dataset(const DatasetConfig& cfg);

struct SceneSeeds {
  std::uint64_t env = 0;
  std::uint64_t placement = 0;
  std::uint64_t growth = 0;
  std::uint64_t sampling = 0;
};

SceneSeeds scene_seeds(std::uint64_t master_seed, int scene_id, int attempt);

struct SceneRecord {
  ScenePlan plan;
  bool ok = false;
  int attempts = 0;
  std::string error;
  SceneSeeds seeds;
  int growth_stage = 0;
  std::string mesh_path;   // relative to the dataset root
  std::string cloud_path;
  std::vector<int> genera;  // per object, from the oracle
  BettiTriple betti{0, 0, 0};
  std::int64_t chi = 0;
};

std::string scene_stem(int scene_id);

/// Generates one scene under `root`; never throws for generation failures.
SceneRecord run_scene(const DatasetConfig& cfg, const ScenePlan& plan, const std::string& root);

struct PipelineResult {
  std::vector<SceneRecord> scenes;
  std::array<int, 3> ok_per_split{0, 0, 0};
  int failures = 0;
};

/// Writes {train,val,test}/scene_*.{off,csv} and manifest.json under `root`.
PipelineResult run_pipeline(const DatasetConfig& cfg, const std::string& root,
                            std::ostream* log = nullptr);

nlohmann::json manifest_json(const DatasetConfig& cfg, const PipelineResult& result);

struct VerifyLine {
  int scene_id = 0;
  bool pass = false;
  std::string detail;
};

/// Re-derives every stored scene's topology from disk and checks it against
/// the manifest, plus the cloud's row count and labels.
std::vector<VerifyLine> verify_dataset(const std::string& manifest_path);

/// Confusion matrices of predictions (pred_dir/scene_<id>.txt) against the
/// stored cloud labels; `split` empty means all splits.
std::vector<ConfusionMatrix> evaluate_predictions(const std::string& manifest_path,
                                                  const std::string& pred_dir,
                                                  const std::string& split = "",
                                                  int classes = 4);

}  // namespace topogen
