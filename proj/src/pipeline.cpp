#include "topogen/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "topogen/rng.hpp"
#include "topogen/sampling.hpp"
#include "topogen/seeds.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace topogen {

namespace {

enum SeedTag : std::uint64_t { kEnv = 1, kPlacement = 2, kGrowth = 3, kSampling = 4, kPlan = 5 };

void check_keys(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) {
      std::string list;
      for (const auto& n : known) list += (list.empty() ? "" : ", ") + n;
      throw ConfigError(where + ": unknown key '" + k + "' (known: " + list + ")");
    }
}

template <class T>
void read_key(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": bad value for '" + key + "'");
  }
}

template <class T>
std::pair<T, T> read_range(const json& j, const char* key, std::pair<T, T> def,
                           const std::string& where) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(where + ": '" + key + "' must be a [lo, hi] pair");
  return {v[0].get<T>(), v[1].get<T>()};
}

template <class Rng, class V>
void shuffle(V& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

void DatasetConfig::validate() const {
  for (int c : counts)
    if (c <= 0) throw ConfigError("split counts must be positive");
  if (min_objects < 1 || max_objects < min_objects)
    throw ConfigError("objects_per_scene must satisfy 1 <= lo <= hi");
  if (min_genus < 0 || max_genus < min_genus) throw ConfigError("genus_range must satisfy 0 <= lo <= hi");
  if (points_per_cloud == 0) throw ConfigError("points_per_cloud must be positive");
  if (env_dims.nx < 1 || env_dims.ny < 1 || env_dims.nz < 1)
    throw ConfigError("env_dims must be positive");
  if (!(cell_size > 0)) throw ConfigError("cell_size must be positive");
  if (!(empty_weight > 0)) throw ConfigError("empty_weight must be positive");
  if (!(seed_scale > 0)) throw ConfigError("seed_scale must be positive");
  if (growth_stages.empty()) throw ConfigError("growth_stages must not be empty");
  for (int s : growth_stages)
    if (s < 0 || s > growth.max_iterations)
      throw ConfigError("growth_stages must lie in [0, growth.max_iterations]");
  if (linked_fraction < 0 || linked_fraction > 1) throw ConfigError("linked_fraction must be in [0, 1]");
  if (!(normalization > 0)) throw ConfigError("normalization must be positive");
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  try {
    growth.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("growth: ") + e.what());
  }
}

GrowthConfig growth_config_from_json(const json& j, GrowthConfig c) {
  const std::string where = "growth";
  check_keys(j,
             {"w_area", "w_rep", "w_env", "step_size", "max_iterations", "max_halvings",
              "remesh_every", "edge_min", "edge_max", "rng_seed", "jitter", "smoothing"},
             where);
  read_key(j, "w_area", c.w_area, where);
  read_key(j, "w_rep", c.w_rep, where);
  read_key(j, "w_env", c.w_env, where);
  read_key(j, "step_size", c.step_size, where);
  read_key(j, "max_iterations", c.max_iterations, where);
  read_key(j, "max_halvings", c.max_halvings, where);
  read_key(j, "remesh_every", c.remesh_every, where);
  read_key(j, "edge_min", c.edge_min, where);
  read_key(j, "edge_max", c.edge_max, where);
  read_key(j, "rng_seed", c.rng_seed, where);
  read_key(j, "jitter", c.jitter, where);
  read_key(j, "smoothing", c.smoothing, where);
  return c;
}

json to_json(const GrowthConfig& c) {
  return {{"w_area", c.w_area},         {"w_rep", c.w_rep},
          {"w_env", c.w_env},           {"step_size", c.step_size},
          {"max_iterations", c.max_iterations}, {"max_halvings", c.max_halvings},
          {"remesh_every", c.remesh_every},     {"edge_min", c.edge_min},
          {"edge_max", c.edge_max},     {"rng_seed", c.rng_seed},
          {"jitter", c.jitter},         {"smoothing", c.smoothing}};
}

DatasetConfig dataset_config_from_json(const json& j) {
  const std::string where = "dataset config";
  check_keys(j,
             {"counts", "objects_per_scene", "genus_range", "points_per_cloud", "env_dims",
              "cell_size", "empty_weight", "seed_scale", "growth", "growth_stages",
              "linked_fraction", "master_seed", "normalization", "max_retries", "threads"},
             where);
  DatasetConfig c;
  if (j.contains("counts")) {
    const auto& v = j.at("counts");
    if (v.is_array() && v.size() == 3 && std::all_of(v.begin(), v.end(), [](const json& x) {
          return x.is_number_integer();
        })) {
      for (int i = 0; i < 3; ++i) c.counts[i] = v[i].get<int>();
    } else if (v.is_object()) {
      check_keys(v, {"train", "val", "test"}, "counts");
      if (v.size() != 3) throw ConfigError("counts: train, val and test are all required");
      for (int i = 0; i < 3; ++i) read_key(v, kSplitNames[i], c.counts[i], "counts");
    } else {
      throw ConfigError(where + ": 'counts' must be [train, val, test] or an object");
    }
  }
  std::tie(c.min_objects, c.max_objects) =
      read_range<int>(j, "objects_per_scene", {c.min_objects, c.max_objects}, where);
  std::tie(c.min_genus, c.max_genus) =
      read_range<int>(j, "genus_range", {c.min_genus, c.max_genus}, where);
  read_key(j, "points_per_cloud", c.points_per_cloud, where);
  if (j.contains("env_dims")) {
    const auto& v = j.at("env_dims");
    if (!v.is_array() || v.size() != 3) throw ConfigError(where + ": 'env_dims' must be [nx, ny, nz]");
    try {
      c.env_dims = {v[0].get<int>(), v[1].get<int>(), v[2].get<int>()};
    } catch (const json::exception&) {
      throw ConfigError(where + ": 'env_dims' must hold integers");
    }
  }
  read_key(j, "cell_size", c.cell_size, where);
  read_key(j, "empty_weight", c.empty_weight, where);
  read_key(j, "seed_scale", c.seed_scale, where);
  if (j.contains("growth")) c.growth = growth_config_from_json(j.at("growth"), c.growth);
  read_key(j, "growth_stages", c.growth_stages, where);
  read_key(j, "linked_fraction", c.linked_fraction, where);
  read_key(j, "master_seed", c.master_seed, where);
  read_key(j, "normalization", c.normalization, where);
  read_key(j, "max_retries", c.max_retries, where);
  read_key(j, "threads", c.threads, where);
  c.validate();
  return c;
}

json to_json(const DatasetConfig& c) {
  return {{"counts", {c.counts[0], c.counts[1], c.counts[2]}},
          {"objects_per_scene", {c.min_objects, c.max_objects}},
          {"genus_range", {c.min_genus, c.max_genus}},
          {"points_per_cloud", c.points_per_cloud},
          {"env_dims", {c.env_dims.nx, c.env_dims.ny, c.env_dims.nz}},
          {"cell_size", c.cell_size},
          {"empty_weight", c.empty_weight},
          {"seed_scale", c.seed_scale},
          {"growth", to_json(c.growth)},
          {"growth_stages", c.growth_stages},
          {"linked_fraction", c.linked_fraction},
          {"master_seed", c.master_seed},
          {"normalization", c.normalization},
          {"max_retries", c.max_retries},
          {"threads", c.threads}};
}

DatasetConfig load_dataset_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path);
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return dataset_config_from_json(j);
}

// ---------------------------------------------------------------------------
// Planning

DatasetPlan plan_dataset(const DatasetConfig& cfg) {
  cfg.validate();
  DatasetPlan plan;
  const int nobj = cfg.max_objects - cfg.min_objects + 1;
  const int ngenus = cfg.max_genus - cfg.min_genus + 1;

  int id = 0;
  for (int s = 0; s < 3; ++s) {
    CounterRng rng(derive_seed(cfg.master_seed, {kPlan, static_cast<std::uint64_t>(s)}), 0);
    std::vector<int> sizes(cfg.counts[s]);
    for (int i = 0; i < cfg.counts[s]; ++i) sizes[i] = cfg.min_objects + i % nobj;
    shuffle(sizes, rng);
    for (int n : sizes) {
      ScenePlan sp;
      sp.scene_id = id++;
      sp.split = s;
      sp.objects.resize(n);
      plan.scenes.push_back(std::move(sp));
    }
    if (cfg.counts[s] < nobj) {
      std::vector<int> hist(nobj, 0);
      for (int n : sizes) ++hist[n - cfg.min_objects];
      plan.warnings.push_back(std::string("split ") + kSplitNames[s] + " has " +
                              std::to_string(cfg.counts[s]) +
                              " scenes, too few to balance object counts; histogram " +
                              join_ints(hist));
    }
  }

  // Round-robin genus over the global object list, then shuffle per split.
  int k = 0;
  for (int s = 0; s < 3; ++s) {
    std::vector<int> genera;
    for (auto& sc : plan.scenes)
      if (sc.split == s)
        for (std::size_t o = 0; o < sc.objects.size(); ++o) genera.push_back(cfg.min_genus + k++ % ngenus);
    CounterRng rng(derive_seed(cfg.master_seed, {kPlan, 16 + static_cast<std::uint64_t>(s)}), 0);
    shuffle(genera, rng);
    std::size_t g = 0;
    for (auto& sc : plan.scenes)
      if (sc.split == s)
        for (auto& ob : sc.objects) ob.genus = genera[g++];
  }
  if (k < ngenus) {
    std::vector<int> hist(ngenus, 0);
    for (const auto& sc : plan.scenes)
      for (const auto& ob : sc.objects) ++hist[ob.genus - cfg.min_genus];
    plan.warnings.push_back("only " + std::to_string(k) +
                            " objects planned, too few to balance genera; histogram " +
                            join_ints(hist));
  }

  // Linked pairs.
  int multi = 0;
  std::vector<int> eligible;
  for (std::size_t i = 0; i < plan.scenes.size(); ++i) {
    const auto& sc = plan.scenes[i];
    if (sc.objects.size() < 2) continue;
    ++multi;
    const auto handled = std::count_if(sc.objects.begin(), sc.objects.end(),
                                       [](const ObjectPlan& o) { return o.genus >= 1; });
    if (handled >= 2) eligible.push_back(static_cast<int>(i));
  }
  const int want = static_cast<int>(std::lround(cfg.linked_fraction * multi));
  CounterRng rng(derive_seed(cfg.master_seed, {kPlan, 32}), 0);
  shuffle(eligible, rng);
  if (want > static_cast<int>(eligible.size()))
    plan.warnings.push_back("wanted " + std::to_string(want) + " linked scenes, only " +
                            std::to_string(eligible.size()) + " eligible");
  std::sort(eligible.begin(), eligible.begin() + std::min<std::size_t>(want, eligible.size()));
  for (int e = 0; e < std::min<int>(want, static_cast<int>(eligible.size())); ++e) {
    auto& obs = plan.scenes[eligible[e]].objects;
    int first = -1;
    for (int o = 0; o < static_cast<int>(obs.size()); ++o) {
      if (obs[o].genus < 1) continue;
      if (first < 0) {
        first = o;
      } else {
        obs[first].linked_to = o;
        obs[o].linked_to = first;
        break;
      }
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Scenes

SceneSeeds scene_seeds(std::uint64_t master, int scene_id, int attempt) {
  const auto id = static_cast<std::uint64_t>(scene_id);
  const auto a = static_cast<std::uint64_t>(attempt);
  return {derive_seed(master, {id, a, kEnv}), derive_seed(master, {id, a, kPlacement}),
          derive_seed(master, {id, a, kGrowth}), derive_seed(master, {id, a, kSampling})};
}

std::string scene_stem(int scene_id) {
  std::ostringstream os;
  os << "scene_" << std::setw(5) << std::setfill('0') << scene_id;
  return os.str();
}

namespace {

std::vector<int> plan_genera(const ScenePlan& p) {
  std::vector<int> g;
  for (const auto& o : p.objects) g.push_back(o.genus);
  return g;
}

// Checks a stored scene against the expected per-object genera.
std::string check_stored(const fs::path& mesh_path, const fs::path& cloud_path,
                         const std::vector<int>& genera, std::size_t points,
                         TopologySummary* summary_out) {
  const TriangleMesh mesh = load_mesh(mesh_path.string());
  TopologySummary summary;
  try {
    summary = scene_summary(mesh);
  } catch (const std::exception& e) {
    return std::string("topology: ") + e.what();
  }
  std::vector<int> got;
  for (const auto& c : summary.components) got.push_back(c.genus);
  if (got != genera)
    return "genera " + join_ints(got) + " != expected " + join_ints(genera);
  if (!detect_self_intersections(mesh).empty()) return "mesh self-intersects";
  const LabeledCloud cloud = load_cloud(cloud_path.string());
  if (cloud.size() != points)
    return "cloud has " + std::to_string(cloud.size()) + " rows, expected " + std::to_string(points);
  std::vector<char> seen(genera.size(), 0);
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    const int o = cloud.object_id[k];
    if (o < 0 || o >= static_cast<int>(genera.size()) || cloud.genus_label[k] != genera[o])
      return "cloud label mismatch at row " + std::to_string(k + 1);
    seen[o] = 1;
  }
  for (std::size_t o = 0; o < seen.size(); ++o)
    if (!seen[o]) return "object " + std::to_string(o) + " has no points";
  if (summary_out) *summary_out = std::move(summary);
  return {};
}

}  // namespace

SceneRecord run_scene(const DatasetConfig& cfg, const ScenePlan& plan, const std::string& root) {
  SceneRecord rec;
  rec.plan = plan;
  const std::string split = kSplitNames[plan.split];
  const std::string stem = scene_stem(plan.scene_id);
  rec.mesh_path = split + "/" + stem + ".off";
  rec.cloud_path = split + "/" + stem + ".csv";
  const fs::path mesh_file = fs::path(root) / rec.mesh_path;
  const fs::path cloud_file = fs::path(root) / rec.cloud_path;
  fs::create_directories(mesh_file.parent_path());

  const auto genera = plan_genera(plan);
  const auto tiles = default_tileset();
  CollapseOptions wfc;
  wfc.weights.assign(tiles.size(), 1.0);
  wfc.weights[0] = cfg.empty_weight;

  std::vector<SeedSpec> specs;
  for (const auto& o : plan.objects) specs.push_back({o.genus, o.linked_to, cfg.seed_scale});

  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    rec.attempts = attempt + 1;
    rec.seeds = scene_seeds(cfg.master_seed, plan.scene_id, attempt);
    try {
      const TileGrid grid = collapse(cfg.env_dims, tiles, rec.seeds.env, wfc);
      const OccupancyGrid env = voxelize(grid, tiles, cfg.cell_size);
      const PlacedSeeds placed = place_seeds(specs, env, rec.seeds.placement);

      GrowthConfig g = cfg.growth;
      g.rng_seed = rec.seeds.growth;
      rec.growth_stage = cfg.growth_stages[mix64(rec.seeds.growth) % cfg.growth_stages.size()];
      g.max_iterations = rec.growth_stage;
      const GrowthResult grown = grow(placed.meshes, &env, g);

      LabeledCloud cloud = sample_cloud(grown.meshes, genera, cfg.points_per_cloud, rec.seeds.sampling);
      const Aabb box = bounds(cloud.points);
      const double s = cfg.normalization / box.extent().maxCoeff();
      const Vec3 offset = -s * box.center();
      for (auto& p : cloud.points) p = s * p + offset;
      const TriangleMesh scene = transformed(merge(grown.meshes), s, offset);

      save_mesh(mesh_file.string(), scene);
      save_cloud(cloud_file.string(), cloud);

      TopologySummary summary;
      const std::string problem = check_stored(mesh_file, cloud_file, genera, cfg.points_per_cloud, &summary);
      if (!problem.empty()) {
        rec.error = "verification failed: " + problem;
        continue;
      }
      rec.genera.clear();
      for (const auto& c : summary.components) rec.genera.push_back(c.genus);
      rec.betti = summary.scene_betti;
      rec.chi = summary.scene_chi;
      rec.ok = true;
      rec.error.clear();
      return rec;
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
  }
  std::error_code ec;
  fs::remove(mesh_file, ec);
  fs::remove(cloud_file, ec);
  return rec;
}

json manifest_json(const DatasetConfig& cfg, const PipelineResult& r) {
  json scenes = json::array();
  for (const auto& s : r.scenes) {
    json objects = json::array();
    for (const auto& o : s.plan.objects)
      objects.push_back({{"genus", o.genus},
                         {"linked_to", o.linked_to ? json(*o.linked_to) : json(nullptr)}});
    json e{{"scene_id", s.plan.scene_id},
           {"split", kSplitNames[s.plan.split]},
           {"status", s.ok ? "ok" : "failed"},
           {"attempts", s.attempts},
           {"seeds",
            {{"env", s.seeds.env},
             {"placement", s.seeds.placement},
             {"growth", s.seeds.growth},
             {"sampling", s.seeds.sampling}}},
           {"objects", objects},
           {"growth_stage", s.growth_stage}};
    if (s.ok) {
      e["mesh"] = s.mesh_path;
      e["cloud"] = s.cloud_path;
      e["topology"] = {{"genera", s.genera},
                       {"betti", {s.betti[0], s.betti[1], s.betti[2]}},
                       {"chi", s.chi}};
    } else {
      e["error"] = s.error;
    }
    scenes.push_back(std::move(e));
  }
  json config = to_json(cfg);
  config.erase("threads");  // scheduling only, output does not depend on it
  return {{"config", config},
          {"splits",
           {{"train", r.ok_per_split[0]}, {"val", r.ok_per_split[1]}, {"test", r.ok_per_split[2]}}},
          {"failures", r.failures},
          {"scenes", scenes}};
}

PipelineResult run_pipeline(const DatasetConfig& cfg, const std::string& root, std::ostream* log) {
  const DatasetPlan plan = plan_dataset(cfg);
  std::mutex log_mutex;
  if (log)
    for (const auto& w : plan.warnings) *log << "warning: " << w << '\n';
  fs::create_directories(root);

  PipelineResult result;
  result.scenes.resize(plan.scenes.size());
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(plan.scenes.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < plan.scenes.size(); i = next++) {
      result.scenes[i] = run_scene(cfg, plan.scenes[i], root);
      if (log) {
        const auto& s = result.scenes[i];
        std::lock_guard<std::mutex> lock(log_mutex);
        *log << scene_stem(s.plan.scene_id) << ' ' << kSplitNames[s.plan.split] << ' '
             << (s.ok ? "ok" : "FAILED") << " attempts=" << s.attempts;
        if (!s.error.empty()) *log << " (" << s.error << ')';
        *log << std::endl;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& s : result.scenes) {
    if (s.ok) ++result.ok_per_split[s.plan.split];
    else ++result.failures;
  }
  std::ofstream os(fs::path(root) / "manifest.json");
  if (!os) throw std::runtime_error("cannot write manifest under " + root);
  os << manifest_json(cfg, result).dump(2) << '\n';
  return result;
}

// ---------------------------------------------------------------------------
// Verification and evaluation

namespace {

json load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read manifest " + path);
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!j.contains("scenes") || !j.at("scenes").is_array())
    throw ConfigError(path + ": missing 'scenes' array");
  return j;
}

}  // namespace

std::vector<VerifyLine> verify_dataset(const std::string& manifest_path) {
  const json m = load_manifest(manifest_path);
  const fs::path root = fs::path(manifest_path).parent_path();
  const std::size_t points = m.at("config").at("points_per_cloud").get<std::size_t>();
  std::vector<VerifyLine> out;
  for (const auto& s : m.at("scenes")) {
    VerifyLine line;
    line.scene_id = s.at("scene_id").get<int>();
    if (s.at("status") != "ok") {
      line.detail = "scene marked failed: " + s.value("error", std::string{});
      out.push_back(line);
      continue;
    }
    std::vector<int> planned;
    for (const auto& o : s.at("objects")) planned.push_back(o.at("genus").get<int>());
    const auto recorded = s.at("topology").at("genera").get<std::vector<int>>();
    try {
      TopologySummary summary;
      line.detail = check_stored(root / s.at("mesh").get<std::string>(),
                                 root / s.at("cloud").get<std::string>(), planned, points, &summary);
      if (line.detail.empty()) {
        const auto& b = s.at("topology").at("betti");
        std::vector<int> got;
        for (const auto& c : summary.components) got.push_back(c.genus);
        if (got != recorded) line.detail = "recorded genera differ from recomputation";
        else if (b.get<std::vector<std::int64_t>>() !=
                 std::vector<std::int64_t>(summary.scene_betti.begin(), summary.scene_betti.end()))
          line.detail = "recorded Betti numbers differ from recomputation";
        else if (s.at("topology").at("chi").get<std::int64_t>() != summary.scene_chi)
          line.detail = "recorded chi differs from recomputation";
      }
    } catch (const std::exception& e) {
      line.detail = e.what();
    }
    line.pass = line.detail.empty();
    out.push_back(line);
  }
  return out;
}

std::vector<ConfusionMatrix> evaluate_predictions(const std::string& manifest_path,
                                                  const std::string& pred_dir,
                                                  const std::string& split, int classes) {
  const json m = load_manifest(manifest_path);
  const fs::path root = fs::path(manifest_path).parent_path();
  std::vector<ConfusionMatrix> out;
  for (const auto& s : m.at("scenes")) {
    if (s.at("status") != "ok") continue;
    if (!split.empty() && s.at("split") != split) continue;
    const int id = s.at("scene_id").get<int>();
    const LabeledCloud cloud = load_cloud((root / s.at("cloud").get<std::string>()).string());
    const fs::path pred = fs::path(pred_dir) / (scene_stem(id) + ".txt");
    std::vector<int> labels;
    try {
      labels = load_labels(pred.string());
    } catch (const std::exception& e) {
      throw InputError(scene_stem(id) + ": " + e.what());
    }
    ConfusionMatrix cm(classes);
    try {
      cm.accumulate(cloud.genus_label, labels);
    } catch (const InputError& e) {
      throw InputError(scene_stem(id) + ": " + e.what());
    }
    out.push_back(std::move(cm));
  }
  if (out.empty()) throw InputError("no scenes to evaluate");
  return out;
}

}  // namespace topogen
