// topogen command line: one subcommand per pipeline stage.
#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "topogen/growth.hpp"
#include "topogen/metrics.hpp"
#include "topogen/pipeline.hpp"
#include "topogen/rips.hpp"
#include "topogen/rng.hpp"
#include "topogen/sampling.hpp"
#include "topogen/seeds.hpp"
#include "topogen/topology.hpp"
#include "topogen/wfc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace topogen;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out = ".";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "RNG seed");
  app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory");
}

json read_json(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void only_keys(const json& j, const std::set<std::string>& keys, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + " config must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw ConfigError(what + " config: unknown key '" + k + "'");
}

template <class T>
T get_or(const json& j, const char* key, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

fs::path out_dir(const Common& c) {
  fs::path p(c.out);
  fs::create_directories(p);
  return p;
}

// Environment files hold the tile grid plus the cell size.
OccupancyGrid load_env(const std::string& path) {
  const json j = read_json(path);
  const TileGrid grid = tile_grid_from_json(j.at("grid"));
  return voxelize(grid, default_tileset(), j.at("cell_size").get<double>());
}

std::vector<TriangleMesh> load_objects(const std::string& path) {
  const TriangleMesh m = load_mesh(path);
  if (!m.object_ids.empty()) {
    int count = 0;
    for (int id : m.object_ids) count = std::max(count, id + 1);
    return split_objects(m, count);
  }
  return connected_components(m);
}

// ---------------------------------------------------------------------------

int cmd_gen_env(const Common& c, std::vector<int> dims) {
  const json cfg = read_json(c.config);
  only_keys(cfg, {"env_dims", "empty_weight", "cell_size", "boundary", "max_restarts"}, "gen-env");
  if (cfg.contains("env_dims") && dims.empty()) dims = get_or<std::vector<int>>(cfg, "env_dims", {});
  if (dims.empty()) dims = {6, 6, 6};
  if (dims.size() != 3 || dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
    throw ConfigError("env dims must be three positive integers");
  const auto tiles = default_tileset();
  CollapseOptions opt;
  opt.weights.assign(tiles.size(), 1.0);
  opt.weights[0] = get_or(cfg, "empty_weight", 1.0);
  opt.max_restarts = get_or(cfg, "max_restarts", 100);
  const std::string boundary = get_or<std::string>(cfg, "boundary", "closed");
  if (boundary != "closed" && boundary != "open") throw ConfigError("boundary must be closed or open");
  opt.boundary = boundary == "closed" ? BoundaryRule::Closed : BoundaryRule::Open;
  const double cell = get_or(cfg, "cell_size", 1.0);

  const TileGrid grid = collapse({dims[0], dims[1], dims[2]}, tiles, c.seed.value_or(0), opt);
  if (!audit_tiling(grid, tiles, opt.boundary)) {
    std::cerr << "gen-env: tiling failed its audit\n";
    return kExitPartial;
  }
  const auto dir = out_dir(c);
  std::ofstream(dir / "env.json") << json{{"grid", to_json(grid)}, {"cell_size", cell}}.dump(2) << '\n';
  const OccupancyGrid env = voxelize(grid, tiles, cell);
  save_mesh((dir / "env.off").string(), barrier_mesh(env));
  std::cout << "env " << dims[0] << 'x' << dims[1] << 'x' << dims[2] << " tiles, "
            << env.occupied_count() << " occupied cells, " << grid.restarts << " restarts\n";
  return kExitOk;
}

int cmd_gen_seeds(const Common& c, const std::vector<int>& genera, const std::vector<int>& link,
                  const std::string& env_path) {
  const json cfg = read_json(c.config);
  only_keys(cfg, {"scale", "env_dims", "cell_size"}, "gen-seeds");
  if (genera.empty()) throw ConfigError("gen-seeds needs at least one --genus");
  const double scale = get_or(cfg, "scale", 0.5);
  std::vector<SeedSpec> specs;
  for (int g : genera) specs.push_back({g, std::nullopt, scale});
  if (!link.empty()) {
    if (link.size() != 2) throw ConfigError("--link takes two object indices");
    const int a = link[0], b = link[1];
    if (a == b || a < 0 || b < 0 || a >= static_cast<int>(specs.size()) || b >= static_cast<int>(specs.size()))
      throw ConfigError("--link indices out of range");
    specs[a].linked_to = b;
    specs[b].linked_to = a;
  }
  try {
    validate_specs(specs);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  OccupancyGrid env;
  if (!env_path.empty()) {
    env = load_env(env_path);
  } else {
    const auto d = get_or<std::vector<int>>(cfg, "env_dims", {18, 18, 18});
    if (d.size() != 3) throw ConfigError("env_dims must have three entries");
    env = empty_environment({d[0], d[1], d[2]}, get_or(cfg, "cell_size", 1.0));
  }
  const PlacedSeeds placed = place_seeds(specs, env, c.seed.value_or(0));
  const auto dir = out_dir(c);
  save_mesh((dir / "seeds.obj").string(), merge(placed.meshes));
  json rec = json::array();
  for (std::size_t i = 0; i < specs.size(); ++i)
    rec.push_back({{"genus", specs[i].genus},
                   {"linked_to", specs[i].linked_to ? json(*specs[i].linked_to) : json(nullptr)},
                   {"rotation", placed.placements[i].rotation},
                   {"position", {placed.placements[i].position.x(), placed.placements[i].position.y(),
                                 placed.placements[i].position.z()}}});
  std::ofstream(dir / "seeds.json") << rec.dump(2) << '\n';
  const TopologySummary s = scene_summary(placed.meshes);
  std::cout << "seeds:";
  for (const auto& comp : s.components) std::cout << " g" << comp.genus << "(chi " << comp.chi << ')';
  std::cout << '\n';
  return kExitOk;
}

int cmd_grow(const Common& c, const std::string& mesh_path, const std::string& env_path,
             std::optional<int> iterations, const std::vector<int>& stages) {
  const json cfg = read_json(c.config);
  GrowthConfig g = growth_config_from_json(cfg);
  if (c.seed) g.rng_seed = *c.seed;
  if (iterations) g.max_iterations = *iterations;
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto objects = load_objects(mesh_path);
  std::optional<OccupancyGrid> env;
  if (!env_path.empty()) env = load_env(env_path);
  const GrowthResult r = grow(objects, env ? &*env : nullptr, g, stages);
  const auto dir = out_dir(c);
  save_mesh((dir / "grown.obj").string(), merge(r.meshes));
  std::ofstream trace(dir / "trace.csv");
  r.trace.write_csv(trace);
  for (std::size_t i = 0; i < r.stages.size(); ++i)
    save_mesh((dir / ("stage_" + std::to_string(stages[i]) + ".obj")).string(), merge(r.stages[i]));
  int accepted = 0;
  for (const auto& rec : r.trace.records) accepted += rec.accepted;
  const double a0 = surface_area(merge(objects)), a1 = surface_area(merge(r.meshes));
  std::cout << "grow: " << accepted << '/' << r.trace.records.size() << " steps accepted, area "
            << a0 << " -> " << a1 << '\n';
  const auto before = scene_summary(objects).genus_multiset();
  const auto after = scene_summary(r.meshes).genus_multiset();
  if (before != after) {
    std::cerr << "grow: genus changed\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_sample(const Common& c, const std::string& mesh_path, std::optional<std::size_t> points) {
  const json cfg = read_json(c.config);
  only_keys(cfg, {"points_per_cloud"}, "sample");
  const std::size_t n = points.value_or(get_or<std::size_t>(cfg, "points_per_cloud", 4096));
  const auto objects = load_objects(mesh_path);
  std::vector<int> genera;
  for (const auto& comp : scene_summary(objects).components) genera.push_back(comp.genus);
  const LabeledCloud cloud = sample_cloud(objects, genera, n, c.seed.value_or(0));
  const auto dir = out_dir(c);
  save_cloud((dir / "cloud.csv").string(), cloud);
  std::cout << "sample: " << cloud.size() << " points from " << objects.size() << " objects\n";
  return kExitOk;
}

int cmd_augment(const Common& c, const std::string& cloud_path) {
  const json cfg = read_json(c.config);
  only_keys(cfg, {"mirror_prob", "rotation_max", "scale_spread", "shift_range", "jitter_sigma"},
            "augment");
  AugmentConfig a;
  a.mirror_prob = get_or(cfg, "mirror_prob", a.mirror_prob);
  a.rotation_max = get_or(cfg, "rotation_max", a.rotation_max);
  a.scale_spread = get_or(cfg, "scale_spread", a.scale_spread);
  a.shift_range = get_or(cfg, "shift_range", a.shift_range);
  a.jitter_sigma = get_or(cfg, "jitter_sigma", a.jitter_sigma);
  a.rng_seed = c.seed.value_or(0);
  const LabeledCloud out = augment(load_cloud(cloud_path), a);
  const auto dir = out_dir(c);
  save_cloud((dir / "augmented.csv").string(), out);
  std::cout << "augment: " << out.size() << " points\n";
  return kExitOk;
}

int cmd_dataset(const Common& c, std::optional<int> threads) {
  DatasetConfig cfg = c.config.empty() ? DatasetConfig{} : load_dataset_config(c.config);
  if (c.seed) cfg.master_seed = *c.seed;
  if (threads) cfg.threads = *threads;
  cfg.validate();
  const PipelineResult r = run_pipeline(cfg, c.out, &std::cerr);
  std::cout << "dataset: train " << r.ok_per_split[0] << ", val " << r.ok_per_split[1] << ", test "
            << r.ok_per_split[2] << ", failed " << r.failures << '\n';
  return r.failures == 0 ? kExitOk : kExitPartial;
}

int cmd_verify(const std::string& manifest) {
  int failed = 0;
  for (const auto& line : verify_dataset(manifest)) {
    std::cout << (line.pass ? "PASS " : "FAIL ") << scene_stem(line.scene_id);
    if (!line.detail.empty()) std::cout << ' ' << line.detail;
    std::cout << '\n';
    failed += !line.pass;
  }
  std::cout << (failed ? "verify: " + std::to_string(failed) + " scene(s) failed" : "verify: all scenes pass")
            << '\n';
  return failed ? kExitPartial : kExitOk;
}

int cmd_eval(const Common& c, const std::string& manifest, const std::string& pred,
             std::string split, std::string aggregation, const std::string& format) {
  const json cfg = read_json(c.config);
  only_keys(cfg, {"split", "aggregation", "classes"}, "eval");
  if (split.empty()) split = get_or<std::string>(cfg, "split", "");
  if (aggregation.empty()) aggregation = get_or<std::string>(cfg, "aggregation", "micro");
  if (aggregation != "micro" && aggregation != "macro")
    throw ConfigError("aggregation must be micro or macro");
  int classes = get_or(cfg, "classes", 0);
  if (classes <= 0) {
    const json m = read_json(manifest);
    classes = m.at("config").at("genus_range").at(1).get<int>() + 1;
  }
  const auto scenes = evaluate_predictions(manifest, pred, split, classes);
  const MetricsReport r =
      aggregate(scenes, aggregation == "micro" ? Aggregation::Micro : Aggregation::Macro);
  if (format == "csv") write_report_csv(std::cout, r);
  else if (format == "json") std::cout << report_json(r).dump(2) << '\n';
  else write_report_text(std::cout, r);
  return kExitOk;
}

int cmd_rips(const Common& c, const std::string& cloud_path, std::optional<double> radius,
             std::optional<std::size_t> max_points, int betti_steps) {
  const json cfg = read_json(c.config);
  only_keys(cfg, {"max_radius", "max_points", "betti_steps"}, "rips");
  const double r = radius.value_or(get_or(cfg, "max_radius", 0.0));
  if (!(r > 0)) throw ConfigError("rips needs a positive --max-radius");
  const std::size_t limit = max_points.value_or(get_or<std::size_t>(cfg, "max_points", kDefaultRipsPointLimit));
  if (betti_steps == 0) betti_steps = get_or(cfg, "betti_steps", 0);

  // Coordinates only; extra columns are ignored.
  std::ifstream is(cloud_path);
  if (!is) throw std::runtime_error("cannot read " + cloud_path);
  std::vector<Vec3> pts;
  std::string line;
  std::getline(is, line);
  if (!line.empty() && (std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-')) is.seekg(0);
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    Vec3 p;
    if (!(ls >> p.x() >> p.y() >> p.z())) throw std::runtime_error("rips: malformed row in " + cloud_path);
    pts.push_back(p);
  }
  const Barcode bc = persistence(build_rips(pts, r, 2, limit));
  const auto dir = out_dir(c);
  std::ofstream bos(dir / "barcode.csv");
  write_barcode_csv(bos, bc);
  if (betti_steps > 0) {
    std::ofstream os(dir / "betti.csv");
    os << "radius,b0,b1\n";
    for (int k = 0; k <= betti_steps; ++k) {
      const double rad = r * k / betti_steps;
      const BettiPair b = betti_at(bc, rad);
      os << rad << ',' << b.b0 << ',' << b.b1 << '\n';
    }
  }
  const BettiPair end = betti_at(bc, r);
  std::cout << "rips: " << pts.size() << " points, " << bc.intervals.size()
            << " bars; at radius " << r << ": b0=" << end.b0 << " b1=" << end.b1 << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"topogen: synthetic genus-labelled surface datasets"};
  app.require_subcommand(1);

  Common c;
  std::vector<int> dims, genera, link, stages;
  std::string env_path, mesh_path, cloud_path, manifest, pred, split, aggregation, format = "text";
  std::optional<int> iterations, threads;
  std::optional<std::size_t> points, max_points;
  std::optional<double> radius;
  int betti_steps = 0;

  auto* gen_env = app.add_subcommand("gen-env", "solve a wave-function-collapse environment");
  add_common(gen_env, c);
  gen_env->add_option("--dims", dims, "tile grid size nx ny nz")->expected(3);

  auto* gen_seeds = app.add_subcommand("gen-seeds", "build and place seed surfaces");
  add_common(gen_seeds, c);
  gen_seeds->add_option("--genus", genera, "genus of each object")->required();
  gen_seeds->add_option("--link", link, "indices of two objects to link")->expected(2);
  gen_seeds->add_option("--env", env_path, "environment JSON")->check(CLI::ExistingFile);

  auto* grow_cmd = app.add_subcommand("grow", "grow seeds without changing their genus");
  add_common(grow_cmd, c);
  grow_cmd->add_option("--mesh", mesh_path, "input mesh (.obj or .off)")->required()->check(CLI::ExistingFile);
  grow_cmd->add_option("--env", env_path, "environment JSON")->check(CLI::ExistingFile);
  grow_cmd->add_option("--iterations", iterations, "iteration count");
  grow_cmd->add_option("--stages", stages, "iterations to snapshot");

  auto* sample_cmd = app.add_subcommand("sample", "sample a labelled point cloud");
  add_common(sample_cmd, c);
  sample_cmd->add_option("--mesh", mesh_path, "input mesh")->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("--points", points, "point count");

  auto* augment_cmd = app.add_subcommand("augment", "apply training augmentation to a cloud");
  add_common(augment_cmd, c);
  augment_cmd->add_option("--cloud", cloud_path, "input cloud CSV")->required()->check(CLI::ExistingFile);

  auto* dataset_cmd = app.add_subcommand("dataset", "generate a full dataset");
  add_common(dataset_cmd, c);
  dataset_cmd->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* verify_cmd = app.add_subcommand("verify", "re-verify a dataset from disk");
  add_common(verify_cmd, c);
  verify_cmd->add_option("--manifest", manifest, "manifest.json")->required()->check(CLI::ExistingFile);

  auto* eval_cmd = app.add_subcommand("eval", "score predictions against a dataset");
  add_common(eval_cmd, c);
  eval_cmd->add_option("--manifest", manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--pred", pred, "directory of scene_<id>.txt label files")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--split", split, "train, val or test (default all)");
  eval_cmd->add_option("--aggregation", aggregation, "micro or macro");
  eval_cmd->add_option("--format", format, "text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}));

  auto* rips_cmd = app.add_subcommand("rips", "Vietoris-Rips barcode of a small cloud");
  add_common(rips_cmd, c);
  rips_cmd->add_option("--cloud", cloud_path, "cloud CSV")->required()->check(CLI::ExistingFile);
  rips_cmd->add_option("--max-radius", radius, "filtration radius");
  rips_cmd->add_option("--max-points", max_points, "size guard");
  rips_cmd->add_option("--betti-steps", betti_steps, "write a Betti curve with this many steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen_env) return cmd_gen_env(c, dims);
    if (*gen_seeds) return cmd_gen_seeds(c, genera, link, env_path);
    if (*grow_cmd) return cmd_grow(c, mesh_path, env_path, iterations, stages);
    if (*sample_cmd) return cmd_sample(c, mesh_path, points);
    if (*augment_cmd) return cmd_augment(c, cloud_path);
    if (*dataset_cmd) return cmd_dataset(c, threads);
    if (*verify_cmd) return cmd_verify(manifest);
    if (*eval_cmd) return cmd_eval(c, manifest, pred, split, aggregation, format);
    if (*rips_cmd) return cmd_rips(c, cloud_path, radius, max_points, betti_steps);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPartial;
  }
  return kExitOk;
}
