// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "test_util.hpp"
#include "topogen/growth.hpp"
#include "topogen/metrics.hpp"
#include "topogen/pipeline.hpp"
#include "topogen/rips.hpp"
#include "topogen/sampling.hpp"
#include "topogen/seeds.hpp"
#include "topogen/topology.hpp"
#include "topogen/wfc.hpp"

#ifndef TOPOGEN_SOURCE_DIR
#define TOPOGEN_SOURCE_DIR "."
#endif

using namespace topogen;
using namespace testutil;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome seed_topology() {
  Outcome o;
  double worst = 0;
  for (int g = 0; g <= 3; ++g) {
    const auto t0 = Clock::now();
    const auto m = make_seed(g);
    const auto s = scene_summary(std::vector<TriangleMesh>{m});
    worst = std::max(worst, seconds_since(t0));
    o.require(s.scene_betti == BettiTriple{1, 2 * g, 1}, "betti of genus " + std::to_string(g));
    o.require(s.scene_chi == 2 - 2 * g && chi_recount(m) == 2 - 2 * g, "chi of genus " + std::to_string(g));
  }
  o.require(worst < 1.0, "seed took " + fmt("%.3f s", worst));
  if (o.pass) o.detail = "g=0..3 -> (1,2g,1,2-2g), slowest " + fmt("%.3f s", worst);
  return o;
}

Outcome ambiguity() {
  Outcome o;
  const auto a = scene_summary(std::vector<TriangleMesh>{make_seed(1), make_seed(2)});
  const auto b = scene_summary(std::vector<TriangleMesh>{make_seed(0), make_seed(3)});
  o.require(a.scene_betti == BettiTriple{2, 6, 2}, "{1,2} betti");
  o.require(b.scene_betti == BettiTriple{2, 6, 2}, "{0,3} betti");
  o.require(a.genus_multiset() != b.genus_multiset(), "multisets equal");
  o.require(ambiguity_witness(a, b) && ambiguity_witness(b, a), "witness false");
  if (o.pass) o.detail = "both (2,6,2), genera {1,2} vs {0,3}, witness true";
  return o;
}

Outcome growth_preservation() {
  Outcome o;
  const auto t0 = Clock::now();
  // (genera, linked pairs)
  std::vector<std::pair<std::vector<int>, std::vector<std::pair<int, int>>>> runs = {
      {{1, 3}, {{0, 1}}}, {{0}, {}}, {{1}, {}}, {{2}, {}}, {{3}, {}},
      {{0, 1}, {}}, {{2, 3}, {}}, {{0, 2}, {}}, {{1, 3}, {}}, {{0, 3}, {}},
      {{1, 2}, {}}, {{0, 1, 2}, {}}, {{1, 2, 3}, {}}, {{0, 0, 3}, {}}, {{3}, {}},
      {{2}, {}}, {{1}, {}}, {{0}, {}}, {{2, 2}, {}}, {{3, 1, 0}, {}}};
  int total_accepted = 0;
  for (std::size_t k = 0; k < runs.size() && o.pass; ++k) {
    const auto& [genera, links] = runs[k];
    const auto env = desk_env(1000 + k);
    const auto seeds = placed(genera, env, 1000 + k, links);
    GrowthConfig cfg;
    cfg.max_iterations = 200;
    cfg.rng_seed = k;
    std::vector<int> every(201);
    std::iota(every.begin(), every.end(), 0);
    const auto r = grow(seeds, &env, cfg, every);
    const std::string tag = "run " + std::to_string(k) + ": ";
    std::int64_t chi0 = 0;
    for (int g : genera) chi0 += 2 - 2 * g;
    for (int it = 1; it <= 200; ++it) {
      const auto& rec = r.trace.records[it - 1];
      o.require(rec.chi == chi0, tag + "chi changed at iteration " + std::to_string(it));
      o.require(rec.component_count == static_cast<int>(genera.size()), tag + "components changed");
      if (!rec.accepted) continue;
      ++total_accepted;
      const auto& st = r.stages[it];
      for (std::size_t i = 0; i < genera.size(); ++i)
        o.require(chi_recount(st[i]) == 2 - 2 * genera[i], tag + "object chi at iteration " + std::to_string(it));
      o.require(detect_self_intersections(merge(st)).empty(), tag + "intersection at iteration " + std::to_string(it));
    }
    o.require(surface_area(merge(r.meshes)) > surface_area(merge(seeds)), tag + "area did not grow");
    o.require(scene_summary(r.meshes).genus_multiset() == scene_summary(seeds).genus_multiset(), tag + "genera");
  }
  const double secs = seconds_since(t0);
  o.require(secs < 600, "took " + fmt("%.0f s", secs));
  if (o.pass)
    o.detail = "20 runs x 200 iterations, " + std::to_string(total_accepted) + " accepted steps checked, " +
               fmt("%.0f s", secs);
  return o;
}

Outcome gradient_check() {
  Outcome o;
  const auto m = transformed(torus(10, 10), 1.0, Vec3(4, 4, 4));
  auto env = empty_environment({8, 8, 8}, 1.0);
  for (int z = 0; z < 8; ++z)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 3; ++x) env.occupied[env.dims.index(x, y, z)] = 1;
  GrowthConfig cfg;
  const auto g = growth_gradient(m, &env, cfg);
  std::vector<double> fd;
  double fmax = 0;
  for (std::size_t v = 0; v < m.vertices.size(); ++v)
    for (int k = 0; k < 3; ++k) {
      auto a = m, b = m;
      a.vertices[v][k] += 1e-5;
      b.vertices[v][k] -= 1e-5;
      fd.push_back((growth_objective(a, &env, cfg).total - growth_objective(b, &env, cfg).total) / 2e-5);
      fmax = std::max(fmax, std::abs(fd.back()));
    }
  double worst = 0;
  for (std::size_t i = 0; i < fd.size(); ++i) {
    const double an = g[i / 3][static_cast<int>(i % 3)];
    worst = std::max(worst, std::abs(an - fd[i]) / std::max(std::abs(fd[i]), 1e-4 * fmax));
  }
  o.require(m.vertices.size() == 100, "torus size");
  o.require(worst < 1e-4, "relative error " + fmt("%.3g", worst));
  if (o.pass) o.detail = "100-vertex torus, all terms active, max relative error " + fmt("%.2g", worst);
  return o;
}

Outcome energy_scale() {
  Outcome o;
  double worst = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto m = jittered(make_seed(static_cast<int>(s % 4)), 0.1, s);
    const double e = tangent_point_energy(m);
    for (double k : {2.0, 3.7, 0.31}) {
      const double e2 = tangent_point_energy(transformed(m, k, Vec3(1, -2, 0.5)));
      worst = std::max(worst, std::abs(e2 - e) / e);
    }
  }
  o.require(worst <= 1e-9, "relative difference " + fmt("%.3g", worst));
  if (o.pass) o.detail = "10 meshes x scales {2, 3.7, 0.31}, max relative difference " + fmt("%.2g", worst);
  return o;
}

Outcome wfc_validity() {
  Outcome o;
  const auto ts = default_tileset();
  double worst = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto t0 = Clock::now();
    const auto g = collapse({6, 6, 6}, ts, s);
    worst = std::max(worst, seconds_since(t0));
    o.require(audit_tiling(g, ts, BoundaryRule::Closed), "audit failed for seed " + std::to_string(s));
  }
  o.require(worst < 10, "solve took " + fmt("%.2f s", worst));
  if (o.pass) o.detail = "100/100 tilings audited, slowest " + fmt("%.3f s", worst);
  return o;
}

Outcome sampling_fidelity(const fs::path& work) {
  Outcome o;
  // chi-square on 100 disjoint triangles (triangle k in the plane z = k)
  TriangleMesh m;
  CounterRng rng(1234, 0);
  for (int k = 0; k < 100; ++k) {
    const double a = rng.uniform(0.2, 2.0), b = rng.uniform(0.2, 2.0);
    const int base = static_cast<int>(m.vertices.size());
    m.vertices.emplace_back(0, 0, k);
    m.vertices.emplace_back(a, 0, k);
    m.vertices.emplace_back(0, b, k);
    m.triangles.push_back({base, base + 1, base + 2});
  }
  const auto c = sample_cloud({m}, {0}, 100000, 99);
  std::vector<double> count(100, 0);
  for (const auto& p : c.points) count[std::lround(p.z())] += 1;
  const double total = surface_area(m);
  double chi2 = 0;
  for (int k = 0; k < 100; ++k) {
    const double e = 1e5 * triangle_area(m, k) / total;
    chi2 += (count[k] - e) * (count[k] - e) / e;
  }
  o.require(chi2 < 134.64161685578915, "chi-square " + fmt("%.1f", chi2));

  // clouds from the pipeline: row count and labels against the manifest
  DatasetConfig cfg;
  cfg.counts = {2, 1, 1};
  cfg.growth_stages = {10};
  cfg.master_seed = 7;
  const auto root = work / "sampling";
  fs::remove_all(root);
  const auto r = run_pipeline(cfg, root.string());
  o.require(r.failures == 0, "pipeline failures");
  std::ifstream is(root / "manifest.json");
  const auto j = nlohmann::json::parse(is);
  for (const auto& s : j["scenes"]) {
    const auto cloud = load_cloud((root / s["cloud"].get<std::string>()).string());
    o.require(cloud.size() == 4096, "cloud rows " + std::to_string(cloud.size()));
    std::map<int, int> by_object;
    for (std::size_t k = 0; k < cloud.size(); ++k) by_object[cloud.object_id[k]] = cloud.genus_label[k];
    std::multiset<int> labels, manifest;
    for (auto [id, g] : by_object) labels.insert(g);
    for (const auto& ob : s["objects"]) manifest.insert(ob["genus"].get<int>());
    o.require(labels == manifest, "label multiset differs from manifest");
  }
  fs::remove_all(root);
  if (o.pass) o.detail = "chi-square " + fmt("%.1f", chi2) + " < 134.6; 4 pipeline clouds of 4096 rows match manifest";
  return o;
}

Outcome augmentation() {
  Outcome o;
  const auto objs = std::vector<TriangleMesh>{make_seed(1), transformed(make_seed(2), 1.0, Vec3(0, 0, 10))};
  const auto c = sample_cloud(objs, {1, 2}, 4096, 3);
  auto id = AugmentConfig::identity();
  id.rng_seed = 5;
  const auto same = augment(c, id);
  o.require(same.points == c.points && same.genus_label == c.genus_label, "zeroed config is not the identity");

  auto iso = AugmentConfig::identity();
  iso.mirror_prob = 0.5;
  iso.rotation_max = 2 * std::numbers::pi;
  double worst = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    iso.rng_seed = s;
    const auto out = augment(c, iso);
    for (std::size_t i = 0; i < c.size(); i += 17)
      for (std::size_t k = i + 1; k < c.size(); k += 31) {
        const double d0 = (c.points[i] - c.points[k]).norm(), d1 = (out.points[i] - out.points[k]).norm();
        worst = std::max(worst, std::abs(d1 - d0) / d0);
      }
  }
  o.require(worst < 1e-9, "distance error " + fmt("%.3g", worst));

  LabeledCloud zero;
  zero.points.assign(100000, Vec3::Zero());
  zero.genus_label.assign(100000, 0);
  zero.object_id.assign(100000, 0);
  auto jit = AugmentConfig::identity();
  jit.jitter_sigma = 0.025;
  jit.rng_seed = 11;
  const auto j = augment(zero, jit);
  std::string sds;
  for (int ax = 0; ax < 3; ++ax) {
    double mean = 0, q = 0;
    for (const auto& p : j.points) mean += p[ax];
    mean /= 1e5;
    for (const auto& p : j.points) q += (p[ax] - mean) * (p[ax] - mean);
    const double sd = std::sqrt(q / (1e5 - 1));
    o.require(sd >= 0.0225 && sd <= 0.0275, "jitter std " + fmt("%.4f", sd));
    sds += fmt(" %.4f", sd);
  }
  if (o.pass) o.detail = "identity exact, isometry error " + fmt("%.1g", worst) + ", jitter std" + sds;
  return o;
}

Outcome metrics_truth() {
  Outcome o;
  std::vector<int> gt(300, 1), pred(300, 1);
  gt.insert(gt.end(), 200, 2);
  pred.insert(pred.end(), 200, 3);
  const auto r = compute_metrics(accumulate(gt, pred));
  o.require(r.per_class[1].iou && std::abs(*r.per_class[1].iou - 100.0) < 1e-12, "genus-1 IoU");
  o.require(r.per_class[2].iou && std::abs(*r.per_class[2].iou) < 1e-12, "genus-2 IoU");
  o.require(std::abs(r.miou - 50.0) < 1e-12, "clean-miss mIoU " + fmt("%.3f", r.miou));
  const auto h = compute_metrics(accumulate({0, 0, 1, 1}, {0, 1, 1, 1}));
  o.require(std::abs(*h.per_class[0].iou - 50.0) < 1e-12, "hand IoU 0");
  o.require(std::abs(*h.per_class[1].iou - 66.667) <= 1e-3, "hand IoU 1");
  o.require(std::abs(h.oa - 75.0) < 1e-12, "hand OA");
  if (o.pass)
    o.detail = "clean miss IoU (100, 0), mIoU 50; hand IoU (50.0, " + fmt("%.3f", *h.per_class[1].iou) + "), OA 75.0";
  return o;
}

Outcome persistence_oracle() {
  Outcome o;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CounterRng rng(seed, 1);
    const int n = 2 + static_cast<int>(rng.below(49));
    std::vector<Vec3> p;
    for (int i = 0; i < n; ++i) p.emplace_back(rng.uniform(), rng.uniform(), rng.uniform());
    const auto b = persistence(build_rips(p, 0.5, 1));
    for (double r = 0.0; r < 0.5; r += 0.025) {
      std::vector<int> parent(n);
      std::iota(parent.begin(), parent.end(), 0);
      std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if ((p[i] - p[j]).norm() <= r) parent[find(i)] = find(j);
      int comps = 0;
      for (int i = 0; i < n; ++i) comps += find(i) == i;
      o.require(betti_at(b, r).b0 == comps, "beta0 mismatch on instance " + std::to_string(seed));
    }
  }
  std::vector<Vec3> circle;
  for (int i = 0; i < 8; ++i)
    circle.emplace_back(std::cos(2 * std::numbers::pi * i / 8), std::sin(2 * std::numbers::pi * i / 8), 0);
  const auto h1 = persistence(build_rips(circle, 2.1)).in_dim(1);
  o.require(h1.size() == 1, "circle has " + std::to_string(h1.size()) + " dim-1 bars");
  if (o.pass)
    o.detail = "200 instances agree with union-find; circle bar [" + fmt("%.4f", h1[0].birth) + ", " +
               fmt("%.4f", h1[0].death) + ")";
  return o;
}

Outcome desk_dataset(const fs::path& work) {
  Outcome o;
  const auto t0 = Clock::now();
  const auto cfg = load_dataset_config(std::string(TOPOGEN_SOURCE_DIR) + "/configs/desk.json");
  o.require(cfg.counts == std::array<int, 3>{57, 16, 9}, "desk counts");
  o.require(cfg.min_objects == 1 && cfg.max_objects == 3 && cfg.min_genus == 0 && cfg.max_genus == 3, "ranges");
  const auto a = work / "desk_a", b = work / "desk_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const auto ra = run_pipeline(cfg, a.string());
  const auto rb = run_pipeline(cfg, b.string());
  o.require(ra.failures == 0 && rb.failures == 0, "generation failures");

  std::map<int, int> genus;
  std::array<std::map<int, int>, 3> sizes;
  int objects = 0;
  for (const auto& s : ra.scenes) {
    ++sizes[s.plan.split][static_cast<int>(s.plan.objects.size())];
    for (const auto& ob : s.plan.objects) {
      ++genus[ob.genus];
      ++objects;
    }
  }
  for (int sp = 0; sp < 3; ++sp)
    for (int n = 1; n <= 3; ++n)
      o.require(std::abs(sizes[sp][n] - cfg.counts[sp] / 3.0) <= 1.0, "object-count histogram");
  for (int g = 0; g <= 3; ++g) o.require(std::abs(genus[g] - objects / 4.0) <= 1.0, "genus histogram");

  int verified = 0;
  for (const auto& l : verify_dataset((a / "manifest.json").string())) {
    o.require(l.pass, "verify failed on scene " + std::to_string(l.scene_id) + ": " + l.detail);
    verified += l.pass;
  }
  o.require(verified == 82, "verified " + std::to_string(verified));

  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    const auto other = b / fs::relative(e.path(), a);
    std::ifstream fa(e.path(), std::ios::binary), fb(other, std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    o.require(fb.good() && sa.str() == sb.str(), "rerun differs at " + fs::relative(e.path(), a).string());
  }
  std::size_t files_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) files_b += e.is_regular_file();
  o.require(files == files_b && files == 1 + 2 * 82, "file counts");
  const double secs = seconds_since(t0);
  o.require(secs < 1800, "took " + fmt("%.0f s", secs));
  fs::remove_all(a);
  fs::remove_all(b);
  if (o.pass)
    o.detail = "82 scenes, 0 failures, histograms balanced, 82/82 verified, rerun byte-identical (" +
               std::to_string(files) + " files), two runs " + fmt("%.0f s", secs);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "topogen_acceptance";
  fs::create_directories(work);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"seed topology", seed_topology},
      {"ambiguity reproduction", ambiguity},
      {"growth genus preservation", growth_preservation},
      {"gradient correctness", gradient_check},
      {"energy scale invariance", energy_scale},
      {"WFC validity", wfc_validity},
      {"sampling fidelity", [&] { return sampling_fidelity(work); }},
      {"augmentation contract", augmentation},
      {"metrics ground truth", metrics_truth},
      {"persistence oracle equivalence", persistence_oracle},
      {"desk dataset run", [&] { return desk_dataset(work); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(work);
  return failed == 0 ? 0 : 1;
}
