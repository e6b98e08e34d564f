#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include <Eigen/Geometry>
#include <sstream>

#include "test_util.hpp"
#include "topogen/sampling.hpp"
#include "topogen/seeds.hpp"

using namespace topogen;
using namespace testutil;

namespace {

constexpr double kChi2Crit99 = 134.64161685578915;  // df = 99, alpha = 0.01

// 100 disjoint triangles with varied areas; triangle k lies in the plane z = k
TriangleMesh triangle_stack() {
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
  return m;
}

double pairwise_rel_error(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); i += 7)
    for (std::size_t j = i + 1; j < a.size(); j += 13) {
      const double da = (a[i] - a[j]).norm(), db = (b[i] - b[j]).norm();
      worst = std::max(worst, std::abs(da - db) / da);
    }
  return worst;
}

LabeledCloud scene_cloud(std::size_t n, std::uint64_t seed) {
  const auto objs = std::vector<TriangleMesh>{make_seed(1), transformed(make_seed(3), 1.0, Vec3(0, 0, 10))};
  return sample_cloud(objs, {1, 3}, n, seed);
}

}  // namespace

TEST_CASE("cloud size and labels") {
  const auto c = scene_cloud(4096, 7);
  CHECK(c.size() == 4096);
  CHECK(c.genus_label.size() == 4096);
  CHECK(c.object_id.size() == 4096);
  for (std::size_t k = 0; k < c.size(); ++k) {
    CHECK(c.genus_label[k] == (c.object_id[k] == 0 ? 1 : 3));
    CHECK((c.object_id[k] == 0) == (c.points[k].z() < 5));
  }
  CHECK_THROWS_AS(sample_cloud({}, {}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_cloud({make_seed(0)}, {0, 1}, 10, 1), std::invalid_argument);
}

TEST_CASE("points on a single triangle have valid barycentric coordinates") {
  TriangleMesh t;
  t.vertices = {{1, 0, 0}, {0, 2, 0}, {0, 0, 3}};
  t.triangles = {{0, 1, 2}};
  const auto c = sample_cloud({t}, {0}, 2000, 5);
  const Vec3 a = t.vertices[0], e1 = t.vertices[1] - a, e2 = t.vertices[2] - a;
  const Vec3 n = e1.cross(e2);
  for (const auto& p : c.points) {
    const Vec3 d = p - a;
    CHECK(std::abs(d.dot(n)) < 1e-12);
    // solve d = u e1 + v e2
    const double d11 = e1.dot(e1), d12 = e1.dot(e2), d22 = e2.dot(e2);
    const double r1 = d.dot(e1), r2 = d.dot(e2), det = d11 * d22 - d12 * d12;
    const double u = (r1 * d22 - r2 * d12) / det, v = (r2 * d11 - r1 * d12) / det;
    CHECK(u >= -1e-12);
    CHECK(v >= -1e-12);
    CHECK(u + v <= 1 + 1e-12);
  }
}

TEST_CASE("area ratio two to one") {
  const auto big = transformed(make_seed(0), std::sqrt(2.0), Vec3::Zero());
  const auto small = transformed(make_seed(0), 1.0, Vec3(20, 0, 0));
  REQUIRE(surface_area(big) == doctest::Approx(2 * surface_area(small)));
  const auto c = sample_cloud({big, small}, {0, 0}, 30000, 9);
  const auto n0 = std::count(c.object_id.begin(), c.object_id.end(), 0);
  const double ratio = static_cast<double>(n0) / static_cast<double>(30000 - n0);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("chi-square goodness of fit against triangle areas") {
  const auto m = triangle_stack();
  const double total = surface_area(m);
  const std::size_t n = 100000;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto c = sample_cloud({m}, {0}, n, seed);
    std::vector<double> count(100, 0);
    for (const auto& p : c.points) {
      const long k = std::lround(p.z());
      REQUIRE(std::abs(p.z() - static_cast<double>(k)) < 1e-9);
      count[k] += 1;
    }
    double chi2 = 0;
    for (int k = 0; k < 100; ++k) {
      const double e = static_cast<double>(n) * triangle_area(m, k) / total;
      chi2 += (count[k] - e) * (count[k] - e) / e;
    }
    CHECK(chi2 < kChi2Crit99);
  }
}

TEST_CASE("sampling is deterministic and prefix stable") {
  const auto a = scene_cloud(3000, 11), b = scene_cloud(3000, 11), c = scene_cloud(1000, 11);
  CHECK(a.points == b.points);
  CHECK(a.genus_label == b.genus_label);
  for (std::size_t k = 0; k < 1000; ++k) CHECK(a.points[k] == c.points[k]);
  CHECK(scene_cloud(100, 12).points != scene_cloud(100, 11).points);
}

TEST_CASE("identity augmentation") {
  const auto c = scene_cloud(2000, 3);
  auto cfg = AugmentConfig::identity();
  cfg.rng_seed = 77;
  const auto out = augment(c, cfg);
  CHECK(out.points == c.points);
  CHECK(out.genus_label == c.genus_label);
  CHECK(out.object_id == c.object_id);
}

TEST_CASE("isometric steps preserve distances") {
  const auto c = scene_cloud(2000, 4);
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto cfg = AugmentConfig::identity();
    cfg.mirror_prob = 0.5;
    cfg.rotation_max = 2 * std::numbers::pi;
    cfg.shift_range = 25;
    cfg.rng_seed = s;
    const auto out = augment(c, cfg);
    CHECK(out.points != c.points);
    CHECK(pairwise_rel_error(c.points, out.points) < 1e-9);
  }
}

TEST_CASE("scale and shift ranges") {
  const auto c = scene_cloud(500, 5);
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto cfg = AugmentConfig::identity();
    cfg.scale_spread = 0.5;
    cfg.rng_seed = s;
    const auto out = augment(c, cfg);
    for (int ax = 0; ax < 3; ++ax) {
      const double k = out.points[0][ax] / c.points[0][ax];
      CHECK(k >= 0.5);
      CHECK(k <= 1.5);
      for (std::size_t i = 1; i < c.size(); i += 50)
        CHECK(out.points[i][ax] == doctest::Approx(k * c.points[i][ax]).epsilon(1e-12));
    }
    cfg = AugmentConfig::identity();
    cfg.shift_range = 25;
    cfg.rng_seed = s;
    const auto sh = augment(c, cfg);
    const Vec3 d = sh.points[0] - c.points[0];
    CHECK(d.cwiseAbs().maxCoeff() <= 25.0);
    for (std::size_t i = 1; i < c.size(); i += 50) CHECK((sh.points[i] - c.points[i] - d).norm() < 1e-12);
  }
}

TEST_CASE("jitter standard deviation") {
  LabeledCloud c;
  c.points.assign(100000, Vec3::Zero());
  c.genus_label.assign(100000, 2);
  c.object_id.assign(100000, 0);
  auto cfg = AugmentConfig::identity();
  cfg.jitter_sigma = 0.025;
  cfg.rng_seed = 31;
  const auto out = augment(c, cfg);
  for (int ax = 0; ax < 3; ++ax) {
    double m = 0, q = 0;
    for (const auto& p : out.points) m += p[ax];
    m /= 100000.0;
    for (const auto& p : out.points) q += (p[ax] - m) * (p[ax] - m);
    const double sd = std::sqrt(q / (100000.0 - 1));
    CHECK(sd >= 0.0225);
    CHECK(sd <= 0.0275);
  }
}

TEST_CASE("full augmentation keeps labels and size") {
  const auto c = scene_cloud(3000, 8);
  AugmentConfig cfg;
  cfg.rng_seed = 5;
  const auto a = augment(c, cfg), b = augment(c, cfg);
  CHECK(a.size() == c.size());
  CHECK(a.points == b.points);
  std::multiset<std::pair<int, int>> before, after;
  for (std::size_t k = 0; k < c.size(); ++k) {
    before.insert({c.genus_label[k], c.object_id[k]});
    after.insert({a.genus_label[k], a.object_id[k]});
  }
  CHECK(before == after);
}

TEST_CASE("cloud CSV round trip") {
  const auto c = scene_cloud(500, 2);
  std::stringstream ss;
  write_cloud_csv(ss, c);
  const std::string text = ss.str();
  CHECK(text.rfind("x,y,z,genus,object_id\n", 0) == 0);
  const auto back = read_cloud_csv(ss);
  REQUIRE(back.size() == c.size());
  CHECK(back.genus_label == c.genus_label);
  CHECK(back.object_id == c.object_id);
  for (std::size_t k = 0; k < c.size(); ++k)
    for (int ax = 0; ax < 3; ++ax)
      CHECK(std::abs(back.points[k][ax] - c.points[k][ax]) <= 1e-8 * std::max(1.0, std::abs(c.points[k][ax])));

  std::stringstream bad("x,y,z,genus\n1,2,3,0\n");
  CHECK_THROWS(read_cloud_csv(bad));
  std::stringstream bad_row("x,y,z,genus,object_id\n1,2,three,0,0\n");
  CHECK_THROWS(read_cloud_csv(bad_row));
}

TEST_CASE("label files") {
  std::stringstream ss;
  write_labels(ss, {0, 3, 2, 1});
  CHECK(read_labels(ss) == std::vector<int>{0, 3, 2, 1});
  std::stringstream bad("1\n2x\n");
  CHECK_THROWS(read_labels(bad));
}
