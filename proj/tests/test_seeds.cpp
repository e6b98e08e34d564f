#include <doctest.h>

#include <chrono>

#include <Eigen/LU>

#include "test_util.hpp"
#include "topogen/seeds.hpp"
#include "topogen/topology.hpp"

using namespace topogen;
using namespace testutil;

namespace {

// distance between the bounding boxes of two meshes (0 if they overlap)
double box_gap(const TriangleMesh& a, const TriangleMesh& b) {
  const auto ba = bounds(a), bb = bounds(b);
  const Vec3 gap = (ba.lo - bb.hi).cwiseMax(bb.lo - ba.hi).cwiseMax(0.0);
  return gap.maxCoeff();
}

}  // namespace

TEST_CASE("seeds have the requested genus and are valid surfaces") {
  for (int g = 0; g <= 6; ++g) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = make_seed(g);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto d = validate_manifold(m);
    CHECK(d.is_closed);
    CHECK(d.is_oriented);
    CHECK_FALSE(d.has_degenerate);
    CHECK(d.self_intersections.empty());
    CHECK(d.component_count == 1);
    CHECK(chi_recount(m) == 2 - 2 * g);
    CHECK(genus_of_component(m) == g);
    CHECK(enclosed_volume(m) > 0);
    CHECK(secs < 1.0);
  }
}

TEST_CASE("seed solid shape") {
  const auto s = seed_solid(2);
  CHECK(s.dims == GridDims{11, 3, 3});
  int solid = 0;
  for (char c : s.solid) solid += c;
  CHECK(solid == 11 * 9 - 2 * 3);
  CHECK_FALSE(s.at(3, 1, 0));
  CHECK_FALSE(s.at(7, 1, 2));
  CHECK(s.at(5, 1, 1));
  CHECK(s.at(0, 0, 0));
  CHECK_THROWS_AS(make_seed(-1), std::invalid_argument);
}

TEST_CASE("boundary surface resolves edge contacts") {
  // two cubes touching along one edge, and two touching at a corner
  VoxelSolid edge({2, 2, 1});
  edge.set(0, 0, 0);
  edge.set(1, 1, 0);
  VoxelSolid corner({2, 2, 2});
  corner.set(0, 0, 0);
  corner.set(1, 1, 1);
  for (const auto* v : {&edge, &corner}) {
    const auto m = boundary_surface(*v);
    const auto d = validate_manifold(m);
    CHECK(d.is_closed);
    CHECK(d.is_oriented);
    CHECK(d.component_count == 2);
    CHECK(d.euler_characteristic == 4);
  }
}

TEST_CASE("relaxation is intersection guarded") {
  auto m = boundary_surface(seed_solid(3));
  const double vol = enclosed_volume(m);
  const int kept = relax({&m}, 5);
  CHECK(kept >= 0);
  CHECK(kept <= 5);
  CHECK(detect_self_intersections(m).empty());
  CHECK(enclosed_volume(m) == doctest::Approx(vol).epsilon(1e-6));
}

TEST_CASE("linked pairs") {
  for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 3}, {1, 1}, {2, 2}, {3, 1}}) {
    const auto [ma, mb] = make_linked_pair(a, b);
    CHECK(genus_of_component(ma) == a);
    CHECK(genus_of_component(mb) == b);
    const auto u = merge({ma, mb});
    CHECK(component_recount(u) == 2);
    CHECK(detect_self_intersections_brute(u).empty());
    // interlocked: the bounding boxes overlap although the surfaces do not touch
    CHECK(bounds(ma).overlaps(bounds(mb)));
    const auto s = scene_summary(u);
    CHECK(s.scene_betti == betti_from_genera({a, b}));
  }
  CHECK_THROWS_AS(make_linked_pair(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_linked_pair(2, 0), std::invalid_argument);
}

TEST_CASE("axis rotations") {
  const auto& r = axis_rotations();
  CHECK(r.size() == 24);
  for (const auto& m : r) {
    CHECK((m * m.transpose() - Rotation::Identity()).norm() < 1e-12);
    CHECK(m.determinant() == doctest::Approx(1.0));
  }
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = i + 1; j < r.size(); ++j) CHECK((r[i] - r[j]).norm() > 0.5);
}

TEST_CASE("SeedSpec list validation") {
  std::vector<SeedSpec> s{{1, 1, 1.0}, {2, 0, 1.0}};
  CHECK_NOTHROW(validate_specs(s));
  s[1].linked_to = std::nullopt;
  CHECK_THROWS_AS(validate_specs(s), std::invalid_argument);
  s = {{1, 0, 1.0}};
  CHECK_THROWS_AS(validate_specs(s), std::invalid_argument);
  s = {{0, 1, 1.0}, {2, 0, 1.0}};
  CHECK_THROWS_AS(validate_specs(s), std::invalid_argument);
  s = {{7, std::nullopt, 1.0}};
  CHECK_THROWS_AS(validate_specs(s, 6), std::invalid_argument);
  s = {{1, std::nullopt, -1.0}};
  CHECK_THROWS_AS(validate_specs(s), std::invalid_argument);
}

TEST_CASE("placement in an empty environment") {
  const auto env = empty_environment({18, 18, 18}, 1.0);
  const auto p = place_seeds({{0, std::nullopt, 1.0}}, env, 3);
  REQUIRE(p.meshes.size() == 1);
  CHECK(genus_of_component(p.meshes[0]) == 0);
  const auto box = env.box();
  CHECK((bounds(p.meshes[0]).lo.array() >= box.lo.array()).all());
  CHECK((bounds(p.meshes[0]).hi.array() <= box.hi.array()).all());
}

TEST_CASE("placements keep clearance and are deterministic") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const auto env = desk_env(s);
    const auto a = placed({1, 2, 3}, env, s);
    const auto b = placed({1, 2, 3}, env, s);
    REQUIRE(a.size() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(a[i].vertices == b[i].vertices);
      CHECK(genus_of_component(a[i]) == i + 1);
      for (int j = i + 1; j < 3; ++j) CHECK(box_gap(a[i], a[j]) >= 1.0 - 1e-9);
    }
    CHECK(detect_self_intersections(merge(a)).empty());
    // every vertex sits in a free cell
    for (const auto& m : a)
      for (const auto& v : m.vertices) {
        const int x = static_cast<int>(std::floor(v.x())), y = static_cast<int>(std::floor(v.y())),
                  z = static_cast<int>(std::floor(v.z()));
        REQUIRE(env.in_range(x, y, z));
        CHECK_FALSE(env.occupied_at(x, y, z));
      }
  }
}

TEST_CASE("linked placement keeps the link") {
  const auto env = desk_env(21);
  const auto m = placed({1, 3, 0}, env, 21, {{0, 1}});
  REQUIRE(m.size() == 3);
  CHECK(genus_of_component(m[0]) == 1);
  CHECK(genus_of_component(m[1]) == 3);
  CHECK(bounds(m[0]).overlaps(bounds(m[1])));
  const auto u = merge(m);
  CHECK(component_recount(u) == 3);
  CHECK(detect_self_intersections(u).empty());
}

TEST_CASE("crowded environment raises a placement error") {
  // everything blocked except one 3x3x3 pocket
  OccupancyGrid env;
  env.dims = {12, 12, 12};
  env.cell_size = 1.0;
  env.occupied.assign(env.dims.size(), 1);
  for (int z = 4; z < 7; ++z)
    for (int y = 4; y < 7; ++y)
      for (int x = 4; x < 7; ++x) env.occupied[env.dims.index(x, y, z)] = 0;
  const std::vector<SeedSpec> one{{0, std::nullopt, 0.5}};
  CHECK(place_seeds(one, env, 1).meshes.size() == 1);
  const std::vector<SeedSpec> three{{0, std::nullopt, 0.5}, {0, std::nullopt, 0.5}, {0, std::nullopt, 0.5}};
  try {
    place_seeds(three, env, 777, 200);
    FAIL("expected PlacementError");
  } catch (const PlacementError& e) {
    CHECK(std::string(e.what()).find("777") != std::string::npos);
  }
  CHECK_THROWS_AS(place_seeds({}, env, 1), std::invalid_argument);
}
