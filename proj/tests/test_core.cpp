#include <doctest.h>

#include <random>

#include "evstereo/core.hpp"
#include "evstereo/volume.hpp"
#include "support.hpp"

using namespace evstereo;

TEST_CASE("validate_batch accepts an in-bounds singleton") {
  const EventBatch batch = {{0.0, 5, 5, 1}};
  CHECK_NOTHROW(validate_batch(batch, CameraRig{}));
}

TEST_CASE("validate_batch reports the first offending event") {
  const CameraRig rig;
  SUBCASE("x beyond the sensor width") {
    const EventBatch batch = {{0.0, 400, 5, 1}};
    try {
      validate_batch(batch, rig);
      FAIL("expected BatchError");
    } catch (const BatchError& e) {
      CHECK(e.kind() == BatchError::Kind::OutOfBounds);
      CHECK(e.index() == 0);
    }
  }
  SUBCASE("decreasing timestamps") {
    const EventBatch batch = {{0.2, 1, 1, 1}, {0.1, 1, 1, 1}};
    try {
      validate_batch(batch, rig);
      FAIL("expected BatchError");
    } catch (const BatchError& e) {
      CHECK(e.kind() == BatchError::Kind::NonMonotone);
      CHECK(e.index() == 1);
    }
  }
  SUBCASE("polarity outside {-1, +1}") {
    const EventBatch batch = {{0.0, 1, 1, 1}, {0.1, 1, 1, 0}};
    CHECK_THROWS_AS(validate_batch(batch, rig), BatchError);
  }
  SUBCASE("negative coordinate") {
    const EventBatch batch = {{0.0, -1, 1, 1}};
    CHECK_THROWS_AS(validate_batch(batch, rig), BatchError);
  }
  SUBCASE("NaN timestamp") {
    const EventBatch batch = {{std::nan(""), 1, 1, 1}};
    CHECK_THROWS_AS(validate_batch(batch, rig), BatchError);
  }
}

TEST_CASE("equal timestamps are monotone") {
  const EventBatch batch = {{0.1, 1, 1, 1}, {0.1, 2, 1, -1}};
  CHECK_NOTHROW(validate_batch(batch, CameraRig{}));
}

TEST_CASE("rig and config validation") {
  CHECK_NOTHROW(CameraRig{}.validate());
  CameraRig bad;
  bad.f = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);

  DisparityConfig cfg;
  CHECK_NOTHROW(cfg.validate(CameraRig{}));
  cfg.window = 300;
  CHECK_THROWS_AS(cfg.validate(CameraRig{}), Error);
  cfg = {};
  cfg.d_min = 5;
  cfg.d_max = 4;
  CHECK_THROWS_AS(cfg.validate(CameraRig{}), Error);
}

TEST_CASE("default parameters") {
  const DisparityConfig cfg;
  CHECK(cfg.d_min == 0);
  CHECK(cfg.d_max == 31);
  CHECK(cfg.num_disparities() == 32);
  CHECK(cfg.window == 24);
  CHECK(cfg.eps_c == 0.1);
  CHECK(cfg.eps_n == 0.1);
  CHECK(cfg.num_events == 15000);
  const CameraRig rig;
  CHECK(rig.width == 346);
  CHECK(rig.height == 260);
}

TEST_CASE("volume indexing follows (d, y, x) order") {
  Volume<int> v(4, 3, 2, 5, 0);
  CHECK(v.num_disparities() == 4);
  v(1, 2, 3) = 7;
  CHECK(v.data()[(1 * 3 + 2) * 4 + 1] == 7);
  CHECK(v.slice(3)[2 * 4 + 1] == 7);
}

TEST_CASE("cost kind names round-trip") {
  for (CostKind k : {CostKind::IoU, CostKind::Intersection, CostKind::Time}) {
    CHECK(parse_cost_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_cost_kind("census"), Error);
}

TEST_CASE("event mask marks every raw event pixel") {
  const CameraRig rig = testing::small_rig();
  const EventBatch batch = {{0.0, 1, 2, 1}, {0.1, 1, 2, -1}, {0.2, 39, 29, 1}};
  const auto mask = event_mask(batch, rig);
  int count = 0;
  for (auto m : mask.data()) count += m;
  CHECK(count == 2);
  CHECK(mask(1, 2) == 1);
  CHECK(mask(39, 29) == 1);
}

TEST_CASE("volumes built from random batches stay in the sign domain") {
  std::mt19937_64 rng(11);
  const CameraRig rig = testing::small_rig();
  DisparityConfig cfg;
  cfg.d_max = 10;
  cfg.window = 5;
  std::uniform_int_distribution<int> ux(0, rig.width - 1), uy(0, rig.height - 1), up(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    EventBatch batch;
    for (int i = 0; i < 300; ++i) batch.push_back({i * 1e-4, ux(rng), uy(rng), up(rng) ? 1 : -1});
    const Velocity vel = testing::random_velocity(rng);
    CHECK(has_sign_domain(build_left_volume(batch, vel, rig, cfg, SyncMode::Sync)));
    CHECK(has_sign_domain(build_right_volume(batch, vel, rig, cfg, SyncMode::Sync)));
  }
}
