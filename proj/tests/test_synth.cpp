#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "evstereo/motion.hpp"
#include "evstereo/pipeline.hpp"
#include "evstereo/synth.hpp"
#include "support.hpp"

using namespace evstereo;
using doctest::Approx;

namespace {

PlaneSpec textured_plane(double disparity, const CameraRig& rig, int points, std::uint64_t seed,
                         double half_w = 0.6, double half_h = 0.45) {
  PlaneSpec plane;
  plane.depth = rig.f * rig.baseline / disparity;
  plane.x_min = -half_w * plane.depth;
  plane.x_max = half_w * plane.depth;
  plane.y_min = -half_h * plane.depth;
  plane.y_max = half_h * plane.depth;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(plane.x_min, plane.x_max), uy(plane.y_min, plane.y_max);
  for (int i = 0; i < points; ++i) plane.texture.push_back({ux(rng), uy(rng), i % 2 ? 1 : -1});
  return plane;
}

}  // namespace

TEST_CASE("static scene puts each point at one pixel per camera, d columns apart") {
  const CameraRig rig;
  SceneSpec scene;
  PlaneSpec plane;
  plane.depth = rig.f * rig.baseline / 12.0;
  plane.texture = {{0.05, 0.02, 1}};
  scene.planes = {plane};
  scene.duration = 0.05;
  scene.event_rate = 400;
  const auto s = generate_stereo_events(scene, rig);
  REQUIRE(!s.left.empty());
  REQUIRE(!s.right.empty());
  std::set<std::pair<int, int>> lp, rp;
  for (const auto& e : s.left) lp.insert({e.x, e.y});
  for (const auto& e : s.right) rp.insert({e.x, e.y});
  REQUIRE(lp.size() == 1);
  REQUIRE(rp.size() == 1);
  CHECK(lp.begin()->first - rp.begin()->first == 12);
  CHECK(lp.begin()->second == rp.begin()->second);
}

TEST_CASE("single plane gives uniform ground-truth disparity") {
  const CameraRig rig;
  SceneSpec scene;
  scene.planes = {textured_plane(16.0, rig, 10, 1, 10.0, 10.0)};
  scene.vel.linear = {0.2, 0.0, 0.0};
  const auto s = generate_stereo_events(scene, rig);
  int seen = 0;
  for (double d : s.gt_disparity.data()) {
    if (std::isnan(d)) continue;
    CHECK(d == Approx(16.0));
    ++seen;
  }
  CHECK(seen == rig.width * rig.height);
  CHECK(s.t_gt == scene.duration);
}

TEST_CASE("ground truth keeps the nearest plane") {
  const CameraRig rig;
  SceneSpec scene;
  PlaneSpec far = textured_plane(8.0, rig, 5, 2, 10.0, 10.0);
  PlaneSpec near = textured_plane(20.0, rig, 5, 3, 0.2, 0.2);
  scene.planes = {far, near};
  const auto [disp, depth] = render_ground_truth(scene, rig, 0.0);
  CHECK(disp(static_cast<int>(rig.cx), static_cast<int>(rig.cy)) == Approx(20.0));
  CHECK(disp(2, 2) == Approx(8.0));
  CHECK(depth(2, 2) == Approx(rig.f * rig.baseline / 8.0));
}

TEST_CASE("streams are time sorted, in bounds and deterministic") {
  const CameraRig rig;
  const SceneSpec scene = make_random_scene(4, rig);
  const auto a = generate_stereo_events(scene, rig);
  const auto b = generate_stereo_events(scene, rig);
  CHECK(a.left == b.left);
  CHECK(a.right == b.right);
  CHECK_NOTHROW(validate_batch(a.left, rig));
  CHECK_NOTHROW(validate_batch(a.right, rig));
  CHECK(a.left.size() >= 15000);
}

TEST_CASE("random scenes honour their ranges") {
  const CameraRig rig;
  const RandomSceneOptions opt;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SceneSpec scene = make_random_scene(seed, rig, opt);
    CHECK(scene.planes.size() >= 1);
    CHECK(scene.planes.size() <= 3);
    for (const auto& p : scene.planes) {
      const double d = rig.f * rig.baseline / p.depth;
      CHECK(d >= opt.min_disparity - 1e-9);
      CHECK(d <= opt.max_disparity + 1e-9);
    }
    CHECK(scene.vel.linear.norm() > 0.0);
    CHECK(scene.vel.angular.norm() > 0.0);
    const auto s = generate_stereo_events(scene, rig);
    const double share = static_cast<double>(scene.noise_events) / opt.target_events;
    CHECK(share == Approx(opt.noise_fraction * opt.headroom).epsilon(0.01));
  }
}

TEST_CASE("pure z-rotation traces circles about the principal point") {
  const CameraRig rig;
  Velocity vel;
  vel.angular = {0.0, 0.0, 1.5};
  for (double depth : {0.8, 3.0}) {
    const Eigen::Vector3d p(0.3 * depth, -0.2 * depth, depth);
    const auto p0 = project(point_in_camera(p, vel, 0.0), rig);
    REQUIRE(p0);
    const double r0 = (*p0 - Eigen::Vector2d(rig.cx, rig.cy)).norm();
    for (double t : {0.01, 0.05, 0.2}) {
      const auto pt = project(point_in_camera(p, vel, t), rig);
      REQUIRE(pt);
      CHECK((*pt - Eigen::Vector2d(rig.cx, rig.cy)).norm() == Approx(r0).epsilon(1e-9));
    }
  }
}

TEST_CASE("generated trajectories follow the motion field") {
  std::mt19937_64 rng(51);
  const CameraRig rig;
  for (int trial = 0; trial < 20; ++trial) {
    const Velocity vel = testing::random_velocity(rng, 1.0, 1.0);
    const double d = 5.0 + static_cast<double>(rng() % 25);
    const double z = rig.f * rig.baseline / d;
    std::uniform_real_distribution<double> un(-0.3, 0.3);
    const double xn = un(rng), yn = un(rng);
    const Eigen::Vector3d p(xn * z, yn * z, z);
    // Forward difference over 1 ms, compared with the flow at the point's
    // current pixel and depth, at several times inside a 50 ms window.
    const double h = 1e-3;
    for (double t : {0.0, 0.025, 0.049}) {
      const Eigen::Vector3d pc = point_in_camera(p, vel, t);
      const auto a = project(pc, rig);
      const auto b = project(point_in_camera(p, vel, t + h), rig);
      REQUIRE(a);
      REQUIRE(b);
      const Eigen::Vector2d numeric = (*b - *a) / h;
      const double disparity = rig.f * rig.baseline / pc.z();
      const Eigen::Vector2d flow = motion_field_flow(a->x(), a->y(), disparity, vel, rig);
      CHECK((numeric - flow).norm() <= 0.05 * std::max(flow.norm(), 1.0));
    }
  }
}

TEST_CASE("poses match the exact derivative at t = 0") {
  std::mt19937_64 rng(52);
  const CameraRig rig;
  for (int trial = 0; trial < 20; ++trial) {
    const Velocity vel = testing::random_velocity(rng, 1.0, 2.0);
    const Eigen::Vector3d p(0.2, -0.1, 1.5);
    const double h = 1e-6;
    const Eigen::Vector3d numeric = (point_in_camera(p, vel, h) - point_in_camera(p, vel, -h)) / (2 * h);
    const Eigen::Vector3d exact = -vel.linear - vel.angular.cross(p);
    CHECK((numeric - exact).norm() <= 1e-6);
    const auto pose = pose_at(vel, 0.3);
    CHECK((pose.rotation.transpose() * pose.rotation - Eigen::Matrix3d::Identity()).norm() <= 1e-12);
  }
}

TEST_CASE("noise-free single plane is recovered within one pixel") {
  const CameraRig rig;
  for (int d_true : {6, 13, 22}) {
    SceneSpec scene;
    scene.planes = {textured_plane(d_true, rig, 2500, static_cast<std::uint64_t>(d_true), 0.7, 0.55)};
    scene.vel.linear = {0.3, 0.1, 0.2};
    scene.vel.angular = {0.1, -0.1, 0.15};
    scene.duration = 0.03;
    scene.event_rate = 250;
    scene.seed = static_cast<std::uint64_t>(d_true);
    const auto s = generate_stereo_events(scene, rig);
    // Moderate motion: the fastest pixel moves at most 10 px over the scene.
    StereoDataset data{rig, s.left, s.right, {{0.0, scene.vel}}, s.gt_disparity};
    PipelineConfig cfg;
    cfg.disparity.num_events = static_cast<int>(s.left.size());
    const auto results = run(data, cfg);
    REQUIRE(results.size() == 1);
    const auto& m = *results.front().metrics;
    MESSAGE("d=" << d_true << " within1=" << m.pct_within_1 << "% n=" << m.n_compared);
    CHECK(m.pct_within_1 >= 95.0);
  }
}
