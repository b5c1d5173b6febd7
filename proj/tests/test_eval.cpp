#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "evstereo/eval.hpp"
#include "evstereo/pipeline.hpp"
#include "evstereo/synth.hpp"
#include "support.hpp"

using namespace evstereo;
using doctest::Approx;

namespace {

DisparityMap map_from(const std::vector<int>& d, const std::vector<int>& valid) {
  const int w = static_cast<int>(d.size());
  DisparityMap m;
  m.d_hat = Image<std::int32_t>(w, 1);
  m.valid = Image<std::uint8_t>(w, 1);
  m.has_events = Image<std::uint8_t>(w, 1, 1);
  for (int x = 0; x < w; ++x) {
    m.d_hat(x, 0) = d[x];
    m.valid(x, 0) = static_cast<std::uint8_t>(valid[x]);
  }
  m.d_max = 31;
  return m;
}

Image<double> gt_from(const std::vector<double>& d) {
  Image<double> g(static_cast<int>(d.size()), 1);
  for (std::size_t x = 0; x < d.size(); ++x) g(static_cast<int>(x), 0) = d[x];
  return g;
}

}  // namespace

TEST_CASE("perfect estimate") {
  const auto m = disparity_metrics(map_from({3, 9, 17}, {1, 1, 1}), gt_from({3, 9, 17}), CameraRig{});
  CHECK(m.mean_disp_err == 0.0);
  CHECK(m.mean_depth_err == 0.0);
  CHECK(m.pct_within_1 == 100.0);
  CHECK(m.n_compared == 3);
}

TEST_CASE("two-pixel arithmetic") {
  const auto m = disparity_metrics(map_from({5, 7}, {1, 1}), gt_from({5, 5}), CameraRig{});
  CHECK(m.mean_disp_err == Approx(1.0));
  CHECK(m.pct_within_1_strict == Approx(50.0));
  CHECK(m.pct_within_1 == Approx(50.0));
  const auto edge = disparity_metrics(map_from({6, 5}, {1, 1}), gt_from({5, 5}), CameraRig{});
  CHECK(edge.pct_within_1 == Approx(100.0));
  CHECK(edge.pct_within_1_strict == Approx(50.0));
}

TEST_CASE("depth error") {
  const auto m = disparity_metrics(map_from({15}, {1}), gt_from({30}), testing::rig_f300());
  CHECK(m.mean_depth_err == Approx(1.0));
  CHECK(m.n_depth == 1);
}

TEST_CASE("pixel selection and denominators") {
  auto est = map_from({4, 4, 4, 4}, {1, 0, 1, 1});
  est.has_events(3, 0) = 0;
  const auto m = disparity_metrics(est, gt_from({4, 4, std::nan(""), 4}), CameraRig{});
  CHECK(m.n_compared == 1);
  CHECK(m.n_rejected == 1);
  CHECK(m.pct_within_1 == 100.0);
  CHECK(m.pct_within_1_of_covered == 50.0);

  CHECK_THROWS_AS(disparity_metrics(map_from({1}, {0}), gt_from({1}), CameraRig{}), Error);
  CHECK_THROWS_AS(disparity_metrics(map_from({1, 2}, {1, 1}), gt_from({1}), CameraRig{}), Error);
}

TEST_CASE("metrics do not depend on pixel order") {
  std::mt19937_64 rng(61);
  std::vector<int> d(200), valid(200);
  std::vector<double> gt(200);
  for (int i = 0; i < 200; ++i) {
    d[i] = static_cast<int>(rng() % 32);
    valid[i] = rng() % 5 != 0;
    gt[i] = 0.5 + static_cast<double>(rng() % 3000) / 100.0;
  }
  const auto base = disparity_metrics(map_from(d, valid), gt_from(gt), CameraRig{});
  std::vector<int> order(200);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> d2(200), v2(200);
  std::vector<double> g2(200);
  for (int i = 0; i < 200; ++i) {
    d2[i] = d[order[i]];
    v2[i] = valid[order[i]];
    g2[i] = gt[order[i]];
  }
  const auto shuffled = disparity_metrics(map_from(d2, v2), gt_from(g2), CameraRig{});
  CHECK(shuffled.mean_disp_err == Approx(base.mean_disp_err));
  CHECK(shuffled.mean_depth_err == Approx(base.mean_depth_err));
  CHECK(shuffled.pct_within_1 == base.pct_within_1);
  CHECK(shuffled.n_compared == base.n_compared);
}

TEST_CASE("depth error follows f b / d per pixel") {
  const CameraRig rig;
  for (int d = 1; d <= 31; ++d) {
    for (double g : {2.5, 10.0, 27.25}) {
      const auto m = disparity_metrics(map_from({d}, {1}), gt_from({g}), rig);
      CHECK(m.mean_depth_err == Approx(std::abs(rig.f * rig.baseline / d - rig.f * rig.baseline / g)));
    }
  }
  const auto zero = disparity_metrics(map_from({0}, {1}), gt_from({3.0}), rig);
  CHECK(zero.n_depth == 0);
  CHECK(zero.mean_disp_err == 3.0);
}

TEST_CASE("merged metrics weight by pixel counts") {
  const auto a = disparity_metrics(map_from({5, 7}, {1, 1}), gt_from({5, 5}), CameraRig{});
  const auto b = disparity_metrics(map_from({5}, {1}), gt_from({5}), CameraRig{});
  const auto all = disparity_metrics(map_from({5, 7, 5}, {1, 1, 1}), gt_from({5, 5, 5}), CameraRig{});
  const auto merged = merge_metrics({a, b});
  CHECK(merged.mean_disp_err == Approx(all.mean_disp_err));
  CHECK(merged.pct_within_1 == Approx(all.pct_within_1));
  CHECK(merged.n_compared == 3);
}

TEST_CASE("ablation grid and labels") {
  const auto grid = ablation_grid({CostKind::IoU, CostKind::Time}, {true, false}, {0.0, 0.2}, {24}, 3);
  CHECK(grid.size() == 8);
  CHECK(grid.front().label() == "IoU-S");
  CHECK(grid.back().label() == "T-NS");
  CHECK(AblationVariant{CostKind::Intersection, true}.label() == "I-S");
}

TEST_CASE("ablation runner") {
  const CameraRig rig;
  RandomSceneOptions opt;
  opt.target_events = 6000;
  const SceneSpec scene = make_random_scene(2, rig, opt);
  const auto s = generate_stereo_events(scene, rig);
  const StereoDataset data{rig, s.left, s.right, {{0.0, scene.vel}}, s.gt_disparity};
  PipelineConfig base;
  base.disparity.num_events = 6000;

  SUBCASE("single variant equals a direct run") {
    const auto rows = ablation_runner(data, base, {AblationVariant{}});
    REQUIRE(rows.size() == 1);
    const auto direct = run(data, base);
    REQUIRE(direct.size() == 1);
    CHECK(rows[0].metrics.mean_disp_err == direct[0].metrics->mean_disp_err);
    CHECK(rows[0].metrics.n_compared == direct[0].metrics->n_compared);
  }
  SUBCASE("duplicated variants give identical rows") {
    AblationVariant v;
    v.noise_pct = 0.2;
    v.seed = 9;
    const auto rows = ablation_runner(data, base, {v, v});
    CHECK(rows[0].metrics.mean_disp_err == rows[1].metrics.mean_disp_err);
    CHECK(rows[0].metrics.pct_within_1 == rows[1].metrics.pct_within_1);
  }
  SUBCASE("sync is no worse than no sync") {
    AblationVariant ns;
    ns.sync = false;
    const auto rows = ablation_runner(data, base, {AblationVariant{}, ns});
    CHECK(rows[0].metrics.mean_disp_err <= rows[1].metrics.mean_disp_err);
  }
  SUBCASE("csv layout") {
    const auto rows = ablation_runner(data, base, {AblationVariant{}});
    std::ostringstream os;
    write_metrics_csv(os, rows);
    std::istringstream is(os.str());
    std::string header, line;
    std::getline(is, header);
    std::getline(is, line);
    CHECK(header ==
          "variant,cost,sync,noise_pct,window,mean_disp_err,mean_depth_err,pct_within_1,n_compared,"
          "n_rejected");
    CHECK(line.rfind("IoU-S,iou,1,0,24,", 0) == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 9);
  }
  CHECK_THROWS_AS(ablation_runner(StereoDataset{rig, s.left, s.right, {{0.0, scene.vel}}, {}}, base,
                                  {AblationVariant{}}),
                  Error);
}
