#include "evstereo/disparity.hpp"

#include <cmath>

namespace evstereo {

DisparityMap winner_takes_all(const CostVolume& costs) {
  const auto& cost = costs.cost;
  const int w = cost.width();
  const int h = cost.height();

  DisparityMap map;
  map.d_min = cost.d_min();
  map.d_max = cost.d_max();
  map.d_hat = Image<std::int32_t>(w, h, cost.d_min());
  map.valid = Image<std::uint8_t>(w, h, 0);
  map.has_events = Image<std::uint8_t>(w, h, 0);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float best = kUndefinedCost;
      int best_d = cost.d_min();
      bool found = false;
      for (int d = cost.d_min(); d <= cost.d_max(); ++d) {
        const float c = cost(x, y, d);
        if (c == kUndefinedCost) continue;
        if (!found || c < best) {
          best = c;
          best_d = d;
          found = true;
        }
      }
      map.d_hat(x, y) = best_d;
      map.valid(x, y) = found ? 1 : 0;
    }
  }
  return map;
}

double match_ratio(const DisparityMap& map, const CostVolume& costs, int x, int y) {
  const int d = map.d_hat(x, y);
  const std::int32_t u = costs.c_u(x, y, d);
  return u > 0 ? static_cast<double>(costs.c_i(x, y, d)) / u : 0.0;
}

DisparityMap reject_outliers(const DisparityMap& map, const CostVolume& costs,
                             const DisparityConfig& cfg, const WindowSpec& spec) {
  DisparityMap out = map;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!map.valid(x, y)) continue;
      const int d = map.d_hat(x, y);
      const double support = cfg.eps_n * spec.in_bounds_count(x, y, map.width(), map.height());
      if (match_ratio(map, costs, x, y) < cfg.eps_c || costs.c_u(x, y, d) < support) {
        out.valid(x, y) = 0;
      }
    }
  }
  return out;
}

Image<double> disparity_to_depth(const DisparityMap& map, const CameraRig& rig) {
  Image<double> depth(map.width(), map.height(), std::nan(""));
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!map.valid(x, y)) continue;
      const int d = map.d_hat(x, y);
      depth(x, y) = d > 0 ? rig.f * rig.baseline / d : kInfiniteDepth;
    }
  }
  return depth;
}

}  // namespace evstereo
