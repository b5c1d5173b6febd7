#pragma once

#include <cstdint>
#include <span>

#include "evstereo/core.hpp"

namespace evstereo {

/// Square matching window. The output pixel sits at column/row `anchor()`
/// inside the window, so a side-24 window spans [x - 11, x + 12].
struct WindowSpec {
  int side = 24;

  int anchor() const { return (side - 1) / 2; }
  /// Number of in-bounds pixels of the window anchored at (x, y).
  int in_bounds_count(int x, int y, int width, int height) const;
  void validate(int width, int height) const;
};

inline int pixel_union(int a, int b) { return (a != 0 || b != 0) ? 1 : 0; }
inline int pixel_intersection(int a, int b) { return (a == b && a != 0) ? 1 : 0; }

/// Window sums of `field` (width x height, row-major), computed as a
/// horizontal then a vertical running box sum. Windows are truncated at the
/// image border.
std::vector<std::int32_t> window_sum(std::span<const std::int32_t> field, int width, int height,
                                     const WindowSpec& spec);
Image<std::int32_t> window_sum(const Image<std::int32_t>& field, const WindowSpec& spec);

/// C_U, C_I and the IoU cost -C_I/C_U per voxel. Voxels with C_U = 0 get
/// kUndefinedCost.
CostVolume iou_cost_volume(const EventDisparityVolume& left, const EventDisparityVolume& right,
                           const WindowSpec& spec);

/// Intersection-only variant: cost = -C_I where C_U > 0.
CostVolume intersection_cost_volume(const EventDisparityVolume& left,
                                    const EventDisparityVolume& right, const WindowSpec& spec);

/// Timestamp similarity summed over the window: each pixel with events on both
/// sides contributes 1 / ((alpha |t_L - t_R| + 1) * C_U(pixel)), where C_U is
/// the pixel's own window union. Stored negated so lower is better. Voxels with
/// C_U = 0 are undefined.
Volume<float> timestamp_cost_volume(const TimestampVolume& left_t, const TimestampVolume& right_t,
                                    const Volume<std::int32_t>& c_u, const WindowSpec& spec,
                                    double alpha = 1.0);

}  // namespace evstereo
