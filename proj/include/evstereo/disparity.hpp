#pragma once

#include "evstereo/core.hpp"
#include "evstereo/cost.hpp"

namespace evstereo {

/// Per-pixel argmin of `costs.cost` over disparity. Ties go to the smallest
/// disparity; pixels whose costs are all undefined are invalid. `has_events`
/// is left empty (all zero) for the caller to fill.
DisparityMap winner_takes_all(const CostVolume& costs);

/// Invalidates weak matches: pixels whose match ratio C_I/C_U at the chosen
/// disparity is below eps_c, and pixels whose union C_U is below eps_n times
/// the in-bounds window size.
DisparityMap reject_outliers(const DisparityMap& map, const CostVolume& costs,
                             const DisparityConfig& cfg, const WindowSpec& spec);

/// C_I / C_U at the chosen disparity, 0 where the union is empty.
double match_ratio(const DisparityMap& map, const CostVolume& costs, int x, int y);

inline constexpr double kInfiniteDepth = std::numeric_limits<double>::infinity();

/// Depth f*b/d at valid pixels. Zero disparity maps to kInfiniteDepth,
/// invalid pixels to NaN.
Image<double> disparity_to_depth(const DisparityMap& map, const CameraRig& rig);

}  // namespace evstereo
