#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "evstereo/core.hpp"

namespace evstereo {

/// Depth in meters of a point observed at disparity `d` (pixels). Throws for d <= 0.
double depth_from_disparity(double d, const CameraRig& rig);

/// Image motion in pixels/second of a static point seen at pixel (x, y) whose
/// disparity is `d`, for a camera moving with `vel`. The motion field is
/// evaluated in normalized coordinates and rescaled by f. At d = 0 the point is
/// at infinity and only the rotational term remains.
Eigen::Vector2d motion_field_flow(double x, double y, double d, const Velocity& vel,
                                  const CameraRig& rig);

/// Flow at a fixed pixel split into its disparity-independent rotational part
/// and the translational part per unit disparity: flow(d) = rotational + d * per_disparity.
struct FlowBasis {
  Eigen::Vector2d rotational = Eigen::Vector2d::Zero();
  Eigen::Vector2d per_disparity = Eigen::Vector2d::Zero();

  Eigen::Vector2d at(double d) const { return rotational + d * per_disparity; }
};

FlowBasis flow_basis(double x, double y, const Velocity& vel, const CameraRig& rig);

/// Position the event would have had at time `t_ref`, assuming its flow stays
/// constant over the batch. Not rounded.
Eigen::Vector2d time_shift(const Event& event, double d, double t_ref, const Velocity& vel,
                           const CameraRig& rig);

/// How the noise percentage maps to the per-component spread.
enum class NoiseModel {
  StdDev,    // sigma = pct * |v|
  Variance,  // sigma^2 = pct * |v|
};

/// Adds zero-mean Gaussian noise to each velocity component, separately
/// scaled by the norm of the linear and of the angular part. Deterministic
/// for a given seed.
Velocity perturb_velocity(const Velocity& vel, double pct, std::uint64_t seed,
                          NoiseModel model = NoiseModel::StdDev);

}  // namespace evstereo
