#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Geometry>

#include "evstereo/core.hpp"

namespace testing {

using namespace evstereo;

inline CameraRig small_rig(int width = 40, int height = 30) {
  CameraRig rig;
  rig.f = 50.0;
  rig.cx = width / 2.0;
  rig.cy = height / 2.0;
  rig.width = width;
  rig.height = height;
  return rig;
}

inline CameraRig rig_f300() {
  CameraRig rig;
  rig.f = 300.0;
  rig.baseline = 0.1;
  return rig;
}

// Direct double loop over the truncated window anchored at (x, y).
inline std::vector<std::int32_t> brute_window_sum(const std::vector<std::int32_t>& field, int w,
                                                  int h, int side) {
  const int anchor = (side - 1) / 2;
  std::vector<std::int32_t> out(field.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int32_t s = 0;
      for (int v = y - anchor; v < y - anchor + side; ++v) {
        for (int u = x - anchor; u < x - anchor + side; ++u) {
          if (u >= 0 && v >= 0 && u < w && v < h) s += field[v * w + u];
        }
      }
      out[y * w + x] = s;
    }
  }
  return out;
}

inline EventDisparityVolume random_sign_volume(std::mt19937_64& rng, int w, int h, int d_min,
                                               int d_max, double density = 0.3) {
  EventDisparityVolume v{Volume<std::int8_t>(w, h, d_min, d_max, 0), 0.0};
  std::bernoulli_distribution hit(density), positive(0.5);
  for (auto& voxel : v.values.data()) {
    if (hit(rng)) voxel = positive(rng) ? 1 : -1;
  }
  return v;
}

inline Velocity random_velocity(std::mt19937_64& rng, double linear = 1.0, double angular = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Velocity vel;
  vel.linear = linear * Eigen::Vector3d(u(rng), u(rng), u(rng));
  vel.angular = angular * Eigen::Vector3d(u(rng), u(rng), u(rng));
  return vel;
}

// Camera-frame position of a static point after the camera moved for time s
// with body twist (v, w), to second order in s about s = 0. The even-order
// terms cancel in a central difference, so the derivative estimate at s = 0
// is exact to O(s^2).
inline Eigen::Vector3d moved_point(const Eigen::Vector3d& p, const Velocity& vel, double s) {
  const double angle = vel.angular.norm() * s;
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  if (angle != 0.0) r = Eigen::AngleAxisd(-angle, vel.angular.normalized()).toRotationMatrix();
  return r * p - s * vel.linear;
}

inline Eigen::Vector2d pinhole(const Eigen::Vector3d& p, const CameraRig& rig) {
  return {rig.f * p.x() / p.z() + rig.cx, rig.f * p.y() / p.z() + rig.cy};
}

// Central-difference image velocity of the static point seen at pixel (x, y)
// with disparity d.
inline Eigen::Vector2d finite_difference_flow(double x, double y, double d, const Velocity& vel,
                                              const CameraRig& rig, double step = 1e-5) {
  const double z = rig.f * rig.baseline / d;
  const Eigen::Vector3d p(z * (x - rig.cx) / rig.f, z * (y - rig.cy) / rig.f, z);
  const Eigen::Vector2d ahead = pinhole(moved_point(p, vel, step), rig);
  const Eigen::Vector2d behind = pinhole(moved_point(p, vel, -step), rig);
  return (ahead - behind) / (2.0 * step);
}

}  // namespace testing
