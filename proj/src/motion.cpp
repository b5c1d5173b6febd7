#include "evstereo/motion.hpp"

#include <cmath>
#include <random>

namespace evstereo {

double depth_from_disparity(double d, const CameraRig& rig) {
  if (!(d > 0.0)) throw Error("depth_from_disparity: disparity must be positive");
  return rig.f * rig.baseline / d;
}

FlowBasis flow_basis(double x, double y, const Velocity& vel, const CameraRig& rig) {
  const double xn = (x - rig.cx) / rig.f;
  const double yn = (y - rig.cy) / rig.f;
  const Eigen::Vector3d& v = vel.linear;
  const Eigen::Vector3d& w = vel.angular;

  FlowBasis basis;
  basis.rotational.x() = xn * yn * w.x() - (1.0 + xn * xn) * w.y() + yn * w.z();
  basis.rotational.y() = (1.0 + yn * yn) * w.x() - xn * yn * w.y() - xn * w.z();
  basis.rotational *= rig.f;

  // 1/Z(d) = d / (f b); the trailing f converts back to pixels.
  basis.per_disparity.x() = -v.x() + xn * v.z();
  basis.per_disparity.y() = -v.y() + yn * v.z();
  basis.per_disparity *= 1.0 / rig.baseline;
  return basis;
}

Eigen::Vector2d motion_field_flow(double x, double y, double d, const Velocity& vel,
                                  const CameraRig& rig) {
  if (d < 0.0) throw Error("motion_field_flow: disparity must be non-negative");
  return flow_basis(x, y, vel, rig).at(d);
}

Eigen::Vector2d time_shift(const Event& event, double d, double t_ref, const Velocity& vel,
                           const CameraRig& rig) {
  const Eigen::Vector2d flow = motion_field_flow(event.x, event.y, d, vel, rig);
  return Eigen::Vector2d(event.x, event.y) + flow * (t_ref - event.t);
}

Velocity perturb_velocity(const Velocity& vel, double pct, std::uint64_t seed,
                          NoiseModel model) {
  if (pct < 0.0) throw Error("perturb_velocity: pct must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  Velocity out = vel;
  auto sigma = [&](double norm) {
    return model == NoiseModel::StdDev ? pct * norm : std::sqrt(pct * norm);
  };
  const double sigma_v = sigma(vel.linear.norm());
  const double sigma_w = sigma(vel.angular.norm());
  // Draw all six samples regardless of sigma so the stream layout is fixed per seed.
  for (int i = 0; i < 3; ++i) out.linear[i] += sigma_v * unit(rng);
  for (int i = 0; i < 3; ++i) out.angular[i] += sigma_w * unit(rng);
  return out;
}

}  // namespace evstereo
