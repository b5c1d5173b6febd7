#include "evstereo/volume.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "evstereo/motion.hpp"

namespace evstereo {

namespace {

// Per-event warp terms, premultiplied by (t_ref - t): the warped position at
// disparity d is origin + offset + d * offset_per_disparity.
struct Warp {
  double x, y;
  double ox, oy;
  double px, py;
};

std::vector<Warp> prepare_warps(std::span<const Event> events, const Velocity& vel,
                                const CameraRig& rig, SyncMode sync, double t_ref) {
  std::vector<Warp> warps;
  warps.reserve(events.size());
  for (const Event& e : events) {
    Warp w{static_cast<double>(e.x), static_cast<double>(e.y), 0.0, 0.0, 0.0, 0.0};
    if (sync == SyncMode::Sync) {
      const FlowBasis basis = flow_basis(e.x, e.y, vel, rig);
      const double dt = t_ref - e.t;
      w.ox = basis.rotational.x() * dt;
      w.oy = basis.rotational.y() * dt;
      w.px = basis.per_disparity.x() * dt;
      w.py = basis.per_disparity.y() * dt;
    }
    warps.push_back(w);
  }
  return warps;
}

// Calls visit(event_index, voxel_index_in_slice) for every event that lands
// inside the sensor at disparity d. `column_shift` is 0 for the left camera
// and d for the right one.
template <typename Visit>
void for_each_binned(const std::vector<Warp>& warps, const CameraRig& rig, int d,
                     int column_shift, Visit&& visit) {
  for (std::size_t i = 0; i < warps.size(); ++i) {
    const Warp& w = warps[i];
    const double xs = w.x + w.ox + d * w.px;
    const double ys = w.y + w.oy + d * w.py;
    // std::round rounds halfway cases away from zero.
    const double xr = std::round(xs) + column_shift;
    const double yr = std::round(ys);
    if (!(xr >= 0.0 && xr < rig.width && yr >= 0.0 && yr < rig.height)) continue;
    visit(i, static_cast<std::size_t>(yr) * rig.width + static_cast<std::size_t>(xr));
  }
}

EventDisparityVolume build_volume(std::span<const Event> events, const Velocity& vel,
                                  const CameraRig& rig, const DisparityConfig& cfg,
                                  SyncMode sync, std::optional<double> t_ref, bool right) {
  EventDisparityVolume out;
  out.t_ref = t_ref.value_or(default_reference_time(events));
  out.values = Volume<std::int8_t>(rig.width, rig.height, cfg.d_min, cfg.d_max, 0);

  const std::vector<Warp> warps = prepare_warps(events, vel, rig, sync, out.t_ref);
  std::vector<std::int32_t> sums(out.values.slice_size());
  for (int d = cfg.d_min; d <= cfg.d_max; ++d) {
    std::fill(sums.begin(), sums.end(), 0);
    for_each_binned(warps, rig, d, right ? d : 0,
                    [&](std::size_t i, std::size_t voxel) { sums[voxel] += events[i].p; });
    auto slice = out.values.slice(d);
    for (std::size_t k = 0; k < sums.size(); ++k) {
      slice[k] = static_cast<std::int8_t>((sums[k] > 0) - (sums[k] < 0));
    }
  }
  return out;
}

TimestampVolume build_timestamps(std::span<const Event> events, const Velocity& vel,
                                 const CameraRig& rig, const DisparityConfig& cfg,
                                 SyncMode sync, double t_ref, bool right) {
  TimestampVolume out;
  out.t_ref = t_ref;
  out.values = Volume<double>(rig.width, rig.height, cfg.d_min, cfg.d_max, kNoTimestamp);
  const std::vector<Warp> warps = prepare_warps(events, vel, rig, sync, t_ref);
  for (int d = cfg.d_min; d <= cfg.d_max; ++d) {
    auto slice = out.values.slice(d);
    for_each_binned(warps, rig, d, right ? d : 0, [&](std::size_t i, std::size_t voxel) {
      slice[voxel] = std::max(slice[voxel], events[i].t);
    });
  }
  return out;
}

}  // namespace

double default_reference_time(std::span<const Event> events) {
  return events.empty() ? 0.0 : events.back().t;
}

EventDisparityVolume build_left_volume(std::span<const Event> events, const Velocity& vel,
                                       const CameraRig& rig, const DisparityConfig& cfg,
                                       SyncMode sync, std::optional<double> t_ref) {
  return build_volume(events, vel, rig, cfg, sync, t_ref, false);
}

EventDisparityVolume build_right_volume(std::span<const Event> events, const Velocity& vel,
                                        const CameraRig& rig, const DisparityConfig& cfg,
                                        SyncMode sync, std::optional<double> t_ref) {
  return build_volume(events, vel, rig, cfg, sync, t_ref, true);
}

std::pair<TimestampVolume, TimestampVolume> build_timestamp_volumes(
    std::span<const Event> left, std::span<const Event> right, const Velocity& vel,
    const CameraRig& rig, const DisparityConfig& cfg, SyncMode sync,
    std::optional<double> t_ref) {
  const double ref = t_ref.value_or(default_reference_time(left));
  return {build_timestamps(left, vel, rig, cfg, sync, ref, false),
          build_timestamps(right, vel, rig, cfg, sync, ref, true)};
}

bool has_sign_domain(const EventDisparityVolume& volume) {
  return std::all_of(volume.values.data().begin(), volume.values.data().end(),
                     [](std::int8_t v) { return v >= -1 && v <= 1; });
}

}  // namespace evstereo
