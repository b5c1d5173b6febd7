#pragma once

#include <optional>
#include <span>
#include <utility>

#include "evstereo/core.hpp"

namespace evstereo {

/// Whether events are warped to the reference time before being binned.
enum class SyncMode { Sync, NoSync };

/// Reference time used when none is given: the last event's timestamp, or 0
/// for an empty batch.
double default_reference_time(std::span<const Event> events);

/// Left event disparity volume: slice d holds sign(sum of polarities) of the
/// events after warping each to t_ref with the flow implied by disparity d.
/// Warped positions are rounded half away from zero; events landing outside
/// the sensor are dropped from that slice only.
EventDisparityVolume build_left_volume(std::span<const Event> events, const Velocity& vel,
                                       const CameraRig& rig, const DisparityConfig& cfg,
                                       SyncMode sync, std::optional<double> t_ref = std::nullopt);

/// Right event disparity volume: as the left one, but slice d is translated by
/// +d columns so that I_L(x, y, d) and I_R(x, y, d) are matching candidates.
EventDisparityVolume build_right_volume(std::span<const Event> events, const Velocity& vel,
                                        const CameraRig& rig, const DisparityConfig& cfg,
                                        SyncMode sync, std::optional<double> t_ref = std::nullopt);

/// Last-event timestamp volumes (left, right) with the same binning rules.
/// Stored values are the original event timestamps.
std::pair<TimestampVolume, TimestampVolume> build_timestamp_volumes(
    std::span<const Event> left, std::span<const Event> right, const Velocity& vel,
    const CameraRig& rig, const DisparityConfig& cfg, SyncMode sync,
    std::optional<double> t_ref = std::nullopt);

/// True iff every voxel is -1, 0 or +1.
bool has_sign_domain(const EventDisparityVolume& volume);

}  // namespace evstereo
