#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "evstereo/core.hpp"

namespace evstereo {

struct VelocitySample {
  double t = 0.0;
  Velocity vel;
};

// Event text: one `t x y p` record per line, `#` starts a comment line.
// Polarity 0 is read as -1.
EventBatch read_events(std::istream& is);
EventBatch read_events(const std::filesystem::path& path);
void write_events(std::ostream& os, std::span<const Event> events);
void write_events(const std::filesystem::path& path, std::span<const Event> events);

// Calibration: `key value` lines with keys f, cx, cy, baseline, width, height.
// `key: value` and `key = value` are accepted as well.
CameraRig read_calibration(std::istream& is);
CameraRig read_calibration(const std::filesystem::path& path);
void write_calibration(std::ostream& os, const CameraRig& rig);
void write_calibration(const std::filesystem::path& path, const CameraRig& rig);

// Velocity: `t vx vy vz wx wy wz` per line.
std::vector<VelocitySample> read_velocity(std::istream& is);
std::vector<VelocitySample> read_velocity(const std::filesystem::path& path);
void write_velocity(std::ostream& os, std::span<const VelocitySample> samples);
void write_velocity(const std::filesystem::path& path, std::span<const VelocitySample> samples);

inline constexpr std::uint16_t kInvalidDisparity = 65535;

/// Binary 16-bit PGM (P5, maxval 65535, big-endian samples). Disparity maps
/// store the integer disparity, kInvalidDisparity where invalid.
void write_pgm16(std::ostream& os, const Image<std::uint16_t>& image,
                 const std::string& comment = {});
Image<std::uint16_t> read_pgm16(std::istream& is, double* scale = nullptr);

void write_disparity_pgm(const std::filesystem::path& path, const DisparityMap& map,
                         bool sparse);

/// Ground-truth disparity as 16-bit PGM holding round(d * 256) with a
/// `# disparity_scale 256` header comment; NaN pixels become kInvalidDisparity.
void write_ground_truth_pgm(const std::filesystem::path& path, const Image<double>& disparity);
/// Reads a disparity PGM; honours a `disparity_scale` comment (default 1).
Image<double> read_ground_truth_pgm(const std::filesystem::path& path);

/// Sparse output rows `x,y,d,cost_ratio` for reported pixels.
void write_sparse_csv(std::ostream& os, const DisparityMap& map, const CostVolume& costs);

/// Volume dump: text header `width height num_disparities d_min t_ref\n`, then
/// int8 voxels in (d, y, x) order.
void write_volume_dump(std::ostream& os, const EventDisparityVolume& volume);
EventDisparityVolume read_volume_dump(std::istream& is);

/// Cost dump: text header `width height num_disparities d_min\n`, then
/// little-endian float32 voxels in (d, y, x) order; undefined = +inf.
void write_cost_dump(std::ostream& os, const Volume<float>& cost);
Volume<float> read_cost_dump(std::istream& is);

}  // namespace evstereo
