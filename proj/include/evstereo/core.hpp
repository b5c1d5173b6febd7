#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace evstereo {

/// Single polarity change reported by an event camera.
struct Event {
  double t = 0.0;  // seconds
  int x = 0;
  int y = 0;
  int p = 1;  // -1 or +1

  bool operator==(const Event&) const = default;
};

using EventBatch = std::vector<Event>;

/// Rectified stereo pair. Both cameras share intrinsics; the right camera sits
/// `baseline` meters along +x of the left one.
struct CameraRig {
  double f = 226.0;
  double cx = 173.0;
  double cy = 130.0;
  double baseline = 0.1;
  int width = 346;
  int height = 260;

  bool operator==(const CameraRig&) const = default;

  void validate() const;
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
};

/// Camera velocity expressed in the left camera frame.
struct Velocity {
  Eigen::Vector3d linear = Eigen::Vector3d::Zero();   // m/s
  Eigen::Vector3d angular = Eigen::Vector3d::Zero();  // rad/s

  bool is_finite() const { return linear.allFinite() && angular.allFinite(); }
  bool operator==(const Velocity& o) const { return linear == o.linear && angular == o.angular; }
};

struct DisparityConfig {
  int d_min = 0;
  int d_max = 31;
  int window = 24;
  double eps_c = 0.1;
  double eps_n = 0.1;
  int num_events = 15000;

  int num_disparities() const { return d_max - d_min + 1; }
  void validate(const CameraRig& rig) const;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by validate_batch. `index` is the position of the first offending event.
class BatchError : public Error {
 public:
  enum class Kind { OutOfBounds, InvalidPolarity, NonMonotone, NonFinite };

  BatchError(Kind kind, std::size_t index);

  Kind kind() const { return kind_; }
  std::size_t index() const { return index_; }

 private:
  Kind kind_;
  std::size_t index_;
};

/// Dense row-major 2-D array.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Dense 3-D array over (x, y, d) stored in (d, y, x) order; `d` is the actual
/// disparity value in [d_min, d_max].
template <typename T>
class Volume {
 public:
  Volume() = default;
  Volume(int width, int height, int d_min, int d_max, T fill = T{})
      : width_(width),
        height_(height),
        d_min_(d_min),
        d_max_(d_max),
        data_(static_cast<std::size_t>(width) * height * (d_max - d_min + 1), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  int d_min() const { return d_min_; }
  int d_max() const { return d_max_; }
  int num_disparities() const { return d_max_ - d_min_ + 1; }
  std::size_t slice_size() const { return static_cast<std::size_t>(width_) * height_; }

  T& operator()(int x, int y, int d) { return data_[index(x, y, d)]; }
  const T& operator()(int x, int y, int d) const { return data_[index(x, y, d)]; }

  std::span<T> slice(int d) { return std::span<T>(data_).subspan((d - d_min_) * slice_size(), slice_size()); }
  std::span<const T> slice(int d) const {
    return std::span<const T>(data_).subspan((d - d_min_) * slice_size(), slice_size());
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  bool same_shape(int width, int height, int d_min, int d_max) const {
    return width_ == width && height_ == height && d_min_ == d_min && d_max_ == d_max;
  }
  template <typename U>
  bool same_shape(const Volume<U>& o) const {
    return same_shape(o.width(), o.height(), o.d_min(), o.d_max());
  }

  bool operator==(const Volume&) const = default;

 private:
  std::size_t index(int x, int y, int d) const {
    return (static_cast<std::size_t>(d - d_min_) * height_ + y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  int d_min_ = 0;
  int d_max_ = -1;
  std::vector<T> data_;
};

/// Signed event images, one per candidate disparity; voxels hold -1, 0 or +1.
struct EventDisparityVolume {
  Volume<std::int8_t> values;
  double t_ref = 0.0;

  bool operator==(const EventDisparityVolume&) const = default;
};

inline constexpr double kNoTimestamp = -std::numeric_limits<double>::infinity();

/// Latest original timestamp landing in each voxel, kNoTimestamp where empty.
struct TimestampVolume {
  Volume<double> values;
  double t_ref = 0.0;
};

enum class CostKind { IoU, Intersection, Time };

inline constexpr float kUndefinedCost = std::numeric_limits<float>::infinity();

/// Window-summed union and intersection counts plus the cost that the
/// winner-takes-all step minimizes. Voxels with an empty union carry
/// kUndefinedCost.
struct CostVolume {
  CostKind kind = CostKind::IoU;
  Volume<std::int32_t> c_i;
  Volume<std::int32_t> c_u;
  Volume<float> cost;
  int window = 0;
};

struct DisparityMap {
  Image<std::int32_t> d_hat;
  Image<std::uint8_t> valid;
  Image<std::uint8_t> has_events;
  int d_min = 0;
  int d_max = 0;

  int width() const { return d_hat.width(); }
  int height() const { return d_hat.height(); }
  /// Pixels that make it into the sparse output.
  bool reported(int x, int y) const { return valid(x, y) && has_events(x, y); }
};

/// Checks every event against the rig and the batch ordering rules.
/// Throws BatchError naming the first offending index.
void validate_batch(std::span<const Event> events, const CameraRig& rig);

/// Mask of pixels hit by at least one raw event.
Image<std::uint8_t> event_mask(std::span<const Event> events, const CameraRig& rig);

std::string to_string(CostKind kind);
CostKind parse_cost_kind(const std::string& name);

}  // namespace evstereo
