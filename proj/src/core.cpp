#include "evstereo/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evstereo {

namespace {

const char* kind_name(BatchError::Kind kind) {
  switch (kind) {
    case BatchError::Kind::OutOfBounds: return "out-of-bounds pixel";
    case BatchError::Kind::InvalidPolarity: return "invalid polarity";
    case BatchError::Kind::NonMonotone: return "non-monotone timestamp";
    case BatchError::Kind::NonFinite: return "non-finite timestamp";
  }
  return "invalid event";
}

std::string batch_message(BatchError::Kind kind, std::size_t index) {
  std::ostringstream os;
  os << kind_name(kind) << " at event " << index;
  return os.str();
}

}  // namespace

BatchError::BatchError(Kind kind, std::size_t index)
    : Error(batch_message(kind, index)), kind_(kind), index_(index) {}

void CameraRig::validate() const {
  if (!(f > 0.0) || !(baseline > 0.0) || width <= 0 || height <= 0) {
    throw Error("camera rig: f, baseline, width and height must be positive");
  }
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw Error("camera rig: principal point outside the sensor");
  }
}

void DisparityConfig::validate(const CameraRig& rig) const {
  if (d_min < 0 || d_min > d_max || d_max >= rig.width) {
    throw Error("disparity range must satisfy 0 <= d_min <= d_max < width");
  }
  if (window < 1 || window > std::min(rig.width, rig.height)) {
    throw Error("window side must lie in [1, min(width, height)]");
  }
  if (!(eps_c >= 0.0 && eps_c <= 1.0) || !(eps_n >= 0.0 && eps_n <= 1.0)) {
    throw Error("eps_c and eps_n must lie in [0, 1]");
  }
  if (num_events < 1) throw Error("num_events must be at least 1");
}

void validate_batch(std::span<const Event> events, const CameraRig& rig) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (!rig.contains(e.x, e.y)) throw BatchError(BatchError::Kind::OutOfBounds, i);
    if (e.p != 1 && e.p != -1) throw BatchError(BatchError::Kind::InvalidPolarity, i);
    if (!std::isfinite(e.t)) throw BatchError(BatchError::Kind::NonFinite, i);
    if (i > 0 && e.t < events[i - 1].t) throw BatchError(BatchError::Kind::NonMonotone, i);
  }
}

Image<std::uint8_t> event_mask(std::span<const Event> events, const CameraRig& rig) {
  Image<std::uint8_t> mask(rig.width, rig.height, 0);
  for (const Event& e : events) {
    if (rig.contains(e.x, e.y)) mask(e.x, e.y) = 1;
  }
  return mask;
}

std::string to_string(CostKind kind) {
  switch (kind) {
    case CostKind::IoU: return "iou";
    case CostKind::Intersection: return "intersection";
    case CostKind::Time: return "time";
  }
  return "unknown";
}

CostKind parse_cost_kind(const std::string& name) {
  if (name == "iou") return CostKind::IoU;
  if (name == "intersection") return CostKind::Intersection;
  if (name == "time") return CostKind::Time;
  throw Error("unknown cost '" + name + "' (expected iou, intersection or time)");
}

}  // namespace evstereo
