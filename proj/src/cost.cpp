#include "evstereo/cost.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace evstereo {

namespace {

// Running box sum along one axis with truncated borders. `stride` steps
// between consecutive samples of a line, `line_stride` between lines.
template <typename T>
void box_pass(std::span<const T> in, std::span<T> out, int length, int lines, std::size_t stride,
              std::size_t line_stride, int side, int anchor, std::vector<T>& prefix) {
  prefix.assign(static_cast<std::size_t>(length) + 1, T{});
  for (int line = 0; line < lines; ++line) {
    const std::size_t base = line * line_stride;
    for (int i = 0; i < length; ++i) prefix[i + 1] = prefix[i] + in[base + i * stride];
    for (int i = 0; i < length; ++i) {
      const int lo = std::max(i - anchor, 0);
      const int hi = std::min(i - anchor + side, length);
      out[base + i * stride] = prefix[hi] - prefix[lo];
    }
  }
}

template <typename T>
std::vector<T> separable_box(std::span<const T> field, int width, int height,
                             const WindowSpec& spec) {
  std::vector<T> rows(field.size());
  std::vector<T> out(field.size());
  std::vector<T> prefix;
  box_pass<T>(field, rows, width, height, 1, width, spec.side, spec.anchor(), prefix);
  box_pass<T>(rows, out, height, width, width, 1, spec.side, spec.anchor(), prefix);
  return out;
}

void check_pair(const EventDisparityVolume& left, const EventDisparityVolume& right) {
  if (!left.values.same_shape(right.values)) {
    throw Error("cost volume: left and right volumes differ in shape or disparity range");
  }
}

// Fills c_u and c_i from the two sign volumes.
CostVolume union_and_intersection(const EventDisparityVolume& left,
                                  const EventDisparityVolume& right, const WindowSpec& spec) {
  check_pair(left, right);
  const auto& l = left.values;
  spec.validate(l.width(), l.height());

  CostVolume out;
  out.window = spec.side;
  out.c_u = Volume<std::int32_t>(l.width(), l.height(), l.d_min(), l.d_max());
  out.c_i = Volume<std::int32_t>(l.width(), l.height(), l.d_min(), l.d_max());
  out.cost = Volume<float>(l.width(), l.height(), l.d_min(), l.d_max(), kUndefinedCost);

  std::vector<std::int32_t> u(l.slice_size());
  std::vector<std::int32_t> inter(l.slice_size());
  for (int d = l.d_min(); d <= l.d_max(); ++d) {
    auto ls = l.slice(d);
    auto rs = right.values.slice(d);
    for (std::size_t k = 0; k < ls.size(); ++k) {
      u[k] = pixel_union(ls[k], rs[k]);
      inter[k] = pixel_intersection(ls[k], rs[k]);
    }
    const auto su = window_sum(u, l.width(), l.height(), spec);
    const auto si = window_sum(inter, l.width(), l.height(), spec);
    std::copy(su.begin(), su.end(), out.c_u.slice(d).begin());
    std::copy(si.begin(), si.end(), out.c_i.slice(d).begin());
  }
  return out;
}

}  // namespace

int WindowSpec::in_bounds_count(int x, int y, int width, int height) const {
  const int a = anchor();
  const int cols = std::min(x - a + side, width) - std::max(x - a, 0);
  const int rows = std::min(y - a + side, height) - std::max(y - a, 0);
  return std::max(cols, 0) * std::max(rows, 0);
}

void WindowSpec::validate(int width, int height) const {
  if (side < 1 || side > std::min(width, height)) {
    throw Error("window side must lie in [1, min(width, height)]");
  }
}

std::vector<std::int32_t> window_sum(std::span<const std::int32_t> field, int width, int height,
                                     const WindowSpec& spec) {
  if (field.size() != static_cast<std::size_t>(width) * height) {
    throw Error("window_sum: field size does not match dimensions");
  }
  spec.validate(width, height);
  return separable_box<std::int32_t>(field, width, height, spec);
}

Image<std::int32_t> window_sum(const Image<std::int32_t>& field, const WindowSpec& spec) {
  Image<std::int32_t> out(field.width(), field.height());
  const auto sums = window_sum(field.data(), field.width(), field.height(), spec);
  std::copy(sums.begin(), sums.end(), out.data().begin());
  return out;
}

CostVolume iou_cost_volume(const EventDisparityVolume& left, const EventDisparityVolume& right,
                           const WindowSpec& spec) {
  CostVolume out = union_and_intersection(left, right, spec);
  out.kind = CostKind::IoU;
  auto cu = out.c_u.data();
  auto ci = out.c_i.data();
  auto cost = out.cost.data();
  for (std::size_t k = 0; k < cost.size(); ++k) {
    if (cu[k] > 0) cost[k] = -static_cast<float>(static_cast<double>(ci[k]) / cu[k]);
  }
  return out;
}

CostVolume intersection_cost_volume(const EventDisparityVolume& left,
                                    const EventDisparityVolume& right, const WindowSpec& spec) {
  CostVolume out = union_and_intersection(left, right, spec);
  out.kind = CostKind::Intersection;
  auto cu = out.c_u.data();
  auto ci = out.c_i.data();
  auto cost = out.cost.data();
  for (std::size_t k = 0; k < cost.size(); ++k) {
    if (cu[k] > 0) cost[k] = -static_cast<float>(ci[k]);
  }
  return out;
}

Volume<float> timestamp_cost_volume(const TimestampVolume& left_t, const TimestampVolume& right_t,
                                    const Volume<std::int32_t>& c_u, const WindowSpec& spec,
                                    double alpha) {
  const auto& l = left_t.values;
  if (!l.same_shape(right_t.values) || !l.same_shape(c_u)) {
    throw Error("timestamp cost: volumes differ in shape or disparity range");
  }
  spec.validate(l.width(), l.height());

  Volume<float> out(l.width(), l.height(), l.d_min(), l.d_max(), kUndefinedCost);
  std::vector<double> term(l.slice_size());
  for (int d = l.d_min(); d <= l.d_max(); ++d) {
    auto ls = l.slice(d);
    auto rs = right_t.values.slice(d);
    auto us = c_u.slice(d);
    for (std::size_t k = 0; k < term.size(); ++k) {
      const bool both = ls[k] != kNoTimestamp && rs[k] != kNoTimestamp;
      term[k] = (both && us[k] > 0)
                    ? 1.0 / ((alpha * std::abs(ls[k] - rs[k]) + 1.0) * us[k])
                    : 0.0;
    }
    const auto sums = separable_box<double>(term, l.width(), l.height(), spec);
    auto os = out.slice(d);
    for (std::size_t k = 0; k < sums.size(); ++k) {
      if (us[k] > 0) os[k] = -static_cast<float>(sums[k]);
    }
  }
  return out;
}

}  // namespace evstereo
