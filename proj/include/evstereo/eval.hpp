#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "evstereo/core.hpp"

namespace evstereo {

struct StereoDataset;
struct PipelineConfig;

struct DisparityMetrics {
  double mean_disp_err = 0.0;   // px, over compared pixels
  double mean_depth_err = 0.0;  // m, over compared pixels with both disparities > 0
  double pct_within_1 = 0.0;    // |err| <= 1, percent of compared pixels
  double pct_within_1_strict = 0.0;   // |err| < 1, percent of compared pixels
  double pct_within_1_of_covered = 0.0;  // |err| <= 1, percent of covered pixels
  std::size_t n_compared = 0;  // valid, has_events and ground truth present
  std::size_t n_rejected = 0;  // has_events and ground truth present, but invalid
  std::size_t n_depth = 0;
};

/// Compares `est` with a real-valued ground-truth disparity map (NaN = no
/// ground truth) at pixels where events occurred. Throws if nothing is compared.
DisparityMetrics disparity_metrics(const DisparityMap& est, const Image<double>& gt,
                                   const CameraRig& rig);

/// Pools metrics of several batches, weighting each by its pixel counts.
DisparityMetrics merge_metrics(const std::vector<DisparityMetrics>& parts);

/// One configuration of the ablation grid.
struct AblationVariant {
  CostKind cost = CostKind::IoU;
  bool sync = true;
  double noise_pct = 0.0;
  int window = 24;
  std::uint64_t seed = 0;

  /// Short label such as "IoU-S" or "T-NS".
  std::string label() const;
};

struct AblationRow {
  AblationVariant variant;
  DisparityMetrics metrics;
};

/// Cartesian product of the given axes, in the order costs, sync modes,
/// noise levels, window sides.
std::vector<AblationVariant> ablation_grid(const std::vector<CostKind>& costs,
                                           const std::vector<bool>& sync_modes,
                                           const std::vector<double>& noise_pcts,
                                           const std::vector<int>& windows, std::uint64_t seed);

/// Runs the pipeline once per variant on `data` (which must carry ground
/// truth). Fields of `base` not covered by the variant are kept.
std::vector<AblationRow> ablation_runner(const StereoDataset& data, const PipelineConfig& base,
                                         const std::vector<AblationVariant>& variants);

inline constexpr const char* kMetricsCsvHeader =
    "variant,cost,sync,noise_pct,window,mean_disp_err,mean_depth_err,pct_within_1,n_compared,"
    "n_rejected";

void write_metrics_csv(std::ostream& os, const std::vector<AblationRow>& rows);

}  // namespace evstereo
