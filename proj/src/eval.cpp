#include "evstereo/eval.hpp"

#include <cmath>
#include <ostream>

#include "evstereo/pipeline.hpp"

namespace evstereo {

DisparityMetrics disparity_metrics(const DisparityMap& est, const Image<double>& gt,
                                   const CameraRig& rig) {
  if (est.width() != gt.width() || est.height() != gt.height()) {
    throw Error("metrics: estimate and ground truth differ in size");
  }
  DisparityMetrics m;
  double disp_sum = 0.0;
  double depth_sum = 0.0;
  std::size_t within = 0;
  std::size_t within_strict = 0;
  for (int y = 0; y < est.height(); ++y) {
    for (int x = 0; x < est.width(); ++x) {
      const double truth = gt(x, y);
      if (!est.has_events(x, y) || !std::isfinite(truth)) continue;
      if (!est.valid(x, y)) {
        ++m.n_rejected;
        continue;
      }
      const double d = est.d_hat(x, y);
      const double err = std::abs(d - truth);
      ++m.n_compared;
      disp_sum += err;
      if (err <= 1.0) ++within;
      if (err < 1.0) ++within_strict;
      if (d > 0.0 && truth > 0.0) {
        const double fb = rig.f * rig.baseline;
        depth_sum += std::abs(fb / d - fb / truth);
        ++m.n_depth;
      }
    }
  }
  if (m.n_compared == 0) throw Error("metrics: no pixels to compare");
  const double n = static_cast<double>(m.n_compared);
  m.mean_disp_err = disp_sum / n;
  m.mean_depth_err = m.n_depth > 0 ? depth_sum / m.n_depth : 0.0;
  m.pct_within_1 = 100.0 * within / n;
  m.pct_within_1_strict = 100.0 * within_strict / n;
  m.pct_within_1_of_covered = 100.0 * within / static_cast<double>(m.n_compared + m.n_rejected);
  return m;
}

DisparityMetrics merge_metrics(const std::vector<DisparityMetrics>& parts) {
  DisparityMetrics out;
  double disp = 0.0, depth = 0.0, within = 0.0, strict = 0.0;
  for (const DisparityMetrics& m : parts) {
    const double n = static_cast<double>(m.n_compared);
    disp += m.mean_disp_err * n;
    within += m.pct_within_1 * n;
    strict += m.pct_within_1_strict * n;
    depth += m.mean_depth_err * static_cast<double>(m.n_depth);
    out.n_compared += m.n_compared;
    out.n_rejected += m.n_rejected;
    out.n_depth += m.n_depth;
  }
  if (out.n_compared == 0) throw Error("metrics: no pixels to compare");
  const double n = static_cast<double>(out.n_compared);
  out.mean_disp_err = disp / n;
  out.pct_within_1 = within / n;
  out.pct_within_1_strict = strict / n;
  out.mean_depth_err = out.n_depth > 0 ? depth / out.n_depth : 0.0;
  out.pct_within_1_of_covered = within / static_cast<double>(out.n_compared + out.n_rejected);
  return out;
}

std::string AblationVariant::label() const {
  const char* prefix = cost == CostKind::IoU ? "IoU" : cost == CostKind::Intersection ? "I" : "T";
  return std::string(prefix) + (sync ? "-S" : "-NS");
}

std::vector<AblationVariant> ablation_grid(const std::vector<CostKind>& costs,
                                           const std::vector<bool>& sync_modes,
                                           const std::vector<double>& noise_pcts,
                                           const std::vector<int>& windows, std::uint64_t seed) {
  std::vector<AblationVariant> out;
  for (CostKind cost : costs) {
    for (bool sync : sync_modes) {
      for (double noise : noise_pcts) {
        for (int window : windows) out.push_back({cost, sync, noise, window, seed});
      }
    }
  }
  return out;
}

std::vector<AblationRow> ablation_runner(const StereoDataset& data, const PipelineConfig& base,
                                         const std::vector<AblationVariant>& variants) {
  if (!data.gt_disparity) throw Error("ablation: dataset has no ground truth");
  std::vector<AblationRow> rows;
  rows.reserve(variants.size());
  for (const AblationVariant& v : variants) {
    PipelineConfig config = base;
    config.cost = v.cost;
    config.sync = v.sync ? SyncMode::Sync : SyncMode::NoSync;
    config.noise_pct = v.noise_pct;
    config.disparity.window = v.window;
    config.seed = v.seed;
    config.keep_volumes = false;

    std::vector<DisparityMetrics> parts;
    run(data, config, [&](BatchResult& r) {
      if (r.metrics) parts.push_back(*r.metrics);
    });
    rows.push_back({v, merge_metrics(parts)});
  }
  return rows;
}

void write_metrics_csv(std::ostream& os, const std::vector<AblationRow>& rows) {
  os << kMetricsCsvHeader << '\n';
  const auto old_precision = os.precision(10);
  for (const AblationRow& row : rows) {
    const AblationVariant& v = row.variant;
    const DisparityMetrics& m = row.metrics;
    os << v.label() << ',' << to_string(v.cost) << ',' << (v.sync ? 1 : 0) << ',' << v.noise_pct
       << ',' << v.window << ',' << m.mean_disp_err << ',' << m.mean_depth_err << ','
       << m.pct_within_1 << ',' << m.n_compared << ',' << m.n_rejected << '\n';
  }
  os.precision(old_precision);
}

}  // namespace evstereo
