#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "evstereo/core.hpp"
#include "evstereo/cost.hpp"
#include "evstereo/eval.hpp"
#include "evstereo/io.hpp"
#include "evstereo/motion.hpp"
#include "evstereo/volume.hpp"

namespace evstereo {

struct PipelineConfig {
  DisparityConfig disparity;
  CostKind cost = CostKind::IoU;
  SyncMode sync = SyncMode::Sync;
  double noise_pct = 0.0;
  NoiseModel noise_model = NoiseModel::StdDev;
  std::uint64_t seed = 0;
  double alpha = 1.0;  // time-cost scale
  bool keep_volumes = false;
};

/// Everything a run needs: rectified event streams, calibration, velocity
/// samples and optional ground-truth disparity.
struct StereoDataset {
  CameraRig rig;
  EventBatch left;
  EventBatch right;
  std::vector<VelocitySample> velocity;
  std::optional<Image<double>> gt_disparity;
};

/// Raised when a pipeline stage fails; the message starts with the stage name.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : Error(stage + ": " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Consecutive non-overlapping batches of exactly n events; the trailing
/// partial batch is dropped.
std::vector<std::span<const Event>> batch_events(std::span<const Event> stream, int n);

/// Events of a time-sorted stream with t in [t_begin, t_end].
std::span<const Event> events_between(std::span<const Event> stream, double t_begin, double t_end);

/// Velocity record whose timestamp is nearest to t.
const Velocity& velocity_at(std::span<const VelocitySample> samples, double t);

struct BatchResult {
  std::size_t index = 0;
  std::size_t num_left = 0;
  std::size_t num_right = 0;
  double t_begin = 0.0;
  double t_ref = 0.0;
  Velocity velocity;  // after perturbation
  DisparityMap dense;  // winner-takes-all before outlier rejection
  DisparityMap map;    // after outlier rejection; has_events filled
  CostVolume costs;
  std::optional<EventDisparityVolume> left_volume;
  std::optional<EventDisparityVolume> right_volume;
  std::optional<DisparityMetrics> metrics;
  double seconds = 0.0;

  double events_per_second() const {
    return seconds > 0.0 ? static_cast<double>(num_left + num_right) / seconds : 0.0;
  }
};

/// Runs volume -> cost -> disparity on one left/right batch. The reference
/// time is the last left timestamp and is shared by both cameras.
BatchResult process_batch(std::span<const Event> left, std::span<const Event> right,
                          const Velocity& vel, const CameraRig& rig, const PipelineConfig& config);

/// Batches the left stream, pairs each batch with the right events of the same
/// time span, looks up and optionally perturbs the velocity, and processes the
/// batches in order. Each result is handed to `sink` as soon as it is ready.
void run(const StereoDataset& data, const PipelineConfig& config,
         const std::function<void(BatchResult&)>& sink);

/// Convenience wrapper collecting all batch results.
std::vector<BatchResult> run(const StereoDataset& data, const PipelineConfig& config);

struct OutputOptions {
  bool dump_volumes = false;
  bool dump_costs = false;
};

/// Writes batch_NNNNN_{dense,sparse}.pgm, batch_NNNNN_sparse.csv and the
/// optional dumps into `dir`.
void write_batch_outputs(const std::filesystem::path& dir, const BatchResult& result,
                         const OutputOptions& options);

/// Parameter echo in `key value` form.
void write_config_echo(std::ostream& os, const PipelineConfig& config);

}  // namespace evstereo
