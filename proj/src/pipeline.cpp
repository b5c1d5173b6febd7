#include "evstereo/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "evstereo/disparity.hpp"
#include "evstereo/motion.hpp"

namespace evstereo {

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::string batch_name(std::size_t index, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "batch_%05zu_%s", index, suffix);
  return buf;
}

}  // namespace

std::vector<std::span<const Event>> batch_events(std::span<const Event> stream, int n) {
  if (n < 1) throw Error("batch_events: batch size must be at least 1");
  std::vector<std::span<const Event>> batches;
  const std::size_t size = static_cast<std::size_t>(n);
  for (std::size_t begin = 0; begin + size <= stream.size(); begin += size) {
    batches.push_back(stream.subspan(begin, size));
  }
  return batches;
}

std::span<const Event> events_between(std::span<const Event> stream, double t_begin,
                                      double t_end) {
  const auto lo = std::lower_bound(stream.begin(), stream.end(), t_begin,
                                   [](const Event& e, double t) { return e.t < t; });
  const auto hi = std::upper_bound(lo, stream.end(), t_end,
                                   [](double t, const Event& e) { return t < e.t; });
  return stream.subspan(static_cast<std::size_t>(lo - stream.begin()),
                        static_cast<std::size_t>(hi - lo));
}

const Velocity& velocity_at(std::span<const VelocitySample> samples, double t) {
  if (samples.empty()) throw Error("velocity: no samples");
  const VelocitySample* best = &samples.front();
  for (const VelocitySample& s : samples) {
    if (std::abs(s.t - t) < std::abs(best->t - t)) best = &s;
  }
  return best->vel;
}

BatchResult process_batch(std::span<const Event> left, std::span<const Event> right,
                          const Velocity& vel, const CameraRig& rig, const PipelineConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const DisparityConfig& cfg = config.disparity;
  stage("config", [&] {
    rig.validate();
    cfg.validate(rig);
    if (!vel.is_finite()) throw Error("velocity is not finite");
    return 0;
  });
  stage("input", [&] {
    validate_batch(left, rig);
    validate_batch(right, rig);
    return 0;
  });

  BatchResult result;
  result.num_left = left.size();
  result.num_right = right.size();
  result.velocity = vel;
  result.t_begin = left.empty() ? 0.0 : left.front().t;
  result.t_ref = default_reference_time(left);

  auto lv = stage("volume", [&] {
    return build_left_volume(left, vel, rig, cfg, config.sync, result.t_ref);
  });
  auto rv = stage("volume", [&] {
    return build_right_volume(right, vel, rig, cfg, config.sync, result.t_ref);
  });

  const WindowSpec window{cfg.window};
  result.costs = stage("cost", [&] {
    switch (config.cost) {
      case CostKind::IoU:
        return iou_cost_volume(lv, rv, window);
      case CostKind::Intersection:
        return intersection_cost_volume(lv, rv, window);
      case CostKind::Time: {
        CostVolume costs = iou_cost_volume(lv, rv, window);
        const auto [lt, rt] =
            build_timestamp_volumes(left, right, vel, rig, cfg, config.sync, result.t_ref);
        costs.cost = timestamp_cost_volume(lt, rt, costs.c_u, window, config.alpha);
        costs.kind = CostKind::Time;
        return costs;
      }
    }
    throw Error("unknown cost kind");
  });

  stage("disparity", [&] {
    result.dense = winner_takes_all(result.costs);
    result.dense.has_events = event_mask(left, rig);
    result.map = reject_outliers(result.dense, result.costs, cfg, window);
    return 0;
  });

  if (config.keep_volumes) {
    result.left_volume = std::move(lv);
    result.right_volume = std::move(rv);
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void run(const StereoDataset& data, const PipelineConfig& config,
         const std::function<void(BatchResult&)>& sink) {
  const auto batches = batch_events(data.left, config.disparity.num_events);
  for (std::size_t i = 0; i < batches.size(); ++i) {
    const auto left = batches[i];
    const double t_begin = left.front().t;
    const double t_ref = left.back().t;
    const auto right = events_between(data.right, t_begin, t_ref);

    Velocity vel = stage("velocity", [&] { return velocity_at(data.velocity, t_ref); });
    if (config.noise_pct > 0.0) {
      vel = perturb_velocity(vel, config.noise_pct, config.seed + i, config.noise_model);
    }

    BatchResult result = process_batch(left, right, vel, data.rig, config);
    result.index = i;
    if (data.gt_disparity) {
      result.metrics = stage("eval", [&] {
        return disparity_metrics(result.map, *data.gt_disparity, data.rig);
      });
    }
    sink(result);
  }
}

std::vector<BatchResult> run(const StereoDataset& data, const PipelineConfig& config) {
  std::vector<BatchResult> results;
  run(data, config, [&](BatchResult& r) { results.push_back(std::move(r)); });
  return results;
}

void write_batch_outputs(const std::filesystem::path& dir, const BatchResult& result,
                         const OutputOptions& options) {
  std::filesystem::create_directories(dir);
  write_disparity_pgm(dir / batch_name(result.index, "dense.pgm"), result.map, false);
  write_disparity_pgm(dir / batch_name(result.index, "sparse.pgm"), result.map, true);
  {
    std::ofstream os(dir / batch_name(result.index, "sparse.csv"));
    if (!os) throw Error("cannot write into " + dir.string());
    write_sparse_csv(os, result.map, result.costs);
  }
  if (options.dump_volumes && result.left_volume && result.right_volume) {
    std::ofstream l(dir / batch_name(result.index, "left_volume.bin"), std::ios::binary);
    write_volume_dump(l, *result.left_volume);
    std::ofstream r(dir / batch_name(result.index, "right_volume.bin"), std::ios::binary);
    write_volume_dump(r, *result.right_volume);
  }
  if (options.dump_costs) {
    std::ofstream c(dir / batch_name(result.index, "cost.bin"), std::ios::binary);
    write_cost_dump(c, result.costs.cost);
  }
}

void write_config_echo(std::ostream& os, const PipelineConfig& config) {
  const DisparityConfig& d = config.disparity;
  os << "min_disparity " << d.d_min << '\n'
     << "max_disparity " << d.d_max << '\n'
     << "window " << d.window << '\n'
     << "eps_c " << d.eps_c << '\n'
     << "eps_n " << d.eps_n << '\n'
     << "num_events " << d.num_events << '\n'
     << "cost " << to_string(config.cost) << '\n'
     << "sync " << (config.sync == SyncMode::Sync ? "on" : "off") << '\n'
     << "noise_pct " << config.noise_pct << '\n'
     << "noise_model " << (config.noise_model == NoiseModel::StdDev ? "std" : "variance") << '\n'
     << "seed " << config.seed << '\n'
     << "alpha " << config.alpha << '\n';
}

}  // namespace evstereo
