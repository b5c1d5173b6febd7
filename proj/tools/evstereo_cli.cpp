// evstereo: time-synchronized event stereo from the command line.
//
//   evstereo run    --events-left L --events-right R --calib C --velocity V --out DIR
//   evstereo synth  --out DIR [--seed N]
//   evstereo ablate (--scene-seed N | file inputs + --gt) --out metrics.csv
//   evstereo bench  [--scene-seed N] [--num-events 15000] [--repeat 5]

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "evstereo/io.hpp"
#include "evstereo/pipeline.hpp"
#include "evstereo/synth.hpp"

namespace fs = std::filesystem;
using namespace evstereo;

namespace {

struct Inputs {
  std::string events_left;
  std::string events_right;
  std::string calib;
  std::string velocity;
  std::string gt;
};

struct Params {
  PipelineConfig config;
  std::string cost = "iou";
  std::string noise_model = "std";
  bool no_sync = false;
};

void add_inputs(CLI::App* app, Inputs& in, bool required) {
  auto* l = app->add_option("--events-left", in.events_left, "Left event file (t x y p)");
  auto* r = app->add_option("--events-right", in.events_right, "Right event file (t x y p)");
  auto* c = app->add_option("--calib", in.calib, "Calibration file");
  auto* v = app->add_option("--velocity", in.velocity, "Velocity file (t vx vy vz wx wy wz)");
  app->add_option("--gt", in.gt, "Ground-truth disparity PGM");
  if (required) {
    for (auto* opt : {l, r, c, v}) opt->required()->check(CLI::ExistingFile);
  }
}

void add_params(CLI::App* app, Params& p) {
  DisparityConfig& d = p.config.disparity;
  app->add_option("--max-disparity", d.d_max, "Largest disparity searched")->capture_default_str();
  app->add_option("--min-disparity", d.d_min, "Smallest disparity searched")->capture_default_str();
  app->add_option("--window", d.window, "Matching window side in pixels")->capture_default_str();
  app->add_option("--eps-c", d.eps_c, "Minimum match ratio C_I/C_U")->capture_default_str();
  app->add_option("--eps-n", d.eps_n, "Minimum union support as a fraction of the window")
      ->capture_default_str();
  app->add_option("--num-events", d.num_events, "Events per batch")->capture_default_str();
  app->add_option("--cost", p.cost, "Matching cost")
      ->check(CLI::IsMember({"iou", "intersection", "time"}))
      ->capture_default_str();
  app->add_flag("--no-sync", p.no_sync, "Bin raw event positions without time synchronization");
  app->add_option("--noise-pct", p.config.noise_pct, "Velocity noise level")
      ->capture_default_str();
  app->add_option("--noise-model", p.noise_model, "std: sigma = pct*|v|; variance: sigma^2 = pct*|v|")
      ->check(CLI::IsMember({"std", "variance"}))
      ->capture_default_str();
  app->add_option("--seed", p.config.seed, "Seed for velocity noise")->capture_default_str();
  app->add_option("--alpha", p.config.alpha, "Time-cost scale")->capture_default_str();
}

void finalize(Params& p) {
  p.config.cost = parse_cost_kind(p.cost);
  p.config.sync = p.no_sync ? SyncMode::NoSync : SyncMode::Sync;
  p.config.noise_model = p.noise_model == "std" ? NoiseModel::StdDev : NoiseModel::Variance;
}

StereoDataset load_dataset(const Inputs& in) {
  StereoDataset data;
  data.rig = read_calibration(in.calib);
  data.left = read_events(in.events_left);
  data.right = read_events(in.events_right);
  data.velocity = read_velocity(in.velocity);
  validate_batch(data.left, data.rig);
  validate_batch(data.right, data.rig);
  if (!in.gt.empty()) data.gt_disparity = read_ground_truth_pgm(in.gt);
  return data;
}

StereoDataset synthetic_dataset(std::uint64_t seed, const CameraRig& rig, int num_events) {
  RandomSceneOptions options;
  options.target_events = num_events;
  const SceneSpec scene = make_random_scene(seed, rig, options);
  SyntheticStereo s = generate_stereo_events(scene, rig);
  StereoDataset data;
  data.rig = rig;
  data.left = std::move(s.left);
  data.right = std::move(s.right);
  data.velocity = {{0.0, scene.vel}, {scene.duration, scene.vel}};
  data.gt_disparity = std::move(s.gt_disparity);
  return data;
}

void print_metrics(std::ostream& os, const DisparityMetrics& m) {
  os << "  mean_disp_err=" << m.mean_disp_err << " px  mean_depth_err=" << m.mean_depth_err
     << " m  pct_within_1=" << m.pct_within_1 << "%  (strict " << m.pct_within_1_strict
     << "%, of covered " << m.pct_within_1_of_covered << "%)  n_compared=" << m.n_compared
     << " n_rejected=" << m.n_rejected << '\n';
}

int cmd_run(const Inputs& in, Params& p, const std::string& out_dir, const OutputOptions& dumps) {
  finalize(p);
  p.config.keep_volumes = dumps.dump_volumes;
  const StereoDataset data = load_dataset(in);
  fs::create_directories(out_dir);
  {
    std::ofstream echo(fs::path(out_dir) / "config.txt");
    write_config_echo(echo, p.config);
  }

  std::vector<AblationRow> rows;
  AblationVariant variant{p.config.cost, p.config.sync == SyncMode::Sync, p.config.noise_pct,
                          p.config.disparity.window, p.config.seed};
  std::size_t batches = 0;
  run(data, p.config, [&](BatchResult& r) {
    write_batch_outputs(out_dir, r, dumps);
    std::cout << "batch " << r.index << ": " << r.num_left << "+" << r.num_right << " events, "
              << r.seconds * 1e3 << " ms, " << r.events_per_second() << " events/s\n";
    if (r.metrics) {
      print_metrics(std::cout, *r.metrics);
      rows.push_back({variant, *r.metrics});
    }
    ++batches;
  });
  if (batches == 0) {
    std::cerr << "no complete batch of " << p.config.disparity.num_events << " events\n";
    return 1;
  }
  if (!rows.empty()) {
    std::ofstream csv(fs::path(out_dir) / "metrics.csv");
    write_metrics_csv(csv, rows);
  }
  return 0;
}

int cmd_synth(const std::string& out_dir, std::uint64_t seed, const std::string& calib,
              const RandomSceneOptions& options) {
  const CameraRig rig = calib.empty() ? CameraRig{} : read_calibration(calib);
  const SceneSpec scene = make_random_scene(seed, rig, options);
  const SyntheticStereo s = generate_stereo_events(scene, rig);
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_events(dir / "events_left.txt", s.left);
  write_events(dir / "events_right.txt", s.right);
  write_calibration(dir / "calib.txt", rig);
  const std::vector<VelocitySample> vel = {{0.0, scene.vel}, {scene.duration, scene.vel}};
  write_velocity(dir / "velocity.txt", vel);
  write_ground_truth_pgm(dir / "gt_disparity.pgm", s.gt_disparity);
  std::cout << "scene " << seed << ": " << scene.planes.size() << " planes, " << s.left.size()
            << " left / " << s.right.size() << " right events -> " << dir << '\n';
  return 0;
}

std::vector<bool> parse_sync_modes(const std::string& s) {
  if (s == "on") return {true};
  if (s == "off") return {false};
  if (s == "both") return {true, false};
  throw CLI::ValidationError("--sync", "expected on, off or both");
}

int cmd_ablate(const Inputs& in, Params& p, std::int64_t scene_seed,
               const std::vector<std::string>& costs, const std::string& sync,
               const std::vector<double>& noise, const std::vector<int>& windows,
               const std::string& out) {
  finalize(p);
  const StereoDataset data = scene_seed >= 0
                                 ? synthetic_dataset(static_cast<std::uint64_t>(scene_seed),
                                                     CameraRig{}, p.config.disparity.num_events)
                                 : load_dataset(in);
  std::vector<CostKind> kinds;
  for (const std::string& c : costs) kinds.push_back(parse_cost_kind(c));
  const auto variants = ablation_grid(kinds, parse_sync_modes(sync), noise,
                                      windows.empty() ? std::vector<int>{p.config.disparity.window}
                                                      : windows,
                                      p.config.seed);
  const auto rows = ablation_runner(data, p.config, variants);
  if (out.empty() || out == "-") {
    write_metrics_csv(std::cout, rows);
  } else {
    std::ofstream os(out);
    if (!os) throw Error("cannot write " + out);
    write_metrics_csv(os, rows);
  }
  return 0;
}

int cmd_bench(const Inputs& in, Params& p, std::uint64_t scene_seed, int repeat) {
  finalize(p);
  const bool from_files = !in.events_left.empty();
  const StereoDataset data =
      from_files ? load_dataset(in)
                 : synthetic_dataset(scene_seed, CameraRig{}, p.config.disparity.num_events);
  const auto batches = batch_events(data.left, p.config.disparity.num_events);
  if (batches.empty()) {
    std::cerr << "no complete batch of " << p.config.disparity.num_events << " events\n";
    return 1;
  }
  for (std::size_t i = 0; i < batches.size(); ++i) {
    const auto left = batches[i];
    const auto right = events_between(data.right, left.front().t, left.back().t);
    const Velocity& vel = velocity_at(data.velocity, left.back().t);
    std::vector<double> times;
    for (int k = 0; k < std::max(repeat, 1); ++k) {
      times.push_back(process_batch(left, right, vel, data.rig, p.config).seconds);
    }
    std::sort(times.begin(), times.end());
    const double median = times[times.size() / 2];
    const double n = static_cast<double>(left.size());
    std::cout << "batch " << i << ": " << left.size() << " left events, "
              << p.config.disparity.num_disparities() << " disparities, median " << median * 1e3
              << " ms, " << median / n * 1e6 << " us/event, " << n / median << " events/s\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-synchronized event stereo"};
  app.require_subcommand(1);

  Inputs run_in;
  Params run_p;
  std::string run_out;
  OutputOptions dumps;
  bool print_config = false;
  auto* run_cmd = app.add_subcommand("run", "Estimate disparity for every batch of an event stream");
  add_params(run_cmd, run_p);
  run_cmd->add_flag("--print-config", print_config, "Print the effective parameters and exit");
  run_cmd->add_option("--events-left", run_in.events_left, "Left event file (t x y p)");
  run_cmd->add_option("--events-right", run_in.events_right, "Right event file (t x y p)");
  run_cmd->add_option("--calib", run_in.calib, "Calibration file");
  run_cmd->add_option("--velocity", run_in.velocity, "Velocity file");
  run_cmd->add_option("--gt", run_in.gt, "Ground-truth disparity PGM");
  run_cmd->add_option("--out", run_out, "Output directory");
  run_cmd->add_flag("--dump-volumes", dumps.dump_volumes, "Write event disparity volumes");
  run_cmd->add_flag("--dump-costs", dumps.dump_costs, "Write cost volumes");

  std::string synth_out;
  std::uint64_t synth_seed = 0;
  std::string synth_calib;
  RandomSceneOptions synth_opts;
  auto* synth_cmd = app.add_subcommand("synth", "Write a random synthetic stereo event scene");
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--seed", synth_seed, "Scene seed")->capture_default_str();
  synth_cmd->add_option("--calib", synth_calib, "Calibration file (default 346x260 rig)");
  synth_cmd->add_option("--num-events", synth_opts.target_events, "Left events incl. noise")
      ->capture_default_str();
  synth_cmd->add_option("--noise-fraction", synth_opts.noise_fraction, "Share of noise events")
      ->capture_default_str();
  synth_cmd->add_option("--duration", synth_opts.duration, "Scene duration in seconds")
      ->capture_default_str();
  synth_cmd->add_option("--min-planes", synth_opts.min_planes)->capture_default_str();
  synth_cmd->add_option("--max-planes", synth_opts.max_planes)->capture_default_str();

  Inputs ablate_in;
  Params ablate_p;
  std::int64_t ablate_scene = -1;
  std::vector<std::string> ablate_costs{"iou"};
  std::string ablate_sync = "on";
  std::vector<double> ablate_noise{0.0};
  std::vector<int> ablate_windows;
  std::string ablate_out;
  auto* ablate_cmd = app.add_subcommand("ablate", "Run an ablation grid and write a metrics CSV");
  add_inputs(ablate_cmd, ablate_in, false);
  add_params(ablate_cmd, ablate_p);
  ablate_cmd->add_option("--scene-seed", ablate_scene, "Use a synthetic scene with this seed");
  ablate_cmd->add_option("--costs", ablate_costs, "Costs to compare")->delimiter(',');
  ablate_cmd->add_option("--sync", ablate_sync, "on, off or both")->capture_default_str();
  ablate_cmd->add_option("--noise-pcts", ablate_noise, "Velocity noise levels")->delimiter(',');
  ablate_cmd->add_option("--windows", ablate_windows, "Window sides")->delimiter(',');
  ablate_cmd->add_option("--out", ablate_out, "Metrics CSV path ('-' for stdout)");

  Inputs bench_in;
  Params bench_p;
  std::uint64_t bench_scene = 0;
  int bench_repeat = 5;
  auto* bench_cmd = app.add_subcommand("bench", "Report per-batch throughput");
  add_inputs(bench_cmd, bench_in, false);
  add_params(bench_cmd, bench_p);
  bench_cmd->add_option("--scene-seed", bench_scene, "Synthetic scene seed")->capture_default_str();
  bench_cmd->add_option("--repeat", bench_repeat, "Timed repetitions per batch")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      if (print_config) {
        finalize(run_p);
        write_config_echo(std::cout, run_p.config);
        return 0;
      }
      for (const auto& [name, value] :
           {std::pair{"--events-left", run_in.events_left},
            {"--events-right", run_in.events_right}, {"--calib", run_in.calib},
            {"--velocity", run_in.velocity}, {"--out", run_out}}) {
        if (value.empty()) {
          std::cerr << "run: " << name << " is required\n";
          return 2;
        }
      }
      return cmd_run(run_in, run_p, run_out, dumps);
    }
    if (*synth_cmd) return cmd_synth(synth_out, synth_seed, synth_calib, synth_opts);
    if (*ablate_cmd) {
      if (ablate_scene < 0 && (ablate_in.events_left.empty() || ablate_in.gt.empty())) {
        std::cerr << "ablate: give --scene-seed or file inputs with --gt\n";
        return 2;
      }
      return cmd_ablate(ablate_in, ablate_p, ablate_scene, ablate_costs, ablate_sync,
                        ablate_noise, ablate_windows, ablate_out);
    }
    if (*bench_cmd) return cmd_bench(bench_in, bench_p, bench_scene, bench_repeat);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
