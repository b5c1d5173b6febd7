#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "evstereo/cost.hpp"
#include "evstereo/disparity.hpp"
#include "evstereo/motion.hpp"
#include "evstereo/pipeline.hpp"
#include "evstereo/synth.hpp"
#include "evstereo/volume.hpp"

namespace py = pybind11;
using namespace evstereo;

namespace {

using EventArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Events travel as float64 arrays of shape (N, 4) with columns t, x, y, p.
EventBatch to_events(const EventArray& a) {
  if (a.ndim() != 2 || a.shape(1) != 4) throw py::value_error("events must have shape (N, 4)");
  const auto r = a.unchecked<2>();
  EventBatch out(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    out[i] = {r(i, 0), static_cast<int>(r(i, 1)), static_cast<int>(r(i, 2)), r(i, 3) > 0 ? 1 : -1};
  }
  return out;
}

py::array_t<double> from_events(const EventBatch& events) {
  py::array_t<double> a({static_cast<py::ssize_t>(events.size()), py::ssize_t{4}});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto k = static_cast<py::ssize_t>(i);
    w(k, 0) = events[i].t;
    w(k, 1) = events[i].x;
    w(k, 2) = events[i].y;
    w(k, 3) = events[i].p;
  }
  return a;
}

template <typename T>
py::array_t<T> from_image(const Image<T>& img) {
  py::array_t<T> a({img.height(), img.width()});
  std::copy(img.data().begin(), img.data().end(), a.mutable_data());
  return a;
}

template <typename T>
py::array_t<T> from_volume(const Volume<T>& v) {
  py::array_t<T> a({v.num_disparities(), v.height(), v.width()});
  std::copy(v.data().begin(), v.data().end(), a.mutable_data());
  return a;
}

template <typename T>
Volume<T> to_volume(const py::array_t<T, py::array::c_style | py::array::forcecast>& a, int d_min) {
  if (a.ndim() != 3) throw py::value_error("volumes must have shape (D, H, W)");
  Volume<T> v(static_cast<int>(a.shape(2)), static_cast<int>(a.shape(1)), d_min,
              d_min + static_cast<int>(a.shape(0)) - 1);
  std::copy(a.data(), a.data() + a.size(), v.data().begin());
  return v;
}

Image<double> to_gt(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw py::value_error("ground truth must have shape (H, W)");
  Image<double> img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), img.data().begin());
  return img;
}

NoiseModel parse_noise_model(const std::string& s) {
  if (s == "std") return NoiseModel::StdDev;
  if (s == "variance") return NoiseModel::Variance;
  throw py::value_error("noise model must be 'std' or 'variance'");
}

py::dict metrics_dict(const DisparityMetrics& m) {
  py::dict d;
  d["mean_disp_err"] = m.mean_disp_err;
  d["mean_depth_err"] = m.mean_depth_err;
  d["pct_within_1"] = m.pct_within_1;
  d["pct_within_1_strict"] = m.pct_within_1_strict;
  d["pct_within_1_of_covered"] = m.pct_within_1_of_covered;
  d["n_compared"] = m.n_compared;
  d["n_rejected"] = m.n_rejected;
  return d;
}

EventDisparityVolume volume(const EventArray& events, const Velocity& vel, const CameraRig& rig,
                            const DisparityConfig& cfg, bool sync, std::optional<double> t_ref,
                            bool right) {
  const EventBatch batch = to_events(events);
  const SyncMode mode = sync ? SyncMode::Sync : SyncMode::NoSync;
  return right ? build_right_volume(batch, vel, rig, cfg, mode, t_ref)
               : build_left_volume(batch, vel, rig, cfg, mode, t_ref);
}

}  // namespace

PYBIND11_MODULE(_evstereo, m) {
  m.doc() = "Time-synchronized event stereo";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<CameraRig>(m, "CameraRig")
      .def(py::init([](double f, double cx, double cy, double baseline, int width, int height) {
             CameraRig r{f, cx, cy, baseline, width, height};
             r.validate();
             return r;
           }),
           py::arg("f") = 226.0, py::arg("cx") = 173.0, py::arg("cy") = 130.0,
           py::arg("baseline") = 0.1, py::arg("width") = 346, py::arg("height") = 260)
      .def_readwrite("f", &CameraRig::f)
      .def_readwrite("cx", &CameraRig::cx)
      .def_readwrite("cy", &CameraRig::cy)
      .def_readwrite("baseline", &CameraRig::baseline)
      .def_readwrite("width", &CameraRig::width)
      .def_readwrite("height", &CameraRig::height)
      .def("__repr__", [](const CameraRig& r) {
        return "CameraRig(f=" + std::to_string(r.f) + ", " + std::to_string(r.width) + "x" +
               std::to_string(r.height) + ")";
      });

  py::class_<Velocity>(m, "Velocity")
      .def(py::init([](const Eigen::Vector3d& linear, const Eigen::Vector3d& angular) {
             return Velocity{linear, angular};
           }),
           py::arg("linear") = Eigen::Vector3d::Zero(), py::arg("angular") = Eigen::Vector3d::Zero())
      .def_readwrite("linear", &Velocity::linear)
      .def_readwrite("angular", &Velocity::angular);

  py::class_<DisparityConfig>(m, "DisparityConfig")
      .def(py::init<>())
      .def_readwrite("d_min", &DisparityConfig::d_min)
      .def_readwrite("d_max", &DisparityConfig::d_max)
      .def_readwrite("window", &DisparityConfig::window)
      .def_readwrite("eps_c", &DisparityConfig::eps_c)
      .def_readwrite("eps_n", &DisparityConfig::eps_n)
      .def_readwrite("num_events", &DisparityConfig::num_events);

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_readwrite("disparity", &PipelineConfig::disparity)
      .def_property(
          "cost", [](const PipelineConfig& c) { return to_string(c.cost); },
          [](PipelineConfig& c, const std::string& s) { c.cost = parse_cost_kind(s); })
      .def_property(
          "sync", [](const PipelineConfig& c) { return c.sync == SyncMode::Sync; },
          [](PipelineConfig& c, bool on) { c.sync = on ? SyncMode::Sync : SyncMode::NoSync; })
      .def_readwrite("noise_pct", &PipelineConfig::noise_pct)
      .def_property(
          "noise_model",
          [](const PipelineConfig& c) { return c.noise_model == NoiseModel::StdDev ? "std" : "variance"; },
          [](PipelineConfig& c, const std::string& s) { c.noise_model = parse_noise_model(s); })
      .def_readwrite("seed", &PipelineConfig::seed)
      .def_readwrite("alpha", &PipelineConfig::alpha);

  m.def("depth_from_disparity", &depth_from_disparity, py::arg("d"), py::arg("rig") = CameraRig{});

  m.def("motion_field_flow", &motion_field_flow, "Image velocity in px/s", py::arg("x"),
        py::arg("y"), py::arg("d"), py::arg("velocity"), py::arg("rig") = CameraRig{});

  m.def(
      "perturb_velocity",
      [](const Velocity& v, double pct, std::uint64_t seed, const std::string& model) {
        return perturb_velocity(v, pct, seed, parse_noise_model(model));
      },
      py::arg("velocity"), py::arg("pct"), py::arg("seed"), py::arg("model") = "std");

  for (bool right : {false, true}) {
    m.def(
        right ? "build_right_volume" : "build_left_volume",
        [right](const EventArray& events, const Velocity& vel, const CameraRig& rig,
                const DisparityConfig& cfg, bool sync, std::optional<double> t_ref) {
          return from_volume(volume(events, vel, rig, cfg, sync, t_ref, right).values);
        },
        "Signed event disparity volume as an int8 array of shape (D, H, W)", py::arg("events"),
        py::arg("velocity"), py::arg("rig") = CameraRig{}, py::arg("config") = DisparityConfig{},
        py::arg("sync") = true, py::arg("t_ref") = py::none());
  }

  m.def(
      "window_sum",
      [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& field, int side) {
        if (field.ndim() != 2) throw py::value_error("field must be 2-D");
        const int h = static_cast<int>(field.shape(0)), w = static_cast<int>(field.shape(1));
        const WindowSpec spec{side};
        spec.validate(w, h);
        const auto sums = window_sum(std::span<const std::int32_t>(field.data(), field.size()), w, h, spec);
        py::array_t<std::int32_t> out({h, w});
        std::copy(sums.begin(), sums.end(), out.mutable_data());
        return out;
      },
      py::arg("field"), py::arg("side"));

  m.def(
      "cost_volume",
      [](const py::array_t<std::int8_t, py::array::c_style | py::array::forcecast>& left,
         const py::array_t<std::int8_t, py::array::c_style | py::array::forcecast>& right, int side,
         const std::string& kind, int d_min) {
        const EventDisparityVolume l{to_volume<std::int8_t>(left, d_min), 0.0};
        const EventDisparityVolume r{to_volume<std::int8_t>(right, d_min), 0.0};
        if (!l.values.same_shape(r.values)) throw py::value_error("volume shapes differ");
        const WindowSpec spec{side};
        spec.validate(l.values.width(), l.values.height());
        const CostKind k = parse_cost_kind(kind);
        if (k == CostKind::Time) throw py::value_error("the time cost needs event timestamps; use run()");
        const CostVolume c = k == CostKind::IoU ? iou_cost_volume(l, r, spec)
                                                : intersection_cost_volume(l, r, spec);
        py::dict out;
        out["cost"] = from_volume(c.cost);
        out["c_i"] = from_volume(c.c_i);
        out["c_u"] = from_volume(c.c_u);
        return out;
      },
      "Window-summed intersection/union counts and the matching cost", py::arg("left"),
      py::arg("right"), py::arg("side") = 24, py::arg("kind") = "iou", py::arg("d_min") = 0);

  m.def(
      "winner_takes_all",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>& cost, int d_min) {
        CostVolume c;
        c.cost = to_volume<float>(cost, d_min);
        const DisparityMap map = winner_takes_all(c);
        return py::make_tuple(from_image(map.d_hat), from_image(map.valid));
      },
      "Per-pixel argmin over disparity; returns (d_hat, valid)", py::arg("cost"), py::arg("d_min") = 0);

  m.def(
      "synthetic_scene",
      [](std::uint64_t seed, const CameraRig& rig, int num_events, double noise_fraction) {
        RandomSceneOptions opt;
        opt.target_events = num_events;
        opt.noise_fraction = noise_fraction;
        const SceneSpec scene = make_random_scene(seed, rig, opt);
        const SyntheticStereo s = generate_stereo_events(scene, rig);
        py::dict out;
        out["left"] = from_events(s.left);
        out["right"] = from_events(s.right);
        out["gt_disparity"] = from_image(s.gt_disparity);
        out["velocity"] = scene.vel;
        out["duration"] = scene.duration;
        return out;
      },
      "Random planar scene with exact ground truth", py::arg("seed"), py::arg("rig") = CameraRig{},
      py::arg("num_events") = 15000, py::arg("noise_fraction") = 0.05);

  m.def(
      "run",
      [](const EventArray& left, const EventArray& right, const Velocity& vel, const CameraRig& rig,
         const PipelineConfig& config,
         std::optional<py::array_t<double, py::array::c_style | py::array::forcecast>> gt) {
        StereoDataset data;
        data.rig = rig;
        data.left = to_events(left);
        data.right = to_events(right);
        data.velocity = {{0.0, vel}};
        if (gt) data.gt_disparity = to_gt(*gt);
        py::list batches;
        {
          std::vector<BatchResult> results;
          {
            py::gil_scoped_release release;
            results = run(data, config);
          }
          for (const BatchResult& r : results) {
            py::dict b;
            b["index"] = r.index;
            b["d_hat"] = from_image(r.map.d_hat);
            b["valid"] = from_image(r.map.valid);
            b["has_events"] = from_image(r.map.has_events);
            b["t_ref"] = r.t_ref;
            b["seconds"] = r.seconds;
            b["num_left"] = r.num_left;
            b["num_right"] = r.num_right;
            b["metrics"] = r.metrics ? py::object(metrics_dict(*r.metrics)) : py::object(py::none());
            batches.append(b);
          }
        }
        return batches;
      },
      "Full pipeline over every batch of the left stream with a constant velocity",
      py::arg("left"), py::arg("right"), py::arg("velocity"), py::arg("rig") = CameraRig{},
      py::arg("config") = PipelineConfig{}, py::arg("gt_disparity") = py::none());
}
