#include "evstereo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Geometry>

namespace evstereo {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d k;
  k << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return k;
}

// True if the segment from `origin` to the texture point on plane `self` crosses
// a nearer plane.
bool occluded(const SceneSpec& spec, std::size_t self, const Eigen::Vector3d& origin,
              const Eigen::Vector3d& target) {
  const Eigen::Vector3d dir = target - origin;
  if (std::abs(dir.z()) < 1e-12) return false;
  for (std::size_t k = 0; k < spec.planes.size(); ++k) {
    if (k == self) continue;
    const PlaneSpec& plane = spec.planes[k];
    const double s = (plane.depth - origin.z()) / dir.z();
    if (!(s > 0.0 && s < 1.0)) continue;
    const Eigen::Vector3d hit = origin + s * dir;
    if (plane.contains(hit.x(), hit.y())) return true;
  }
  return false;
}

struct Emitter {
  const SceneSpec& spec;
  const CameraRig& rig;

  // Emits the events of one texture point into one camera. The right camera
  // sits `baseline` along the left camera's x axis.
  void emit(std::size_t plane_index, const TexturePoint& tp, bool right,
            const std::vector<double>& times, EventBatch& out) const {
    const PlaneSpec& plane = spec.planes[plane_index];
    const Eigen::Vector3d world(tp.x, tp.y, plane.depth);
    for (double t : times) {
      const CameraPose pose = pose_at(spec.vel, t);
      Eigen::Vector3d cam = pose.rotation.transpose() * (world - pose.center);
      Eigen::Vector3d origin = pose.center;
      if (right) {
        cam.x() -= rig.baseline;
        origin += pose.rotation.col(0) * rig.baseline;
      }
      const auto pix = project(cam, rig);
      if (!pix) return;
      const int x = static_cast<int>(std::lround(pix->x()));
      const int y = static_cast<int>(std::lround(pix->y()));
      // Once a point leaves the frame its remaining events are dropped.
      if (!rig.contains(x, y)) return;
      if (occluded(spec, plane_index, origin, world)) continue;
      out.push_back(Event{t, x, y, tp.polarity});
    }
  }
};

void sort_by_time(EventBatch& events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });
}

void add_noise(EventBatch& events, int count, double duration, const CameraRig& rig,
               std::mt19937_64& rng) {
  std::uniform_int_distribution<int> xs(0, rig.width - 1);
  std::uniform_int_distribution<int> ys(0, rig.height - 1);
  std::uniform_real_distribution<double> ts(0.0, duration);
  std::bernoulli_distribution positive(0.5);
  for (int i = 0; i < count; ++i) {
    const double t = ts(rng);
    const int x = xs(rng);
    const int y = ys(rng);
    events.push_back(Event{t, x, y, positive(rng) ? 1 : -1});
  }
}

std::size_t count_signal_left(const SceneSpec& spec, const CameraRig& rig) {
  SceneSpec quiet = spec;
  quiet.noise_events = 0;
  return generate_stereo_events(quiet, rig).left.size();
}

}  // namespace

void SceneSpec::validate() const {
  if (!(duration > 0.0)) throw Error("scene: duration must be positive");
  if (!(event_rate >= 0.0)) throw Error("scene: event rate must be non-negative");
  if (noise_events < 0) throw Error("scene: noise_events must be non-negative");
  if (!vel.is_finite()) throw Error("scene: velocity must be finite");
  for (const PlaneSpec& plane : planes) {
    if (!(plane.depth > 0.0)) throw Error("scene: plane depth must be positive");
    for (const TexturePoint& tp : plane.texture) {
      if (tp.polarity != 1 && tp.polarity != -1) throw Error("scene: polarity must be +/-1");
    }
  }
}

CameraPose pose_at(const Velocity& vel, double t) {
  const Eigen::Vector3d& w = vel.angular;
  const double speed = w.norm();
  const double theta = speed * t;
  const Eigen::Matrix3d k = skew(w);

  CameraPose pose;
  Eigen::Matrix3d integral;  // integral of exp(s [w]) over s in [0, t]
  if (theta < 1e-6) {
    pose.rotation = Eigen::Matrix3d::Identity() + t * k + 0.5 * t * t * k * k;
    integral = t * Eigen::Matrix3d::Identity() + 0.5 * t * t * k + t * t * t / 6.0 * k * k;
  } else {
    pose.rotation = Eigen::AngleAxisd(theta, w / speed).toRotationMatrix();
    const double s2 = speed * speed;
    integral = t * Eigen::Matrix3d::Identity() + (1.0 - std::cos(theta)) / s2 * k +
               (theta - std::sin(theta)) / (s2 * speed) * k * k;
  }
  pose.center = integral * vel.linear;
  return pose;
}

Eigen::Vector3d point_in_camera(const Eigen::Vector3d& world, const Velocity& vel, double t) {
  const CameraPose pose = pose_at(vel, t);
  return pose.rotation.transpose() * (world - pose.center);
}

std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& p, const CameraRig& rig) {
  if (!(p.z() > 1e-9)) return std::nullopt;
  return Eigen::Vector2d(rig.f * p.x() / p.z() + rig.cx, rig.f * p.y() / p.z() + rig.cy);
}

std::pair<Image<double>, Image<double>> render_ground_truth(const SceneSpec& spec,
                                                            const CameraRig& rig, double t) {
  const double nan = std::nan("");
  Image<double> disparity(rig.width, rig.height, nan);
  Image<double> depth(rig.width, rig.height, nan);
  const CameraPose pose = pose_at(spec.vel, t);
  for (int y = 0; y < rig.height; ++y) {
    for (int x = 0; x < rig.width; ++x) {
      const Eigen::Vector3d ray_cam((x - rig.cx) / rig.f, (y - rig.cy) / rig.f, 1.0);
      const Eigen::Vector3d ray = pose.rotation * ray_cam;
      if (std::abs(ray.z()) < 1e-12) continue;
      double best = std::numeric_limits<double>::infinity();
      for (const PlaneSpec& plane : spec.planes) {
        // The camera-frame depth of the hit point equals the ray parameter since ray_cam.z = 1.
        const double s = (plane.depth - pose.center.z()) / ray.z();
        if (!(s > 0.0) || s >= best) continue;
        const Eigen::Vector3d hit = pose.center + s * ray;
        if (plane.contains(hit.x(), hit.y())) best = s;
      }
      if (std::isfinite(best)) {
        depth(x, y) = best;
        disparity(x, y) = rig.f * rig.baseline / best;
      }
    }
  }
  return {std::move(disparity), std::move(depth)};
}

SyntheticStereo generate_stereo_events(const SceneSpec& spec, const CameraRig& rig) {
  spec.validate();
  rig.validate();

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double expected = spec.event_rate * spec.duration;

  SyntheticStereo out;
  const Emitter emitter{spec, rig};
  std::vector<double> times;
  for (std::size_t k = 0; k < spec.planes.size(); ++k) {
    for (const TexturePoint& tp : spec.planes[k].texture) {
      // The two sensors fire independently, so each camera gets its own
      // stratified sample of emission times along the trajectory.
      for (EventBatch* camera : {&out.left, &out.right}) {
        const int n = static_cast<int>(std::floor(expected + unit(rng)));
        times.resize(n);
        for (int i = 0; i < n; ++i) times[i] = spec.duration * (i + unit(rng)) / n;
        emitter.emit(k, tp, camera == &out.right, times, *camera);
      }
    }
  }
  add_noise(out.left, spec.noise_events, spec.duration, rig, rng);
  add_noise(out.right, spec.noise_events, spec.duration, rig, rng);
  sort_by_time(out.left);
  sort_by_time(out.right);

  out.t_gt = spec.duration;
  std::tie(out.gt_disparity, out.gt_depth) = render_ground_truth(spec, rig, spec.duration);
  return out;
}

SceneSpec make_random_scene(std::uint64_t seed, const CameraRig& rig,
                            const RandomSceneOptions& options) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto random_direction = [&]() {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Vector3d v(n(rng), n(rng), n(rng));
    return v.normalized();
  };

  SceneSpec spec;
  spec.seed = seed ^ 0x9e3779b97f4a7c15ULL;
  spec.duration = options.duration;
  spec.vel.linear = uniform(options.min_speed, options.max_speed) * random_direction();
  spec.vel.angular =
      uniform(options.min_angular_speed, options.max_angular_speed) * random_direction();

  const int num_planes =
      std::uniform_int_distribution<int>(options.min_planes, options.max_planes)(rng);
  std::size_t num_points = 0;
  for (int k = 0; k < num_planes; ++k) {
    const double d = uniform(options.min_disparity, options.max_disparity);
    PlaneSpec plane;
    plane.depth = rig.f * rig.baseline / d;

    // Rectangle chosen in left-image pixels, kept visible to the right camera.
    const double w_px = uniform(0.25, 0.5) * rig.width;
    const double h_px = uniform(0.3, 0.6) * rig.height;
    const double margin = 8.0;
    const double x0 = uniform(d + margin, rig.width - margin - w_px);
    const double y0 = uniform(margin, rig.height - margin - h_px);
    const double scale = plane.depth / rig.f;
    plane.x_min = (x0 - rig.cx) * scale;
    plane.x_max = (x0 + w_px - rig.cx) * scale;
    plane.y_min = (y0 - rig.cy) * scale;
    plane.y_max = (y0 + h_px - rig.cy) * scale;

    const auto n = static_cast<std::size_t>(options.texture_density * w_px * h_px);
    std::bernoulli_distribution positive(0.5);
    plane.texture.reserve(n);
    if (options.texture == TextureStyle::Dots) {
      for (std::size_t i = 0; i < n; ++i) {
        plane.texture.push_back({uniform(plane.x_min, plane.x_max),
                                 uniform(plane.y_min, plane.y_max), positive(rng) ? 1 : -1});
      }
    } else {
      // Straight edges sampled once per projected pixel; one polarity per edge.
      while (plane.texture.size() < n) {
        const double length = uniform(options.min_edge_px, options.max_edge_px) * scale;
        const double angle = uniform(0.0, 3.14159265358979323846);
        const double ux = std::cos(angle), uy = std::sin(angle);
        const double mx = uniform(plane.x_min, plane.x_max);
        const double my = uniform(plane.y_min, plane.y_max);
        const int polarity = positive(rng) ? 1 : -1;
        const int samples = std::max(1, static_cast<int>(length / scale));
        for (int i = 0; i < samples && plane.texture.size() < n; ++i) {
          const double s = (i + 0.5) / samples - 0.5;
          const double px = mx + s * length * ux;
          const double py = my + s * length * uy;
          if (plane.contains(px, py)) plane.texture.push_back({px, py, polarity});
        }
      }
    }
    num_points += n;
    spec.planes.push_back(std::move(plane));
  }

  // Calibrate the per-point rate so the left stream carries the requested
  // signal volume after frame exits and occlusion.
  const double total = options.target_events * options.headroom;
  const double signal = total * (1.0 - options.noise_fraction);
  spec.event_rate = signal / (std::max<std::size_t>(num_points, 1) * spec.duration);
  const std::size_t trial = count_signal_left(spec, rig);
  if (trial > 0) spec.event_rate *= signal / static_cast<double>(trial);
  spec.noise_events = static_cast<int>(std::lround(total * options.noise_fraction));
  return spec;
}

}  // namespace evstereo
