#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "evstereo/core.hpp"

namespace evstereo {

/// Textured point on a plane, in world meters. Every event it emits carries
/// `polarity`.
struct TexturePoint {
  double x = 0.0;
  double y = 0.0;
  int polarity = 1;
};

/// Fronto-parallel rectangle at world depth `depth`. The world frame is the
/// left camera frame at t = 0.
struct PlaneSpec {
  double depth = 1.0;
  double x_min = -0.5, x_max = 0.5;
  double y_min = -0.5, y_max = 0.5;
  std::vector<TexturePoint> texture;

  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

struct SceneSpec {
  std::vector<PlaneSpec> planes;
  Velocity vel;
  double duration = 0.05;
  double event_rate = 200.0;  // events per texture point per second
  int noise_events = 0;       // per camera
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticStereo {
  EventBatch left;
  EventBatch right;
  Image<double> gt_disparity;  // NaN where no plane is visible
  Image<double> gt_depth;      // NaN where no plane is visible
  double t_gt = 0.0;
};

/// Left camera pose at time t under constant body-frame velocity.
struct CameraPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // camera-to-world
  Eigen::Vector3d center = Eigen::Vector3d::Zero();         // world
};

CameraPose pose_at(const Velocity& vel, double t);

/// World point expressed in the left camera frame at time t.
Eigen::Vector3d point_in_camera(const Eigen::Vector3d& world, const Velocity& vel, double t);

/// Pinhole projection in pixels; nullopt for points at or behind the camera.
std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& camera_point, const CameraRig& rig);

/// Renders the scene into left/right event streams by projecting every texture
/// point along its exact trajectory. Also returns ground truth at t = duration.
SyntheticStereo generate_stereo_events(const SceneSpec& spec, const CameraRig& rig);

/// Ground-truth disparity and depth seen by the left camera at time t.
std::pair<Image<double>, Image<double>> render_ground_truth(const SceneSpec& spec,
                                                            const CameraRig& rig, double t);

enum class TextureStyle { Dots, Edges };

struct RandomSceneOptions {
  int min_planes = 1;
  int max_planes = 3;
  double min_disparity = 4.0;
  double max_disparity = 28.0;
  int target_events = 15000;     // left events including noise
  double headroom = 1.03;        // overshoot so a full target_events batch is available
  double noise_fraction = 0.05;  // share of all left events that is noise
  double texture_density = 0.15; // texture points per projected pixel
  TextureStyle texture = TextureStyle::Edges;
  double min_edge_px = 10.0, max_edge_px = 40.0;  // projected edge length
  double duration = 0.03;
  double min_speed = 1.0, max_speed = 2.0;                  // m/s
  double min_angular_speed = 0.4, max_angular_speed = 1.6;  // rad/s
};

/// Seeded random scene with mixed translation and rotation.
SceneSpec make_random_scene(std::uint64_t seed, const CameraRig& rig,
                            const RandomSceneOptions& options = {});

}  // namespace evstereo
