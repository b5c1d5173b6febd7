"""Time-synchronized stereo matching for event cameras."""

from ._evstereo import (
    CameraRig,
    DisparityConfig,
    Error,
    PipelineConfig,
    Velocity,
    build_left_volume,
    build_right_volume,
    cost_volume,
    depth_from_disparity,
    motion_field_flow,
    perturb_velocity,
    run,
    synthetic_scene,
    window_sum,
    winner_takes_all,
)

__all__ = [
    "CameraRig",
    "DisparityConfig",
    "Error",
    "PipelineConfig",
    "Velocity",
    "build_left_volume",
    "build_right_volume",
    "cost_volume",
    "depth_from_disparity",
    "motion_field_flow",
    "perturb_velocity",
    "run",
    "synthetic_scene",
    "window_sum",
    "winner_takes_all",
]
