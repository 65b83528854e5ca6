"""Physically based synthetic image simulator for lunar terrain patches."""

from .camera import (
    Intrinsics,
    Pose,
    Ray,
    fov_from_intrinsics,
    ground_sample_distance,
    pixel_ray,
    rotation_from_rpy,
)
from .estimator import LunarSurfaceSimulator
from .exceptions import (
    ConfigurationError,
    GridFormatError,
    GridStructureError,
    LunarSimError,
    RenderError,
)
from .illumination import SunState, phase_angle, sun_direction
from .photometry import ReflectanceModel, ShadingGeometry, hapke, lambert, lommel_seeliger, shade
from .renderer import (
    Hit,
    ImageBuffer,
    RenderOptions,
    Scene,
    intersect_heightfield,
    quantize,
    render,
    shadow_test,
    write_image,
)
from .scenario import Scenario, load_scenario, parse_scenario
from .sequence import Trajectory, Waypoint, generate_sequence, interpolate_trajectory
from .terrain import (
    DemGrid,
    HorizonMap,
    NormalMap,
    Raster,
    compute_horizon_map,
    derive_displacement_map,
    derive_normal_map,
    load_dem,
    load_raster,
    sample_bilinear,
    save_dem,
    save_raster,
)

__version__ = "0.1.0"
