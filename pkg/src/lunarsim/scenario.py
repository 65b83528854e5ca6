"""JSON scenario files: schema, validation and conversion to a :class:`Scene`.

Angles are degrees in the file. Relative paths resolve against the scenario's
directory. Every validation failure surfaces as a :class:`ConfigurationError`
whose message starts with the dotted path of the offending field.
"""

from __future__ import annotations

import copy
import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .camera import Intrinsics
from .exceptions import ConfigurationError
from .illumination import SunState
from .photometry import ReflectanceModel
from .renderer import RenderOptions, Scene
from .sequence import Trajectory, Waypoint
from .terrain.io import load_dem, load_raster


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True, allow_inf_nan=False)


class SunSpec(_Spec):
    elevation: Optional[float] = Field(None, ge=-90.0, le=90.0)
    phase_angle: Optional[float] = Field(None, ge=0.0, le=180.0)
    azimuth: float = 0.0
    intensity: float = Field(1.0, ge=0.0)

    @model_validator(mode="after")
    def _one_placement(self):
        if (self.elevation is None) == (self.phase_angle is None):
            raise ValueError("give exactly one of 'elevation' or 'phase_angle'")
        return self

    def to_domain(self):
        if self.phase_angle is not None:
            return SunState.from_phase_angle(self.phase_angle, self.azimuth, self.intensity)
        return SunState(self.elevation, self.azimuth, self.intensity)


class PoseSpec(_Spec):
    position: Optional[tuple[float, float, float]] = None
    altitude: Optional[float] = None
    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0

    @model_validator(mode="after")
    def _one_position(self):
        if (self.position is None) == (self.altitude is None):
            raise ValueError("give exactly one of 'position' or 'altitude'")
        return self


class WaypointSpec(PoseSpec):
    sun: Optional[SunSpec] = None


class CameraSpec(_Spec):
    focal_length: float = Field(gt=0.0)
    pixel_pitch: float = Field(gt=0.0)
    width_px: int = Field(ge=1, le=16384)
    height_px: int = Field(ge=1, le=16384)
    exposure_scale: float = Field(1.0, gt=0.0)
    pose: Optional[PoseSpec] = None


class ModelSpec(_Spec):
    kind: Literal["lambert", "ls_paper", "hapke_paper"] = "lambert"
    B0: float = Field(0.0, ge=0.0, le=1.0)


class OptionsSpec(_Spec):
    shadow_method: Literal["raymarch", "horizon_map", "horizon", "none"] = "raymarch"
    shadow_step: Optional[float] = Field(None, gt=0.0)
    max_range: Optional[float] = Field(None, gt=0.0)
    background: float = Field(0.0, ge=0.0)
    n_azimuths: int = Field(64, ge=4, le=4096)
    light_distance: Optional[float] = Field(None, gt=0.0)


class TrajectorySpec(_Spec):
    waypoints: list[WaypointSpec] = Field(min_length=1)
    frames_between: int = Field(0, ge=0)


class ScenarioSpec(_Spec):
    schema_version: Literal[1]
    dem_path: str = Field(min_length=1)
    albedo_path: Optional[str] = None
    albedo: float = Field(1.0, ge=0.0, le=1.0)
    reference_elevation: float = 0.0
    sun: SunSpec
    camera: CameraSpec
    model: ModelSpec = Field(default_factory=ModelSpec)
    options: OptionsSpec = Field(default_factory=OptionsSpec)
    trajectory: Optional[TrajectorySpec] = None

    @model_validator(mode="after")
    def _one_mode(self):
        if (self.camera.pose is None) == (self.trajectory is None):
            raise ValueError("give exactly one of 'camera.pose' or 'trajectory'")
        return self


@dataclass(frozen=True)
class Scenario:
    """A validated scenario. ``camera_pose`` is a :class:`Waypoint` so altitude-only
    poses can be placed over the DEM center once the DEM is loaded."""

    dem_path: Path
    albedo_path: Path | None
    albedo: float
    reference_elevation: float
    sun: SunState
    intrinsics: Intrinsics
    camera_pose: Waypoint | None
    model: ReflectanceModel
    options: RenderOptions
    trajectory: Trajectory | None

    def build_scene(self, workers=1):
        """Load the rasters and derive the maps for this scenario."""
        dem = load_dem(self.dem_path)
        albedo = self.albedo
        if self.albedo_path is not None:
            albedo = load_raster(self.albedo_path, like=dem)
        first = self.camera_pose or self.trajectory.waypoints[0]
        pose = first.resolve(dem.center, self.reference_elevation)
        return Scene.build(dem, self.sun, self.intrinsics, pose, albedo, self.model,
                           self.options, workers=workers)


def _format_errors(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"{loc}: {e['msg']}")
    return "; ".join(lines)


def parse_scenario(data, base_dir=None) -> Scenario:
    """Validate a scenario mapping (or JSON text) and convert it to domain objects."""
    try:
        # JSON mode: arrays are accepted as tuples even under strict validation
        if not isinstance(data, (str, bytes)):
            data = json.dumps(data)
        spec = ScenarioSpec.model_validate_json(data)
    except ValidationError as exc:
        raise ConfigurationError(_format_errors(exc)) from None
    base = Path(base_dir) if base_dir is not None else Path.cwd()

    def resolve(p, name):
        path = Path(p)
        if not path.is_absolute():
            path = base / path
        if not path.is_file():
            raise ConfigurationError(f"file not found: {path}", name)
        return path

    dem_path = resolve(spec.dem_path, "dem_path")
    albedo_path = resolve(spec.albedo_path, "albedo_path") if spec.albedo_path else None
    field = "<root>"
    try:
        field = "sun"
        sun = spec.sun.to_domain()
        field = "camera"
        cam = spec.camera
        intrinsics = Intrinsics(cam.focal_length, cam.pixel_pitch, cam.width_px,
                                cam.height_px, cam.exposure_scale)
        camera_pose = None
        if cam.pose is not None:
            field = "camera.pose"
            p = cam.pose
            camera_pose = Waypoint(p.position, p.roll, p.pitch, p.yaw, p.altitude)
        field = "model"
        model = ReflectanceModel(spec.model.kind, spec.model.B0)
        field = "options"
        o = spec.options
        options = RenderOptions(o.shadow_method, o.shadow_step,
                                o.max_range if o.max_range is not None else float("inf"),
                                o.background, o.n_azimuths, o.light_distance)
        trajectory = None
        if spec.trajectory is not None:
            waypoints = []
            for k, w in enumerate(spec.trajectory.waypoints):
                field = f"trajectory.waypoints.{k}"
                waypoints.append(Waypoint(w.position, w.roll, w.pitch, w.yaw, w.altitude,
                                          w.sun.to_domain() if w.sun else None))
            field = "trajectory"
            trajectory = Trajectory(tuple(waypoints), spec.trajectory.frames_between)
    except ConfigurationError:
        raise
    except ValueError as exc:
        raise ConfigurationError(str(exc), field) from None

    return Scenario(dem_path, albedo_path, spec.albedo, spec.reference_elevation, sun,
                    intrinsics, camera_pose, model, options, trajectory)


# --sweep parameters and where they live in the scenario document
SWEEP_TARGETS = {
    "sun_elevation": (("sun", "elevation"), ("sun", "phase_angle")),
    "phase_angle": (("sun", "phase_angle"), ("sun", "elevation")),
    "sun_azimuth": (("sun", "azimuth"), None),
    "sun_intensity": (("sun", "intensity"), None),
    "altitude": (("camera", "pose", "altitude"), ("camera", "pose", "position")),
    "roll": (("camera", "pose", "roll"), None),
    "pitch": (("camera", "pose", "pitch"), None),
    "yaw": (("camera", "pose", "yaw"), None),
    "exposure_scale": (("camera", "exposure_scale"), None),
    "B0": (("model", "B0"), None),
}


def parse_sweep(text):
    """Parse ``name=lo:hi:n`` into ``(name, values)``."""
    name, sep, rng = str(text).partition("=")
    name = name.strip()
    if not sep or name not in SWEEP_TARGETS:
        raise ConfigurationError(
            f"expected <param>=lo:hi:n with param one of {sorted(SWEEP_TARGETS)}, got {text!r}",
            "--sweep",
        )
    parts = rng.split(":")
    try:
        if len(parts) != 3:
            raise ValueError
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigurationError(f"range must be lo:hi:n, got {rng!r}", f"--sweep.{name}") from None
    if n < 1 or not (np.isfinite(lo) and np.isfinite(hi)):
        raise ConfigurationError(f"need finite bounds and n >= 1, got {rng!r}", f"--sweep.{name}")
    return name, [float(v) for v in np.linspace(lo, hi, n)]


def expand_sweeps(data, sweeps):
    """Yield ``(overrides, document)`` for the cartesian product of the sweeps."""
    if not sweeps:
        yield {}, data
        return
    names = [name for name, _ in sweeps]
    for combo in itertools.product(*(values for _, values in sweeps)):
        doc = copy.deepcopy(data)
        for name, value in zip(names, combo):
            target, clears = SWEEP_TARGETS[name]
            node = doc
            for key in target[:-1]:
                node = node.get(key) if isinstance(node, dict) else None
                if not isinstance(node, dict):
                    raise ConfigurationError("sweep target is missing from the scenario",
                                             ".".join(target[:-1]))
            node[target[-1]] = value
            if clears is not None:
                node.pop(clears[-1], None)
        yield dict(zip(names, combo)), doc


def load_scenario_data(path):
    """Read a scenario file as a raw mapping (before validation)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}",
                                 "<root>") from None
    if not isinstance(data, dict):
        raise ConfigurationError("scenario must be a JSON object", "<root>")
    return data


def load_scenario(path) -> Scenario:
    path = Path(path)
    return parse_scenario(load_scenario_data(path), path.parent)
