"""Heightfield ray casting, cast shadows, shading and image output."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import _kernels
from ._parallel import run_row_blocks
from .camera import V_SIGN, Intrinsics, Pose, ground_sample_distance, pixel_ray
from .exceptions import ConfigurationError
from .illumination import SunState, sun_direction
from .photometry import ReflectanceModel, ShadingGeometry, shade
from .terrain.grid import DemGrid, HorizonMap, NormalMap, Raster, bilinear_grid, grid_coords
from .terrain.io import write_binary_grid, write_pgm
from .terrain.maps import compute_horizon_map, derive_normal_map

logger = logging.getLogger(__name__)

SHADOW_METHODS = ("raymarch", "horizon_map", "none")
_SHADOW_ALIASES = {"horizon": "horizon_map"}

# shadow-ray start offset along the surface normal, in cells
SHADOW_LIFT = 1e-3


@dataclass(frozen=True)
class RenderOptions:
    shadow_method: str = "raymarch"
    shadow_step: float | None = None  # meters; None means half a cell
    max_range: float = math.inf
    background: float = 0.0
    n_azimuths: int = 64
    light_distance: float | None = None  # finite light distance for the ls_paper law

    def __post_init__(self):
        method = _SHADOW_ALIASES.get(self.shadow_method, self.shadow_method)
        if method not in SHADOW_METHODS:
            raise ValueError(f"shadow_method must be one of {SHADOW_METHODS}, got {self.shadow_method!r}")
        object.__setattr__(self, "shadow_method", method)
        if self.shadow_step is not None and not self.shadow_step > 0:
            raise ValueError(f"shadow_step must be positive, got {self.shadow_step}")
        if not self.max_range > 0:
            raise ValueError(f"max_range must be positive, got {self.max_range}")
        if not math.isfinite(self.background) or self.background < 0:
            raise ValueError(f"background must be a finite radiance >= 0, got {self.background}")
        if self.light_distance is not None and not (
            math.isfinite(self.light_distance) and self.light_distance > 0
        ):
            raise ValueError(f"light_distance must be positive, got {self.light_distance}")
        if int(self.n_azimuths) < 4:
            raise ValueError(f"n_azimuths must be >= 4, got {self.n_azimuths}")

    def step_for(self, dem):
        return 0.5 * dem.cell_size if self.shadow_step is None else float(self.shadow_step)


@dataclass(frozen=True)
class Scene:
    """Everything a render needs. Build with :meth:`Scene.build` to derive the maps."""

    dem: DemGrid
    albedo: Raster
    normals: NormalMap
    sun: SunState
    intrinsics: Intrinsics
    pose: Pose
    model: ReflectanceModel = field(default_factory=ReflectanceModel)
    options: RenderOptions = field(default_factory=RenderOptions)
    horizon: HorizonMap | None = None

    def __post_init__(self):
        if not self.albedo.same_georeference(self.dem):
            raise ConfigurationError(
                f"albedo raster {self.albedo.rows}x{self.albedo.cols} is not registered "
                f"to the {self.dem.rows}x{self.dem.cols} DEM",
                "albedo",
            )
        vals = self.albedo.values
        finite = vals[~np.isnan(vals)]
        if finite.size and (finite.min() < 0 or finite.max() > 1):
            raise ConfigurationError("albedo values must lie in [0, 1]", "albedo")
        if self.options.shadow_method == "horizon_map" and self.horizon is None:
            raise ConfigurationError("horizon_map shadows need a horizon map", "options.shadow_method")

    @classmethod
    def build(cls, dem, sun, intrinsics, pose, albedo=1.0, model=None, options=None,
              normals=None, horizon=None, workers=1):
        """Assemble a scene, deriving the normal map (and horizon map when needed).

        ``albedo`` may be a :class:`Raster` on the DEM grid or a uniform value.
        """
        options = options or RenderOptions()
        if not isinstance(albedo, Raster):
            value = float(albedo)
            albedo = dem.like(np.full(dem.shape, value))
        elif not albedo.same_georeference(dem) and albedo.shape == dem.shape:
            albedo = dem.like(albedo.values, albedo.nodata)
        if normals is None:
            normals = derive_normal_map(dem)
        if horizon is None and options.shadow_method == "horizon_map":
            horizon = compute_horizon_map(dem, options.n_azimuths, options.step_for(dem), workers)
        return cls(dem, albedo, normals, sun, intrinsics, pose,
                   model or ReflectanceModel(), options, horizon)

    def with_pose(self, pose):
        return replace(self, pose=pose)

    def with_sun(self, sun):
        return replace(self, sun=sun)


@dataclass(frozen=True)
class Hit:
    point: np.ndarray
    t: float
    cell: tuple[int, int]
    nodata: bool = False


@dataclass
class ImageBuffer:
    width_px: int
    height_px: int
    radiance: np.ndarray
    metadata: dict
    hit_mask: np.ndarray
    shadow_mask: np.ndarray
    points: np.ndarray  # (height, width, 3) surface hits, NaN where the ray missed


def intersect_heightfield(dem, ray, max_range=math.inf):
    """First hit of ``ray`` on the bilinear DEM surface, or ``None``."""
    d = np.asarray(ray.direction, dtype=np.float64)
    if abs(np.linalg.norm(d) - 1.0) > 1e-9:
        raise ValueError("ray direction must be a unit vector")
    o = np.asarray(ray.origin, dtype=np.float64)
    X, Y = grid_coords(dem, o[0], o[1])
    t, i, j, status = _kernels.intersect(
        np.ascontiguousarray(dem.values), dem.zmin, dem.zmax, dem.cell_size,
        float(X), float(Y), o[2], d[0], d[1], d[2], float(max_range),
    )
    if status == _kernels.MISS:
        return None
    return Hit(o + t * d, t, (int(i), int(j)), status == _kernels.NODATA_HIT)


def shadow_test(dem, horizon, point, sun_dir, opts, normal=(0.0, 0.0, 1.0)) -> bool:
    """True when ``point`` does not see the sun.

    The point is first lifted by ``1e-3 * cell_size`` along ``normal``.
    """
    sun_dir = np.asarray(sun_dir, dtype=np.float64)
    if opts.shadow_method == "none":
        return False
    if sun_dir[2] <= 0:
        return True
    point = np.asarray(point, dtype=np.float64)
    if opts.shadow_method == "horizon_map":
        if horizon is None:
            raise ConfigurationError("horizon_map shadows need a horizon map", "horizon")
        elevation = math.degrees(math.asin(min(1.0, sun_dir[2])))
        azimuth = math.degrees(math.atan2(sun_dir[0], sun_dir[1]))
        return bool(elevation < horizon.angle_at(point[0], point[1], azimuth))
    p = point + SHADOW_LIFT * dem.cell_size * np.asarray(normal, dtype=np.float64)
    return bool(_kernels.march_shadow(
        np.ascontiguousarray(dem.values), dem.zmax, dem.origin_x, dem.origin_y, dem.cell_size,
        p[0], p[1], p[2], sun_dir[0], sun_dir[1], sun_dir[2], opts.step_for(dem),
    ))


def _sample(raster_values, dem, pts):
    X, Y = grid_coords(dem, pts[:, 0], pts[:, 1])
    X = np.clip(X, 0.0, dem.cols - 1.0)
    Y = np.clip(Y, 0.0, dem.rows - 1.0)
    return bilinear_grid(raster_values, X, Y)


def render(scene, workers=1) -> ImageBuffer:
    """Render ``scene`` into a radiance image.

    Rows are split into contiguous blocks across ``workers`` threads; every block
    writes only its own rows, so the output does not depend on ``workers``.
    """
    dem, intr, pose, opts = scene.dem, scene.intrinsics, scene.pose, scene.options
    W, H = intr.width_px, intr.height_px
    z = np.ascontiguousarray(dem.values)
    zmin, zmax = dem.zmin, dem.zmax
    rot = np.ascontiguousarray(pose.rotation)
    pos = np.array(pose.position, dtype=np.float64)

    t = np.empty((H, W))
    status = np.empty((H, W), dtype=np.int8)
    dirs = np.empty((H, W, 3))

    def cast(lo, hi):
        _kernels.cast_rows(z, zmin, zmax, dem.origin_x, dem.origin_y, dem.cell_size, rot,
                           intr.focal_length, intr.pixel_pitch, W, H, V_SIGN, pos,
                           float(opts.max_range), lo, hi, t, status, dirs)

    run_row_blocks(cast, H, workers)

    hit = status == _kernels.HIT
    pts = pos + t[..., None] * dirs
    pts[~hit] = 0.0

    sun_dir = sun_direction(scene.sun)
    hp = pts[hit]
    normals = np.zeros((H, W, 3))
    normals[..., 2] = 1.0
    if hp.size:
        n = np.stack([_sample(scene.normals.nx.values, dem, hp),
                      _sample(scene.normals.ny.values, dem, hp),
                      _sample(scene.normals.nz.values, dem, hp)], axis=-1)
        n /= np.linalg.norm(n, axis=-1, keepdims=True)
        normals[hit] = n
    albedo = np.zeros((H, W))
    albedo[hit] = _sample(scene.albedo.values, dem, hp) if hp.size else 0.0

    shadow = np.zeros((H, W), dtype=np.bool_)
    method = opts.shadow_method
    if method != "none" and hit.any():
        if sun_dir[2] <= 0:
            shadow[hit] = True
        elif method == "raymarch":
            step = opts.step_for(dem)
            lift = SHADOW_LIFT * dem.cell_size
            def march(lo, hi):
                _kernels.shadow_rows(z, zmax, dem.origin_x, dem.origin_y, dem.cell_size,
                                     pts, normals, hit, sun_dir, step, lift, lo, hi, shadow)
            run_row_blocks(march, H, workers)
        else:
            angles = scene.horizon.angle_at(hp[:, 0], hp[:, 1], scene.sun.azimuth)
            shadow[hit] = scene.sun.elevation < angles

    view = -dirs
    cos_i = normals @ sun_dir
    cos_e = np.einsum("hwk,hwk->hw", normals, view)
    rng = 1.0 if opts.light_distance is None else opts.light_distance
    geom = ShadingGeometry(cos_i, cos_e, rng, shadow)
    with np.errstate(invalid="ignore"):
        radiance = np.asarray(shade(scene.model, albedo, scene.sun.intensity, geom), dtype=np.float64)
    radiance = np.where(hit & np.isfinite(radiance), radiance, 0.0)
    radiance[status == _kernels.MISS] = opts.background

    phase = np.degrees(np.arccos(np.clip(view[hit] @ sun_dir, -1.0, 1.0)))
    metadata = {
        "sun": scene.sun.as_dict(),
        "pose": pose.as_dict(),
        "model": scene.model.as_dict(),
        "shadow_method": method,
        "image_size": [W, H],
        "hit_fraction": float(hit.mean()),
        "mean_phase_angle": float(phase.mean()) if phase.size else None,
    }
    metadata.update(_center_gsd(scene))
    pts[~hit] = np.nan
    return ImageBuffer(W, H, radiance, metadata, hit, shadow & hit, pts)


def _center_gsd(scene):
    intr = scene.intrinsics
    ray = pixel_ray(intr, scene.pose, intr.width_px / 2.0 - 0.5, intr.height_px / 2.0 - 0.5)
    hit = intersect_heightfield(scene.dem, ray, scene.options.max_range)
    if hit is None or hit.t <= 0:
        return {"center_slant_range": None, "center_gsd": None}
    return {"center_slant_range": float(hit.t),
            "center_gsd": ground_sample_distance(intr, hit.t)}


def quantize(img, exposure_scale=1.0) -> np.ndarray:
    """8-bit digital numbers ``round(clamp(radiance * exposure_scale, 0, 1) * 255)``."""
    if not exposure_scale > 0:
        raise ValueError(f"exposure_scale must be positive, got {exposure_scale}")
    radiance = img.radiance if isinstance(img, ImageBuffer) else np.asarray(img)
    scaled = np.clip(radiance * exposure_scale, 0.0, 1.0) * 255.0
    return np.floor(scaled + 0.5).astype(np.uint8)


def write_image(img, path, exposure_scale=1.0, dump_radiance=None, extra=None):
    """Write the PGM, its JSON sidecar and optionally a float radiance dump."""
    path = Path(path)
    write_pgm(path, quantize(img, exposure_scale))
    meta = dict(img.metadata)
    meta["exposure_scale"] = exposure_scale
    if extra:
        meta.update(extra)
    if dump_radiance is not None:
        # row 0 of the dump is the top image row
        write_binary_grid(img.radiance, 1.0, dump_radiance)
        meta["radiance_dump"] = Path(dump_radiance).name
    sidecar = path.with_suffix(".json")
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return sidecar
