"""scikit-learn style facade over the render pipeline.

``fit`` takes the terrain and derives the texture maps once; ``predict`` renders
radiance images for a batch of camera poses and ``transform`` returns the
quantized 8-bit images. Hyperparameters are plain constructor arguments, so
``get_params``/``set_params``/``clone`` and grid-style sweeps work as usual.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_poses
from .camera import Intrinsics, Pose
from .illumination import SunState
from .photometry import ReflectanceModel
from .renderer import RenderOptions, Scene, quantize, render
from .terrain.grid import DemGrid, Raster
from .terrain.maps import compute_horizon_map, derive_displacement_map, derive_normal_map


class LunarSurfaceSimulator(TransformerMixin, BaseEstimator):
    """Render synthetic images of a terrain patch for batches of camera poses.

    Poses are rows ``(x, y, z, roll, pitch, yaw)`` in meters and degrees.

    Parameters
    ----------
    focal_length, pixel_pitch : float
        Camera intrinsics in meters.
    width_px, height_px : int
        Image size.
    exposure_scale : float
        Radiance to normalized-DN multiplier used by :meth:`transform`.
    sun_elevation, sun_azimuth : float
        Degrees; azimuth clockwise from north.
    sun_intensity : float
        Incident flux.
    model : {"lambert", "ls_paper", "hapke_paper"}
    B0 : float
        Backscatter parameter of ``hapke_paper``.
    shadow_method : {"raymarch", "horizon_map", "none"}
    cell_size : float
        Used only when ``fit`` receives a bare elevation array.
    workers : int
        Row-parallel threads per render; the output does not depend on it.
    """

    def __init__(self, focal_length=0.05, pixel_pitch=1e-5, width_px=128, height_px=128,
                 exposure_scale=1.0, sun_elevation=30.0, sun_azimuth=90.0, sun_intensity=1.0,
                 model="lambert", B0=0.0, shadow_method="raymarch", shadow_step=None,
                 max_range=math.inf, background=0.0, n_azimuths=64, light_distance=None,
                 reference_elevation=0.0, cell_size=1.0, workers=1):
        self.focal_length = focal_length
        self.pixel_pitch = pixel_pitch
        self.width_px = width_px
        self.height_px = height_px
        self.exposure_scale = exposure_scale
        self.sun_elevation = sun_elevation
        self.sun_azimuth = sun_azimuth
        self.sun_intensity = sun_intensity
        self.model = model
        self.B0 = B0
        self.shadow_method = shadow_method
        self.shadow_step = shadow_step
        self.max_range = max_range
        self.background = background
        self.n_azimuths = n_azimuths
        self.light_distance = light_distance
        self.reference_elevation = reference_elevation
        self.cell_size = cell_size
        self.workers = workers

    def _options(self):
        return RenderOptions(self.shadow_method, self.shadow_step, self.max_range,
                             self.background, self.n_azimuths, self.light_distance)

    def fit(self, X, y=None, albedo=None):
        """Derive normal, displacement and (if needed) horizon maps from the DEM ``X``.

        ``X`` is a :class:`DemGrid` or a 2-D elevation array. ``albedo`` is a raster
        registered to the DEM, an array of the same shape, or a uniform value.
        """
        dem = X if isinstance(X, DemGrid) else DemGrid(np.asarray(X), self.cell_size)
        if albedo is None:
            albedo = 1.0
        elif not isinstance(albedo, (Raster, float, int)):
            albedo = dem.like(np.asarray(albedo, dtype=np.float64))
        options = self._options()
        self.dem_ = dem
        self.normals_ = derive_normal_map(dem)
        self.displacement_ = derive_displacement_map(dem, self.reference_elevation)
        self.horizon_ = None
        if options.shadow_method == "horizon_map":
            self.horizon_ = compute_horizon_map(dem, options.n_azimuths,
                                                options.step_for(dem), self.workers)
        cx, cy = dem.center
        self.scene_ = Scene.build(
            dem, SunState(self.sun_elevation, self.sun_azimuth, self.sun_intensity),
            self._intrinsics(), Pose((cx, cy, dem.zmax + 1.0)), albedo,
            ReflectanceModel(self.model, self.B0), options,
            normals=self.normals_, horizon=self.horizon_,
        )
        self.n_features_in_ = 6
        return self

    def _intrinsics(self):
        return Intrinsics(self.focal_length, self.pixel_pitch, self.width_px, self.height_px,
                          self.exposure_scale)

    def render_pose(self, pose):
        """Full :class:`ImageBuffer` (with metadata) for one pose row."""
        check_is_fitted(self, "scene_")
        x, y, z, roll, pitch, yaw = check_poses(pose)[0]
        return render(self.scene_.with_pose(Pose((x, y, z), roll, pitch, yaw)), self.workers)

    def predict(self, X):
        """Radiance images, shape ``(n_poses, height_px, width_px)``."""
        check_is_fitted(self, "scene_")
        poses = check_poses(X)
        return np.stack([self.render_pose(p).radiance for p in poses])

    def transform(self, X):
        """Quantized 8-bit images, shape ``(n_poses, height_px, width_px)``."""
        return quantize(self.predict(X), self.exposure_scale)

    def fit_transform(self, X, y=None, **fit_params):
        raise TypeError("fit takes a DEM while transform takes poses; call them separately")
