"""Pinhole camera: intrinsics, roll/pitch/yaw pose, ray generation, FOV and GSD.

Conventions: world frame x east, y north, z up. The camera looks along its local
-z axis; image ``u`` runs along camera +x and image ``v`` (downward) along camera -y,
so a nadir image at zero yaw has east to the right and north up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_finite, check_positive, check_vector3

# image v grows downward while camera +y points up
V_SIGN = -1.0


def normalize_angle(deg):
    """Wrap an angle in degrees into (-180, 180]."""
    deg = math.fmod(float(deg), 360.0)
    if deg > 180.0:
        deg -= 360.0
    elif deg <= -180.0:
        deg += 360.0
    return deg


@dataclass(frozen=True)
class Intrinsics:
    focal_length: float
    pixel_pitch: float
    width_px: int
    height_px: int
    exposure_scale: float = 1.0

    def __post_init__(self):
        check_positive(self.focal_length, "focal_length")
        check_positive(self.pixel_pitch, "pixel_pitch")
        check_positive(self.exposure_scale, "exposure_scale")
        for name in ("width_px", "height_px"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        for name in ("focal_length", "pixel_pitch", "exposure_scale"):
            object.__setattr__(self, name, float(getattr(self, name)))


@dataclass(frozen=True)
class Pose:
    """Camera position in meters and roll/pitch/yaw in degrees."""

    position: tuple[float, float, float]
    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0

    def __post_init__(self):
        pos = check_vector3(self.position, "position")
        object.__setattr__(self, "position", tuple(float(c) for c in pos))
        for name in ("roll", "pitch", "yaw"):
            value = check_finite(getattr(self, name), name)
            object.__setattr__(self, name, normalize_angle(value))

    @property
    def rotation(self) -> np.ndarray:
        return rotation_from_rpy(self.roll, self.pitch, self.yaw)

    def as_dict(self):
        return {"position": list(self.position), "roll": self.roll,
                "pitch": self.pitch, "yaw": self.yaw}


@dataclass(frozen=True)
class Ray:
    origin: np.ndarray
    direction: np.ndarray

    def at(self, t):
        return self.origin + t * self.direction


def rotation_from_rpy(roll, pitch, yaw) -> np.ndarray:
    """Camera-to-world rotation ``Rz(yaw) @ Ry(pitch) @ Rx(roll)`` (angles in degrees)."""
    r, p, y = (math.radians(a) for a in (roll, pitch, yaw))
    cr, sr = math.cos(r), math.sin(r)
    cp, sp = math.cos(p), math.sin(p)
    cy, sy = math.cos(y), math.sin(y)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cr, -sr], [0.0, sr, cr]])
    ry = np.array([[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]])
    rz = np.array([[cy, -sy, 0.0], [sy, cy, 0.0], [0.0, 0.0, 1.0]])
    return rz @ ry @ rx


def camera_direction(intrinsics, u, v):
    """Unit ray direction in the camera frame through image point ``(u, v)``."""
    cx = intrinsics.width_px / 2.0
    cy = intrinsics.height_px / 2.0
    d = np.array([
        (u + 0.5 - cx) * intrinsics.pixel_pitch,
        V_SIGN * (v + 0.5 - cy) * intrinsics.pixel_pitch,
        -intrinsics.focal_length,
    ])
    return d / np.linalg.norm(d)


def pixel_ray(intrinsics, pose, u, v) -> Ray:
    """World-space ray through pixel ``(u, v)``.

    The ray passes through ``(u + 0.5, v + 0.5)`` on the sensor, so ``u`` may range
    over ``[-0.5, width_px - 0.5]`` to reach the sensor edges.
    """
    if not (-0.5 <= u <= intrinsics.width_px - 0.5 and -0.5 <= v <= intrinsics.height_px - 0.5):
        raise IndexError(
            f"pixel ({u}, {v}) outside a {intrinsics.width_px}x{intrinsics.height_px} sensor"
        )
    d = pose.rotation @ camera_direction(intrinsics, u, v)
    return Ray(np.array(pose.position, dtype=np.float64), d / np.linalg.norm(d))


def fov_from_intrinsics(intrinsics) -> tuple[float, float]:
    """Horizontal and vertical field of view in degrees."""
    f = intrinsics.focal_length
    h = 2.0 * math.atan(intrinsics.width_px * intrinsics.pixel_pitch / (2.0 * f))
    v = 2.0 * math.atan(intrinsics.height_px * intrinsics.pixel_pitch / (2.0 * f))
    return math.degrees(h), math.degrees(v)


def ground_sample_distance(intrinsics, slant_range) -> float:
    """Ground footprint of one pixel at ``slant_range`` meters."""
    slant_range = float(slant_range)
    if not slant_range > 0:
        raise ValueError(f"slant_range must be positive, got {slant_range}")
    return slant_range * intrinsics.pixel_pitch / intrinsics.focal_length
