"""Directional sun placement and phase-angle geometry."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_finite, check_in_range, check_unit_vector


@dataclass(frozen=True)
class SunState:
    """Sun elevation above the horizon and azimuth clockwise from north, in degrees."""

    elevation: float
    azimuth: float = 0.0
    intensity: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "elevation", check_in_range(self.elevation, "elevation", -90.0, 90.0))
        object.__setattr__(self, "azimuth", check_finite(self.azimuth, "azimuth"))
        intensity = check_finite(self.intensity, "intensity")
        if intensity < 0:
            raise ValueError(f"intensity must be >= 0, got {intensity}")
        object.__setattr__(self, "intensity", intensity)

    @classmethod
    def from_phase_angle(cls, phase_angle, azimuth=0.0, intensity=1.0):
        """Sun placement giving ``phase_angle`` at flat ground seen by a nadir camera."""
        phase_angle = check_in_range(phase_angle, "phase_angle", 0.0, 180.0)
        return cls(90.0 - phase_angle, azimuth, intensity)

    @property
    def direction(self) -> np.ndarray:
        return sun_direction(self)

    def as_dict(self):
        return {"elevation": self.elevation, "azimuth": self.azimuth, "intensity": self.intensity}


def sun_direction(sun) -> np.ndarray:
    """Unit vector from the surface toward the sun."""
    el = math.radians(sun.elevation)
    az = math.radians(sun.azimuth)
    return np.array([math.sin(az) * math.cos(el), math.cos(az) * math.cos(el), math.sin(el)])


def phase_angle(sun_dir, view_dir) -> float:
    """Angle in degrees between the directions to the sun and to the observer."""
    s = check_unit_vector(sun_dir, "sun_dir")
    v = check_unit_vector(view_dir, "view_dir")
    return math.degrees(math.acos(min(1.0, max(-1.0, float(s @ v)))))
