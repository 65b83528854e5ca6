"""Surface reflectance laws and their composition with albedo.

The Lommel-Seeliger and Hapke forms here are the simplified closed forms this
simulator standardizes on (keyed ``ls_paper`` and ``hapke_paper``), not the full
literature models: the first has no angular term, the second no phase function
or H-functions. All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LAMBERT = "lambert"
LS_PAPER = "ls_paper"
HAPKE_PAPER = "hapke_paper"

_ALIASES = {
    "lambert": LAMBERT,
    "lambertian": LAMBERT,
    "ls_paper": LS_PAPER,
    "lommel_seeliger": LS_PAPER,
    "lommelseeliger": LS_PAPER,
    "hapke_paper": HAPKE_PAPER,
    "hapke": HAPKE_PAPER,
}


def _scalar_or_array(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


@dataclass(frozen=True)
class ReflectanceModel:
    kind: str = LAMBERT
    B0: float = 0.0

    def __post_init__(self):
        key = str(self.kind).lower().replace("-", "_")
        if key not in _ALIASES:
            raise ValueError(
                f"unknown reflectance model {self.kind!r}; expected one of "
                f"{LAMBERT!r}, {LS_PAPER!r}, {HAPKE_PAPER!r}"
            )
        object.__setattr__(self, "kind", _ALIASES[key])
        object.__setattr__(self, "B0", float(self.B0))
        if self.kind == HAPKE_PAPER:
            _check_b0(self.B0)

    def as_dict(self):
        return {"kind": self.kind, "B0": self.B0}


@dataclass(frozen=True)
class ShadingGeometry:
    """Per-sample geometry; fields may be scalars or equally shaped arrays."""

    cos_incidence: object = 1.0
    cos_emission: object = 1.0
    range_to_light: object = 1.0
    in_shadow: object = False


def _check_b0(B0):
    if not 0.0 <= B0 <= 1.0:
        raise ValueError(f"B0 must lie in [0, 1], got {B0}")


def lambert(I0, cos_incidence):
    """``I0 * cos(theta)`` with back-facing geometry clamped to zero."""
    return _scalar_or_array(I0 * np.maximum(cos_incidence, 0.0))


def lommel_seeliger(I0, range_to_light):
    """``(I0 / pi) / r**2``."""
    r = np.asarray(range_to_light, dtype=np.float64)
    if np.any(~(r > 0)):
        raise ValueError(f"range_to_light must be positive, got {range_to_light!r}")
    return _scalar_or_array((I0 / np.pi) * (1.0 / (r * r)))


def hapke_bracket(B0):
    """Backscatter factor ``(1 - B0) / (1 + B0) + B0``."""
    return (1.0 - B0) / (1.0 + B0) + B0


def hapke(I0, cos_t1, cos_t2, B0):
    """``I0 * cos(t1) * cos(t2) / pi * ((1 - B0) / (1 + B0) + B0)``, cosines clamped at 0."""
    B0 = float(B0)
    _check_b0(B0)
    geom = np.maximum(cos_t1, 0.0) * np.maximum(cos_t2, 0.0) / np.pi
    return _scalar_or_array(I0 * geom * hapke_bracket(B0))


def shade(model, albedo, I0, geom):
    """Radiance leaving the surface: albedo times the selected law, zero in shadow."""
    if model.kind == LAMBERT:
        radiance = lambert(I0, geom.cos_incidence)
    elif model.kind == LS_PAPER:
        radiance = lommel_seeliger(I0, geom.range_to_light)
    else:
        radiance = hapke(I0, geom.cos_incidence, geom.cos_emission, model.B0)
    out = np.where(geom.in_shadow, 0.0, np.asarray(albedo) * radiance)
    return _scalar_or_array(out)
