"""Georeferenced grids and the derived texture maps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .._validation import check_finite, check_grid, check_positive


@dataclass(frozen=True, eq=False)
class Raster:
    """Single-channel float grid with a square-celled, axis-aligned georeference.

    Cell ``(i, j)`` is centered at ``(origin_x + j * cell_size, origin_y + i * cell_size)``,
    so row 0 is the southern edge. NaN marks nodata; ``nodata`` keeps the sentinel
    used when the grid is written back to a text format.
    """

    values: np.ndarray
    cell_size: float = 1.0
    origin_x: float = 0.0
    origin_y: float = 0.0
    nodata: float | None = None

    _min_size = 1

    def __post_init__(self):
        values = check_grid(self.values, "values", self._min_size).copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "cell_size", check_positive(self.cell_size, "cell_size"))
        object.__setattr__(self, "origin_x", check_finite(self.origin_x, "origin_x"))
        object.__setattr__(self, "origin_y", check_finite(self.origin_y, "origin_y"))
        if self.nodata is not None:
            object.__setattr__(self, "nodata", float(self.nodata))

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """``(xmin, ymin, xmax, ymax)`` of the cell-center lattice."""
        return (
            self.origin_x,
            self.origin_y,
            self.origin_x + (self.cols - 1) * self.cell_size,
            self.origin_y + (self.rows - 1) * self.cell_size,
        )

    @property
    def center(self) -> tuple[float, float]:
        xmin, ymin, xmax, ymax = self.bounds
        return 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)

    def cell_center(self, i, j):
        return self.origin_x + j * self.cell_size, self.origin_y + i * self.cell_size

    def same_georeference(self, other) -> bool:
        return (
            self.shape == other.shape
            and self.cell_size == other.cell_size
            and self.origin_x == other.origin_x
            and self.origin_y == other.origin_y
        )

    def like(self, values, nodata=None) -> Raster:
        """A new :class:`Raster` on this grid's georeference."""
        return Raster(values, self.cell_size, self.origin_x, self.origin_y, nodata)

    def __eq__(self, other):
        if not isinstance(other, Raster):
            return NotImplemented
        return (
            self.same_georeference(other)
            and _same_sentinel(self.nodata, other.nodata)
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    __hash__ = None


def _same_sentinel(a, b):
    if a is None or b is None:
        return a is b
    return a == b or (math.isnan(a) and math.isnan(b))


@dataclass(frozen=True, eq=False)
class DemGrid(Raster):
    """Elevation raster in meters (at least 2x2 so every point has a bilinear patch)."""

    _min_size = 2

    @property
    def elevations(self) -> np.ndarray:
        return self.values

    @property
    def zmin(self) -> float:
        return float(np.nanmin(self.values))

    @property
    def zmax(self) -> float:
        return float(np.nanmax(self.values))


@dataclass(frozen=True)
class NormalMap:
    nx: Raster
    ny: Raster
    nz: Raster

    @property
    def vectors(self) -> np.ndarray:
        """``(rows, cols, 3)`` array of unit normals."""
        return np.stack([self.nx.values, self.ny.values, self.nz.values], axis=-1)


@dataclass(frozen=True, eq=False)
class HorizonMap:
    """Maximum terrain elevation angle (degrees) per azimuth sector and cell.

    Sector ``k`` is centered on azimuth ``k * 360 / n_azimuths`` degrees, measured
    clockwise from north (+y).
    """

    angles: np.ndarray
    cell_size: float = 1.0
    origin_x: float = 0.0
    origin_y: float = 0.0
    step: float | None = field(default=None)

    def __post_init__(self):
        angles = np.ascontiguousarray(self.angles, dtype=np.float64).copy()
        if angles.ndim != 3:
            raise ValueError(f"angles must be (n_azimuths, rows, cols), got {angles.shape}")
        angles.setflags(write=False)
        object.__setattr__(self, "angles", angles)

    @property
    def n_azimuths(self) -> int:
        return self.angles.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.angles.shape[1:]

    def sector(self, azimuth_deg):
        """Index of the sector whose center is nearest ``azimuth_deg``."""
        width = 360.0 / self.n_azimuths
        return np.floor(np.mod(azimuth_deg, 360.0) / width + 0.5).astype(int) % self.n_azimuths

    def nearest_cell(self, x, y):
        rows, cols = self.shape
        j = np.clip(np.floor((np.asarray(x) - self.origin_x) / self.cell_size + 0.5), 0, cols - 1)
        i = np.clip(np.floor((np.asarray(y) - self.origin_y) / self.cell_size + 0.5), 0, rows - 1)
        return i.astype(int), j.astype(int)

    def angle_at(self, x, y, azimuth_deg):
        i, j = self.nearest_cell(x, y)
        return self.angles[self.sector(azimuth_deg), i, j]

    def __eq__(self, other):
        if not isinstance(other, HorizonMap):
            return NotImplemented
        return (
            (self.cell_size, self.origin_x, self.origin_y)
            == (other.cell_size, other.origin_x, other.origin_y)
            and np.array_equal(self.angles, other.angles, equal_nan=True)
        )

    __hash__ = None


def grid_coords(raster, x, y):
    """World meters to fractional ``(col, row)`` grid coordinates."""
    return (
        (np.asarray(x, dtype=np.float64) - raster.origin_x) / raster.cell_size,
        (np.asarray(y, dtype=np.float64) - raster.origin_y) / raster.cell_size,
    )


def bilinear_grid(values, X, Y):
    """Vectorized bilinear interpolation at in-bounds fractional grid coordinates."""
    rows, cols = values.shape
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    j = np.clip(np.floor(X).astype(np.intp), 0, max(cols - 2, 0))
    i = np.clip(np.floor(Y).astype(np.intp), 0, max(rows - 2, 0))
    s = X - j
    r = Y - i
    j1 = np.minimum(j + 1, cols - 1)
    i1 = np.minimum(i + 1, rows - 1)
    lower = _lerp(values[i, j], values[i, j1], s)
    upper = _lerp(values[i1, j], values[i1, j1], s)
    return _lerp(lower, upper, r)


def _lerp(a, b, f):
    # anchored at the nearer end: exact at f = 0, f = 1 and when a == b
    return np.where(f < 0.5, a + f * (b - a), b - (1.0 - f) * (b - a))


def sample_bilinear(raster, x, y) -> float:
    """Bilinearly interpolate ``raster`` at world position ``(x, y)``.

    Exact at cell centers. Raises ``IndexError`` outside the cell-center lattice.
    """
    X, Y = grid_coords(raster, x, y)
    X, Y = float(X), float(Y)
    eps = 1e-9
    if not (-eps <= X <= raster.cols - 1 + eps and -eps <= Y <= raster.rows - 1 + eps):
        raise IndexError(f"point ({x}, {y}) lies outside the raster bounds {raster.bounds}")
    X = min(max(X, 0.0), raster.cols - 1.0)
    Y = min(max(Y, 0.0), raster.rows - 1.0)
    return float(bilinear_grid(raster.values, X, Y))
