"""Texture maps derived from a DEM: normal, displacement and horizon maps."""

from __future__ import annotations

import numpy as np

from .. import _kernels
from .._parallel import run_row_blocks
from .grid import HorizonMap, NormalMap


def derive_normal_map(dem) -> NormalMap:
    """Unit surface normals ``(-dz/dx, -dz/dy, 1)`` normalized.

    Central differences inside the grid, one-sided differences on the edges.
    Nodata propagates to every cell whose stencil touches it.
    """
    z = dem.values
    dz_dy, dz_dx = np.gradient(z, dem.cell_size, edge_order=1)
    nx, ny = -dz_dx, -dz_dy
    norm = np.sqrt(nx * nx + ny * ny + 1.0)
    return NormalMap(dem.like(nx / norm), dem.like(ny / norm), dem.like(1.0 / norm))


def derive_displacement_map(dem, reference_elevation=0.0):
    """Height of each cell relative to ``reference_elevation``."""
    return dem.like(dem.values - float(reference_elevation), dem.nodata)


def compute_horizon_map(dem, n_azimuths=64, step=None, workers=1) -> HorizonMap:
    """Per-cell maximum horizon elevation angle for ``n_azimuths`` sector directions.

    Each sector is probed along its center azimuth from the cell center to the grid
    edge in steps of ``step`` meters (default half a cell). Angles are floored at 0.
    """
    n_azimuths = int(n_azimuths)
    if n_azimuths < 4:
        raise ValueError(f"n_azimuths must be >= 4, got {n_azimuths}")
    if step is None:
        step = 0.5 * dem.cell_size
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    out = np.empty((n_azimuths, dem.rows, dem.cols), dtype=np.float64)
    z = np.ascontiguousarray(dem.values)

    def work(lo, hi):
        _kernels.horizon_rows(z, dem.cell_size, n_azimuths, step / dem.cell_size, lo, hi, out)

    run_row_blocks(work, dem.rows, workers)
    return HorizonMap(out, dem.cell_size, dem.origin_x, dem.origin_y, step)
