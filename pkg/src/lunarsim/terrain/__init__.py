"""Terrain inputs (DEM, albedo) and the texture maps derived from them."""

from .grid import DemGrid, HorizonMap, NormalMap, Raster, sample_bilinear
from .io import load_dem, load_raster, read_pgm, save_dem, save_raster, write_pgm
from .maps import compute_horizon_map, derive_displacement_map, derive_normal_map

__all__ = [
    "DemGrid",
    "HorizonMap",
    "NormalMap",
    "Raster",
    "compute_horizon_map",
    "derive_displacement_map",
    "derive_normal_map",
    "load_dem",
    "load_raster",
    "read_pgm",
    "sample_bilinear",
    "save_dem",
    "save_raster",
    "write_pgm",
]
