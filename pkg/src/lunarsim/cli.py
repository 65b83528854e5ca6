"""``lunarsim`` command line: ``prep``, ``render`` and ``sequence``.

Exit codes: 0 success, 2 configuration error, 3 I/O or file-format error,
4 render error. ``LSR_LOG`` sets the log level (e.g. ``INFO``, ``DEBUG``).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .exceptions import ConfigurationError, GridFormatError, LunarSimError, RenderError
from .renderer import render, write_image
from .scenario import expand_sweeps, load_scenario_data, parse_scenario, parse_sweep
from .sequence import generate_sequence
from .terrain.io import load_dem, load_raster, save_raster, write_binary_grid
from .terrain.maps import compute_horizon_map, derive_displacement_map, derive_normal_map

logger = logging.getLogger("lunarsim")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_RENDER = 4

SHADOW_CHOICES = ("raymarch", "horizon", "horizon_map", "none")


def cmd_prep(dem_path, out_dir, n_azimuths=64, reference_elevation=0.0, albedo_path=None,
             workers=1):
    """Write the derived texture maps for ``dem_path`` into ``out_dir``.

    The horizon map is one binary raster of ``n_azimuths * rows`` rows: sector ``k``
    occupies rows ``k * rows`` to ``(k + 1) * rows - 1``.
    """
    dem = load_dem(dem_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    normals = derive_normal_map(dem)
    files = {
        "normal_x": "normal_x.ldem",
        "normal_y": "normal_y.ldem",
        "normal_z": "normal_z.ldem",
        "displacement": "displacement.ldem",
        "horizon": "horizon.ldem",
    }
    save_raster(normals.nx, out_dir / files["normal_x"])
    save_raster(normals.ny, out_dir / files["normal_y"])
    save_raster(normals.nz, out_dir / files["normal_z"])
    save_raster(derive_displacement_map(dem, reference_elevation), out_dir / files["displacement"])
    horizon = compute_horizon_map(dem, n_azimuths, workers=workers)
    write_binary_grid(horizon.angles.reshape(-1, dem.cols), dem.cell_size, out_dir / files["horizon"])
    if albedo_path is not None:
        files["albedo"] = "albedo.ldem"
        save_raster(load_raster(albedo_path, like=dem), out_dir / files["albedo"])
    report = {
        "dem": Path(dem_path).name,
        "rows": dem.rows,
        "cols": dem.cols,
        "cell_size": dem.cell_size,
        "origin_x": dem.origin_x,
        "origin_y": dem.origin_y,
        "min_elevation": dem.zmin,
        "max_elevation": dem.zmax,
        "nodata_cells": int(np.isnan(dem.values).sum()),
        "reference_elevation": float(reference_elevation),
        "n_azimuths": horizon.n_azimuths,
        "horizon_layout": "sector-major; sector k spans rows [k*rows, (k+1)*rows)",
        "files": files,
    }
    (out_dir / "prep_report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                                              encoding="utf-8")
    return report


def _scenarios(scenario_path, sweeps, shadow):
    data = load_scenario_data(scenario_path)
    parsed_sweeps = [parse_sweep(s) for s in sweeps or ()]
    base = Path(scenario_path).parent
    out = []
    for overrides, doc in expand_sweeps(data, parsed_sweeps):
        scenario = parse_scenario(doc, base)
        if shadow is not None:
            scenario = replace(scenario, options=replace(scenario.options, shadow_method=shadow))
        out.append((overrides, scenario))
    return out


def _indexed(path, k, n):
    path = Path(path)
    return path if n == 1 else path.with_name(f"{path.stem}_{k:03d}{path.suffix}")


def cmd_render(scenario_path, out_path, workers=1, shadow=None, dump_radiance=None, sweeps=None):
    """Render a pose-mode scenario (one image per sweep combination)."""
    variants = _scenarios(scenario_path, sweeps, shadow)
    written = []
    for k, (overrides, scenario) in enumerate(variants):
        if scenario.camera_pose is None:
            raise ConfigurationError("render needs a camera pose; use 'sequence' for "
                                     "trajectories", "camera.pose")
        scene = scenario.build_scene(workers)
        try:
            img = render(scene, workers=workers)
        except LunarSimError:
            raise
        except (ValueError, ArithmeticError, MemoryError) as exc:
            raise RenderError(f"{type(exc).__name__}: {exc}") from exc
        out = _indexed(out_path, k, len(variants))
        dump = _indexed(dump_radiance, k, len(variants)) if dump_radiance else None
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        extra = {"sweep": overrides} if overrides else None
        write_image(img, out, scene.intrinsics.exposure_scale, dump, extra)
        written.append(out)
    return written


def cmd_sequence(scenario_path, out_dir, workers=1, shadow=None, dump_radiance=None, sweeps=None):
    """Render a trajectory-mode scenario into ``out_dir`` (a subdirectory per sweep)."""
    variants = _scenarios(scenario_path, sweeps, shadow)
    manifests = []
    for k, (_, scenario) in enumerate(variants):
        if scenario.trajectory is None:
            raise ConfigurationError("sequence needs a trajectory", "trajectory")
        target = Path(out_dir) if len(variants) == 1 else Path(out_dir) / f"sweep_{k:03d}"
        scene = scenario.build_scene(workers)
        manifest = generate_sequence(scene, scenario.trajectory, target, workers,
                                     datum=scenario.reference_elevation,
                                     dump_dir=dump_radiance)
        manifests.append(manifest)
    return manifests


def build_parser():
    parser = argparse.ArgumentParser(prog="lunarsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--workers", type=int, default=1, help="row-parallel worker threads")
        p.add_argument("--shadow", choices=SHADOW_CHOICES, default=None,
                       help="override the scenario's shadow method")
        p.add_argument("--sweep", action="append", default=[], metavar="PARAM=LO:HI:N",
                       help="render a linear sweep of PARAM (repeatable; cartesian product)")

    p = sub.add_parser("prep", help="derive normal, displacement and horizon maps from a DEM")
    p.add_argument("dem")
    p.add_argument("out_dir")
    p.add_argument("--n-azimuths", type=int, default=64)
    p.add_argument("--reference-elevation", type=float, default=0.0)
    p.add_argument("--albedo", default=None, help="albedo raster to register and copy")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("render", help="render one image from a pose-mode scenario")
    p.add_argument("scenario")
    p.add_argument("out", help="output PGM path; a .json sidecar is written next to it")
    p.add_argument("--dump-radiance", default=None, metavar="PATH",
                   help="also write the float radiance image as an LDEM1 raster")
    common(p)

    p = sub.add_parser("sequence", help="render a trajectory-mode scenario")
    p.add_argument("scenario")
    p.add_argument("out_dir")
    p.add_argument("--dump-radiance", default=None, metavar="DIR",
                   help="also write per-frame float radiance rasters into DIR")
    common(p)
    return parser


def _configure_logging():
    level = os.environ.get("LSR_LOG", "WARNING").upper()
    numeric = getattr(logging, level, None)
    if not isinstance(numeric, int):
        numeric = int(level) if level.isdigit() else logging.WARNING
    logging.basicConfig(level=numeric, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "workers", 1) < 1:
            raise ConfigurationError("must be >= 1", "--workers")
        shadow = getattr(args, "shadow", None)
        if args.command == "prep":
            if args.n_azimuths < 4:
                raise ConfigurationError("must be >= 4", "--n-azimuths")
            cmd_prep(args.dem, args.out_dir, args.n_azimuths, args.reference_elevation,
                     args.albedo, args.workers)
        elif args.command == "render":
            cmd_render(args.scenario, args.out, args.workers, shadow, args.dump_radiance,
                       args.sweep)
        else:
            cmd_sequence(args.scenario, args.out_dir, args.workers, shadow, args.dump_radiance,
                         args.sweep)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GridFormatError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except LunarSimError as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return EXIT_RENDER
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to an exit code
        logger.debug("unexpected failure", exc_info=True)
        print(f"render error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RENDER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
