"""Image sequences along camera trajectories (descent ladders, sun sweeps)."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .camera import Pose
from .exceptions import ConfigurationError, LunarSimError, RenderError
from .illumination import SunState
from .renderer import render, write_image

logger = logging.getLogger(__name__)

FRAME_PATTERN = "frame_{:06d}"
MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class Waypoint:
    """A camera key pose; give either ``position`` or ``altitude`` (above the datum)."""

    position: tuple[float, float, float] | None = None
    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0
    altitude: float | None = None
    sun: SunState | None = None

    def __post_init__(self):
        if (self.position is None) == (self.altitude is None):
            raise ValueError("waypoint needs exactly one of position or altitude")

    def resolve(self, center=(0.0, 0.0), datum=0.0) -> Pose:
        if self.position is not None:
            position = self.position
        else:
            position = (center[0], center[1], datum + self.altitude)
        return Pose(position, self.roll, self.pitch, self.yaw)


@dataclass(frozen=True)
class Trajectory:
    waypoints: tuple[Waypoint, ...]
    frames_between: int = 0

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        if int(self.frames_between) != self.frames_between or self.frames_between < 0:
            raise ConfigurationError(
                f"must be a non-negative integer, got {self.frames_between!r}", "frames_between"
            )

    @property
    def frame_count(self) -> int:
        n = len(self.waypoints)
        return n + self.frames_between * max(n - 1, 0)


@dataclass(frozen=True)
class Frame:
    index: int
    pose: Pose
    sun: SunState | None
    waypoint: int | None  # index of the waypoint this frame reproduces, if any


def _arc(a, b):
    """Signed shortest angular difference ``b - a`` in degrees."""
    return (b - a + 180.0) % 360.0 - 180.0


def _lerp_sun(a, b, f):
    return SunState(
        a.elevation + f * (b.elevation - a.elevation),
        a.azimuth + f * _arc(a.azimuth, b.azimuth),
        a.intensity + f * (b.intensity - a.intensity),
    )


def interpolate_trajectory(traj, center=(0.0, 0.0), datum=0.0, default_sun=None):
    """Expand ``traj`` into frames.

    Positions interpolate linearly and each angle along its shortest arc.
    Waypoints are reproduced exactly. A waypoint without a sun override uses
    ``default_sun`` when its neighbour has one.
    """
    if not traj.waypoints:
        raise ConfigurationError("trajectory has no waypoints", "trajectory.waypoints")
    poses = [w.resolve(center, datum) for w in traj.waypoints]
    any_sun = any(w.sun is not None for w in traj.waypoints)
    suns = [w.sun if w.sun is not None else default_sun for w in traj.waypoints]
    if any_sun and default_sun is None and any(s is None for s in suns):
        raise ConfigurationError("sun overrides must be given on every waypoint or none",
                                 "trajectory.waypoints")
    if not any_sun:
        suns = [None] * len(poses)

    frames = []
    n_sub = traj.frames_between + 1
    for k in range(len(poses) - 1):
        a, b = poses[k], poses[k + 1]
        frames.append(Frame(len(frames), a, suns[k], k))
        for m in range(1, n_sub):
            f = m / n_sub
            pos = tuple(pa + f * (pb - pa) for pa, pb in zip(a.position, b.position))
            pose = Pose(
                pos,
                a.roll + f * _arc(a.roll, b.roll),
                a.pitch + f * _arc(a.pitch, b.pitch),
                a.yaw + f * _arc(a.yaw, b.yaw),
            )
            sun = _lerp_sun(suns[k], suns[k + 1], f) if suns[k] is not None else None
            frames.append(Frame(len(frames), pose, sun, None))
    frames.append(Frame(len(frames), poses[-1], suns[-1], len(poses) - 1))
    return frames


def frame_scene(scene, frame):
    scene = scene.with_pose(frame.pose)
    if frame.sun is not None:
        scene = scene.with_sun(frame.sun)
    return scene


def generate_sequence(scene, traj, out_dir, workers=1, datum=0.0, dump_dir=None):
    """Render every frame of ``traj`` into ``out_dir`` and write ``manifest.json``.

    Altitude waypoints are placed over the DEM center. With ``dump_dir`` the float
    radiance of each frame is also written there as ``frame_%06d.ldem``. Returns the
    manifest dict.
    """
    out_dir = Path(out_dir)
    frames = interpolate_trajectory(traj, scene.dem.center, datum, scene.sun)
    out_dir.mkdir(parents=True, exist_ok=True)
    if dump_dir is not None:
        Path(dump_dir).mkdir(parents=True, exist_ok=True)
    entries = []
    for frame in frames:
        stem = FRAME_PATTERN.format(frame.index)
        try:
            img = render(frame_scene(scene, frame), workers=workers)
        except LunarSimError as exc:
            raise RenderError(str(exc), frame.index) from exc
        except (ValueError, ArithmeticError, MemoryError) as exc:
            raise RenderError(f"{type(exc).__name__}: {exc}", frame.index) from exc
        dump = Path(dump_dir) / f"{stem}.ldem" if dump_dir is not None else None
        write_image(img, out_dir / f"{stem}.pgm", scene.intrinsics.exposure_scale, dump,
                    extra={"frame_index": frame.index})
        logger.info("frame %d rendered", frame.index)
        entries.append({
            "index": frame.index,
            "image": f"{stem}.pgm",
            "metadata": f"{stem}.json",
            "pose": frame.pose.as_dict(),
            "sun": (frame.sun or scene.sun).as_dict(),
            "waypoint": frame.waypoint,
        })
    manifest = {
        "frame_count": len(entries),
        "frames_between": traj.frames_between,
        "waypoint_count": len(traj.waypoints),
        "frames": entries,
    }
    (out_dir / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                         encoding="utf-8")
    return manifest
