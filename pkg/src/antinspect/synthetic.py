"""Seeded synthetic missions: detections, IMU trace, and ground truth.

The camera pans with a constant base velocity plus piecewise-constant
random accelerations reported through the IMU (already expressed in the
tracker's image-plane convention). Targets sit nearly still in world
coordinates and are visible during one contiguous frame window each; the
sensor is treated as an unbounded plane, so no field-of-view clipping is
applied. Detector imperfections are modeled with bounded center/size
jitter, occasional low confidence scores, per-frame misses, and one-frame
clutter detections.

Every emitted true detection is recorded in the truth block, which is
what test oracles use to reason about what the tracker should have done.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import (
    BoundingBox,
    Detection,
    FrameRecord,
    GroundTruthLabel,
    ImuSample,
)
from .errors import ConfigError


@dataclass
class GeneratorConfig:
    duration_s: float = 40.0
    frame_rate: float = 30.0
    n_targets: int = 22
    # Targets are placed at least this far apart in world coordinates so
    # association stays unambiguous.
    min_separation_px: float = 260.0
    world_extent_px: float = 4000.0
    target_speed_px_s: float = 3.0
    size_min_px: float = 40.0
    size_max_px: float = 110.0
    oversize_prob: float = 0.08
    oversize_min_px: float = 150.0
    oversize_max_px: float = 320.0
    min_visible_s: float = 0.1
    max_visible_s: float = 15.0
    short_window_prob: float = 0.15
    center_jitter_px: float = 1.5
    size_jitter_px: float = 2.0
    miss_prob: float = 0.03
    low_score_prob: float = 0.08
    clutter_per_frame: float = 0.3
    cam_speed_px_s: float = 10.0
    cam_accel_max_m_s2: float = 0.4
    accel_segment_s: float = 1.0
    imu_scale: float = 10.0
    seed: int = 0

    def validate(self) -> None:
        if self.duration_s <= 0 or self.frame_rate <= 0:
            raise ConfigError("generator duration_s and frame_rate must be > 0")
        if self.n_targets < 0:
            raise ConfigError(f"generator.n_targets must be >= 0, got {self.n_targets}")
        if not (0.0 < self.size_min_px <= self.size_max_px):
            raise ConfigError("generator size range must satisfy 0 < min <= max")
        for name in ("miss_prob", "low_score_prob", "oversize_prob", "short_window_prob"):
            if not (0.0 <= getattr(self, name) <= 1.0):
                raise ConfigError(f"generator.{name} must be in [0, 1]")
        if self.clutter_per_frame < 0:
            raise ConfigError("generator.clutter_per_frame must be >= 0")
        if self.imu_scale <= 0:
            raise ConfigError("generator.imu_scale must be > 0")


@dataclass(frozen=True)
class TargetTruth:
    """One planted target: identity, visibility window, and base geometry."""

    target_id: int
    first_frame: int
    last_frame: int
    class_id: int
    base_w: float
    base_h: float
    oversized: bool


@dataclass(frozen=True)
class Emission:
    """One true detection that made it into the stream."""

    frame_index: int
    target_id: int
    cx: float
    cy: float
    w: float
    h: float


@dataclass(frozen=True)
class SyntheticMission:
    frames: tuple[FrameRecord, ...]
    imu: tuple[ImuSample, ...]
    labels: tuple[GroundTruthLabel, ...]
    targets: tuple[TargetTruth, ...]
    emissions: tuple[Emission, ...]

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    @property
    def duration_s(self) -> float:
        if len(self.frames) < 2:
            return 1.0
        dt = self.frames[1].timestamp - self.frames[0].timestamp
        return self.frames[-1].timestamp - self.frames[0].timestamp + dt

    def emissions_by_target(self) -> dict[int, list[Emission]]:
        out: dict[int, list[Emission]] = {}
        for em in self.emissions:
            out.setdefault(em.target_id, []).append(em)
        return out


def _place_targets(config: GeneratorConfig, rng: np.random.Generator) -> np.ndarray:
    """World positions pairwise at least min_separation_px apart."""
    positions: list[np.ndarray] = []
    attempts = 0
    while len(positions) < config.n_targets:
        candidate = rng.uniform(0.0, config.world_extent_px, size=2)
        if all(
            np.linalg.norm(candidate - p) >= config.min_separation_px for p in positions
        ):
            positions.append(candidate)
        attempts += 1
        if attempts > 50_000:
            raise ConfigError(
                "could not place targets with the requested separation; "
                "increase world_extent_px or lower n_targets"
            )
    return np.array(positions) if positions else np.zeros((0, 2))


def generate_mission(config: GeneratorConfig | None = None) -> SyntheticMission:
    """Build one deterministic mission from the config's seed."""
    config = config or GeneratorConfig()
    config.validate()
    rng = np.random.default_rng(config.seed)
    dt = 1.0 / config.frame_rate
    n_frames = int(round(config.duration_s * config.frame_rate))

    # IMU: piecewise-constant acceleration, fresh draw every accel_segment_s.
    seg_frames = max(1, int(round(config.accel_segment_s * config.frame_rate)))
    accels = np.zeros((n_frames, 3))
    for start in range(0, n_frames, seg_frames):
        a = rng.uniform(-config.cam_accel_max_m_s2, config.cam_accel_max_m_s2, size=3)
        accels[start : start + seg_frames] = a
    imu = tuple(
        ImuSample(f, float(accels[f, 0]), float(accels[f, 1]), float(accels[f, 2]))
        for f in range(n_frames)
    )

    # Integrate camera-induced image motion with the same kinematics the
    # tracker's control input assumes.
    cam_shift = np.zeros((n_frames, 2))
    velocity = np.array([config.cam_speed_px_s, 0.0])
    pos = np.zeros(2)
    for f in range(n_frames):
        cam_shift[f] = pos
        if f + 1 < n_frames:
            a = config.imu_scale * accels[f + 1, :2]
            pos = pos + velocity * dt + 0.5 * a * dt * dt
            velocity = velocity + a * dt

    world = _place_targets(config, rng)
    target_vel = rng.uniform(
        -config.target_speed_px_s, config.target_speed_px_s, size=(config.n_targets, 2)
    )

    mu_frames_lo = max(1, int(round(config.min_visible_s * config.frame_rate)))
    mu_frames_hi = max(mu_frames_lo, int(round(config.max_visible_s * config.frame_rate)))
    targets: list[TargetTruth] = []
    for t in range(config.n_targets):
        if rng.uniform() < config.short_window_prob:
            window = int(rng.integers(1, 6))
        else:
            window = int(rng.integers(mu_frames_lo, mu_frames_hi + 1))
        window = min(window, n_frames)
        first = int(rng.integers(0, max(1, n_frames - window + 1)))
        oversized = rng.uniform() < config.oversize_prob
        if oversized:
            w = float(rng.uniform(config.oversize_min_px, config.oversize_max_px))
            h = float(rng.uniform(config.oversize_min_px, config.oversize_max_px))
        else:
            w = float(rng.uniform(config.size_min_px, config.size_max_px))
            h = float(rng.uniform(config.size_min_px, config.size_max_px))
        targets.append(
            TargetTruth(
                target_id=t,
                first_frame=first,
                last_frame=first + window - 1,
                class_id=int(rng.integers(0, 3)),
                base_w=w,
                base_h=h,
                oversized=oversized,
            )
        )

    frames: list[FrameRecord] = []
    labels: list[GroundTruthLabel] = []
    emissions: list[Emission] = []
    for f in range(n_frames):
        timestamp = f * dt
        detections: list[Detection] = []
        any_true_visible = False
        for truth in targets:
            if not (truth.first_frame <= f <= truth.last_frame):
                continue
            any_true_visible = True
            if rng.uniform() < config.miss_prob:
                continue
            t_s = (f - truth.first_frame) * dt
            world_pos = world[truth.target_id] + target_vel[truth.target_id] * t_s
            center = world_pos + cam_shift[f]
            cx = float(center[0] + rng.uniform(-config.center_jitter_px, config.center_jitter_px))
            cy = float(center[1] + rng.uniform(-config.center_jitter_px, config.center_jitter_px))
            w = float(truth.base_w + rng.uniform(-config.size_jitter_px, config.size_jitter_px))
            h = float(truth.base_h + rng.uniform(-config.size_jitter_px, config.size_jitter_px))
            if rng.uniform() < config.low_score_prob:
                score = float(rng.uniform(0.25, 0.45))
            else:
                score = float(rng.uniform(0.6, 0.95))
            detections.append(
                Detection(BoundingBox(cx, cy, w, h), score=score, class_id=truth.class_id)
            )
            emissions.append(Emission(f, truth.target_id, cx, cy, w, h))
        n_clutter = int(rng.poisson(config.clutter_per_frame))
        for _ in range(n_clutter):
            # Clutter lives far outside the populated band so it cannot
            # steal a true target's association.
            cx = float(rng.uniform(-3000.0, -500.0))
            cy = float(rng.uniform(-3000.0, -500.0))
            w = float(rng.uniform(config.size_min_px, config.size_max_px))
            h = float(rng.uniform(config.size_min_px, config.size_max_px))
            score = float(rng.uniform(0.3, 0.9))
            detections.append(Detection(BoundingBox(cx, cy, w, h), score=score, class_id=0))
        frames.append(FrameRecord(f, timestamp, tuple(detections)))
        labels.append(GroundTruthLabel(f, any_true_visible))

    return SyntheticMission(
        frames=tuple(frames),
        imu=imu,
        labels=tuple(labels),
        targets=tuple(targets),
        emissions=tuple(emissions),
    )


def write_truth(path: str | Path, mission: SyntheticMission) -> None:
    """Ground-truth bookkeeping as JSON (targets and emitted detections)."""
    payload = {
        "targets": [asdict(t) for t in mission.targets],
        "emissions": [asdict(e) for e in mission.emissions],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
