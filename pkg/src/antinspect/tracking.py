"""Tracking-by-detection with an IMU-driven Kalman control input.

Tracks carry an 8-dim state [cx, cy, w, h, vcx, vcy, vw, vh]. Camera
ego-motion is compensated by feeding the per-frame accelerometer sample
into the predict step as a control term instead of running a visual
registration pass: position gains 0.5 * s * a * dt^2 and velocity gains
s * a * dt, where s is the configured meters-to-pixels scale.

Association is the usual two-stage scheme: high-score detections are
matched first on 1 - IoU cost, the leftovers plus low-score detections
go through a second, looser pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
import scipy.optimize

from .core import BoundingBox, Detection, FrameRecord, ImuSample, iou
from .errors import ConfigError, MissingImu, OutOfOrderFrame
from .kalman import kf_predict, kf_update

_N_STATE = 8
_MIN_SIZE = 1e-6

# Observation picks the box components out of the state.
_H = np.eye(4, _N_STATE)


class TrackStatus(Enum):
    TENTATIVE = "tentative"
    CONFIRMED = "confirmed"
    LOST = "lost"
    REMOVED = "removed"


@dataclass
class TrackerConfig:
    """Knobs for association, track lifecycle, and the Kalman filter.

    epsilon splits detections into the high/low score streams. The noise
    entries are unitless scale factors applied relative to the current box
    height (velocity process noise uses an extra 1/8).
    """

    epsilon: float = 0.5
    iou_gate_high: float = 0.3
    iou_gate_low: float = 0.2
    max_lost_frames: int = 30
    confirm_hits: int = 3
    imu_scale: float = 10.0
    dt: float = 1.0 / 30.0
    process_noise: float = 1.0 / 20.0
    measurement_noise: float = 1.0 / 20.0
    use_vertical_accel: bool = False

    def validate(self) -> None:
        if not (0.0 <= self.epsilon <= 1.0):
            raise ConfigError(f"tracker.epsilon must be in [0, 1], got {self.epsilon}")
        for name in ("iou_gate_high", "iou_gate_low"):
            gate = getattr(self, name)
            if not (0.0 <= gate <= 1.0):
                raise ConfigError(f"tracker.{name} must be in [0, 1], got {gate}")
        if self.max_lost_frames < 0:
            raise ConfigError(f"tracker.max_lost_frames must be >= 0, got {self.max_lost_frames}")
        if self.confirm_hits < 1:
            raise ConfigError(f"tracker.confirm_hits must be >= 1, got {self.confirm_hits}")
        if self.dt <= 0.0:
            raise ConfigError(f"tracker.dt must be > 0, got {self.dt}")
        if self.process_noise <= 0.0 or self.measurement_noise <= 0.0:
            raise ConfigError("tracker noise scale factors must be > 0")


def transition_matrix(dt: float) -> np.ndarray:
    """Constant-velocity transition over one step of length dt."""
    F = np.eye(_N_STATE)
    for i in range(4):
        F[i, i + 4] = dt
    return F


def control_vector(imu: ImuSample, config: TrackerConfig) -> np.ndarray | None:
    """Additive control term B u for one predict step, or None when zero.

    Horizontal accelerations drive (cx, cy); the vertical axis optionally
    drives the box size channels when use_vertical_accel is set.
    """
    s = config.imu_scale
    dt = config.dt
    ax = s * imu.ax
    ay = s * imu.ay
    az = s * imu.az if config.use_vertical_accel else 0.0
    if ax == 0.0 and ay == 0.0 and az == 0.0:
        return None
    u = np.zeros(_N_STATE)
    half_dt2 = 0.5 * dt * dt
    u[0] = ax * half_dt2
    u[1] = ay * half_dt2
    u[4] = ax * dt
    u[5] = ay * dt
    if az != 0.0:
        u[2] = az * half_dt2
        u[3] = az * half_dt2
        u[6] = az * dt
        u[7] = az * dt
    return u


def _process_noise(height: float, config: TrackerConfig) -> np.ndarray:
    std_pos = config.process_noise * height
    std_vel = config.process_noise * height / 8.0
    return np.diag([std_pos**2] * 4 + [std_vel**2] * 4)


def _measurement_noise(height: float, config: TrackerConfig) -> np.ndarray:
    std = config.measurement_noise * height
    return np.diag([std**2] * 4)


class Track:
    """One tracked object with Kalman state and lifecycle bookkeeping."""

    __slots__ = (
        "track_id",
        "mean",
        "covariance",
        "status",
        "hits",
        "age",
        "frames_since_update",
        "class_id",
        "last_score",
    )

    def __init__(self, track_id: int, detection: Detection, config: TrackerConfig):
        box = detection.bbox
        self.track_id = track_id
        self.mean = np.array([box.cx, box.cy, box.w, box.h, 0.0, 0.0, 0.0, 0.0])
        std_pos = 2.0 * config.measurement_noise * box.h
        std_vel = 10.0 * config.process_noise * box.h
        self.covariance = np.diag([std_pos**2] * 4 + [std_vel**2] * 4)
        self.status = TrackStatus.CONFIRMED if config.confirm_hits <= 1 else TrackStatus.TENTATIVE
        self.hits = 1
        self.age = 0
        self.frames_since_update = 0
        self.class_id = detection.class_id
        self.last_score = detection.score

    @property
    def bbox(self) -> BoundingBox:
        cx, cy, w, h = self.mean[:4]
        return BoundingBox(float(cx), float(cy), float(max(w, _MIN_SIZE)), float(max(h, _MIN_SIZE)))

    def predict(self, imu: ImuSample, config: TrackerConfig) -> None:
        F = transition_matrix(config.dt)
        Q = _process_noise(float(self.mean[3]), config)
        self.mean, self.covariance = kf_predict(
            self.mean, self.covariance, F, Q, control_vector(imu, config)
        )
        self.age += 1

    def update(self, detection: Detection, config: TrackerConfig) -> None:
        box = detection.bbox
        z = np.array([box.cx, box.cy, box.w, box.h])
        R = _measurement_noise(float(self.mean[3]), config)
        self.mean, self.covariance = kf_update(self.mean, self.covariance, z, _H, R)
        # Keep the size channels physical.
        self.mean[2] = max(self.mean[2], _MIN_SIZE)
        self.mean[3] = max(self.mean[3], _MIN_SIZE)
        self.hits += 1
        self.frames_since_update = 0
        self.class_id = detection.class_id
        self.last_score = detection.score
        if self.hits >= config.confirm_hits or self.status is TrackStatus.LOST:
            self.status = TrackStatus.CONFIRMED


def min_cost_assignment(cost: np.ndarray) -> list[tuple[int, int]]:
    """Globally optimal assignment on a rectangular cost matrix.

    Returns (row, col) pairs sorted by row. Among equal-cost optima,
    pairwise swaps are applied so lower rows take lower column indices,
    which pins the result for tie-breaking purposes.
    """
    if cost.size == 0:
        return []
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    pairs = sorted(zip(rows.tolist(), cols.tolist()))
    changed = True
    while changed:
        changed = False
        for a in range(len(pairs)):
            for b in range(a + 1, len(pairs)):
                (r1, c1), (r2, c2) = pairs[a], pairs[b]
                if c2 < c1 and cost[r1, c1] + cost[r2, c2] == cost[r1, c2] + cost[r2, c1]:
                    pairs[a], pairs[b] = (r1, c2), (r2, c1)
                    changed = True
    return pairs


def iou_cost_matrix(tracks: Sequence[Track], detections: Sequence[Detection]) -> np.ndarray:
    cost = np.ones((len(tracks), len(detections)))
    for i, track in enumerate(tracks):
        box = track.bbox
        for j, det in enumerate(detections):
            cost[i, j] = 1.0 - iou(box, det.bbox)
    return cost


def _match_stage(
    tracks: list[Track],
    detections: list[Detection],
    det_indices: list[int],
    min_iou: float,
) -> tuple[list[tuple[int, int]], list[Track], list[int]]:
    """One assignment pass. Returns accepted (track_id, det_index) matches
    plus leftover tracks and detection indices."""
    if not tracks or not det_indices:
        return [], list(tracks), list(det_indices)
    dets = [detections[j] for j in det_indices]
    cost = iou_cost_matrix(tracks, dets)
    matches: list[tuple[int, int]] = []
    matched_rows: set[int] = set()
    matched_cols: set[int] = set()
    for row, col in min_cost_assignment(cost):
        if 1.0 - cost[row, col] < min_iou:
            continue
        matches.append((tracks[row].track_id, det_indices[col]))
        matched_rows.add(row)
        matched_cols.add(col)
    leftover_tracks = [t for i, t in enumerate(tracks) if i not in matched_rows]
    leftover_dets = [j for k, j in enumerate(det_indices) if k not in matched_cols]
    return matches, leftover_tracks, leftover_dets


def associate(
    tracks: Sequence[Track],
    detections: Sequence[Detection],
    config: TrackerConfig,
) -> tuple[list[tuple[int, int]], list[int], list[int]]:
    """Two-stage association of predicted tracks with detections.

    Stage one matches every track against detections scoring at least
    epsilon, gated at iou_gate_high. Stage two matches the remaining
    tracks against the low-score detections plus stage-one leftovers,
    gated at iou_gate_low.

    Returns (matches as (track_id, det_index), unmatched track ids,
    unmatched detection indices).
    """
    tracks = list(tracks)
    detections = list(detections)
    high = [j for j, d in enumerate(detections) if d.score >= config.epsilon]
    low = [j for j, d in enumerate(detections) if d.score < config.epsilon]

    matches, leftover_tracks, leftover_high = _match_stage(
        tracks, detections, high, config.iou_gate_high
    )
    second_pool = sorted(low + leftover_high)
    more, leftover_tracks, leftover_pool = _match_stage(
        leftover_tracks, detections, second_pool, config.iou_gate_low
    )
    matches = sorted(matches + more)
    unmatched_tracks = [t.track_id for t in leftover_tracks]
    return matches, unmatched_tracks, leftover_pool


class Tracker:
    """Multi-object tracker; call step() once per frame in order."""

    def __init__(self, config: TrackerConfig | None = None):
        self.config = config or TrackerConfig()
        self.config.validate()
        self._tracks: dict[int, Track] = {}
        self._next_id = 1
        self._last_frame: int | None = None

    @property
    def tracks(self) -> list[Track]:
        return list(self._tracks.values())

    def step(
        self, frame: FrameRecord, imu: ImuSample | None
    ) -> tuple[list[Track], list[tuple[int, Detection]]]:
        """Advance the tracker by one frame.

        Returns (active tracks after the step, matched (track_id, Detection)
        pairs including freshly started tracks). Raises OutOfOrderFrame on a
        non-increasing frame index and MissingImu when the sample is absent
        or indexed for a different frame; callers that want a plain
        constant-velocity predict must pass an explicit zero sample.
        """
        if self._last_frame is not None and frame.frame_index <= self._last_frame:
            raise OutOfOrderFrame(
                f"frame {frame.frame_index} after frame {self._last_frame}"
            )
        if imu is None:
            raise MissingImu(f"no IMU sample for frame {frame.frame_index}")
        if imu.frame_index != frame.frame_index:
            raise MissingImu(
                f"IMU sample is for frame {imu.frame_index}, expected {frame.frame_index}"
            )
        self._last_frame = frame.frame_index

        ordered = sorted(self._tracks.values(), key=lambda t: t.track_id)
        for track in ordered:
            track.predict(imu, self.config)

        detections = list(frame.detections)
        matches, unmatched_ids, unmatched_dets = associate(ordered, detections, self.config)

        matched_out: list[tuple[int, Detection]] = []
        for track_id, det_index in matches:
            track = self._tracks[track_id]
            track.update(detections[det_index], self.config)
            matched_out.append((track_id, detections[det_index]))

        for track_id in unmatched_ids:
            track = self._tracks[track_id]
            track.frames_since_update += 1
            if track.status is TrackStatus.TENTATIVE:
                track.status = TrackStatus.REMOVED
            elif track.status is TrackStatus.CONFIRMED:
                track.status = TrackStatus.LOST
            if track.frames_since_update > self.config.max_lost_frames:
                track.status = TrackStatus.REMOVED
            if track.status is TrackStatus.REMOVED:
                del self._tracks[track_id]

        high_unmatched = [
            j for j in unmatched_dets if detections[j].score >= self.config.epsilon
        ]
        for det_index in high_unmatched:
            track = Track(self._next_id, detections[det_index], self.config)
            self._tracks[track.track_id] = track
            matched_out.append((track.track_id, detections[det_index]))
            self._next_id += 1

        matched_out.sort(key=lambda pair: pair[0])
        active = sorted(self._tracks.values(), key=lambda t: t.track_id)
        return active, matched_out
