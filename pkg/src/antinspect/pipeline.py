"""Glue between the tracker, the keyframe selector, and the comm model.

One tracking pass produces everything the upload modes need: the
per-frame track dump for debugging, the full matched-result stream (what
ECC uploads and what the cloud would return under CO), and the keyframe
subset (what ECC+ uploads).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import FrameRecord, ImuSample
from .errors import MissingImu
from .keyframes import Keyframe, KeyframeSelector, KsaConfig, pixel_filter
from .tracking import Track, Tracker, TrackerConfig


@dataclass(frozen=True)
class TrackRow:
    """One line of the per-frame track dump."""

    frame_index: int
    track_id: int
    status: str
    cx: float
    cy: float
    w: float
    h: float
    score: float


@dataclass(frozen=True)
class TrackingResult:
    track_rows: tuple[TrackRow, ...]
    matched_stream: tuple[Keyframe, ...]
    keyframes: tuple[Keyframe, ...]


def run_tracking(
    frames: Sequence[FrameRecord],
    imu_samples: Sequence[ImuSample],
    tracker_config: TrackerConfig | None = None,
    ksa_config: KsaConfig | None = None,
    zero_fill_missing_imu: bool = False,
) -> TrackingResult:
    """Run detection streams through the tracker and keyframe selector.

    The pixel filter runs before the tracker, so oversized detections
    never reach association. The matched stream carries one upload-shaped
    record per matched track per frame. With zero_fill_missing_imu the
    tracker falls back to a zero-acceleration sample instead of raising
    MissingImu.
    """
    tracker = Tracker(tracker_config)
    selector = KeyframeSelector(ksa_config)
    imu_by_frame = {s.frame_index: s for s in imu_samples}

    rows: list[TrackRow] = []
    matched_stream: list[Keyframe] = []
    keyframes: list[Keyframe] = []
    for frame in frames:
        imu = imu_by_frame.get(frame.frame_index)
        if imu is None:
            if not zero_fill_missing_imu:
                raise MissingImu(f"no IMU sample for frame {frame.frame_index}")
            imu = ImuSample(frame.frame_index, 0.0, 0.0, 0.0)
        kept = pixel_filter(frame.detections, selector.config.tau)
        filtered = FrameRecord(frame.frame_index, frame.timestamp, tuple(kept))
        active, matched = tracker.step(filtered, imu)
        for track in active:
            box = track.bbox
            rows.append(
                TrackRow(
                    frame_index=frame.frame_index,
                    track_id=track.track_id,
                    status=track.status.value,
                    cx=box.cx,
                    cy=box.cy,
                    w=box.w,
                    h=box.h,
                    score=track.last_score,
                )
            )
        for track_id, det in matched:
            matched_stream.append(
                Keyframe(
                    frame_index=frame.frame_index,
                    track_id=track_id,
                    bbox=det.bbox,
                    class_id=det.class_id,
                    upload_timestamp=frame.timestamp,
                )
            )
        keyframes.extend(selector.observe(frame.frame_index, frame.timestamp, matched))
    return TrackingResult(
        track_rows=tuple(rows),
        matched_stream=tuple(matched_stream),
        keyframes=tuple(keyframes),
    )
