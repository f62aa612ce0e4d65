"""Shared geometry and record types, plus the line-delimited file formats.

Detection and IMU streams are stored as JSON lines, one record per line,
with floats serialized at full round-trip precision. See the README for
the field-by-field format description.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConfigError, DomainError


class AntennaClass(IntEnum):
    """Known interference-source classes. Unknown integer ids are accepted
    everywhere a class id is stored; this enum only names the usual three."""

    YAGI = 0
    PLATE_LOG = 1
    PATCH = 2


def class_name(class_id: int) -> str:
    try:
        return AntennaClass(class_id).name.lower()
    except ValueError:
        return f"class_{class_id}"


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in pixel units, stored center-based: (cx, cy, w, h)."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self) -> None:
        for name in ("cx", "cy", "w", "h"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DomainError(f"BoundingBox.{name} must be finite, got {value!r}")
        if self.w <= 0.0 or self.h <= 0.0:
            raise DomainError(f"BoundingBox needs w > 0 and h > 0, got w={self.w}, h={self.h}")

    @property
    def area(self) -> float:
        return self.w * self.h

    def to_xyxy(self) -> tuple[float, float, float, float]:
        """Corner form (x1, y1, x2, y2)."""
        half_w = self.w / 2.0
        half_h = self.h / 2.0
        return (self.cx - half_w, self.cy - half_h, self.cx + half_w, self.cy + half_h)

    @classmethod
    def from_xyxy(cls, x1: float, y1: float, x2: float, y2: float) -> "BoundingBox":
        return cls((x1 + x2) / 2.0, (y1 + y2) / 2.0, x2 - x1, y2 - y1)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes, in [0, 1]."""
    ax1, ay1, ax2, ay2 = a.to_xyxy()
    bx1, by1, bx2, by2 = b.to_xyxy()
    inter_w = min(ax2, bx2) - max(ax1, bx1)
    inter_h = min(ay2, by2) - max(ay1, by1)
    if inter_w <= 0.0 or inter_h <= 0.0:
        return 0.0
    inter = inter_w * inter_h
    # Areas from the same corner values the intersection uses, and a union
    # floored at each area: keeps the ratio in [0, 1] even when the corner
    # arithmetic loses bits at large coordinates, and makes iou(a, a) == 1.0.
    area_a = (ax2 - ax1) * (ay2 - ay1)
    area_b = (bx2 - bx1) * (by2 - by1)
    union = max(area_a + area_b - inter, area_a, area_b)
    return inter / union


@dataclass(frozen=True)
class Detection:
    """One detector output: a box, a confidence score, and a class id."""

    bbox: BoundingBox
    score: float
    class_id: int = 0

    def __post_init__(self) -> None:
        if not math.isfinite(self.score) or not (0.0 <= self.score <= 1.0):
            raise DomainError(f"Detection.score must lie in [0, 1], got {self.score!r}")
        if not isinstance(self.class_id, int):
            raise DomainError(f"Detection.class_id must be an int, got {self.class_id!r}")


@dataclass(frozen=True)
class FrameRecord:
    """All detections of one video frame."""

    frame_index: int
    timestamp: float
    detections: tuple[Detection, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.frame_index, int) or self.frame_index < 0:
            raise DomainError(f"frame_index must be a non-negative int, got {self.frame_index!r}")
        if not math.isfinite(self.timestamp):
            raise DomainError(f"timestamp must be finite, got {self.timestamp!r}")
        object.__setattr__(self, "detections", tuple(self.detections))


@dataclass(frozen=True)
class ImuSample:
    """Per-frame accelerometer reading, axes aligned with the image plane.

    Positive ax moves image content toward +x under the tracker's control
    convention; mapping from physical body axes is a calibration concern
    left to the caller.
    """

    frame_index: int
    ax: float
    ay: float
    az: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.frame_index, int) or self.frame_index < 0:
            raise DomainError(f"frame_index must be a non-negative int, got {self.frame_index!r}")
        for name in ("ax", "ay", "az"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"ImuSample.{name} must be finite")

    def is_zero(self) -> bool:
        return self.ax == 0.0 and self.ay == 0.0 and self.az == 0.0


ZERO_IMU = ImuSample(0, 0.0, 0.0, 0.0)


# --------------------------------------------------------------------------
# File formats


def _read_lines(path: str | Path) -> list[tuple[int, str]]:
    """Numbered non-blank lines of a text file; missing file is a config error."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return [(i, line.strip()) for i, line in enumerate(raw, start=1) if line.strip()]


def _detection_to_dict(det: Detection) -> dict:
    return {
        "cx": det.bbox.cx,
        "cy": det.bbox.cy,
        "w": det.bbox.w,
        "h": det.bbox.h,
        "score": det.score,
        "class_id": det.class_id,
    }


def _detection_from_dict(obj: dict) -> Detection:
    return Detection(
        bbox=BoundingBox(float(obj["cx"]), float(obj["cy"]), float(obj["w"]), float(obj["h"])),
        score=float(obj["score"]),
        class_id=int(obj["class_id"]),
    )


def write_frames(path: str | Path, frames: Iterable[FrameRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for frame in frames:
            record = {
                "frame_index": frame.frame_index,
                "timestamp": frame.timestamp,
                "detections": [_detection_to_dict(d) for d in frame.detections],
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_frames(path: str | Path) -> list[FrameRecord]:
    """Read a detection stream, enforcing strictly increasing frame indices
    and non-decreasing timestamps."""
    frames: list[FrameRecord] = []
    for lineno, line in _read_lines(path):
        try:
            obj = json.loads(line)
            frame = FrameRecord(
                frame_index=int(obj["frame_index"]),
                timestamp=float(obj["timestamp"]),
                detections=tuple(_detection_from_dict(d) for d in obj["detections"]),
            )
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: line {lineno}: bad frame record: {exc}") from exc
        if frames:
            if frame.frame_index <= frames[-1].frame_index:
                raise ConfigError(
                    f"{path}: line {lineno}: frame_index {frame.frame_index} not greater "
                    f"than previous {frames[-1].frame_index}"
                )
            if frame.timestamp < frames[-1].timestamp:
                raise ConfigError(
                    f"{path}: line {lineno}: timestamp decreased "
                    f"({frame.timestamp} < {frames[-1].timestamp})"
                )
        frames.append(frame)
    return frames


def write_imu(path: str | Path, samples: Iterable[ImuSample]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            record = {"frame_index": s.frame_index, "ax": s.ax, "ay": s.ay, "az": s.az}
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_imu(path: str | Path) -> list[ImuSample]:
    samples: list[ImuSample] = []
    for lineno, line in _read_lines(path):
        try:
            obj = json.loads(line)
            sample = ImuSample(
                frame_index=int(obj["frame_index"]),
                ax=float(obj["ax"]),
                ay=float(obj["ay"]),
                az=float(obj.get("az", 0.0)),
            )
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: line {lineno}: bad IMU record: {exc}") from exc
        if samples and sample.frame_index <= samples[-1].frame_index:
            raise ConfigError(
                f"{path}: line {lineno}: frame_index {sample.frame_index} not greater "
                f"than previous {samples[-1].frame_index}"
            )
        samples.append(sample)
    return samples


@dataclass(frozen=True)
class GroundTruthLabel:
    """Per-frame ground truth: does the frame contain a true interference source."""

    frame_index: int
    is_interference: bool


def write_labels(path: str | Path, labels: Iterable[GroundTruthLabel]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for lab in labels:
            fh.write(
                json.dumps(
                    {"frame_index": lab.frame_index, "is_interference": lab.is_interference},
                    sort_keys=True,
                )
                + "\n"
            )


def read_labels(path: str | Path) -> list[GroundTruthLabel]:
    labels: list[GroundTruthLabel] = []
    for lineno, line in _read_lines(path):
        try:
            obj = json.loads(line)
            labels.append(GroundTruthLabel(int(obj["frame_index"]), bool(obj["is_interference"])))
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: line {lineno}: bad label record: {exc}") from exc
    return labels


def label_map(labels: Sequence[GroundTruthLabel]) -> dict[int, bool]:
    return {lab.frame_index: lab.is_interference for lab in labels}
