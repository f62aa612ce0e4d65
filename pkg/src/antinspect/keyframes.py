"""Keyframe selection: decide which tracked frames are worth uploading.

Two filters run in sequence. A pixel filter keeps only detections that
fit within tau pixels on both sides (larger objects fill the view and
were already inspected up close). A judge table then waits until a track
id has been sighted mu times inside a window of mu frames and uploads
exactly one keyframe for it; uploaded ids are remembered and never
re-uploaded.

The default judge follows the literal bookkeeping: counts and the first
sighting frame are never reset, so a track whose early sightings have a
gap can age out of eligibility. strict_consecutive=True restarts the
window at every gap instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import BoundingBox, Detection
from .errors import ConfigError, OutOfOrderFrame


@dataclass
class KsaConfig:
    """tau: pixel filter threshold; mu: sightings needed inside a window of
    mu frames before a track's keyframe is uploaded."""

    tau: float = 120.0
    mu: int = 6
    strict_consecutive: bool = False

    def validate(self) -> None:
        if not self.tau > 0:
            raise ConfigError(f"ksa.tau must be > 0, got {self.tau}")
        if self.mu < 1:
            raise ConfigError(f"ksa.mu must be >= 1, got {self.mu}")


def pixel_filter(detections: Sequence[Detection], tau: float) -> list[Detection]:
    """Keep detections whose box fits within tau on both sides.

    One oversized side is enough to drop a detection: such objects fill
    the view and are presumed already inspected at close range.
    """
    return [d for d in detections if d.bbox.w <= tau and d.bbox.h <= tau]


@dataclass
class JudgeEntry:
    count: int
    first_frame: int
    last_frame: int


@dataclass(frozen=True)
class Keyframe:
    """One upload: the frame, the track that triggered it, and its box."""

    frame_index: int
    track_id: int
    bbox: BoundingBox
    class_id: int
    upload_timestamp: float


class KeyframeSelector:
    """Stateful judge over matched tracks; feed one frame at a time."""

    def __init__(self, config: KsaConfig | None = None):
        self.config = config or KsaConfig()
        self.config.validate()
        self.judge: dict[int, JudgeEntry] = {}
        self.uploaded_ids: set[int] = set()
        self._last_frame: int | None = None

    def observe(
        self,
        frame_index: int,
        timestamp: float,
        matched: Iterable[tuple[int, Detection]],
    ) -> list[Keyframe]:
        """Record this frame's matched tracks, returning any new keyframes.

        Emitted keyframes carry the matched detection's box and class.
        Frames must be presented in increasing order.
        """
        if self._last_frame is not None and frame_index <= self._last_frame:
            raise OutOfOrderFrame(f"frame {frame_index} after frame {self._last_frame}")
        self._last_frame = frame_index

        mu = self.config.mu
        emitted: list[Keyframe] = []
        for track_id, detection in matched:
            if track_id in self.uploaded_ids:
                continue
            entry = self.judge.get(track_id)
            if entry is None:
                entry = JudgeEntry(count=1, first_frame=frame_index, last_frame=frame_index)
                self.judge[track_id] = entry
            else:
                if self.config.strict_consecutive and frame_index > entry.last_frame + 1:
                    entry.count = 1
                    entry.first_frame = frame_index
                else:
                    entry.count += 1
                entry.last_frame = frame_index
            if entry.count >= mu and entry.last_frame - entry.first_frame <= mu - 1:
                emitted.append(
                    Keyframe(
                        frame_index=frame_index,
                        track_id=track_id,
                        bbox=detection.bbox,
                        class_id=detection.class_id,
                        upload_timestamp=timestamp,
                    )
                )
                self.uploaded_ids.add(track_id)
        return emitted
