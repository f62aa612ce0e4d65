"""Shared helpers for the test suite."""

from hypothesis import HealthCheck, settings

from antinspect.core import BoundingBox, Detection

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def box(cx: float, cy: float, w: float, h: float) -> BoundingBox:
    return BoundingBox(cx=cx, cy=cy, w=w, h=h)


def det(
    cx: float,
    cy: float,
    w: float = 40.0,
    h: float = 40.0,
    score: float = 0.9,
    class_id: int = 0,
) -> Detection:
    return Detection(bbox=box(cx, cy, w, h), score=score, class_id=class_id)
