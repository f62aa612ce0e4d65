"""UAV antenna-inspection toolkit.

Subpackages cover the edge pipeline (tracking with IMU-aided motion
compensation, keyframe-gated uploads), the edge-cloud latency/energy
model, multi-UAV coverage planning, and the detector's convolution cost
arithmetic. See the README for the file formats and CLI.
"""

from .core import (
    AntennaClass,
    BoundingBox,
    Detection,
    FrameRecord,
    GroundTruthLabel,
    ImuSample,
    iou,
)
from .errors import (
    ConfigError,
    DegenerateGeometry,
    DomainError,
    MissingImu,
    MissingLabel,
    OutOfOrderFrame,
    PipelineError,
)

__all__ = [
    "AntennaClass",
    "BoundingBox",
    "ConfigError",
    "DegenerateGeometry",
    "Detection",
    "DomainError",
    "FrameRecord",
    "GroundTruthLabel",
    "ImuSample",
    "MissingImu",
    "MissingLabel",
    "OutOfOrderFrame",
    "PipelineError",
    "iou",
]

__version__ = "0.1.0"
