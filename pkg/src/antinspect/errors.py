"""Exception types shared across the package."""


class PipelineError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(PipelineError):
    """A config file or parameter set failed validation."""


class DomainError(PipelineError, ValueError):
    """A numeric argument is outside the function's domain."""


class OutOfOrderFrame(PipelineError):
    """A frame arrived with an index not greater than the previous one."""


class MissingImu(PipelineError):
    """No IMU sample was supplied for the frame being processed."""


class MissingLabel(PipelineError):
    """An upload references a frame with no ground-truth label."""


class DegenerateGeometry(PipelineError):
    """Two points coincide where a positive separation is required."""
