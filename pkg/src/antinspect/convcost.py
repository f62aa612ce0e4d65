"""Convolution cost arithmetic for the detector's efficiency claims.

Costs are multiply-accumulate counts over one layer: a standard k x k
convolution on a W x H feature map costs W*H*Ci*Co*k^2. The heterogeneous
variant keeps every P-th input channel on the k x k kernel and runs the
rest through 1 x 1 kernels, and a two-convolution bottleneck built from
it saves 2 * (std - het) MACs. Ghost-style blocks grow channels by
concatenating cheap branch outputs onto the input.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class ConvSpec:
    """One convolution layer: output map W x H, Ci -> Co channels,
    kernel k, heterogeneous part ratio P."""

    width: int
    height: int
    c_in: int
    c_out: int
    kernel: int = 3
    parts: int = 4

    def __post_init__(self) -> None:
        for name in ("width", "height", "c_in", "c_out", "kernel", "parts"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"ConvSpec.{name} must be a positive int, got {value!r}")


def std_conv_cost(spec: ConvSpec) -> int:
    """MACs of a standard kernel x kernel convolution."""
    return spec.width * spec.height * spec.c_in * spec.c_out * spec.kernel**2


def hetconv_cost(spec: ConvSpec) -> tuple[float, float, float]:
    """MACs of the heterogeneous split: (k x k part, 1 x 1 part, total).

    One input channel in every `parts` keeps the full kernel; the other
    parts - 1 run through 1 x 1 kernels.
    """
    base = spec.width * spec.height * spec.c_in * spec.c_out
    cost_kxk = base * spec.kernel**2 / spec.parts
    cost_1x1 = base * (spec.parts - 1) / spec.parts
    return cost_kxk, cost_1x1, cost_kxk + cost_1x1


def bottleneck_reduction(spec: ConvSpec) -> int:
    """MAC savings of swapping both 3 x 3 convolutions of a bottleneck for
    the heterogeneous variant at parts=4: exactly 12 * W * H * Ci * Co."""
    if spec.kernel != 3 or spec.parts != 4:
        raise DomainError(
            f"bottleneck reduction is defined for kernel=3, parts=4; "
            f"got kernel={spec.kernel}, parts={spec.parts}"
        )
    return 12 * spec.width * spec.height * spec.c_in * spec.c_out


def ghost_concat_channels(input_channels: int, branch_channels: int, n_branches: int) -> int:
    """Channel count after concatenating n cheap branch outputs onto the input."""
    if input_channels < 1 or branch_channels < 1 or n_branches < 0:
        raise DomainError(
            "ghost_concat_channels needs positive channel counts and n_branches >= 0"
        )
    return input_channels + n_branches * branch_channels
