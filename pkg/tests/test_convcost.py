import pytest
from hypothesis import given
from hypothesis import strategies as st

from antinspect.convcost import (
    ConvSpec,
    bottleneck_reduction,
    ghost_concat_channels,
    hetconv_cost,
    std_conv_cost,
)
from antinspect.errors import ConfigError, DomainError

dims = st.integers(min_value=1, max_value=64)


def test_std_cost_examples():
    assert std_conv_cost(ConvSpec(1, 1, 1, 1)) == 9
    assert std_conv_cost(ConvSpec(10, 10, 16, 16)) == 230400
    assert std_conv_cost(ConvSpec(10, 10, 16, 16, kernel=1)) == 25600


def test_hetconv_unit_spec():
    assert hetconv_cost(ConvSpec(1, 1, 1, 1)) == (2.25, 0.75, 3.0)


def test_hetconv_reference_spec():
    kxk, one, total = hetconv_cost(ConvSpec(10, 10, 16, 16))
    assert (kxk, one, total) == (57600.0, 19200.0, 76800.0)
    assert std_conv_cost(ConvSpec(10, 10, 16, 16)) / total == 3.0


def test_hetconv_general_parts():
    # parts=2 splits half/half: 9/2 + 1/2 = 5 MACs per unit, ratio 1.8
    kxk, one, total = hetconv_cost(ConvSpec(1, 1, 1, 1, parts=2))
    assert (kxk, one, total) == (4.5, 0.5, 5.0)
    assert std_conv_cost(ConvSpec(1, 1, 1, 1, parts=2)) / total == pytest.approx(1.8)


@given(dims, dims, dims, dims)
def test_ratio_three_for_default_split(w, h, ci, co):
    spec = ConvSpec(w, h, ci, co)
    assert std_conv_cost(spec) / hetconv_cost(spec)[2] == 3.0


@given(dims, dims, dims, dims)
def test_bottleneck_reduction_equals_subtraction(w, h, ci, co):
    spec = ConvSpec(w, h, ci, co)
    # integer-exact: both 3x3 convs of the bottleneck shed (std - het) MACs
    saved = 2 * (std_conv_cost(spec) - hetconv_cost(spec)[2])
    assert bottleneck_reduction(spec) == saved
    assert bottleneck_reduction(spec) == 12 * w * h * ci * co


def test_bottleneck_reference_value():
    assert bottleneck_reduction(ConvSpec(10, 10, 16, 16)) == 307200
    assert 307200 == 2 * (230400 - 76800)


def test_bottleneck_reduction_unit():
    assert bottleneck_reduction(ConvSpec(1, 1, 1, 1)) == 12


def test_bottleneck_requires_default_split():
    with pytest.raises(DomainError):
        bottleneck_reduction(ConvSpec(1, 1, 1, 1, kernel=5))
    with pytest.raises(DomainError):
        bottleneck_reduction(ConvSpec(1, 1, 1, 1, parts=2))


@given(dims, dims, dims, dims, st.integers(1, 7))
def test_costs_monotone_in_each_dimension(w, h, ci, co, k):
    spec = ConvSpec(w, h, ci, co, kernel=k)
    grown = [
        ConvSpec(w + 1, h, ci, co, kernel=k),
        ConvSpec(w, h + 1, ci, co, kernel=k),
        ConvSpec(w, h, ci + 1, co, kernel=k),
        ConvSpec(w, h, ci, co + 1, kernel=k),
        ConvSpec(w, h, ci, co, kernel=k + 1),
    ]
    for g in grown:
        assert std_conv_cost(g) > std_conv_cost(spec)
        assert hetconv_cost(g)[2] > hetconv_cost(spec)[2]


def test_ghost_channel_bookkeeping():
    assert ghost_concat_channels(16, 16, 1) == 32
    assert ghost_concat_channels(8, 8, 3) == 32
    assert ghost_concat_channels(24, 5, 0) == 24


def test_ghost_rejects_bad_counts():
    with pytest.raises(DomainError):
        ghost_concat_channels(0, 8, 1)
    with pytest.raises(DomainError):
        ghost_concat_channels(8, 8, -1)


def test_spec_validation():
    with pytest.raises(ConfigError):
        ConvSpec(0, 1, 1, 1)
    with pytest.raises(ConfigError):
        ConvSpec(1, 1, 1, 1, parts=0)
    with pytest.raises(ConfigError):
        ConvSpec(1.5, 1, 1, 1)  # type: ignore[arg-type]
