import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from antinspect.comms import (
    LatencyReport,
    Mode,
    ModeParams,
    PAPER_TABLE,
    accuracy,
    e2el,
    parse_mode,
    preset,
    qos1_time,
    qos1_time_sampled,
    run_mission,
)
from antinspect.errors import ConfigError, MissingLabel
from antinspect.keyframes import Keyframe

from conftest import box


def _upload(frame_index: int, t: float | None = None) -> Keyframe:
    return Keyframe(
        frame_index=frame_index,
        track_id=frame_index + 1,
        bbox=box(0, 0, 10, 10),
        class_id=0,
        upload_timestamp=frame_index / 30.0 if t is None else t,
    )


# ---------------------------------------------------------------- e2el


def test_e2el_is_plain_sum():
    p = ModeParams(mode=Mode.ECC, eta=0.0)
    assert e2el(p, 1.012, 0.0079) == pytest.approx(1.0199)
    assert e2el(p, 0.062, 0.0513) == pytest.approx(0.1133)
    assert e2el(p, 0.0, 0.0) == 0.0


def test_e2el_includes_eta():
    p = ModeParams(mode=Mode.ECC, eta=0.005)
    assert e2el(p, 0.1, 0.05) == pytest.approx(0.155)


# ---------------------------------------------------------------- QoS 1


def test_qos1_lossless_hand_value():
    p = ModeParams(mode=Mode.ECC, uplink_bandwidth=40e6, base_rtt=0.02, loss_prob=0.0)
    # 8 * 256 bits over 40 Mb/s = 51.2 us, plus 20 ms RTT
    assert qos1_time(256, p) == pytest.approx(0.0200512)


def test_qos1_half_loss_doubles_time():
    lossless = ModeParams(mode=Mode.ECC, loss_prob=0.0)
    lossy = ModeParams(mode=Mode.ECC, loss_prob=0.5)
    assert qos1_time(256, lossy) == pytest.approx(2.0 * qos1_time(256, lossless))


def test_qos1_zero_bytes_pays_rtt():
    p = ModeParams(mode=Mode.ECC, base_rtt=0.01, loss_prob=0.0)
    assert qos1_time(0, p) == pytest.approx(0.01)


def test_qos1_negative_bytes_rejected():
    with pytest.raises(ConfigError):
        qos1_time(-1, ModeParams(mode=Mode.ECC))


@given(
    st.integers(min_value=0, max_value=10_000),
    st.integers(min_value=1, max_value=10_000),
    st.floats(min_value=0.0, max_value=0.95),
    st.floats(min_value=0.0, max_value=1.0),
)
def test_qos1_monotone(n_bytes, extra_bytes, loss, extra_rtt):
    base = ModeParams(mode=Mode.ECC, base_rtt=0.02, loss_prob=loss)
    assert qos1_time(n_bytes + extra_bytes, base) >= qos1_time(n_bytes, base)
    bumped_rtt = ModeParams(mode=Mode.ECC, base_rtt=0.02 + extra_rtt, loss_prob=loss)
    assert qos1_time(n_bytes, bumped_rtt) >= qos1_time(n_bytes, base)
    if loss + 0.04 < 1.0:
        lossier = ModeParams(mode=Mode.ECC, base_rtt=0.02, loss_prob=loss + 0.04)
        assert qos1_time(n_bytes, lossier) >= qos1_time(n_bytes, base)


def test_qos1_sampled_lossless_equals_expectation():
    p = ModeParams(mode=Mode.ECC, loss_prob=0.0)
    rng = np.random.default_rng(0)
    assert qos1_time_sampled(256, p, rng) == qos1_time(256, p)


def test_qos1_sampled_mean_approaches_expectation():
    p = ModeParams(mode=Mode.ECC, loss_prob=0.4)
    rng = np.random.default_rng(123)
    samples = [qos1_time_sampled(256, p, rng) for _ in range(20_000)]
    assert np.mean(samples) == pytest.approx(qos1_time(256, p), rel=0.02)


def test_qos1_sampled_is_seed_reproducible():
    p = ModeParams(mode=Mode.ECC, loss_prob=0.3)
    a = [qos1_time_sampled(256, p, np.random.default_rng(9)) for _ in range(5)]
    b = [qos1_time_sampled(256, p, np.random.default_rng(9)) for _ in range(5)]
    assert a == b


# ---------------------------------------------------------------- accuracy


def test_accuracy_hand_counts():
    uploads = [_upload(i) for i in range(22)]
    labels = {i: i < 19 for i in range(22)}
    assert accuracy(uploads, labels) == pytest.approx(19 / 22)
    assert accuracy(uploads, labels) == pytest.approx(0.864, abs=5e-4)


def test_accuracy_nine_of_ten():
    uploads = [_upload(i) for i in range(10)]
    labels = {i: i != 0 for i in range(10)}
    assert accuracy(uploads, labels) == pytest.approx(0.9)


def test_accuracy_all_correct_and_empty():
    uploads = [_upload(i) for i in range(4)]
    assert accuracy(uploads, {i: True for i in range(4)}) == 1.0
    assert accuracy([], {}) == 1.0


def test_accuracy_missing_label_raises():
    with pytest.raises(MissingLabel):
        accuracy([_upload(7)], {0: True})


@given(st.lists(st.booleans(), min_size=1, max_size=30))
def test_accuracy_duplication_invariant(flags):
    uploads = [_upload(i) for i in range(len(flags))]
    labels = dict(enumerate(flags))
    once = accuracy(uploads, labels)
    twice = accuracy(uploads + uploads, labels)
    assert 0.0 <= once <= 1.0
    assert once == pytest.approx(twice)


# ---------------------------------------------------------------- missions


def test_ecc_mission_hand_check():
    p = ModeParams(mode=Mode.ECC, uplink_bandwidth=40e6, base_rtt=0.02, message_bytes=256)
    uploads = [_upload(i) for i in range(5)]
    labels = {i: True for i in range(5)}
    report = run_mission(p, uploads, labels, duration_s=1.0, n_frames=30)
    per = qos1_time(256, p) + p.t_infer_edge
    assert report.n_uploads == 5
    assert report.per_upload_e2el == tuple([pytest.approx(per)] * 5)
    assert report.mean_e2el == pytest.approx(per)
    assert report.total_uplink_bytes == 5 * 256
    assert report.energy_comm_j == pytest.approx(p.power_comm * 5 * qos1_time(256, p))
    assert report.energy_infer_j == pytest.approx(p.power_infer * 30 * p.t_infer_edge)
    assert not report.saturated


def test_co_mission_backlog_free_when_bandwidth_suffices():
    p = ModeParams(
        mode=Mode.CO,
        uplink_bandwidth=40e6,
        video_bitrate=8e6,
        frame_rate=30.0,
        base_rtt=0.02,
    )
    uploads = [_upload(0, t=0.0), _upload(90, t=3.0)]
    report = run_mission(p, uploads, {0: True, 90: True}, duration_s=4.0)
    t_frame = (8e6 / 30.0) / 40e6
    expected = t_frame + 0.02 + p.t_infer_cloud
    assert report.per_upload_e2el[0] == pytest.approx(expected)
    # no backlog: early and late uploads cost the same
    assert report.per_upload_e2el[0] == pytest.approx(report.per_upload_e2el[1])
    assert report.total_uplink_bytes == pytest.approx(8e6 * 4.0 / 8.0)
    assert report.energy_comm_j == pytest.approx(p.power_comm * 4.0)
    assert not report.saturated


def test_co_mission_saturation_grows_linearly():
    # 50 Mb/s encoder into a 40 Mb/s pipe leaves 10 Mb/s piling up: the
    # backlog delay at mission time t is 0.25 * t seconds.
    p = ModeParams(mode=Mode.CO, uplink_bandwidth=40e6, video_bitrate=50e6)
    uploads = [_upload(0, t=0.0), _upload(120, t=4.0)]
    report = run_mission(p, uploads, {0: True, 120: True}, duration_s=5.0)
    assert report.saturated
    assert report.per_upload_e2el[1] - report.per_upload_e2el[0] == pytest.approx(1.0)


def test_mission_with_no_uploads():
    p = ModeParams(mode=Mode.ECC)
    report = run_mission(p, [], {}, duration_s=2.0)
    assert report.n_uploads == 0
    assert report.mean_e2el == 0.0
    assert report.accuracy == 1.0
    assert report.total_uplink_bytes == 0.0


def test_mission_rejects_bad_duration():
    with pytest.raises(ConfigError):
        run_mission(ModeParams(mode=Mode.ECC), [], {}, duration_s=0.0)


@given(
    st.integers(min_value=0, max_value=200),
    st.integers(min_value=0, max_value=200),
    st.floats(min_value=1.0, max_value=60.0),
)
def test_byte_ordering_for_subset_streams(n_keyframes, extra, duration):
    # ECC uploads at most one result per frame; ECC+ uploads a subset of
    # those. With video_bitrate >= 8 * message_bytes * frame_rate the CO
    # stream dominates both.
    fps = 30.0
    n_frames = int(duration * fps)
    n_results = min(n_keyframes + extra, n_frames)
    n_key = min(n_keyframes, n_results)
    common = dict(uplink_bandwidth=40e6, message_bytes=256, frame_rate=fps, video_bitrate=8e6)
    assert common["video_bitrate"] >= 8 * common["message_bytes"] * fps
    labels = {i: True for i in range(n_frames + 1)}
    results = [_upload(i) for i in range(n_results)]
    keyframes = results[:n_key]
    co = run_mission(ModeParams(mode=Mode.CO, **common), results, labels, duration)
    ecc = run_mission(ModeParams(mode=Mode.ECC, **common), results, labels, duration)
    eccp = run_mission(ModeParams(mode=Mode.ECC_PLUS, **common), keyframes, labels, duration)
    assert eccp.total_uplink_bytes <= ecc.total_uplink_bytes <= co.total_uplink_bytes
    assert eccp.n_uploads <= ecc.n_uploads


# ---------------------------------------------------------------- presets


def test_paper_table_preset_reproduces_reduction():
    modes = preset(PAPER_TABLE)
    uploads = [_upload(i) for i in range(7)]
    labels = {i: True for i in range(7)}
    co = run_mission(modes[Mode.CO], uploads, labels, duration_s=40.0)
    eccp = run_mission(modes[Mode.ECC_PLUS], uploads, labels, duration_s=40.0)
    assert co.mean_e2el == pytest.approx(1.0261)
    assert eccp.mean_e2el == pytest.approx(0.1133)
    reduction = 1.0 - eccp.mean_e2el / co.mean_e2el
    assert abs(reduction - 0.889) < 0.001


def test_paper_table_ecc_mean():
    modes = preset(PAPER_TABLE)
    uploads = [_upload(0)]
    report = run_mission(modes[Mode.ECC], uploads, {0: True}, duration_s=1.0)
    assert report.mean_e2el == pytest.approx(0.251 + 0.0513)


def test_unknown_preset_rejected():
    with pytest.raises(ConfigError):
        preset("no-such-preset")


def test_parse_mode_aliases():
    assert parse_mode("CO") is Mode.CO
    assert parse_mode("ecc") is Mode.ECC
    assert parse_mode("ECC+") is Mode.ECC_PLUS
    assert parse_mode("ecc_plus") is Mode.ECC_PLUS
    with pytest.raises(ConfigError):
        parse_mode("cloud")


def test_mode_params_validation():
    with pytest.raises(ConfigError):
        ModeParams(mode=Mode.ECC, uplink_bandwidth=0.0).validate()
    with pytest.raises(ConfigError):
        ModeParams(mode=Mode.ECC, loss_prob=1.0).validate()
    with pytest.raises(ConfigError):
        ModeParams(mode=Mode.ECC, t_infer_edge=-0.1).validate()


def test_report_dict_shape():
    report = run_mission(ModeParams(mode=Mode.ECC), [_upload(0)], {0: True}, duration_s=1.0)
    d = report.to_dict()
    assert set(d) == {
        "mode",
        "n_uploads",
        "mean_e2el_s",
        "accuracy",
        "total_uplink_bytes",
        "energy_comm_j",
        "energy_infer_j",
        "saturated",
    }
    assert isinstance(report, LatencyReport)
