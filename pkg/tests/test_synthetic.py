import json

import pytest

from antinspect.errors import ConfigError
from antinspect.synthetic import GeneratorConfig, generate_mission, write_truth


def _small(**overrides) -> GeneratorConfig:
    base = dict(duration_s=4.0, n_targets=6, seed=13)
    base.update(overrides)
    return GeneratorConfig(**base)


def test_same_seed_same_mission():
    assert generate_mission(_small()) == generate_mission(_small())


def test_different_seed_different_stream():
    a = generate_mission(_small(seed=1))
    b = generate_mission(_small(seed=2))
    assert a.frames != b.frames


def test_frame_count_and_timestamps():
    mission = generate_mission(_small(duration_s=2.0))
    assert mission.n_frames == 60
    for f, frame in enumerate(mission.frames):
        assert frame.frame_index == f
        assert frame.timestamp == pytest.approx(f / 30.0)
    assert mission.duration_s == pytest.approx(2.0)


def test_fractional_duration_rounds_to_whole_frames():
    mission = generate_mission(_small(duration_s=1000.0 / 30.0, n_targets=3))
    assert mission.n_frames == 1000


def test_zero_accel_cap_gives_all_zero_imu():
    mission = generate_mission(_small(cam_accel_max_m_s2=0.0))
    assert len(mission.imu) == mission.n_frames
    assert all(s.ax == s.ay == s.az == 0.0 for s in mission.imu)


def test_imu_acceleration_respects_cap():
    cap = 0.4
    mission = generate_mission(_small(cam_accel_max_m_s2=cap))
    for s in mission.imu:
        assert abs(s.ax) <= cap and abs(s.ay) <= cap and abs(s.az) <= cap


def test_labels_match_target_windows():
    mission = generate_mission(_small())
    for f, label in enumerate(mission.labels):
        assert label.frame_index == f
        visible = any(t.first_frame <= f <= t.last_frame for t in mission.targets)
        assert label.is_interference is visible


def test_every_emission_appears_in_its_frame():
    mission = generate_mission(_small())
    for em in mission.emissions:
        frame = mission.frames[em.frame_index]
        boxes = {(d.bbox.cx, d.bbox.cy, d.bbox.w, d.bbox.h) for d in frame.detections}
        assert (em.cx, em.cy, em.w, em.h) in boxes
        truth = mission.targets[em.target_id]
        assert truth.first_frame <= em.frame_index <= truth.last_frame


def test_no_misses_means_one_emission_per_visible_frame():
    mission = generate_mission(_small(miss_prob=0.0))
    expected = sum(t.last_frame - t.first_frame + 1 for t in mission.targets)
    assert len(mission.emissions) == expected
    per_target = mission.emissions_by_target()
    for t in mission.targets:
        frames = [em.frame_index for em in per_target[t.target_id]]
        assert frames == list(range(t.first_frame, t.last_frame + 1))


def test_clutter_stays_outside_populated_band():
    mission = generate_mission(_small(clutter_per_frame=2.0, center_jitter_px=0.0))
    emitted = {(em.frame_index, em.cx, em.cy) for em in mission.emissions}
    clutter = [
        d
        for frame in mission.frames
        for d in frame.detections
        if (frame.frame_index, d.bbox.cx, d.bbox.cy) not in emitted
    ]
    assert clutter  # rate 2.0 over 120 frames surely produces some
    assert all(d.bbox.cx <= -500.0 and d.bbox.cy <= -500.0 for d in clutter)


def test_oversized_flag_matches_geometry():
    config = _small(n_targets=40, oversize_prob=0.5, duration_s=2.0)
    mission = generate_mission(config)
    kinds = {t.oversized for t in mission.targets}
    assert kinds == {True, False}
    for t in mission.targets:
        if t.oversized:
            assert t.base_w >= config.oversize_min_px
            assert t.base_h >= config.oversize_min_px
        else:
            assert config.size_min_px <= t.base_w <= config.size_max_px
            assert config.size_min_px <= t.base_h <= config.size_max_px


def test_visibility_windows_inside_mission():
    mission = generate_mission(_small())
    for t in mission.targets:
        assert 0 <= t.first_frame <= t.last_frame < mission.n_frames


def test_truth_file_round_trip(tmp_path):
    mission = generate_mission(_small())
    out = tmp_path / "truth.json"
    write_truth(out, mission)
    payload = json.loads(out.read_text())
    assert len(payload["targets"]) == len(mission.targets)
    assert len(payload["emissions"]) == len(mission.emissions)
    assert payload["targets"][0]["target_id"] == mission.targets[0].target_id


def test_generator_config_validation():
    with pytest.raises(ConfigError):
        generate_mission(_small(duration_s=0.0))
    with pytest.raises(ConfigError):
        generate_mission(_small(n_targets=-1))
    with pytest.raises(ConfigError):
        generate_mission(_small(miss_prob=1.5))
    with pytest.raises(ConfigError):
        generate_mission(_small(clutter_per_frame=-0.1))


def test_impossible_separation_is_reported():
    config = _small(n_targets=50, world_extent_px=300.0, min_separation_px=260.0)
    with pytest.raises(ConfigError):
        generate_mission(config)
