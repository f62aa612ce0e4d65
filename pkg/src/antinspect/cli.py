"""Command-line entry points.

Subcommands: generate (synthetic mission), track (one mode end to end),
compare (all modes side by side), plan (swarm coverage planning), cost
(convolution cost table). Each takes one JSON config file; paths inside a
config resolve relative to the config file. Exit codes: 0 success, 1
usage or config error, 2 runtime failure.

All outputs are written atomically (temp file, then rename) and contain
no timestamps or environment state, so rerunning a command with the same
config reproduces the files byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from . import comms, convcost, core, planner, synthetic
from .errors import ConfigError, PipelineError
from .keyframes import Keyframe, KsaConfig
from .pipeline import TrackingResult, run_tracking
from .tracking import TrackerConfig


# --------------------------------------------------------------------------
# Config plumbing


def _load_json(path: Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def _build_dataclass(cls: type, data: Any, where: str):
    """Instantiate a config dataclass from a JSON object, rejecting unknown
    keys and running the class's validate() when present."""
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object, got {type(data).__name__}")
    known = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(f"{where}.{key}: unknown field (known: {', '.join(sorted(known))})")
    try:
        obj = cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    validate = getattr(obj, "validate", None)
    if callable(validate):
        try:
            validate()
        except ConfigError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    return obj


def _resolve(base: Path, value: str, where: str) -> Path:
    if not isinstance(value, str) or not value:
        raise ConfigError(f"{where}: expected a non-empty path string")
    p = Path(value)
    return p if p.is_absolute() else base / p


# --------------------------------------------------------------------------
# Atomic output helpers


def _atomic_write(path: Path, write_fn: Callable[[Path], None]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    write_fn(tmp)
    os.replace(tmp, path)


def _write_text(path: Path, text: str) -> None:
    _atomic_write(path, lambda tmp: tmp.write_text(text, encoding="utf-8"))


def _write_json(path: Path, payload: Any) -> None:
    _write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _write_text(path, buf.getvalue())


def _upload_row(upload: Keyframe) -> dict:
    return {
        "frame_index": upload.frame_index,
        "track_id": upload.track_id,
        "class_id": upload.class_id,
        "cx": upload.bbox.cx,
        "cy": upload.bbox.cy,
        "w": upload.bbox.w,
        "h": upload.bbox.h,
        "upload_timestamp": upload.upload_timestamp,
    }


# --------------------------------------------------------------------------
# Shared mission loading


def _load_mode_params(cfg: dict, where: str) -> dict[comms.Mode, comms.ModeParams]:
    """Per-mode parameters from either a bundled preset or explicit values."""
    section = cfg.get("comms", {"preset": comms.PAPER_TABLE})
    if not isinstance(section, dict):
        raise ConfigError(f"{where}.comms: expected an object")
    if "preset" in section and "params" in section:
        raise ConfigError(f"{where}.comms: give either 'preset' or 'params', not both")
    if "params" in section:
        params_obj = section["params"]
        if not isinstance(params_obj, dict):
            raise ConfigError(f"{where}.comms.params: expected an object keyed by mode")
        out: dict[comms.Mode, comms.ModeParams] = {}
        for mode_name, body in params_obj.items():
            mode = comms.parse_mode(mode_name)
            if not isinstance(body, dict):
                raise ConfigError(f"{where}.comms.params.{mode_name}: expected an object")
            body = dict(body)
            body.pop("mode", None)
            params = _build_dataclass(
                comms.ModeParams,
                {"mode": mode, **body},
                f"{where}.comms.params.{mode_name}",
            )
            out[mode] = params
        return out
    preset_name = section.get("preset", comms.PAPER_TABLE)
    if not isinstance(preset_name, str):
        raise ConfigError(f"{where}.comms.preset: expected a string")
    return comms.preset(preset_name)


def _load_mission_inputs(cfg: dict, base: Path, where: str):
    for key in ("detections", "imu", "labels"):
        if key not in cfg:
            raise ConfigError(f"{where}.{key}: required path is missing")
    frames = core.read_frames(_resolve(base, cfg["detections"], f"{where}.detections"))
    imu = core.read_imu(_resolve(base, cfg["imu"], f"{where}.imu"))
    labels = core.read_labels(_resolve(base, cfg["labels"], f"{where}.labels"))
    tracker_cfg = _build_dataclass(TrackerConfig, cfg.get("tracker", {}), f"{where}.tracker")
    ksa_cfg = _build_dataclass(KsaConfig, cfg.get("ksa", {}), f"{where}.ksa")
    zero_fill = bool(cfg.get("zero_fill_missing_imu", False))
    return frames, imu, labels, tracker_cfg, ksa_cfg, zero_fill


def _mission_duration(frames: Sequence[core.FrameRecord], frame_rate: float) -> float:
    if not frames:
        return 1.0
    return frames[-1].timestamp - frames[0].timestamp + 1.0 / frame_rate


def _uploads_for_mode(mode: comms.Mode, result: TrackingResult) -> tuple[Keyframe, ...]:
    """CO and ECC push every per-frame result; ECC+ only the keyframes."""
    return result.keyframes if mode is comms.Mode.ECC_PLUS else result.matched_stream


# --------------------------------------------------------------------------
# Subcommands


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = _load_json(args.config) if args.config else {}
    where = args.config.name if args.config else "config"
    gen_section = dict(cfg.get("generator", {}))
    if args.seed is not None:
        gen_section["seed"] = args.seed
    elif "seed" in cfg:
        gen_section.setdefault("seed", cfg["seed"])
    gen_cfg = _build_dataclass(synthetic.GeneratorConfig, gen_section, f"{where}.generator")

    out_dir = _output_dir(args, cfg)
    mission = synthetic.generate_mission(gen_cfg)
    _atomic_write(out_dir / "detections.jsonl", lambda p: core.write_frames(p, mission.frames))
    _atomic_write(out_dir / "imu.jsonl", lambda p: core.write_imu(p, mission.imu))
    _atomic_write(out_dir / "labels.jsonl", lambda p: core.write_labels(p, mission.labels))
    _atomic_write(out_dir / "truth.json", lambda p: synthetic.write_truth(p, mission))
    print(
        f"generated {mission.n_frames} frames, {len(mission.targets)} targets "
        f"-> {out_dir}"
    )
    return 0


def cmd_track(args: argparse.Namespace) -> int:
    cfg = _load_json(args.config)
    where = args.config.name
    base = args.config.parent
    frames, imu, labels, tracker_cfg, ksa_cfg, zero_fill = _load_mission_inputs(
        cfg, base, where
    )
    if "mode" not in cfg:
        raise ConfigError(f"{where}.mode: required (CO, ECC, or ECC+)")
    mode = comms.parse_mode(str(cfg["mode"]))
    params = _load_mode_params(cfg, where).get(mode)
    if params is None:
        raise ConfigError(f"{where}.comms.params: no parameters for mode {mode.value}")

    result = run_tracking(frames, imu, tracker_cfg, ksa_cfg, zero_fill)
    uploads = _uploads_for_mode(mode, result)
    duration = _mission_duration(frames, params.frame_rate)
    report = comms.run_mission(params, uploads, core.label_map(labels), duration, len(frames))

    out_dir = _output_dir(args, cfg)
    _write_text(
        out_dir / "tracks.jsonl",
        "".join(json.dumps(dataclasses.asdict(r), sort_keys=True) + "\n" for r in result.track_rows),
    )
    _write_text(
        out_dir / "uploads.jsonl",
        "".join(json.dumps(_upload_row(u), sort_keys=True) + "\n" for u in uploads),
    )
    _write_json(out_dir / "report.json", report.to_dict())
    _write_csv(
        out_dir / "e2el.csv",
        ["upload_index", "frame_index", "e2el_s"],
        [
            [i, u.frame_index, t]
            for i, (u, t) in enumerate(zip(uploads, report.per_upload_e2el))
        ],
    )
    print(
        f"{mode.value}: {report.n_uploads} uploads, mean E2EL {report.mean_e2el:.4f} s, "
        f"accuracy {report.accuracy:.3f} -> {out_dir}"
    )
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    cfg = _load_json(args.config)
    where = args.config.name
    base = args.config.parent
    frames, imu, labels, tracker_cfg, ksa_cfg, zero_fill = _load_mission_inputs(
        cfg, base, where
    )
    mode_names = cfg.get("modes", ["CO", "ECC", "ECC+"])
    if not isinstance(mode_names, list) or not mode_names:
        raise ConfigError(f"{where}.modes: expected a non-empty list of mode names")
    modes = [comms.parse_mode(str(m)) for m in mode_names]
    all_params = _load_mode_params(cfg, where)

    result = run_tracking(frames, imu, tracker_cfg, ksa_cfg, zero_fill)
    label_by_frame = core.label_map(labels)
    reports: dict[comms.Mode, comms.LatencyReport] = {}
    for mode in modes:
        params = all_params.get(mode)
        if params is None:
            raise ConfigError(f"{where}.comms.params: no parameters for mode {mode.value}")
        uploads = _uploads_for_mode(mode, result)
        duration = _mission_duration(frames, params.frame_rate)
        reports[mode] = comms.run_mission(
            params, uploads, label_by_frame, duration, len(frames)
        )

    out_dir = _output_dir(args, cfg)
    header = [
        "mode",
        "n_uploads",
        "mean_e2el_s",
        "accuracy",
        "total_uplink_bytes",
        "energy_comm_j",
        "energy_infer_j",
        "saturated",
    ]
    rows = [
        [
            r.mode,
            r.n_uploads,
            r.mean_e2el,
            r.accuracy,
            r.total_uplink_bytes,
            r.energy_comm_j,
            r.energy_infer_j,
            int(r.saturated),
        ]
        for r in (reports[m] for m in modes)
    ]
    _write_csv(out_dir / "comparison.csv", header, rows)

    summary: dict[str, Any] = {
        "modes": {m.value: reports[m].to_dict() for m in modes},
    }
    if comms.Mode.CO in reports and comms.Mode.ECC_PLUS in reports:
        co = reports[comms.Mode.CO].mean_e2el
        eccp = reports[comms.Mode.ECC_PLUS].mean_e2el
        if co > 0:
            summary["reduction_co_to_ecc_plus"] = 1.0 - eccp / co
    _write_json(out_dir / "summary.json", summary)

    for mode in modes:
        r = reports[mode]
        print(
            f"{r.mode:>4}: mean E2EL {r.mean_e2el:8.4f} s  accuracy {r.accuracy:.3f}  "
            f"bytes {r.total_uplink_bytes:.0f}"
        )
    if "reduction_co_to_ecc_plus" in summary:
        print(f"E2EL reduction CO -> ECC+: {summary['reduction_co_to_ecc_plus'] * 100.0:.1f}%")
    return 0


def cmd_plan(args: argparse.Namespace) -> int:
    cfg = _load_json(args.config)
    where = args.config.name
    if "area" not in cfg:
        raise ConfigError(f"{where}.area: required")
    area = _build_dataclass(planner.AreaSpec, cfg["area"], f"{where}.area")
    stations_cfg = cfg.get("stations")
    if not isinstance(stations_cfg, list) or not stations_cfg:
        raise ConfigError(f"{where}.stations: expected a non-empty list")
    stations = [
        _build_dataclass(planner.BaseStation, s, f"{where}.stations[{i}]")
        for i, s in enumerate(stations_cfg)
    ]
    planner_section = dict(cfg.get("planner", {}))
    if args.seed is not None:
        planner_section["rng_seed"] = args.seed
    plan_cfg = _build_dataclass(planner.PlannerConfig, planner_section, f"{where}.planner")

    result = planner.pso_optimize(area, stations, plan_cfg)

    out_dir = _output_dir(args, cfg)
    _write_json(
        out_dir / "plan.json",
        {
            "score": float(result.score),
            "parts": {k: float(v) for k, v in sorted(result.parts.items())},
            "uncovered_area_m2": float(planner.uncovered_area(result.paths, area)),
            "n_uavs": len(result.paths),
            "path_lengths_m": [float(p.length_m) for p in result.paths],
        },
    )
    _write_csv(
        out_dir / "waypoints.csv",
        ["uav", "waypoint", "x", "y", "theta"],
        [
            [j, i, float(p.xy[i, 0]), float(p.xy[i, 1]), float(p.theta[i])]
            for j, p in enumerate(result.paths)
            for i in range(p.xy.shape[0])
        ],
    )
    _write_csv(
        out_dir / "gbest_trace.csv",
        ["iteration", "best_score"],
        [[i, float(s)] for i, s in enumerate(result.gbest_trace)],
    )
    _write_csv(
        out_dir / "handovers.csv",
        ["uav", "waypoint", "station"],
        [
            [j, i, s]
            for j, serving in enumerate(result.serving)
            for i, s in enumerate(serving)
        ],
    )
    print(f"best score {result.score:.3f} over {plan_cfg.iterations} iterations -> {out_dir}")
    return 0


def cmd_cost(args: argparse.Namespace) -> int:
    cfg = _load_json(args.config)
    where = args.config.name
    specs_cfg = cfg.get("specs")
    if not isinstance(specs_cfg, list):
        raise ConfigError(f"{where}.specs: expected a list")
    rows = []
    for i, entry in enumerate(specs_cfg):
        if not isinstance(entry, dict):
            raise ConfigError(f"{where}.specs[{i}]: expected an object")
        entry = dict(entry)
        name = entry.pop("name", f"spec{i}")
        spec = _build_dataclass(convcost.ConvSpec, entry, f"{where}.specs[{i}]")
        std = convcost.std_conv_cost(spec)
        kxk, one, total = convcost.hetconv_cost(spec)
        if spec.kernel == 3 and spec.parts == 4:
            reduction: Any = convcost.bottleneck_reduction(spec)
        else:
            reduction = ""
        rows.append([name, std, kxk, one, total, reduction])
    out_dir = _output_dir(args, cfg)
    _write_csv(
        out_dir / "costs.csv",
        ["spec", "std", "het_3x3", "het_1x1", "het_total", "reduction_R"],
        rows,
    )
    print(f"{len(rows)} specs -> {out_dir / 'costs.csv'}")
    return 0


# --------------------------------------------------------------------------
# Entry point


def _output_dir(args: argparse.Namespace, cfg: dict) -> Path:
    if args.output_dir is not None:
        out = Path(args.output_dir)
    elif "output_dir" in cfg:
        base = args.config.parent if args.config else Path(".")
        out = _resolve(base, cfg["output_dir"], "output_dir")
    else:
        out = Path("out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _add_common(parser: argparse.ArgumentParser, config_required: bool) -> None:
    if config_required:
        parser.add_argument("config", type=Path, help="JSON config file")
    else:
        parser.add_argument("config", type=Path, nargs="?", help="JSON config file (optional)")
    parser.add_argument("--output-dir", type=Path, default=None, help="where to write outputs")
    parser.add_argument("--seed", type=int, default=None, help="override the config's seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="antinspect",
        description="UAV antenna-inspection toolkit: tracking, keyframe uploads, "
        "mode comparison, and swarm coverage planning.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a seeded synthetic mission")
    _add_common(p, config_required=False)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("track", help="run the tracking pipeline under one upload mode")
    _add_common(p, config_required=True)
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("compare", help="run the same mission under several upload modes")
    _add_common(p, config_required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("plan", help="optimize multi-UAV coverage paths")
    _add_common(p, config_required=True)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("cost", help="tabulate convolution costs for layer specs")
    _add_common(p, config_required=True)
    p.set_defaults(func=cmd_cost)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
