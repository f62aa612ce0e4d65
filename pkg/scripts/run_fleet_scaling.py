#!/usr/bin/env python3
"""Sweep fleet size and measure time to 95% area coverage.

For each fleet size the planner is run over several seeds; the script
records the per-run coverage time and prints the per-size mean. Output
goes to fleet_scaling.csv in the chosen directory.
"""

import argparse
import csv
import math
from pathlib import Path

import numpy as np

from antinspect.planner import (
    AreaSpec,
    BaseStation,
    PlannerConfig,
    pso_optimize,
    time_to_coverage,
)


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-uavs", type=int, default=4)
    ap.add_argument("--seeds", type=int, default=10, help="seeds per fleet size")
    ap.add_argument("--length", type=float, default=120.0, help="area side, m")
    ap.add_argument("--cell", type=float, default=15.0, help="grid cell, m")
    ap.add_argument("--radius", type=float, default=30.0, help="coverage radius, m")
    ap.add_argument("--fraction", type=float, default=0.95)
    ap.add_argument("--iterations", type=int, default=80)
    ap.add_argument("--out", type=Path, default=Path("results/fleet_scaling"))
    return ap.parse_args()


def main():
    args = parse_args()
    area = AreaSpec(length_m=args.length, cell_m=args.cell, cover_radius_m=args.radius)
    stations = [
        BaseStation(-20.0, args.length / 2.0),
        BaseStation(args.length + 20.0, args.length / 2.0),
    ]

    args.out.mkdir(parents=True, exist_ok=True)
    rows = []
    means = []
    for n_uavs in range(1, args.max_uavs + 1):
        times = []
        for seed in range(args.seeds):
            config = PlannerConfig(
                n_uavs=n_uavs,
                n_waypoints=10,
                swarm_size=12,
                iterations=args.iterations,
                uav_speed=2.0,
                waypoint_dt=20.0,
                alpha3=5.0,
                rng_seed=seed,
            )
            result = pso_optimize(area, stations, config)
            t = time_to_coverage(list(result.paths), area, config.uav_speed, args.fraction)
            times.append(t)
            rows.append([n_uavs, seed, t, result.score])
        mean = float(np.mean(times))
        means.append(mean)
        reached = sum(1 for t in times if math.isfinite(t))
        print(f"{n_uavs} UAV(s): mean time to {args.fraction:.0%} coverage "
              f"{mean:8.1f} s  ({reached}/{len(times)} runs reached it)")

    with open(args.out / "fleet_scaling.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n_uavs", "seed", "time_to_coverage_s", "plan_score"])
        writer.writerows(rows)
    print(f"wrote {args.out / 'fleet_scaling.csv'}")

    if all(b <= a for a, b in zip(means, means[1:])):
        print("mean coverage time is non-increasing with fleet size")
    else:
        print("warning: mean coverage time is not monotone over this sweep")


if __name__ == "__main__":
    main()
