"""Multi-UAV coverage path planning over a gridded inspection area.

Paths are waypoint sequences flown at constant speed; every path starts
and ends at the area center. The planning objective charges, per UAV,
the path length, a free-space-path-loss term toward the base stations, a
handover count, and the grid area left uncovered by the fleet; the full
variant adds inverse-SINR and an inter-UAV collision potential.

The optimizer is a particle swarm. Velocity and position updates act on
the free waypoints; the proposed waypoints are then projected back onto
a constant-step trajectory (each segment has length uav_speed *
waypoint_dt, aimed at the proposal), with the return leg flown straight
back to the center. Waypoints clamp to the area square and the clamped
velocity components are zeroed.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, DegenerateGeometry, DomainError

_C_M_PER_S = 299_792_458.0
_FOUR_PI = 4.0 * math.pi
# 20 log10(4 pi / c): constant term of the free-space path loss in dB.
_FSPL_DB_CONST = 20.0 * math.log10(_FOUR_PI / _C_M_PER_S)
# Distances below this are clamped inside objective terms; the far-field
# formula is meaningless that close to a station.
_NEAR_FIELD_M = 1.0
_EPS_DIST = 1e-9


@functools.lru_cache(maxsize=16)
def _grid_midpoints(cells_per_side: int, cell_m: float) -> np.ndarray:
    coords = (np.arange(cells_per_side) + 0.5) * cell_m
    gx, gy = np.meshgrid(coords, coords, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def fspl(distance_m: float, freq_hz: float) -> float:
    """Free-space path loss in dB: 20 log10(d) + 20 log10(f) + 20 log10(4 pi / c)."""
    if distance_m <= 0.0:
        raise DomainError(f"fspl needs distance > 0, got {distance_m}")
    if freq_hz <= 0.0:
        raise DomainError(f"fspl needs frequency > 0, got {freq_hz}")
    return 20.0 * math.log10(distance_m) + 20.0 * math.log10(freq_hz) + _FSPL_DB_CONST


@dataclass(frozen=True)
class AreaSpec:
    """Square inspection area of side length_m, gridded into cell_m cells;
    a grid cell counts as covered when its midpoint lies within
    cover_radius_m of some waypoint."""

    length_m: float
    cell_m: float
    cover_radius_m: float

    def __post_init__(self) -> None:
        if self.length_m <= 0 or self.cell_m <= 0 or self.cover_radius_m <= 0:
            raise ConfigError("AreaSpec requires positive length, cell size, and radius")
        n = self.length_m / self.cell_m
        if abs(n - round(n)) > 1e-9:
            raise ConfigError(
                f"area length {self.length_m} must be divisible by cell size {self.cell_m}"
            )

    @property
    def cells_per_side(self) -> int:
        return int(round(self.length_m / self.cell_m))

    @property
    def center(self) -> tuple[float, float]:
        return (self.length_m / 2.0, self.length_m / 2.0)

    def midpoints(self) -> np.ndarray:
        """(N, 2) array of grid cell midpoints."""
        return _grid_midpoints(self.cells_per_side, self.cell_m).copy()


@dataclass(frozen=True)
class BaseStation:
    x: float
    y: float
    carrier_freq_hz: float = 3.5e9

    def __post_init__(self) -> None:
        if self.carrier_freq_hz <= 0:
            raise ConfigError(f"carrier_freq_hz must be > 0, got {self.carrier_freq_hz}")


@dataclass(frozen=True)
class UavPath:
    """Flown trajectory: waypoints (n, 2) and per-waypoint heading (n,).

    The heading at index i is the direction flown from waypoint i toward
    waypoint i+1; the final waypoint repeats the incoming heading.
    """

    xy: np.ndarray
    theta: np.ndarray

    def __post_init__(self) -> None:
        xy = np.asarray(self.xy, dtype=float)
        theta = np.asarray(self.theta, dtype=float)
        if xy.ndim != 2 or xy.shape[1] != 2 or xy.shape[0] < 2:
            raise ConfigError("UavPath.xy must be an (n, 2) array with n >= 2")
        if theta.shape != (xy.shape[0],):
            raise ConfigError("UavPath.theta must have one heading per waypoint")
        object.__setattr__(self, "xy", xy)
        object.__setattr__(self, "theta", theta)

    @property
    def length_m(self) -> float:
        return float(np.sum(np.linalg.norm(np.diff(self.xy, axis=0), axis=1)))

    @classmethod
    def from_waypoints(cls, xy: np.ndarray) -> "UavPath":
        xy = np.asarray(xy, dtype=float)
        n = xy.shape[0]
        theta = np.zeros(n)
        seg = np.diff(xy, axis=0)
        theta[:-1] = np.arctan2(seg[:, 1], seg[:, 0])
        # A zero-length segment keeps the previous heading.
        for i in np.nonzero((seg[:, 0] == 0.0) & (seg[:, 1] == 0.0))[0]:
            theta[i] = theta[i - 1] if i > 0 else 0.0
        theta[-1] = theta[-2] if n > 1 else 0.0
        return cls(xy=xy, theta=theta)


@dataclass
class PlannerConfig:
    """Swarm optimizer and objective parameters.

    n_waypoints counts the free waypoints between the pinned launch and
    return points. alpha1 weights the literal +sum(1/FSPL) term; set
    fspl_sign=-1 to reward proximity to stations instead. Endurance is
    uav_speed * battery_wh * 3600 / flight_power_w meters; length beyond
    it costs endurance_penalty per meter.
    """

    n_uavs: int = 4
    n_waypoints: int = 20
    swarm_size: int = 20
    iterations: int = 300
    omega: float = 0.5
    c1: float = 1.5
    c2: float = 1.5
    alpha1: float = 1.0
    alpha2: float = 1.0
    alpha3: float = 1.0
    alpha4: float = 0.0
    alpha5: float = 0.0
    fspl_sign: int = 1
    collision_c: float = 1.0
    collision_q: float = 2.0
    uav_speed: float = 2.0
    waypoint_dt: float = 60.0
    battery_wh: float = 244.2
    flight_power_w: float = 30.0
    tx_power_w: float = 0.1
    antenna_gain: float = 1.0
    noise_w: float = 1e-13
    endurance_penalty: float = 1e6
    rng_seed: int = 0

    def validate(self) -> None:
        if self.n_uavs < 1:
            raise ConfigError(f"planner.n_uavs must be >= 1, got {self.n_uavs}")
        if self.n_waypoints < 1:
            raise ConfigError(f"planner.n_waypoints must be >= 1, got {self.n_waypoints}")
        if self.swarm_size < 1:
            raise ConfigError(f"planner.swarm_size must be >= 1, got {self.swarm_size}")
        if self.iterations < 1:
            raise ConfigError(f"planner.iterations must be >= 1, got {self.iterations}")
        if not (0.0 <= self.omega <= 1.0):
            raise ConfigError(f"planner.omega must be in [0, 1], got {self.omega}")
        if self.c1 < 0 or self.c2 < 0:
            raise ConfigError("planner.c1 and c2 must be >= 0")
        for name in ("alpha1", "alpha2", "alpha3", "alpha4", "alpha5"):
            if getattr(self, name) < 0:
                raise ConfigError(f"planner.{name} must be >= 0")
        if self.fspl_sign not in (1, -1):
            raise ConfigError(f"planner.fspl_sign must be 1 or -1, got {self.fspl_sign}")
        if self.uav_speed <= 0 or self.waypoint_dt <= 0:
            raise ConfigError("planner.uav_speed and waypoint_dt must be > 0")
        if self.battery_wh <= 0 or self.flight_power_w <= 0:
            raise ConfigError("planner.battery_wh and flight_power_w must be > 0")
        if self.tx_power_w <= 0 or self.antenna_gain <= 0 or self.noise_w <= 0:
            raise ConfigError("planner SINR parameters must be > 0")
        if self.collision_q <= 0 or self.collision_c < 0:
            raise ConfigError("planner.collision_q must be > 0 and collision_c >= 0")

    @property
    def step_len_m(self) -> float:
        return self.uav_speed * self.waypoint_dt

    @property
    def endurance_m(self) -> float:
        return self.uav_speed * self.battery_wh * 3600.0 / self.flight_power_w


@dataclass(frozen=True)
class PlanResult:
    paths: tuple[UavPath, ...]
    score: float
    parts: dict[str, float]
    gbest_trace: tuple[float, ...]
    serving: tuple[tuple[int, ...], ...]


# --------------------------------------------------------------------------
# Objective terms


def _fleet_waypoints(paths: Sequence[UavPath]) -> np.ndarray:
    return np.vstack([p.xy for p in paths])


def uncovered_area(paths: Sequence[UavPath], area: AreaSpec) -> float:
    """Grid area (m^2) whose cell midpoints lie farther than the cover
    radius from every waypoint of every path."""
    mids = _grid_midpoints(area.cells_per_side, area.cell_m)
    if not paths:
        return float(mids.shape[0]) * area.cell_m**2
    wps = _fleet_waypoints(paths)
    d2 = (mids[:, 0:1] - wps[None, :, 0]) ** 2
    d2 += (mids[:, 1:2] - wps[None, :, 1]) ** 2
    uncovered = np.count_nonzero(d2.min(axis=1) > area.cover_radius_m**2)
    return float(uncovered) * area.cell_m**2


def serving_stations(path: UavPath, stations: Sequence[BaseStation]) -> list[int]:
    """Nearest station index per waypoint; ties go to the lower index."""
    if not stations:
        raise ConfigError("at least one base station is required")
    pos = np.array([[s.x, s.y] for s in stations])
    d2 = ((path.xy[:, None, :] - pos[None, :, :]) ** 2).sum(axis=2)
    return [int(i) for i in d2.argmin(axis=1)]


def handovers(path: UavPath, stations: Sequence[BaseStation]) -> int:
    serving = serving_stations(path, stations)
    return sum(1 for a, b in zip(serving, serving[1:]) if a != b)


def _fspl_path_term(path: UavPath, stations: Sequence[BaseStation]) -> float:
    """Per-waypoint average of sum over stations of 1/FSPL(d) in dB,
    with distances clamped to the near-field floor."""
    pos = np.array([[s.x, s.y] for s in stations])
    freqs = np.array([s.carrier_freq_hz for s in stations])
    d = np.sqrt(((path.xy[:, None, :] - pos[None, :, :]) ** 2).sum(axis=2))
    d = np.maximum(d, _NEAR_FIELD_M)
    loss_db = 20.0 * np.log10(d) + 20.0 * np.log10(freqs)[None, :] + _FSPL_DB_CONST
    return float(np.mean(np.sum(1.0 / loss_db, axis=1)))


def objective(
    paths: Sequence[UavPath],
    area: AreaSpec,
    stations: Sequence[BaseStation],
    config: PlannerConfig,
) -> tuple[float, dict[str, float]]:
    """Coverage-planning objective: per UAV, path length plus the weighted
    FSPL, handover, and uncovered-area terms (the uncovered area is the
    fleet-wide quantity, charged once per UAV).

    Returns (score, weighted term decomposition summing to the score).
    """
    if not paths:
        raise ConfigError("objective needs at least one path")
    uncov = uncovered_area(paths, area)
    length_term = sum(p.length_m for p in paths)
    fspl_term = config.fspl_sign * config.alpha1 * sum(
        _fspl_path_term(p, stations) for p in paths
    )
    handover_term = config.alpha2 * sum(handovers(p, stations) for p in paths)
    coverage_term = config.alpha3 * uncov * len(paths)
    parts = {
        "path_length": length_term,
        "fspl": fspl_term,
        "handover": handover_term,
        "uncovered": coverage_term,
    }
    return sum(parts.values()), parts


def sinr(
    uav_index: int,
    positions: np.ndarray,
    stations: Sequence[BaseStation],
    config: PlannerConfig,
) -> float:
    """Signal-to-interference-plus-noise ratio of one UAV's uplink.

    The serving link runs to the nearest station; interference is the sum
    of the co-channel power received over the distances to every other
    UAV. Homogeneous transmit power and gain across the fleet.
    """
    positions = np.asarray(positions, dtype=float)
    if not (0 <= uav_index < positions.shape[0]):
        raise ConfigError(f"uav_index {uav_index} out of range")
    if not stations:
        raise ConfigError("at least one base station is required")
    me = positions[uav_index]
    station_pos = np.array([[s.x, s.y] for s in stations])
    dists = np.linalg.norm(station_pos - me[None, :], axis=1)
    serving = int(dists.argmin())
    d_s = max(float(dists[serving]), _NEAR_FIELD_M)
    lam = _C_M_PER_S / stations[serving].carrier_freq_hz
    pg = config.tx_power_w * config.antenna_gain
    signal = pg * (lam / (_FOUR_PI * d_s)) ** 2
    interference = 0.0
    for i in range(positions.shape[0]):
        if i == uav_index:
            continue
        d_i = float(np.linalg.norm(positions[i] - me))
        if d_i <= 0.0:
            raise DegenerateGeometry(f"UAVs {i} and {uav_index} coincide")
        interference += pg * (lam / (_FOUR_PI * d_i)) ** 2
    return signal / (interference + config.noise_w)


def collision_potential(positions: np.ndarray, c: float, q: float) -> float:
    """Repulsive potential sum over UAV pairs: c / |p_i - p_j|^q."""
    positions = np.asarray(positions, dtype=float)
    total = 0.0
    n = positions.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            d = float(np.linalg.norm(positions[i] - positions[j]))
            if d <= 0.0:
                raise DegenerateGeometry(f"UAVs {i} and {j} coincide")
            total += c / d**q
    return total


def _interference_terms(
    paths: Sequence[UavPath],
    stations: Sequence[BaseStation],
    config: PlannerConfig,
) -> tuple[float, float]:
    """(mean sum of 1/SINR, mean collision potential) across the interior
    waypoint steps, treating the fleet as synchronized along its paths.

    The pinned launch/return points are shared by every UAV, so only the
    interior steps are meaningful; pair distances are floored at a tiny
    epsilon to keep coincident proposals finite during optimization.
    """
    k = len(paths)
    n_wp = paths[0].xy.shape[0]
    n_steps = n_wp - 2
    if k < 1 or n_steps < 1:
        return 0.0, 0.0
    # (steps, uav, 2): the fleet advances along its paths in lockstep.
    pos = np.stack([p.xy[1:-1] for p in paths], axis=1)
    station_pos = np.array([[s.x, s.y] for s in stations])
    freqs = np.array([s.carrier_freq_hz for s in stations])
    pg = config.tx_power_w * config.antenna_gain

    sd2 = ((pos[:, :, None, :] - station_pos[None, None, :, :]) ** 2).sum(axis=3)
    serving = sd2.argmin(axis=2)
    d_s = np.sqrt(np.take_along_axis(sd2, serving[:, :, None], axis=2)[:, :, 0])
    d_s = np.maximum(d_s, _NEAR_FIELD_M)
    lam = _C_M_PER_S / freqs[serving]
    signal = pg * (lam / (_FOUR_PI * d_s)) ** 2

    if k > 1:
        diff = pos[:, :, None, :] - pos[:, None, :, :]
        pd = np.sqrt((diff**2).sum(axis=3))
        idx = np.arange(k)
        pd[:, idx, idx] = np.inf
        pd = np.maximum(pd, _EPS_DIST)
        recv = pg * (lam[:, :, None] / (_FOUR_PI * pd)) ** 2
        interference = recv.sum(axis=2)
        iu, ju = np.triu_indices(k, k=1)
        vca_sum = float(np.sum(config.collision_c / pd[:, iu, ju] ** config.collision_q))
    else:
        interference = np.zeros_like(signal)
        vca_sum = 0.0
    inv_sinr_sum = float(np.sum((interference + config.noise_w) / signal))
    return inv_sinr_sum / n_steps, vca_sum / n_steps


def objective_full(
    paths: Sequence[UavPath],
    area: AreaSpec,
    stations: Sequence[BaseStation],
    config: PlannerConfig,
) -> tuple[float, dict[str, float]]:
    """Coverage objective plus the inverse-SINR and collision terms."""
    base, parts = objective(paths, area, stations, config)
    inv_sinr, vca = _interference_terms(paths, stations, config)
    parts = dict(parts)
    parts["sinr"] = config.alpha4 * inv_sinr
    parts["collision"] = config.alpha5 * vca
    return base + parts["sinr"] + parts["collision"], parts


# --------------------------------------------------------------------------
# Particle swarm optimizer


def regenerate(
    proposed: np.ndarray, area: AreaSpec, step_len: float
) -> tuple[np.ndarray, np.ndarray]:
    """Project proposed free waypoints onto a speed-feasible trajectory.

    Starting at the area center, each step flies at most step_len toward
    the corresponding proposal (landing on it when it is within reach)
    and clamps to the area square. The projection is idempotent: feasible
    waypoint sequences map to themselves. Returns the full path array
    (n+2, 2) including the pinned launch and return points, and a boolean
    clamp mask over the free waypoints.
    """
    proposed = np.asarray(proposed, dtype=float)
    n = proposed.shape[0]
    length = area.length_m
    path = np.empty((n + 2, 2))
    cx, cy = area.center
    path[0] = (cx, cy)
    clamped = np.zeros((n, 2), dtype=bool)
    for i in range(n):
        px, py = float(proposed[i, 0]), float(proposed[i, 1])
        dx, dy = px - cx, py - cy
        norm = math.hypot(dx, dy)
        if norm < 1e-12:
            nx, ny = cx, cy
        elif norm <= step_len * (1.0 + 1e-12):
            # The tolerance absorbs the roundoff of a previous clamped
            # landing, which can sit an ulp outside the step circle;
            # without it the projection would not be idempotent.
            nx, ny = px, py
        else:
            scale = step_len / norm
            nx, ny = cx + dx * scale, cy + dy * scale
        bx = min(max(nx, 0.0), length)
        by = min(max(ny, 0.0), length)
        if bx != nx:
            clamped[i, 0] = True
        if by != ny:
            clamped[i, 1] = True
        path[i + 1] = (bx, by)
        cx, cy = bx, by
    path[n + 1] = area.center
    return path, clamped


def _random_walk_proposal(
    area: AreaSpec, step_len: float, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Initial genome: a clamped constant-step heading walk from the center."""
    heading = rng.uniform(0.0, 2.0 * math.pi)
    cur = np.array(area.center)
    out = np.empty((n, 2))
    for i in range(n):
        heading += rng.uniform(-math.pi / 3.0, math.pi / 3.0) if i else 0.0
        cur = cur + step_len * np.array([math.cos(heading), math.sin(heading)])
        cur = np.clip(cur, 0.0, area.length_m)
        out[i] = cur
    return out


def _paths_from_genome(
    genome: np.ndarray, area: AreaSpec, step_len: float
) -> tuple[list[UavPath], np.ndarray]:
    paths = []
    clamp_masks = np.zeros_like(genome, dtype=bool)
    for j in range(genome.shape[0]):
        xy, clamped = regenerate(genome[j], area, step_len)
        clamp_masks[j] = clamped
        paths.append(UavPath.from_waypoints(xy))
    return paths, clamp_masks


def _project_and_evaluate(
    proposal: np.ndarray,
    area: AreaSpec,
    stations: Sequence[BaseStation],
    config: PlannerConfig,
) -> tuple[np.ndarray, np.ndarray, float, dict[str, float]]:
    """Project a proposal onto the feasible manifold and score it.

    Returns (projected genome, clamp mask, score with endurance penalty,
    weighted decomposition summing to the score).
    """
    paths, clamp_masks = _paths_from_genome(proposal, area, config.step_len_m)
    genome = np.stack([p.xy[1:-1] for p in paths])
    score, parts = objective_full(paths, area, stations, config)
    over = sum(max(0.0, p.length_m - config.endurance_m) for p in paths)
    parts["endurance"] = config.endurance_penalty * over
    score += parts["endurance"]
    return genome, clamp_masks, score, parts


def pso_optimize(
    area: AreaSpec,
    stations: Sequence[BaseStation],
    config: PlannerConfig,
) -> PlanResult:
    """Seeded particle swarm over fleet trajectories.

    Every particle holds one candidate trajectory per UAV; all UAVs launch
    from the area center with uniformly random initial headings. The
    global best is elitist, so its trace never increases.
    """
    config.validate()
    if not stations:
        raise ConfigError("at least one base station is required")
    rng = np.random.default_rng(config.rng_seed)
    shape = (config.n_uavs, config.n_waypoints, 2)
    step_len = config.step_len_m

    genomes: list[np.ndarray] = []
    velocities = [np.zeros(shape) for _ in range(config.swarm_size)]
    pbest: list[tuple[float, np.ndarray]] = []
    gbest_score = math.inf
    gbest_genome: np.ndarray | None = None
    gbest_parts: dict[str, float] = {}
    for _ in range(config.swarm_size):
        proposal = np.stack(
            [
                _random_walk_proposal(area, step_len, config.n_waypoints, rng)
                for _ in range(config.n_uavs)
            ]
        )
        genome, _, score, parts = _project_and_evaluate(proposal, area, stations, config)
        genomes.append(genome)
        pbest.append((score, genome.copy()))
        if score < gbest_score:
            gbest_score, gbest_genome, gbest_parts = score, genome.copy(), parts

    trace = [gbest_score]
    for _ in range(config.iterations):
        for p in range(config.swarm_size):
            r1 = rng.uniform(size=shape)
            r2 = rng.uniform(size=shape)
            velocities[p] = (
                config.omega * velocities[p]
                + config.c1 * r1 * (pbest[p][1] - genomes[p])
                + config.c2 * r2 * (gbest_genome - genomes[p])
            )
            proposed = genomes[p] + velocities[p]
            genome, clamp_masks, score, parts = _project_and_evaluate(
                proposed, area, stations, config
            )
            genomes[p] = genome
            velocities[p][clamp_masks] = 0.0
            if score < pbest[p][0]:
                pbest[p] = (score, genome.copy())
            if score < gbest_score:
                gbest_score, gbest_genome, gbest_parts = score, genome.copy(), parts
        trace.append(gbest_score)

    best_paths, _ = _paths_from_genome(gbest_genome, area, step_len)
    serving = tuple(tuple(serving_stations(p, stations)) for p in best_paths)
    return PlanResult(
        paths=tuple(best_paths),
        score=gbest_score,
        parts=gbest_parts,
        gbest_trace=tuple(trace),
        serving=serving,
    )


# --------------------------------------------------------------------------
# Mission playback: coverage over time


def coverage_times(
    paths: Sequence[UavPath], area: AreaSpec, speed: float
) -> tuple[np.ndarray, float]:
    """Earliest cover time per grid cell when the fleet flies its paths
    simultaneously at the given speed.

    Coverage is swept: a cell is covered once any UAV passes within the
    cover radius. Returns (per-cell times, inf where never covered;
    mission duration = the slowest UAV's flight time).
    """
    if speed <= 0:
        raise ConfigError(f"speed must be > 0, got {speed}")
    mids = area.midpoints()
    times = np.full(mids.shape[0], np.inf)
    r2 = area.cover_radius_m**2
    ds = min(area.cell_m, area.cover_radius_m) / 4.0
    mission = 0.0
    for path in paths:
        dist_flown = 0.0
        covered_here = ((mids - path.xy[0]) ** 2).sum(axis=1) <= r2
        times[covered_here] = np.minimum(times[covered_here], 0.0)
        for i in range(path.xy.shape[0] - 1):
            p0, p1 = path.xy[i], path.xy[i + 1]
            seg = float(np.linalg.norm(p1 - p0))
            if seg == 0.0:
                continue
            n_samples = max(1, int(math.ceil(seg / ds)))
            for s in range(1, n_samples + 1):
                frac = s / n_samples
                point = p0 + frac * (p1 - p0)
                t = (dist_flown + frac * seg) / speed
                hit = ((mids - point) ** 2).sum(axis=1) <= r2
                times[hit] = np.minimum(times[hit], t)
            dist_flown += seg
        mission = max(mission, dist_flown / speed)
    return times, mission


def time_to_coverage(
    paths: Sequence[UavPath], area: AreaSpec, speed: float, fraction: float
) -> float:
    """Time until the given fraction of grid cells is covered, or inf if
    the fleet never reaches it."""
    if not (0.0 < fraction <= 1.0):
        raise ConfigError(f"fraction must be in (0, 1], got {fraction}")
    times, _ = coverage_times(paths, area, speed)
    needed = int(math.ceil(fraction * times.shape[0]))
    finite = np.sort(times[np.isfinite(times)])
    if finite.shape[0] < needed:
        return math.inf
    return float(finite[needed - 1])
