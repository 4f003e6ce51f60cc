"""Exact simulation of the jump process by the direct method.

At state ``x`` the holding time is Exponential(q(x)) and the next state is
``y`` with probability q(x, y) / q(x). Each trajectory draws the holding
time first, then one uniform for the jump choice. This has the same law as
driving every transition by its own Poisson clock, but only ever touches
the finitely many transitions out of the current state.

Runs stop at the time horizon or when a guard fires: too many jumps, or a
state whose largest coordinate exceeds the cap. A guard firing is an
explosion symptom, not a proof. Nothing is simulated past it.

Randomness: trajectory ``stream`` of root ``seed`` uses a Philox
generator over ``SeedSequence(seed, spawn_key=(stream,))``, so batch
results do not depend on scheduling. Mass-action chains run in a numba
kernel; any other :class:`CtmcSpec` runs in a Python loop consuming the
generator in the same order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from numba import njit

from .model import CtmcSpec, State, as_state

CHUNK = 1 << 16


class Outcome(str, Enum):
    HORIZON_REACHED = "HorizonReached"
    JUMP_BUDGET_EXHAUSTED = "JumpBudgetExhausted"
    STATE_CAP_EXCEEDED = "StateCapExceeded"

    @property
    def explosion_symptom(self) -> bool:
        return self is not Outcome.HORIZON_REACHED


RECORD_MODES = ("full", "occupancy", "none")


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    ``record`` is ``"full"`` (jump times and states), ``"occupancy"``
    (time spent per state after ``burn_in * time_horizon``) or ``"none"``
    (counts only). ``count_from`` is the time after which jumps are also
    counted separately, for jump-rate estimates.
    """

    seed: int
    time_horizon: float
    max_jumps: int = 10**7
    state_norm_cap: float = 1e6
    record: str = "full"
    stream: int = 0
    burn_in: float = 0.0
    count_from: float = 0.0

    def __post_init__(self):
        if not (self.time_horizon > 0 and math.isfinite(self.time_horizon)):
            raise ValueError("time_horizon must be positive and finite")
        if self.max_jumps < 1:
            raise ValueError("max_jumps must be >= 1")
        if not self.state_norm_cap > 0:
            raise ValueError("state_norm_cap must be positive")
        if self.record not in RECORD_MODES:
            raise ValueError(f"record must be one of {RECORD_MODES}")
        if not 0.0 <= self.burn_in < 1.0:
            raise ValueError("burn_in must lie in [0, 1)")
        if not 0 <= self.seed < 2**64 or not 0 <= self.stream:
            raise ValueError("seed must be a 64-bit unsigned integer and stream >= 0")

    def with_stream(self, stream: int) -> "SimConfig":
        return SimConfig(**{**self.__dict__, "stream": stream})


def make_rng(seed: int, stream: int = 0, *extra: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream, *extra))))


def state_norm(x) -> int:
    """Largest absolute coordinate."""
    return int(np.max(np.abs(np.asarray(x)))) if len(x) else 0


@dataclass
class Trajectory:
    """Result of one run.

    ``times[i]`` is the time of the ``i+1``-th jump and ``states[i+1]`` the
    state it led to; ``states[0]`` is the initial state. Both are empty
    unless ``record == "full"``. ``final_time`` is the horizon, or the
    time of the last jump when a guard fired.
    """

    x0: State
    outcome: Outcome
    final_time: float
    final_state: State
    jump_count: int
    jumps_counted: int
    config: SimConfig
    times: np.ndarray = field(default_factory=lambda: np.empty(0))
    states: np.ndarray = field(default_factory=lambda: np.empty((0, 0), dtype=np.int64))
    occupancy: Optional[dict] = None

    @property
    def horizon_reached(self) -> bool:
        return self.outcome is Outcome.HORIZON_REACHED

    def summary(self) -> str:
        if self.horizon_reached:
            return f"{self.outcome.value} at t={self.final_time:.6g} after {self.jump_count} jumps"
        return (
            f"explosion symptom: {self.outcome.value} at t={self.final_time:.6g} "
            f"after {self.jump_count} jumps (state norm {state_norm(self.final_state)})"
        )


# -- numba kernel for mass-action chains ----------------------------------------


@njit(cache=True, nogil=True)
def _mass_action_chunk(rng, sources, kappa, group, vectors, x, t, jumps, counted, horizon, max_jumps, cap,
                       count_from, buf_t, buf_x, buf_h, record, rates, group_rates):
    """Advance until the horizon, a guard, or a full buffer.

    ``record``: 0 none, 1 jump path into buf_t/buf_x, 2 (state, holding
    time) pairs into buf_x/buf_h. Returns (status, t, jumps, counted, n):
    status 0 horizon, 1 jump budget, 2 state cap, 3 buffer full.
    """
    m, d = sources.shape
    ng = vectors.shape[0]
    n = 0
    cap_buf = buf_x.shape[0]
    while True:
        if record != 0 and n >= cap_buf:
            return 3, t, jumps, counted, n
        total = 0.0
        for g in range(ng):
            group_rates[g] = 0.0
        for k in range(m):
            a = kappa[k]
            for i in range(d):
                xi = x[i]
                for j in range(sources[k, i]):
                    a *= xi - j
            if a < 0.0:
                a = 0.0
            rates[k] = a
            group_rates[group[k]] += a
        for g in range(ng):
            total += group_rates[g]
        if total <= 0.0:
            # absorbing: hold to the horizon
            if record == 2:
                buf_x[n, :] = x
                buf_h[n] = horizon - t
                n += 1
            return 0, horizon, jumps, counted, n
        hold = rng.exponential(1.0 / total)
        u = rng.random() * total
        if t + hold >= horizon:
            if record == 2:
                buf_x[n, :] = x
                buf_h[n] = horizon - t
                n += 1
            return 0, horizon, jumps, counted, n
        if record == 2:
            buf_x[n, :] = x
            buf_h[n] = hold
            n += 1
        t += hold
        pick = ng - 1
        acc = 0.0
        for g in range(ng):
            acc += group_rates[g]
            if u < acc and group_rates[g] > 0.0:
                pick = g
                break
        while group_rates[pick] <= 0.0:
            pick -= 1
        big = 0
        for i in range(d):
            x[i] += vectors[pick, i]
            v = abs(x[i])
            if v > big:
                big = v
        jumps += 1
        if t >= count_from:
            counted += 1
        if record == 1:
            buf_t[n] = t
            buf_x[n, :] = x
            n += 1
        if big > cap:
            return 2, t, jumps, counted, n
        if jumps >= max_jumps:
            return 1, t, jumps, counted, n


_STATUS = {0: Outcome.HORIZON_REACHED, 1: Outcome.JUMP_BUDGET_EXHAUSTED, 2: Outcome.STATE_CAP_EXCEEDED}


class _Occupancy:
    """Time spent per state inside [start, horizon], accumulated chunk by chunk."""

    def __init__(self, start: float):
        self.start = start
        self.weights: dict = {}

    def add(self, states: np.ndarray, t_begin: np.ndarray, t_end: np.ndarray):
        held = np.clip(t_end, self.start, None) - np.clip(t_begin, self.start, None)
        keep = held > 0
        if not np.any(keep):
            return
        uniq, inv = np.unique(states[keep], axis=0, return_inverse=True)
        sums = np.bincount(inv.ravel(), weights=held[keep])
        for row, w in zip(uniq, sums):
            key = tuple(int(v) for v in row)
            self.weights[key] = self.weights.get(key, 0.0) + float(w)


def _run_mass_action(spec: CtmcSpec, x0: State, cfg: SimConfig) -> Trajectory:
    net = spec.network
    vectors = np.array(spec.increments, dtype=np.int64)
    index = {v: g for g, v in enumerate(spec.increments)}
    group = np.array([index[v] for v in net.reaction_vectors], dtype=np.int64)
    sources = np.array([r.source for r in net.reactions], dtype=np.int64)
    kappa = np.array([float(r.rate_constant) for r in net.reactions])
    d = spec.dimension
    rng = make_rng(cfg.seed, cfg.stream)
    x = np.array(x0, dtype=np.int64)
    rates = np.empty(len(kappa))
    group_rates = np.empty(len(vectors))
    mode = {"none": 0, "full": 1, "occupancy": 2}[cfg.record]
    size = CHUNK if mode else 0
    buf_t = np.empty(size)
    buf_h = np.empty(size)
    buf_x = np.empty((size, d), dtype=np.int64)
    t, jumps, counted = 0.0, 0, 0
    times, states = [], [np.array([x0], dtype=np.int64)]
    occ = _Occupancy(cfg.burn_in * cfg.time_horizon) if mode == 2 else None
    while True:
        t_chunk = t
        status, t, jumps, counted, n = _mass_action_chunk(
            rng, sources, kappa, group, vectors, x, t, jumps, counted, cfg.time_horizon, cfg.max_jumps,
            cfg.state_norm_cap, cfg.count_from, buf_t, buf_x, buf_h, mode, rates, group_rates,
        )
        if mode == 1:
            times.append(buf_t[:n].copy())
            states.append(buf_x[:n].copy())
        elif mode == 2 and n:
            # holding intervals are contiguous from the chunk's start time
            ends = t_chunk + np.cumsum(buf_h[:n])
            occ.add(buf_x[:n], ends - buf_h[:n], ends)
        if status != 3:
            break
    return _finish(x0, _STATUS[status], t, x, jumps, counted, cfg, times, states, occ)


def _finish(x0, outcome, t, x, jumps, counted, cfg, times, states, occ) -> Trajectory:
    traj = Trajectory(
        x0=tuple(x0),
        outcome=outcome,
        final_time=float(t),
        final_state=tuple(int(v) for v in x),
        jump_count=int(jumps),
        jumps_counted=int(counted),
        config=cfg,
    )
    if cfg.record == "full":
        traj.times = np.concatenate(times) if times else np.empty(0)
        traj.states = np.concatenate(states)
    elif cfg.record == "occupancy":
        traj.occupancy = occ.weights
    return traj


def _run_generic(spec: CtmcSpec, x0: State, cfg: SimConfig) -> Trajectory:
    rng = make_rng(cfg.seed, cfg.stream)
    horizon = cfg.time_horizon
    x = x0
    t, jumps, counted = 0.0, 0, 0
    times, path = [], [x0]
    occ = _Occupancy(cfg.burn_in * horizon) if cfg.record == "occupancy" else None
    occ_x, occ_a, occ_b = [], [], []
    outcome = Outcome.HORIZON_REACHED
    while True:
        nbrs = spec.neighbors(x)
        total = math.fsum(r for _, r in nbrs)
        if total <= 0.0:
            hold = math.inf
        else:
            hold = rng.exponential(1.0 / total)
            u = rng.random() * total
        end = min(t + hold, horizon)
        if occ is not None:
            occ_x.append(x)
            occ_a.append(t)
            occ_b.append(end)
        if t + hold >= horizon:
            t = horizon
            break
        t += hold
        acc = 0.0
        y = nbrs[-1][0]
        for target, rate in nbrs:
            acc += rate
            if u < acc:
                y = target
                break
        x = y
        jumps += 1
        if t >= cfg.count_from:
            counted += 1
        if cfg.record == "full":
            times.append(t)
            path.append(x)
        if state_norm(x) > cfg.state_norm_cap:
            outcome = Outcome.STATE_CAP_EXCEEDED
            break
        if jumps >= cfg.max_jumps:
            outcome = Outcome.JUMP_BUDGET_EXHAUSTED
            break
    if occ is not None and occ_x:
        occ.add(np.array(occ_x, dtype=np.int64), np.array(occ_a), np.array(occ_b))
    return _finish(x0, outcome, t, x, jumps, counted, cfg, [np.array(times)],
                   [np.array(path, dtype=np.int64).reshape(len(path), spec.dimension)], occ)


def ssa_run(spec: CtmcSpec, x0, cfg: SimConfig, backend: str = "auto") -> Trajectory:
    """Simulate one trajectory from ``x0``.

    ``backend`` is ``"auto"`` (numba for mass-action specs), ``"numba"``
    or ``"python"``.
    """
    x0 = as_state(x0)
    if len(x0) != spec.dimension:
        raise ValueError(f"initial state has dimension {len(x0)}, chain has {spec.dimension}")
    if spec.network is not None and any(v < 0 for v in x0):
        raise ValueError("initial counts must be non-negative")
    if state_norm(x0) > cfg.state_norm_cap:
        raise ValueError("state_norm_cap is below the initial state's norm")
    use_numba = spec.network is not None and spec.increments is not None
    if backend == "numba" and not use_numba:
        raise ValueError("the numba backend needs a mass-action chain")
    if backend == "python" or not use_numba:
        return _run_generic(spec, x0, cfg)
    return _run_mass_action(spec, x0, cfg)


def ssa_batch(
    spec: CtmcSpec,
    x0,
    cfg: SimConfig,
    runs: int,
    workers: Optional[int] = None,
    first_stream: int = 0,
) -> list[Trajectory]:
    """``runs`` independent trajectories on streams ``first_stream, ...``.

    ``x0`` is a state or a callable ``rng -> state`` (drawn from stream
    ``(i, 1)`` so it never shares randomness with the dynamics).
    """

    def one(i: int) -> Trajectory:
        start = x0(make_rng(cfg.seed, i, 1)) if callable(x0) else x0
        return ssa_run(spec, start, cfg.with_stream(i))

    streams = range(first_stream, first_stream + runs)
    if workers == 1 or runs == 1:
        return [one(i) for i in streams]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, streams))


# -- statistics -------------------------------------------------------------------


def _occupancy_of(traj: Trajectory, burn_in: Optional[float]) -> dict:
    if not traj.horizon_reached:
        raise ValueError(f"occupancy needs a run that reached the horizon (got {traj.outcome.value})")
    horizon = traj.config.time_horizon
    if traj.config.record == "occupancy":
        if burn_in is not None and not math.isclose(burn_in, traj.config.burn_in):
            raise ValueError("run was recorded with a different burn-in")
        weights = traj.occupancy
    elif traj.config.record == "full":
        start = (traj.config.burn_in if burn_in is None else burn_in) * horizon
        occ = _Occupancy(start)
        begins = np.concatenate([[0.0], traj.times])
        ends = np.concatenate([traj.times, [horizon]])
        occ.add(traj.states, begins, ends)
        weights = occ.weights
    else:
        raise ValueError("run did not record its path or occupancy")
    total = math.fsum(weights.values())
    if total <= 0:
        raise ValueError("empty observation window")
    return {x: w / total for x, w in weights.items()}


def empirical_occupancy(traj, burn_in: Optional[float] = None) -> dict:
    """Fraction of post-burn-in time spent in each state.

    A list of trajectories gives the average of their occupancies.
    """
    if isinstance(traj, Trajectory):
        return _occupancy_of(traj, burn_in)
    runs = list(traj)
    if not runs:
        raise ValueError("empty observation window")
    out: dict = {}
    for tr in runs:
        for x, w in _occupancy_of(tr, burn_in).items():
            out[x] = out.get(x, 0.0) + w
    return {x: w / len(runs) for x, w in out.items()}


def tv_distance(occupancy: dict, pi: Callable[[State], float], window: Iterable) -> float:
    """Total variation between an occupancy and ``pi``, lumping states outside ``window``."""
    window = [as_state(x) for x in window]
    inside = set(window)
    diff = [abs(occupancy.get(x, 0.0) - pi(x)) for x in window]
    occ_out = math.fsum(w for x, w in occupancy.items() if x not in inside)
    pi_out = max(0.0, 1.0 - math.fsum(pi(x) for x in window))
    return 0.5 * (math.fsum(diff) + abs(occ_out - pi_out))


@dataclass(frozen=True)
class JumpRateEstimate:
    mean: float
    stderr: float
    runs_used: int
    excluded: int

    def within(self, target: float, k: float = 3.0) -> bool:
        return abs(self.mean - target) <= k * self.stderr


def measure_sampler(pi: Callable[[State], float], window: Sequence) -> Callable[[np.random.Generator], State]:
    """Sampler for ``pi`` restricted to a finite window."""
    states = [as_state(x) for x in window]
    p = np.array([pi(x) for x in states], dtype=float)
    p /= p.sum()

    def draw(rng: np.random.Generator) -> State:
        return states[int(rng.choice(len(states), p=p))]

    return draw


def monte_carlo_jump_rate(
    spec: CtmcSpec,
    start,
    time_horizon: float,
    runs: int,
    seed: int,
    burn_in: float = 0.0,
    **cfg_kw,
) -> JumpRateEstimate:
    """Mean number of jumps per unit time after ``burn_in * time_horizon``.

    ``start`` is a state or a sampler ``rng -> state`` (stationary start).
    Runs stopped by a guard are excluded and counted.
    """
    cfg = SimConfig(seed, time_horizon, record="none", count_from=burn_in * time_horizon, **cfg_kw)
    trajs = ssa_batch(spec, start, cfg, runs)
    span = time_horizon * (1.0 - burn_in)
    rates = np.array([tr.jumps_counted / span for tr in trajs if tr.horizon_reached])
    excluded = runs - len(rates)
    if len(rates) == 0:
        return JumpRateEstimate(math.nan, math.nan, 0, excluded)
    stderr = float(rates.std(ddof=1) / math.sqrt(len(rates))) if len(rates) > 1 else math.inf
    return JumpRateEstimate(float(rates.mean()), stderr, len(rates), excluded)


# -- export -----------------------------------------------------------------------


def write_trajectory(path, traj: Trajectory) -> None:
    """Text export: ``t x_1 ... x_d`` per line, starting with ``0 x0``.

    Header comments record the outcome and terminal time.
    """
    if traj.config.record != "full":
        raise ValueError("only fully recorded runs can be exported as paths")
    times = np.concatenate([[0.0], traj.times])
    with open(path, "w") as fh:
        fh.write(f"# outcome {traj.outcome.value}\n# final_time {traj.final_time!r}\n# t state...\n")
        for t, row in zip(times, traj.states):
            fh.write(repr(float(t)) + " " + " ".join(str(int(v)) for v in row) + "\n")


def read_trajectory(path) -> tuple[np.ndarray, np.ndarray, dict]:
    meta, rows = {}, []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                parts = line[1:].split(None, 1)
                if len(parts) == 2 and parts[0] in ("outcome", "final_time"):
                    meta[parts[0]] = parts[1].strip()
                continue
            rows.append(line.split())
    times = np.array([float(r[0]) for r in rows])
    states = np.array([[int(v) for v in r[1:]] for r in rows], dtype=np.int64)
    return times, states, meta


def write_occupancy(path, occupancy: dict) -> None:
    """Text export: ``x_1 ... x_d weight`` per line, states sorted."""
    with open(path, "w") as fh:
        fh.write("# state... weight\n")
        for x in sorted(occupancy):
            fh.write(" ".join(str(v) for v in x) + f" {occupancy[x]!r}\n")


def read_occupancy(path) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            *xs, w = line.split()
            out[tuple(int(v) for v in xs)] = float(w)
    return out
