"""Monte Carlo experiments over many seeded contests.

Replication ``i`` of a batch uses seed ``base_seed + i``. Every estimate
with the same base seed therefore sees the same TP sequences (common random
numbers), which makes the estimated win rate a deterministic step function
of the challenger exponent and lets the calibration bisect on it.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .core import Outcome, SimParams, run_cycle
from .tp import TpProvider, check_seed, SEED_LIMIT


class BracketError(ValueError):
    """The calibration bracket does not straddle the target win rate."""

    def __init__(self, low: float, high: float, rate_low: float, rate_high: float, target: float):
        super().__init__(
            f"bracket [{low!r}, {high!r}] does not straddle target {target!r}: "
            f"M win rate {rate_low!r} at {low!r}, {rate_high!r} at {high!r}"
        )
        self.low, self.high = low, high
        self.rate_low, self.rate_high = rate_low, rate_high
        self.target = target


@dataclass(frozen=True)
class BatchSpec:
    base_params: SimParams
    n_reps: int
    base_seed: int = 0

    def __post_init__(self):
        if isinstance(self.n_reps, bool) or not isinstance(self.n_reps, int) or self.n_reps < 1:
            raise ValueError(f"n_reps must be an integer >= 1, got {self.n_reps!r}")
        check_seed(self.base_seed)
        if self.base_seed + self.n_reps - 1 >= SEED_LIMIT:
            raise ValueError("base_seed + n_reps - 1 exceeds the 64-bit seed range")


@dataclass(frozen=True)
class WinStats:
    n_reps: int
    h_wins: int
    m_wins: int
    undecided: int
    m_win_rate: float
    standard_error: float

    @classmethod
    def from_outcomes(cls, outcomes: Sequence[Outcome]) -> "WinStats":
        n = len(outcomes)
        h = sum(o.winner == "H" for o in outcomes)
        m = sum(o.winner == "M" for o in outcomes)
        p = m / n
        return cls(n_reps=n, h_wins=h, m_wins=m, undecided=n - h - m,
                   m_win_rate=p, standard_error=math.sqrt(p * (1.0 - p) / n))

    @property
    def decided_fraction(self) -> float:
        return (self.h_wins + self.m_wins) / self.n_reps


@dataclass(frozen=True)
class CalibrationSpec:
    base_params: SimParams
    m_exp_low: float
    m_exp_high: float
    target: float = 0.5
    tolerance: float = 0.03
    reps_per_eval: int = 2000
    max_iterations: int = 40
    base_seed: int = 0

    def __post_init__(self):
        if not self.m_exp_low < self.m_exp_high:
            raise ValueError(f"m_exp_low must be < m_exp_high, got [{self.m_exp_low}, {self.m_exp_high}]")
        if self.m_exp_low <= 0:
            raise ValueError("m_exp_low must be > 0")
        if not 0 < self.target < 1:
            raise ValueError(f"target must lie in (0, 1), got {self.target}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        BatchSpec(self.base_params, self.reps_per_eval, self.base_seed)


@dataclass(frozen=True)
class CalibrationResult:
    balanced_m_exp: float
    achieved_stats: WinStats
    iterations_used: int
    bracket_history: list[tuple[float, float]]
    converged: bool


@dataclass(frozen=True)
class ShapeCensus:
    """Runs tabulated by how often H's share crossed one half.

    ``by_winner[k]`` maps each winner label to its run count among runs
    with ``k`` crossings.
    """

    crossing_histogram: dict[int, int]
    by_winner: dict[int, dict[str, int]] = field(default_factory=dict)

    @property
    def n_reps(self) -> int:
        return sum(self.crossing_histogram.values())


def _outcome(params: SimParams, seed: int) -> Outcome:
    return run_cycle(params, TpProvider.seeded(seed)).outcome


def _outcome_chunk(params: SimParams, seeds: range) -> list[Outcome]:
    return [_outcome(params, s) for s in seeds]


def run_batch(spec: BatchSpec, workers: int | None = None) -> list[Outcome]:
    """Outcomes of all replications, in replication order.

    ``workers`` > 1 spreads contiguous seed chunks over processes; the
    result does not depend on it.
    """
    seeds = range(spec.base_seed, spec.base_seed + spec.n_reps)
    if not workers or workers <= 1 or spec.n_reps < 2:
        return _outcome_chunk(spec.base_params, seeds)
    size = math.ceil(spec.n_reps / workers)
    chunks = [seeds[i:i + size] for i in range(0, spec.n_reps, size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_outcome_chunk, [spec.base_params] * len(chunks), chunks)
        return [o for part in parts for o in part]


def estimate_win_rate(spec: BatchSpec, workers: int | None = None) -> WinStats:
    return WinStats.from_outcomes(run_batch(spec, workers))


def shape_census(spec: BatchSpec, workers: int | None = None) -> ShapeCensus:
    return census_from_outcomes(run_batch(spec, workers))


def census_from_outcomes(outcomes: Sequence[Outcome]) -> ShapeCensus:
    histogram: dict[int, int] = {}
    by_winner: dict[int, dict[str, int]] = {}
    for o in outcomes:
        histogram[o.half_crossings] = histogram.get(o.half_crossings, 0) + 1
        bucket = by_winner.setdefault(o.half_crossings, {"H": 0, "M": 0, "none": 0})
        bucket[o.winner] += 1
    keys = sorted(histogram)
    return ShapeCensus({k: histogram[k] for k in keys}, {k: by_winner[k] for k in keys})


def find_balanced_exponent(spec: CalibrationSpec, workers: int | None = None) -> CalibrationResult:
    """Bisect the challenger exponent until M wins ``target`` of the runs.

    All evaluations share ``spec.base_seed``, so the bracket history is
    reproducible. Raises :class:`BracketError` when the endpoint rates do
    not straddle the target. If ``max_iterations`` midpoints fail to reach
    the tolerance, the closest iterate is returned with ``converged=False``.
    """

    def rate_at(m_exp: float) -> WinStats:
        batch = BatchSpec(spec.base_params.with_m_exponent(m_exp), spec.reps_per_eval, spec.base_seed)
        return estimate_win_rate(batch, workers)

    lo, hi = spec.m_exp_low, spec.m_exp_high
    stats_lo, stats_hi = rate_at(lo), rate_at(hi)
    history = [(lo, stats_lo.m_win_rate), (hi, stats_hi.m_win_rate)]
    if not stats_lo.m_win_rate <= spec.target <= stats_hi.m_win_rate:
        raise BracketError(lo, hi, stats_lo.m_win_rate, stats_hi.m_win_rate, spec.target)

    best = min(((lo, stats_lo), (hi, stats_hi)), key=lambda it: abs(it[1].m_win_rate - spec.target))
    if abs(best[1].m_win_rate - spec.target) <= spec.tolerance:
        return CalibrationResult(best[0], best[1], 0, history, True)

    for iteration in range(1, spec.max_iterations + 1):
        mid = 0.5 * (lo + hi)
        stats = rate_at(mid)
        history.append((mid, stats.m_win_rate))
        error = abs(stats.m_win_rate - spec.target)
        if error <= spec.tolerance:
            return CalibrationResult(mid, stats, iteration, history, True)
        if error < abs(best[1].m_win_rate - spec.target):
            best = (mid, stats)
        if stats.m_win_rate < spec.target:
            lo = mid
        else:
            hi = mid
    return CalibrationResult(best[0], best[1], spec.max_iterations, history, False)


def exponent_sweep(
    base_params: SimParams,
    m_exp_grid: Sequence[float],
    reps: int,
    base_seed: int = 0,
    workers: int | None = None,
) -> list[tuple[float, WinStats]]:
    """Win statistics at each challenger exponent, with common random numbers."""
    grid = [float(x) for x in m_exp_grid]
    if not grid:
        raise ValueError("empty exponent grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("exponent grid must be strictly increasing")
    return [
        (m_exp, estimate_win_rate(BatchSpec(base_params.with_m_exponent(m_exp), reps, base_seed), workers))
        for m_exp in grid
    ]


def centered_grid(center: float, half_width: float, points: int) -> list[float]:
    """``points`` equally spaced exponents on [center - half_width, center + half_width]."""
    if points < 1:
        raise ValueError("points must be >= 1")
    if points == 1:
        return [center]
    return [center - half_width + 2.0 * half_width * i / (points - 1) for i in range(points)]
