"""Simulated annealing over a fugacity ladder for the hard-core model.

Level i runs Glauber dynamics at fugacity lambda_i for T_i steps from the
state left by level i - 1, starting from the empty set at lambda_0 = 0.
Consecutive Gibbs distributions are warm starts for each other because
every ratio lambda_i / lambda_{i-1} (i >= 2) is at most 1 + 1/3n.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exact
from .coupling import is_warm_start
from .graph import Graph
from .hardcore import glauber_step_hc, hardcore_batch, lemma41_params

log = logging.getLogger(__name__)

class ScheduleError(ValueError):
    pass


@dataclass
class AnnealingSchedule:
    n: int
    lam: Fraction
    levels: list[Fraction]
    steps: list[int]
    mode: str
    nominal_k: int

    @property
    def k(self) -> int:
        return len(self.levels) - 1

    def check(self) -> None:
        """Assert the ladder invariants."""
        r = 1 + Fraction(1, 3 * self.n)
        lv = self.levels
        assert lv[0] == 0 and lv[-1] == self.lam, "ladder must run from 0 to lambda"
        assert all(a < b for a, b in zip(lv, lv[1:])), "ladder must increase"
        assert lv[1] <= Fraction(1, 3 * self.n), "first level above 1/3n"
        assert all(b <= r * a for a, b in zip(lv[1:], lv[2:])), "ratio above 1 + 1/3n"
        assert len(self.steps) == self.k
        assert self.k <= self.nominal_k + 1

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "lambda": str(self.lam),
            "levels": [str(x) for x in self.levels],
            "steps": list(self.steps),
            "mode": self.mode,
            "nominal_k": self.nominal_k,
        }


def as_fraction(lam) -> Fraction:
    if isinstance(lam, float):
        return Fraction(str(lam))
    return Fraction(lam)


def nominal_level_count(n: int, lam: Fraction) -> int:
    """ceil(log(3 n lam) / log(1 + 1/3n))."""
    return math.ceil(math.log(3 * n * lam) / math.log1p(1 / (3 * n)))


def ladder(n: int, lam) -> list[Fraction]:
    """0, then (1 + 1/3n)^j / 3n for every j >= 0 with value below lam,
    then lam itself."""
    lam = as_fraction(lam)
    base = Fraction(1, 3 * n)
    if lam < base:
        raise ScheduleError(
            f"lambda={lam} is below 1/3n={base}; plain Glauber dynamics mixes fast there"
        )
    r = 1 + base
    levels = [Fraction(0)]
    x = base
    while x < lam:
        levels.append(x)
        x *= r
    levels.append(lam)
    return levels


def build_schedule(
    n: int,
    lam,
    delta: float,
    zeta: float | None = None,
    mode: str = "paper",
    steps: int | Sequence[int] | None = None,
) -> AnnealingSchedule:
    """Ladder plus per-level step counts.

    ``mode="paper"`` takes every T_i from the warm-start mixing bound at
    accuracy delta/k. ``mode="practical"`` takes ``steps`` (one count for
    all levels or one per level); see ``calibrate_steps`` for exact
    per-level counts on enumerable graphs.
    """
    if n < 1:
        raise ScheduleError("n must be positive")
    if not 0 < delta < 1:
        raise ScheduleError(f"delta must lie in (0, 1), got {delta}")
    lam = as_fraction(lam)
    levels = ladder(n, lam)
    k = len(levels) - 1
    if mode == "paper":
        if zeta is None:
            raise ScheduleError("mode 'paper' needs zeta")
        per_level = [lemma41_params(n, zeta, delta / k)[1]] * k
    elif mode == "practical":
        if steps is None:
            raise ScheduleError("practical mode needs step counts")
        per_level = [int(steps)] * k if np.isscalar(steps) else [int(s) for s in steps]
        if len(per_level) != k:
            raise ScheduleError(f"need {k} step counts, got {len(per_level)}")
    else:
        raise ScheduleError(f"unknown mode {mode!r}")
    schedule = AnnealingSchedule(n, lam, levels, per_level, mode, max(nominal_level_count(n, lam), 0))
    schedule.check()
    return schedule


def calibrate_steps(g: Graph, lam, delta: float) -> AnnealingSchedule:
    """Practical schedule whose T_i is the exact worst-case mixing time to
    delta/k of the level-i chain, so the output is within delta of Gibbs."""
    levels = ladder(g.n, lam)
    k = len(levels) - 1
    steps = [exact.exact_mixing_time(exact.hardcore_chain(g, float(x)), delta / k, starts="all") for x in levels[1:]]
    return build_schedule(g.n, lam, delta, mode="practical", steps=steps)


def annealed_sample(g: Graph, schedule: AnnealingSchedule, rng: np.random.Generator) -> tuple[frozenset, list[dict]]:
    """One annealing run; returns the final set and a per-level log."""
    if schedule.n != g.n:
        raise ScheduleError("schedule built for a different vertex count")
    Y: frozenset = frozenset()
    record = []
    for i, (lam_i, t_i) in enumerate(zip(schedule.levels[1:], schedule.steps), start=1):
        lf = float(lam_i)
        for _ in range(t_i):
            Y = glauber_step_hc(g, Y, lf, rng)
        record.append({"level": i, "lambda": str(lam_i), "steps": t_i, "size": len(Y)})
        log.debug("level %d lambda=%s T=%d |Y|=%d", i, lam_i, t_i, len(Y))
    return Y, record


def annealed_samples(g: Graph, schedule: AnnealingSchedule, runs: int, rng: np.random.Generator) -> np.ndarray:
    """``runs`` independent annealing runs at once; (runs, n) occupancy."""
    occ = np.zeros((runs, g.n), dtype=bool)
    for lam_i, t_i in zip(schedule.levels[1:], schedule.steps):
        occ = hardcore_batch(g, float(lam_i), occ, t_i, rng)
    return occ


def annealed_distribution(g: Graph, schedule: AnnealingSchedule) -> tuple[exact.StateSpace, np.ndarray]:
    """Exact law of the annealing output, by pushing the point mass at the
    empty set through each level's kernel."""
    space = exact.enumerate_independent_sets(g)
    d = space.point_mass(frozenset())
    for lam_i, t_i in zip(schedule.levels[1:], schedule.steps):
        chain = exact.build_kernel(space, g, lam=float(lam_i))
        d = exact.distribution_after(chain, d, t_i)
    return space, d


@dataclass
class LevelCheck:
    level: int
    lam: Fraction
    Z: Fraction
    ratio: Fraction
    limit: float
    ok: bool


def verify_warm_ladder(g: Graph, schedule: AnnealingSchedule) -> list[LevelCheck]:
    """Exact Z_i per level, with Z_1 < 2 Z_0 = 2 and Z_i / Z_{i-1} < e^{1/3}
    for i >= 2."""
    space = exact.enumerate_independent_sets(g)
    sizes = [len(X) for X in space.states]
    Zs = [sum(lam ** s for s in sizes) for lam in schedule.levels]
    if Zs[0] != 1:
        raise AssertionError(f"Z_0 should be 1, got {Zs[0]}")
    checks = []
    for i in range(1, len(Zs)):
        ratio = Zs[i] / Zs[i - 1]
        limit = 2.0 if i == 1 else math.exp(1 / 3)
        checks.append(LevelCheck(i, schedule.levels[i], Zs[i], ratio, limit, float(ratio) < limit))
    return checks


def verify_gibbs_warm_start(g: Graph, lam_prev, lam_next) -> tuple[bool, object]:
    """Is Gibbs(lam_prev) a warm start (density <= 2) for Gibbs(lam_next)?"""
    space = exact.enumerate_independent_sets(g)
    return is_warm_start(exact.gibbs(space, lam_prev), exact.gibbs(space, lam_next))
