"""Coupled trajectories and the coupling-based mixing bounds.

The Hamming diameter n is used as diam(Omega) for both chains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np


@dataclass
class CoupledTrajectory:
    distances: np.ndarray
    met_at: int | None

    def __post_init__(self):
        d = self.distances
        if self.met_at is not None and np.any(d[self.met_at:] != 0):
            raise AssertionError("coupled chains separated after meeting")


def run_coupled(
    x0,
    y0,
    step: Callable,
    steps: int,
    rng: np.random.Generator,
    distance: Callable = None,
) -> CoupledTrajectory:
    """Run ``step(x, y, rng) -> (x', y')`` for ``steps`` steps.

    Once the chains meet only the first copy is advanced and copied across,
    which is what a coupling that is the identity on the diagonal does
    anyway.
    """
    if distance is None:
        distance = _default_distance
    if _shape(x0) != _shape(y0):
        raise ValueError("initial states live on different instances")
    x, y = x0, y0
    dists = [distance(x, y)]
    met = 0 if dists[0] == 0 else None
    for t in range(1, steps + 1):
        if met is None:
            x, y = step(x, y, rng)
        else:
            x, _ = step(x, x, rng)
            y = x
        d = distance(x, y)
        dists.append(d)
        if met is None and d == 0:
            met = t
    return CoupledTrajectory(np.array(dists, dtype=np.int64), met)


def _shape(s):
    return len(s) if isinstance(s, tuple) else None


def _default_distance(x, y) -> int:
    if isinstance(x, frozenset):
        return len(x ^ y)
    return sum(a != b for a, b in zip(x, y))


def run_coupled_replicas(
    x0: np.ndarray,
    y0: np.ndarray,
    batch_step: Callable,
    steps: int,
    replicas: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Distances (replicas, steps + 1) for ``replicas`` independent coupled
    runs from the same start pair; ``batch_step(xs, ys, rng)`` advances
    (M, n) state arrays in place."""
    xs = np.tile(np.asarray(x0), (replicas, 1))
    ys = np.tile(np.asarray(y0), (replicas, 1))
    out = np.empty((replicas, steps + 1), dtype=np.int64)
    out[:, 0] = (xs != ys).sum(axis=1)
    for t in range(1, steps + 1):
        batch_step(xs, ys, rng)
        out[:, t] = (xs != ys).sum(axis=1)
    if np.any((out[:, :-1] == 0) & (out[:, 1:] != 0)):
        raise AssertionError("coupled chains separated after meeting")
    return out


# ---------------------------------------------------------------------------
# Bound calculators
# ---------------------------------------------------------------------------

def _ceil_ratio(num, eps) -> int:
    """ceil(num / eps), exact when num is an int and eps a short decimal."""
    if isinstance(num, int):
        e = Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps)
        return math.ceil(num / e)
    return math.ceil(num / float(eps))


def _check_eps(eps) -> None:
    if not 0 < eps <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {eps}")


def theorem31_bound(eps: float, delta_bad: float, steps: int, diam: int) -> tuple[float, float]:
    """((1 - eps)^T + delta_bad/eps) diam as (raw, clipped to [0, 1])."""
    _check_eps(eps)
    if delta_bad < 0:
        raise ValueError(f"delta_bad must be non-negative, got {delta_bad}")
    if steps < 0:
        raise ValueError(f"T must be non-negative, got {steps}")
    if diam < 1:
        raise ValueError(f"diam must be at least 1, got {diam}")
    raw = ((1 - eps) ** steps + delta_bad / eps) * diam
    return raw, min(max(raw, 0.0), 1.0)


def mixing_time_theorem11(diam: int, delta: float, eps: float) -> int:
    """ceil(ln(diam/delta)/eps): every pair eps distance-decreasing."""
    _check_eps(eps)
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if delta > diam:
        raise ValueError(f"delta={delta} exceeds diam={diam}")
    return _ceil_ratio(math.log(diam / delta), eps)


@dataclass(frozen=True)
class StationaryBound:
    steps: int
    pi_s_threshold: float


def mixing_time_theorem12(diam: int, delta: float, eps: float) -> StationaryBound:
    """Steps ceil(ln(32 diam)) ceil(ln(1/delta)) / eps, required
    pi(S) >= 1 - eps/(16 diam) for the good set S."""
    _check_eps(eps)
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    num = math.ceil(math.log(32 * diam)) * math.ceil(math.log(1 / delta))
    return StationaryBound(_ceil_ratio(num, eps), 1 - eps / (16 * diam))


def mixing_time_theorem13(diam: int, delta: float, eps: float) -> StationaryBound:
    """Steps ln(2 diam/delta)/eps from a warm start, required
    pi(S) > 1 - eps delta/(6 diam)."""
    _check_eps(eps)
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return StationaryBound(_ceil_ratio(math.log(2 * diam / delta), eps), 1 - eps * delta / (6 * diam))


def is_warm_start(dist: Sequence, pi: Sequence) -> tuple[bool, float]:
    """(max_z dist(z)/pi(z) <= 2, that max), with 0/0 = 0 and x/0 = inf."""
    worst = 0
    for d, p in zip(dist, pi):
        if d == 0:
            continue
        ratio = math.inf if p == 0 else d / p
        worst = max(worst, ratio)
    return worst <= 2, worst
