"""Fixed points of x -> exp(-Cx) and the perturbed interval iteration
h(I) = g(I) +- theta used to bootstrap local uniformity bounds.

All root finding is plain bisection on monotone functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

TOL = 1e-12


class LemmaViolation(AssertionError):
    """A numerically checked inequality failed."""


def bisect(f: Callable[[float], float], lo: float, hi: float, tol: float = TOL) -> float:
    """Root of an increasing function with f(lo) < 0 < f(hi)."""
    flo, fhi = f(lo), f(hi)
    if not flo < 0 < fhi:
        raise ValueError(f"root not bracketed: f({lo})={flo}, f({hi})={fhi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_mu(C: float, tol: float = TOL) -> float:
    """Unique solution of mu = exp(-C mu), which lies in (0, 1) for C > 0."""
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    return bisect(lambda x: x - math.exp(-C * x), 0.0, 1.0, tol)


def solve_alpha(tol: float = TOL) -> float:
    """Root of x = exp(1/x) in [1.5, 2] (about 1.7632)."""
    return bisect(lambda x: x - math.exp(1.0 / x), 1.5, 2.0, tol)


@dataclass(frozen=True)
class Observation45:
    zeta: float
    C: float
    mu: float
    bound: float
    holds: bool


def observation45_check(zeta: float) -> Observation45:
    """With C = (1 - zeta) e, test mu(C) < (1 - zeta/2) / C."""
    if not 0 < zeta < 1:
        raise ValueError(f"zeta must lie in (0, 1), got {zeta}")
    C = (1 - zeta) * math.e
    mu = solve_mu(C)
    bound = (1 - zeta / 2) / C
    return Observation45(zeta, C, mu, bound, mu < bound)


# ---------------------------------------------------------------------------
# Intervals and the perturbed map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def within(self, other: Interval) -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @classmethod
    def around(cls, centre: float, radius: float) -> Interval:
        return cls(centre - radius, centre + radius)


UNIT = Interval(0.0, 1.0)


@dataclass(frozen=True)
class PerturbedMap:
    """h(I) = g(I) +- theta with g(x) = exp(-C x)."""

    C: float
    theta: float

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError(f"C must be positive, got {self.C}")
        if self.theta < 0:
            raise ValueError(f"theta must be non-negative, got {self.theta}")

    def g(self, x: float) -> float:
        return math.exp(-self.C * x)


def apply_h(m: PerturbedMap, interval: Interval) -> Interval:
    # g is decreasing, so the endpoints swap; no clamping to [0, 1].
    return Interval(m.g(interval.hi) - m.theta, m.g(interval.lo) + m.theta)


def iterate_h(m: PerturbedMap, t: int, start: Interval = UNIT) -> Interval:
    out = start
    for _ in range(t):
        out = apply_h(m, out)
    return out


def lemma46_steps(zeta: float, xi: float) -> int:
    return math.ceil(4 / zeta * math.log(1 + 1 / xi))


@dataclass
class ContainmentRun:
    C: float
    zeta: float
    xi: float
    theta: float
    mu: float
    t_bound: int
    t_actual: int
    trajectory: list[Interval] = field(repr=False)

    @property
    def within_bound(self) -> bool:
        return self.t_actual <= self.t_bound

    @property
    def in_hypothesis(self) -> bool:
        return 1 <= self.C <= (1 - self.zeta) * math.e


def iterate_until_contained(C: float, zeta: float, xi: float) -> ContainmentRun:
    """Iterate h from [0, 1] with theta = xi zeta / 8C until the image sits
    inside [mu - xi, mu + xi].

    ``trajectory[t]`` is h^t([0, 1]). The run stops with an error if
    containment takes more than ten times ceil((4/zeta) ln(1 + 1/xi)) steps.
    Values of C below 1 are accepted and flagged through ``in_hypothesis``;
    C above (1 - zeta) e is not, since the fixed point is unstable beyond e.
    """
    if not 0 < zeta < 1:
        raise ValueError(f"zeta must lie in (0, 1), got {zeta}")
    if not xi > 0:
        raise ValueError(f"xi must be positive, got {xi}")
    if not 0 < C <= math.e:
        raise ValueError(f"C must lie in (0, e], got {C}")
    theta = xi * zeta / (8 * C)
    mu = solve_mu(C)
    target = Interval.around(mu, xi)
    m = PerturbedMap(C, theta)
    t_bound = lemma46_steps(zeta, xi)
    trajectory = [UNIT]
    current = UNIT
    t = 0
    while not current.within(target):
        if t >= 10 * t_bound:
            raise LemmaViolation(
                f"no containment within {10 * t_bound} steps (C={C}, zeta={zeta}, xi={xi})"
            )
        current = apply_h(m, current)
        trajectory.append(current)
        t += 1
    return ContainmentRun(C, zeta, xi, theta, mu, t_bound, t, trajectory)


def proof_interval(mu: float, C: float, x: float) -> Interval:
    """I(x) = [mu - x/C, mu - ln(1 - x)/C]; the upper end is +inf at x = 1."""
    upper = math.inf if x >= 1 else mu - math.log1p(-x) / C
    return Interval(mu - x / C, upper)


@dataclass(frozen=True)
class InclusionCheck:
    x: float
    lower_ok: bool
    upper_ok: bool

    @property
    def holds(self) -> bool:
        return self.lower_ok and self.upper_ok


def contraction_step_check(C: float, zeta: float, xi: float, xs: Iterable[float]) -> list[InclusionCheck]:
    """Pointwise test of h(I(x)) inside I(x(1 - zeta/4)) through its two
    endpoint inequalities:

        mu x + theta       <= x (1 - zeta/4) / C
        mu (e^x - 1) + theta <= -ln(1 - x (1 - zeta/4)) / C
    """
    theta = xi * zeta / (8 * C)
    mu = solve_mu(C)
    shrink = 1 - zeta / 4
    out = []
    for x in xs:
        lower_ok = mu * x + theta <= x * shrink / C
        upper_ok = mu * math.expm1(x) + theta <= -math.log1p(-x * shrink) / C
        out.append(InclusionCheck(x, lower_ok, upper_ok))
    return out


def envelope_check(values: Iterable[float], C: float, theta: float, t: int) -> bool:
    """True iff every value lies in h^t([0, 1])."""
    if t < 1:
        raise ValueError(f"t must be at least 1, got {t}")
    env = iterate_h(PerturbedMap(C, theta), t)
    return all(env.contains(v) for v in values)


def period2_demo(C: float, x0: float, steps: int) -> list[float]:
    """Orbit x0, g(x0), g(g(x0)), ... of g(x) = exp(-C x)."""
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    xs = [x0]
    for _ in range(steps):
        xs.append(math.exp(-C * xs[-1]))
    return xs
