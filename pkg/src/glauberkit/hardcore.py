"""Glauber dynamics for the hard-core model (independent sets weighted by
lambda^|X|), its maximal one-step coupling and unblocked-neighbour counts.

Fugacities may be ``Fraction`` (exact kernels and expectations come back
as ``Fraction``) or float (sampling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .coloring import HypothesisError, three_sigma_pass
from .fixed_point import solve_mu
from .graph import Graph, girth, is_regular, max_degree

IndependentSet = frozenset


def as_set(members: Iterable[int]) -> frozenset:
    return frozenset(int(v) for v in members)


def is_independent(g: Graph, X: Iterable[int]) -> bool:
    X = set(X)
    return all(not (w in X) for v in X for w in g.adjacency[v])


def weight(X: Iterable[int], lam):
    return lam ** len(set(X))


def add_probability(lam):
    return lam / (1 + lam)


def hamming(X: frozenset, Y: frozenset) -> int:
    return len(X ^ Y)


def blocked(g: Graph, X: frozenset, v: int) -> bool:
    return any(w in X for w in g.adjacency[v])


def heat_bath_update(g: Graph, X: frozenset, v: int, add: bool) -> frozenset:
    """Propose X + v (``add``) or X - v; an add next to an occupied vertex
    leaves X unchanged."""
    if add:
        return X if blocked(g, X, v) else X | {v}
    return X - {v}


def glauber_step_hc(g: Graph, X: frozenset, lam, rng: np.random.Generator) -> frozenset:
    """Draws: one vertex index, one uniform coin."""
    v = int(rng.integers(g.n))
    add = rng.random() < float(add_probability(lam))
    return heat_bath_update(g, X, v, add)


def transition_row_hc(g: Graph, X: frozenset, lam) -> dict[frozenset, object]:
    p_add = add_probability(lam)
    row: dict[frozenset, object] = {}
    for v in range(g.n):
        for add, p in ((True, p_add), (False, 1 - p_add)):
            Z = heat_bath_update(g, X, v, add)
            row[Z] = row.get(Z, 0) + p / g.n
    return row


def unblocked(g: Graph, X: frozenset, v: int) -> tuple[int, ...]:
    """Neighbours w of v with no member of X in N(w) - {v}."""
    return tuple(w for w in g.adjacency[v] if not any(u in X for u in g.adjacency[w] if u != v))


def max_unblocked(g: Graph, X: frozenset) -> int:
    return max((len(unblocked(g, X, v)) for v in range(g.n)), default=0)


# ---------------------------------------------------------------------------
# Maximal coupling: shared vertex and shared add/remove coin
# ---------------------------------------------------------------------------

def maximal_coupled_step_hc(
    g: Graph, X: frozenset, Y: frozenset, lam, rng: np.random.Generator
) -> tuple[frozenset, frozenset]:
    v = int(rng.integers(g.n))
    add = rng.random() < float(add_probability(lam))
    return heat_bath_update(g, X, v, add), heat_bath_update(g, Y, v, add)


def coupled_transition_hc(g: Graph, X: frozenset, Y: frozenset, lam) -> dict[tuple[frozenset, frozenset], object]:
    p_add = add_probability(lam)
    table: dict[tuple[frozenset, frozenset], object] = {}
    for v in range(g.n):
        for add, p in ((True, p_add), (False, 1 - p_add)):
            key = (heat_bath_update(g, X, v, add), heat_bath_update(g, Y, v, add))
            table[key] = table.get(key, 0) + p / g.n
    return table


def expected_coupled_distance_hc(g: Graph, X: frozenset, Y: frozenset, lam):
    """Exact E[|X' ^ Y'|] under the maximal coupling (sum over the n
    vertices and both coin outcomes)."""
    p_add = add_probability(lam)
    total = 0
    for v in range(g.n):
        for add, p in ((True, p_add), (False, 1 - p_add)):
            total += p * hamming(heat_bath_update(g, X, v, add), heat_bath_update(g, Y, v, add))
    return total / g.n


def lemma48_hypothesis(g: Graph, X: frozenset, Y: frozenset, lam, zeta) -> bool:
    """|U(X, v)|, |U(Y, v)| <= (1 - zeta)(1 + lam)/lam at every vertex."""
    if not 0 < zeta < 1:
        raise ValueError(f"zeta must lie in (0, 1), got {zeta}")
    cap = (1 - zeta) * (1 + lam) / lam
    return max(max_unblocked(g, X), max_unblocked(g, Y)) <= cap


def lemma48_sup_zeta(g: Graph, X: frozenset, Y: frozenset, lam):
    """Largest zeta with the hypothesis satisfied (may be <= 0)."""
    u = max(max_unblocked(g, X), max_unblocked(g, Y))
    return 1 - u * lam / (1 + lam)


def hc_contraction(n: int, delta_max: int, lam):
    """Worst-case contraction (1 - D lam/(1+lam))/n of the maximal coupling,
    or None when it is not positive (|U| <= D always)."""
    zeta = 1 - delta_max * lam / (1 + lam)
    return zeta / n if zeta > 0 else None


@dataclass
class HCContractionReport:
    pairs_checked: int = 0
    hypothesis_pairs: int = 0
    violations: list = field(default_factory=list)
    worst_ratio: object = None

    @property
    def passed(self) -> bool:
        return not self.violations


def check_lemma48(
    g: Graph,
    lam,
    zetas: Iterable | None = None,
    states: Sequence[frozenset] | None = None,
) -> HCContractionReport:
    """Exhaustive check over ordered pairs of distinct independent sets:
    whenever the unblocked-count hypothesis holds for zeta, the coupled
    expected distance is at most (1 - zeta/n) times the distance.

    With ``zetas=None`` each pair is checked at its largest admissible zeta;
    the right-hand side decreases in zeta, so that covers all of them.
    """
    if states is None:
        from .exact import enumerate_independent_sets

        states = enumerate_independent_sets(g).states
    zetas = None if zetas is None else list(zetas)
    report = HCContractionReport()
    for X in states:
        for Y in states:
            if X == Y:
                continue
            report.pairs_checked += 1
            if zetas is None:
                z = lemma48_sup_zeta(g, X, Y, lam)
                cands = [z] if 0 < z else []
            else:
                cands = [z for z in zetas if lemma48_hypothesis(g, X, Y, lam, z)]
            if not cands:
                continue
            report.hypothesis_pairs += 1
            rho = hamming(X, Y)
            e1 = expected_coupled_distance_hc(g, X, Y, lam)
            ratio = e1 / rho
            if report.worst_ratio is None or ratio > report.worst_ratio:
                report.worst_ratio = ratio
            for z in cands:
                if e1 > (1 - z / g.n) * rho:
                    report.violations.append((X, Y, z, e1))
    return report


# ---------------------------------------------------------------------------
# Local uniformity of unblocked neighbours
# ---------------------------------------------------------------------------

def lemma42_bound(n: int, delta_max: int, lam: float, zeta: float, xi: float) -> float:
    """Upper bound 3n exp(-(xi zeta/(8 lam D) - (e+1)^2/D)^2 D/8) on the
    probability that some |U(X, v)| leaves (mu +- xi) D, clipped to [0, 1].
    When the bracket is not positive the concentration step behind the
    bound does not apply, and the bound is reported as vacuous (1.0)."""
    inner = xi * zeta / (8 * lam * delta_max) - (math.e + 1) ** 2 / delta_max
    if inner <= 0:
        return 1.0
    return min(1.0, 3 * n * math.exp(-inner * inner * delta_max / 8))


def lemma42_hypothesis_failures(g: Graph, lam: float, zeta: float, xi: float) -> list[str]:
    failures = []
    d = max_degree(g)
    if not 0 < zeta < 1:
        failures.append(f"zeta must lie in (0, 1), got {zeta}")
    if not xi > 0:
        failures.append(f"xi must be positive, got {xi}")
    if d < 1 or not is_regular(g):
        failures.append("graph is not regular with degree >= 1")
    if girth(g) < 6:
        failures.append(f"girth {girth(g)} < 6")
    if d >= 1:
        # relative slack for lam chosen exactly at the (1 - zeta) e / D edge
        if lam * d < 1 * (1 - 1e-12) or lam * d > (1 - zeta) * math.e * (1 + 1e-12):
            failures.append(f"lambda * D = {lam * d:g} outside [1, (1 - zeta) e]")
    return failures


@dataclass
class Lemma42Report:
    n: int
    degree: int
    lam: float
    zeta: float
    xi: float
    mu: float
    window: tuple[float, float]
    samples: int
    sampler: str
    empirical_rate: float
    bound: float
    passed: bool
    burn_in: int | None = None
    exact_rate: float | None = None
    empirical_min_hist: dict[int, int] = field(default_factory=dict)
    empirical_max_hist: dict[int, int] = field(default_factory=dict)
    exact_min_hist: dict[int, float] = field(default_factory=dict)
    exact_max_hist: dict[int, float] = field(default_factory=dict)


def verify_lemma42(
    g: Graph,
    lam: float,
    zeta: float,
    xi: float,
    samples: int,
    rng: np.random.Generator,
    sampler: str = "exact",
    burn_in: int | None = None,
    exact_reference: bool | None = None,
) -> Lemma42Report:
    """Empirical rate of {exists v: |U(X, v)| outside (mu +- xi) D} for X
    drawn from the hard-core Gibbs distribution, against the concentration bound.

    ``sampler="mcmc"`` runs independent Glauber chains from the empty set;
    the default burn-in is the worst-case-coupling time to 1e-3 in total
    variation and needs D lam / (1 + lam) < 1.
    """
    failures = lemma42_hypothesis_failures(g, lam, zeta, xi)
    if failures:
        raise HypothesisError("; ".join(failures))
    if samples < 1:
        raise ValueError("need at least one sample")
    d = max_degree(g)
    mu = solve_mu(lam * d)
    window = ((mu - xi) * d, (mu + xi) * d)
    if exact_reference is None:
        exact_reference = sampler == "exact"

    lamf = float(lam)
    if sampler == "exact" or exact_reference:
        from .exact import enumerate_independent_sets

        space = enumerate_independent_sets(g)
        w = np.array([lamf ** len(X) for X in space.states])
        probs = w / w.sum()

    if sampler == "exact":
        idx = rng.choice(len(space.states), size=samples, p=probs)
        occ = np.zeros((samples, g.n), dtype=bool)
        for row, i in enumerate(idx):
            occ[row, list(space.states[i])] = True
    elif sampler == "mcmc":
        if burn_in is None:
            from .coupling import mixing_time_theorem11

            eps = hc_contraction(g.n, d, lamf)
            if eps is None:
                raise HypothesisError("burn_in must be given when D lam / (1 + lam) >= 1")
            burn_in = mixing_time_theorem11(g.n, 1e-3, eps)
        occ = hardcore_batch(g, lamf, np.zeros((samples, g.n), dtype=bool), burn_in, rng)
    else:
        raise ValueError(f"unknown sampler {sampler!r}")

    counts = batch_unblocked_counts(g, occ)
    lo_u, hi_u = counts.min(axis=1), counts.max(axis=1)
    bad = (lo_u < window[0]) | (hi_u > window[1])
    rate = float(bad.mean())
    bound = lemma42_bound(g.n, d, lamf, zeta, xi)
    report = Lemma42Report(
        g.n, d, lamf, zeta, xi, mu, window, samples, sampler, rate, bound,
        three_sigma_pass(rate, bound, samples), burn_in if sampler == "mcmc" else None,
        empirical_min_hist=_hist(lo_u), empirical_max_hist=_hist(hi_u),
    )
    if exact_reference:
        min_h: dict[int, float] = {}
        max_h: dict[int, float] = {}
        viol = 0.0
        for X, p in zip(space.states, probs):
            us = [len(unblocked(g, X, v)) for v in range(g.n)]
            min_h[min(us)] = min_h.get(min(us), 0.0) + p
            max_h[max(us)] = max_h.get(max(us), 0.0) + p
            if min(us) < window[0] or max(us) > window[1]:
                viol += p
        report.exact_min_hist = dict(sorted(min_h.items()))
        report.exact_max_hist = dict(sorted(max_h.items()))
        report.exact_rate = viol
    return report


def _hist(values: np.ndarray) -> dict[int, int]:
    keys, counts = np.unique(values, return_counts=True)
    return {int(a): int(c) for a, c in zip(keys, counts)}


def lemma41_params(n: int, zeta: float, delta: float) -> tuple[int, int]:
    """Degree threshold ceil(320000 ln(144 n^3/(zeta delta))/zeta^4) and the
    step count ceil((8n/zeta) ln(2n/delta)) for warm-start mixing."""
    if not 0 < zeta < 1:
        raise ValueError(f"zeta must lie in (0, 1), got {zeta}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if n < 1:
        raise ValueError("n must be positive")
    d_min = math.ceil(320000 * math.log(144 * n**3 / (zeta * delta)) / zeta**4)
    steps = math.ceil(8 * n / zeta * math.log(2 * n / delta))
    return d_min, steps


# ---------------------------------------------------------------------------
# Vectorised replicas: occupancy arrays (M, n) of bool
# ---------------------------------------------------------------------------

def _blocked_batch(occ: np.ndarray, v: np.ndarray, nbr: np.ndarray) -> np.ndarray:
    rows = np.arange(occ.shape[0])[:, None]
    nb = nbr[v]
    return np.any((nb >= 0) & occ[rows, np.maximum(nb, 0)], axis=1)


def hardcore_batch(g: Graph, lam: float, occ: np.ndarray, steps: int, rng: np.random.Generator) -> np.ndarray:
    occ = np.array(occ, dtype=bool, copy=True)
    m = occ.shape[0]
    nbr = g.padded_neighbors()
    rows = np.arange(m)
    p = float(add_probability(lam))
    for _ in range(steps):
        v = rng.integers(g.n, size=m)
        add = rng.random(m) < p
        occ[rows, v] = add & ~_blocked_batch(occ, v, nbr)
    return occ


def maximal_coupled_batch(
    g: Graph, lam: float, xs: np.ndarray, ys: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """One coupled step on every replica pair, in place."""
    m = xs.shape[0]
    nbr = g.padded_neighbors()
    rows = np.arange(m)
    v = rng.integers(g.n, size=m)
    add = rng.random(m) < float(add_probability(lam))
    bx = _blocked_batch(xs, v, nbr)
    by = _blocked_batch(ys, v, nbr)
    xs[rows, v] = add & ~bx
    ys[rows, v] = add & ~by
    return xs, ys


def batch_unblocked_counts(g: Graph, occ: np.ndarray) -> np.ndarray:
    """(M, n) array of |U(X, v)|."""
    occ = np.asarray(occ, dtype=np.int64)
    m = occ.shape[0]
    occupied_nbrs = np.zeros_like(occ)
    for w in range(g.n):
        if g.adjacency[w]:
            occupied_nbrs[:, w] = occ[:, list(g.adjacency[w])].sum(axis=1)
    out = np.zeros((m, g.n), dtype=np.int64)
    for v in range(g.n):
        for w in g.adjacency[v]:
            out[:, v] += (occupied_nbrs[:, w] - occ[:, v]) == 0
    return out


# ---------------------------------------------------------------------------
# Text format: sorted members on one line, "-" for the empty set
# ---------------------------------------------------------------------------

def dumps(X: Iterable[int]) -> str:
    members = sorted(int(v) for v in X)
    return " ".join(map(str, members)) if members else "-"


def loads(line: str) -> frozenset:
    line = line.strip()
    return frozenset() if line == "-" else frozenset(int(t) for t in line.split())
