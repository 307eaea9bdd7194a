"""Heat-bath Glauber dynamics on k-colorings and a one-step greedy coupling.

Colorings are tuples of ints in 1..k and need not be proper. The palette
size must satisfy k >= max_degree + 1 so that every vertex always has an
available color.

Coupling rule. Both chains update the same vertex v. Let A_X, A_Y be the
available sets, m = max(|A_X|, |A_Y|) and L = lcm(|A_X|, |A_Y|). One integer
r is drawn uniformly from 0..L-1 and read as the quantile r/L:

* the first |A_X & A_Y| * L/m units give each common color (in increasing
  order) to both chains, so Pr(both pick c) = 1/m;
* the remaining units are split by walking each chain's residual masses
  (1/|A| minus what the shared block already gave, colors in increasing
  order) and taking the color whose cumulative residual mass covers the
  quantile.

The residual supports of the two chains are disjoint, so the agreement
probability is exactly |A_X & A_Y| / m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Sequence

import numpy as np

from .fixed_point import solve_alpha
from .graph import Graph, is_triangle_free, max_degree

Coloring = tuple[int, ...]


class HypothesisError(ValueError):
    """Inputs violate the hypotheses of the check being requested."""


def check_palette(g: Graph, k: int) -> None:
    if k < max_degree(g) + 1:
        raise HypothesisError(f"need k >= max degree + 1 = {max_degree(g) + 1}, got k={k}")


def validate_coloring(g: Graph, k: int, X: Sequence[int]) -> Coloring:
    X = tuple(int(c) for c in X)
    if len(X) != g.n:
        raise ValueError(f"coloring has length {len(X)}, graph has {g.n} vertices")
    if any(not 1 <= c <= k for c in X):
        raise ValueError(f"colors must lie in 1..{k}")
    return X


def is_proper(g: Graph, X: Sequence[int]) -> bool:
    return all(X[u] != X[w] for u, w in g.edges())


def hamming(X: Sequence, Y: Sequence) -> int:
    return sum(a != b for a, b in zip(X, Y))


def available_colors(g: Graph, k: int, X: Sequence[int], v: int) -> tuple[int, ...]:
    """Sorted colors in 1..k absent from the neighbourhood of v."""
    used = {X[w] for w in g.adjacency[v]}
    return tuple(c for c in range(1, k + 1) if c not in used)


def min_available(g: Graph, k: int, X: Sequence[int]) -> int:
    return min((len(available_colors(g, k, X, v)) for v in range(g.n)), default=k)


def greedy_proper_coloring(g: Graph, k: int) -> Coloring:
    check_palette(g, k)
    X = [0] * g.n
    for v in range(g.n):
        used = {X[w] for w in g.adjacency[v]}
        X[v] = next(c for c in range(1, k + 1) if c not in used)
    return tuple(X)


# ---------------------------------------------------------------------------
# Single chain
# ---------------------------------------------------------------------------

def glauber_step(g: Graph, k: int, X: Coloring, rng: np.random.Generator) -> Coloring:
    """One heat-bath update. Draws: one vertex index, then one index into
    the sorted available set."""
    v = int(rng.integers(g.n))
    avail = available_colors(g, k, X, v)
    assert avail, "empty available set; k must exceed the max degree"
    c = avail[int(rng.integers(len(avail)))]
    return X[:v] + (c,) + X[v + 1:]


def transition_row(g: Graph, k: int, X: Coloring) -> dict[Coloring, Fraction]:
    """Exact one-step distribution from X."""
    row: dict[Coloring, Fraction] = {}
    for v in range(g.n):
        avail = available_colors(g, k, X, v)
        p = Fraction(1, g.n * len(avail))
        for c in avail:
            Z = X[:v] + (c,) + X[v + 1:]
            row[Z] = row.get(Z, 0) + p
    return row


# ---------------------------------------------------------------------------
# Greedy coupling
# ---------------------------------------------------------------------------

def jerrum_choice(ax: Sequence[int], ay: Sequence[int], r: int) -> tuple[int, int]:
    """Colors picked by the two chains for quantile index r in 0..L-1,
    L = lcm(|ax|, |ay|); ``ax`` and ``ay`` sorted."""
    a, b = len(ax), len(ay)
    L = math.lcm(a, b)
    shared_unit = L // max(a, b)
    in_y = set(ay)
    common = [c for c in ax if c in in_y]
    if r < len(common) * shared_unit:
        c = common[r // shared_unit]
        return c, c
    r -= len(common) * shared_unit
    return _residual_pick(ax, L // a, common, shared_unit, r), _residual_pick(ay, L // b, common, shared_unit, r)


def _residual_pick(avail, unit, common, shared_unit, r):
    common = set(common)
    acc = 0
    for c in avail:
        acc += unit - (shared_unit if c in common else 0)
        if r < acc:
            return c
    raise AssertionError("quantile outside residual mass")


def jerrum_coupled_step(
    g: Graph, k: int, X: Coloring, Y: Coloring, rng: np.random.Generator
) -> tuple[Coloring, Coloring]:
    """Draws: one vertex index, then one integer in 0..lcm(|A_X|,|A_Y|)-1."""
    if len(X) != len(Y):
        raise ValueError("colorings live on different graphs")
    v = int(rng.integers(g.n))
    ax = available_colors(g, k, X, v)
    ay = available_colors(g, k, Y, v)
    r = int(rng.integers(math.lcm(len(ax), len(ay))))
    cx, cy = jerrum_choice(ax, ay, r)
    return X[:v] + (cx,) + X[v + 1:], Y[:v] + (cy,) + Y[v + 1:]


def coupled_transition(g: Graph, k: int, X: Coloring, Y: Coloring) -> dict[tuple[Coloring, Coloring], Fraction]:
    """Exact joint one-step distribution of the coupling, by enumerating the
    vertex draw and the quantile draw."""
    table: dict[tuple[Coloring, Coloring], Fraction] = {}
    for v in range(g.n):
        ax = available_colors(g, k, X, v)
        ay = available_colors(g, k, Y, v)
        L = math.lcm(len(ax), len(ay))
        p = Fraction(1, g.n * L)
        for r in range(L):
            cx, cy = jerrum_choice(ax, ay, r)
            key = (X[:v] + (cx,) + X[v + 1:], Y[:v] + (cy,) + Y[v + 1:])
            table[key] = table.get(key, 0) + p
    return table


def disagreement_probability(g: Graph, k: int, X: Coloring, Y: Coloring, v: int) -> Fraction:
    """Pr(X1(v) != Y1(v) | v chosen) = 1 - |A_X & A_Y| / max(|A_X|, |A_Y|)."""
    ax = set(available_colors(g, k, X, v))
    ay = set(available_colors(g, k, Y, v))
    return 1 - Fraction(len(ax & ay), max(len(ax), len(ay)))


def expected_coupled_distance(g: Graph, k: int, X: Coloring, Y: Coloring) -> Fraction:
    """Exact E[hamming(X1, Y1)] under the coupling, summed over the vertex
    choice: off the chosen vertex the distance is unchanged, at it the
    chains disagree with ``disagreement_probability``."""
    rho = hamming(X, Y)
    total = Fraction(0)
    for v in range(g.n):
        total += rho - (X[v] != Y[v]) + disagreement_probability(g, k, X, Y, v)
    return total / g.n


def check_distance_decreasing_pair(g: Graph, k: int, X: Coloring, Y: Coloring, eps) -> bool:
    """Strict test E[rho(X1, Y1)] < (1 - eps) rho(X, Y) in exact arithmetic."""
    if tuple(X) == tuple(Y):
        raise ValueError("distance-decreasing is defined for distinct pairs")
    return expected_coupled_distance(g, k, X, Y) < (1 - Fraction(eps)) * hamming(X, Y)


def lemma23_hypothesis(g: Graph, k: int, X: Coloring, beta) -> bool:
    """Every vertex has |A(X, v)| >= max_degree / (1 - beta)."""
    beta = Fraction(beta)
    if not 0 < beta < 1:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    need = Fraction(max_degree(g)) / (1 - beta)
    return all(len(available_colors(g, k, X, v)) >= need for v in range(g.n))


def lemma23_sup_beta(g: Graph, k: int, X: Coloring) -> Fraction:
    """Supremum of the betas in (0, 1) for which the hypothesis holds at X,
    or 0 when there are none. The contraction inequality is continuous in
    beta, so checking at the supremum covers every admissible beta."""
    d = max_degree(g)
    low = min_available(g, k, X)
    if d == 0:
        return Fraction(1)
    return max(Fraction(0), 1 - Fraction(d, low))


def jerrum_contraction(n: int, delta_max: int, k: int) -> Fraction | None:
    """Worst-case contraction (k - 2D) / (n (k - D)) of the coupling, valid
    for every pair when k > 2D; None otherwise."""
    if k <= 2 * delta_max:
        return None
    return Fraction(k - 2 * delta_max, n * (k - delta_max))


def all_colorings(n: int, k: int) -> Iterator[Coloring]:
    return product(range(1, k + 1), repeat=n)


@dataclass
class ContractionReport:
    pairs_checked: int = 0
    hypothesis_pairs: int = 0
    violations: list = field(default_factory=list)
    worst_ratio: Fraction | None = None

    @property
    def passed(self) -> bool:
        return not self.violations


def check_lemma23(
    g: Graph,
    k: int,
    betas: Iterable | None = None,
    pairs: int | None = None,
    rng: np.random.Generator | None = None,
) -> ContractionReport:
    """Check E[rho(X1, Y1)] <= (1 - beta/n) rho(X, Y) whenever X meets the
    available-color hypothesis.

    With ``pairs=None`` every ordered pair of distinct colorings in [k]^V is
    visited; otherwise ``pairs`` uniformly random distinct pairs are drawn.
    With ``betas=None`` each X is checked at its supremum admissible beta.
    ``worst_ratio`` is the largest E[rho1]/rho seen among hypothesis pairs.
    """
    check_palette(g, k)
    betas = None if betas is None else [Fraction(b) for b in betas]
    report = ContractionReport()
    for X, Y in _pairs(g.n, k, pairs, rng):
        report.pairs_checked += 1
        cands = [lemma23_sup_beta(g, k, X)] if betas is None else [b for b in betas if lemma23_hypothesis(g, k, X, b)]
        cands = [b for b in cands if b > 0]
        if not cands:
            continue
        report.hypothesis_pairs += 1
        rho = hamming(X, Y)
        e1 = expected_coupled_distance(g, k, X, Y)
        ratio = e1 / rho
        if report.worst_ratio is None or ratio > report.worst_ratio:
            report.worst_ratio = ratio
        for b in cands:
            if e1 > (1 - b / g.n) * rho:
                report.violations.append((X, Y, b, e1))
    return report


def _pairs(n, k, pairs, rng):
    if pairs is None:
        states = list(all_colorings(n, k))
        for X in states:
            for Y in states:
                if X != Y:
                    yield X, Y
        return
    if rng is None:
        raise ValueError("random pair mode needs an rng")
    drawn = 0
    while drawn < pairs:
        X = tuple(int(c) for c in rng.integers(1, k + 1, size=n))
        Y = tuple(int(c) for c in rng.integers(1, k + 1, size=n))
        if X != Y:
            drawn += 1
            yield X, Y


# ---------------------------------------------------------------------------
# Local uniformity of available colors
# ---------------------------------------------------------------------------

def uniformity_threshold(delta_max: int, k: int, beta: float) -> float:
    """k (e^{-D/k} - beta): the level below which |A(X, v)| is a violation."""
    return k * (math.exp(-delta_max / k) - beta)


def uniformity_statistic(g: Graph, k: int, X: Sequence[int]) -> float:
    """min_v |A(X, v)| / (k e^{-D/k})."""
    return min_available(g, k, X) / (k * math.exp(-max_degree(g) / k))


def lemma21_bound(n: int, k: int, beta: float) -> float:
    return n * math.exp(-beta * beta * k / 8)


def three_sigma_pass(rate: float, bound: float, m: int) -> bool:
    """One-sided check rate <= bound + 3 sqrt(b(1-b)/M) + 3/sqrt(M), b the
    bound clipped to [0, 1]."""
    b = min(max(bound, 0.0), 1.0)
    return rate <= bound + 3 * math.sqrt(b * (1 - b) / m) + 3 / math.sqrt(m)


@dataclass
class Lemma21Report:
    n: int
    k: int
    beta: float
    samples: int
    sampler: str
    threshold: float
    empirical_rate: float
    bound: float
    passed: bool
    burn_in: int | None = None
    exact_rate: Fraction | None = None
    empirical_hist: dict[int, int] = field(default_factory=dict)
    exact_hist: dict[int, Fraction] = field(default_factory=dict)


def check_lemma21_hypotheses(g: Graph, k: int, beta: float) -> None:
    if not 0 < beta <= 1:
        raise HypothesisError(f"beta must lie in (0, 1], got {beta}")
    if not is_triangle_free(g):
        raise HypothesisError("graph contains a triangle")
    d = max_degree(g)
    if k < d + 2 / beta:
        raise HypothesisError(f"need k >= max degree + 2/beta = {d + 2 / beta:g}, got k={k}")


def verify_lemma21(
    g: Graph,
    k: int,
    beta: float,
    samples: int,
    rng: np.random.Generator,
    sampler: str = "exact",
    burn_in: int | None = None,
    exact_reference: bool | None = None,
) -> Lemma21Report:
    """Empirical rate of {exists v: |A(X, v)| < k(e^{-D/k} - beta)} for X
    uniform over proper k-colorings, against the bound n e^{-beta^2 k / 8}.

    ``sampler="exact"`` draws from the enumerated proper colorings;
    ``sampler="mcmc"`` runs ``samples`` independent Glauber chains from a
    greedy proper coloring for ``burn_in`` steps. When ``burn_in`` is None
    it is set from the worst-case coupling contraction (needs k > 2D) so
    that each chain is within 1e-3 of uniform in total variation.
    ``exact_reference`` (default: on for the exact sampler) also computes the
    exact violation probability and the exact law of min_v |A(X, v)|.
    """
    check_lemma21_hypotheses(g, k, beta)
    if samples < 1:
        raise ValueError("need at least one sample")
    d = max_degree(g)
    threshold = uniformity_threshold(d, k, beta)
    if exact_reference is None:
        exact_reference = sampler == "exact"

    space = None
    if sampler == "exact" or exact_reference:
        from .exact import enumerate_proper_colorings

        space = enumerate_proper_colorings(g, k)

    if sampler == "exact":
        idx = rng.integers(len(space.states), size=samples)
        draws = np.array([space.states[i] for i in idx], dtype=np.int64).reshape(samples, g.n)
    elif sampler == "mcmc":
        if burn_in is None:
            from .coupling import mixing_time_theorem11

            eps = jerrum_contraction(g.n, d, k)
            if eps is None:
                raise HypothesisError("burn_in must be given when k <= 2 * max degree")
            burn_in = mixing_time_theorem11(max(g.n, 1), 1e-3, float(eps))
        start = np.tile(np.array(greedy_proper_coloring(g, k), dtype=np.int64), (samples, 1))
        draws = glauber_batch(g, k, start, burn_in, rng)
    else:
        raise ValueError(f"unknown sampler {sampler!r}")

    mins = batch_min_available(g, k, draws)
    hist: dict[int, int] = {}
    for value in mins.tolist():
        hist[value] = hist.get(value, 0) + 1
    rate = float(np.mean(mins < threshold))
    bound = lemma21_bound(g.n, k, beta)
    report = Lemma21Report(
        g.n, k, beta, samples, sampler, threshold, rate, bound,
        three_sigma_pass(rate, bound, samples), burn_in if sampler == "mcmc" else None,
        empirical_hist=dict(sorted(hist.items())),
    )
    if exact_reference:
        counts: dict[int, int] = {}
        for X in space.states:
            a = min_available(g, k, X)
            counts[a] = counts.get(a, 0) + 1
        total = len(space.states)
        report.exact_hist = {a: Fraction(c, total) for a, c in sorted(counts.items())}
        report.exact_rate = sum((p for a, p in report.exact_hist.items() if a < threshold), Fraction(0))
    return report


def theorem14_params(n: int, delta_max: int, zeta: float, delta: float) -> tuple[int, int]:
    """Smallest palette and step count admitted by the coloring mixing
    mixing result: k >= max{(1+zeta) alpha D, 288 ln(96 n^3/zeta)/zeta^2} and
    T >= 6n ceil(ln 32n) ceil(ln 1/delta) / zeta."""
    if not 0 < zeta < 1:
        raise ValueError(f"zeta must lie in (0, 1), got {zeta}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if n < 1:
        raise ValueError("n must be positive")
    alpha = solve_alpha()
    k_min = max(
        math.ceil((1 + zeta) * alpha * delta_max),
        math.ceil(288 * math.log(96 * n**3 / zeta) / zeta**2),
    )
    steps = Fraction(6 * n * math.ceil(math.log(32 * n)) * math.ceil(math.log(1 / delta))) / Fraction(str(zeta))
    return k_min, math.ceil(steps)


# ---------------------------------------------------------------------------
# Vectorised replicas: states are (M, n) int arrays of colors 1..k
# ---------------------------------------------------------------------------

def _available_mask(states: np.ndarray, v: np.ndarray, nbr: np.ndarray, k: int) -> np.ndarray:
    m = states.shape[0]
    rows = np.arange(m)[:, None]
    nb = nbr[v]
    cols = np.where(nb >= 0, states[rows, np.maximum(nb, 0)], 0)
    mask = np.ones((m, k + 1), dtype=bool)
    mask[rows, cols] = False
    return mask[:, 1:]


def _nth_true(mask: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Column of the idx-th True entry (0-based) in each row."""
    return np.argmax(np.cumsum(mask, axis=1) > idx[:, None], axis=1)


def glauber_batch(g: Graph, k: int, states: np.ndarray, steps: int, rng: np.random.Generator) -> np.ndarray:
    """Advance every row of ``states`` by ``steps`` independent heat-bath
    updates; returns a new array."""
    check_palette(g, k)
    states = np.array(states, dtype=np.int64, copy=True)
    m = states.shape[0]
    nbr = g.padded_neighbors()
    rows = np.arange(m)
    for _ in range(steps):
        v = rng.integers(g.n, size=m)
        mask = _available_mask(states, v, nbr, k)
        idx = rng.integers(mask.sum(axis=1))
        states[rows, v] = _nth_true(mask, idx) + 1
    return states


def jerrum_choice_batch(
    mask_x: np.ndarray, mask_y: np.ndarray, r: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``jerrum_choice`` on availability masks (M, k); returns
    0-based color columns."""
    a = mask_x.sum(axis=1)
    b = mask_y.sum(axis=1)
    L = np.lcm(a, b)
    shared_unit = L // np.maximum(a, b)
    common = mask_x & mask_y
    s = common.sum(axis=1)
    agree = r < s * shared_unit
    shared_col = _nth_true(common, np.where(agree, r // shared_unit, 0))
    rr = (r - s * shared_unit)[:, None]
    res_x = mask_x * (L // a)[:, None] - common * shared_unit[:, None]
    res_y = mask_y * (L // b)[:, None] - common * shared_unit[:, None]
    cx = np.argmax(np.cumsum(res_x, axis=1) > rr, axis=1)
    cy = np.argmax(np.cumsum(res_y, axis=1) > rr, axis=1)
    return np.where(agree, shared_col, cx), np.where(agree, shared_col, cy)


def jerrum_coupled_batch(
    g: Graph, k: int, xs: np.ndarray, ys: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """One coupled step on every replica pair, in place."""
    m = xs.shape[0]
    nbr = g.padded_neighbors()
    rows = np.arange(m)
    v = rng.integers(g.n, size=m)
    mx = _available_mask(xs, v, nbr, k)
    my = _available_mask(ys, v, nbr, k)
    r = rng.integers(np.lcm(mx.sum(axis=1), my.sum(axis=1)))
    cx, cy = jerrum_choice_batch(mx, my, r)
    xs[rows, v] = cx + 1
    ys[rows, v] = cy + 1
    return xs, ys


def batch_min_available(g: Graph, k: int, states: np.ndarray) -> np.ndarray:
    nbr = g.padded_neighbors()
    m = states.shape[0]
    out = np.full(m, k, dtype=np.int64)
    for v in range(g.n):
        mask = _available_mask(states, np.full(m, v), nbr, k)
        out = np.minimum(out, mask.sum(axis=1))
    return out


# ---------------------------------------------------------------------------
# Text format: one line of n space-separated colors
# ---------------------------------------------------------------------------

def dumps(X: Sequence[int]) -> str:
    return " ".join(str(int(c)) for c in X)


def loads(line: str) -> Coloring:
    return tuple(int(t) for t in line.split())
