"""Brute-force ground truth for small instances: state enumeration, exact
kernels, stationary distributions, total variation decay, exact mixing
times and partition functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Hashable, Sequence

import numpy as np

from . import coloring as col
from . import hardcore as hc
from .graph import Graph

ALL_COLORINGS_CAP = 10**6
PROPER_COLORINGS_CAP = 10**7
INDEPENDENT_SETS_CAP = 2**20
DENSE_KERNEL_CAP = 10**4
INVARIANCE_TOL = 1e-12


class CapExceeded(RuntimeError):
    pass


class KernelError(AssertionError):
    """Kernel failed a structural check (row sums, invariance)."""


class NonErgodic(RuntimeError):
    def __init__(self, message: str, classes: list[list[int]]):
        super().__init__(message)
        self.classes = classes


@dataclass
class StateSpace:
    states: list
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {s: i for i, s in enumerate(self.states)}
        if len(self.index) != len(self.states):
            raise ValueError("duplicate states")

    def __len__(self) -> int:
        return len(self.states)

    def point_mass(self, state: Hashable) -> np.ndarray:
        d = np.zeros(len(self.states))
        d[self.index[state]] = 1.0
        return d


def enumerate_all_colorings(g: Graph, k: int, cap: int = ALL_COLORINGS_CAP) -> StateSpace:
    if k**g.n > cap:
        raise CapExceeded(f"{k}^{g.n} colorings exceed cap {cap}")
    return StateSpace(list(product(range(1, k + 1), repeat=g.n)))


def enumerate_proper_colorings(g: Graph, k: int, cap: int = PROPER_COLORINGS_CAP) -> StateSpace:
    """Proper colorings in lexicographic order, by backtracking."""
    out: list[tuple[int, ...]] = []
    X = [0] * g.n

    def extend(v: int) -> None:
        if v == g.n:
            if len(out) >= cap:
                raise CapExceeded(f"more than {cap} proper colorings")
            out.append(tuple(X))
            return
        earlier = {X[w] for w in g.adjacency[v] if w < v}
        for c in range(1, k + 1):
            if c not in earlier:
                X[v] = c
                extend(v + 1)
        X[v] = 0

    extend(0)
    return StateSpace(out)


def enumerate_independent_sets(g: Graph, cap: int = INDEPENDENT_SETS_CAP) -> StateSpace:
    """All independent sets, ordered lexicographically by sorted members
    (so the empty set comes first)."""
    out: list[frozenset] = []
    members: list[int] = []
    blocked = [0] * g.n

    def extend(start: int) -> None:
        if len(out) >= cap:
            raise CapExceeded(f"more than {cap} independent sets")
        out.append(frozenset(members))
        for v in range(start, g.n):
            if blocked[v] == 0:
                members.append(v)
                for w in g.adjacency[v]:
                    blocked[w] += 1
                extend(v + 1)
                for w in g.adjacency[v]:
                    blocked[w] -= 1
                members.pop()

    extend(0)
    return StateSpace(out)


# ---------------------------------------------------------------------------
# Exact chains
# ---------------------------------------------------------------------------

@dataclass
class ExactChain:
    space: StateSpace
    kernel: np.ndarray
    pi: np.ndarray
    exact_rows: list[dict] | None = None
    exact_pi: list | None = None

    @property
    def recurrent(self) -> np.ndarray:
        return np.flatnonzero(self.pi > 0)


def coloring_chain(g: Graph, k: int, proper_only: bool = False, exact: bool = False) -> ExactChain:
    """Heat-bath coloring chain on [k]^V (or on proper colorings only) with
    pi uniform over proper colorings."""
    col.check_palette(g, k)
    space = enumerate_proper_colorings(g, k) if proper_only else enumerate_all_colorings(g, k)
    return build_kernel(space, g, k=k, exact=exact)


def hardcore_chain(g: Graph, lam, exact: bool = False) -> ExactChain:
    """Hard-core Glauber chain with pi(X) = lam^|X| / Z."""
    return build_kernel(enumerate_independent_sets(g), g, lam=lam, exact=exact)


def build_kernel(space: StateSpace, g: Graph, *, k: int | None = None, lam=None, exact: bool = False) -> ExactChain:
    """Kernel on a given enumeration: pass ``k`` for the coloring chain
    (space from an enumerator of colorings) or ``lam`` for the hard-core
    chain (space of independent sets)."""
    if (k is None) == (lam is None):
        raise ValueError("give exactly one of k (colorings) or lam (hard-core)")
    if exact and lam is not None and not isinstance(lam, (int, Fraction)):
        raise ValueError("exact kernels need a rational fugacity")
    if k is not None:
        rows = [col.transition_row(g, k, X) for X in space.states]
        proper = [col.is_proper(g, X) for X in space.states]
        if not any(proper):
            raise KernelError("no proper colorings; stationary distribution undefined")
        exact_pi = [Fraction(int(p), sum(proper)) for p in proper]
    else:
        rows = [hc.transition_row_hc(g, X, lam) for X in space.states]
        exact_pi = gibbs(space, lam)
    return _assemble(space, rows, exact_pi, exact)


def _assemble(space: StateSpace, rows: list[dict], exact_pi: list, exact: bool) -> ExactChain:
    size = len(space)
    if size > DENSE_KERNEL_CAP:
        raise CapExceeded(f"{size} states exceed the dense kernel cap {DENSE_KERNEL_CAP}")
    P = np.zeros((size, size))
    for i, row in enumerate(rows):
        for state, p in row.items():
            j = space.index.get(state)
            if j is None:
                raise KernelError(f"transition leaves the state space: {state}")
            P[i, j] += float(p)
    pi = np.array([float(p) for p in exact_pi])
    chain = ExactChain(space, P, pi, rows if exact else None, exact_pi if exact else None)
    check_chain(chain)
    return chain


def check_chain(chain: ExactChain, tol: float = INVARIANCE_TOL) -> None:
    """Row sums 1 and pi P = pi within ``tol``; exactly when the chain
    carries exact rows."""
    P, pi = chain.kernel, chain.pi
    if np.max(np.abs(P.sum(axis=1) - 1)) > tol:
        raise KernelError("kernel rows do not sum to 1")
    if np.any(pi < 0) or abs(pi.sum() - 1) > tol:
        raise KernelError("pi is not a distribution")
    if np.max(np.abs(pi @ P - pi)) > tol:
        raise KernelError("pi is not invariant under the kernel")
    if chain.exact_rows is not None:
        size = len(chain.space)
        flow = [Fraction(0)] * size
        for i, row in enumerate(chain.exact_rows):
            if sum(row.values()) != 1:
                raise KernelError(f"exact row {i} does not sum to 1")
            for state, p in row.items():
                flow[chain.space.index[state]] += chain.exact_pi[i] * p
        if flow != list(chain.exact_pi):
            raise KernelError("pi is not exactly invariant")


def detailed_balance_defect(chain: ExactChain):
    """max |pi(x) P(x, y) - pi(y) P(y, x)|; exact when rows are exact."""
    if chain.exact_rows is not None:
        idx = chain.space.index
        worst = Fraction(0)
        for i, row in enumerate(chain.exact_rows):
            for state, p in row.items():
                j = idx[state]
                back = chain.exact_rows[j].get(chain.space.states[i], 0)
                worst = max(worst, abs(chain.exact_pi[i] * p - chain.exact_pi[j] * back))
        return worst
    flow = chain.pi[:, None] * chain.kernel
    return float(np.max(np.abs(flow - flow.T)))


def tv_distance(d1: Sequence, d2: Sequence) -> float:
    """Half the L1 distance."""
    return 0.5 * float(np.sum(np.abs(np.asarray(d1, dtype=float) - np.asarray(d2, dtype=float))))


def distribution_after(chain: ExactChain, start: np.ndarray, steps: int) -> np.ndarray:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    d = np.asarray(start, dtype=float)
    for _ in range(steps):
        d = d @ chain.kernel
    return d


def communicating_classes(chain: ExactChain) -> list[list[int]]:
    """Communicating classes among the states charged by pi. Each of them is
    closed, because pi is invariant."""
    rec = set(chain.recurrent.tolist())
    succ = {i: np.flatnonzero(chain.kernel[i] > 0).tolist() for i in rec}
    seen: set[int] = set()
    classes = []
    for s in sorted(rec):
        if s in seen:
            continue
        reach = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in succ[u]:
                if w not in reach:
                    reach.add(w)
                    stack.append(w)
        seen |= reach
        classes.append(sorted(reach))
    return classes


def tv_curve(chain: ExactChain, steps: int, starts: str | Sequence[int] = "recurrent") -> np.ndarray:
    """Worst-case TV to pi over point-mass starts, for t = 0..steps."""
    idx = _starts(chain, starts)
    D = np.zeros((len(idx), len(chain.space)))
    D[np.arange(len(idx)), idx] = 1.0
    out = np.empty(steps + 1)
    for t in range(steps + 1):
        if t:
            D = D @ chain.kernel
        out[t] = 0.5 * np.max(np.abs(D - chain.pi).sum(axis=1))
    return out


def _starts(chain: ExactChain, starts) -> np.ndarray:
    if isinstance(starts, str):
        if starts == "recurrent":
            return chain.recurrent
        if starts == "all":
            return np.arange(len(chain.space))
        raise ValueError(f"unknown start set {starts!r}")
    return np.asarray(starts, dtype=np.int64)


def exact_mixing_time(
    chain: ExactChain, delta: float, starts: str | Sequence[int] = "recurrent", max_steps: int = 100_000
) -> int:
    """Least T with max over point-mass starts of TV(start P^T, pi) <= delta."""
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    classes = communicating_classes(chain)
    if len(classes) > 1:
        raise NonErgodic(f"{len(classes)} closed classes among stationary states", classes)
    idx = _starts(chain, starts)
    D = np.zeros((len(idx), len(chain.space)))
    D[np.arange(len(idx)), idx] = 1.0
    for t in range(max_steps + 1):
        if t:
            D = D @ chain.kernel
        if 0.5 * np.max(np.abs(D - chain.pi).sum(axis=1)) <= delta:
            return t
    raise RuntimeError(f"TV above {delta} after {max_steps} steps")


def partition_function(g: Graph, lam):
    """Z = sum over independent sets of lam^|X|; exact for Fraction lam."""
    return sum(lam ** len(X) for X in enumerate_independent_sets(g).states)


def gibbs(space: StateSpace, lam) -> list:
    weights = [lam ** len(X) for X in space.states]
    Z = sum(weights)
    return [w / Z for w in weights]


def kernel_triples(chain: ExactChain) -> str:
    """Non-zero entries as lines "i j p"."""
    rows, cols = np.nonzero(chain.kernel)
    return "".join(f"{i} {j} {float(chain.kernel[i, j])!r}\n" for i, j in zip(rows.tolist(), cols.tolist()))
