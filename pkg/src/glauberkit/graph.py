"""Simple undirected graphs on dense vertex indices, plus the generators used
by the experiments (cycles, paths, stars, complete bipartite graphs,
hypercubes and random bipartite regular graphs)."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Base class for graph validation failures."""


class VertexOutOfRange(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class InfeasibleParameters(GraphError):
    pass


class RetryBudgetExhausted(GraphError):
    pass


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph.

    ``adjacency[v]`` is the sorted tuple of neighbours of ``v``.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    edge_count: int

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, w) for u in range(self.n) for w in self.adjacency[u] if u < w]

    def padded_neighbors(self) -> np.ndarray:
        """(n, max_degree) int array of neighbours, padded with -1."""
        width = max(max_degree(self), 1)
        out = np.full((self.n, width), -1, dtype=np.int64)
        for v, nbrs in enumerate(self.adjacency):
            out[v, : len(nbrs)] = nbrs
        return out


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    if n < 0:
        raise GraphError(f"vertex count must be non-negative, got {n}")
    adj: list[set[int]] = [set() for _ in range(n)]
    count = 0
    for e in edges:
        u, w = int(e[0]), int(e[1])
        for x in (u, w):
            if not 0 <= x < n:
                raise VertexOutOfRange(f"vertex {x} not in 0..{n - 1}")
        if u == w:
            raise SelfLoop(f"self-loop at vertex {u}")
        if w in adj[u]:
            raise DuplicateEdge(f"edge ({u}, {w}) given twice")
        adj[u].add(w)
        adj[w].add(u)
        count += 1
    return Graph(n, tuple(tuple(sorted(a)) for a in adj), count)


def max_degree(g: Graph) -> int:
    return max((len(a) for a in g.adjacency), default=0)


def is_regular(g: Graph) -> bool:
    d = max_degree(g)
    return all(len(a) == d for a in g.adjacency)


def girth(g: Graph) -> float:
    """Length of the shortest cycle (``math.inf`` for forests).

    Runs a BFS from every vertex; a non-tree edge (u, w) met during the
    search from ``root`` closes a closed walk of length dist[u] + dist[w] + 1,
    and the minimum over all roots is exactly the girth.
    """
    best = math.inf
    for root in range(g.n):
        dist = [-1] * g.n
        parent = [-1] * g.n
        dist[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] >= best:
                break
            for w in g.adjacency[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


def is_triangle_free(g: Graph) -> bool:
    return girth(g) > 3


def is_bipartite(g: Graph) -> bool:
    side = [-1] * g.n
    for s in range(g.n):
        if side[s] >= 0:
            continue
        side[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.adjacency[u]:
                if side[w] < 0:
                    side[w] = 1 - side[u]
                    queue.append(w)
                elif side[w] == side[u]:
                    return False
    return True


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def empty(n: int) -> Graph:
    return build_graph(n, [])


def complete(n: int) -> Graph:
    return build_graph(n, [(u, w) for u in range(n) for w in range(u + 1, n)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise InfeasibleParameters(f"cycle needs n >= 3, got {n}")
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    if n < 1:
        raise InfeasibleParameters(f"path needs n >= 1, got {n}")
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def star(d: int) -> Graph:
    """K_{1,d}; the centre is vertex 0."""
    if d < 0:
        raise InfeasibleParameters(f"star needs d >= 0, got {d}")
    return build_graph(d + 1, [(0, i) for i in range(1, d + 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    if a < 0 or b < 0:
        raise InfeasibleParameters(f"part sizes must be non-negative, got {a}, {b}")
    return build_graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def hypercube(d: int) -> Graph:
    if d < 0:
        raise InfeasibleParameters(f"hypercube needs d >= 0, got {d}")
    n = 1 << d
    return build_graph(n, [(v, v ^ (1 << i)) for v in range(n) for i in range(d) if v < v ^ (1 << i)])


def random_bipartite_regular(n: int, degree: int, seed: int, max_attempts: int = 1000) -> Graph:
    """Union of ``degree`` uniformly random perfect matchings between the two
    halves {0..n/2-1} and {n/2..n-1}, rejected and redrawn until simple."""
    if n <= 0 or n % 2:
        raise InfeasibleParameters(f"n must be positive and even, got {n}")
    half = n // 2
    if not 0 <= degree <= half:
        raise InfeasibleParameters(f"degree must lie in 0..{half}, got {degree}")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        edges = set()
        for _ in range(degree):
            perm = rng.permutation(half)
            edges.update((i, half + int(perm[i])) for i in range(half))
        if len(edges) == degree * half:
            return build_graph(n, sorted(edges))
    raise RetryBudgetExhausted(f"no simple graph after {max_attempts} attempts")


_FAMILIES = {
    "empty": empty,
    "complete": complete,
    "cycle": cycle,
    "path": path,
    "star": star,
    "complete_bipartite": complete_bipartite,
    "hypercube": hypercube,
    "random_bipartite_regular": random_bipartite_regular,
}


def generate(family: str, *params: int) -> Graph:
    try:
        make = _FAMILIES[family]
    except KeyError:
        raise InfeasibleParameters(f"unknown graph family {family!r}") from None
    return make(*params)


def parse_family(spec: str) -> Graph:
    """Build a graph from a string such as ``cycle:6`` or
    ``random_bipartite_regular:10,3,1``."""
    name, _, args = spec.partition(":")
    params = [int(a) for a in args.split(",") if a.strip()]
    try:
        return generate(name.strip(), *params)
    except TypeError as exc:
        raise InfeasibleParameters(f"bad parameters for {name!r}: {exc}") from None


# ---------------------------------------------------------------------------
# Text format: "n m" then m lines "u v" with u < v
# ---------------------------------------------------------------------------

def dumps(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{u} {w}" for u, w in g.edges())
    return "\n".join(lines) + "\n"


def loads(text: str) -> Graph:
    tokens = text.split()
    if len(tokens) < 2:
        raise GraphError("graph file needs a header 'n m'")
    n, m = int(tokens[0]), int(tokens[1])
    body = tokens[2:]
    if len(body) != 2 * m:
        raise GraphError(f"header announces {m} edges, found {len(body) / 2:g}")
    return build_graph(n, [(int(body[2 * i]), int(body[2 * i + 1])) for i in range(m)])


def load(path_: str | Path) -> Graph:
    return loads(Path(path_).read_text())


def save(g: Graph, path_: str | Path) -> None:
    Path(path_).write_text(dumps(g))
