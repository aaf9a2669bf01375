"""Directed communication graphs.

Nodes are numbered ``1..n``. An edge ``(i, j)`` means agent ``j`` can send to
agent ``i``. Every node carries a self-loop, so ``i`` is always its own in- and
out-neighbour.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class Digraph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InputError(f"n must be a positive integer, got {self.n!r}")
        cleaned = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise InputError(f"edge ({i}, {j}) out of range for n={self.n}")
            cleaned.add((i, j))
        cleaned.update((i, i) for i in range(1, self.n + 1))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", frozenset(cleaned))

    def _check(self, i):
        if not 1 <= i <= self.n:
            raise InputError(f"node id {i} out of range [1, {self.n}]")

    def in_neighbors(self, i: int) -> list[int]:
        """Agents that send to ``i`` (``i`` included), ascending."""
        self._check(i)
        return sorted(j for (r, j) in self.edges if r == i)

    def out_neighbors(self, j: int) -> list[int]:
        """Agents that receive from ``j`` (``j`` included), ascending."""
        self._check(j)
        return sorted(r for (r, s) in self.edges if s == j)

    def in_degree(self, i: int) -> int:
        return len(self.in_neighbors(i))

    def out_degree(self, j: int) -> int:
        return len(self.out_neighbors(j))

    @property
    def num_links(self) -> int:
        """Number of edges excluding self-loops."""
        return sum(1 for i, j in self.edges if i != j)

    def adjacency(self) -> np.ndarray:
        """Boolean matrix with ``adj[i-1, j-1]`` true iff ``j`` sends to ``i``."""
        adj = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.edges:
            adj[i - 1, j - 1] = True
        return adj

    def is_strongly_connected(self) -> bool:
        return is_strongly_connected(self)

    def is_balanced(self) -> bool:
        adj = self.adjacency()
        return bool(np.all(adj.sum(axis=0) == adj.sum(axis=1)))

    def symmetrized(self) -> Digraph:
        """Undirected version: every link made bidirectional."""
        return Digraph(self.n, frozenset(self.edges | {(j, i) for i, j in self.edges}))


def _reaches_all(adj: np.ndarray) -> bool:
    # BFS from node 0 along adj[row] -> columns
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(adj[u] & ~seen):
            seen[v] = True
            queue.append(v)
    return bool(seen.all())


def is_strongly_connected(g: Digraph) -> bool:
    """True iff every node reaches every other node along directed edges.

    Two reachability passes from node 1: one along the sending direction and
    one along the receiving direction.
    """
    adj = g.adjacency()  # adj[i, j]: j -> i
    return _reaches_all(adj.T) and _reaches_all(adj)


def in_neighbors(g: Digraph, i: int) -> list[int]:
    return g.in_neighbors(i)


def out_neighbors(g: Digraph, i: int) -> list[int]:
    return g.out_neighbors(i)


def cycle(n: int) -> Digraph:
    """Directed ring 1 -> 2 -> ... -> n -> 1."""
    return Digraph(n, frozenset((j % n + 1, j) for j in range(1, n + 1)))


def path(n: int) -> Digraph:
    """Directed path 1 -> 2 -> ... -> n; not strongly connected for n > 1."""
    return Digraph(n, frozenset((j + 1, j) for j in range(1, n)))


def complete(n: int) -> Digraph:
    return Digraph(n, frozenset((i, j) for i in range(1, n + 1) for j in range(1, n + 1)))


def random_strongly_connected(n: int, extra_edge_prob: float, seed=None) -> Digraph:
    """Random Hamiltonian directed cycle plus independent extra links.

    Each ordered pair not on the cycle is added with probability
    ``extra_edge_prob``. The cycle guarantees strong connectivity; the result is
    generally not balanced.
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if not 0.0 <= extra_edge_prob <= 1.0:
        raise InputError(f"extra_edge_prob must lie in [0, 1], got {extra_edge_prob}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n) + 1
    edges = {(int(order[(k + 1) % n]), int(order[k])) for k in range(n)}
    draws = rng.random((n, n))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j and (i, j) not in edges and draws[i - 1, j - 1] < extra_edge_prob:
                edges.add((i, j))
    return Digraph(n, frozenset(edges))


def parse_edge_list(text: str) -> Digraph:
    """Parse the edge-list format: first line ``n``, then ``i j`` lines (j -> i).

    ``#`` starts a comment; blank lines are ignored; self-loops are implicit.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise InputError("edge list is empty: expected node count on first line")
    lineno, head = rows[0]
    if len(head) != 1:
        raise InputError(f"line {lineno}: expected a single node count, got {' '.join(head)!r}")
    try:
        n = int(head[0])
    except ValueError:
        raise InputError(f"line {lineno}: node count {head[0]!r} is not an integer") from None
    edges = set()
    for lineno, parts in rows[1:]:
        if len(parts) != 2:
            raise InputError(f"line {lineno}: expected 'i j', got {' '.join(parts)!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise InputError(f"line {lineno}: node ids must be integers") from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise InputError(f"line {lineno}: edge ({i}, {j}) out of range for n={n}")
        edges.add((i, j))
    return Digraph(n, frozenset(edges))


def load_edge_list(path: str | Path) -> Digraph:
    return parse_edge_list(Path(path).read_text())


def format_edge_list(g: Digraph) -> str:
    lines = [str(g.n)]
    lines += [f"{i} {j}" for i, j in sorted(g.edges) if i != j]
    return "\n".join(lines) + "\n"
