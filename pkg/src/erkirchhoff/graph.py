"""Unweighted simple graphs, Laplacians, connectivity and hop distances.

Graphs are held as dense boolean adjacency matrices. Disconnection is
reported with :data:`INF` (``math.inf``), never with a large finite number.
"""

import math
import os
from collections import deque
from dataclasses import dataclass

import numpy as np

from ._validation import ContractError, check_adjacency, check_node_count

INF = math.inf


class EdgeListError(ValueError):
    """Malformed edge-list input. ``lineno`` is 1-based, or None."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on nodes ``0 .. n-1``.

    The adjacency matrix is copied on construction and made read-only, so
    a ``Graph`` can be shared freely between threads.
    """

    adjacency: np.ndarray

    def __post_init__(self):
        a = check_adjacency(self.adjacency).copy()
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @property
    def n(self):
        return self.adjacency.shape[0]

    @property
    def n_edges(self):
        return int(np.count_nonzero(np.triu(self.adjacency, 1)))

    def edges(self):
        """Edges as an ``(m, 2)`` integer array with ``i < j``, in lexicographic order."""
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return np.column_stack([i, j]).astype(np.intp)

    def degrees(self):
        return self.adjacency.sum(axis=1).astype(np.int64)

    def relabel(self, permutation):
        """Return the graph with node ``k`` renamed to ``permutation[k]``."""
        perm = np.asarray(permutation, dtype=np.intp)
        if sorted(perm.tolist()) != list(range(self.n)):
            raise ContractError("permutation must be a rearrangement of 0..n-1")
        inv = np.argsort(perm)
        return Graph(self.adjacency[np.ix_(inv, inv)])

    def with_edge(self, i, j):
        a = self.adjacency.copy()
        a[i, j] = a[j, i] = True
        return Graph(a)

    @classmethod
    def from_edges(cls, n, edges):
        n = check_node_count(n)
        a = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ContractError(f"self-loop at node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ContractError(f"edge ({i}, {j}) out of range for n={n}")
            a[i, j] = a[j, i] = True
        return cls(a)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self):
        return hash((self.n, np.packbits(self.adjacency).tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, n_edges={self.n_edges})"


def empty_graph(n):
    n = check_node_count(n)
    return Graph(np.zeros((n, n), dtype=bool))


def complete_graph(n):
    n = check_node_count(n)
    return Graph(~np.eye(n, dtype=bool))


def path_graph(n):
    n = check_node_count(n)
    return Graph.from_edges(n, [(k, k + 1) for k in range(n - 1)])


def build_laplacian(g):
    """Combinatorial Laplacian ``D - A`` as a float64 array.

    Entries are small integers, so row sums are exactly zero.
    """
    a = g.adjacency.astype(np.float64)
    lap = -a
    np.fill_diagonal(lap, a.sum(axis=1))
    return lap


def _bfs_levels(adjacency, source):
    """Hop distance from ``source`` to every node; -1 where unreachable."""
    n = adjacency.shape[0]
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.zeros(n, dtype=bool)
    frontier[source] = True
    level = 0
    while frontier.any():
        level += 1
        reached = adjacency[frontier].any(axis=0) & (dist < 0)
        dist[reached] = level
        frontier = reached
    return dist


def is_connected(g):
    """True iff breadth-first search from node 0 reaches every node."""
    return bool(np.all(_bfs_levels(g.adjacency, 0) >= 0))


def connected_components(g):
    """List of node-index arrays, one per connected component."""
    n = g.n
    seen = np.zeros(n, dtype=bool)
    components = []
    for start in range(n):
        if seen[start]:
            continue
        comp = []
        queue = deque([start])
        seen[start] = True
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in np.flatnonzero(g.adjacency[u]):
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        components.append(np.array(sorted(comp), dtype=np.intp))
    return components


def shortest_path_distances(g):
    """All-pairs hop counts as a float array, with :data:`INF` for unreachable pairs."""
    n = g.n
    out = np.empty((n, n), dtype=np.float64)
    for s in range(n):
        d = _bfs_levels(g.adjacency, s).astype(np.float64)
        d[d < 0] = INF
        out[s] = d
    return out


def wiener_index(g):
    """Sum of hop distances over unordered node pairs; :data:`INF` if disconnected."""
    d = shortest_path_distances(g)
    upper = d[np.triu_indices(g.n, 1)]
    if np.isinf(upper).any():
        return INF
    return float(upper.sum())


def parse_edgelist(lines):
    """Parse the ``n=<count>`` / ``i j`` edge-list format.

    Blank lines and lines starting with ``#`` are ignored. Nodes are
    0-indexed and every pair must be written with ``i < j`` exactly once.
    """
    n = None
    edges = []
    seen = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            key, sep, value = line.partition("=")
            if not sep or key.strip() != "n":
                raise EdgeListError(f"expected header 'n=<count>', got {line!r}", lineno)
            try:
                n = int(value.strip())
            except ValueError:
                raise EdgeListError(f"node count is not an integer: {value.strip()!r}", lineno) from None
            if n < 2:
                raise EdgeListError(f"node count must be >= 2, got {n}", lineno)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListError(f"expected 'i j', got {line!r}", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(f"node ids must be integers, got {line!r}", lineno) from None
        if not (0 <= i < j < n):
            raise EdgeListError(f"pair ({i}, {j}) must satisfy 0 <= i < j < {n}", lineno)
        if (i, j) in seen:
            raise EdgeListError(f"duplicate edge ({i}, {j})", lineno)
        seen.add((i, j))
        edges.append((i, j))
    if n is None:
        raise EdgeListError("missing 'n=<count>' header")
    return Graph.from_edges(n, edges)


def read_edgelist(path):
    with open(path, encoding="utf-8") as fh:
        return parse_edgelist(fh)


def format_edgelist(g):
    lines = [f"n={g.n}"]
    lines.extend(f"{i} {j}" for i, j in g.edges())
    return "\n".join(lines) + "\n"


def write_edgelist(g, path):
    with open(os.fspath(path), "w", encoding="utf-8") as fh:
        fh.write(format_edgelist(g))
