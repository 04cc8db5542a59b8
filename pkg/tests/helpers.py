"""Shared graph builders and the batched oracle for the test suite."""
from __future__ import annotations

import math

import numpy as np

from skppr import Graph


def random_graph(n: int, rng: np.random.Generator, directed: bool = True, avg_deg: float = 3.0) -> Graph:
    """Random graph with every out-degree >= 1 (symmetrized when undirected)."""
    p = min(1.0, avg_deg / max(n - 1, 1))
    adj = rng.random((n, n)) < p
    np.fill_diagonal(adj, False)
    if not directed:
        adj = adj | adj.T
    for v in range(n):  # patch sinks with one random out-arc
        if not adj[v].any():
            w = (v + 1 + int(rng.integers(n - 1))) % n
            adj[v, w] = True
            if not directed:
                adj[w, v] = True
    return Graph.from_arcs(n, np.argwhere(adj), is_undirected=not directed)


def cycle_graph(n: int, directed: bool = True) -> Graph:
    arcs = [(i, (i + 1) % n) for i in range(n)]
    if not directed:
        arcs += [((i + 1) % n, i) for i in range(n)]
    return Graph.from_arcs(n, np.array(arcs, dtype=np.int64), is_undirected=not directed)


def exact_matrix(g: Graph, alpha: float = 0.2, tol: float = 1e-10) -> np.ndarray:
    """All-pairs oracle scores with M[s, t] = pi(s, t).

    Runs the same truncated iteration as the per-source oracle on all
    source columns at once; columns match exact_ssppr bit for bit.
    """
    k = max(1, math.ceil(math.log(tol) / math.log(1.0 - alpha)))
    pt = g.transition_T
    x = np.zeros((g.n, g.n))
    e = alpha * np.eye(g.n)
    for _ in range(k):
        x = e + (1.0 - alpha) * (pt @ x)
    return x.T
