"""Input validation helpers shared by the estimator layer and the CLI."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .graphs import Graph

__all__ = ["as_graph", "check_node", "check_unit_open", "check_positive"]


def as_graph(X, undirected: bool | None = None) -> Graph:
    """Coerce supported inputs into a :class:`Graph`.

    Accepts a :class:`Graph` (returned as-is), a scipy sparse adjacency
    matrix, or a square 2-d numpy array; nonzero ``A[u, v]`` means an arc
    ``u -> v``.  ``undirected`` overrides mode detection; the default
    marks the graph undirected when the nonzero pattern is symmetric.
    """
    if isinstance(X, Graph):
        if undirected and not X.is_undirected:
            raise ValueError("graph is directed but undirected input was required")
        return X
    if sp.issparse(X):
        A = X.tocoo()
    elif isinstance(X, np.ndarray):
        if X.ndim != 2 or X.shape[0] != X.shape[1]:
            raise ValueError(f"adjacency array must be square 2-d, got shape {X.shape}")
        A = sp.coo_matrix(X)
    else:
        raise TypeError(f"cannot interpret {type(X).__name__} as a graph; pass a Graph, sparse matrix, or 2-d array")
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"adjacency matrix must be square, got shape {A.shape}")
    n = A.shape[0]
    mask = A.data != 0
    arcs = np.column_stack([A.row[mask], A.col[mask]]).astype(np.int64)
    if undirected is None:
        csr = sp.csr_matrix((np.ones(len(arcs)), (arcs[:, 0], arcs[:, 1])), shape=(n, n))
        undirected = (csr != csr.T).nnz == 0
    elif undirected:
        have = set(map(tuple, arcs.tolist()))
        for u, v in have:
            if (v, u) not in have:
                raise ValueError(f"arc ({u}, {v}) has no reverse; not an undirected adjacency")
    return Graph.from_arcs(n, arcs, is_undirected=bool(undirected))


def check_node(g: Graph, v, name: str = "node") -> int:
    iv = int(v)
    if iv != v or not 0 <= iv < g.n:
        raise ValueError(f"{name} must be an integer in [0, {g.n}), got {v!r}")
    return iv


def check_unit_open(x: float, name: str) -> float:
    x = float(x)
    if not 0.0 < x < 1.0:
        raise ValueError(f"{name} must be in (0, 1), got {x}")
    return x


def check_positive(x: float, name: str) -> float:
    x = float(x)
    if x <= 0.0:
        raise ValueError(f"{name} must be positive, got {x}")
    return x
