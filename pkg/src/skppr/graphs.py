"""Compressed sparse graph container, edge-list IO, and graph generators.

The walk, push, and query modules all operate on :class:`Graph`, an
immutable pair of CSR adjacency structures (arcs grouped by source and,
transposed, by target).  Node ids are dense integers ``0..n-1``; external
ids from input files are kept in an id map.  Every node must have
out-degree at least one so that random walks never get stuck.
"""
from __future__ import annotations

import io
from functools import cached_property
from typing import IO, Iterable, Iterator

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Graph",
    "GraphError",
    "EdgeListFormatError",
    "GraphValidationError",
    "load_edge_list",
    "read_graph",
    "write_graph",
    "write_id_map",
    "read_id_map",
    "generate_power_law",
    "AliasTable",
]


class GraphError(Exception):
    """Base class for graph construction and IO failures."""


class EdgeListFormatError(GraphError):
    """A line of edge-list input could not be parsed."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class GraphValidationError(GraphError):
    """The arc set violates a structural requirement."""


# ---------------------------------------------------------------------------
# core container
# ---------------------------------------------------------------------------


class Graph:
    """Immutable directed graph in dual CSR form.

    Parameters
    ----------
    out_indptr, out_indices : ndarray
        CSR arrays of arcs grouped by source node, targets sorted
        ascending within each row.
    in_indptr, in_indices : ndarray
        The exact transpose: arcs grouped by target node.
    is_undirected : bool
        True when every arc has its reverse present; undirected edges are
        stored as two opposing arcs, except self-loops which are a single
        arc contributing 1 to the degree.
    ext_ids : ndarray
        ``ext_ids[v]`` is the external id of dense node ``v``.

    Use :meth:`from_arcs` for checked construction; the raw constructor
    trusts its inputs.
    """

    def __init__(
        self,
        out_indptr: np.ndarray,
        out_indices: np.ndarray,
        in_indptr: np.ndarray,
        in_indices: np.ndarray,
        is_undirected: bool,
        ext_ids: np.ndarray,
    ):
        self.out_indptr = out_indptr
        self.out_indices = out_indices
        self.in_indptr = in_indptr
        self.in_indices = in_indices
        self.is_undirected = bool(is_undirected)
        self.ext_ids = ext_ids

    # -- construction -------------------------------------------------------

    @classmethod
    def from_arcs(
        cls,
        n: int,
        arcs: np.ndarray | Iterable[tuple[int, int]],
        *,
        is_undirected: bool,
        ext_ids: np.ndarray | None = None,
        check: bool = True,
    ) -> "Graph":
        """Build a graph from an arc list, collapsing duplicate arcs.

        ``arcs`` must already contain both directions of every undirected
        edge (a self-loop appears once).  Raises
        :class:`GraphValidationError` if any node has out-degree zero.
        """
        arr = np.asarray(list(arcs) if not isinstance(arcs, np.ndarray) else arcs, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise GraphValidationError("arc array must have shape (k, 2)")
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise GraphValidationError("arc endpoint outside 0..n-1")
        if ext_ids is None:
            ext_ids = np.arange(n, dtype=np.int64)
        else:
            ext_ids = np.asarray(ext_ids, dtype=np.int64)

        # collapse duplicates via a lexicographic sort on (src, dst)
        if arr.shape[0]:
            order = np.lexsort((arr[:, 1], arr[:, 0]))
            arr = arr[order]
            keep = np.ones(arr.shape[0], dtype=bool)
            keep[1:] = (arr[1:] != arr[:-1]).any(axis=1)
            arr = arr[keep]

        out_deg = np.bincount(arr[:, 0], minlength=n).astype(np.int64)
        if check and n and out_deg.min() == 0:
            bad = int(ext_ids[int(np.argmin(out_deg))])
            raise GraphValidationError(f"node {bad} has out-degree 0; every node needs at least one out-arc")

        out_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(out_deg, out=out_indptr[1:])
        out_indices = np.ascontiguousarray(arr[:, 1])

        t_order = np.lexsort((arr[:, 0], arr[:, 1]))
        in_deg = np.bincount(arr[:, 1], minlength=n).astype(np.int64)
        in_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(in_deg, out=in_indptr[1:])
        in_indices = np.ascontiguousarray(arr[t_order, 0])

        g = cls(out_indptr, out_indices, in_indptr, in_indices, is_undirected, ext_ids)
        if check and is_undirected:
            g._check_symmetric()
        return g

    def _check_symmetric(self) -> None:
        fwd = set(zip(self.arc_sources().tolist(), self.out_indices.tolist()))
        for u, v in fwd:
            if (v, u) not in fwd:
                raise GraphValidationError(
                    f"arc ({int(self.ext_ids[u])}, {int(self.ext_ids[v])}) has no reverse in undirected graph"
                )

    # -- basic accessors ----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.out_indptr) - 1

    @property
    def m(self) -> int:
        """Number of arcs (an undirected edge counts as two arcs)."""
        return len(self.out_indices)

    @cached_property
    def out_degrees(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    @cached_property
    def in_degrees(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    def out_degree(self, v: int) -> int:
        return int(self.out_indptr[v + 1] - self.out_indptr[v])

    def in_degree(self, v: int) -> int:
        return int(self.in_indptr[v + 1] - self.in_indptr[v])

    def degree(self, v: int) -> int:
        """Degree of ``v`` in an undirected graph (== out-degree)."""
        return self.out_degree(v)

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[v] : self.out_indptr[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[v] : self.in_indptr[v + 1]]

    def arc_sources(self) -> np.ndarray:
        """Source node of every arc, aligned with ``out_indices``."""
        return np.repeat(np.arange(self.n, dtype=np.int64), self.out_degrees)

    # -- matrices -----------------------------------------------------------

    @cached_property
    def transition(self) -> sp.csr_matrix:
        """Row-stochastic transition matrix P with P[u, v] = 1/d_out(u)."""
        data = np.repeat(1.0 / self.out_degrees, self.out_degrees)
        return sp.csr_matrix((data, self.out_indices, self.out_indptr), shape=(self.n, self.n))

    @cached_property
    def transition_T(self) -> sp.csr_matrix:
        """Transpose of :attr:`transition`, rows grouped by arc target."""
        data = 1.0 / self.out_degrees[self.in_indices]
        return sp.csr_matrix((data, self.in_indices, self.in_indptr), shape=(self.n, self.n))

    # -- identity -----------------------------------------------------------

    def arcs_external(self) -> set[tuple[int, int]]:
        """Arc set over external ids (order-free structural identity)."""
        src = self.ext_ids[self.arc_sources()]
        dst = self.ext_ids[self.out_indices]
        return set(zip(src.tolist(), dst.tolist()))

    def structural_equal(self, other: "Graph") -> bool:
        """Same nodes, arcs, and mode over external ids; dense numbering may differ."""
        return (
            self.n == other.n
            and self.is_undirected == other.is_undirected
            and set(self.ext_ids.tolist()) == set(other.ext_ids.tolist())
            and self.arcs_external() == other.arcs_external()
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.is_undirected == other.is_undirected
            and np.array_equal(self.out_indptr, other.out_indptr)
            and np.array_equal(self.out_indices, other.out_indices)
            and np.array_equal(self.ext_ids, other.ext_ids)
        )

    def __hash__(self):  # identity hash; instances are mutated never, compared rarely
        return id(self)

    def __repr__(self) -> str:
        mode = "undirected" if self.is_undirected else "directed"
        return f"Graph(n={self.n}, m={self.m}, {mode})"


# ---------------------------------------------------------------------------
# edge-list IO
# ---------------------------------------------------------------------------
#
# Format: one arc per line, "u v" with non-negative integer external ids,
# whitespace separated; '#' starts a comment line.  The writer prepends a
# "# n=<n> m=<m> mode=<d|u>" header.  Dense ids are assigned in order of
# first appearance in the stream (u before v on each line).


def _iter_lines(source: IO | Iterable[str] | str) -> Iterator[str]:
    if isinstance(source, str):
        yield from io.StringIO(source)
    elif isinstance(source, bytes):
        yield from io.StringIO(source.decode("utf-8"))
    else:
        for line in source:
            yield line.decode("utf-8") if isinstance(line, bytes) else line


def load_edge_list(
    source: IO | Iterable[str] | str,
    mode: str = "directed",
    id_map: dict[int, int] | None = None,
) -> Graph:
    """Parse edge-list text into a :class:`Graph`.

    Parameters
    ----------
    source : file-like, iterable of lines, or str
    mode : {"directed", "undirected"}
        In undirected mode each input line materializes both arc
        directions (a self-loop stays a single arc).
    id_map : dict, optional
        External-to-dense id assignment to use instead of first-appearance
        order.  Reloading a written graph with its written id map
        reproduces the original dense numbering exactly.

    Raises
    ------
    EdgeListFormatError
        On a malformed line (with its 1-based line number).
    GraphValidationError
        If any node ends with out-degree zero, or ``id_map`` is inconsistent.
    """
    if mode not in ("directed", "undirected"):
        raise ValueError(f"mode must be 'directed' or 'undirected', got {mode!r}")
    undirected = mode == "undirected"

    dense: dict[int, int] = {}
    if id_map is not None:
        dense.update((int(k), int(v)) for k, v in id_map.items())
        if sorted(dense.values()) != list(range(len(dense))):
            raise GraphValidationError("id_map dense ids must be exactly 0..n-1")

    def intern(ext: int, line_no: int) -> int:
        d = dense.get(ext)
        if d is None:
            if id_map is not None:
                raise GraphValidationError(f"line {line_no}: node {ext} missing from id_map")
            d = len(dense)
            dense[ext] = d
        return d

    arcs: list[tuple[int, int]] = []
    for line_no, raw in enumerate(_iter_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListFormatError(line_no, f"expected 2 fields, got {len(parts)}")
        try:
            eu, ev = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListFormatError(line_no, f"non-integer node id in {line!r}") from None
        if eu < 0 or ev < 0:
            raise EdgeListFormatError(line_no, "node ids must be non-negative")
        u, v = intern(eu, line_no), intern(ev, line_no)
        arcs.append((u, v))
        if undirected and u != v:
            arcs.append((v, u))

    n = len(dense)
    if n == 0:
        raise GraphValidationError("edge list is empty")
    ext_ids = np.empty(n, dtype=np.int64)
    for ext, d in dense.items():
        ext_ids[d] = ext
    return Graph.from_arcs(n, np.array(arcs, dtype=np.int64), is_undirected=undirected, ext_ids=ext_ids)


def read_graph(path: str, mode: str | None = None) -> Graph:
    """Load a graph file, inferring mode from a ``mode=`` header if present."""
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    if mode is None:
        mode = "directed"
        for line in text.splitlines():
            line = line.strip()
            if line.startswith("#"):
                for tok in line[1:].split():
                    if tok == "mode=u":
                        mode = "undirected"
                    elif tok == "mode=d":
                        mode = "directed"
            elif line:
                break
    return load_edge_list(text, mode)


def write_graph(g: Graph, stream: IO) -> None:
    """Write ``g`` as edge-list text with a ``# n= m= mode=`` header.

    Arcs are emitted in dense CSR order with external ids; an undirected
    graph emits each edge once.  Reloading the output yields a graph
    that is :meth:`Graph.structural_equal` to ``g``; reloading together
    with the output of :func:`write_id_map` reproduces ``g`` exactly.
    """
    mode = "u" if g.is_undirected else "d"
    stream.write(f"# n={g.n} m={g.m} mode={mode}\n")
    src = g.arc_sources()
    for u, v in zip(src.tolist(), g.out_indices.tolist()):
        if g.is_undirected and v < u:
            continue
        stream.write(f"{int(g.ext_ids[u])} {int(g.ext_ids[v])}\n")


def write_id_map(g: Graph, stream: IO) -> None:
    """Write ``external_id<TAB>dense_id`` lines, ordered by dense id."""
    for d in range(g.n):
        stream.write(f"{int(g.ext_ids[d])}\t{d}\n")


def read_id_map(source: IO | Iterable[str] | str) -> dict[int, int]:
    """Read a file written by :func:`write_id_map` into an ext->dense dict."""
    out: dict[int, int] = {}
    for line_no, raw in enumerate(_iter_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListFormatError(line_no, "expected 'external<TAB>dense'")
        out[int(parts[0])] = int(parts[1])
    return out


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def generate_power_law(n: int, attach: int, seed: int) -> Graph:
    """Undirected preferential-attachment graph with heavy-tailed degrees.

    Starts from a single node; each new node attaches to
    ``min(attach, #existing)`` distinct existing nodes chosen with
    probability proportional to current degree.  The result is connected
    with m = Theta(attach * n) arcs, and its external ids equal its dense
    ids.  Deterministic in ``seed``.
    """
    if attach < 1:
        raise ValueError(f"attach must be >= 1, got {attach}")
    if n < attach + 1:
        raise ValueError(f"need n >= attach + 1, got n={n}, attach={attach}")
    rng = np.random.default_rng(seed)
    # endpoint pool holds each node once per incident edge: sampling an
    # entry uniformly == sampling a node proportional to degree
    pool: list[int] = [0]
    arcs: list[tuple[int, int]] = []
    for new in range(1, n):
        k = min(attach, new)
        chosen: list[int] = []
        while len(chosen) < k:
            pick = pool[int(rng.integers(len(pool)))]
            if pick not in chosen:
                chosen.append(pick)
        for t in chosen:
            arcs.append((new, t))
            arcs.append((t, new))
            pool.append(new)
            pool.append(t)
    return Graph.from_arcs(n, np.array(arcs, dtype=np.int64), is_undirected=True)


# ---------------------------------------------------------------------------
# alias sampling
# ---------------------------------------------------------------------------


class AliasTable:
    """Walker alias table for O(1) draws from a fixed discrete distribution.

    Entry ``i`` accepts with probability ``prob[i]`` and otherwise redirects
    to ``alias[i]``; both arrays have one slot per weight.
    """

    def __init__(self, prob: np.ndarray, alias: np.ndarray, total: float):
        self.prob = prob
        self.alias = alias
        self.total = total

    @classmethod
    def from_weights(cls, weights: np.ndarray | Iterable[float]) -> "AliasTable":
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty 1-d array")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and non-negative")
        total = float(w.sum())
        if total <= 0:
            raise ValueError("at least one weight must be positive")
        k = w.size
        scaled = w * (k / total)
        prob = np.ones(k, dtype=np.float64)
        alias = np.arange(k, dtype=np.int64)
        small = [i for i in range(k) if scaled[i] < 1.0]
        large = [i for i in range(k) if scaled[i] >= 1.0]
        scaled = scaled.copy()
        while small and large:
            s = small.pop()
            l = large.pop()
            prob[s] = scaled[s]
            alias[s] = l
            scaled[l] = (scaled[l] + scaled[s]) - 1.0
            (small if scaled[l] < 1.0 else large).append(l)
        for i in large:
            prob[i] = 1.0
        for i in small:  # only reachable through rounding; weight is ~1
            prob[i] = 1.0
        return cls(prob, alias, total)

    def sample(self, rng: np.random.Generator) -> int:
        i = int(rng.integers(len(self.prob)))
        return i if rng.random() < self.prob[i] else int(self.alias[i])

    def sample_array(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = rng.integers(0, len(self.prob), size=size)
        accept = rng.random(size) < self.prob[idx]
        return np.where(accept, idx, self.alias[idx]).astype(np.int64)

    def implied_distribution(self) -> np.ndarray:
        """Exact per-entry probability realized by the table."""
        k = len(self.prob)
        p = self.prob.copy()
        np.add.at(p, self.alias, 1.0 - self.prob)
        return p / k
