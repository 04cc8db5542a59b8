"""Alpha-discounted random walks, Monte Carlo estimates, and trial sizing.

A walk terminates with probability ``alpha`` BEFORE each step (so a
zero-step walk ending at its start is possible) and otherwise moves to a
uniformly random out-neighbor.  The empirical distribution of walk
terminals is an unbiased estimate of personalized PageRank.

Stream-splitting rule
---------------------
All randomness derives from ``numpy.random.SeedSequence``.  A run with
seed ``S`` owns the root sequence ``SeedSequence(S)``; the substream for
role ``r`` and index ``i`` is ``SeedSequence(S, spawn_key=(r, i))``.
Role 0 is the first-pass estimate, role 1 holds one substream per trial
index, role 2 is source sampling.  Walks within one engine are drawn
sequentially from the engine's generator in walk-index order, and batched
draws consume the generator in a fixed round order, so results are
byte-for-byte reproducible for a given seed regardless of wall clock or
host.  Walk batches may be sharded across workers only by giving each
shard its own substream index and merging in shard order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import AliasTable, Graph

__all__ = [
    "WalkEngine",
    "SparseEstimate",
    "simulate_walk",
    "monte_carlo",
    "monte_carlo_from_distribution",
    "lower_median",
    "phase1_walk_count",
    "trial_count",
    "chernoff_bound",
]

ROLE_FIRST_PASS = 0
ROLE_TRIAL = 1
ROLE_SOURCE = 2


@dataclass
class WalkEngine:
    """Owns the generator and step accounting for one stream of walks."""

    alpha: float
    rng: np.random.Generator
    step_count: int = 0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")

    @classmethod
    def from_seed(cls, alpha: float, seed: int, role: int = 0, index: int = 0) -> "WalkEngine":
        """Engine on the documented substream ``(role, index)`` of ``seed``."""
        ss = np.random.SeedSequence(seed, spawn_key=(role, index))
        return cls(alpha, np.random.Generator(np.random.PCG64(ss)))


def simulate_walk(g: Graph, s: int, engine: WalkEngine) -> int:
    """Run one walk from ``s`` and return its terminal node."""
    if not 0 <= s < g.n:
        raise ValueError(f"source {s} out of range for n={g.n}")
    rng = engine.rng
    cur = s
    while rng.random() >= engine.alpha:
        nbrs = g.out_neighbors(cur)
        cur = int(nbrs[int(rng.integers(len(nbrs)))])
        engine.step_count += 1
    return cur


@dataclass
class SparseEstimate:
    """Sparse node->score map with the bookkeeping of how it was produced.

    Monte Carlo producers fill ``counts`` (terminal tallies) and
    ``n_walks``; every value is then ``counts[v] / n_walks`` and the
    counts sum to ``n_walks`` exactly.  Deterministic producers fill only
    ``values``.  ``cost`` is the work spent building the estimate, in walk
    steps or push updates respectively.
    """

    values: dict[int, float]
    n_walks: int = 0
    counts: dict[int, int] | None = field(default=None, repr=False)
    source: int | None = None
    cost: int = 0

    def __getitem__(self, v: int) -> float:
        return self.values.get(v, 0.0)

    def to_dense(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        for v, x in self.values.items():
            out[v] = x
        return out

    def dense_counts(self, n: int) -> np.ndarray:
        if self.counts is None:
            raise ValueError("estimate has no terminal counts")
        out = np.zeros(n, dtype=np.int64)
        for v, c in self.counts.items():
            out[v] = c
        return out


def _terminal_counts(g: Graph, starts: np.ndarray, engine: WalkEngine) -> np.ndarray:
    """Vectorized batch of walks; returns per-node terminal counts.

    Each round draws one termination uniform and one neighbor uniform per
    surviving walk, in walk order, so the consumed stream is a fixed
    function of the start array and the engine state.
    """
    rng = engine.rng
    alpha = engine.alpha
    indptr, indices = g.out_indptr, g.out_indices
    degs = g.out_degrees
    counts = np.zeros(g.n, dtype=np.int64)
    cur = np.asarray(starts, dtype=np.int64).copy()
    while cur.size:
        stop = rng.random(cur.size) < alpha
        if stop.any():
            counts += np.bincount(cur[stop], minlength=g.n)
            cur = cur[~stop]
        if cur.size == 0:
            break
        d = degs[cur]
        pick = np.minimum((rng.random(cur.size) * d).astype(np.int64), d - 1)
        cur = indices[indptr[cur] + pick]
        engine.step_count += cur.size
    return counts


def _counts_to_estimate(counts: np.ndarray, n_walks: int, source: int | None, cost: int) -> SparseEstimate:
    nz = np.flatnonzero(counts)
    cdict = {int(v): int(counts[v]) for v in nz}
    values = {v: c / n_walks for v, c in cdict.items()}
    return SparseEstimate(values, n_walks, cdict, source, cost)


def monte_carlo(g: Graph, s: int, n_walks: int, engine: WalkEngine) -> SparseEstimate:
    """Terminal frequencies of ``n_walks`` walks from ``s``."""
    if n_walks < 1:
        raise ValueError(f"n_walks must be >= 1, got {n_walks}")
    if not 0 <= s < g.n:
        raise ValueError(f"source {s} out of range for n={g.n}")
    before = engine.step_count
    starts = np.full(n_walks, s, dtype=np.int64)
    counts = _terminal_counts(g, starts, engine)
    return _counts_to_estimate(counts, n_walks, s, engine.step_count - before)


def monte_carlo_from_distribution(
    g: Graph, table: AliasTable, n_walks: int, engine: WalkEngine
) -> SparseEstimate:
    """Terminal frequencies of walks whose starts are drawn from ``table``.

    The table must index nodes ``0..n-1``; starts are drawn first (one
    batch), then all walks are advanced together.
    """
    if n_walks < 1:
        raise ValueError(f"n_walks must be >= 1, got {n_walks}")
    if len(table.prob) != g.n:
        raise ValueError(f"alias table covers {len(table.prob)} entries, graph has n={g.n}")
    before = engine.step_count
    starts = table.sample_array(engine.rng, n_walks)
    counts = _terminal_counts(g, starts, engine)
    return _counts_to_estimate(counts, n_walks, None, engine.step_count - before)


# ---------------------------------------------------------------------------
# aggregation helpers
# ---------------------------------------------------------------------------


def lower_median(values) -> float:
    """The ceil(k/2)-th smallest of k values (no interpolation)."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("lower_median of empty sequence")
    k = (arr.size - 1) // 2
    return float(np.partition(arr, k)[k])


def phase1_walk_count(n: int, eps: float) -> int:
    """Walks needed for the candidate-finding pass: ceil(12 ln(2 n^3) / eps)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return math.ceil(12.0 * math.log(2.0 * n**3) / eps)


def trial_count(n: int) -> int:
    """Independent trials for median amplification: ceil(18 ln(2 n^2))."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return math.ceil(18.0 * math.log(2.0 * n**2))


def chernoff_bound(lam: float, k: int, mu: float, r: float = 1.0) -> float:
    """Upper bound on P[|mean of k iid samples in [0, r] - mu| >= lam]."""
    if lam <= 0 or k < 1 or r <= 0 or mu < 0:
        raise ValueError("need lam > 0, k >= 1, r > 0, mu >= 0")
    return 2.0 * math.exp(-(lam**2) * k / (2.0 * r * (mu + lam / 3.0)))
