"""Single-source query engines with absolute and degree-normalized error.

Both engines run three phases:

1. a cheap first pass finds every target whose score can exceed the error
   budget (the candidate set) together with rough score estimates;
2. backward pushes precompute, per candidate, a reserve/residue pair whose
   depth is balanced against the cost of the walk phase by repeated
   halving under a shared work budget;
3. independent Monte Carlo trials are combined with each candidate's
   residues and aggregated by lower median.

The absolute-error engine guarantees ``max_t |est(t) - pi(s, t)| <= eps``
with probability at least ``1 - 1/n``; the degree-normalized engine
(undirected graphs only) guarantees the same for
``|est(t) - pi(s, t)| / d(t) <= eps_d``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import IO, Callable, Mapping

import numpy as np

from .exact import exact_ssppr
from .graphs import Graph
from .push import Budget, BudgetExceeded, PushResult, backward_push
from .walks import (
    ROLE_FIRST_PASS,
    ROLE_TRIAL,
    SparseEstimate,
    WalkEngine,
    lower_median,
    monte_carlo,
    phase1_walk_count,
    trial_count,
)

__all__ = [
    "QueryParams",
    "QueryDiagnostics",
    "QueryAnswer",
    "ssppr_a",
    "ssppr_d",
    "adaptive_backward_push",
    "AdaptivePushOutcome",
    "combine_estimate",
    "rbs_estimate",
    "median_trick_apply",
    "write_answer",
]


@dataclass
class QueryParams:
    """Knobs shared by both query engines.

    Exactly one of ``eps`` (absolute error) or ``eps_d``
    (degree-normalized error) must be set, matching the engine called.
    ``c_walk`` scales the walk-cost currency used by the balancing budget
    (one walk is charged ``c_walk / alpha`` cost units).  When
    ``fallback_enabled`` is set, a query whose accounted cost exceeds
    ``fallback_factor * n^2`` switches to the exact oracle.
    """

    alpha: float = 0.2
    eps: float | None = None
    eps_d: float | None = None
    seed: int = 0
    c_walk: float = 1.0
    fallback_enabled: bool = False
    fallback_factor: float = 4.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.eps is not None and self.eps <= 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.eps_d is not None and self.eps_d <= 0:
            raise ValueError(f"eps_d must be positive, got {self.eps_d}")
        if self.c_walk <= 0:
            raise ValueError(f"c_walk must be positive, got {self.c_walk}")
        if self.fallback_factor <= 0:
            raise ValueError(f"fallback_factor must be positive, got {self.fallback_factor}")


@dataclass
class QueryDiagnostics:
    """Cost and sizing record of one query run."""

    algorithm: str
    n: int
    source: int
    seed: int
    alpha: float
    eps: float
    phase1_cost: int = 0
    phase2_cost: int = 0
    phase3_cost: int = 0
    n_r0: int = 0
    n_r: int = 0
    n_t: int = 0
    n_candidates: int = 0
    iterations: int = 0
    budget_break: bool = False
    fallback: bool = False
    trivial: bool = False

    @property
    def total_cost(self) -> int:
        return self.phase1_cost + self.phase2_cost + self.phase3_cost

    def to_json(self) -> str:
        d = asdict(self)
        d["total_cost"] = self.total_cost
        return json.dumps(d, sort_keys=True)


@dataclass
class QueryAnswer:
    """Sparse estimates (keys are the candidate set) plus diagnostics.

    Non-candidates are implicitly zero.  After an oracle fallback the
    support is the exact score support instead of a candidate set.
    """

    estimates: dict[int, float]
    diagnostics: QueryDiagnostics

    def score(self, v: int) -> float:
        return self.estimates.get(v, 0.0)

    @property
    def candidates(self) -> set[int]:
        return set(self.estimates)

    def to_dense(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        for v, x in self.estimates.items():
            out[v] = x
        return out


def write_answer(answer: QueryAnswer, stream: IO) -> None:
    """TSV export ``node<TAB>estimate`` sorted by node id, zeros omitted."""
    for v in sorted(answer.estimates):
        x = answer.estimates[v]
        if x != 0.0:
            stream.write(f"{v}\t{x!r}\n")


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------


def combine_estimate(push: PushResult, mc: SparseEstimate) -> float:
    """One trial's score estimate: q(s, t) + sum_v mc(v) * r(v, t).

    ``mc`` must be a single-source estimate over the same graph and alpha
    as ``push``; unbiased whenever ``mc`` is unbiased for pi(s, .).
    """
    if mc.source is None:
        raise ValueError("combine_estimate needs a single-source Monte Carlo estimate")
    acc = push.reserves.get(mc.source, 0.0)
    values = mc.values
    for u, r in push.residues.items():
        x = values.get(u)
        if x is not None:
            acc += x * r
    return acc


RbsProvider = Callable[[Graph, float, int, float, float, float], SparseEstimate]


def rbs_estimate(
    g: Graph,
    alpha: float,
    t: int,
    eps_r: float,
    delta: float,
    p_f: float,
    provider: RbsProvider | None = None,
) -> SparseEstimate:
    """Estimate pi(., t) with relative error ``eps_r`` above floor ``delta``.

    Contract (with probability at least ``1 - p_f``): for every v with
    ``pi(v, t) >= delta`` the estimate is within ``eps_r * pi(v, t)``;
    every other v gets an estimate at most ``pi(v, t) + delta``.

    The default provider runs a deterministic backward push at
    ``r_max = eps_r * delta``, which meets both clauses with probability 1
    (``p_f`` is accepted for interface compatibility).  A different
    ``provider`` with the same contract may be substituted.
    """
    if not 0.0 < eps_r < 1.0:
        raise ValueError(f"eps_r must be in (0, 1), got {eps_r}")
    if delta <= 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    if not 0.0 < p_f < 1.0:
        raise ValueError(f"p_f must be in (0, 1), got {p_f}")
    if provider is not None:
        return provider(g, alpha, t, eps_r, delta, p_f)
    res = backward_push(g, alpha, t, eps_r * delta)
    return SparseEstimate(dict(res.reserves), n_walks=0, counts=None, source=None, cost=res.cost)


@dataclass
class AdaptivePushOutcome:
    """Result of the budget-balanced halving loop plus the final pushes."""

    pushes: dict[int, PushResult]
    n_r: int
    iterations: int
    probe_cost: int
    final_cost: int
    budget_break: bool


def adaptive_backward_push(
    g: Graph,
    alpha: float,
    r_max0: Mapping[int, float],
    n_r0: int,
    n_t: int,
    c_walk: float = 1.0,
) -> AdaptivePushOutcome:
    """Balance push depth against walk volume by repeated halving.

    Each iteration probes all targets at half their current threshold
    under a shared budget of ``ceil(c_walk * n_t * (n_r / 2) / alpha)``
    cost units, the expected cost of the walk phase after one more
    halving.  A completed iteration halves ``n_r`` and every threshold; a
    budget break leaves them as they are and ends the loop, as does
    ``n_r`` reaching 1 (it never drops below 1).  Probe results are
    discarded; the returned pushes are rerun at the final thresholds
    without a budget.
    """
    if n_r0 < 1:
        raise ValueError(f"n_r0 must be >= 1, got {n_r0}")
    if n_t < 1:
        raise ValueError(f"n_t must be >= 1, got {n_t}")
    if c_walk <= 0:
        raise ValueError(f"c_walk must be positive, got {c_walk}")
    n_r = n_r0
    r_max = {int(t): float(r) for t, r in r_max0.items()}
    targets = sorted(r_max)
    iterations = 0
    probe_cost = 0
    broke = False
    if targets:
        while True:
            iterations += 1
            budget = Budget(limit=math.ceil(c_walk * n_t * (n_r / 2.0) / alpha))
            try:
                for t in targets:
                    backward_push(g, alpha, t, r_max[t] / 2.0, budget=budget)
            except BudgetExceeded:
                broke = True
            probe_cost += budget.spent
            if broke:
                break
            if n_r == 1:
                break
            n_r //= 2
            for t in targets:
                r_max[t] /= 2.0
    pushes: dict[int, PushResult] = {}
    final_cost = 0
    for t in targets:
        res = backward_push(g, alpha, t, r_max[t])
        pushes[t] = res
        final_cost += res.cost
    return AdaptivePushOutcome(pushes, n_r, iterations, probe_cost, final_cost, broke)


def median_trick_apply(trials: Mapping[int, "np.ndarray | list[float]"]) -> dict[int, float]:
    """Lower median per key; all keys must have the same trial count."""
    lengths = {len(v) for v in trials.values()}
    if len(lengths) > 1:
        raise ValueError(f"ragged trial table: lengths {sorted(lengths)}")
    return {int(t): lower_median(v) for t, v in sorted(trials.items())}


# ---------------------------------------------------------------------------
# query engines
# ---------------------------------------------------------------------------


def _check_query(g: Graph, s: int) -> None:
    if not 0 <= s < g.n:
        raise ValueError(f"source {s} out of range for n={g.n}")


def _fallback_answer(g: Graph, s: int, params: QueryParams, diag: QueryDiagnostics) -> QueryAnswer:
    diag.fallback = True
    scores = exact_ssppr(g, s, params.alpha).scores
    estimates = {int(v): float(scores[v]) for v in np.flatnonzero(scores)}
    return QueryAnswer(estimates, diag)


def _phases_two_three(
    g: Graph,
    s: int,
    params: QueryParams,
    diag: QueryDiagnostics,
    r_max0: dict[int, float],
    n_r0: int,
    n_t: int,
    cost_cap: float | None,
) -> QueryAnswer:
    adaptive = adaptive_backward_push(g, params.alpha, r_max0, n_r0, n_t, params.c_walk)
    diag.phase2_cost = adaptive.probe_cost + adaptive.final_cost
    diag.n_r = adaptive.n_r
    diag.iterations = adaptive.iterations
    diag.budget_break = adaptive.budget_break
    if cost_cap is not None and diag.total_cost > cost_cap:
        return _fallback_answer(g, s, params, diag)

    targets = sorted(r_max0)
    res_nodes = {}
    res_vals = {}
    q_source = {}
    for t in targets:
        push = adaptive.pushes[t]
        res_nodes[t] = np.fromiter(push.residues.keys(), dtype=np.int64, count=len(push.residues))
        res_vals[t] = np.fromiter(push.residues.values(), dtype=np.float64, count=len(push.residues))
        q_source[t] = push.reserves.get(s, 0.0)

    n_r = adaptive.n_r
    trials = {t: np.empty(n_t) for t in targets}
    for i in range(n_t):
        engine = WalkEngine.from_seed(params.alpha, params.seed, ROLE_TRIAL, i)
        est = monte_carlo(g, s, n_r, engine)
        diag.phase3_cost += est.cost
        counts = est.dense_counts(g.n).astype(np.float64)
        for t in targets:
            trials[t][i] = q_source[t] + float(counts[res_nodes[t]] @ res_vals[t]) / n_r
        if cost_cap is not None and diag.total_cost > cost_cap:
            return _fallback_answer(g, s, params, diag)
    return QueryAnswer(median_trick_apply(trials), diag)


def ssppr_a(g: Graph, s: int, params: QueryParams) -> QueryAnswer:
    """Absolute-error single-source query.

    With probability at least ``1 - 1/n``, every node's estimate is
    within ``params.eps`` of its true score (non-candidates count as
    zero estimates).
    """
    _check_query(g, s)
    if params.eps is None:
        raise ValueError("params.eps must be set for the absolute-error engine")
    eps = params.eps
    n = g.n
    diag = QueryDiagnostics("ssppr-a", n, s, params.seed, params.alpha, eps)
    if eps >= 1.0:
        # every score lies in [0, 1], so the zero vector already satisfies it
        diag.trivial = True
        return QueryAnswer({}, diag)
    cost_cap = params.fallback_factor * n * n if params.fallback_enabled else None

    engine = WalkEngine.from_seed(params.alpha, params.seed, ROLE_FIRST_PASS)
    first = monte_carlo(g, s, phase1_walk_count(n, eps), engine)
    diag.phase1_cost = first.cost
    if cost_cap is not None and diag.total_cost > cost_cap:
        return _fallback_answer(g, s, params, diag)

    cand = {t: v for t, v in first.values.items() if v > eps / 2.0}
    diag.n_candidates = len(cand)
    if not cand:
        return QueryAnswer({}, diag)

    n_r0 = math.ceil(n / eps)
    n_t = trial_count(n)
    diag.n_r0 = n_r0
    diag.n_t = n_t
    r_max0 = {t: eps * eps * n_r0 / (6.0 * v) for t, v in cand.items()}
    return _phases_two_three(g, s, params, diag, r_max0, n_r0, n_t, cost_cap)


def ssppr_d(g: Graph, s: int, params: QueryParams) -> QueryAnswer:
    """Degree-normalized single-source query (undirected graphs only).

    With probability at least ``1 - 1/n``, every node's estimate is
    within ``params.eps_d * d(t)`` of its true score.
    """
    _check_query(g, s)
    if params.eps_d is None:
        raise ValueError("params.eps_d must be set for the degree-normalized engine")
    if not g.is_undirected:
        raise ValueError("degree-normalized queries require an undirected graph")
    eps_d = params.eps_d
    n = g.n
    diag = QueryDiagnostics("ssppr-d", n, s, params.seed, params.alpha, eps_d)
    if eps_d >= 1.0:
        # pi(s, t) <= 1 <= d(t) for every node, so zero estimates suffice
        diag.trivial = True
        return QueryAnswer({}, diag)
    cost_cap = params.fallback_factor * n * n if params.fallback_enabled else None

    deg = g.out_degrees
    d_s = float(deg[s])
    # reverse-direction first pass: estimate pi(., s), then flip with the
    # undirected symmetry pi(s, v) = pi(v, s) * d(v) / d(s)
    reverse = rbs_estimate(g, params.alpha, s, 0.5, eps_d * d_s / 4.0, min(0.5, 1.0 / (n * n)))
    diag.phase1_cost = reverse.cost
    if cost_cap is not None and diag.total_cost > cost_cap:
        return _fallback_answer(g, s, params, diag)

    first = {int(v): q * float(deg[v]) / d_s for v, q in reverse.values.items()}
    cand = {t: v for t, v in first.items() if v / float(deg[t]) > eps_d / 2.0}
    diag.n_candidates = len(cand)
    if not cand:
        return QueryAnswer({}, diag)

    n_r0 = math.ceil(n / eps_d)
    n_t = trial_count(n)
    diag.n_r0 = n_r0
    diag.n_t = n_t
    r_max0 = {t: float(deg[t]) ** 2 * eps_d * eps_d * n_r0 / (6.0 * v) for t, v in cand.items()}
    return _phases_two_three(g, s, params, diag, r_max0, n_r0, n_t, cost_cap)
