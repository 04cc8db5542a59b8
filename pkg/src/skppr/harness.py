"""Empirical verification of the error guarantees and cost-scaling studies.

``verify_guarantee`` replays many seeded queries against the exact oracle
and reports the observed failure rate; ``scale_experiment`` measures
accounted cost (push cost units plus walk steps) across graph sizes and
error budgets and fits log-log slopes.  Independent runs may be spread
over a small thread pool sized by the ``PPR_THREADS`` environment
variable (default 1); results are always merged in run order, so reports
do not depend on the pool size.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .exact import exact_ssppr
from .graphs import AliasTable, Graph, generate_power_law
from .queries import QueryAnswer, QueryParams, ssppr_a, ssppr_d
from .walks import ROLE_SOURCE, WalkEngine

__all__ = [
    "VerifyReport",
    "ScaleReport",
    "ScaleCell",
    "verify_guarantee",
    "scale_experiment",
    "resolve_sources",
    "worker_count",
]

ORACLE_CAP_DEFAULT = 2000


def worker_count() -> int:
    """Worker pool size from ``PPR_THREADS`` (default 1, floor 1)."""
    try:
        return max(1, int(os.environ.get("PPR_THREADS", "1")))
    except ValueError:
        return 1


def resolve_sources(g: Graph, source_spec: str | int, runs: int, seed: int) -> list[int]:
    """Per-run source nodes for a spec: a node id, ``"uniform"``, or ``"degree"``.

    Sampled specs draw from the dedicated source-sampling substream of
    ``seed`` via an alias table, one draw per run in run order.
    """
    if isinstance(source_spec, (int, np.integer)):
        s = int(source_spec)
        if not 0 <= s < g.n:
            raise ValueError(f"source {s} out of range for n={g.n}")
        return [s] * runs
    spec = str(source_spec)
    if spec.lstrip("-").isdigit():
        return resolve_sources(g, int(spec), runs, seed)
    if spec == "uniform":
        weights = np.ones(g.n)
    elif spec == "degree":
        weights = g.out_degrees.astype(np.float64)
    else:
        raise ValueError(f"source spec must be a node id, 'uniform', or 'degree', got {source_spec!r}")
    table = AliasTable.from_weights(weights)
    rng = WalkEngine.from_seed(0.5, seed, ROLE_SOURCE).rng
    return [int(v) for v in table.sample_array(rng, runs)]


@dataclass
class VerifyReport:
    """Observed guarantee failures over seeded runs."""

    algorithm: str
    n: int
    eps: float
    runs: int
    failures: int
    max_error: float
    mean_cost: float
    max_cost: int
    failure_rate: float
    confidence_note: str
    pruning_failures: int = 0
    per_run_errors: list[float] = field(default_factory=list, repr=False)

    def to_json(self) -> str:
        d = asdict(self)
        d.pop("per_run_errors")
        return json.dumps(d, sort_keys=True)


def verify_guarantee(
    g: Graph,
    algorithm: str,
    source_spec: str | int,
    eps: float,
    runs: int,
    seed: int,
    alpha: float = 0.2,
    oracle_cap: int = ORACLE_CAP_DEFAULT,
    slack: float = 1e-12,
) -> VerifyReport:
    """Replay ``runs`` seeded queries and compare each against the oracle.

    Run ``j`` uses query seed ``seed + j``.  A run fails when its worst
    per-node error (degree-normalized for algorithm ``"d"``) exceeds
    ``eps + slack``; the slack absorbs the oracle's own truncation.  Also
    counts runs whose candidate set pruned away a node the guarantee
    cannot ignore (true score above the phase-one threshold).
    """
    if algorithm not in ("a", "d"):
        raise ValueError(f"algorithm must be 'a' or 'd', got {algorithm!r}")
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    if g.n > oracle_cap:
        raise ValueError(
            f"n={g.n} exceeds oracle_cap={oracle_cap}; verification needs exact scores, "
            "use a smaller graph or raise the cap explicitly"
        )
    sources = resolve_sources(g, source_spec, runs, seed)
    deg = g.out_degrees.astype(np.float64)
    oracle_cache: dict[int, np.ndarray] = {}

    def oracle(s: int) -> np.ndarray:
        if s not in oracle_cache:
            oracle_cache[s] = exact_ssppr(g, s, alpha).scores
        return oracle_cache[s]

    for s in set(sources):
        oracle(s)

    def one_run(j: int) -> QueryAnswer:
        if algorithm == "a":
            params = QueryParams(alpha=alpha, eps=eps, seed=seed + j)
            return ssppr_a(g, sources[j], params)
        params = QueryParams(alpha=alpha, eps_d=eps, seed=seed + j)
        return ssppr_d(g, sources[j], params)

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            answers = list(pool.map(one_run, range(runs)))
    else:
        answers = [one_run(j) for j in range(runs)]

    failures = 0
    pruning_failures = 0
    max_error = 0.0
    errors: list[float] = []
    costs: list[int] = []
    for j, ans in enumerate(answers):
        truth = oracle(sources[j])
        est = ans.to_dense(g.n)
        err = np.abs(est - truth)
        if algorithm == "d":
            err = err / deg
        worst = float(err.max())
        errors.append(worst)
        max_error = max(max_error, worst)
        if worst > eps + slack:
            failures += 1
        costs.append(ans.diagnostics.total_cost)
        if not ans.diagnostics.fallback:
            cand = ans.candidates
            scale = deg if algorithm == "d" else np.ones(g.n)
            hot = np.flatnonzero(truth / scale > eps)
            if any(int(t) not in cand for t in hot):
                pruning_failures += 1

    rate = failures / runs
    half = 1.96 * math.sqrt(max(rate * (1 - rate), 1e-12) / runs)
    note = (
        f"observed failure rate {rate:.4f} (95% CI +/- {half:.4f}); "
        f"guarantee allows up to {1.0 / g.n:.4f}"
    )
    return VerifyReport(
        algorithm=algorithm,
        n=g.n,
        eps=eps,
        runs=runs,
        failures=failures,
        max_error=max_error,
        mean_cost=float(np.mean(costs)),
        max_cost=int(np.max(costs)),
        failure_rate=rate,
        confidence_note=note,
        pruning_failures=pruning_failures,
        per_run_errors=errors,
    )


# ---------------------------------------------------------------------------
# scaling experiments
# ---------------------------------------------------------------------------


@dataclass
class ScaleCell:
    """Mean accounted cost of seeded runs at one (graph, eps) setting."""

    label: str
    n: int
    m: int
    eps: float
    mean_cost: float
    costs: list[int]


@dataclass
class ScaleReport:
    """Cost grid plus fitted log-log slopes.

    ``slope_inv_eps`` regresses log(cost) on log(1/eps) at fixed graph;
    ``slope_m`` regresses log(cost) on log(m) at fixed eps.  A slope is
    None when its axis has fewer than two settings.
    """

    algorithm: str
    cells: list[ScaleCell]
    slope_inv_eps: float | None = None
    slope_inv_eps_residual: float | None = None
    slope_m: float | None = None
    slope_m_residual: float | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _fit_slope(xs: list[float], ys: list[float]) -> tuple[float, float]:
    lx = np.log(np.asarray(xs))
    ly = np.log(np.asarray(ys))
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.mean((ly - (slope * lx + intercept)) ** 2))
    return float(slope), resid


def scale_experiment(
    algorithm: str,
    graphs: list[tuple[str, Graph]],
    eps_grid: list[float],
    seeds: int,
    source_spec: str | int = "uniform",
    alpha: float = 0.2,
    seed: int = 0,
) -> ScaleReport:
    """Measure accounted query cost over a (graph x eps) grid.

    Every cell runs ``seeds`` queries with seeds ``seed .. seed+seeds-1``
    and sources resolved per ``source_spec`` (degree-proportional
    sampling exercises the average-case regime).  Costs are the
    diagnostics totals: push cost units plus walk steps.
    """
    if algorithm not in ("a", "d"):
        raise ValueError(f"algorithm must be 'a' or 'd', got {algorithm!r}")
    if not graphs or not eps_grid or seeds < 1:
        raise ValueError("need at least one graph, one eps, and one seed")
    cells: list[ScaleCell] = []
    workers = worker_count()
    for label, g in graphs:
        for eps in eps_grid:
            sources = resolve_sources(g, source_spec, seeds, seed)

            def one(j: int, g=g, eps=eps, sources=sources) -> int:
                if algorithm == "a":
                    params = QueryParams(alpha=alpha, eps=eps, seed=seed + j)
                    ans = ssppr_a(g, sources[j], params)
                else:
                    params = QueryParams(alpha=alpha, eps_d=eps, seed=seed + j)
                    ans = ssppr_d(g, sources[j], params)
                return ans.diagnostics.total_cost

            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    costs = list(pool.map(one, range(seeds)))
            else:
                costs = [one(j) for j in range(seeds)]
            cells.append(ScaleCell(label, g.n, g.m, eps, float(np.mean(costs)), costs))

    report = ScaleReport(algorithm, cells)
    if len(eps_grid) >= 2 and len(graphs) == 1:
        by_eps = [(1.0 / c.eps, c.mean_cost) for c in cells]
        report.slope_inv_eps, report.slope_inv_eps_residual = _fit_slope(
            [x for x, _ in by_eps], [y for _, y in by_eps]
        )
    if len(graphs) >= 2 and len(eps_grid) == 1:
        report.slope_m, report.slope_m_residual = _fit_slope(
            [float(c.m) for c in cells], [c.mean_cost for c in cells]
        )
    return report


def powerlaw_family(sizes: list[int], attach: int, gen_seed: int) -> list[tuple[str, Graph]]:
    """Generated graph family for scaling runs, one graph per size."""
    return [(f"powerlaw-n{n}", generate_power_law(n, attach, gen_seed + i)) for i, n in enumerate(sizes)]
