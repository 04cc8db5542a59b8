"""Backward and forward push with sparse residue storage and cost metering.

Backward push drains residue mass toward a single target ``t`` until every
residue is at or below ``r_max``, maintaining for all v:

    pi(v, t) = q(v, t) + sum_u pi(v, u) * r(u, t)

with ``0 <= pi(v, t) - q(v, t) <= r_max`` at termination.  One cost unit
is one in-neighbor residue update (forward push: one out-neighbor update).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import IO

from .exact import exact_ssppr
from .graphs import Graph

__all__ = [
    "PushResult",
    "ForwardPushResult",
    "Budget",
    "BudgetExceeded",
    "backward_push",
    "forward_push",
    "verify_invariant",
    "write_push_result",
]


@dataclass
class Budget:
    """Shared work meter; ``spent`` accumulates across push calls."""

    limit: int
    spent: int = 0


class BudgetExceeded(Exception):
    """Signal (not a failure) that a push crossed its budget limit.

    Raised only after the offending push completed, so the overshoot is at
    most one node's in-degree.  ``spent`` is the budget's total at raise
    time; the partial push state is discarded.
    """

    def __init__(self, spent: int):
        super().__init__(f"push budget exceeded at {spent} cost units")
        self.spent = spent


@dataclass
class PushResult:
    """Outcome of a completed backward push toward ``target``."""

    target: int
    r_max: float
    reserves: dict[int, float]  # q(v, t), settled probability mass
    residues: dict[int, float]  # r(v, t), all entries in (0, r_max]
    cost: int

    def estimate(self, v: int) -> float:
        return self.reserves.get(v, 0.0)


@dataclass
class ForwardPushResult:
    """Outcome of a forward push from ``source`` (reserves approximate pi(s, .))."""

    source: int
    r_max: float
    reserves: dict[int, float]
    residues: dict[int, float]
    cost: int

    def estimate(self, v: int) -> float:
        return self.reserves.get(v, 0.0)


def _check_push_args(g: Graph, node: int, alpha: float, r_max: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if r_max <= 0.0:
        raise ValueError(f"r_max must be positive, got {r_max}")
    if not 0 <= node < g.n:
        raise ValueError(f"node {node} out of range for n={g.n}")


def backward_push(
    g: Graph,
    alpha: float,
    t: int,
    r_max: float,
    budget: Budget | None = None,
    order: str = "fifo",
    on_push=None,
) -> PushResult:
    """Push residue toward target ``t`` until all residues are <= ``r_max``.

    Work is queued FIFO by default (``order="lifo"`` uses a stack; both
    orders reach the same guarantees).  A node enters the queue when its
    residue first exceeds ``r_max`` and cannot be queued twice.  The
    budget, if given, is checked after each completed push; crossing it
    raises :class:`BudgetExceeded` and discards the partial state.

    ``on_push(v, reserves, residues)``, if given, observes the live state
    after each completed push (instrumentation only; must not mutate).
    """
    _check_push_args(g, t, alpha, r_max)
    if order not in ("fifo", "lifo"):
        raise ValueError(f"order must be 'fifo' or 'lifo', got {order!r}")
    reserves: dict[int, float] = {}
    residues: dict[int, float] = {t: 1.0}
    work: deque[int] = deque()
    queued: set[int] = set()
    if 1.0 > r_max:
        work.append(t)
        queued.add(t)
    inv_out = (1.0 / g.out_degrees).tolist()  # plain floats keep the dicts numpy-free
    cost = 0
    scale = 1.0 - alpha
    while work:
        v = work.popleft() if order == "fifo" else work.pop()
        queued.discard(v)
        # capture before distributing: a self-loop feeds residue back to v
        res = residues.pop(v)
        reserves[v] = reserves.get(v, 0.0) + alpha * res
        for u in g.in_neighbors(v).tolist():
            nr = residues.get(u, 0.0) + scale * res * inv_out[u]
            residues[u] = nr
            if nr > r_max and u not in queued:
                work.append(u)
                queued.add(u)
        din = g.in_degree(v)
        cost += din
        if on_push is not None:
            on_push(v, reserves, residues)
        if budget is not None:
            budget.spent += din
            if budget.spent > budget.limit:
                raise BudgetExceeded(budget.spent)
    return PushResult(t, r_max, reserves, residues, cost)


def forward_push(
    g: Graph,
    alpha: float,
    s: int,
    r_max: float,
    budget: Budget | None = None,
) -> ForwardPushResult:
    """Push probability mass out of ``s`` while any r(v) > r_max * d_out(v).

    On an undirected graph the result satisfies
    ``|p(v) - pi(s, v)| <= r_max * d(v)`` for every v.
    """
    _check_push_args(g, s, alpha, r_max)
    reserves: dict[int, float] = {}
    residues: dict[int, float] = {s: 1.0}
    work: deque[int] = deque()
    queued: set[int] = set()
    deg_out = g.out_degrees.tolist()
    if 1.0 > r_max * deg_out[s]:
        work.append(s)
        queued.add(s)
    cost = 0
    scale = 1.0 - alpha
    while work:
        v = work.popleft()
        queued.discard(v)
        res = residues.pop(v)
        reserves[v] = reserves.get(v, 0.0) + alpha * res
        amount = scale * res / deg_out[v]
        for w in g.out_neighbors(v).tolist():
            nr = residues.get(w, 0.0) + amount
            residues[w] = nr
            if nr > r_max * deg_out[w] and w not in queued:
                work.append(w)
                queued.add(w)
        dout = deg_out[v]
        cost += dout
        if budget is not None:
            budget.spent += dout
            if budget.spent > budget.limit:
                raise BudgetExceeded(budget.spent)
    return ForwardPushResult(s, r_max, reserves, residues, cost)


def verify_invariant(
    g: Graph,
    alpha: float,
    result: PushResult,
    rows,
    tol: float = 1e-10,
) -> float:
    """Max deviation of pi(v,t) = q(v,t) + sum_u pi(v,u) r(u,t) over ``rows``.

    Each row costs one exact source computation at tolerance ``tol``.
    """
    worst = 0.0
    items = list(result.residues.items())
    for v in rows:
        row = exact_ssppr(g, int(v), alpha, tol).scores
        acc = result.reserves.get(int(v), 0.0)
        for u, r in items:
            acc += row[u] * r
        dev = abs(row[result.target] - acc)
        if dev > worst:
            worst = dev
    return worst


def write_push_result(result: PushResult | ForwardPushResult, stream: IO) -> None:
    """TSV export: header line then ``node<TAB>q<TAB>r`` sorted by node id."""
    if isinstance(result, PushResult):
        stream.write(f"# t={result.target} r_max={result.r_max!r} cost={result.cost}\n")
    else:
        stream.write(f"# s={result.source} r_max={result.r_max!r} cost={result.cost}\n")
    nodes = sorted(set(result.reserves) | set(result.residues))
    for v in nodes:
        q = result.reserves.get(v, 0.0)
        r = result.residues.get(v, 0.0)
        stream.write(f"{v}\t{q!r}\t{r!r}\n")
