"""Scikit-learn style estimators wrapping the query engines.

Each estimator is fit on a graph (a :class:`~skppr.graphs.Graph`, a scipy
sparse adjacency, or a dense square array) and then answers per-source
queries through ``predict``:

>>> est = AbsoluteErrorPPR(eps=0.05, seed=1).fit(adjacency)
>>> scores = est.predict(0)          # dense vector for source 0
>>> block = est.predict([0, 3, 7])   # one row per source

``get_params`` / ``set_params`` / ``clone`` behave as usual, so the
estimators compose with model-selection tooling.  ``transform`` aliases
``predict`` for pipeline use.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import as_graph, check_node
from .exact import exact_ssppr
from .queries import QueryParams, ssppr_a, ssppr_d
from .walks import ROLE_FIRST_PASS, WalkEngine, monte_carlo

__all__ = ["ExactPPR", "MonteCarloPPR", "AbsoluteErrorPPR", "DegreeNormalizedPPR"]


class _BasePPR(BaseEstimator):
    """Shared fit plumbing: coerce and store the graph."""

    _requires_undirected = False

    def fit(self, X, y=None):
        self.graph_ = as_graph(X, undirected=True if self._requires_undirected else None)
        self.n_nodes_ = self.graph_.n
        return self

    def _check_fitted(self):
        if not hasattr(self, "graph_"):
            raise ValueError(f"{type(self).__name__} is not fitted; call fit(graph) first")

    def _predict_one(self, s: int) -> np.ndarray:
        raise NotImplementedError

    def predict(self, sources):
        """Score vector(s) for one source node or a sequence of them.

        Returns shape ``(n,)`` for a scalar source and ``(k, n)`` for a
        sequence of k sources.
        """
        self._check_fitted()
        if np.isscalar(sources):
            return self._predict_one(check_node(self.graph_, sources, "source"))
        rows = [self._predict_one(check_node(self.graph_, s, "source")) for s in np.asarray(sources).ravel()]
        return np.vstack(rows)

    def transform(self, sources):
        return self.predict(sources)

    def fit_predict(self, X, sources):
        return self.fit(X).predict(sources)


class ExactPPR(_BasePPR):
    """Exact scores by truncated power iteration (the oracle)."""

    def __init__(self, alpha: float = 0.2, tol: float = 1e-10):
        self.alpha = alpha
        self.tol = tol

    def _predict_one(self, s: int) -> np.ndarray:
        return exact_ssppr(self.graph_, s, self.alpha, self.tol).scores


class MonteCarloPPR(_BasePPR):
    """Plain Monte Carlo terminal frequencies over ``n_walks`` walks."""

    def __init__(self, alpha: float = 0.2, n_walks: int = 10000, seed: int = 0):
        self.alpha = alpha
        self.n_walks = n_walks
        self.seed = seed

    def _predict_one(self, s: int) -> np.ndarray:
        engine = WalkEngine.from_seed(self.alpha, self.seed, ROLE_FIRST_PASS)
        return monte_carlo(self.graph_, s, self.n_walks, engine).to_dense(self.graph_.n)


class _QueryPPR(_BasePPR):
    """Shared predict plumbing for the guarantee-carrying engines."""

    def _run_query(self, s: int):
        raise NotImplementedError

    def _predict_one(self, s: int) -> np.ndarray:
        answer = self._run_query(s)
        if not hasattr(self, "diagnostics_"):
            self.diagnostics_ = []
        self.diagnostics_.append(answer.diagnostics)
        return answer.to_dense(self.graph_.n)


class AbsoluteErrorPPR(_QueryPPR):
    """Sublinear query with a uniform absolute-error guarantee.

    Every predicted entry is within ``eps`` of the true score with
    probability at least ``1 - 1/n`` per query.  Per-query diagnostics
    accumulate in ``diagnostics_``.
    """

    def __init__(
        self,
        alpha: float = 0.2,
        eps: float = 0.05,
        seed: int = 0,
        c_walk: float = 1.0,
        fallback_enabled: bool = False,
        fallback_factor: float = 4.0,
    ):
        self.alpha = alpha
        self.eps = eps
        self.seed = seed
        self.c_walk = c_walk
        self.fallback_enabled = fallback_enabled
        self.fallback_factor = fallback_factor

    def _run_query(self, s: int):
        params = QueryParams(
            alpha=self.alpha,
            eps=self.eps,
            seed=self.seed,
            c_walk=self.c_walk,
            fallback_enabled=self.fallback_enabled,
            fallback_factor=self.fallback_factor,
        )
        return ssppr_a(self.graph_, s, params)


class DegreeNormalizedPPR(_QueryPPR):
    """Sublinear query with a degree-normalized error guarantee.

    Undirected graphs only: every predicted entry is within
    ``eps_d * d(t)`` of the true score with probability at least
    ``1 - 1/n`` per query.
    """

    _requires_undirected = True

    def __init__(
        self,
        alpha: float = 0.2,
        eps_d: float = 0.02,
        seed: int = 0,
        c_walk: float = 1.0,
        fallback_enabled: bool = False,
        fallback_factor: float = 4.0,
    ):
        self.alpha = alpha
        self.eps_d = eps_d
        self.seed = seed
        self.c_walk = c_walk
        self.fallback_enabled = fallback_enabled
        self.fallback_factor = fallback_factor

    def _run_query(self, s: int):
        params = QueryParams(
            alpha=self.alpha,
            eps_d=self.eps_d,
            seed=self.seed,
            c_walk=self.c_walk,
            fallback_enabled=self.fallback_enabled,
            fallback_factor=self.fallback_factor,
        )
        return ssppr_d(self.graph_, s, params)
