"""Scikit-learn compatible estimator facade over the monotone aggregation solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .dataset import Dataset, ReviewRecord
from .loss import LpqConfig
from .order import build_dominance_graph
from .solver import ExtensionRule, solve


class LpqAggregator(RegressorMixin, BaseEstimator):
    """Learn a monotone map from criteria score vectors to overall recommendations.

    Fits the nested (p, q) loss over all monotone functions: the inner p-norm
    pools one reviewer's residuals, the outer q-norm pools across reviewers,
    and ties are broken by the minimum review-weighted squared norm. With the
    default ``reviewers=None`` every sample belongs to a single pooled
    reviewer, which reduces to plain Lp-loss monotone regression.

    Parameters
    ----------
    p : float, default=1.0
        Inner (per-reviewer) norm exponent in [1, inf].
    q : float, default=1.0
        Outer (across-reviewer) norm exponent in [1, inf].
    eps_obj, eps_tie : float
        Relative objective and tie-break tolerances.
    max_iters : int
        Iteration cap per solver phase.
    extension_rule : {"lower_envelope", "upper_envelope"}
        How predictions extend beyond observed criteria vectors.

    Attributes
    ----------
    function_ : AggregateFunction
        Learned values at observed vectors plus the extension rule.
    report_ : SolveReport
        Objective, tie norm, feasibility residual and convergence flag.
    """

    def __init__(
        self,
        p: float = 1.0,
        q: float = 1.0,
        eps_obj: float = 1e-7,
        eps_tie: float = 1e-6,
        max_iters: int = 3200,
        extension_rule: str = "lower_envelope",
    ):
        self.p = p
        self.q = q
        self.eps_obj = eps_obj
        self.eps_tie = eps_tie
        self.max_iters = max_iters
        self.extension_rule = extension_rule

    def fit(self, X, y, reviewers=None):
        X, y = check_X_y(X, y, ensure_min_samples=1, y_numeric=True)
        if reviewers is None:
            reviewers = np.zeros(len(y), dtype=int)
        reviewers = np.asarray(reviewers)
        if reviewers.shape != (len(y),):
            raise ValueError(
                f"reviewers must be one label per sample, got shape {reviewers.shape}"
            )
        records = [
            ReviewRecord(
                reviewer_id=str(reviewers[i]),
                paper_id=f"sample-{i}",
                criteria=tuple(float(c) for c in X[i]),
                overall=float(y[i]),
            )
            for i in range(len(y))
        ]
        ds = Dataset(records, d=X.shape[1])
        graph = build_dominance_graph(ds)
        cfg = LpqConfig(
            p=self.p,
            q=self.q,
            eps_obj=self.eps_obj,
            eps_tie=self.eps_tie,
            max_iters=self.max_iters,
        )
        self.function_, self.report_ = solve(ds, graph, cfg)
        rule = ExtensionRule(self.extension_rule)
        if rule is not self.function_.extension_rule:
            self.function_.extension_rule = rule
            self.function_.default_value = (
                float(self.function_.values.min())
                if rule is ExtensionRule.LOWER_ENVELOPE
                else float(self.function_.values.max())
            )
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "function_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return self.function_.evaluate_many(X)
