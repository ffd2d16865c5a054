"""Nested (p, q) loss: inner p-norm over one reviewer's residuals, outer q-norm across reviewers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .dataset import Dataset, ValidationError
from .order import DominanceGraph

INF = math.inf


@dataclass
class LpqConfig:
    """Hyperparameters and solver tolerances.

    ``p`` and ``q`` live in [1, inf]; ``math.inf`` is the distinguished value
    with exact max semantics. Values below 1 are rejected: the resulting loss
    would not be convex. ``eps_obj`` and ``eps_tie`` are relative tolerances
    (against max(1, loss)); ``max_iters`` caps iterations per solver phase.
    ``use_closed_form`` lets the solver take the exact per-node median route
    when the dataset qualifies for it.
    """

    p: float = 1.0
    q: float = 1.0
    eps_obj: float = 1e-7
    eps_tie: float = 1e-6
    max_iters: int = 3200
    use_closed_form: bool = True

    def __post_init__(self):
        self.p = float(self.p)
        self.q = float(self.q)
        if math.isnan(self.p) or self.p < 1.0:
            raise ValueError(f"p must lie in [1, inf], got {self.p}")
        if math.isnan(self.q) or self.q < 1.0:
            raise ValueError(f"q must lie in [1, inf], got {self.q}")
        if not (self.eps_obj > 0 and self.eps_tie > 0):
            raise ValueError("tolerances must be strictly positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


def _pnorm(a: np.ndarray, p: float) -> float:
    """Lp norm with overflow-safe scaling; exact max for p = inf."""
    if a.size == 0:
        return 0.0
    amax = float(np.abs(a).max())
    if amax == 0.0:
        return 0.0
    if p == INF:
        return amax
    return amax * float((np.abs(a / amax) ** p).sum() ** (1.0 / p))


def nested_loss(residuals_by_reviewer: list[np.ndarray], p: float, q: float) -> float:
    """Outer q-norm across reviewers of the inner p-norms of their residuals."""
    inner = np.array([_pnorm(r, p) for r in residuals_by_reviewer])
    return _pnorm(inner, q)


def _values_array(values: Mapping[tuple[float, ...], float], graph: DominanceGraph) -> np.ndarray:
    out = np.empty(graph.n_nodes)
    for vec, idx in graph.node_index.items():
        try:
            out[idx] = float(values[vec])
        except KeyError:
            raise ValidationError(f"no value provided for criteria vector {vec}") from None
    return out


def lpq_loss(
    values: Mapping[tuple[float, ...], float],
    ds: Dataset,
    graph: DominanceGraph,
    cfg: LpqConfig,
) -> float:
    """Evaluate the nested loss of candidate node values on a dataset.

    ``values`` maps each distinct criteria vector to a function value;
    feasibility is not required for evaluation. Returns 0 iff the candidate
    interpolates every review exactly.
    """
    v = _values_array(values, graph)
    fitted = v[graph.record_nodes]
    residuals: dict[str, list[float]] = {}
    for rec, fv in zip(ds.records, fitted):
        residuals.setdefault(rec.reviewer_id, []).append(rec.overall - fv)
    return nested_loss([np.array(r) for r in residuals.values()], cfg.p, cfg.q)


def per_reviewer_normalized_loss(
    values: Mapping[tuple[float, ...], float],
    ds: Dataset,
    reviewer_id: str,
) -> float:
    """Mean absolute residual of one reviewer's reviews under the given values."""
    ds.papers_of(reviewer_id)  # raises for unknown reviewers
    total, count = 0.0, 0
    for rec in ds.records:
        if rec.reviewer_id != reviewer_id:
            continue
        try:
            fv = float(values[rec.criteria])
        except KeyError:
            raise ValidationError(
                f"no value provided for criteria vector {rec.criteria}"
            ) from None
        total += abs(rec.overall - fv)
        count += 1
    return total / count
