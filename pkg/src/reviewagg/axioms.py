"""Executable axiom checks (consensus, efficiency, strategyproofness) and counterexample builders."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .dataset import Dataset, ReviewRecord, ValidationError
from .loss import INF, LpqConfig
from .order import DominanceGraph, build_dominance_graph, sorted_dominates
from .solver import SolveReport, solve

AXIOM_TOL = 1e-4  # three orders of magnitude above solver tolerances


class AxiomInstance:
    """A complete review scenario with shared per-paper criteria scores.

    ``criteria[a]`` is the criteria vector of paper ``a`` (one vector per
    paper, the same for every reviewer) and ``y[i][a]`` is reviewer ``i``'s
    overall recommendation for paper ``a``. Every reviewer scores every paper,
    so the scenario is complete and objective by construction.
    """

    def __init__(self, criteria: Sequence[Sequence[float]], y: Sequence[Sequence[float]]):
        self.criteria = tuple(tuple(float(c) for c in vec) for vec in criteria)
        self.y = np.array(y, dtype=float)
        if self.y.ndim != 2:
            raise ValidationError("y must be a reviewers x papers matrix")
        if self.y.shape[1] != len(self.criteria):
            raise ValidationError(
                f"y has {self.y.shape[1]} papers but {len(self.criteria)} criteria vectors given"
            )
        if len({len(vec) for vec in self.criteria}) > 1:
            raise ValidationError("criteria vectors must share one dimensionality")
        self._graph: DominanceGraph | None = None

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def m(self) -> int:
        return self.y.shape[1]

    @property
    def d(self) -> int:
        return len(self.criteria[0])

    def paper_ids(self) -> list[str]:
        return [f"p{a}" for a in range(self.m)]

    def to_dataset(self) -> Dataset:
        records = [
            ReviewRecord(
                reviewer_id=f"r{i}",
                paper_id=f"p{a}",
                criteria=self.criteria[a],
                overall=float(self.y[i, a]),
            )
            for i in range(self.n)
            for a in range(self.m)
        ]
        return Dataset(records, d=self.d)

    def graph(self) -> DominanceGraph:
        if self._graph is None:
            self._graph = build_dominance_graph(self.to_dataset())
        return self._graph

    def with_row(self, reviewer: int, row: Sequence[float]) -> "AxiomInstance":
        y2 = self.y.copy()
        y2[reviewer] = np.asarray(row, dtype=float)
        other = AxiomInstance(self.criteria, y2)
        other._graph = self._graph  # criteria unchanged, the order graph carries over
        return other


@dataclass
class AxiomVerdict:
    holds: bool
    witness: dict | None = None

    def to_json_dict(self) -> dict:
        return {"holds": self.holds, "witness": self.witness}


AggregationMethod = Callable[[AxiomInstance], np.ndarray]


class LpqAggregationMethod:
    """Aggregation method: solve the (p, q) problem on an instance, return per-paper values.

    Keeps the solve reports of every call (for convergence inspection) and
    reuses the dominance graph across calls that share criteria vectors.
    """

    def __init__(self, cfg: LpqConfig):
        self.cfg = cfg
        self.reports: list[SolveReport] = []
        self._graphs: dict[tuple, DominanceGraph] = {}

    def __call__(self, inst: AxiomInstance) -> np.ndarray:
        # record->node indices depend on the reviewer count, so key on it too
        key = (inst.criteria, inst.n)
        graph = self._graphs.get(key)
        if graph is None:
            graph = inst.graph()
            self._graphs[key] = graph
        else:
            inst._graph = graph
        f, report = solve(inst.to_dataset(), graph, self.cfg)
        self.reports.append(report)
        return np.array([f.evaluate(vec) for vec in inst.criteria])


def lpq_method(p: float, q: float, **cfg_overrides) -> LpqAggregationMethod:
    return LpqAggregationMethod(LpqConfig(p=p, q=q, **cfg_overrides))


def check_consensus(inst: AxiomInstance, method: AggregationMethod, tol: float = AXIOM_TOL) -> AxiomVerdict:
    """Papers with unanimous overall recommendations must aggregate to that value."""
    values = np.asarray(method(inst), dtype=float)
    for a in range(inst.m):
        col = inst.y[:, a]
        if np.all(col == col[0]) and abs(values[a] - col[0]) > tol:
            return AxiomVerdict(
                holds=False,
                witness={
                    "axiom": "consensus",
                    "paper": inst.paper_ids()[a],
                    "unanimous_value": float(col[0]),
                    "aggregate": float(values[a]),
                },
            )
    return AxiomVerdict(holds=True)


def check_efficiency(inst: AxiomInstance, method: AggregationMethod, tol: float = AXIOM_TOL) -> AxiomVerdict:
    """If a paper's sorted scores pointwise dominate another's, its aggregate must not be lower."""
    values = np.asarray(method(inst), dtype=float)
    for a in range(inst.m):
        for b in range(inst.m):
            if a == b:
                continue
            if sorted_dominates(inst.y[:, a], inst.y[:, b]) and values[a] < values[b] - tol:
                return AxiomVerdict(
                    holds=False,
                    witness={
                        "axiom": "efficiency",
                        "dominating_paper": inst.paper_ids()[a],
                        "dominated_paper": inst.paper_ids()[b],
                        "aggregate_dominating": float(values[a]),
                        "aggregate_dominated": float(values[b]),
                    },
                )
    return AxiomVerdict(holds=True)


def default_manipulations(
    inst: AxiomInstance,
    grid: Sequence[float] = tuple(range(0, 11)),
) -> Iterable[tuple[int, np.ndarray]]:
    """Finite manipulation strategy: single-coordinate grid changes, copied rows, constant rows."""
    for i in range(inst.n):
        for a in range(inst.m):
            for val in grid:
                if float(val) != inst.y[i, a]:
                    row = inst.y[i].copy()
                    row[a] = float(val)
                    yield i, row
        for i2 in range(inst.n):
            if i2 != i and not np.array_equal(inst.y[i2], inst.y[i]):
                yield i, inst.y[i2].copy()
        for val in grid:
            row = np.full(inst.m, float(val))
            if not np.array_equal(row, inst.y[i]):
                yield i, row


def check_strategyproofness(
    inst: AxiomInstance,
    method: AggregationMethod,
    manipulation_set: Iterable[tuple[int, Sequence[float]]] | None = None,
    tol: float = AXIOM_TOL,
) -> AxiomVerdict:
    """No tested misreport may pull the aggregate closer (in L2) to the misreporter's truth.

    A ``holds=False`` verdict is a genuine violation; ``holds=True`` certifies
    only the tested manipulation set, which is finite by construction.
    """
    if manipulation_set is None:
        manipulation_set = default_manipulations(inst)
    truthful = np.asarray(method(inst), dtype=float)
    truth_dist = {
        i: float(np.linalg.norm(truthful - inst.y[i])) for i in range(inst.n)
    }
    for i, row in manipulation_set:
        manipulated = np.asarray(method(inst.with_row(i, row)), dtype=float)
        dist = float(np.linalg.norm(manipulated - inst.y[i]))
        if dist < truth_dist[i] - tol:
            return AxiomVerdict(
                holds=False,
                witness={
                    "axiom": "strategyproofness",
                    "reviewer": f"r{i}",
                    "manipulated_row": [float(x) for x in row],
                    "truthful_aggregate": [float(x) for x in truthful],
                    "manipulated_aggregate": [float(x) for x in manipulated],
                    "truthful_distance": truth_dist[i],
                    "manipulated_distance": dist,
                },
            )
    return AxiomVerdict(holds=True)


def make_fermat_instance(z: float) -> AxiomInstance:
    """Three reviewers, two incomparable papers; scores (z,0,0) and (0,1,0)."""
    if not z > 1:
        raise ValidationError(f"z must exceed 1, got {z}")
    return AxiomInstance(
        criteria=((1.0, 2.0), (2.0, 1.0)),
        y=[[float(z), 0.0], [0.0, 1.0], [0.0, 0.0]],
    )


def make_sp_instance() -> AxiomInstance:
    """One paper, two reviewers with overall recommendations 1 and 0."""
    return AxiomInstance(criteria=((1.0, 1.0),), y=[[1.0], [0.0]])


def make_consensus_instance() -> AxiomInstance:
    """Two incomparable papers; reviewers agree on paper 2 but split 0/2 on paper 1."""
    return AxiomInstance(
        criteria=((1.0, 2.0), (2.0, 1.0)),
        y=[[0.0, 1.0], [2.0, 1.0]],
    )


def antichain_criteria(m: int) -> tuple[tuple[float, float], ...]:
    """m pairwise-incomparable 2-D criteria vectors: (k+1, m-k)."""
    return tuple((float(k + 1), float(m - k)) for k in range(m))


def random_axiom_instance(
    rng: np.random.Generator,
    n_max: int = 5,
    m_max: int = 4,
    score_lo: int = 0,
    score_hi: int = 10,
) -> AxiomInstance:
    """Random complete scenario on an antichain with integer overall scores."""
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    y = rng.integers(score_lo, score_hi + 1, size=(n, m)).astype(float)
    return AxiomInstance(criteria=antichain_criteria(m), y=y)


def efficiency_limit_objective(f1, f2, p: float):
    """Large-z limit of the centered two-paper objective under the inner p-norm.

    Defined on [0, 1]^2; accepts scalars or arrays (broadcast).
    """
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    term_b = (f1**p + (1.0 - f2) ** p) ** (1.0 / p)
    term_c = (f1**p + f2**p) ** (1.0 / p)
    return -f1 + term_b + term_c - 1.0


def efficiency_limit_minimizer(p: float) -> tuple[float, float]:
    """Closed-form minimizer of the limit objective: (0.5 * (2^(p/(p-1)) - 1)^(-1/p), 0.5)."""
    if not (1.0 < p < INF):
        raise ValidationError(f"the limit minimizer is defined for p in (1, inf), got {p}")
    v1 = 0.5 * (1.0 / (2.0 ** (p / (p - 1.0)) - 1.0)) ** (1.0 / p)
    return (v1, 0.5)
