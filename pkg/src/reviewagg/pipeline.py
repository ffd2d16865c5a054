"""Selection pipeline: per-paper aggregation, top-fraction selection, overlap experiments, slices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Dataset, ValidationError, marginal_modes
from .loss import LpqConfig
from .order import build_dominance_graph
from .solver import AggregateFunction, left_median, solve


@dataclass(frozen=True)
class PaperScore:
    paper_id: str
    aggregate: float


@dataclass(frozen=True)
class SelectionResult:
    accepted: tuple[str, ...]
    fraction: float
    k: int

    @property
    def accepted_set(self) -> frozenset[str]:
        return frozenset(self.accepted)


@dataclass(frozen=True)
class SubsampleRow:
    k: int
    mean_overlap: float
    ci_half_width: float


@dataclass(eq=False)
class OverlapMatrix:
    combos: tuple[tuple[float, float], ...]
    values: np.ndarray
    converged: tuple[bool, ...]


def aggregate_papers(f: AggregateFunction, ds: Dataset) -> list[PaperScore]:
    """Per-paper left median of the learned values at each review's criteria vector."""
    by_paper: dict[str, list[float]] = {}
    for rec in ds.records:
        by_paper.setdefault(rec.paper_id, []).append(f.evaluate(rec.criteria))
    return [
        PaperScore(paper_id=pid, aggregate=left_median(vals))
        for pid, vals in sorted(by_paper.items())
    ]


def select_top(scores: Sequence[PaperScore], fraction: float) -> SelectionResult:
    """Keep the round(fraction * m) highest-scoring papers; ties go to ascending paper id."""
    if not scores:
        raise ValidationError("cannot select from an empty score list")
    if not (0.0 < fraction <= 1.0):
        raise ValidationError(f"fraction must lie in (0, 1], got {fraction}")
    m = len(scores)
    k = int(math.floor(fraction * m + 0.5))
    ranked = sorted(scores, key=lambda s: (-s.aggregate, s.paper_id))
    return SelectionResult(
        accepted=tuple(s.paper_id for s in ranked[:k]),
        fraction=fraction,
        k=k,
    )


def overlap(a: Sequence[str] | frozenset[str], b: Sequence[str] | frozenset[str]) -> float:
    """Fraction of shared ids between two equal-size, nonempty selections."""
    sa, sb = set(a), set(b)
    if len(sa) != len(sb) or not sa:
        raise ValidationError(
            f"overlap requires equal-size nonempty sets, got sizes {len(sa)} and {len(sb)}"
        )
    return len(sa & sb) / len(sa)


def _solve_and_select(ds: Dataset, cfg: LpqConfig, fraction: float):
    graph = build_dominance_graph(ds)
    f, report = solve(ds, graph, cfg)
    selection = select_top(aggregate_papers(f, ds), fraction)
    return f, report, selection


def subsample_experiment(
    ds: Dataset,
    cfg: LpqConfig,
    k_max: int,
    trials: int,
    seed: int,
    fraction: float = 0.2727,
) -> list[SubsampleRow]:
    """Selection overlap against the full data when only k reviews per paper are kept.

    For each k in 1..k_max and each trial, k distinct reviews per paper are
    drawn uniformly without replacement (papers with fewer reviews keep all),
    the aggregate is re-learned on the subsample, and the top-fraction
    selection is compared with the full-data selection. Deterministic in
    ``seed``; the confidence half-width is the normal approximation
    1.96 * std / sqrt(trials).
    """
    if k_max < 1:
        raise ValidationError(f"k_max must be >= 1, got {k_max}")
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")

    _, _, full_selection = _solve_and_select(ds, cfg, fraction)
    full_set = full_selection.accepted_set

    record_ids_by_paper: dict[str, list[int]] = {}
    for idx, rec in enumerate(ds.records):
        record_ids_by_paper.setdefault(rec.paper_id, []).append(idx)
    paper_order = sorted(record_ids_by_paper)

    rng = np.random.default_rng(seed)
    rows: list[SubsampleRow] = []
    for k in range(1, k_max + 1):
        overlaps = []
        for _ in range(trials):
            keep: list[int] = []
            for pid in paper_order:
                ids = record_ids_by_paper[pid]
                if len(ids) <= k:
                    keep.extend(ids)
                else:
                    picks = sorted(rng.choice(len(ids), size=k, replace=False).tolist())
                    keep.extend(ids[j] for j in picks)
            sub = Dataset([ds.records[i] for i in keep], d=ds.d, score_domain=ds.score_domain)
            _, _, sub_selection = _solve_and_select(sub, cfg, fraction)
            overlaps.append(overlap(sub_selection.accepted_set, full_set))
        arr = np.array(overlaps)
        half = 0.0 if trials == 1 else float(1.96 * arr.std(ddof=0) / math.sqrt(trials))
        rows.append(SubsampleRow(k=k, mean_overlap=float(arr.mean()), ci_half_width=half))
    return rows


def pq_overlap_matrix(
    ds: Dataset,
    ps: Sequence[float],
    qs: Sequence[float],
    fraction: float,
    cfg_base: LpqConfig | None = None,
) -> OverlapMatrix:
    """Pairwise selection overlap across every (p, q) combination of the given lists.

    The matrix is symmetric with unit diagonal. Cells whose solve did not
    converge are still filled; the per-combination ``converged`` flags mark
    them for the caller.
    """
    base = cfg_base or LpqConfig()
    combos = tuple((float(p), float(q)) for p in ps for q in qs)
    selections = []
    converged = []
    for p, q in combos:
        cfg = LpqConfig(
            p=p, q=q, eps_obj=base.eps_obj, eps_tie=base.eps_tie,
            max_iters=base.max_iters, use_closed_form=base.use_closed_form,
        )
        _, report, selection = _solve_and_select(ds, cfg, fraction)
        selections.append(selection.accepted_set)
        converged.append(bool(report.converged))
    n = len(combos)
    values = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = overlap(selections[i], selections[j])
    return OverlapMatrix(combos=combos, values=values, converged=tuple(converged))


def slice_grid(
    f: AggregateFunction,
    ds: Dataset,
    vary: tuple[int, int],
    grid: Sequence[float],
) -> np.ndarray:
    """Evaluate the learned function on a 2-D slice anchored at the marginal modes.

    ``table[r][c]`` is the value with criterion ``vary[0]`` set to ``grid[r]``
    and criterion ``vary[1]`` set to ``grid[c]``; all other criteria sit at
    their per-criterion modal scores. Rows and columns are nondecreasing
    because the extension rule is monotone.
    """
    i, j = vary
    if i == j or not (0 <= i < ds.d and 0 <= j < ds.d):
        raise ValidationError(f"vary indices must be distinct and < {ds.d}, got {vary}")
    anchor = np.array(marginal_modes(ds), dtype=float)
    grid = np.asarray(grid, dtype=float)
    table = np.empty((len(grid), len(grid)))
    for r, gi in enumerate(grid):
        for c, gj in enumerate(grid):
            x = anchor.copy()
            x[i] = gi
            x[j] = gj
            table[r, c] = f.evaluate(x)
    return table


def render_heatmap_svg(table: np.ndarray, title: str = "slice", cell: int = 24) -> str:
    """Minimal SVG heatmap with a linear color ramp over [min, max] of the table."""
    table = np.asarray(table, dtype=float)
    lo, hi = float(table.min()), float(table.max())
    span = hi - lo if hi > lo else 1.0
    rows, cols = table.shape
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{cols * cell}" height="{rows * cell}">',
        f"<!-- {title}: linear color ramp from dark blue (={lo:g}) to light yellow (={hi:g}) -->",
    ]
    for r in range(rows):
        for c in range(cols):
            t = (table[r, c] - lo) / span
            red = int(round(20 + 235 * t))
            green = int(round(30 + 210 * t))
            blue = int(round(120 - 60 * t))
            parts.append(
                f'<rect x="{c * cell}" y="{(rows - 1 - r) * cell}" width="{cell}" height="{cell}" '
                f'fill="rgb({red},{green},{blue})"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts)
