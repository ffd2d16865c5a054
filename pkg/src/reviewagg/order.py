"""Componentwise-dominance order over criteria vectors and sorted dominance of score vectors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import Dataset, ValidationError


@dataclass(frozen=True, eq=False)
class DominanceGraph:
    """DAG over distinct criteria vectors under componentwise <=.

    ``nodes`` are deduplicated vectors in lexicographic order, ``multiplicity``
    counts the reviews attached to each node, and ``edges`` holds the
    transitive reduction as (u, w) index pairs meaning vector(u) <= vector(w).
    ``record_nodes`` maps each dataset record (in order) to its node index.
    """

    nodes: tuple[tuple[float, ...], ...]
    multiplicity: np.ndarray
    edges: np.ndarray  # shape (E, 2), dtype int
    record_nodes: np.ndarray  # shape (len(ds),), dtype int
    node_index: dict[tuple[float, ...], int] = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def reachable(self, u: int, w: int) -> bool:
        """True iff w can be reached from u along reduced edges (u != w)."""
        if u == w:
            return False
        adj: dict[int, list[int]] = {}
        for a, b in self.edges:
            adj.setdefault(int(a), []).append(int(b))
        stack, seen = [u], {u}
        while stack:
            cur = stack.pop()
            for nxt in adj.get(cur, ()):
                if nxt == w:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return False

    def feasibility_residual(self, values: np.ndarray) -> float:
        """Largest violation max(0, v_u - v_w) over reduced edges."""
        if len(self.edges) == 0:
            return 0.0
        diffs = values[self.edges[:, 0]] - values[self.edges[:, 1]]
        return float(max(0.0, diffs.max()))


def build_dominance_graph(ds: Dataset) -> DominanceGraph:
    """Build the transitive reduction of the componentwise order on observed vectors.

    Pairwise comparison is O(N^2 d); the reduction removes edges implied by a
    two-step path, which is exactly transitivity on a closed relation.
    """
    vectors = sorted({r.criteria for r in ds.records})
    node_index = {vec: i for i, vec in enumerate(vectors)}
    n = len(vectors)
    record_nodes = np.array([node_index[r.criteria] for r in ds.records], dtype=int)
    multiplicity = np.bincount(record_nodes, minlength=n).astype(int) if n else np.zeros(0, dtype=int)

    if n == 0:
        edges = np.zeros((0, 2), dtype=int)
    else:
        X = np.array(vectors, dtype=float)
        leq = np.all(X[:, None, :] <= X[None, :, :], axis=2)
        np.fill_diagonal(leq, False)
        implied = (leq.astype(np.float64) @ leq.astype(np.float64)) > 0
        reduced = leq & ~implied
        us, ws = np.nonzero(reduced)
        edges = np.column_stack([us, ws]).astype(int)

    return DominanceGraph(
        nodes=tuple(vectors),
        multiplicity=multiplicity,
        edges=edges,
        record_nodes=record_nodes,
        node_index=node_index,
    )


def sorted_dominates(ya: Sequence[float], yb: Sequence[float]) -> bool:
    """True iff the ascending sort of ``ya`` pointwise dominates that of ``yb``."""
    a = np.asarray(ya, dtype=float)
    b = np.asarray(yb, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValidationError(
            f"score vectors must have equal length, got {a.shape} and {b.shape}"
        )
    return bool(np.all(np.sort(a) >= np.sort(b)))


def to_dot(graph: DominanceGraph) -> str:
    """DOT rendering of the DAG; node label = vector, annotation = multiplicity."""
    lines = ["digraph dominance {"]
    for i, vec in enumerate(graph.nodes):
        label = "(" + ", ".join(f"{x:g}" for x in vec) + ")"
        lines.append(f'  n{i} [label="{label} x{int(graph.multiplicity[i])}"];')
    for u, w in graph.edges:
        lines.append(f"  n{int(u)} -> n{int(w)};")
    lines.append("}")
    return "\n".join(lines)
