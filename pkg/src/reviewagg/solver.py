"""Two-phase solver for nested (p, q) loss over the monotone cone of a dominance DAG.

Phase 1 minimizes the loss by projected subgradient descent with a round-based
diminishing step schedule; the projection onto the edge constraints is a
Dykstra cycle over half-spaces, vectorized by an edge coloring. Phase 2 picks,
among near-minimizers, the one with the smallest review-weighted squared norm
via a penalized projected subgradient on the same feasible set. A per-node
left-median closed form covers the complete, shared-criteria case exactly, and
an exhaustive grid oracle is provided for cross-checking on tiny instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .dataset import Dataset, ValidationError, classify_setting
from .loss import INF, LpqConfig
from .order import DominanceGraph, build_dominance_graph

FEAS_TOL = 1e-8  # absolute feasibility tolerance on edge constraints

_PROJ_TOL = 1e-11
_PROJ_SWEEPS = 20_000
_ROUNDS = 8
_DECAY = 0.25
_REL_MARGIN = 1e-12  # ignore sub-rounding "improvements" when tracking best iterates
# Phase 2 consumes only a small fraction of the allowed tie slack: riding the
# full eps_tie budget would bias values by ~sqrt(slack/curvature) at smooth
# optima, which is far larger than the slack itself.
_TIE_SLACK_FRACTION = 1e-3
_PAIR_MOVE_CAP = 24  # pairwise tie-polish is quadratic in nodes; skip on large graphs
_BRUTE_MAX_NODES = 6
_BRUTE_MAX_GRID = 64
_BRUTE_MAX_CELLS = 30_000_000


class ExtensionRule(str, Enum):
    """How a learned function extends beyond the observed criteria vectors."""

    LOWER_ENVELOPE = "lower_envelope"
    UPPER_ENVELOPE = "upper_envelope"


@dataclass(eq=False)
class AggregateFunction:
    """Learned values at observed criteria vectors plus a monotone extension rule."""

    vectors: tuple[tuple[float, ...], ...]
    values: np.ndarray
    multiplicity: np.ndarray
    extension_rule: ExtensionRule = ExtensionRule.LOWER_ENVELOPE
    default_value: float = 0.0
    graph: DominanceGraph | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.multiplicity = np.asarray(self.multiplicity, dtype=int)
        self._matrix = np.array(self.vectors, dtype=float)
        self._index = {vec: i for i, vec in enumerate(self.vectors)}

    @property
    def d(self) -> int:
        return self._matrix.shape[1]

    @property
    def node_values(self) -> dict[tuple[float, ...], float]:
        return {vec: float(self.values[i]) for vec, i in self._index.items()}

    def feasibility_residual(self) -> float:
        if self.graph is None:
            raise ValidationError("no dominance graph attached to this function")
        return self.graph.feasibility_residual(self.values)

    def evaluate(self, x: Sequence[float]) -> float:
        """Value at an arbitrary criteria vector under the extension rule.

        Lower envelope: max learned value over observed vectors <= x, falling
        back to ``default_value`` when nothing is comparable below. The result
        is monotone in x by construction; observed vectors return their node
        value exactly.
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self.d,):
            raise ValidationError(f"expected a vector of length {self.d}, got shape {x.shape}")
        key = tuple(float(c) for c in x)
        hit = self._index.get(key)
        if hit is not None:
            return float(self.values[hit])
        if self.extension_rule is ExtensionRule.LOWER_ENVELOPE:
            mask = np.all(self._matrix <= x, axis=1)
            return float(self.values[mask].max()) if mask.any() else self.default_value
        mask = np.all(self._matrix >= x, axis=1)
        return float(self.values[mask].min()) if mask.any() else self.default_value

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.array([self.evaluate(row) for row in X])

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "extension_rule": self.extension_rule.value,
            "default_value": self.default_value,
            "entries": [
                {
                    "vector": list(vec),
                    "value": float(self.values[i]),
                    "multiplicity": int(self.multiplicity[i]),
                }
                for i, vec in enumerate(self.vectors)
            ],
        }

    @classmethod
    def from_json_dict(cls, payload: Mapping) -> "AggregateFunction":
        entries = payload["entries"]
        return cls(
            vectors=tuple(tuple(float(c) for c in e["vector"]) for e in entries),
            values=np.array([e["value"] for e in entries], dtype=float),
            multiplicity=np.array([e["multiplicity"] for e in entries], dtype=int),
            extension_rule=ExtensionRule(payload["extension_rule"]),
            default_value=float(payload["default_value"]),
        )


@dataclass
class SolveReport:
    objective: float
    tie_norm: float
    feasibility_residual: float
    iterations: int
    converged: bool

    def to_json_dict(self) -> dict:
        return {
            "objective": self.objective,
            "tie_norm": self.tie_norm,
            "feasibility_residual": self.feasibility_residual,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def left_median(xs: Sequence[float]) -> float:
    """Lower middle order statistic: the element of rank ceil(n/2) ascending."""
    arr = np.sort(np.asarray(xs, dtype=float))
    if arr.size == 0:
        raise ValidationError("left median of an empty collection is undefined")
    return float(arr[(arr.size - 1) // 2])


def evaluate(f: AggregateFunction, x: Sequence[float]) -> float:
    """Module-level alias for :meth:`AggregateFunction.evaluate`."""
    return f.evaluate(x)


class _Problem:
    """Array view of (dataset, graph) plus vectorized loss and subgradient."""

    def __init__(self, ds: Dataset, graph: DominanceGraph, p: float, q: float):
        self.p = p
        self.q = q
        self.node = graph.record_nodes
        self.y = np.array([r.overall for r in ds.records], dtype=float)
        reviewer_ids: dict[str, int] = {}
        wr = []
        for r in ds.records:
            wr.append(reviewer_ids.setdefault(r.reviewer_id, len(reviewer_ids)))
        self.wr = np.array(wr, dtype=int)
        self.n_rev = len(reviewer_ids)
        self.n_nodes = graph.n_nodes
        self.weights = graph.multiplicity.astype(float)
        self.edges = graph.edges
        self.edge_set = {(int(u), int(w)) for u, w in graph.edges}
        self.eu = graph.edges[:, 0] if len(graph.edges) else np.zeros(0, dtype=int)
        self.ew = graph.edges[:, 1] if len(graph.edges) else np.zeros(0, dtype=int)
        self.groups = _edge_groups(graph.edges)
        self.y_range = float(self.y.max() - self.y.min()) if self.y.size else 1.0
        self.y_absmax = float(np.abs(self.y).max()) if self.y.size else 1.0

    def _inner_norms(self, a: np.ndarray) -> np.ndarray:
        if self.p == INF:
            inner = np.zeros(self.n_rev)
            np.maximum.at(inner, self.wr, a)
            return inner
        amax = a.max() if a.size else 0.0
        if amax == 0.0:
            return np.zeros(self.n_rev)
        scaled = np.bincount(self.wr, weights=(a / amax) ** self.p, minlength=self.n_rev)
        return amax * scaled ** (1.0 / self.p)

    def loss(self, v: np.ndarray) -> float:
        a = np.abs(self.y - v[self.node])
        inner = self._inner_norms(a)
        if self.q == INF:
            return float(inner.max())
        imax = inner.max()
        if imax == 0.0:
            return 0.0
        return float(imax * ((inner / imax) ** self.q).sum() ** (1.0 / self.q))

    def loss_and_abs(self, v: np.ndarray) -> tuple[float, float]:
        """Loss plus the total absolute residual (plateau tie-breaker for max norms)."""
        a = np.abs(self.y - v[self.node])
        inner = self._inner_norms(a)
        if self.q == INF:
            L = float(inner.max())
        else:
            imax = inner.max()
            L = 0.0 if imax == 0.0 else float(imax * ((inner / imax) ** self.q).sum() ** (1.0 / self.q))
        return L, float(a.sum())

    def subgrad(self, v: np.ndarray) -> np.ndarray:
        res = self.y - v[self.node]
        a = np.abs(res)
        sgn = np.sign(res)
        inner = self._inner_norms(a)

        if self.q == INF:
            outer = np.zeros(self.n_rev)
            outer[int(np.argmax(inner))] = 1.0  # first max: deterministic tie rule
        else:
            total = self.loss(v)
            if total == 0.0:
                return np.zeros(self.n_nodes)
            outer = np.where(inner > 0, (inner / total) ** (self.q - 1.0), 0.0)

        if self.p == INF:
            c = np.zeros(len(self.y))
            # first maximizing review per contributing reviewer, in record order
            order = np.lexsort((np.arange(len(self.y)), -a, self.wr))
            firsts = order[np.unique(self.wr[order], return_index=True)[1]]
            for j in firsts:
                if outer[self.wr[j]] > 0:
                    c[j] = outer[self.wr[j]] * sgn[j]
        else:
            denom = inner[self.wr]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(denom > 0, a / denom, 0.0)
            c = outer[self.wr] * sgn * ratio ** (self.p - 1.0)
        return np.bincount(self.node, weights=-c, minlength=self.n_nodes)

    def tie_norm(self, v: np.ndarray) -> float:
        return float((self.weights * v * v).sum())

    def node_left_medians(self) -> np.ndarray:
        out = np.empty(self.n_nodes)
        for n in range(self.n_nodes):
            out[n] = left_median(self.y[self.node == n])
        return out

    def project(self, v: np.ndarray, tol: float = _PROJ_TOL, max_sweeps: int = _PROJ_SWEEPS) -> np.ndarray:
        return _project_monotone(v, self.groups, self.eu, self.ew, tol, max_sweeps)

    def node_bounds(self, v: np.ndarray, n: int) -> tuple[float, float]:
        """Feasible interval for node n holding every other coordinate fixed."""
        lo, hi = -math.inf, math.inf
        for u, w in self._adj(n):
            if w == n:
                lo = max(lo, v[u])
            else:
                hi = min(hi, v[w])
        return lo, hi

    def _adj(self, n: int):
        if not hasattr(self, "_adj_cache"):
            cache: dict[int, list[tuple[int, int]]] = {}
            for u, w in self.edges:
                cache.setdefault(int(u), []).append((int(u), int(w)))
                cache.setdefault(int(w), []).append((int(u), int(w)))
            self._adj_cache = cache
        return self._adj_cache.get(n, ())


def _edge_groups(edges: np.ndarray) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Partition edges into groups with pairwise-disjoint endpoints (greedy coloring)."""
    groups: list[tuple[list[int], list[int], list[int]]] = []
    used: list[set[int]] = []
    for e, (u, w) in enumerate(edges):
        u, w = int(u), int(w)
        for g, nodes in enumerate(used):
            if u not in nodes and w not in nodes:
                nodes.update((u, w))
                gu, gw, ge = groups[g]
                gu.append(u)
                gw.append(w)
                ge.append(e)
                break
        else:
            used.append({u, w})
            groups.append(([u], [w], [e]))
    return [
        (np.array(gu, dtype=int), np.array(gw, dtype=int), np.array(ge, dtype=int))
        for gu, gw, ge in groups
    ]


def _project_monotone(v, groups, eu, ew, tol, max_sweeps) -> np.ndarray:
    """Dykstra cycle over edge half-spaces {v_u <= v_w}, iterated to tolerance."""
    v = v.astype(float).copy()
    if len(eu) == 0:
        return v
    corr = np.zeros(len(eu))
    for _ in range(max_sweeps):
        for gu, gw, ge in groups:
            vu = v[gu] + corr[ge]
            vw = v[gw] - corr[ge]
            c = np.maximum(0.0, 0.5 * (vu - vw))
            v[gu] = vu - c
            v[gw] = vw + c
            corr[ge] = c
        if np.maximum(0.0, v[eu] - v[ew]).max() <= tol:
            break
    return v


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(fn, lo: float, hi: float, iters: int = 70) -> float:
    """Golden-section minimizer of a 1-D convex function on [lo, hi]."""
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = fn(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = fn(d)
    return 0.5 * (lo + hi)


def _tight_blocks(prob: _Problem, v: np.ndarray) -> list[np.ndarray]:
    """Connected components (size >= 2) of edges whose constraint is active."""
    tol = 1e-10 * max(1.0, prob.y_absmax)
    parent = list(range(prob.n_nodes))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, w in prob.edges:
        if v[int(w)] - v[int(u)] <= tol:
            ra, rb = find(int(u)), find(int(w))
            if ra != rb:
                parent[rb] = ra
    comps: dict[int, list[int]] = {}
    for n in range(prob.n_nodes):
        comps.setdefault(find(n), []).append(n)
    return [np.array(c, dtype=int) for c in comps.values() if len(c) >= 2]


def _block_bounds(prob: _Problem, v: np.ndarray, block: np.ndarray) -> tuple[float, float]:
    inside = set(int(b) for b in block)
    lo, hi = -math.inf, math.inf
    for u, w in prob.edges:
        u, w = int(u), int(w)
        if w in inside and u not in inside:
            lo = max(lo, v[u])
        elif u in inside and w not in inside:
            hi = min(hi, v[w])
    return lo, hi


def _polish_loss(prob: _Problem, v: np.ndarray, best_L: float, passes: int = 4):
    """Cyclic exact line searches on the loss over single nodes and tight blocks.

    Each subproblem is convex and feasibility is kept via the induced bounds.
    Blocks (components of active edge constraints) move as one variable, which
    is what single-coordinate moves cannot do when a constraint binds. The
    search objective is lexicographic (loss, total absolute residual): max-type
    losses have per-coordinate plateaus, and the secondary term walks along
    them toward interpolation points so that later coordinates can descend.
    """
    v = v.copy()
    ymin, ymax = float(prob.y.min()), float(prob.y.max())
    margin = _REL_MARGIN * max(1.0, abs(best_L))

    def line_search(idx, lo, hi):
        nonlocal best_L, v
        lo, hi = max(lo, ymin), min(hi, ymax)
        if not lo < hi:
            return False
        old = v[idx].copy() if np.ndim(idx) else v[idx]

        def fn(x):
            v[idx] = x
            val = prob.loss_and_abs(v)
            v[idx] = old
            return val

        cur_L, cur_S = fn(old if np.ndim(idx) == 0 else float(np.mean(old)))
        x_star = _golden_min(fn, lo, hi)
        L, S = fn(x_star)
        if L < best_L - margin:
            v[idx] = x_star
            best_L = L
            return True
        if L <= best_L + margin and S < cur_S - margin:
            v[idx] = x_star  # loss-flat move that strictly reduces total residual
            best_L = min(best_L, L)
            return True
        return False

    for _ in range(passes):
        gained = False
        for n in range(prob.n_nodes):
            gained |= line_search(n, *prob.node_bounds(v, n))
        for block in _tight_blocks(prob, v):
            saved = v[block].copy()
            v[block] = float(saved.mean())
            if line_search(block, *_block_bounds(prob, v, block)):
                gained = True
            else:
                v[block] = saved
        if not gained:
            break
    return v, best_L


def _polish_tie(prob: _Problem, v: np.ndarray, budget: float, passes: int = 4):
    """Cyclic norm reduction within the loss budget, over single nodes and tight blocks.

    For fixed other coordinates the budget-feasible set of one node (or of one
    uniformly-moving block) is an interval, so the norm-minimal point is the
    interval point closest to 0; its boundary is located by bisection on the
    convex coordinate loss.
    """
    v = v.copy()

    def toward_zero(idx, lo, hi, x0) -> bool:
        target = min(max(0.0, lo), hi)
        if target == x0:
            return False
        old = v[idx].copy() if np.ndim(idx) else v[idx]

        def loss_at(x):
            v[idx] = x
            val = prob.loss(v)
            v[idx] = old
            return val

        if loss_at(x0) > budget:
            return False
        if loss_at(target) <= budget:
            x_new = target
        else:
            feas, infeas = x0, target
            for _ in range(70):
                mid = 0.5 * (feas + infeas)
                if loss_at(mid) <= budget:
                    feas = mid
                else:
                    infeas = mid
            x_new = feas
        if abs(x_new) < abs(x0) - _REL_MARGIN * max(1.0, abs(x0)):
            v[idx] = x_new
            return True
        return False

    def pair_slide(i: int, j: int) -> bool:
        # move v_i up and v_j down at constant rate: descends the weighted norm
        # along flat faces that single-coordinate moves cannot follow
        wi, wj = prob.weights[i], prob.weights[j]
        t_star = (wj * v[j] - wi * v[i]) / (wi + wj)
        if t_star <= 0:
            return False
        _, hi_i = prob.node_bounds(v, i)
        lo_j, _ = prob.node_bounds(v, j)
        t_max = min(t_star, hi_i - v[i], v[j] - lo_j)
        if (i, j) in prob.edge_set:
            t_max = min(t_max, 0.5 * (v[j] - v[i]))
        if t_max <= 0:
            return False

        base_norm = wi * v[i] ** 2 + wj * v[j] ** 2

        def loss_at(t):
            oi, oj = v[i], v[j]
            v[i], v[j] = oi + t, oj - t
            val = prob.loss(v)
            v[i], v[j] = oi, oj
            return val

        if loss_at(0.0) > budget:
            return False
        if loss_at(t_max) <= budget:
            t_new = t_max
        else:
            feas, infeas = 0.0, t_max
            for _ in range(70):
                mid = 0.5 * (feas + infeas)
                if loss_at(mid) <= budget:
                    feas = mid
                else:
                    infeas = mid
            t_new = feas
        new_norm = wi * (v[i] + t_new) ** 2 + wj * (v[j] - t_new) ** 2
        if new_norm < base_norm - _REL_MARGIN * max(1.0, base_norm):
            v[i] += t_new
            v[j] -= t_new
            return True
        return False

    for _ in range(passes):
        gained = False
        for n in range(prob.n_nodes):
            lo, hi = prob.node_bounds(v, n)
            gained |= toward_zero(n, lo, hi, v[n])
        for block in _tight_blocks(prob, v):
            saved = v[block].copy()
            common = float(saved.mean())
            v[block] = common
            lo, hi = _block_bounds(prob, v, block)
            if toward_zero(block, lo, hi, common):
                gained = True
            else:
                v[block] = saved
        if prob.n_nodes <= _PAIR_MOVE_CAP:
            for i in range(prob.n_nodes):
                for j in range(prob.n_nodes):
                    if i != j:
                        gained |= pair_slide(i, j)
        if not gained:
            break
    return v


def _phase1(prob: _Problem, v0: np.ndarray, cfg: LpqConfig):
    best_v = v0.copy()
    best_L = prob.loss(best_v)
    T = max(1, cfg.max_iters // _ROUNDS)
    alpha0 = 0.5 * max(1.0, prob.y_range)
    iters = 0
    for r in range(_ROUNDS):
        a_r = alpha0 * _DECAY**r
        v = best_v.copy()
        for t in range(1, T + 1):
            iters += 1
            g = prob.subgrad(v)
            gn = float(np.linalg.norm(g))
            if gn > 0:
                v = prob.project(v - (a_r / math.sqrt(t)) * g / gn)
            L = prob.loss(v)
            if L < best_L - _REL_MARGIN * max(1.0, abs(best_L)):
                best_L, best_v = L, v.copy()
        # one exact coordinate pass between rounds breaks narrow-valley crawls
        best_v, best_L = _polish_loss(prob, best_v, best_L, passes=1)
    return best_v, best_L, iters


def _phase2(prob: _Problem, v_start: np.ndarray, budget: float, cfg: LpqConfig):
    kappa = 1e4 * max(1.0, prob.y_absmax)
    best_v = v_start.copy()
    best_N = prob.tie_norm(best_v)
    T = max(1, cfg.max_iters // _ROUNDS)
    alpha0 = 0.5 * max(1.0, prob.y_range)
    iters = 0
    for r in range(_ROUNDS):
        a_r = alpha0 * _DECAY**r
        v = best_v.copy()
        for t in range(1, T + 1):
            iters += 1
            g = 2.0 * prob.weights * v
            if prob.loss(v) > budget:
                g = g + kappa * prob.subgrad(v)
            gn = float(np.linalg.norm(g))
            if gn > 0:
                v = prob.project(v - (a_r / math.sqrt(t)) * g / gn)
            if prob.loss(v) <= budget:
                N = prob.tie_norm(v)
                if N < best_N - _REL_MARGIN * max(1.0, best_N):
                    best_N, best_v = N, v.copy()
        polished = _polish_tie(prob, best_v, budget, passes=1)
        if prob.tie_norm(polished) < best_N:
            best_v, best_N = polished, prob.tie_norm(polished)
    return best_v, iters


def _build_function(graph: DominanceGraph, values: np.ndarray,
                    rule: ExtensionRule = ExtensionRule.LOWER_ENVELOPE) -> AggregateFunction:
    default = float(values.min()) if rule is ExtensionRule.LOWER_ENVELOPE else float(values.max())
    return AggregateFunction(
        vectors=graph.nodes,
        values=values.copy(),
        multiplicity=graph.multiplicity.copy(),
        extension_rule=rule,
        default_value=default,
        graph=graph,
    )


def solve_l11_closed_form(ds: Dataset, graph: DominanceGraph | None = None) -> AggregateFunction:
    """Exact p = q = 1 solution for the complete, shared-criteria setting.

    Each node's value is the left median of its attached overall scores. The
    result is guaranteed feasible only when every reviewer scores monotonically
    across papers; callers must inspect :meth:`AggregateFunction.feasibility_residual`
    and fall back to :func:`solve` when it exceeds ``FEAS_TOL``.
    """
    flags = classify_setting(ds)
    if not (flags.is_complete and flags.is_objective):
        raise ValidationError(
            "closed form requires every reviewer to review every paper and "
            "per-paper criteria vectors to be reviewer-independent"
        )
    if graph is None:
        graph = build_dominance_graph(ds)
    prob = _Problem(ds, graph, 1.0, 1.0)
    return _build_function(graph, prob.node_left_medians())


def solve(ds: Dataset, graph: DominanceGraph, cfg: LpqConfig) -> tuple[AggregateFunction, SolveReport]:
    """Minimize the nested (p, q) loss over the monotone cone, then break ties.

    Returns the aggregate function and a report. On hitting the iteration cap
    without stabilizing, the best iterate is still returned with
    ``converged=False``. The tie-break minimizes the review-weighted squared
    norm (a node shared by k reviews carries weight k) subject to staying
    within ``eps_tie`` of the phase-1 objective.
    """
    if len(ds) == 0:
        raise ValidationError("cannot solve on an empty dataset")

    prob = _Problem(ds, graph, cfg.p, cfg.q)

    if cfg.p == 1.0 and cfg.q == 1.0 and cfg.use_closed_form:
        flags = classify_setting(ds)
        if flags.is_complete and flags.is_objective and prob.y.min() >= 0.0:
            values = prob.node_left_medians()
            if graph.feasibility_residual(values) <= FEAS_TOL:
                f = _build_function(graph, values)
                report = SolveReport(
                    objective=prob.loss(values),
                    tie_norm=prob.tie_norm(values),
                    feasibility_residual=graph.feasibility_residual(values),
                    iterations=0,
                    converged=True,
                )
                return f, report

    v0 = prob.project(prob.node_left_medians())
    v1, L1, it1 = _phase1(prob, v0, cfg)
    v1, L1 = _polish_loss(prob, v1, L1)
    # stability certificate: a further exact coordinate pass must be unable to
    # improve the objective by more than the relative tolerance
    v_check, L_check = _polish_loss(prob, v1, L1, passes=1)
    converged = (L1 - L_check) <= cfg.eps_obj * max(1.0, abs(L_check))
    v1, L1 = v_check, L_check
    # Contract: the tie-break stays within loss <= L1 + eps_tie * max(1, L1);
    # only a fraction of that slack is spent, see _TIE_SLACK_FRACTION.
    budget = L1 + _TIE_SLACK_FRACTION * cfg.eps_tie * max(1.0, abs(L1))
    v2, it2 = _phase2(prob, v1, budget, cfg)
    v2 = _polish_tie(prob, v2, budget)
    v_final = prob.project(v2)

    residual = graph.feasibility_residual(v_final)
    f = _build_function(graph, v_final)
    report = SolveReport(
        objective=prob.loss(v_final),
        tie_norm=prob.tie_norm(v_final),
        feasibility_residual=residual,
        iterations=it1 + it2,
        converged=bool(converged and residual <= FEAS_TOL),
    )
    return f, report


def brute_force_solve(
    ds: Dataset,
    graph: DominanceGraph,
    cfg: LpqConfig,
    value_grid: Sequence[float],
) -> tuple[AggregateFunction, SolveReport]:
    """Exhaustive oracle: best monotone assignment of grid values to nodes.

    Enumerates every assignment in ``value_grid ** n_nodes``, keeps the
    monotone ones, and returns the global grid optimum. Ties within
    ``eps_tie`` (relative) of the best loss are broken by smallest
    review-weighted squared norm, then lexicographically smallest values.
    Only valid on tiny instances; see the size guards below.
    """
    grid = np.unique(np.asarray(value_grid, dtype=float))
    n = graph.n_nodes
    G = len(grid)
    if n > _BRUTE_MAX_NODES:
        raise ValidationError(f"brute force supports at most {_BRUTE_MAX_NODES} nodes, got {n}")
    if G > _BRUTE_MAX_GRID:
        raise ValidationError(f"brute force supports at most {_BRUTE_MAX_GRID} grid values, got {G}")
    if G**n > _BRUTE_MAX_CELLS:
        raise ValidationError(f"grid**nodes = {G**n} exceeds the enumeration bound {_BRUTE_MAX_CELLS}")
    if len(ds) == 0:
        raise ValidationError("cannot solve on an empty dataset")

    prob = _Problem(ds, graph, cfg.p, cfg.q)

    def axis_view(arr: np.ndarray, node: int) -> np.ndarray:
        shape = [1] * n
        shape[node] = G
        return arr.reshape(shape)

    # inner norm per reviewer, broadcast over all assignments
    inners = []
    for i in range(prob.n_rev):
        idx = np.nonzero(prob.wr == i)[0]
        if cfg.p == INF:
            acc = None
            for j in idx:
                term = axis_view(np.abs(prob.y[j] - grid), int(prob.node[j]))
                acc = term if acc is None else np.maximum(acc, term)
            inners.append(acc + np.zeros([G] * n))
        else:
            acc = np.zeros([G] * n)
            for j in idx:
                acc = acc + axis_view(np.abs(prob.y[j] - grid) ** cfg.p, int(prob.node[j]))
            inners.append(acc ** (1.0 / cfg.p))

    if cfg.q == INF:
        loss = np.maximum.reduce(inners)
    else:
        loss = np.zeros([G] * n)
        for inner in inners:
            loss = loss + inner**cfg.q
        loss = loss ** (1.0 / cfg.q)
    del inners

    feasible = np.ones([G] * n, dtype=bool)
    for u, w in graph.edges:
        feasible &= axis_view(grid, int(u)) <= axis_view(grid, int(w))

    masked = np.where(feasible, loss, np.inf)
    best_loss = float(masked.min())
    tie_mask = feasible & (loss <= best_loss + cfg.eps_tie * max(1.0, best_loss))

    norm_t = np.zeros([G] * n)
    for node in range(n):
        norm_t = norm_t + prob.weights[node] * axis_view(grid**2, node)
    norm_masked = np.where(tie_mask, norm_t, np.inf)
    best_norm = float(norm_masked.min())
    winners = tie_mask & (norm_t == best_norm)
    flat = int(np.argmax(winners.ravel()))  # first True in C order = lexicographic order
    idxs = np.unravel_index(flat, winners.shape)
    values = grid[np.array(idxs)]

    f = _build_function(graph, values)
    report = SolveReport(
        objective=float(loss[idxs]),
        tie_norm=float(norm_t[idxs]),
        feasibility_residual=graph.feasibility_residual(values),
        iterations=int(G**n),
        converged=True,
    )
    return f, report
