"""Acceptance gate: every release-blocking behavior, each printing one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import time

import numpy as np
import pytest

from reviewagg import (
    FEAS_TOL,
    INF,
    LpqConfig,
    PaperScore,
    brute_force_solve,
    build_dominance_graph,
    check_consensus,
    check_efficiency,
    check_strategyproofness,
    efficiency_limit_minimizer,
    efficiency_limit_objective,
    generate_dataset,
    lpq_method,
    make_consensus_instance,
    make_fermat_instance,
    make_sp_instance,
    select_top,
    slice_grid,
    solve,
    solve_l11_closed_form,
    subsample_experiment,
)
from reviewagg.axioms import random_axiom_instance
from conftest import tiny_instance


def _line(name: str, ok: bool, detail: str = "") -> bool:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {name}: {status}{suffix}")
    return ok


def test_criterion_1_triangle_efficiency_counterexample():
    t0 = time.perf_counter()
    ds = make_fermat_instance(2.0).to_dataset()
    graph = build_dominance_graph(ds)
    f, _ = solve(ds, graph, LpqConfig(p=2, q=1))
    elapsed = time.perf_counter() - t0
    v1 = f.node_values[(1.0, 2.0)]
    v2 = f.node_values[(2.0, 1.0)]
    ok = abs(v1 - 0.25) <= 0.01 and abs(v2 - 0.30) <= 0.01 and v1 < v2 and elapsed < 1.0
    assert _line(
        "1 triangle counterexample",
        ok,
        f"values=({v1:.4f}, {v2:.4f}), {elapsed:.2f}s",
    )


def test_criterion_2_manipulation_counterexample():
    ok = True
    details = []
    for p in (1.0, 2.0):
        for q in (2.0, 3.0, INF):
            method = lpq_method(p, q)
            inst = make_sp_instance()
            truth = float(method(inst)[0])
            manip = float(method(inst.with_row(0, [2.0]))[0])
            d_before = abs(truth - 1.0)
            d_after = abs(manip - 1.0)
            case_ok = (
                abs(truth - 0.5) <= 1e-3
                and abs(manip - 1.0) <= 1e-3
                and abs(d_before - 0.5) <= 1e-3
                and d_after <= 1e-3
            )
            ok &= case_ok
            details.append(f"p={p:g},q={q:g}:{'ok' if case_ok else 'BAD'}")
    assert _line("2 manipulation counterexample", ok, " ".join(details))


def test_criterion_3_unanimity_counterexample():
    method = lpq_method(INF, 1.0)
    values = method(make_consensus_instance())
    ok = (
        abs(values[0] - 0.5) <= 1e-3
        and abs(values[1] - 0.5) <= 1e-3
        and abs(values[1] - 1.0) >= 0.49
    )
    assert _line("3 unanimity counterexample", ok, f"values={np.round(values, 4).tolist()}")


def test_criterion_4_median_closed_form_equivalence():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for trial in range(50):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(2, 5))
        ds = generate_dataset(n=n, m=m, d=2, noise=0.0, seed=40_000 + trial,
                              reviews_per_paper=n)
        graph = build_dominance_graph(ds)
        closed = solve_l11_closed_form(ds, graph)
        assert closed.feasibility_residual() <= FEAS_TOL
        # closed-form shortcut disabled so the iterative path itself is validated
        f, _ = solve(ds, graph, LpqConfig(p=1, q=1, use_closed_form=False))
        worst = max(worst, float(np.abs(f.values - closed.values).max()))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-4 and elapsed < 30.0
    assert _line(
        "4 median closed-form equivalence",
        ok,
        f"50 instances, worst dev={worst:.2e}, {elapsed:.1f}s",
    )


def test_criterion_5_grid_oracle_equivalence():
    rng = np.random.default_rng(777)
    combos = [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0), (2.0, 2.0), (INF, 1.0), (1.0, INF)]
    t0 = time.perf_counter()
    worst_gap = -np.inf
    worst_res = 0.0
    for _ in range(50):
        ds, graph, grid = tiny_instance(rng)
        for p, q in combos:
            cfg = LpqConfig(p=p, q=q, max_iters=1600)
            _, report = solve(ds, graph, cfg)
            _, oracle = brute_force_solve(ds, graph, cfg, grid)
            slack = cfg.eps_obj * (1.0 + abs(oracle.objective))
            worst_gap = max(worst_gap, report.objective - oracle.objective - slack)
            worst_res = max(worst_res, report.feasibility_residual)
            assert report.objective <= oracle.objective + slack
            assert report.feasibility_residual <= 1e-8
    elapsed = time.perf_counter() - t0
    ok = worst_gap <= 0 and worst_res <= 1e-8 and elapsed < 300.0
    assert _line(
        "5 grid oracle equivalence",
        ok,
        f"50 instances x 6 exponent pairs, {elapsed:.0f}s, max residual={worst_res:.1e}",
    )


def test_criterion_6_median_aggregation_positive_suite():
    rng = np.random.default_rng(99)
    method = lpq_method(1.0, 1.0)
    violations = 0
    for _ in range(100):
        inst = random_axiom_instance(rng)
        if not check_consensus(inst, method).holds:
            violations += 1
        if not check_efficiency(inst, method).holds:
            violations += 1
        if not check_strategyproofness(inst, method).holds:
            violations += 1
    ok = violations == 0
    assert _line("6 positive axiom suite", ok, f"100 instances, violations={violations}")


def _grid_minimize_unit_square(fn, step=1e-3, refinements=3):
    lo1, hi1, lo2, hi2 = 0.0, 1.0, 0.0, 1.0
    best = None
    for _ in range(refinements + 1):
        g1 = np.arange(lo1, hi1 + step / 2, step)
        g2 = np.arange(lo2, hi2 + step / 2, step)
        F1, F2 = np.meshgrid(g1, g2, indexing="ij")
        H = fn(F1, F2)
        i, j = np.unravel_index(np.argmin(H), H.shape)
        best = (float(g1[i]), float(g2[j]))
        w = 2 * step
        lo1, hi1 = max(0.0, best[0] - w), min(1.0, best[0] + w)
        lo2, hi2 = max(0.0, best[1] - w), min(1.0, best[1] + w)
        step /= 10.0
    return best


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_criterion_7_limit_anchor(p):
    vhat = efficiency_limit_minimizer(p)

    grid_min = _grid_minimize_unit_square(lambda a, b: efficiency_limit_objective(a, b, p))
    grid_err = max(abs(grid_min[0] - vhat[0]), abs(grid_min[1] - vhat[1]))
    grid_ok = grid_err <= 2e-3

    ds = make_fermat_instance(50.0).to_dataset()
    graph = build_dominance_graph(ds)
    f, _ = solve(ds, graph, LpqConfig(p=p, q=1))
    got = (f.node_values[(1.0, 2.0)], f.node_values[(2.0, 1.0)])
    solve_err = max(abs(got[0] - vhat[0]), abs(got[1] - vhat[1]))
    solve_ok = solve_err <= 0.02

    ok = grid_ok and solve_ok
    _line(
        f"7 limit anchor p={p}",
        ok,
        f"grid err={grid_err:.1e}, z=50 solve err vs limit={solve_err:.3f}",
    )
    assert grid_ok, f"grid minimization off by {grid_err}"
    assert solve_ok, (
        f"p={p}: solve at z=50 sits {solve_err:.3f} away from the limit point "
        f"{vhat}; the finite-z minimizer at z=50 is {got} and converges to the "
        f"limit only as z grows"
    )


def test_criterion_8_pipeline_determinism_and_shape():
    ds = generate_dataset(n=30, m=40, d=3, noise=0.7, seed=4242)
    cfg = LpqConfig(p=1, q=1)
    max_reviews = max(len(rs) for rs in ds.paper_index.values())
    runs = [
        subsample_experiment(ds, cfg, k_max=max_reviews, trials=3, seed=11, fraction=0.2727)
        for _ in range(2)
    ]
    identical = runs[0] == runs[1]
    saturated = runs[0][-1].mean_overlap == 1.0

    monotone = True
    rng = np.random.default_rng(5151)
    for trial in range(10):
        small = generate_dataset(n=8, m=12, d=3, noise=0.8, seed=60_000 + trial,
                                 reviews_per_paper=3)
        graph = build_dominance_graph(small)
        f, _ = solve(small, graph, cfg)
        i, j = rng.choice(3, size=2, replace=False)
        table = slice_grid(f, small, vary=(int(i), int(j)), grid=np.arange(1.0, 11.0))
        monotone &= bool(np.all(np.diff(table, axis=0) >= -1e-12))
        monotone &= bool(np.all(np.diff(table, axis=1) >= -1e-12))

    ok = identical and saturated and monotone
    assert _line(
        "8 pipeline determinism and shape",
        ok,
        f"bit-identical={identical}, saturated overlap={runs[0][-1].mean_overlap}, "
        f"monotone slices={monotone}",
    )


def test_criterion_9_selection_arithmetic():
    scores = [PaperScore(f"p{i:05d}", float(i % 97)) for i in range(2380)]
    result = select_top(scores, 0.2727)
    ok = result.k == 649
    assert _line("9 selection arithmetic", ok, f"k={result.k}")
