"""Command-line interface: ingest, solve, axiom checks, and selection experiments.

Exit codes: 0 success, 1 input error, 2 convergence issue, 3 axiom-expectation
mismatch. All outputs are written under the configured output directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .axioms import (
    LpqAggregationMethod,
    check_consensus,
    check_efficiency,
    check_strategyproofness,
    make_consensus_instance,
    make_fermat_instance,
    make_sp_instance,
    random_axiom_instance,
)
from .dataset import Dataset, DatasetError, ingest_csv, write_csv
from .loss import INF, LpqConfig, per_reviewer_normalized_loss
from .order import build_dominance_graph
from .pipeline import (
    aggregate_papers,
    pq_overlap_matrix,
    render_heatmap_svg,
    slice_grid,
    subsample_experiment,
)
from .solver import solve
from .synth import generate_dataset


def _parse_exponent(text: str) -> float:
    if text.strip().lower() in {"inf", "infinity"}:
        return INF
    return float(text)


def _parse_exponent_list(text: str) -> list[float]:
    return [_parse_exponent(tok) for tok in text.split(",") if tok.strip()]


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, step = (float(tok) for tok in text.split(":"))
    except ValueError:
        raise DatasetError(f"grid must look like lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise DatasetError(f"invalid grid spec {text!r}")
    return np.arange(lo, hi + step / 2, step)


def _parse_vary(text: str) -> tuple[int, int]:
    try:
        i, j = (int(tok) for tok in text.split(","))
    except ValueError:
        raise DatasetError(f"vary must look like i,j, got {text!r}") from None
    return i, j


def _cfg_from_args(args) -> LpqConfig:
    return LpqConfig(
        p=args.p,
        q=args.q,
        eps_obj=args.eps_obj,
        eps_tie=args.eps_tie,
        max_iters=args.max_iters,
    )


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(args) -> Dataset:
    if args.input is None:
        raise DatasetError("--input is required for this command")
    return ingest_csv(args.input, d=args.d)


def cmd_solve(args) -> int:
    ds = _load(args)
    out = _outdir(args)
    graph = build_dominance_graph(ds)
    f, report = solve(ds, graph, _cfg_from_args(args))
    (out / "aggregate.json").write_text(json.dumps(f.to_json_dict(), indent=2))
    (out / "report.json").write_text(json.dumps(report.to_json_dict(), indent=2))
    with (out / "paper_scores.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["paper_id", "aggregate"])
        for score in aggregate_papers(f, ds):
            writer.writerow([score.paper_id, repr(score.aggregate)])
    print(f"objective={report.objective:.6g} converged={report.converged} -> {out}")
    return 0 if report.converged else 2


def cmd_axioms(args) -> int:
    out = _outdir(args)
    method = LpqAggregationMethod(_cfg_from_args(args))
    verdicts = []

    v = check_consensus(make_consensus_instance(), method)
    verdicts.append(("consensus", v))

    # efficiency: escalate the constructed score gap until a violation shows
    # or the candidates are exhausted
    for z in (2.0, 10.0, 50.0):
        v = check_efficiency(make_fermat_instance(z), method)
        if not v.holds:
            break
    verdicts.append(("efficiency", v))

    v = check_strategyproofness(make_sp_instance(), method)
    verdicts.append(("strategyproofness", v))

    # randomized suite; the full manipulation search is only affordable when
    # the exact median route applies (p = q = 1)
    rng = np.random.default_rng(args.seed)
    full_search = args.p == 1.0 and args.q == 1.0
    for t in range(args.trials):
        inst = random_axiom_instance(rng)
        verdicts.append((f"consensus/random-{t}", check_consensus(inst, method)))
        verdicts.append((f"efficiency/random-{t}", check_efficiency(inst, method)))
        if full_search:
            verdicts.append(
                (f"strategyproofness/random-{t}", check_strategyproofness(inst, method))
            )

    if any(not r.converged for r in method.reports):
        print("solver failed to converge during an axiom check", file=sys.stderr)
        return 2

    payload = [
        {"axiom": name, "p": args.p, "q": args.q, **verdict.to_json_dict()}
        for name, verdict in verdicts
    ]
    (out / "axioms.json").write_text(json.dumps(payload, indent=2))

    all_hold = all(verdict.holds for _, verdict in verdicts)
    expected_all_hold = args.p == 1.0 and args.q == 1.0
    for name, verdict in verdicts:
        if not verdict.holds:
            print(f"violated: {name}")
    if all_hold == expected_all_hold:
        print(f"verdicts match expectation for p={args.p}, q={args.q}")
        return 0
    print(
        f"discrepancy: expected all_hold={expected_all_hold} for p={args.p}, "
        f"q={args.q}, observed all_hold={all_hold}",
        file=sys.stderr,
    )
    return 3


def cmd_subsample(args) -> int:
    ds = _load(args)
    out = _outdir(args)
    rows = subsample_experiment(
        ds, _cfg_from_args(args), k_max=args.kmax, trials=args.trials,
        seed=args.seed, fraction=args.fraction,
    )
    with (out / "subsample.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "mean_overlap", "ci_half_width"])
        for row in rows:
            writer.writerow([row.k, repr(row.mean_overlap), repr(row.ci_half_width)])
    print(f"subsample table with {len(rows)} rows -> {out / 'subsample.csv'}")
    return 0


def cmd_pq_grid(args) -> int:
    ds = _load(args)
    out = _outdir(args)
    ps = _parse_exponent_list(args.ps)
    qs = _parse_exponent_list(args.qs)
    base = LpqConfig(eps_obj=args.eps_obj, eps_tie=args.eps_tie, max_iters=args.max_iters)
    matrix = pq_overlap_matrix(ds, ps, qs, fraction=args.fraction, cfg_base=base)
    labels = [f"p={p:g},q={q:g}" for p, q in matrix.combos]
    with (out / "pq_overlap.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["combo", *labels, "converged"])
        for i, label in enumerate(labels):
            writer.writerow(
                [label, *[repr(float(x)) for x in matrix.values[i]], matrix.converged[i]]
            )
    if not all(matrix.converged):
        flagged = [lab for lab, ok in zip(labels, matrix.converged) if not ok]
        print(f"warning: non-converged cells: {flagged}", file=sys.stderr)
    print(f"{len(labels)}x{len(labels)} overlap matrix -> {out / 'pq_overlap.csv'}")
    return 0


def cmd_slice(args) -> int:
    ds = _load(args)
    out = _outdir(args)
    graph = build_dominance_graph(ds)
    f, report = solve(ds, graph, _cfg_from_args(args))
    i, j = _parse_vary(args.vary)
    grid = _parse_grid(args.grid)
    table = slice_grid(f, ds, vary=(i, j), grid=grid)
    csv_path = out / f"slice_{i}_{j}.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["", *[f"{g:g}" for g in grid]])
        for r, g in enumerate(grid):
            writer.writerow([f"{g:g}", *[repr(float(x)) for x in table[r]]])
    svg_path = out / f"slice_{i}_{j}.svg"
    svg_path.write_text(render_heatmap_svg(table, title=f"criteria {i} x {j}"))
    print(f"slice table -> {csv_path}, heatmap -> {svg_path}")
    return 0 if report.converged else 2


def cmd_loss_hist(args) -> int:
    ds = _load(args)
    out = _outdir(args)
    graph = build_dominance_graph(ds)
    f, report = solve(ds, graph, _cfg_from_args(args))
    values = f.node_values
    losses = [
        per_reviewer_normalized_loss(values, ds, reviewer)
        for reviewer in sorted(ds.reviewer_index)
    ]
    edges = np.arange(0.0, 9.0 + 0.25, 0.25)
    counts, _ = np.histogram(losses, bins=edges)
    with (out / "loss_hist.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_lo", "bin_hi", "count"])
        for k, count in enumerate(counts):
            writer.writerow([repr(float(edges[k])), repr(float(edges[k + 1])), int(count)])
    mean = float(np.mean(losses))
    std = float(np.std(losses))
    print(f"normalized loss: mean={mean:.3f} std={std:.3f} -> {out / 'loss_hist.csv'}")
    return 0 if report.converged else 2


def cmd_synth(args) -> int:
    out = _outdir(args)
    ds = generate_dataset(
        n=args.n, m=args.m, d=args.d, noise=args.noise, seed=args.seed,
        reviews_per_paper=args.reviews_per_paper,
    )
    path = out / "dataset.csv"
    write_csv(ds, path)
    print(f"{len(ds)} reviews ({ds.n_reviewers} reviewers, {ds.n_papers} papers) -> {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reviewagg",
        description=(
            "Learn a community consensus mapping from per-criterion review "
            "scores to overall recommendations, check social-choice axioms, "
            "and run selection experiments."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(sp, input_required=True):
        sp.add_argument("--input", help="input dataset CSV", default=None)
        sp.add_argument("--d", type=int, default=2, help="criteria dimensionality")
        sp.add_argument("--out", default=".", help="output directory")

    def add_pq(sp):
        sp.add_argument("--p", type=_parse_exponent, default=1.0,
                        help="inner norm exponent in [1, inf]; 'inf' accepted")
        sp.add_argument("--q", type=_parse_exponent, default=1.0,
                        help="outer norm exponent in [1, inf]; 'inf' accepted")
        sp.add_argument("--eps-obj", type=float, default=1e-7, dest="eps_obj")
        sp.add_argument("--eps-tie", type=float, default=1e-6, dest="eps_tie")
        sp.add_argument("--max-iters", type=int, default=3200, dest="max_iters")

    sp = sub.add_parser("solve", help="learn the aggregate function and score papers")
    add_io(sp)
    add_pq(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("axioms", help="run axiom checks for a (p, q) configuration")
    add_io(sp)
    add_pq(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=20, help="random instances to test")
    sp.set_defaults(func=cmd_axioms)

    sp = sub.add_parser("subsample", help="overlap vs. reviews-per-paper experiment")
    add_io(sp)
    add_pq(sp)
    sp.add_argument("--fraction", type=float, default=0.2727)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--kmax", type=int, default=5)
    sp.set_defaults(func=cmd_subsample)

    sp = sub.add_parser("pq-grid", help="pairwise selection overlap across (p, q) choices")
    add_io(sp)
    sp.add_argument("--p", default="1,2,3", dest="ps", help="comma-separated p values")
    sp.add_argument("--q", default="1,2,3", dest="qs", help="comma-separated q values")
    sp.add_argument("--fraction", type=float, default=0.2727)
    sp.add_argument("--eps-obj", type=float, default=1e-7, dest="eps_obj")
    sp.add_argument("--eps-tie", type=float, default=1e-6, dest="eps_tie")
    sp.add_argument("--max-iters", type=int, default=3200, dest="max_iters")
    sp.set_defaults(func=cmd_pq_grid)

    sp = sub.add_parser("slice", help="2-D slice of the learned function at modal anchors")
    add_io(sp)
    add_pq(sp)
    sp.add_argument("--vary", default="0,1", help="two criterion indices, e.g. 0,1")
    sp.add_argument("--grid", default="1:10:1", help="slice grid as lo:hi:step")
    sp.set_defaults(func=cmd_slice)

    sp = sub.add_parser("loss-hist", help="histogram of per-reviewer normalized losses")
    add_io(sp)
    add_pq(sp)
    sp.set_defaults(func=cmd_loss_hist)

    sp = sub.add_parser("synth", help="generate a synthetic review dataset")
    sp.add_argument("--out", default=".")
    sp.add_argument("--n", type=int, default=30, help="number of reviewers")
    sp.add_argument("--m", type=int, default=40, help="number of papers")
    sp.add_argument("--d", type=int, default=3, help="criteria dimensionality")
    sp.add_argument("--noise", type=float, default=0.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--reviews-per-paper", type=int, default=4, dest="reviews_per_paper")
    sp.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
