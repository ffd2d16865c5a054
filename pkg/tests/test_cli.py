import csv
import json

import pytest

from reviewagg.cli import main


@pytest.fixture()
def synth_csv(tmp_path):
    out = tmp_path / "synth"
    assert main(["synth", "--out", str(out), "--n", "6", "--m", "8", "--d", "2",
                 "--noise", "0.5", "--seed", "3"]) == 0
    return out / "dataset.csv"


def test_synth_is_deterministic(tmp_path):
    out1, out2 = tmp_path / "s1", tmp_path / "s2"
    for out in (out1, out2):
        assert main(["synth", "--out", str(out), "--n", "5", "--m", "6", "--seed", "9"]) == 0
    assert (out1 / "dataset.csv").read_bytes() == (out2 / "dataset.csv").read_bytes()


def test_solve_outputs(tmp_path, synth_csv):
    out = tmp_path / "solve"
    code = main(["solve", "--input", str(synth_csv), "--d", "2", "--out", str(out)])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["converged"] is True
    agg = json.loads((out / "aggregate.json").read_text())
    assert agg["d"] == 2
    assert agg["extension_rule"] == "lower_envelope"
    assert len(agg["entries"]) > 0
    with (out / "paper_scores.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 8
    assert {"paper_id", "aggregate"} <= set(rows[0])


def test_solve_triangle_instance_end_to_end(tmp_path):
    data = tmp_path / "triangle.csv"
    rows = ["reviewer_id,paper_id,c1,c2,overall"]
    scores = {("r1", "pa"): 2, ("r2", "pa"): 0, ("r3", "pa"): 0,
              ("r1", "pb"): 0, ("r2", "pb"): 1, ("r3", "pb"): 0}
    for (rid, pid), y in scores.items():
        c = "1,2" if pid == "pa" else "2,1"
        rows.append(f"{rid},{pid},{c},{y}")
    data.write_text("\n".join(rows) + "\n")

    out = tmp_path / "out"
    assert main(["solve", "--input", str(data), "--d", "2", "--out", str(out),
                 "--p", "2", "--q", "1"]) == 0
    with (out / "paper_scores.csv").open() as fh:
        got = {r["paper_id"]: float(r["aggregate"]) for r in csv.DictReader(fh)}
    assert abs(got["pa"] - 0.25) <= 0.01
    assert abs(got["pb"] - 0.30) <= 0.01


def test_solve_missing_input(tmp_path):
    assert main(["solve", "--input", str(tmp_path / "nope.csv"), "--d", "2",
                 "--out", str(tmp_path)]) == 1


def test_solve_bad_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("reviewer_id,paper_id,c1,c2,overall\nr1,p1,1,2,oops\n")
    assert main(["solve", "--input", str(path), "--d", "2", "--out", str(tmp_path)]) == 1


@pytest.mark.parametrize("p,q", [("1", "1"), ("2", "1"), ("1", "2"), ("inf", "1")])
def test_axioms_match_expectation(tmp_path, p, q):
    out = tmp_path / f"ax_{p}_{q}"
    code = main(["axioms", "--p", p, "--q", q, "--out", str(out), "--trials", "2",
                 "--seed", "1"])
    assert code == 0
    payload = json.loads((out / "axioms.json").read_text())
    holds = {entry["axiom"]: entry["holds"] for entry in payload}
    if (p, q) == ("1", "1"):
        assert all(holds.values())
    else:
        assert not all(holds.values())
        broken = [e for e in payload if not e["holds"]]
        assert all(e["witness"] is not None for e in broken)


def test_subsample_deterministic(tmp_path, synth_csv):
    outs = []
    for name in ("sub1", "sub2"):
        out = tmp_path / name
        code = main(["subsample", "--input", str(synth_csv), "--d", "2", "--out", str(out),
                     "--kmax", "2", "--trials", "2", "--seed", "4", "--fraction", "0.25"])
        assert code == 0
        outs.append((out / "subsample.csv").read_bytes())
    assert outs[0] == outs[1]


def test_pq_grid(tmp_path, synth_csv):
    out = tmp_path / "grid"
    code = main(["pq-grid", "--input", str(synth_csv), "--d", "2", "--out", str(out),
                 "--p", "1,2", "--q", "1", "--fraction", "0.25"])
    assert code == 0
    with (out / "pq_overlap.csv").open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:3] == ["combo", "p=1,q=1", "p=2,q=1"]
    assert float(rows[1][1]) == 1.0
    assert float(rows[2][2]) == 1.0
    assert rows[1][3] == "True"


def test_slice_outputs(tmp_path, synth_csv):
    out = tmp_path / "slice"
    code = main(["slice", "--input", str(synth_csv), "--d", "2", "--out", str(out),
                 "--vary", "0,1", "--grid", "1:10:1"])
    assert code == 0
    with (out / "slice_0_1.csv").open() as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 11  # header + 10 grid rows
    values = [[float(x) for x in row[1:]] for row in rows[1:]]
    for row in values:
        assert all(a <= b + 1e-12 for a, b in zip(row, row[1:]))
    svg = (out / "slice_0_1.svg").read_text()
    assert svg.startswith("<svg")


def test_loss_hist(tmp_path, synth_csv):
    out = tmp_path / "hist"
    code = main(["loss-hist", "--input", str(synth_csv), "--d", "2", "--out", str(out)])
    assert code == 0
    with (out / "loss_hist.csv").open() as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 37  # header + 36 bins of width 0.25 on [0, 9]
    total = sum(int(r[2]) for r in rows[1:])
    assert total == 6  # one entry per reviewer


def test_axioms_discrepancy_exit_code(tmp_path):
    # just above 1 the constructed violations need astronomically large score
    # gaps, so the tested suite finds none and the expectation mismatch surfaces
    out = tmp_path / "ax_eps"
    code = main(["axioms", "--p", "1.0000001", "--q", "1", "--out", str(out),
                 "--trials", "1", "--seed", "1"])
    assert code == 3


def test_invalid_flag_values(tmp_path, synth_csv):
    assert main(["subsample", "--input", str(synth_csv), "--d", "2",
                 "--out", str(tmp_path), "--kmax", "0"]) == 1
    assert main(["solve", "--input", str(synth_csv), "--d", "2",
                 "--out", str(tmp_path), "--p", "0.5"]) == 1
