import numpy as np
import pytest

from reviewagg import Dataset, ReviewRecord, build_dominance_graph

VEC_POOL = [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (2.0, 2.0), (3.0, 1.0), (1.0, 3.0)]


def tiny_instance(rng, max_nodes=4, y_step=0.02):
    """Small random dataset for oracle comparisons: few nodes, y on a coarse grid."""
    n_nodes = int(rng.integers(2, max_nodes + 1))
    idx = rng.choice(len(VEC_POOL), size=n_nodes, replace=False)
    vecs = [VEC_POOL[i] for i in idx]
    n_rev = int(rng.integers(2, 4))
    records = []
    for i in range(n_rev):
        papers = rng.choice(n_nodes, size=int(rng.integers(1, n_nodes + 1)), replace=False)
        for a in sorted(papers.tolist()):
            y = float(rng.integers(0, 51)) * y_step
            records.append(ReviewRecord(f"r{i}", f"p{a}", vecs[a], y))
    ds = Dataset(records, d=2)
    graph = build_dominance_graph(ds)
    ys = [r.overall for r in records]
    grid = np.arange(min(ys), max(ys) + y_step - 1e-4, y_step)
    return ds, graph, grid


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
