"""Seeded synthetic review data from per-reviewer random monotone score maps."""

from __future__ import annotations

import numpy as np

from .dataset import Dataset, ReviewRecord, ValidationError


class MonotoneScorer:
    """Random nondecreasing map from integer criteria vectors to integer scores.

    The map is a weighted sum of per-criterion nondecreasing step functions,
    rescaled to the score range and rounded; rounding preserves monotonicity.
    """

    def __init__(self, d: int, lo: int, hi: int, rng: np.random.Generator):
        levels = hi - lo + 1
        steps = rng.random((d, levels))
        cums = np.cumsum(steps, axis=1)
        self._tables = cums / cums[:, -1:]
        w = rng.random(d) + 0.1
        self._w = w / w.sum()
        self._lo, self._hi = lo, hi

    def __call__(self, x: np.ndarray) -> float:
        idx = np.clip(x - self._lo, 0, self._hi - self._lo).astype(int)
        frac = float(sum(self._w[k] * self._tables[k, idx[k]] for k in range(len(idx))))
        return float(round(self._lo + (self._hi - self._lo) * frac))


def generate_dataset(
    n: int,
    m: int,
    d: int,
    noise: float = 0.0,
    seed: int = 0,
    score_lo: int = 1,
    score_hi: int = 10,
    reviews_per_paper: int = 4,
    shared_scorer: bool = False,
) -> Dataset:
    """Sample a review dataset with shared per-paper criteria vectors.

    Each paper gets one integer criteria vector and ``min(n, reviews_per_paper)``
    reviewers drawn without replacement; each reviewer scores through their own
    random monotone map (one common map when ``shared_scorer``). ``noise`` adds
    integer-rounded gaussian noise to overall scores, clipped to the score
    range. Byte-identical output for a fixed seed.
    """
    if n < 1 or m < 1 or d < 1:
        raise ValidationError(f"n, m, d must all be >= 1, got {(n, m, d)}")
    if reviews_per_paper < 1:
        raise ValidationError(f"reviews_per_paper must be >= 1, got {reviews_per_paper}")
    if noise < 0:
        raise ValidationError(f"noise must be >= 0, got {noise}")

    rng = np.random.default_rng(seed)
    if shared_scorer:
        common = MonotoneScorer(d, score_lo, score_hi, rng)
        scorers = [common] * n
    else:
        scorers = [MonotoneScorer(d, score_lo, score_hi, rng) for _ in range(n)]
    criteria = rng.integers(score_lo, score_hi + 1, size=(m, d))

    r_per = min(n, reviews_per_paper)
    records = []
    for a in range(m):
        chosen = sorted(rng.choice(n, size=r_per, replace=False).tolist())
        for i in chosen:
            x = criteria[a]
            y = scorers[i](x)
            if noise > 0:
                y += round(float(rng.normal(0.0, noise)))
            y = float(min(score_hi, max(score_lo, y)))
            records.append(
                ReviewRecord(
                    reviewer_id=f"r{i:03d}",
                    paper_id=f"p{a:03d}",
                    criteria=tuple(float(c) for c in x),
                    overall=y,
                )
            )
    return Dataset(records, d=d, score_domain=(float(score_lo), float(score_hi)))
