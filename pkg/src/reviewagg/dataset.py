"""Review data model: records, validated datasets, ingestion and basic statistics."""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence


class DatasetError(Exception):
    """Base class for dataset construction and ingestion failures."""


class ParseError(DatasetError):
    """A file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class ValidationError(DatasetError):
    """Parsed data violates a dataset invariant."""


@dataclass(frozen=True)
class ReviewRecord:
    """One reviewer's criteria scores and overall recommendation for one paper."""

    reviewer_id: str
    paper_id: str
    criteria: tuple[float, ...]
    overall: float


@dataclass(frozen=True)
class SettingFlags:
    """Structural classification of a dataset.

    ``is_complete``: every reviewer reviews every paper.
    ``is_objective``: all reviewers of a paper report identical criteria vectors.
    """

    is_complete: bool
    is_objective: bool


class Dataset:
    """Validated, immutable collection of reviews.

    Scores are stored as 64-bit floats even when inputs are integers, since
    learned aggregates are real-valued. Reviewer and paper ids are opaque
    strings. ``score_domain``, when given, is a closed interval ``(lo, hi)``
    applied to every criterion and to the overall recommendation; without it
    only finiteness is checked.
    """

    def __init__(
        self,
        records: Iterable[ReviewRecord],
        d: int,
        score_domain: tuple[float, float] | None = None,
    ):
        if d < 1:
            raise ValidationError(f"criteria dimensionality must be >= 1, got {d}")
        if score_domain is not None:
            lo, hi = float(score_domain[0]), float(score_domain[1])
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise ValidationError(f"invalid score domain {score_domain}")
            score_domain = (lo, hi)

        recs = tuple(records)
        seen: set[tuple[str, str]] = set()
        reviewer_index: dict[str, set[str]] = {}
        paper_index: dict[str, set[str]] = {}
        for r in recs:
            if len(r.criteria) != d:
                raise ValidationError(
                    f"review ({r.reviewer_id}, {r.paper_id}) has "
                    f"{len(r.criteria)} criteria scores, expected {d}"
                )
            for s in (*r.criteria, r.overall):
                if not math.isfinite(s):
                    raise ValidationError(
                        f"non-finite score in review ({r.reviewer_id}, {r.paper_id})"
                    )
                if score_domain is not None and not (
                    score_domain[0] <= s <= score_domain[1]
                ):
                    raise ValidationError(
                        f"score {s} outside domain {score_domain} in review "
                        f"({r.reviewer_id}, {r.paper_id})"
                    )
            key = (r.reviewer_id, r.paper_id)
            if key in seen:
                raise ValidationError(f"duplicate review for {key}")
            seen.add(key)
            reviewer_index.setdefault(r.reviewer_id, set()).add(r.paper_id)
            paper_index.setdefault(r.paper_id, set()).add(r.reviewer_id)

        self._records = recs
        self._d = d
        self._score_domain = score_domain
        self._reviewer_index = reviewer_index
        self._paper_index = paper_index

    @property
    def records(self) -> tuple[ReviewRecord, ...]:
        return self._records

    @property
    def d(self) -> int:
        return self._d

    @property
    def score_domain(self) -> tuple[float, float] | None:
        return self._score_domain

    @property
    def reviewer_index(self) -> Mapping[str, frozenset[str]]:
        return {r: frozenset(ps) for r, ps in self._reviewer_index.items()}

    @property
    def paper_index(self) -> Mapping[str, frozenset[str]]:
        return {p: frozenset(rs) for p, rs in self._paper_index.items()}

    @property
    def n_reviewers(self) -> int:
        return len(self._reviewer_index)

    @property
    def n_papers(self) -> int:
        return len(self._paper_index)

    def __len__(self) -> int:
        return len(self._records)

    def papers_of(self, reviewer_id: str) -> frozenset[str]:
        try:
            return frozenset(self._reviewer_index[reviewer_id])
        except KeyError:
            raise ValidationError(f"unknown reviewer {reviewer_id!r}") from None

    def reviewers_of(self, paper_id: str) -> frozenset[str]:
        try:
            return frozenset(self._paper_index[paper_id])
        except KeyError:
            raise ValidationError(f"unknown paper {paper_id!r}") from None

    def to_json_dict(self) -> dict:
        return {
            "d": self._d,
            "score_domain": list(self._score_domain) if self._score_domain else None,
            "records": [
                {
                    "reviewer_id": r.reviewer_id,
                    "paper_id": r.paper_id,
                    "criteria": list(r.criteria),
                    "overall": r.overall,
                }
                for r in self._records
            ],
        }

    @classmethod
    def from_json_dict(cls, payload: Mapping) -> "Dataset":
        dom = payload.get("score_domain")
        return cls(
            records=[
                ReviewRecord(
                    reviewer_id=str(rec["reviewer_id"]),
                    paper_id=str(rec["paper_id"]),
                    criteria=tuple(float(c) for c in rec["criteria"]),
                    overall=float(rec["overall"]),
                )
                for rec in payload["records"]
            ],
            d=int(payload["d"]),
            score_domain=tuple(dom) if dom else None,
        )

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2))


def _csv_header(d: int) -> list[str]:
    return ["reviewer_id", "paper_id", *[f"c{k}" for k in range(1, d + 1)], "overall"]


def ingest_csv(path: str | Path, d: int, score_domain: tuple[float, float] | None = None) -> Dataset:
    """Read reviews from a UTF-8 CSV with header ``reviewer_id,paper_id,c1,...,cd,overall``.

    Row order is preserved in the resulting dataset. Raises :class:`ParseError`
    (with line number) for malformed rows and :class:`ValidationError` for
    invariant violations such as duplicate (reviewer, paper) pairs.
    """
    path = Path(path)
    expected = _csv_header(d)
    records: list[ReviewRecord] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("missing header row", line=1) from None
        if [h.strip() for h in header] != expected:
            raise ParseError(
                f"bad header {header!r}, expected {expected!r}", line=1
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(expected):
                raise ParseError(
                    f"expected {len(expected)} fields, got {len(row)}", line=lineno
                )
            try:
                scores = [float(cell) for cell in row[2:]]
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            records.append(
                ReviewRecord(
                    reviewer_id=row[0].strip(),
                    paper_id=row[1].strip(),
                    criteria=tuple(scores[:-1]),
                    overall=scores[-1],
                )
            )
    return Dataset(records, d=d, score_domain=score_domain)


def write_csv(ds: Dataset, path: str | Path) -> None:
    """Serialize a dataset back to the ingestion CSV format (round-trip safe)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_csv_header(ds.d))
        for r in ds.records:
            writer.writerow([r.reviewer_id, r.paper_id, *[repr(c) for c in r.criteria], repr(r.overall)])


def classify_setting(ds: Dataset) -> SettingFlags:
    """Compute the complete / objective flags for a dataset."""
    m = ds.n_papers
    complete = all(len(ps) == m for ps in ds.reviewer_index.values())
    by_paper: dict[str, set[tuple[float, ...]]] = {}
    for r in ds.records:
        by_paper.setdefault(r.paper_id, set()).add(r.criteria)
    objective = all(len(vs) == 1 for vs in by_paper.values())
    return SettingFlags(is_complete=complete, is_objective=objective)


def marginal_modes(ds: Dataset) -> tuple[float, ...]:
    """Per-criterion modal score over all reviews; ties broken by smallest value."""
    if not ds.records:
        raise ValidationError("marginal modes are undefined for an empty dataset")
    modes = []
    for k in range(ds.d):
        counts = Counter(r.criteria[k] for r in ds.records)
        best = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))
        modes.append(best[0])
    return tuple(modes)
