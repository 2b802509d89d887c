"""Labeled score containers, empirical class-conditional CDFs and priors.

Scores are probability-like values in [0, 1] (enforced or normalized at
ingestion); labels are binary.  The CDF convention is fixed here once for
the whole package: F(c) is the fraction of scores less than or equal to c,
which makes F right-continuous with jumps at the observed scores.  For
continuous scores a strictly-less reading would differ only on a
measure-zero set.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateDataError, InputError

__all__ = [
    "LabeledScores",
    "ClassPriors",
    "EmpiricalCdfPair",
    "ingest",
    "empirical_priors",
    "empirical_cdfs",
    "read_scores_csv",
]

NORMALIZATIONS = ("reject", "minmax", "logistic")


@dataclass(frozen=True)
class LabeledScores:
    """Immutable test-set scores with parallel binary labels."""

    scores: np.ndarray
    labels: np.ndarray
    normalization: str = "reject"

    @property
    def n(self) -> int:
        return self.scores.size

    @property
    def n0(self) -> int:
        return int(np.sum(self.labels == 0))

    @property
    def n1(self) -> int:
        return int(np.sum(self.labels == 1))

    def class_scores(self, label: int) -> np.ndarray:
        return self.scores[self.labels == label]


@dataclass(frozen=True)
class ClassPriors:
    """Strictly interior class proportions; pi1 is derived, so the pair
    sums to one exactly."""

    pi0: float

    def __post_init__(self):
        if not (np.isfinite(self.pi0) and 0.0 < self.pi0 < 1.0):
            raise InputError(f"pi0 must lie strictly inside (0, 1), got {self.pi0}")

    @property
    def pi1(self) -> float:
        return 1.0 - self.pi0


@dataclass(frozen=True)
class EmpiricalCdfPair:
    """Right-continuous empirical CDFs of the two class-conditional score
    samples, evaluated by binary search (O(log n) per query)."""

    sorted0: np.ndarray = field(repr=False)
    sorted1: np.ndarray = field(repr=False)

    @property
    def n0(self) -> int:
        return self.sorted0.size

    @property
    def n1(self) -> int:
        return self.sorted1.size

    def f0(self, c):
        """Fraction of class-0 scores <= c."""
        out = np.searchsorted(self.sorted0, c, side="right") / self.sorted0.size
        return float(out) if np.isscalar(c) else out

    def f1(self, c):
        """Fraction of class-1 scores <= c."""
        out = np.searchsorted(self.sorted1, c, side="right") / self.sorted1.size
        return float(out) if np.isscalar(c) else out


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def ingest(scores, labels, normalization: str = "reject") -> LabeledScores:
    """Validate raw scores and labels into a LabeledScores container.

    normalization:
        reject   -- scores must already lie in [0, 1]
        minmax   -- affine map of the observed range onto [0, 1]
                    (a constant score vector maps to all 0.5)
        logistic -- standard sigmoid, for real-valued margins

    Raises InputError for structural problems.  Single-class label vectors
    are accepted here (CDF-only use); metric entry points reject them.
    """
    if normalization not in NORMALIZATIONS:
        raise InputError(
            f"unknown normalization {normalization!r}; expected one of {NORMALIZATIONS}"
        )
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    if scores.ndim != 1 or labels.ndim != 1:
        raise InputError("scores and labels must be one-dimensional")
    if scores.size == 0:
        raise InputError("scores must be nonempty")
    if scores.size != labels.size:
        raise InputError(
            f"scores and labels must be parallel, got lengths {scores.size} and {labels.size}"
        )
    if np.any(~np.isfinite(scores)):
        bad = int(np.flatnonzero(~np.isfinite(scores))[0])
        raise InputError(f"non-finite score at position {bad}")
    if not np.all(np.isin(labels, (0, 1))):
        bad = int(np.flatnonzero(~np.isin(labels, (0, 1)))[0])
        raise InputError(f"labels must be 0 or 1; offending value at position {bad}")
    labels = labels.astype(np.int8)

    if normalization == "minmax":
        lo, hi = float(scores.min()), float(scores.max())
        if hi > lo:
            scores = (scores - lo) / (hi - lo)
        else:
            scores = np.full_like(scores, 0.5)
    elif normalization == "logistic":
        scores = _sigmoid(scores)
    else:
        if np.any(scores < 0.0) or np.any(scores > 1.0):
            bad = int(np.flatnonzero((scores < 0.0) | (scores > 1.0))[0])
            raise InputError(
                f"score {scores[bad]} at position {bad} outside [0, 1]; "
                "pass normalization='minmax' or 'logistic' to rescale"
            )

    scores = scores.copy()
    scores.setflags(write=False)
    labels = labels.copy()
    labels.setflags(write=False)
    return LabeledScores(scores=scores, labels=labels, normalization=normalization)


def _require_both_classes(data: LabeledScores):
    if data.n0 == 0 or data.n1 == 0:
        raise DegenerateDataError(
            f"both classes required, got {data.n0} class-0 and {data.n1} class-1 rows"
        )


def empirical_priors(data: LabeledScores) -> ClassPriors:
    """Class proportions of the test set: pi0 = n0 / (n0 + n1)."""
    _require_both_classes(data)
    return ClassPriors(pi0=data.n0 / data.n)


def empirical_cdfs(data: LabeledScores) -> EmpiricalCdfPair:
    """Plug-in class-conditional CDF pair (requires both classes)."""
    _require_both_classes(data)
    sorted0 = np.sort(data.class_scores(0))
    sorted1 = np.sort(data.class_scores(1))
    sorted0.setflags(write=False)
    sorted1.setflags(write=False)
    return EmpiricalCdfPair(sorted0=sorted0, sorted1=sorted1)


def read_scores_csv(path: str | Path):
    """Read a scored test set from CSV.

    Expected layout: header row with a 'label' column (values 0/1) and one
    or more numeric score columns.  Rows with missing or non-numeric values
    are rejected with the offending line number.

    Returns (column_names, columns, labels) where columns maps each score
    column name to a float array.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise InputError(f"{path}: empty file, expected a header row")
            header = [h.strip() for h in header]
            if "label" not in header:
                raise InputError(f"{path}: header must contain a 'label' column")
            score_names = [h for h in header if h != "label"]
            if not score_names:
                raise InputError(f"{path}: need at least one score column besides 'label'")
            if len(set(header)) != len(header):
                raise InputError(f"{path}: duplicate column names in header")
            label_idx = header.index("label")
            cols: dict[str, list[float]] = {name: [] for name in score_names}
            labels: list[int] = []
            for lineno, row in enumerate(reader, start=2):
                if len(row) != len(header):
                    raise InputError(
                        f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                    )
                for name, value in zip(header, row):
                    if value.strip() == "":
                        raise InputError(f"{path}:{lineno}: missing value in column {name!r}")
                raw_label = row[label_idx].strip()
                if raw_label not in ("0", "1"):
                    raise InputError(
                        f"{path}:{lineno}: label must be 0 or 1, got {raw_label!r}"
                    )
                labels.append(int(raw_label))
                for name in score_names:
                    value = row[header.index(name)].strip()
                    try:
                        cols[name].append(float(value))
                    except ValueError:
                        raise InputError(
                            f"{path}:{lineno}: non-numeric score {value!r} in column {name!r}"
                        ) from None
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not labels:
        raise InputError(f"{path}: no data rows")
    columns = {name: np.asarray(vals, dtype=float) for name, vals in cols.items()}
    return score_names, columns, np.asarray(labels, dtype=np.int8)
