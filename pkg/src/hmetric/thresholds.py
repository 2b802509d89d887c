"""Threshold-choice methods that do not tie the threshold to the cost.

When the threshold is drawn from a distribution u(t) independently of the
cost, the double expectation of the loss collapses: it is the same as
charging every class-0 error the mean cost E(c), so only E_u[F0] and
E_u[F1] matter.  Choosing u to put equal mass on the class-1 scores makes
the evaluation equal to the AUC, which is the rank-only reading of that
measure; screening instead fixes the proportion of objects to flag in
advance and reads off the confusion counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import TabulatedWeight, WeightFunction
from .empirical import ClassPriors, LabeledScores, empirical_cdfs, empirical_priors
from .errors import ConfigError, InputError

__all__ = [
    "PointMass",
    "PooledScoreThresholds",
    "RankUniformClass1",
    "TabulatedThresholds",
    "ScreeningResult",
    "independent_threshold_loss",
    "rank_uniform_evaluation",
    "screen_at_proportion",
]

SCREEN_BASES = ("all_objects", "class0_objects")


@dataclass(frozen=True)
class PointMass:
    """All threshold mass at one point."""

    t: float

    def __post_init__(self):
        if not (np.isfinite(self.t) and 0.0 <= self.t <= 1.0):
            raise InputError(f"threshold must lie in [0, 1], got {self.t}")


@dataclass(frozen=True)
class PooledScoreThresholds:
    """One atom of mass 1/n at every pooled score."""


@dataclass(frozen=True)
class RankUniformClass1:
    """Atoms at the class-1 scores, by default equally weighted.

    weights, when given, are per ascending class-1 rank; they must be
    nonnegative with positive total and are normalized to unit mass.
    Uniform weights reproduce the AUC; non-uniform weights express that
    some flagged proportions are likelier than others.
    """

    weights: tuple[float, ...] | None = None


@dataclass(frozen=True)
class TabulatedThresholds:
    """Continuous threshold density on (0, 1), reusing the tabulated
    piecewise-linear weight machinery (unit mass enforced there)."""

    weight: TabulatedWeight


@dataclass(frozen=True)
class ScreeningResult:
    """Confusion counts after classifying a fixed lowest-ranked proportion
    as class 0."""

    proportion: float
    threshold_rank: int
    threshold: float
    confusion: tuple[int, int, int, int]  # (tn, fp, fn, tp), class 1 positive
    class0_recall: float
    misclassification_rate: float


def _rank_weights(u: RankUniformClass1, n1: int) -> np.ndarray:
    if u.weights is None:
        return np.full(n1, 1.0 / n1)
    w = np.asarray(u.weights, dtype=float)
    if w.size != n1:
        raise InputError(f"need one weight per class-1 rank ({n1}), got {w.size}")
    if np.any(w < 0.0) or not np.all(np.isfinite(w)):
        raise InputError("rank weights must be finite and nonnegative")
    total = w.sum()
    if total <= 0.0:
        raise InputError("rank weights must have positive total")
    return w / total


def _expected_cdfs(u, data: LabeledScores, cdfs) -> tuple[float, float]:
    """E_u[F0(t)] and E_u[F1(t)] for each supported threshold law."""
    if isinstance(u, PointMass):
        return float(cdfs.f0(u.t)), float(cdfs.f1(u.t))
    if isinstance(u, PooledScoreThresholds):
        return float(np.mean(cdfs.f0(data.scores))), float(np.mean(cdfs.f1(data.scores)))
    if isinstance(u, RankUniformClass1):
        thresholds = np.sort(data.class_scores(1))
        w = _rank_weights(u, thresholds.size)
        return float(np.sum(w * cdfs.f0(thresholds))), float(np.sum(w * cdfs.f1(thresholds)))
    if isinstance(u, TabulatedThresholds):
        # F0/F1 are constant between pooled scores, so splitting there and
        # weighting each piece by its u-mass integrates exactly
        breaks = np.unique(np.concatenate([[0.0, 1.0], data.scores]))
        mids = 0.5 * (breaks[:-1] + breaks[1:])
        masses = np.diff(u.weight.cdf(breaks))
        return (
            float(np.sum(cdfs.f0(mids) * masses)),
            float(np.sum(cdfs.f1(mids) * masses)),
        )
    raise ConfigError(f"unsupported threshold distribution {type(u).__name__}")


def independent_threshold_loss(
    data: LabeledScores,
    priors: ClassPriors,
    w: WeightFunction,
    u,
) -> float:
    """Expected loss with the threshold drawn from u independently of the
    cost: E(c) pi0 E_u[1 - F0] + (1 - E(c)) pi1 E_u[F1]."""
    cdfs = empirical_cdfs(data)
    ec = w.mean()
    e_f0, e_f1 = _expected_cdfs(u, data, cdfs)
    return float(ec * priors.pi0 * (1.0 - e_f0) + (1.0 - ec) * priors.pi1 * e_f1)


def rank_uniform_evaluation(data: LabeledScores, rank_weights=None) -> float:
    """Average fraction of class-0 scores below each class-1 score used as
    a threshold (ties counted half).

    With uniform weights this equals the Mann-Whitney AUC exactly; the
    optional per-rank weights generalize the average when equal rank
    probabilities are not credible.
    """
    empirical_priors(data)  # raises on single-class data
    s0 = np.sort(data.class_scores(0))
    thresholds = np.sort(data.class_scores(1))
    below = np.searchsorted(s0, thresholds, side="left")
    at = np.searchsorted(s0, thresholds, side="right") - below
    credits = below + 0.5 * at
    if rank_weights is None:
        # sum of half-integers over one divisor: bit-identical to the
        # rank-sum AUC, not merely equal in exact arithmetic
        return float(np.sum(credits) / (s0.size * thresholds.size))
    w = _rank_weights(RankUniformClass1(weights=tuple(rank_weights)), thresholds.size)
    return float(np.sum(w * credits) / s0.size)


def screen_at_proportion(data: LabeledScores, p: float, basis: str = "all_objects") -> ScreeningResult:
    """Classify as class 0 everything scoring at or below the p-quantile
    rank of the basis set.

    The threshold is the ceil(p * n_basis)-th lowest basis score; scores
    tied with it land on the class-0 side, so the selected set is a
    deterministic function of the score multiset.
    """
    if not (0.0 < p < 1.0):
        raise InputError(f"screening proportion must lie strictly inside (0, 1), got {p}")
    if basis not in SCREEN_BASES:
        raise ConfigError(f"unknown screening basis {basis!r}; expected {SCREEN_BASES}")
    empirical_priors(data)  # raises on single-class data
    basis_scores = data.scores if basis == "all_objects" else data.class_scores(0)
    ranked = np.sort(basis_scores)
    k = int(np.ceil(p * ranked.size))
    threshold = float(ranked[k - 1])

    predicted_zero = data.scores <= threshold
    is_zero = data.labels == 0
    tn = int(np.sum(predicted_zero & is_zero))
    fp = int(np.sum(~predicted_zero & is_zero))
    fn = int(np.sum(predicted_zero & ~is_zero))
    tp = int(np.sum(~predicted_zero & ~is_zero))
    return ScreeningResult(
        proportion=float(p),
        threshold_rank=k,
        threshold=threshold,
        confusion=(tn, fp, fn, tp),
        class0_recall=tn / (tn + fp),
        misclassification_rate=(fp + fn) / data.n,
    )
