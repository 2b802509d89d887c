"""The H-measure: normalized expected minimum misclassification loss.

H = 1 - L / L_ref compares the classifier's cost-averaged minimum loss L
against the loss L_ref of a no-skill scorer under the same weight and
priors, so H = 1 means zero loss and H = 0 means no better than chance.
The default cost weight is the beta density with shapes (1 + pi1, 1 + pi0),
whose mode sits at pi1: in unbalanced problems misclassifying the smaller
class is the costlier mistake.

When the class proportions themselves are uncertain, pi0 is drawn from a
beta distribution (Beta(2, 2) by default), the cost weight becomes the
conditional Beta(2 - pi0, 1 + pi0), and H is one minus the expected
loss-to-reference ratio over the prior draws, estimated by seeded Monte
Carlo with a deterministic chunk layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._mc import combine_mean_stderr, run_chunks
from .config import EvalConfig
from .distributions import BetaParams, BetaWeight, WeightFunction, _betainc_arr
from .empirical import ClassPriors, EmpiricalCdfPair, LabeledScores, empirical_cdfs, empirical_priors
from .errors import ConfigError
from .loss import expected_min_loss, optimal_envelope, reference_loss

__all__ = [
    "PriorSpec",
    "HResult",
    "default_weight",
    "h_measure_fixed",
    "h_measure_uncertain_priors",
]

DEFAULT_PRIOR_UNCERTAINTY = BetaParams(2.0, 2.0)


@dataclass(frozen=True)
class PriorSpec:
    """How pi0 is determined: a fixed value, the empirical class
    proportions, or a beta distribution over pi0."""

    kind: str  # "fixed" | "empirical" | "beta"
    pi0: float | None = None
    params: BetaParams = DEFAULT_PRIOR_UNCERTAINTY

    def describe(self) -> dict:
        if self.kind == "fixed":
            return {"kind": "fixed", "pi0": self.pi0}
        if self.kind == "beta":
            return {"kind": "beta", "alpha": self.params.alpha, "beta": self.params.beta}
        return {"kind": "empirical"}


@dataclass(frozen=True)
class HResult:
    """H with the components it was built from.

    h always equals 1 - loss / reference_loss.  Under a distributed prior
    loss holds the mean loss-to-reference ratio and reference_loss is 1,
    so the identity still reconstructs h from the stored fields.
    """

    h: float
    loss: float
    reference_loss: float
    weight_used: dict
    prior_used: dict
    mc_stderr: float | None
    warnings: tuple[str, ...]


def default_weight(priors: ClassPriors) -> BetaWeight:
    """Conventional cost weight Beta(1 + pi1, 1 + pi0); its mode is pi1."""
    return BetaWeight(1.0 + priors.pi1, 1.0 + priors.pi0)


def _warnings_for(h: float, mode: str) -> tuple[str, ...]:
    if h < 0.0 and mode == "calibrated":
        return (
            "h_negative: calibrated-threshold loss exceeds the no-skill reference; "
            "the scores are badly calibrated (raw value reported, not clamped)",
        )
    return ()


def h_measure_fixed(
    data: LabeledScores,
    priors: ClassPriors | None = None,
    w: WeightFunction | None = None,
    config: EvalConfig = EvalConfig(),
) -> HResult:
    """H-measure at known priors.

    priors defaults to the empirical class proportions and w to
    default_weight(priors).  The loss comes from expected_min_loss under
    the config's threshold mode and method; the reference loss uses the
    closed form for beta weights and exact integration otherwise.
    """
    config.validate()
    cdfs = empirical_cdfs(data)
    if priors is None:
        priors = empirical_priors(data)
    if w is None:
        w = default_weight(priors)
    loss, stderr = expected_min_loss(
        priors,
        cdfs,
        w,
        mode=config.threshold_mode,
        method=config.method,
        resolution=config.resolution,
        mc_samples=config.mc_samples,
        seed=config.seed,
        n_workers=config.n_workers,
    )
    ref_method = "closed_form" if isinstance(w, BetaWeight) else "quadrature"
    ref = reference_loss(priors, w, method=ref_method)
    h = 1.0 - loss / ref
    prior_spec = PriorSpec(kind="fixed", pi0=priors.pi0)
    return HResult(
        h=float(h),
        loss=float(loss),
        reference_loss=float(ref),
        weight_used=w.describe(),
        prior_used=prior_spec.describe(),
        mc_stderr=stderr,
        warnings=_warnings_for(h, config.threshold_mode),
    )


def _conditional_shapes(pi0s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Shapes of the conditional cost weight Beta(1 + pi1, 1 + pi0)."""
    return 2.0 - pi0s, 1.0 + pi0s


def _reference_loss_batch(pi0s: np.ndarray) -> np.ndarray:
    """Closed-form no-skill loss at each prior, under the conditional weight."""
    a, b = _conditional_shapes(pi0s)
    pi1s = 1.0 - pi0s
    m0 = (a / (a + b)) * _betainc_arr(pi1s, a + 1.0, b)
    m1 = (b / (a + b)) * (1.0 - _betainc_arr(pi1s, a, b + 1.0))
    return pi0s * m0 + pi1s * m1


def _calibrated_loss_and_reference_batch(
    pi0s: np.ndarray, cdfs: EmpiricalCdfPair
) -> tuple[np.ndarray, np.ndarray]:
    """Exact calibrated loss and its no-skill reference at each prior draw.

    The loss uses the same per-score partial-moment form as the scalar
    quadrature path, L = pi0 mean m0(s0) + pi1 mean m1(s1), with the
    weight shapes varying per draw; the reference needs the same shifted
    shapes at pi1, so both ride one incomplete-beta evaluation per shift.
    """
    a, b = _conditional_shapes(pi0s)
    pi1s = 1.0 - pi0s
    k = pi0s.size
    n0 = cdfs.sorted0.size
    n1 = cdfs.sorted1.size
    col_a, col_b = a[:, None], b[:, None]

    x0 = np.empty((k, n0 + 1))
    x0[:, :n0] = cdfs.sorted0[None, :]
    x0[:, n0] = pi1s
    i0 = _betainc_arr(x0, col_a + 1.0, col_b).reshape(k, n0 + 1)
    m0 = (a / (a + b))[:, None] * i0

    x1 = np.empty((k, n1 + 1))
    x1[:, :n1] = cdfs.sorted1[None, :]
    x1[:, n1] = pi1s
    i1 = _betainc_arr(x1, col_a, col_b + 1.0).reshape(k, n1 + 1)
    m1 = (b / (a + b))[:, None] * (1.0 - i1)

    loss = pi0s * m0[:, :n0].mean(axis=1) + pi1s * m1[:, :n1].mean(axis=1)
    ref = pi0s * m0[:, n0] + pi1s * m1[:, n1]
    return loss, ref


def _loss_ratio_batch(
    pi0s: np.ndarray,
    cdfs: EmpiricalCdfPair,
    mode: str,
    inner_mc: bool = False,
    inner_samples: int = 0,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Loss-to-reference ratio at each sampled prior.

    The inner cost expectation is exact piecewise quadrature by default;
    inner Monte Carlo (one batch of cost draws per prior draw) is kept as
    an option for cross-validating the quadrature path.
    """
    if not inner_mc and mode == "calibrated":
        loss, refs = _calibrated_loss_and_reference_batch(pi0s, cdfs)
        return loss / refs
    refs = _reference_loss_batch(pi0s)
    if inner_mc:
        a, b = _conditional_shapes(pi0s)
        losses = np.empty(pi0s.size)
        # bound the (priors x costs) workspace
        block = max(1, int(4_000_000 // max(inner_samples, 1)))
        for start in range(0, pi0s.size, block):
            sl = slice(start, min(start + block, pi0s.size))
            costs = rng.beta(a[sl][:, None], b[sl][:, None], size=(sl.stop - sl.start, inner_samples))
            p0 = pi0s[sl][:, None]
            if mode == "calibrated":
                vals = costs * p0 * (1.0 - cdfs.f0(costs)) + (1.0 - costs) * (1.0 - p0) * cdfs.f1(costs)
            else:
                vals = np.empty_like(costs)
                for i in range(sl.stop - sl.start):
                    env = optimal_envelope(ClassPriors(pi0=float(pi0s[sl][i])), cdfs)
                    vals[i] = env.value(costs[i])
            losses[sl] = vals.mean(axis=1)
        return losses / refs
    losses = np.empty(pi0s.size)
    for i, p0 in enumerate(pi0s):
        priors_i = ClassPriors(pi0=float(p0))
        a_i, b_i = _conditional_shapes(np.asarray([p0]))
        w_i = BetaWeight(float(a_i[0]), float(b_i[0]))
        losses[i], _ = expected_min_loss(priors_i, cdfs, w_i, mode="optimal")
    return losses / refs


def h_measure_uncertain_priors(
    data: LabeledScores,
    prior_dist: BetaParams = DEFAULT_PRIOR_UNCERTAINTY,
    config: EvalConfig = EvalConfig(),
) -> HResult:
    """H-measure when pi0 itself carries a beta distribution.

    For each prior draw the cost weight is the conditional
    Beta(2 - pi0, 1 + pi0), the loss and its closed-form no-skill
    reference are evaluated at that prior, and H is one minus the mean
    ratio.  mc_stderr is the standard error of that mean over the outer
    draws, which covers inner Monte Carlo noise as well when that option
    is active.  The empirical CDFs stay fixed while the prior varies;
    only the class weighting changes.
    """
    config.validate()
    if config.seed is None:
        raise ConfigError("a seed is required for the prior-uncertain H-measure")
    cdfs = empirical_cdfs(data)
    inner_mc = config.method == "monte_carlo"
    tiny = np.finfo(float).tiny

    def one_chunk(rng, count):
        pi0s = np.clip(rng.beta(prior_dist.alpha, prior_dist.beta, size=count), tiny, 1.0 - 1e-16)
        ratios = _loss_ratio_batch(
            pi0s,
            cdfs,
            config.threshold_mode,
            inner_mc=inner_mc,
            inner_samples=config.mc_samples,
            rng=rng,
        )
        return float(np.sum(ratios)), float(np.sum(ratios * ratios)), count

    parts = run_chunks(one_chunk, config.seed, config.outer_samples, n_workers=config.n_workers)
    mean_ratio, stderr = combine_mean_stderr(parts)
    h = 1.0 - mean_ratio
    prior_spec = PriorSpec(kind="beta", params=prior_dist)
    return HResult(
        h=float(h),
        loss=float(mean_ratio),
        reference_loss=1.0,
        weight_used={"kind": "beta_conditional_on_prior"},
        prior_used=prior_spec.describe(),
        mc_stderr=stderr,
        warnings=_warnings_for(h, config.threshold_mode),
    )
