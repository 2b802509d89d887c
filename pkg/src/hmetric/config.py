"""Evaluation configuration shared by the library entry points and the CLI.

A config freezes every choice that affects a metric value: cost weight,
prior handling, threshold rule, integration method, Monte Carlo budgets
and seed, tie convention and score normalization.  Reports echo the full
config so every number they contain is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

from .empirical import NORMALIZATIONS
from .errors import ConfigError

__all__ = ["EvalConfig"]

WEIGHT_KINDS = ("default", "beta", "tabulated")
PRIOR_KINDS = ("empirical", "fixed", "beta")
METHODS = ("quadrature", "monte_carlo")
MODES = ("calibrated", "optimal")
TIE_CONVENTIONS = ("half_credit",)


def _parse_u_dist(spec: str):
    if spec in ("pooled", "class1-ranks"):
        return spec
    if spec.startswith("point:"):
        try:
            t = float(spec.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad threshold distribution spec {spec!r}") from None
        if not 0.0 <= t <= 1.0:
            raise ConfigError(f"point-mass threshold must lie in [0, 1], got {t}")
        return spec
    raise ConfigError(
        f"unknown threshold distribution {spec!r}; "
        "expected 'pooled', 'class1-ranks' or 'point:<t>'"
    )


@dataclass(frozen=True)
class EvalConfig:
    weight: str = "default"
    weight_alpha: float | None = None
    weight_beta: float | None = None
    weight_path: str | None = None
    prior: str = "empirical"
    pi0: float | None = None
    prior_alpha: float = 2.0
    prior_beta: float = 2.0
    threshold_mode: str = "calibrated"
    method: str = "quadrature"
    resolution: int = 4096
    mc_samples: int = 10000
    outer_samples: int = 10000
    seed: int | None = None
    ties: str = "half_credit"
    normalization: str = "reject"
    screen_proportions: tuple[float, ...] = ()
    u_dists: tuple[str, ...] = ()
    n_workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "screen_proportions", tuple(self.screen_proportions))
        object.__setattr__(self, "u_dists", tuple(self.u_dists))

    @property
    def uses_monte_carlo(self) -> bool:
        return self.method == "monte_carlo" or self.prior == "beta"

    def validate(self) -> "EvalConfig":
        if self.weight not in WEIGHT_KINDS:
            raise ConfigError(f"unknown weight kind {self.weight!r}; expected {WEIGHT_KINDS}")
        if self.weight == "beta":
            if self.weight_alpha is None or self.weight_beta is None:
                raise ConfigError("beta weight requires alpha and beta")
            if self.weight_alpha <= 0 or self.weight_beta <= 0:
                raise ConfigError("beta weight shapes must be positive")
        if self.weight == "tabulated" and not self.weight_path:
            raise ConfigError("tabulated weight requires a file path")
        if self.prior not in PRIOR_KINDS:
            raise ConfigError(f"unknown prior kind {self.prior!r}; expected {PRIOR_KINDS}")
        if self.prior == "fixed":
            if self.pi0 is None or not (0.0 < self.pi0 < 1.0):
                raise ConfigError("fixed prior requires pi0 strictly inside (0, 1)")
        if self.prior == "beta" and (self.prior_alpha <= 0 or self.prior_beta <= 0):
            raise ConfigError("prior beta shapes must be positive")
        if self.threshold_mode not in MODES:
            raise ConfigError(f"unknown threshold mode {self.threshold_mode!r}; expected {MODES}")
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; expected {METHODS}")
        if self.resolution < 1024:
            raise ConfigError(f"resolution must be at least 1024, got {self.resolution}")
        if self.mc_samples < 1:
            raise ConfigError("mc_samples must be at least 1")
        if self.outer_samples < 1:
            raise ConfigError("outer_samples must be at least 1")
        if self.ties not in TIE_CONVENTIONS:
            raise ConfigError(f"unsupported tie convention {self.ties!r}")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigError(f"unknown normalization {self.normalization!r}")
        for p in self.screen_proportions:
            if not (0.0 < p < 1.0):
                raise ConfigError(f"screening proportion must lie in (0, 1), got {p}")
        for spec in self.u_dists:
            _parse_u_dist(spec)
        if self.n_workers < 1:
            raise ConfigError("n_workers must be at least 1")
        if self.uses_monte_carlo and self.seed is None:
            raise ConfigError(
                "a seed is required whenever Monte Carlo estimation is active; "
                "there is no silent default"
            )
        return self

    def describe(self) -> dict:
        return asdict(self)
