"""Metric report assembly and its published JSON schema.

A report carries, per score column, the H-measure result, the AUC with
its loss reading, the mixture-weight substitution loss, any configured
independent-threshold losses and screening results, plus a provenance
block (full config echo, data fingerprint, tool version) so every derived
number can be recomputed from its reported components.  Reports are
deterministic for a fixed input, config and seed; only the timestamp
field varies between runs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .auc import auc_mann_whitney, mixture_weight_loss
from .config import EvalConfig
from .distributions import BetaParams, BetaWeight, WeightFunction, load_tabulated_weight
from .empirical import ClassPriors, LabeledScores, empirical_priors, ingest
from .errors import ConfigError
from .hmeasure import default_weight, h_measure_fixed, h_measure_uncertain_priors
from .thresholds import (
    PointMass,
    PooledScoreThresholds,
    RankUniformClass1,
    independent_threshold_loss,
    screen_at_proportion,
)

__all__ = [
    "REPORT_SCHEMA",
    "resolve_priors",
    "resolve_weight",
    "evaluate_column",
    "build_report",
    "render_report",
    "fingerprint_arrays",
]


def resolve_priors(config: EvalConfig, data: LabeledScores) -> ClassPriors:
    """Concrete class priors for fixed/empirical prior kinds (the beta
    kind keeps pi0 distributed and is handled by the H-measure itself)."""
    if config.prior == "fixed":
        return ClassPriors(pi0=float(config.pi0))
    return empirical_priors(data)


def resolve_weight(config: EvalConfig, priors: ClassPriors) -> WeightFunction:
    """One weight instance per evaluation, shared across all columns."""
    if config.weight == "beta":
        return BetaWeight(config.weight_alpha, config.weight_beta)
    if config.weight == "tabulated":
        return load_tabulated_weight(config.weight_path)
    return default_weight(priors)


def _threshold_dist(spec: str, data: LabeledScores):
    if spec == "pooled":
        return PooledScoreThresholds()
    if spec == "class1-ranks":
        return RankUniformClass1()
    return PointMass(t=float(spec.split(":", 1)[1]))


def evaluate_column(
    data: LabeledScores,
    config: EvalConfig,
    shared_weight: WeightFunction | None = None,
    shared_priors: ClassPriors | None = None,
) -> dict:
    """All metrics for one score column, as a JSON-ready mapping."""
    config.validate()
    if config.prior == "beta":
        if config.weight != "default":
            raise ConfigError(
                "a distributed prior determines its own conditional weight; "
                "explicit weights require a fixed or empirical prior"
            )
        hres = h_measure_uncertain_priors(
            data, BetaParams(config.prior_alpha, config.prior_beta), config
        )
        # auxiliary metrics need concrete priors; the empirical ones serve
        aux_priors = empirical_priors(data)
        aux_weight = shared_weight or default_weight(aux_priors)
    else:
        aux_priors = shared_priors or resolve_priors(config, data)
        aux_weight = shared_weight or resolve_weight(config, aux_priors)
        hres = h_measure_fixed(data, priors=aux_priors, w=aux_weight, config=config)

    auc_res = auc_mann_whitney(data)
    column = {
        "h": asdict(hres),
        "auc": asdict(auc_res),
        # the AUC diagnostic is defined with calibrated thresholds
        "mixture_weight_loss": mixture_weight_loss(data),
        "independent_threshold_losses": [
            {
                "u": spec,
                "loss": independent_threshold_loss(
                    data, aux_priors, aux_weight, _threshold_dist(spec, data)
                ),
            }
            for spec in config.u_dists
        ],
        "screening": [
            asdict(screen_at_proportion(data, p)) for p in config.screen_proportions
        ],
        "diagnostics": {
            "suggest_label_inversion": bool(auc_res.auc < 0.5),
        },
    }
    column["h"]["warnings"] = list(column["h"]["warnings"])
    for entry in column["screening"]:
        entry["confusion"] = {
            key: entry["confusion"][i] for i, key in enumerate(("tn", "fp", "fn", "tp"))
        }
    return column


def fingerprint_arrays(columns: dict[str, np.ndarray], labels: np.ndarray) -> str:
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(labels, dtype=np.int8).tobytes())
    for name in sorted(columns):
        digest.update(name.encode("utf-8"))
        digest.update(np.ascontiguousarray(columns[name], dtype=float).tobytes())
    return "sha256:" + digest.hexdigest()


def build_report(
    columns: dict[str, np.ndarray],
    labels: np.ndarray,
    config: EvalConfig,
    data_fingerprint: str | None = None,
    compare: bool = False,
) -> dict:
    """Evaluate the given score columns under one shared weight and prior.

    With compare=True (two or more columns) the report also ranks the
    columns by H and by AUC and flags any rank disagreement; the single
    shared weight instance is what makes those rankings commensurable.
    """
    config.validate()
    if not columns:
        raise ConfigError("need at least one score column")
    if compare and len(columns) < 2:
        raise ConfigError("comparison requires at least two score columns")

    ingested = {
        name: ingest(scores, labels, normalization=config.normalization)
        for name, scores in columns.items()
    }
    shared_priors = None
    shared_weight = None
    if config.prior != "beta":
        first = next(iter(ingested.values()))
        shared_priors = resolve_priors(config, first)
        shared_weight = resolve_weight(config, shared_priors)

    column_reports = {
        name: evaluate_column(
            data, config, shared_weight=shared_weight, shared_priors=shared_priors
        )
        for name, data in ingested.items()
    }

    report = {
        "schema_version": "1",
        "provenance": {
            "tool": "hmetric",
            "tool_version": __version__,
            "config": config.describe(),
            "data_fingerprint": data_fingerprint or fingerprint_arrays(columns, labels),
            "n_rows": int(np.asarray(labels).size),
            "timestamp": datetime.now(timezone.utc).isoformat(),
        },
        "columns": column_reports,
    }
    if compare:
        by_h = sorted(
            column_reports, key=lambda n: (-column_reports[n]["h"]["h"], n)
        )
        by_auc = sorted(
            column_reports, key=lambda n: (-column_reports[n]["auc"]["auc"], n)
        )
        report["comparison"] = {
            "ranking_by_h": by_h,
            "ranking_by_auc": by_auc,
            "rank_disagreement": by_h != by_auc,
        }
    return report


def render_report(report: dict) -> str:
    """Stable serialization: same report content, same bytes."""
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "hmetric evaluation report",
    "type": "object",
    "required": ["schema_version", "provenance", "columns"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": "1"},
        "provenance": {
            "type": "object",
            "required": [
                "tool",
                "tool_version",
                "config",
                "data_fingerprint",
                "n_rows",
                "timestamp",
            ],
            "properties": {
                "tool": {"type": "string"},
                "tool_version": {"type": "string"},
                "config": {"type": "object"},
                "data_fingerprint": {"type": "string"},
                "n_rows": {"type": "integer", "minimum": 1},
                "timestamp": {"type": "string"},
            },
        },
        "columns": {
            "type": "object",
            "minProperties": 1,
            "additionalProperties": {
                "type": "object",
                "required": [
                    "h",
                    "auc",
                    "mixture_weight_loss",
                    "independent_threshold_losses",
                    "screening",
                    "diagnostics",
                ],
                "properties": {
                    "h": {
                        "type": "object",
                        "required": [
                            "h",
                            "loss",
                            "reference_loss",
                            "weight_used",
                            "prior_used",
                            "mc_stderr",
                            "warnings",
                        ],
                        "properties": {
                            "h": {"type": "number", "maximum": 1.0},
                            "loss": {"type": "number", "minimum": 0.0},
                            "reference_loss": {"type": "number", "exclusiveMinimum": 0.0},
                            "weight_used": {"type": "object"},
                            "prior_used": {"type": "object"},
                            "mc_stderr": {"type": ["number", "null"]},
                            "warnings": {"type": "array", "items": {"type": "string"}},
                        },
                    },
                    "auc": {
                        "type": "object",
                        "required": ["auc", "n_pairs", "tie_pairs", "equivalent_loss"],
                        "properties": {
                            "auc": {"type": "number", "minimum": 0.0, "maximum": 1.0},
                            "n_pairs": {"type": "integer", "minimum": 1},
                            "tie_pairs": {"type": "integer", "minimum": 0},
                            "equivalent_loss": {"type": "number", "minimum": 0.0},
                        },
                    },
                    "mixture_weight_loss": {"type": "number", "minimum": 0.0},
                    "independent_threshold_losses": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["u", "loss"],
                            "properties": {
                                "u": {"type": "string"},
                                "loss": {"type": "number", "minimum": 0.0},
                            },
                        },
                    },
                    "screening": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": [
                                "proportion",
                                "threshold_rank",
                                "threshold",
                                "confusion",
                                "class0_recall",
                                "misclassification_rate",
                            ],
                            "properties": {
                                "proportion": {
                                    "type": "number",
                                    "exclusiveMinimum": 0.0,
                                    "exclusiveMaximum": 1.0,
                                },
                                "threshold_rank": {"type": "integer", "minimum": 1},
                                "threshold": {"type": "number"},
                                "confusion": {
                                    "type": "object",
                                    "required": ["tn", "fp", "fn", "tp"],
                                    "additionalProperties": {"type": "integer", "minimum": 0},
                                },
                                "class0_recall": {"type": "number"},
                                "misclassification_rate": {"type": "number"},
                            },
                        },
                    },
                    "diagnostics": {
                        "type": "object",
                        "required": ["suggest_label_inversion"],
                        "properties": {"suggest_label_inversion": {"type": "boolean"}},
                    },
                },
            },
        },
        "comparison": {
            "type": "object",
            "required": ["ranking_by_h", "ranking_by_auc", "rank_disagreement"],
            "properties": {
                "ranking_by_h": {"type": "array", "items": {"type": "string"}},
                "ranking_by_auc": {"type": "array", "items": {"type": "string"}},
                "rank_disagreement": {"type": "boolean"},
            },
        },
    },
}
