"""Command-line surface: CSV in, JSON report or plot-ready CSV curves out.

Exit codes: 0 success, 2 malformed input (reported with line numbers),
3 configuration error, 4 degenerate data (a single class).  The HMETRIC_LOG
environment variable sets the log level; nothing else is read from the
environment.
"""

from __future__ import annotations

import csv
import logging
import os
import sys
from pathlib import Path

import click
import numpy as np

from .config import EvalConfig
from .distributions import BetaWeight
from .empirical import empirical_cdfs, ingest, read_scores_csv
from .errors import ConfigError, DegenerateDataError, HmetricError
from .loss import loss_curve
from .report import build_report, render_report, resolve_priors, resolve_weight

logger = logging.getLogger("hmetric")


def _setup_logging():
    level = os.environ.get("HMETRIC_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))


def _exit_code(exc: HmetricError) -> int:
    if isinstance(exc, ConfigError):
        return 3
    if isinstance(exc, DegenerateDataError):
        return 4
    return 2


def _run(body):
    _setup_logging()
    try:
        body()
    except HmetricError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(_exit_code(exc))
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


def _config_options(fn):
    options = [
        click.option("--weight", default="default", show_default=True,
                     help="Cost weight: 'default', 'beta', or 'tabulated:<csv path>'."),
        click.option("--alpha", type=float, default=None,
                     help="Alpha shape for --weight beta."),
        click.option("--beta", type=float, default=None,
                     help="Beta shape for --weight beta."),
        click.option("--prior", default="empirical", show_default=True,
                     help="Prior handling: 'empirical', 'fixed', or 'beta' "
                          "(distributed pi0, Beta(2,2))."),
        click.option("--pi0", type=float, default=None, help="pi0 for --prior fixed."),
        click.option("--mode", default="calibrated", show_default=True,
                     help="Threshold rule: 'calibrated' or 'optimal'."),
        click.option("--method", default="quadrature", show_default=True,
                     help="Integration: 'quadrature' or 'monte-carlo'."),
        click.option("--resolution", type=int, default=4096, show_default=True,
                     help="Grid resolution for curves and quadrature validation."),
        click.option("--mc-samples", type=int, default=10000, show_default=True,
                     help="Monte Carlo sample count."),
        click.option("--seed", type=int, default=None,
                     help="Seed; required whenever Monte Carlo is active."),
        click.option("--normalize", default="reject", show_default=True,
                     help="Score normalization: 'reject', 'minmax' or 'logistic'."),
        click.option("--screen", default="", help="Screening proportions, e.g. '0.1,0.25'."),
        click.option("--u-dist", multiple=True,
                     help="Independent threshold distribution: 'pooled', "
                          "'class1-ranks' or 'point:<t>' (repeatable)."),
    ]
    for opt in reversed(options):
        fn = opt(fn)
    return fn


def _build_config(weight, alpha, beta, prior, pi0, mode, method, resolution,
                  mc_samples, seed, normalize, screen, u_dist) -> EvalConfig:
    weight_kind, weight_path = weight, None
    if weight.startswith("tabulated:"):
        weight_kind, weight_path = "tabulated", weight.split(":", 1)[1]
    elif weight == "tabulated":
        raise ConfigError("tabulated weight needs a path: --weight tabulated:<csv path>")
    if weight_kind == "beta" and (alpha is None or beta is None):
        raise ConfigError("--weight beta requires --alpha and --beta")
    proportions = []
    if screen:
        for token in screen.split(","):
            try:
                proportions.append(float(token))
            except ValueError:
                raise ConfigError(f"bad screening proportion {token!r}") from None
    config = EvalConfig(
        weight=weight_kind,
        weight_alpha=alpha,
        weight_beta=beta,
        weight_path=weight_path,
        prior=prior,
        pi0=pi0,
        threshold_mode=mode,
        method=method.replace("-", "_"),
        resolution=resolution,
        mc_samples=mc_samples,
        seed=seed,
        normalization=normalize,
        screen_proportions=tuple(proportions),
        u_dists=tuple(u_dist),
    )
    return config.validate()


def _write_report(report: dict, out: str):
    text = render_report(report)
    if out == "-":
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text, encoding="utf-8")
        logger.info("wrote report to %s", out)


def _fingerprint_file(path: str) -> str:
    import hashlib

    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


@click.group()
def main():
    """Evaluate binary classifier scores by the H-measure and related
    cost-weighted losses, alongside the AUC."""


@main.command()
@click.argument("input_csv", type=str)
@_config_options
@click.option("--out", default="-", show_default=True, help="Report path ('-' for stdout).")
def evaluate(input_csv, out, **cfg):
    """Evaluate every score column of INPUT_CSV and write a JSON report."""

    def body():
        config = _build_config(**cfg)
        names, columns, labels = read_scores_csv(input_csv)
        report = build_report(
            columns, labels, config, data_fingerprint=_fingerprint_file(input_csv)
        )
        _write_report(report, out)

    _run(body)


@main.command()
@click.argument("input_csv", type=str)
@click.option("--columns", required=True,
              help="Comma-separated score columns to compare (at least two).")
@_config_options
@click.option("--out", default="-", show_default=True, help="Report path ('-' for stdout).")
def compare(input_csv, columns, out, **cfg):
    """Compare score columns under one shared weight and prior, ranking
    them by H and by AUC and flagging rank disagreements."""

    def body():
        config = _build_config(**cfg)
        names, all_columns, labels = read_scores_csv(input_csv)
        wanted = [token.strip() for token in columns.split(",") if token.strip()]
        missing = [name for name in wanted if name not in all_columns]
        if missing:
            raise ConfigError(f"score columns not in the input: {', '.join(missing)}")
        selected = {name: all_columns[name] for name in wanted}
        report = build_report(
            selected,
            labels,
            config,
            data_fingerprint=_fingerprint_file(input_csv),
            compare=True,
        )
        _write_report(report, out)

    _run(body)


def _write_csv(path: Path, header: list[str], rows):
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


@main.command()
@click.argument("input_csv", type=str)
@click.option("--column", default=None,
              help="Score column to plot (defaults to the only score column).")
@_config_options
@click.option("--out-dir", required=True, help="Directory for the curve CSVs.")
def curves(input_csv, column, out_dir, **cfg):
    """Write plot-ready CSVs: the minimum-loss curve over costs, the cost
    weight density, and the ROC points over pooled thresholds."""

    def body():
        config = _build_config(**cfg)
        if config.prior == "beta":
            raise ConfigError("curves need a concrete prior; use empirical or fixed")
        names, all_columns, labels = read_scores_csv(input_csv)
        name = column
        if name is None:
            if len(names) != 1:
                raise ConfigError(
                    f"input has {len(names)} score columns; pick one with --column"
                )
            name = names[0]
        elif name not in all_columns:
            raise ConfigError(f"score column {name!r} not in the input")

        data = ingest(all_columns[name], labels, normalization=config.normalization)
        priors = resolve_priors(config, data)
        weight = resolve_weight(config, priors)
        cdfs = empirical_cdfs(data)

        out_path = Path(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)

        curve = loss_curve(priors, cdfs, mode=config.threshold_mode,
                           grid_size=config.resolution)
        _write_csv(
            out_path / "loss_curve.csv",
            ["c", "min_loss"],
            ((f"{c:.10g}", f"{v:.10g}") for c, v in zip(curve.grid, curve.loss)),
        )

        grid = (np.arange(config.resolution) + 0.5) / config.resolution
        density = weight.density(grid)
        _write_csv(
            out_path / "weight.csv",
            ["c", "density"],
            ((f"{c:.10g}", f"{d:.10g}") for c, d in zip(grid, density)),
        )

        thresholds = np.unique(data.scores)
        _write_csv(
            out_path / "roc.csv",
            ["fpr", "tpr"],
            (
                (f"{1.0 - cdfs.f0(t):.10g}", f"{1.0 - cdfs.f1(t):.10g}")
                for t in thresholds
            ),
        )
        logger.info("wrote curves to %s", out_path)

    _run(body)


if __name__ == "__main__":
    main()
