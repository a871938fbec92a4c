"""Command-line driver.

Progress and warnings go to standard error; machine-readable output goes
to files only. Every invocation writes ``run_manifest.json`` (config,
input digests, tool version) next to its outputs, and re-running with
identical inputs, config and seed reproduces every file byte for byte.

Exit status: 0 on success, 2 when the run completed but some cells were
voided or skipped (rejected series alone are not a failure), 1 on
configuration or I/O errors.
"""
from __future__ import annotations

import functools
import logging
import sys
from pathlib import Path

import click

from . import __version__, pipeline, synth
from .core import Frequency, RunConfig
from .errors import ForecastabilityError
from .ingest import LONG, M4_WIDE, PanelSource, ResultStore, write_panel_long

logger = logging.getLogger("forecastability")

_FORMAT_BY_FLAG = {"m4": M4_WIDE, "long": LONG}
_FREQ_CHOICES = [f.value for f in Frequency]


def _config_options(fn):
    @click.option("--rolls", default=10, show_default=True, help="Rolling origins per series.")
    @click.option("--roll-step", default=1, show_default=True, help="Steps between origins.")
    @click.option("--k", "k_neighbors", default=8, show_default=True,
                  help="Neighbour count for the MI estimator.")
    @click.option("--scale-floor-quantile", default=0.05, show_default=True,
                  help="Quantile of the per-frequency scale floor.")
    @click.option("--quantile-method", type=click.Choice(["linear", "nearest-rank"]),
                  default="linear", show_default=True)
    @click.option("--seed", default=0, show_default=True, help="Seed for randomized components.")
    @click.option("--ksg-jitter", default=0.0, show_default=True,
                  help="Optional tie-breaking jitter half-width for the MI estimator.")
    @click.option("--triage-stat", type=click.Choice(["mean", "at-h"]), default="mean",
                  show_default=True)
    @click.option("--triage-h", default=None, type=int,
                  help="Horizon for --triage-stat at-h (default: h_max).")
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)

    return wrapper


def _input_options(fn):
    @click.option("--input", "input_path", required=True, type=click.Path(path_type=Path),
                  help="Panel CSV.")
    @click.option("--format", "format_flag", type=click.Choice(sorted(_FORMAT_BY_FLAG)),
                  required=True, help="Panel layout.")
    @click.option("--frequency", type=click.Choice(_FREQ_CHOICES), required=True)
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)

    return wrapper


def _out_option(fn):
    @click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path),
                  help="Output directory.")
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)

    return wrapper


def _threads_option(fn):
    @click.option("--threads", default=None, type=int,
                  help="Worker processes (default: FORECASTABILITY_THREADS or all cores).")
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)

    return wrapper


def _models_option(fn):
    @click.option("--models", type=click.Choice(list(pipeline.MODEL_NAMES)), multiple=True,
                  default=list(pipeline.MODEL_NAMES), show_default=True)
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)

    return wrapper


def _build_config(**kw) -> RunConfig:
    return RunConfig(
        rolls=kw.pop("rolls"),
        roll_step=kw.pop("roll_step"),
        k_neighbors=kw.pop("k_neighbors"),
        scale_floor_quantile=kw.pop("scale_floor_quantile"),
        seed=kw.pop("seed"),
        quantile_method=kw.pop("quantile_method"),
        ksg_jitter=kw.pop("ksg_jitter"),
        triage_stat=kw.pop("triage_stat"),
        triage_h=kw.pop("triage_h"),
    )


def _source(input_path: Path, format_flag: str, frequency: str) -> PanelSource:
    return PanelSource(
        path=input_path, format=_FORMAT_BY_FLAG[format_flag],
        frequency=Frequency.parse(frequency),
    )


def _resolve_threads(threads: int | None) -> int:
    return threads if threads and threads > 0 else pipeline.default_threads()


def _finish(stats: dict) -> None:
    logger.info("done: %s", stats)
    if stats.get("partial"):
        sys.exit(2)


@click.group()
@click.version_option(version=__version__, prog_name="forecastability")
def main() -> None:
    """Horizon-specific forecastability triage for time series panels."""
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )


def _stage_command(fn):
    """Convert package errors into CLI errors (exit 1) uniformly."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ForecastabilityError as exc:
            raise click.ClickException(str(exc)) from exc
        except OSError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


@main.command(name="synth")
@click.option("--kind", type=click.Choice(list(synth.KINDS)), required=True)
@click.option("--phi", default=0.0, show_default=True, help="AR(1) coefficient.")
@click.option("--m", default=12, show_default=True, help="Seasonal period (seasonal-sine).")
@click.option("--snr", default=10.0, show_default=True, help="Signal-to-noise ratio.")
@click.option("--slope", default=1.0, show_default=True, help="Trend slope (trend-noise).")
@click.option("--len", "length", required=True, type=int, help="Observations per series.")
@click.option("--count", required=True, type=int, help="Number of series.")
@click.option("--seed", default=0, show_default=True)
@click.option("--frequency", type=click.Choice(_FREQ_CHOICES), default="monthly",
              show_default=True)
@click.option("--id-prefix", default="", help="Series id prefix (default: the kind).")
@click.option("--out", "out_file", required=True, type=click.Path(path_type=Path),
              help="Long-format CSV to write.")
@_stage_command
def synth_cmd(kind, phi, m, snr, slope, length, count, seed, frequency, id_prefix, out_file):
    """Write a deterministic synthetic panel (long format)."""
    spec = synth.SynthSpec(
        kind=kind, length=length, count=count, seed=seed, phi=phi, m=m, snr=snr,
        slope=slope, frequency=Frequency.parse(frequency), id_prefix=id_prefix,
    )
    panel = synth.generate(spec)
    write_panel_long(out_file, panel)
    logger.info("wrote %d series to %s", len(panel), out_file)


@main.command(name="gates")
@_input_options
@_out_option
@_config_options
@_stage_command
def gates_cmd(input_path, format_flag, frequency, out_dir, **cfg):
    """Apply the four feasibility gates; write survivors and rejects."""
    config = _build_config(**cfg)
    source = _source(input_path, format_flag, frequency)
    store = ResultStore(out_dir)
    stats = pipeline.stage_gates(source, config, store)
    pipeline.write_manifest(store, "gates", config, [source.path], frequency=source.frequency)
    _finish(stats)


@main.command(name="ami")
@_input_options
@_out_option
@_config_options
@_threads_option
@_stage_command
def ami_cmd(input_path, format_flag, frequency, out_dir, threads, **cfg):
    """Compute dependence profiles for the gate survivors."""
    config = _build_config(**cfg)
    source = _source(input_path, format_flag, frequency)
    store = ResultStore(out_dir)
    stats = pipeline.stage_ami(source, config, store, _resolve_threads(threads))
    pipeline.write_manifest(store, "ami", config, [source.path], frequency=source.frequency)
    _finish(stats)


@main.command(name="evaluate")
@_input_options
@_out_option
@_config_options
@_models_option
@_threads_option
@_stage_command
def evaluate_cmd(input_path, format_flag, frequency, out_dir, models, threads, **cfg):
    """Run the rolling-origin evaluation of the probe forecasters."""
    config = _build_config(**cfg)
    source = _source(input_path, format_flag, frequency)
    store = ResultStore(out_dir)
    stats = pipeline.stage_evaluate(source, config, store, models, _resolve_threads(threads))
    pipeline.write_manifest(
        store, "evaluate", config, [source.path], models=models, frequency=source.frequency
    )
    _finish(stats)


@main.command(name="validate")
@_out_option
@_config_options
@_models_option
@_stage_command
def validate_cmd(out_dir, models, **cfg):
    """Correlate dependence with realized error (two-stage plus robustness)."""
    config = _build_config(**cfg)
    store = ResultStore(out_dir)
    stats = pipeline.stage_validate(config, store, models)
    tables = [store.path_of("ami_profiles"), store.path_of("smape_mean")]
    pipeline.write_manifest(store, "validate", config, tables, models=models)
    _finish(stats)


@main.command(name="triage")
@_out_option
@_config_options
@_stage_command
def triage_cmd(out_dir, **cfg):
    """Classify survivors into modelling-investment actions."""
    config = _build_config(**cfg)
    store = ResultStore(out_dir)
    stats = pipeline.stage_triage(config, store)
    pipeline.write_manifest(store, "triage", config, [store.path_of("ami_profiles")])
    _finish(stats)


@main.command(name="report")
@_out_option
@_config_options
@_models_option
@_stage_command
def report_cmd(out_dir, models, **cfg):
    """Write the decision-utility (tercile) and training-length tables."""
    config = _build_config(**cfg)
    store = ResultStore(out_dir)
    stats = pipeline.stage_report(config, store, models)
    tables = [
        store.path_of("ami_profiles"),
        store.path_of("smape_mean"),
        store.path_of("survivors"),
    ]
    pipeline.write_manifest(store, "report", config, tables, models=models)
    _finish(stats)


@main.command(name="run-all")
@_input_options
@_out_option
@_config_options
@_models_option
@_threads_option
@_stage_command
def run_all_cmd(input_path, format_flag, frequency, out_dir, models, threads, **cfg):
    """Run gates, ami, evaluate, validate, triage and report in order."""
    config = _build_config(**cfg)
    source = _source(input_path, format_flag, frequency)
    store = ResultStore(out_dir)
    stats = pipeline.run_all(source, config, store, models, _resolve_threads(threads))
    pipeline.write_manifest(
        store, "run-all", config, [source.path], models=models, frequency=source.frequency
    )
    _finish(stats)


if __name__ == "__main__":
    main()
