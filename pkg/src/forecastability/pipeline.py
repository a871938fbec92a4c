"""Stage functions behind the command-line driver.

Every stage reads its prerequisites from disk and writes its outputs to
disk, so stages are independently re-runnable and inspectable; run-all is
nothing more than the stages in order. Worker parallelism never changes
results: per-series computations are independent and all tables are
written in sorted order.
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .ami import ami_profile
from .analytics import length_strata, tercile_analysis, triage, validate
from .core import PROFILES, Frequency, RunConfig, layout
from .errors import InsufficientData, UsageError
from .evaluation import rolling_eval
from .gates import run_gates
from .ingest import PanelSource, ResultStore, load_panel
from .probes import make_probes

logger = logging.getLogger(__name__)

MODEL_NAMES = ("seasonal-naive", "ets")


def default_threads() -> int:
    env = os.environ.get("FORECASTABILITY_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _pmap(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunk = max(1, len(items) // (threads * 4))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


# -- stage: gates ---------------------------------------------------------


def stage_gates(source: PanelSource, config: RunConfig, store: ResultStore) -> dict:
    panel, parse_rejects = load_panel(source)
    profile = PROFILES[source.frequency]
    survivor_panel, reports = run_gates(panel, profile, config, compute_profiles=False)
    reject_rows = [(r.series_id, "parse", r.reason) for r in parse_rejects]
    reject_rows += [
        (r.series_id, r.failed_gate, r.reason) for r in reports if not r.passed
    ]
    reject_rows.sort()
    store.write_survivors(source.frequency, survivor_panel.survivors)
    store.write_rejects(source.frequency, reject_rows)
    return {
        "series": len(panel) + len(parse_rejects),
        "survivors": len(survivor_panel.survivors),
        "scale_floor": survivor_panel.scale_floor,
    }


# -- stage: ami -----------------------------------------------------------


def _ami_worker(args):
    series, profile, config = args
    lo = layout(len(series), profile, config)
    return ami_profile(series, lo, profile, config)


def stage_ami(
    source: PanelSource, config: RunConfig, store: ResultStore, threads: int = 1
) -> dict:
    panel, _ = load_panel(source)
    profile = PROFILES[source.frequency]
    survivors = read_survivors(store)
    by_id = {s.id: s for s in panel}
    missing = [sid for sid in survivors if sid not in by_id]
    if missing:
        raise UsageError(
            f"survivors.csv names {len(missing)} series absent from the input panel "
            f"(first: {missing[0]!r}); re-run gates on this input"
        )
    items = [(by_id[sid], profile, config) for sid in sorted(survivors)]
    profiles = _pmap(_ami_worker, items, threads)
    store.write_ami_profiles(source.frequency, profiles)
    return {"profiles": len(profiles)}


# -- stage: evaluate ------------------------------------------------------


def _eval_worker(args):
    series, probe, profile, config = args
    lo = layout(len(series), profile, config)
    return rolling_eval(series, lo, probe, profile)


def stage_evaluate(
    source: PanelSource,
    config: RunConfig,
    store: ResultStore,
    models=MODEL_NAMES,
    threads: int = 1,
) -> dict:
    panel, _ = load_panel(source)
    profile = PROFILES[source.frequency]
    survivors = read_survivors(store)
    by_id = {s.id: s for s in panel}
    missing = [sid for sid in survivors if sid not in by_id]
    if missing:
        raise UsageError(
            f"survivors.csv names {len(missing)} series absent from the input panel "
            f"(first: {missing[0]!r}); re-run gates on this input"
        )
    probes = make_probes(models, config.seed)
    items = [
        (by_id[sid], probe, profile, config)
        for probe in probes
        for sid in sorted(survivors)
    ]
    results = _pmap(_eval_worker, items, threads)
    records = [rec for recs in results for rec in recs]
    dropped = sum(1 for recs in results if not recs)
    store.write_smape(source.frequency, records)
    store.write_smape_mean(source.frequency, records)
    if dropped:
        logger.warning("evaluate: %d (series, probe) cells voided by probe failures", dropped)
    return {"records": len(records), "dropped_cells": dropped, "partial": dropped > 0}


# -- stage: validate ------------------------------------------------------


def stage_validate(config: RunConfig, store: ResultStore, models=MODEL_NAMES) -> dict:
    frequency, ami = read_ami_profiles(store)
    err_by_model = read_smape_mean(store)
    profile = PROFILES[frequency]
    summaries = []
    skipped = []
    for model in models:
        err = err_by_model.get(model, {})
        try:
            summaries.append(validate(ami, err, frequency, model, profile.h_max))
        except InsufficientData as exc:
            logger.warning("validate: %s skipped: %s", model, exc)
            skipped.append(model)
    store.write_validation(summaries)
    store.write_validation_summary(summaries)
    store.write_heatmap(summaries)
    return {"models": len(summaries), "partial": bool(skipped)}


# -- stage: triage --------------------------------------------------------


def stage_triage(config: RunConfig, store: ResultStore) -> dict:
    frequency, ami = read_ami_profiles(store)
    at_h = config.triage_h
    if config.triage_stat == "at-h" and at_h is None:
        at_h = PROFILES[frequency].h_max
    labels = triage(ami, stat=config.triage_stat, at_h=at_h)
    store.write_triage(frequency, labels)
    return {"labels": len(labels)}


# -- stage: report --------------------------------------------------------


def stage_report(config: RunConfig, store: ResultStore, models=MODEL_NAMES) -> dict:
    frequency, ami = read_ami_profiles(store)
    err_by_model = read_smape_mean(store)
    t_base = {sid: tb for sid, (tb, _) in read_survivors(store).items()}
    profile = PROFILES[frequency]
    terciles = {}
    strata = {}
    partial = False
    for model in models:
        err = err_by_model.get(model, {})
        try:
            terciles[model] = tercile_analysis(ami, err, profile.h_max)
            strata[model] = length_strata(ami, err, t_base, profile.h_max)
        except InsufficientData as exc:
            logger.warning("report: %s skipped: %s", model, exc)
            partial = True
    store.write_terciles(frequency, terciles)
    store.write_strata(frequency, strata)
    return {"models": len(terciles), "partial": partial}


# -- run-all --------------------------------------------------------------


def run_all(
    source: PanelSource,
    config: RunConfig,
    store: ResultStore,
    models=MODEL_NAMES,
    threads: int = 1,
) -> dict:
    stats = {"gates": stage_gates(source, config, store)}
    stats["ami"] = stage_ami(source, config, store, threads)
    stats["evaluate"] = stage_evaluate(source, config, store, models, threads)
    stats["validate"] = stage_validate(config, store, models)
    stats["triage"] = stage_triage(config, store)
    stats["report"] = stage_report(config, store, models)
    stats["partial"] = any(
        isinstance(s, dict) and s.get("partial") for s in stats.values()
    )
    return stats


# -- intermediate-table readers -------------------------------------------


def _require(store: ResultStore, table: str, producer: str) -> Path:
    path = store.path_of(table)
    if not path.exists():
        raise UsageError(f"missing {path}; run the '{producer}' stage first")
    return path


def _read_rows(path: Path) -> list[list[str]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        return [row for row in reader if row]


def read_survivors(store: ResultStore) -> dict[str, tuple[int, float]]:
    rows = _read_rows(_require(store, "survivors", "gates"))
    return {row[0]: (int(row[2]), float(row[3])) for row in rows}


def read_ami_profiles(store: ResultStore) -> tuple[Frequency, dict[str, dict[int, float]]]:
    rows = _read_rows(_require(store, "ami_profiles", "ami"))
    if not rows:
        raise UsageError(f"{store.path_of('ami_profiles')} has no data rows")
    frequency = Frequency.parse(rows[0][1])
    ami: dict[str, dict[int, float]] = {}
    for sid, _freq, h, _n_eff, value in rows:
        ami.setdefault(sid, {})[int(h)] = float(value)
    return frequency, ami


def read_smape_mean(store: ResultStore) -> dict[str, dict[str, dict[int, float]]]:
    rows = _read_rows(_require(store, "smape_mean", "evaluate"))
    out: dict[str, dict[str, dict[int, float]]] = {}
    for sid, _freq, model, h, value in rows:
        out.setdefault(model, {}).setdefault(sid, {})[int(h)] = float(value)
    return out


# -- manifest -------------------------------------------------------------


def write_manifest(
    store: ResultStore,
    subcommand: str,
    config: RunConfig,
    inputs: list[Path],
    models=(),
    frequency: Frequency | None = None,
) -> Path:
    digests = {}
    for path in inputs:
        h = hashlib.sha256()
        with open(path, "rb") as fh:
            for block in iter(lambda: fh.read(1 << 20), b""):
                h.update(block)
        digests[str(path)] = h.hexdigest()
    manifest = {
        "tool": "forecastability",
        "version": __version__,
        "subcommand": subcommand,
        "config": config.as_dict(),
        "frequency": str(frequency) if frequency else None,
        "models": list(models),
        "inputs": digests,
    }
    path = store.out_dir / "run_manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
