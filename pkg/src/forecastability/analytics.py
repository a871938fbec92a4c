"""Validation of the dependence signal against realized error, plus triage.

The primary validation is two-stage: per horizon, a Spearman rank
correlation across series between the lag-h dependence estimate and the
mean rolling-origin error at the same horizon; those horizon-level
correlations are then averaged within (frequency, model). Robustness
aggregations (median across horizons, pooling all series-horizon pairs
into a single correlation) and decision-utility views (error medians by
dependence tercile, correlations by training-length stratum) accompany it.

Everything here is rank-based: any strictly increasing transform of the
dependence values leaves every output unchanged.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.stats import rankdata

from .core import Frequency
from .errors import DegenerateInput, InsufficientData, LengthMismatch

logger = logging.getLogger(__name__)

TERCILES = ("low", "mid", "high")
STRATA = ("short", "medium", "long")
ACTIONS = {
    "low": "manage_uncertainty",
    "mid": "model_cautiously",
    "high": "invest_in_modelling",
}


def spearman(x, y) -> float:
    """Spearman rank correlation with average ranks for ties."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch("inputs must be 1-d arrays of equal length")
    if x.size < 3:
        raise InsufficientData(f"need at least 3 pairs, got {x.size}")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DegenerateInput("constant vector has no rank correlation")
    rho = float(np.corrcoef(rankdata(x), rankdata(y))[0, 1])
    return min(1.0, max(-1.0, rho))


@dataclass(frozen=True)
class HorizonRho:
    rho: float
    n_series: int


@dataclass(frozen=True)
class ValidationSummary:
    frequency: Frequency
    model: str
    per_h: dict[int, HorizonRho]
    mean_rho: float
    median_rho: float
    pooled_rho: float


@dataclass(frozen=True)
class TercileRow:
    tercile: str
    median_smape: float
    n_pairs: int


@dataclass(frozen=True)
class StratumRow:
    stratum: str
    rho: float
    n_series: int


@dataclass(frozen=True)
class TriageLabel:
    series_id: str
    tercile: str
    action: str


AmiBySeries = Mapping[str, Mapping[int, float]]
SmapeBySeries = Mapping[str, Mapping[int, float]]


def _pairs_at(ami: AmiBySeries, err: SmapeBySeries, h: int):
    ids = sorted(sid for sid in ami if h in ami[sid] and h in err.get(sid, ()))
    a = np.array([ami[sid][h] for sid in ids])
    e = np.array([err[sid][h] for sid in ids])
    return ids, a, e


def validate(
    ami: AmiBySeries,
    err: SmapeBySeries,
    frequency: Frequency,
    model: str,
    h_max: int,
) -> ValidationSummary:
    """Two-stage Spearman validation plus pooled/median robustness values.

    Horizons with fewer than 3 valid pairs or a degenerate vector are
    skipped (logged); at least one horizon must survive.
    """
    per_h: dict[int, HorizonRho] = {}
    pooled_a: list[np.ndarray] = []
    pooled_e: list[np.ndarray] = []
    for h in range(1, h_max + 1):
        _, a, e = _pairs_at(ami, err, h)
        if a.size < 3:
            logger.info("validate %s/%s h=%d: %d pairs, skipped", frequency, model, h, a.size)
            continue
        try:
            rho = spearman(a, e)
        except DegenerateInput:
            logger.warning("validate %s/%s h=%d: degenerate input, skipped", frequency, model, h)
            continue
        per_h[h] = HorizonRho(rho=rho, n_series=int(a.size))
        pooled_a.append(a)
        pooled_e.append(e)
    if not per_h:
        raise InsufficientData(f"no horizon with enough pairs for {frequency}/{model}")
    rhos = np.array([per_h[h].rho for h in sorted(per_h)])
    pooled = spearman(np.concatenate(pooled_a), np.concatenate(pooled_e))
    return ValidationSummary(
        frequency=frequency,
        model=model,
        per_h=per_h,
        mean_rho=float(np.mean(rhos)),
        median_rho=float(np.median(rhos)),
        pooled_rho=pooled,
    )


def _tercile_of(value: float, b1: float, b2: float) -> str:
    # boundary ties go to the lower tercile
    if value <= b1:
        return "low"
    if value <= b2:
        return "mid"
    return "high"


def tercile_analysis(ami: AmiBySeries, err: SmapeBySeries, h_max: int) -> list[TercileRow]:
    """Median error by dependence tercile over pooled (series, horizon) pairs.

    Tercile boundaries are equal-frequency over the pooled dependence values.
    When every value is identical the partition is degenerate and a single
    'all' row is emitted with a warning.
    """
    values: list[tuple[float, float]] = []
    for h in range(1, h_max + 1):
        _, a, e = _pairs_at(ami, err, h)
        values.extend(zip(a.tolist(), e.tolist()))
    if len(values) < 3:
        raise InsufficientData(f"only {len(values)} valid (series, horizon) pairs")
    a = np.array([v[0] for v in values])
    e = np.array([v[1] for v in values])
    if np.all(a == a[0]):
        logger.warning("tercile analysis: all dependence values identical, degenerate partition")
        return [TercileRow("all", float(np.median(e)), int(e.size))]
    b1, b2 = np.quantile(a, [1.0 / 3.0, 2.0 / 3.0])
    rows = []
    for name in TERCILES:
        mask = np.array([_tercile_of(v, b1, b2) == name for v in a])
        if not mask.any():
            logger.warning("tercile analysis: empty %s tercile (heavy ties)", name)
            continue
        rows.append(TercileRow(name, float(np.median(e[mask])), int(mask.sum())))
    return rows


def length_strata(
    ami: AmiBySeries,
    err: SmapeBySeries,
    t_base: Mapping[str, int],
    h_max: int,
) -> list[StratumRow]:
    """Two-stage mean correlation within training-length terciles.

    Series are stratified by base-window length; each stratum repeats the
    primary two-stage aggregation. Strata without enough data are skipped.
    """
    ids = sorted(sid for sid in ami if sid in err and sid in t_base)
    if len(ids) < 3:
        raise InsufficientData(f"only {len(ids)} series with dependence, error and length")
    lengths = np.array([t_base[sid] for sid in ids], dtype=np.float64)
    if np.all(lengths == lengths[0]):
        logger.warning("length strata: single training length, degenerate partition")
        strata_of = {sid: "short" for sid in ids}
    else:
        b1, b2 = np.quantile(lengths, [1.0 / 3.0, 2.0 / 3.0])
        strata_of = {sid: _stratum_of(t_base[sid], b1, b2) for sid in ids}
    rows = []
    for name in STRATA:
        members = [sid for sid in ids if strata_of[sid] == name]
        if not members:
            continue
        sub_ami = {sid: ami[sid] for sid in members}
        sub_err = {sid: err[sid] for sid in members}
        mean_rho = _two_stage_mean_rho(sub_ami, sub_err, h_max)
        if mean_rho is None:
            logger.warning("length strata: stratum %s has too little data, skipped", name)
            continue
        rows.append(StratumRow(name, mean_rho, len(members)))
    return rows


def _two_stage_mean_rho(ami: AmiBySeries, err: SmapeBySeries, h_max: int) -> float | None:
    rhos = []
    for h in range(1, h_max + 1):
        _, a, e = _pairs_at(ami, err, h)
        if a.size < 3:
            continue
        try:
            rhos.append(spearman(a, e))
        except DegenerateInput:
            continue
    return float(np.mean(rhos)) if rhos else None


def _stratum_of(value: float, b1: float, b2: float) -> str:
    if value <= b1:
        return "short"
    if value <= b2:
        return "medium"
    return "long"


def triage(ami: AmiBySeries, stat: str = "mean", at_h: int | None = None) -> list[TriageLabel]:
    """Classify each series by its dependence tercile within the frequency.

    The per-series scalar is the mean dependence over defined horizons
    (default) or the value at one horizon. High dependence warrants model
    investment, mid calls for cautious modelling, low for managing
    uncertainty instead of chasing accuracy.
    """
    ids = sorted(ami)
    if not ids:
        return []
    if stat == "mean":
        scalars = {sid: float(np.mean([v for v in ami[sid].values()])) for sid in ids}
    elif stat == "at-h":
        if at_h is None:
            raise ValueError("at-h triage requires a horizon")
        missing = [sid for sid in ids if at_h not in ami[sid]]
        if missing:
            raise InsufficientData(
                f"{len(missing)} series lack a dependence value at h={at_h}"
            )
        scalars = {sid: float(ami[sid][at_h]) for sid in ids}
    else:
        raise ValueError(f"unknown triage stat {stat!r}")
    values = np.array([scalars[sid] for sid in ids])
    if np.all(values == values[0]):
        logger.warning("triage: all series share one dependence value; labelling all low")
        return [TriageLabel(sid, "low", ACTIONS["low"]) for sid in ids]
    b1, b2 = np.quantile(values, [1.0 / 3.0, 2.0 / 3.0])
    out = []
    for sid in ids:
        terc = _tercile_of(scalars[sid], b1, b2)
        out.append(TriageLabel(sid, terc, ACTIONS[terc]))
    return out
