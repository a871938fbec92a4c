"""Expanding-window rolling-origin evaluation and sMAPE scoring.

Each origin trains a probe on a strict prefix and scores its point
forecasts against the following h_max observations. Per-horizon records
keep one sMAPE term per origin (horizon h is scored on its own, so the
error at h pairs with the dependence estimate at the same h) and a record
exists only when every origin produced a forecast: no partial averaging.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import FrequencyProfile, TimeSeries, WindowLayout
from .errors import EmptyInput, ForecastabilityError, LengthMismatch
from .probes import ProbeModel

logger = logging.getLogger(__name__)


def smape_terms(actual, forecast) -> np.ndarray:
    """Per-element symmetric error terms, each in [0, 200] percent.

    A term with both |actual| and |forecast| equal to zero is defined as 0
    (a perfect forecast of a zero).
    """
    a = np.asarray(actual, dtype=np.float64)
    f = np.asarray(forecast, dtype=np.float64)
    if a.shape != f.shape or a.ndim != 1:
        raise LengthMismatch(f"actual {a.shape} vs forecast {f.shape}")
    if a.size == 0:
        raise EmptyInput("empty sMAPE input")
    denom = np.abs(a) + np.abs(f)
    with np.errstate(invalid="ignore", divide="ignore"):
        # ratio first: |f - a| <= denom holds exactly in floating point, so
        # the quotient never exceeds 1 and the bound of 200 is exact
        terms = np.where(denom == 0.0, 0.0, 200.0 * (np.abs(f - a) / denom))
    return terms


def smape(actual, forecast) -> float:
    """Mean symmetric absolute percentage error over the window, in percent."""
    return float(np.mean(smape_terms(actual, forecast)))


@dataclass(frozen=True)
class EvalRecord:
    series_id: str
    model_name: str
    h: int
    per_origin_smape: tuple[float, ...]
    mean_smape: float


def origin_forecasts(
    series: TimeSeries,
    layout: WindowLayout,
    probe: ProbeModel,
    profile: FrequencyProfile,
) -> np.ndarray | None:
    """Forecast matrix (rolls x h_max), or None when any origin fails.

    Each row is produced from the origin's training prefix alone.
    """
    rolls = len(layout.origins)
    out = np.empty((rolls, profile.h_max))
    for j, prefix_len in enumerate(layout.origins):
        history = series.values[:prefix_len]
        try:
            fc = probe.fit_and_forecast(history, profile.m, profile.h_max)
        except ForecastabilityError as exc:
            logger.warning(
                "probe %s failed on series %s at origin %d: %s",
                probe.name, series.id, j, exc,
            )
            return None
        fc = np.asarray(fc, dtype=np.float64)
        if fc.shape != (profile.h_max,) or not np.all(np.isfinite(fc)):
            logger.warning(
                "probe %s produced invalid forecasts on series %s at origin %d",
                probe.name, series.id, j,
            )
            return None
        out[j] = fc
    return out


def rolling_eval(
    series: TimeSeries,
    layout: WindowLayout,
    probe: ProbeModel,
    profile: FrequencyProfile,
) -> list[EvalRecord]:
    """Evaluate one probe on one series across all origins.

    Returns one record per horizon, or an empty list when any origin failed
    (an incomplete origin set voids every horizon for this series/probe).
    """
    forecasts = origin_forecasts(series, layout, probe, profile)
    if forecasts is None:
        return []
    rolls = len(layout.origins)
    terms = np.empty((rolls, profile.h_max))
    for j, prefix_len in enumerate(layout.origins):
        actual = series.values[prefix_len : prefix_len + profile.h_max]
        terms[j] = smape_terms(actual, forecasts[j])
    records = []
    for h in range(1, profile.h_max + 1):
        col = terms[:, h - 1]
        records.append(
            EvalRecord(
                series_id=series.id,
                model_name=probe.name,
                h=h,
                per_origin_smape=tuple(float(v) for v in col),
                mean_smape=float(np.mean(col)),
            )
        )
    return records
