"""Feasibility gates: which series support the diagnostic and the protocol.

Gates run in a fixed order per series and the first failure wins:

  (i)   rolling feasibility - the layout must host every origin,
  (ii)  scale defined       - mean absolute seasonal (or first) difference
                              exists on the base window,
  (iii) scale floor         - base-window scale at or above the per-frequency
                              quantile floor (strictly-below is excluded),
  (iv)  AMI at h_max        - the dependence estimate exists at the maximum
                              horizon.

The floor is computed over gate-(ii) survivors only. Exclusions are
explicit: every failure becomes a reject row, never a silent drop.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .ami import AmiProfile, ami_profile, feasible_at_h_max
from .core import Frequency, FrequencyProfile, RunConfig, TimeSeries, WindowLayout, layout
from .errors import DegenerateSeries, EmptyInput, GateIvFailure, InfeasibleLength, ScaleUndefined

logger = logging.getLogger(__name__)

GATE_ROLLING = "rolling_feasibility"
GATE_SCALE_DEFINED = "scale_defined"
GATE_SCALE_FLOOR = "scale_floor"
GATE_AMI_AT_HMAX = "ami_at_hmax"


@dataclass(frozen=True)
class GateReport:
    series_id: str
    passed: bool
    failed_gate: str | None = None
    scale0: float | None = None
    reason: str = ""


@dataclass(frozen=True)
class Survivor:
    series: TimeSeries
    layout: WindowLayout
    scale0: float
    profile: AmiProfile | None  # populated when run_gates computes profiles


@dataclass(frozen=True)
class SurvivorPanel:
    frequency: Frequency
    survivors: list[Survivor]
    scale_floor: float


def scale_proxy(base_window, m: int) -> float:
    """Mean absolute m-step difference of the base window (m=1 for yearly).

    Raises ScaleUndefined when no difference exists or the result is not
    finite; a zero result is defined (it simply sits below any positive floor).
    """
    arr = np.asarray(base_window, dtype=np.float64)
    if m < 1:
        raise ValueError("m must be >= 1")
    if arr.size <= m:
        raise ScaleUndefined(f"window of length {arr.size} has no {m}-step differences")
    value = float(np.mean(np.abs(arr[m:] - arr[:-m])))
    if not np.isfinite(value):
        raise ScaleUndefined("scale proxy is not finite")
    return value


def scale_floor(scales, q: float, method: str = "linear") -> float:
    """Empirical q-quantile of the scale proxies.

    ``linear`` interpolates order statistics (numpy type 7, the default);
    ``nearest-rank`` takes the smallest order statistic with cumulative
    probability >= q.
    """
    arr = np.asarray(scales, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInput("no scales to take a quantile of")
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    np_method = {"linear": "linear", "nearest-rank": "inverted_cdf"}[method]
    return float(np.quantile(arr, q, method=np_method))


def run_gates(
    panel: list[TimeSeries],
    profile: FrequencyProfile,
    config: RunConfig,
    compute_profiles: bool = True,
) -> tuple[SurvivorPanel, list[GateReport]]:
    """Apply all four gates to a panel of one frequency.

    With ``compute_profiles`` the survivors carry their full AMI profiles
    (computed once here, reused downstream); without it gate (iv) uses the
    cheap feasibility check and profiles are left to a later stage.

    Survivors are returned sorted by id; reports follow panel order. The
    result is invariant to panel input order.
    """
    ids = [s.id for s in panel]
    if len(set(ids)) != len(ids):
        raise ValueError("panel contains duplicate series ids")

    reports: dict[str, GateReport] = {}
    candidates: list[tuple[TimeSeries, WindowLayout, float]] = []

    for series in panel:
        if series.frequency is not profile.frequency:
            raise ValueError(
                f"series {series.id!r} has frequency {series.frequency}, "
                f"panel is {profile.frequency}"
            )
        try:
            lo = layout(len(series), profile, config)
        except InfeasibleLength as exc:
            reports[series.id] = GateReport(series.id, False, GATE_ROLLING, reason=str(exc))
            continue
        try:
            scale0 = scale_proxy(series.values[: lo.t_base], profile.m)
        except ScaleUndefined as exc:
            reports[series.id] = GateReport(series.id, False, GATE_SCALE_DEFINED, reason=str(exc))
            continue
        candidates.append((series, lo, scale0))

    if candidates:
        floor = scale_floor(
            [c[2] for c in candidates], config.scale_floor_quantile, config.quantile_method
        )
    else:
        floor = float("nan")

    survivors: list[Survivor] = []
    for series, lo, scale0 in candidates:
        if scale0 < floor:
            reports[series.id] = GateReport(
                series.id, False, GATE_SCALE_FLOOR, scale0,
                reason=f"scale {scale0:.6g} below floor {floor:.6g}",
            )
            continue
        if compute_profiles:
            try:
                prof = ami_profile(series, lo, profile, config)
            except (DegenerateSeries, GateIvFailure) as exc:
                reports[series.id] = GateReport(
                    series.id, False, GATE_AMI_AT_HMAX, scale0, reason=str(exc)
                )
                continue
        else:
            if not feasible_at_h_max(series, lo, profile):
                reports[series.id] = GateReport(
                    series.id, False, GATE_AMI_AT_HMAX, scale0,
                    reason=f"AMI undefined at h_max={profile.h_max}",
                )
                continue
            prof = None
        reports[series.id] = GateReport(series.id, True, scale0=scale0)
        survivors.append(Survivor(series, lo, scale0, prof))

    survivors.sort(key=lambda s: s.series.id)
    logger.info(
        "gates: %d of %d series survive (floor=%.6g)", len(survivors), len(panel), floor
    )
    return (
        SurvivorPanel(frequency=profile.frequency, survivors=survivors, scale_floor=floor),
        [reports[s.id] for s in panel],
    )
