"""Probe forecasters behind a single contract.

A probe maps a history prefix to point forecasts for horizons 1..h_max,
uses nothing but that prefix, and is deterministic given its configuration.
Two probes are provided: the seasonal naive repeater and an exponential
smoothing family with AIC selection.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from . import _ets
from .errors import HistoryTooShort

logger = logging.getLogger(__name__)

_TREND_NAMES = {_ets.TREND_NONE: "N", _ets.TREND_ADD: "A", _ets.TREND_DAMPED: "Ad"}
_SEAS_NAMES = {_ets.SEAS_NONE: "N", _ets.SEAS_ADD: "A", _ets.SEAS_MUL: "M"}

PHI_MIN, PHI_MAX = 0.8, 0.98


class ProbeModel(Protocol):
    name: str

    def fit_and_forecast(self, history: np.ndarray, m: int, h_max: int) -> np.ndarray: ...


@dataclass(frozen=True)
class SeasonalNaive:
    """Repeat the observation from the same seasonal position one (or more)
    cycles earlier; for m = 1 this is the plain naive forecast.
    """

    name: str = "seasonal-naive"

    def fit_and_forecast(self, history: np.ndarray, m: int, h_max: int) -> np.ndarray:
        history = np.asarray(history, dtype=np.float64)
        n = history.size
        if n < m:
            raise HistoryTooShort(f"history of length {n} is shorter than m={m}")
        out = np.empty(h_max)
        for h in range(1, h_max + 1):
            k = -(-h // m)  # ceil(h / m)
            out[h - 1] = history[n + h - k * m - 1]
        return out


def seasonal_naive(history, m: int, h_max: int) -> np.ndarray:
    return SeasonalNaive().fit_and_forecast(np.asarray(history, dtype=np.float64), m, h_max)


@dataclass(frozen=True)
class EtsCandidate:
    """One fitted (trend, seasonal) configuration."""

    trend: str
    seasonal: str
    params: dict[str, float]
    initial_level: float
    initial_trend: float
    initial_seasonal: tuple[float, ...]
    sse: float
    aic: float
    n_params: int


def ets_starts(seed: int) -> np.ndarray:
    """Three fixed optimizer start points (alpha, beta, gamma, phi), seeded."""
    rng = np.random.default_rng(np.random.SeedSequence((seed, 271828)))
    starts = np.empty((3, 4))
    starts[:, :3] = rng.uniform(0.05, 0.95, size=(3, 3))
    starts[:, 3] = rng.uniform(PHI_MIN + 0.02, PHI_MAX - 0.02, size=3)
    return starts


@dataclass(frozen=True)
class Ets:
    """Exponential smoothing with automatic AIC selection.

    Candidates span trend {none, additive, additive damped} and seasonality
    {none, additive, multiplicative}; multiplicative requires a strictly
    positive fitted window, and seasonal candidates require m >= 2 and a
    history of at least max(2m, 10) observations (shorter histories fall
    back to the non-seasonal family rather than erroring). Smoothing
    parameters are found by simplex search from three fixed starts; initial
    states come from a heuristic decomposition and are not optimized.
    AIC = n ln(SSE/n) + 2 (n_params + n_initial_states). If every candidate
    fails, the seasonal naive forecast is used and a warning logged.
    """

    name: str = "ets"
    starts: np.ndarray = field(default_factory=lambda: ets_starts(0))
    maxiter_per_dim: int = 80

    def fit_and_forecast(self, history: np.ndarray, m: int, h_max: int) -> np.ndarray:
        y = np.asarray(history, dtype=np.float64)
        selected, _ = self._fit(y, m)
        if selected is None:
            logger.warning("ets: all candidates failed; falling back to seasonal naive")
            return seasonal_naive(y, m, h_max)
        return self._forecast(y, selected, m, h_max)

    def fit_details(self, history, m: int) -> tuple[EtsCandidate | None, list[EtsCandidate]]:
        """Selected candidate plus every converged candidate (for diagnostics)."""
        return self._fit(np.asarray(history, dtype=np.float64), m)

    # -- fitting ---------------------------------------------------------

    def _fit(self, y: np.ndarray, m: int) -> tuple[EtsCandidate | None, list[EtsCandidate]]:
        n = y.size
        if n < 1:
            raise HistoryTooShort("empty history")
        seasonals = [_ets.SEAS_NONE]
        if m >= 2 and n >= max(2 * m, 10):
            seasonals.append(_ets.SEAS_ADD)
            if np.all(y > 0.0):
                seasonals.append(_ets.SEAS_MUL)

        fitted: list[EtsCandidate] = []
        best: EtsCandidate | None = None
        for seas in seasonals:
            for trend in (_ets.TREND_NONE, _ets.TREND_ADD, _ets.TREND_DAMPED):
                cand = self._fit_candidate(y, m, trend, seas)
                if cand is None:
                    continue
                fitted.append(cand)
                if best is None or cand.aic < best.aic:
                    best = cand
        return best, fitted

    def _fit_candidate(self, y, m, trend, seas) -> EtsCandidate | None:
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                l0, b0, s0 = _initial_states(y, m, trend, seas)
        except (ZeroDivisionError, FloatingPointError, ValueError):
            return None
        if not (math.isfinite(l0) and math.isfinite(b0) and np.all(np.isfinite(s0))):
            return None

        idx, lower, upper = _free_params(trend, seas)
        m_eff = m if seas != _ets.SEAS_NONE else 1
        s0_eff = s0 if seas != _ets.SEAS_NONE else np.zeros(1)
        maxiter = self.maxiter_per_dim * idx.size

        best_free, best_sse = None, _ets.FAILED_SSE
        for start in self.starts:
            x0 = np.clip(start[idx], lower, upper)
            free, sse = _ets.nelder_mead(
                x0, idx, lower, upper, y, m_eff, trend, seas, l0, b0, s0_eff, maxiter
            )
            if sse < best_sse:
                best_free, best_sse = free, sse
        if best_free is None or best_sse >= _ets.FAILED_SSE:
            return None

        full = _full_params(best_free, idx)
        n_params = idx.size
        n_init = 1 + (1 if trend != _ets.TREND_NONE else 0) + (m if seas != _ets.SEAS_NONE else 0)
        n = y.size
        aic = n * math.log(max(best_sse, 1e-250) / n) + 2.0 * (n_params + n_init)
        names = ("alpha", "beta", "gamma", "phi")
        return EtsCandidate(
            trend=_TREND_NAMES[trend],
            seasonal=_SEAS_NAMES[seas],
            params={names[i]: float(full[i]) for i in idx},
            initial_level=float(l0),
            initial_trend=float(b0),
            initial_seasonal=tuple(float(v) for v in s0) if seas != _ets.SEAS_NONE else (),
            sse=float(best_sse),
            aic=float(aic),
            n_params=n_params,
        )

    # -- forecasting -----------------------------------------------------

    def _forecast(self, y: np.ndarray, cand: EtsCandidate, m: int, h_max: int) -> np.ndarray:
        trend = _code(_TREND_NAMES, cand.trend)
        seas = _code(_SEAS_NAMES, cand.seasonal)
        alpha = cand.params["alpha"]
        beta = cand.params.get("beta", 0.0)
        gamma = cand.params.get("gamma", 0.0)
        phi = cand.params.get("phi", 1.0)
        m_eff = m if seas != _ets.SEAS_NONE else 1
        s0 = np.asarray(cand.initial_seasonal) if seas != _ets.SEAS_NONE else np.zeros(1)
        l, b, s_ordered = _ets.final_states(
            y, m_eff, trend, seas, alpha, beta, gamma, phi,
            cand.initial_level, cand.initial_trend, s0,
        )
        out = np.empty(h_max)
        damp, damp_sum = 1.0, 0.0
        for h in range(1, h_max + 1):
            if trend == _ets.TREND_ADD:
                trend_part = h * b
            elif trend == _ets.TREND_DAMPED:
                damp *= phi
                damp_sum += damp
                trend_part = damp_sum * b
            else:
                trend_part = 0.0
            point = l + trend_part
            if seas != _ets.SEAS_NONE:
                k = -(-h // m)
                slot = h - 1 - m * (k - 1)
                point = point + s_ordered[slot] if seas == _ets.SEAS_ADD else point * s_ordered[slot]
            out[h - 1] = point
        return out


def _code(names: dict[int, str], label: str) -> int:
    return next(code for code, name in names.items() if name == label)


def _free_params(trend: int, seas: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    idx = [0]
    lower = [0.0]
    upper = [1.0]
    if trend != _ets.TREND_NONE:
        idx.append(1)
        lower.append(0.0)
        upper.append(1.0)
    if seas != _ets.SEAS_NONE:
        idx.append(2)
        lower.append(0.0)
        upper.append(1.0)
    if trend == _ets.TREND_DAMPED:
        idx.append(3)
        lower.append(PHI_MIN)
        upper.append(PHI_MAX)
    return np.asarray(idx, dtype=np.int64), np.asarray(lower), np.asarray(upper)


def _full_params(free: np.ndarray, idx: np.ndarray) -> np.ndarray:
    full = np.array([0.5, 0.1, 0.1, 0.98])
    full[idx] = free
    return full


def _initial_states(y: np.ndarray, m: int, trend: int, seas: int):
    """Heuristic decomposition: level from the first cycle's mean, trend from
    the average slope across the first cycle(s), seasonal indices de-meaned
    (additive) or ratioed (multiplicative) over the first two cycles.
    """
    n = y.size
    if seas == _ets.SEAS_NONE:
        c = min(10, n)
        l0 = float(np.mean(y[:c]))
        b0 = float((y[c - 1] - y[0]) / (c - 1)) if (trend != _ets.TREND_NONE and c >= 2) else 0.0
        return l0, b0, np.zeros(1)

    c1 = y[:m]
    c2 = y[m : 2 * m]
    mean1 = float(np.mean(c1))
    mean2 = float(np.mean(c2))
    l0 = mean1
    b0 = (mean2 - mean1) / m if trend != _ets.TREND_NONE else 0.0
    if seas == _ets.SEAS_ADD:
        s = ((c1 - mean1) + (c2 - mean2)) / 2.0
        s = s - s.mean()
    else:
        if mean1 == 0.0 or mean2 == 0.0:
            raise ValueError("zero cycle mean, multiplicative indices undefined")
        s = (c1 / mean1 + c2 / mean2) / 2.0
        mean_s = s.mean()
        if mean_s == 0.0:
            raise ValueError("degenerate multiplicative indices")
        s = s / mean_s
    return l0, b0, s.astype(np.float64)


def make_probes(names, seed: int) -> list[ProbeModel]:
    """Instantiate probes by name ('seasonal-naive', 'ets')."""
    starts = ets_starts(seed)
    table = {"seasonal-naive": lambda: SeasonalNaive(), "ets": lambda: Ets(starts=starts)}
    probes = []
    for name in names:
        if name not in table:
            raise ValueError(f"unknown probe {name!r}")
        probes.append(table[name]())
    return probes
