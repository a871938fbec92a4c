"""Auto-mutual information profiles from k-nearest-neighbour estimation.

The dependence between a series and its own lag-h future is estimated with
the Kraskov-Stoegbauer-Grassberger estimator (variant 1) on the standardized
base training window:

    I_hat = psi(k) + psi(N) - mean_i[ psi(n_x(i) + 1) + psi(n_y(i) + 1) ]

where the k-th neighbour distance of each joint point (x_i, y_i) is taken
in the max-norm and the marginal counts n_x, n_y use strict inequality
against that distance. Estimates are in nats, may be slightly negative for
small samples, and are reported unclipped. The estimator is deterministic:
exact neighbour search, no jitter unless explicitly requested.

A profile is computed once per series on the base window and never again;
rolling evaluation downstream must not touch it.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from .core import FrequencyProfile, RunConfig, TimeSeries, WindowLayout
from .errors import DegenerateSeries, GateIvFailure, NonFiniteInput, TooFewPoints


@dataclass(frozen=True)
class StandardizedWindow:
    """A window rescaled to zero mean and unit sample variance (ddof=1)."""

    values: np.ndarray
    original_len: int


@dataclass(frozen=True)
class AmiEntry:
    ami_nats: float
    n_eff: int


@dataclass(frozen=True)
class AmiProfile:
    """Per-horizon dependence estimates for one series.

    ``entries`` holds exactly the horizons 1..h_max whose effective sample
    size t_base - h meets the frequency threshold. Immutable once built.
    """

    series_id: str
    entries: dict[int, AmiEntry]
    k_used: int
    base_len: int

    def horizons(self) -> list[int]:
        return sorted(self.entries)

    def ami(self, h: int) -> float:
        return self.entries[h].ami_nats


def standardize(window) -> StandardizedWindow:
    """Rescale to zero mean, unit sample variance (n-1 convention).

    Raises DegenerateSeries when the window is constant (or otherwise has
    no finite positive spread); such series are excluded upstream.
    """
    arr = np.asarray(window, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError("window must be a 1-d sequence of length >= 2")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("window contains non-finite values")
    mean = arr.mean()
    std = arr.std(ddof=1)
    if not np.isfinite(std) or std == 0.0:
        raise DegenerateSeries("zero-variance window cannot be standardized")
    values = (arr - mean) / std
    values.flags.writeable = False
    return StandardizedWindow(values=values, original_len=int(arr.size))


def ksg_mi(x, y, k: int, rng: np.random.Generator | None = None, jitter: float = 0.0) -> float:
    """KSG variant-1 mutual information estimate between paired samples, in nats.

    ``jitter`` > 0 adds uniform noise of that half-width to both marginals
    before estimation (tie-breaking aid for heavily duplicated data); it
    requires an explicit ``rng`` so callers own reproducibility. Default off.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    n = x.size
    if k >= n:
        raise TooFewPoints(f"k={k} requires more than k points, got {n}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise NonFiniteInput("ksg_mi inputs must be finite")
    if jitter > 0.0:
        if rng is None:
            raise ValueError("jitter requires an rng")
        x = x + rng.uniform(-jitter, jitter, size=n)
        y = y + rng.uniform(-jitter, jitter, size=n)

    joint = np.column_stack((x, y))
    # k+1 neighbours: the query point itself sits at distance zero
    eps = cKDTree(joint).query(joint, k=k + 1, p=np.inf)[0][:, -1]

    nx = _strict_marginal_counts(x, eps)
    ny = _strict_marginal_counts(y, eps)
    return float(digamma(k) + digamma(n) - np.mean(digamma(nx + 1) + digamma(ny + 1)))


def _strict_marginal_counts(values: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """Count, per point, the other points with |v_j - v_i| strictly below eps_i."""
    order = np.sort(values)
    upper = np.searchsorted(order, values + eps, side="left")
    lower = np.searchsorted(order, values - eps, side="right")
    # the open interval contains the point itself whenever eps_i > 0; for
    # eps_i == 0 (joint-space duplicates beyond k) the count is zero
    return np.where(eps > 0.0, upper - lower - 1, 0)


def ami_profile(
    series: TimeSeries,
    layout: WindowLayout,
    profile: FrequencyProfile,
    config: RunConfig,
) -> AmiProfile:
    """Lag-h dependence estimates on the standardized base window.

    For each horizon h in 1..h_max with n_eff = t_base - h at or above the
    frequency threshold, pairs (z_t, z_{t+h}) feed the KSG estimator.
    Horizons below the threshold are absent; an absent h_max is a gate-iv
    failure and the series is excluded.
    """
    t_base = layout.t_base
    z = standardize(series.values[:t_base]).values

    rng = None
    if config.ksg_jitter > 0.0:
        key = zlib.crc32(series.id.encode("utf-8"))
        rng = np.random.default_rng(np.random.SeedSequence((config.seed, key)))

    entries: dict[int, AmiEntry] = {}
    for h in range(1, profile.h_max + 1):
        n_eff = t_base - h
        if n_eff < profile.n_eff_min:
            continue
        mi = ksg_mi(z[: t_base - h], z[h:], config.k_neighbors, rng=rng, jitter=config.ksg_jitter)
        entries[h] = AmiEntry(ami_nats=mi, n_eff=n_eff)

    if profile.h_max not in entries:
        raise GateIvFailure(
            f"series {series.id!r}: AMI undefined at h_max={profile.h_max} "
            f"(n_eff={t_base - profile.h_max} < {profile.n_eff_min})"
        )
    return AmiProfile(series_id=series.id, entries=entries, k_used=config.k_neighbors, base_len=t_base)


def feasible_at_h_max(series: TimeSeries, layout: WindowLayout, profile: FrequencyProfile) -> bool:
    """Cheap gate-iv check: is the profile computable at the maximum horizon?

    The estimate itself always exists for a standardizable window with
    n_eff > k, so feasibility reduces to the sample-size threshold plus
    standardizability.
    """
    if layout.t_base - profile.h_max < profile.n_eff_min:
        return False
    try:
        standardize(series.values[: layout.t_base])
    except DegenerateSeries:
        return False
    return True
