"""Domain types, per-frequency constants, and run configuration.

Horizons are pure observation-step offsets everywhere; no calendar
arithmetic. All numeric work is double precision.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import InfeasibleLength, NonFiniteInput


class Frequency(enum.Enum):
    YEARLY = "yearly"
    QUARTERLY = "quarterly"
    MONTHLY = "monthly"
    WEEKLY = "weekly"
    DAILY = "daily"
    HOURLY = "hourly"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Frequency":
        return cls(text.strip().lower())


@dataclass(frozen=True)
class FrequencyProfile:
    """Per-frequency constants: max horizon, seasonal period, AMI sample floor."""

    frequency: Frequency
    h_max: int
    m: int
    n_eff_min: int


#: Fixed per-frequency constants (max horizon, seasonal period, minimum
#: effective sample size for the dependence estimate).
PROFILES: dict[Frequency, FrequencyProfile] = {
    Frequency.YEARLY: FrequencyProfile(Frequency.YEARLY, h_max=6, m=1, n_eff_min=30),
    Frequency.QUARTERLY: FrequencyProfile(Frequency.QUARTERLY, h_max=8, m=4, n_eff_min=80),
    Frequency.MONTHLY: FrequencyProfile(Frequency.MONTHLY, h_max=18, m=12, n_eff_min=100),
    Frequency.WEEKLY: FrequencyProfile(Frequency.WEEKLY, h_max=13, m=52, n_eff_min=120),
    Frequency.DAILY: FrequencyProfile(Frequency.DAILY, h_max=14, m=7, n_eff_min=250),
    Frequency.HOURLY: FrequencyProfile(Frequency.HOURLY, h_max=48, m=24, n_eff_min=400),
}


@dataclass(frozen=True)
class RunConfig:
    """Protocol knobs. The defaults reproduce the reference protocol:
    10 expanding origins, step 1, k = 8 neighbours, 5th-percentile scale floor.
    """

    rolls: int = 10
    roll_step: int = 1
    k_neighbors: int = 8
    scale_floor_quantile: float = 0.05
    seed: int = 0
    quantile_method: str = "linear"  # or "nearest-rank"
    ksg_jitter: float = 0.0
    triage_stat: str = "mean"  # or "at-h"
    triage_h: int | None = None

    def __post_init__(self) -> None:
        if self.rolls < 1 or self.roll_step < 1 or self.k_neighbors < 1:
            raise ValueError("rolls, roll_step and k_neighbors must be positive")
        if not 0.0 < self.scale_floor_quantile < 1.0:
            raise ValueError("scale_floor_quantile must lie in (0, 1)")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.quantile_method not in ("linear", "nearest-rank"):
            raise ValueError(f"unknown quantile method {self.quantile_method!r}")
        if self.ksg_jitter < 0.0:
            raise ValueError("ksg_jitter must be >= 0")
        if self.triage_stat not in ("mean", "at-h"):
            raise ValueError(f"unknown triage stat {self.triage_stat!r}")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class TimeSeries:
    """One univariate series: id, ordered finite observations, frequency tag."""

    id: str
    values: np.ndarray = field(repr=False)
    frequency: Frequency

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError(f"series {self.id!r}: values must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteInput(f"series {self.id!r}: non-finite observation")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class WindowLayout:
    """Split of a series into a base training window and a rolling
    evaluation pool. ``origins`` holds the training-prefix length of each
    rolling origin; every origin leaves room for a full h_max-step window.
    """

    t_total: int
    pool_len: int
    t_base: int
    origins: tuple[int, ...]


def layout(series_len: int, profile: FrequencyProfile, config: RunConfig) -> WindowLayout:
    """Compute the rolling-origin layout for a series of ``series_len``.

    pool_len = h_max + (rolls - 1) * roll_step and t_base = series_len -
    pool_len; origin j trains on the prefix of length t_base + j * roll_step.
    Raises InfeasibleLength when t_base < 1 (the series cannot host all
    origins with full evaluation windows).
    """
    if series_len < 1:
        raise ValueError("series_len must be >= 1")
    pool_len = profile.h_max + (config.rolls - 1) * config.roll_step
    t_base = series_len - pool_len
    if t_base < 1:
        raise InfeasibleLength(
            f"length {series_len} cannot host {config.rolls} origins "
            f"with h_max={profile.h_max} (needs >= {pool_len + 1})"
        )
    origins = tuple(t_base + j * config.roll_step for j in range(config.rolls))
    return WindowLayout(t_total=series_len, pool_len=pool_len, t_base=t_base, origins=origins)
