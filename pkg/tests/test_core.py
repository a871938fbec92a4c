import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forecastability import PROFILES, Frequency, RunConfig, TimeSeries, layout
from forecastability.errors import InfeasibleLength, NonFiniteInput

CFG = RunConfig()


def test_profile_table_matches_protocol_constants():
    expected = {
        Frequency.YEARLY: (6, 1, 30),
        Frequency.QUARTERLY: (8, 4, 80),
        Frequency.MONTHLY: (18, 12, 100),
        Frequency.WEEKLY: (13, 52, 120),
        Frequency.DAILY: (14, 7, 250),
        Frequency.HOURLY: (48, 24, 400),
    }
    for freq, (h_max, m, n_eff_min) in expected.items():
        prof = PROFILES[freq]
        assert (prof.h_max, prof.m, prof.n_eff_min) == (h_max, m, n_eff_min)


def test_layout_yearly_example():
    lo = layout(100, PROFILES[Frequency.YEARLY], CFG)
    assert lo.pool_len == 15
    assert lo.t_base == 85
    assert lo.origins == tuple(range(85, 95))
    assert lo.origins[-1] + PROFILES[Frequency.YEARLY].h_max == 100


def test_layout_infeasible_at_boundary():
    with pytest.raises(InfeasibleLength):
        layout(15, PROFILES[Frequency.YEARLY], CFG)
    lo = layout(16, PROFILES[Frequency.YEARLY], CFG)
    assert lo.t_base == 1


def test_layout_hourly_example():
    lo = layout(200, PROFILES[Frequency.HOURLY], CFG)
    assert lo.pool_len == 57
    assert lo.t_base == 143


@settings(derandomize=True, max_examples=200)
@given(
    n=st.integers(min_value=1, max_value=5000),
    freq=st.sampled_from(list(Frequency)),
    rolls=st.integers(min_value=1, max_value=20),
    step=st.integers(min_value=1, max_value=3),
)
def test_layout_identity_and_monotonicity(n, freq, rolls, step):
    cfg = RunConfig(rolls=rolls, roll_step=step)
    prof = PROFILES[freq]
    try:
        lo = layout(n, prof, cfg)
    except InfeasibleLength:
        assert n - (prof.h_max + (rolls - 1) * step) < 1
        return
    assert lo.t_base + (rolls - 1) * step + prof.h_max == n
    assert len(lo.origins) == rolls
    assert all(o + prof.h_max <= n for o in lo.origins)
    bigger = layout(n + 1, prof, cfg)
    assert bigger.t_base == lo.t_base + 1
    assert bigger.pool_len == lo.pool_len


def test_timeseries_rejects_bad_values():
    with pytest.raises(ValueError):
        TimeSeries(id="x", values=np.array([]), frequency=Frequency.YEARLY)
    with pytest.raises(NonFiniteInput):
        TimeSeries(id="x", values=np.array([1.0, np.nan]), frequency=Frequency.YEARLY)
    with pytest.raises(NonFiniteInput):
        TimeSeries(id="x", values=np.array([1.0, np.inf]), frequency=Frequency.YEARLY)


def test_timeseries_values_immutable():
    ts = TimeSeries(id="x", values=np.array([1.0, 2.0]), frequency=Frequency.YEARLY)
    with pytest.raises(ValueError):
        ts.values[0] = 5.0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"rolls": 0},
        {"roll_step": 0},
        {"k_neighbors": 0},
        {"scale_floor_quantile": 0.0},
        {"scale_floor_quantile": 1.0},
        {"quantile_method": "median-unbiased"},
        {"ksg_jitter": -1.0},
        {"triage_stat": "max"},
    ],
)
def test_runconfig_validation(kwargs):
    with pytest.raises(ValueError):
        RunConfig(**kwargs)


def test_runconfig_defaults_match_protocol():
    cfg = RunConfig()
    assert (cfg.rolls, cfg.roll_step, cfg.k_neighbors) == (10, 1, 8)
    assert cfg.scale_floor_quantile == 0.05
