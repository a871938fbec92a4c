"""Horizon-specific forecastability triage for univariate time series panels.

Measures per-horizon past-future dependence with a k-nearest-neighbour
mutual information estimator on training data only, validates it against
realized rolling-origin sMAPE of probe forecasters, and classifies series
into modelling-investment actions.
"""

__version__ = "0.1.0"

from .ami import AmiEntry, AmiProfile, ami_profile, ksg_mi, standardize
from .analytics import (
    TriageLabel,
    ValidationSummary,
    length_strata,
    spearman,
    tercile_analysis,
    triage,
    validate,
)
from .core import (
    PROFILES,
    Frequency,
    FrequencyProfile,
    RunConfig,
    TimeSeries,
    WindowLayout,
    layout,
)
from .evaluation import EvalRecord, rolling_eval, smape, smape_terms
from .gates import GateReport, SurvivorPanel, run_gates, scale_floor, scale_proxy
from .ingest import PanelSource, ResultStore, load_panel, write_panel_long
from .probes import Ets, ProbeModel, SeasonalNaive, ets_starts, make_probes, seasonal_naive
from .synth import SynthSpec, generate

__all__ = [
    "AmiEntry",
    "AmiProfile",
    "EvalRecord",
    "Ets",
    "Frequency",
    "FrequencyProfile",
    "GateReport",
    "PROFILES",
    "PanelSource",
    "ProbeModel",
    "ResultStore",
    "RunConfig",
    "SeasonalNaive",
    "SurvivorPanel",
    "SynthSpec",
    "TimeSeries",
    "TriageLabel",
    "ValidationSummary",
    "WindowLayout",
    "ami_profile",
    "ets_starts",
    "generate",
    "ksg_mi",
    "layout",
    "length_strata",
    "load_panel",
    "make_probes",
    "rolling_eval",
    "run_gates",
    "scale_floor",
    "scale_proxy",
    "seasonal_naive",
    "smape",
    "smape_terms",
    "spearman",
    "standardize",
    "tercile_analysis",
    "triage",
    "validate",
    "write_panel_long",
]
