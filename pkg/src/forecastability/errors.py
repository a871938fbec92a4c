"""Exception types shared across the package."""


class ForecastabilityError(Exception):
    """Base class for all package errors."""


class InfeasibleLength(ForecastabilityError):
    """Series too short to host the full rolling-origin design (gate i)."""


class DegenerateSeries(ForecastabilityError):
    """Window cannot be standardized (zero or non-finite variance)."""


class TooFewPoints(ForecastabilityError):
    """Not enough points for the requested neighbour count (k >= N)."""


class NonFiniteInput(ForecastabilityError):
    """NaN or infinity where a finite value is required."""


class ScaleUndefined(ForecastabilityError):
    """Scale proxy cannot be computed on the base window (gate ii)."""


class GateIvFailure(ForecastabilityError):
    """Auto-MI undefined at the maximum horizon (gate iv)."""


class HistoryTooShort(ForecastabilityError):
    """Forecast history shorter than the seasonal period."""


class AllCandidatesFailed(ForecastabilityError):
    """Every smoothing-model candidate failed to fit."""


class LengthMismatch(ForecastabilityError):
    """Paired sequences differ in length."""


class EmptyInput(ForecastabilityError):
    """An operation received an empty sequence."""


class DegenerateInput(ForecastabilityError):
    """Rank correlation undefined (constant vector)."""


class InsufficientData(ForecastabilityError):
    """Too few valid pairs for an aggregate statistic."""


class FormatError(ForecastabilityError):
    """Malformed panel file."""


class EmptyPanel(ForecastabilityError):
    """Panel file contained no usable series."""


class InvalidSpec(ForecastabilityError):
    """Invalid synthetic-panel specification."""


class UsageError(ForecastabilityError):
    """Invalid command invocation (bad flags, missing prerequisite files)."""
