import numpy as np
import pytest

from forecastability import Frequency, RunConfig, TimeSeries
from forecastability.synth import SynthSpec, generate


@pytest.fixture(scope="session")
def config():
    return RunConfig()


def make_series(values, sid="s1", frequency=Frequency.YEARLY):
    return TimeSeries(id=sid, values=np.asarray(values, dtype=float), frequency=frequency)


def ar1_panel(phi, length, count, seed, frequency=Frequency.YEARLY, prefix=""):
    spec = SynthSpec(
        kind="ar1", length=length, count=count, seed=seed, phi=phi,
        frequency=frequency, id_prefix=prefix or f"ar{phi}",
    )
    return generate(spec)
