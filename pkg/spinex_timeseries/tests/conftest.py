import numpy as np
import pytest

from spinex_timeseries.types import TimeSeries

pytest_plugins = ("pytest_jupyter.jupyter_server", )


@pytest.fixture
def jp_server_config(jp_server_config):
    return {"ServerApp": {"jpserver_extensions": {"spinex_timeseries": True}}}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def sine_series():
    """ 400 points with a period of 20 """
    return TimeSeries(np.sin(2 * np.pi * np.arange(400) / 20))


@pytest.fixture
def sawtooth_series():
    """ Ten exact periods of a ramp of length 20 """
    return TimeSeries((np.arange(200) % 20) / 20 * 10)


@pytest.fixture
def random_walk(rng):
    return TimeSeries(np.cumsum(rng.normal(size=300)))
