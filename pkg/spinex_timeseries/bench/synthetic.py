"""
Catalogue of synthetic generators. Closed-form generators evaluate M{f(t) + noise} on an equally spaced grid over
[0, t_max]; recursive generators feed the noise through their recursion, starting from a zero state. The chaotic
logistic map is the exception: it starts at C{CHAOTIC_MAP_START} = 0.1, since from 0 the map stays at 0.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from ..core import derive_seed, seeded_rng
from ..errors import UnknownFunction
from ..types import *


__all__ = ["SyntheticFunction", "CATALOGUE", "generate_synthetic", "synthetic_suite"]

log = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
CHAOTIC_MAP_START = 0.1


def _step(t: np.ndarray) -> np.ndarray:
    return np.floor(t) % 2


def _piecewise(t: np.ndarray, t_max: float) -> np.ndarray:
    first, second = t_max / 3, 2 * t_max / 3
    return np.where(t < first, t, np.where(t < second, first, first - (t - second)))


def _ar1(noise: np.ndarray) -> np.ndarray:
    values = np.empty_like(noise)
    previous = 0.0
    for i, epsilon in enumerate(noise):
        previous = values[i] = 0.8 * previous + epsilon
    return values


def _brownian(noise: np.ndarray) -> np.ndarray:
    return np.cumsum(noise)


def _chaotic(noise: np.ndarray) -> np.ndarray:
    """ Logistic map with r = 3.9 from C{CHAOTIC_MAP_START}, noise added to the map values """
    state = np.empty_like(noise)
    x = CHAOTIC_MAP_START
    for i in range(noise.size):
        state[i] = x
        x = 3.9 * x * (1 - x)
    return state + noise


def _garch(rng: np.random.Generator, n: int, sigma: float) -> np.ndarray:
    values = np.empty(n)
    previous = 0.0
    for i in range(n):
        previous = values[i] = rng.normal(0.0, sigma + 0.9 * abs(previous))
    return values


@dataclass(frozen=True, kw_only=True)
class SyntheticFunction:
    name: str
    sigma: float
    description: str
    # f(t, t_max) for closed-form generators
    formula: Callable[[np.ndarray, float], np.ndarray] | None = None
    # values from the noise vector for recursive generators
    recursion: Callable[[np.ndarray], np.ndarray] | None = None
    noise_scale: float = 1.0

    @property
    def recursive(self) -> bool:
        return self.formula is None

    def dump(self) -> dict:
        return {"name": self.name, "sigma": self.sigma, "description": self.description, "recursive": self.recursive}


def _closed(name, sigma, description, formula, noise_scale=1.0) -> SyntheticFunction:
    return SyntheticFunction(
        name=name, sigma=sigma, description=description, formula=formula, noise_scale=noise_scale,
    )


CATALOGUE: dict[str, SyntheticFunction] = {function.name: function for function in [
    _closed("linear", 0.1, "0.5t", lambda t, _: 0.5 * t),
    _closed("quadratic", 0.1, "0.05t^2", lambda t, _: 0.05 * t ** 2),
    _closed("exponential_growth", 0.1, "e^(0.1t)", lambda t, _: np.exp(0.1 * t)),
    _closed("sine", 0.1, "sin(2 pi t)", lambda t, _: np.sin(TWO_PI * t)),
    _closed("cosine_linear", 0.1, "cos(2 pi t) + 0.1t", lambda t, _: np.cos(TWO_PI * t) + 0.1 * t),
    _closed("composite_sines", 0.1, "sin(2 pi t) + 0.5 sin(4 pi t)",
            lambda t, _: np.sin(TWO_PI * t) + 0.5 * np.sin(2 * TWO_PI * t)),
    _closed("logistic", 0.05, "1 / (1 + e^(-t + 5))", lambda t, _: 1 / (1 + np.exp(-t + 5))),
    _closed("damped_oscillation", 0.05, "e^(-0.1t) sin(2 pi t)", lambda t, _: np.exp(-0.1 * t) * np.sin(TWO_PI * t)),
    _closed("step", 0.1, "floor(t) mod 2", lambda t, _: _step(t)),
    _closed("sawtooth", 0.05, "t mod 1", lambda t, _: t % 1),
    _closed("square", 0.1, "sign(sin(2 pi t))", lambda t, _: np.sign(np.sin(TWO_PI * t))),
    _closed("exponential_decay", 0.05, "e^(-0.2t)", lambda t, _: np.exp(-0.2 * t)),
    _closed("logarithmic", 0.1, "log(t + 1)", lambda t, _: np.log(t + 1)),
    _closed("composite_trend_seasonal", 1.0, "0.01t^2 + sin(2 pi t) + 0.5 noise",
            lambda t, _: 0.01 * t ** 2 + np.sin(TWO_PI * t), noise_scale=0.5),
    SyntheticFunction(name="ar1", sigma=0.5, description="y_t = 0.8 y_(t-1) + noise", recursion=_ar1),
    _closed("cubic", 0.1, "0.01t^3 - 0.1t^2 + 0.5t", lambda t, _: 0.01 * t ** 3 - 0.1 * t ** 2 + 0.5 * t),
    _closed("sigmoid", 0.05, "1 / (1 + e^(-t + 5))", lambda t, _: 1 / (1 + np.exp(-t + 5))),
    _closed("impulse_response", 0.05, "e^(-t) sin(2 pi t)", lambda t, _: np.exp(-t) * np.sin(TWO_PI * t)),
    _closed("cyclical_trend", 0.1, "sin(2 pi t / 5) + 0.05t", lambda t, _: np.sin(TWO_PI * t / 5) + 0.05 * t),
    _closed("exp_growth_seasonal", 0.1, "e^(0.05t) + 0.5 sin(2 pi t)",
            lambda t, _: np.exp(0.05 * t) + 0.5 * np.sin(TWO_PI * t)),
    _closed("piecewise_linear", 0.1, "slopes 1, 0, -1 split at t_max/3 and 2 t_max/3", _piecewise),
    SyntheticFunction(name="brownian_motion", sigma=0.1, description="cumulative noise", recursion=_brownian),
    _closed("multi_trend", 0.1, "0.01t^2 + 0.1 sin(2 pi t) + 0.05 e^(0.1t)",
            lambda t, _: 0.01 * t ** 2 + 0.1 * np.sin(TWO_PI * t) + 0.05 * np.exp(0.1 * t)),
    SyntheticFunction(name="chaotic_logistic", sigma=0.01, description="x_(i+1) = 3.9 x_i (1 - x_i)",
                      recursion=_chaotic),
    SyntheticFunction(name="garch_like", sigma=0.1, description="noise std sigma + 0.9 |y_(t-1)|", recursion=None),
]}


def generate_synthetic(spec: SyntheticSpec) -> TimeSeries:
    """
    Evaluate a catalogue function on C{n_points} equally spaced points over [0, t_max] and add seeded Gaussian noise.

    @param spec: Function, grid, noise level (defaults to the catalogue level) and seed
    """
    try:
        function = CATALOGUE[spec.function_id]
    except KeyError:
        raise UnknownFunction(f"Unknown synthetic function {spec.function_id!r}")

    sigma = function.sigma if spec.noise_sigma is None else spec.noise_sigma
    t = np.linspace(0, spec.t_max, spec.n_points)
    rng = seeded_rng(spec.seed)

    if function.name == "garch_like":
        values = _garch(rng, spec.n_points, sigma)
    else:
        noise = function.noise_scale * rng.normal(0.0, sigma, spec.n_points)
        if function.recursive:
            values = function.recursion(noise)
        else:
            values = function.formula(t, spec.t_max) + noise

    return TimeSeries(values)


def synthetic_suite(
    functions: Iterable[str] | None = None,
    t_max_values: Sequence[float] = (1, 10, 100),
    n_points_values: Sequence[int] = (50, 500, 5000),
    seed: int = 0,
    noise_sigma: float | None = None,
) -> dict[str, TimeSeries]:
    """
    Every function on every (t_max, n_points) setting. Each dataset draws its noise from its own stream derived from
    the seed and the dataset name.

    @return: Datasets keyed by C{<function>-t<t_max>-n<n_points>}
    """
    datasets = {}
    for function_id in functions or CATALOGUE:
        for t_max in t_max_values:
            for n_points in n_points_values:
                name = SyntheticSpec(function_id=function_id, n_points=n_points, t_max=t_max).name
                spec = SyntheticSpec(
                    function_id=function_id, n_points=n_points, t_max=t_max, noise_sigma=noise_sigma,
                    seed=derive_seed(seed, name),
                )
                datasets[name] = generate_synthetic(spec)
    log.info(f"Generated {len(datasets)} synthetic datasets")
    return datasets
