import logging
from typing import Sequence

import numpy as np

from ..errors import DegenerateInput
from ..types import *


__all__ = ["fit_complexity", "CANDIDATES"]

log = logging.getLogger(__name__)

# Preference order when two candidates fit equally well
CANDIDATES = ("poly", "log", "exp")
R2_TOLERANCE = 1e-12


def _r2(times: np.ndarray, fitted: np.ndarray) -> float:
    total = np.sum((times - times.mean()) ** 2)
    return float(1 - np.sum((times - fitted) ** 2) / total)


def _fit(model: str, n: np.ndarray, times: np.ndarray) -> tuple[dict[str, float], np.ndarray]:
    if model == "poly":
        exponent, intercept = np.polyfit(np.log(n), np.log(times), 1)
        coefficient = float(np.exp(intercept))
        return {"exponent": float(exponent), "coefficient": coefficient}, coefficient * n ** exponent
    if model == "log":
        slope, intercept = np.polyfit(np.log(n), times, 1)
        return {"slope": float(slope), "intercept": float(intercept)}, intercept + slope * np.log(n)
    rate, intercept = np.polyfit(n, np.log(times), 1)
    coefficient = float(np.exp(intercept))
    return {"rate": float(rate), "coefficient": coefficient}, coefficient * np.exp(rate * n)


def fit_complexity(sizes: Sequence[int], times: Sequence[float]) -> ComplexityFit:
    """
    Fit runtime against input size with a power law (log-log line), a logarithmic and an exponential model and keep
    the model with the highest R², measured on the original time scale.

    @param sizes: Input sizes, at least three
    @param times: Positive runtimes for each size
    @return: The winning model with its parameters and R². Constant times cannot distinguish the models and give
             C{poly} with exponent 0 and an undefined R².
    """
    n = np.asarray(sizes, dtype=float)
    t = np.asarray(times, dtype=float)
    if n.size != t.size:
        raise DegenerateInput(f"Got {n.size} sizes but {t.size} times")
    if n.size < 3:
        raise DegenerateInput(f"Complexity fitting needs at least 3 points, got {n.size}")
    if np.any(n <= 0) or np.any(t <= 0) or not np.all(np.isfinite(t)):
        raise DegenerateInput("Sizes and times must be positive")
    if np.unique(n).size < 2:
        raise DegenerateInput("Complexity fitting needs at least two distinct sizes")

    if np.ptp(t) == 0:
        log.warning("Constant runtimes cannot distinguish complexity classes, reporting exponent 0")
        return ComplexityFit(
            model="poly", parameters={"exponent": 0.0, "coefficient": float(t[0])}, r2=np.nan,
            sizes=list(sizes), times=list(times),
        )

    best = None
    for model in CANDIDATES:
        with np.errstate(over="ignore"):
            parameters, fitted = _fit(model, n, t)
        r2 = _r2(t, fitted) if np.all(np.isfinite(fitted)) else -np.inf
        log.debug(f"Complexity candidate {model!r}: R² {r2:.6f}, {parameters}")
        if best is None or r2 > best[2] + R2_TOLERANCE:
            best = (model, parameters, r2)

    model, parameters, r2 = best
    return ComplexityFit(model=model, parameters=parameters, r2=r2, sizes=list(sizes), times=list(times))
