import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.linear_model import LinearRegression
from sklearn.metrics import r2_score

from core.exceptions import ParameterError


@dataclass
class SampleSummary:
    """Mean and spread of the entropies collected at one subsystem size."""
    samples: int
    mean: float
    std: float


@dataclass
class PowerFit:
    """S = prefactor * n_A ** gamma, fitted on log-log points."""
    gamma: float
    prefactor: float
    r_squared: float
    points: int = 0


class ScanStatistics:
    """Utility for the summary statistics of entropy scans."""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def summarize(self, values: Sequence[float]) -> SampleSummary:
        """Population mean and standard deviation."""
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            return SampleSummary(samples=0, mean=0.0, std=0.0)
        return SampleSummary(samples=int(values.size), mean=float(values.mean()), std=float(values.std()))

    def finite_difference(self, x: Sequence[float], y: Sequence[float]) -> List[Optional[float]]:
        """Central differences inside the grid, one-sided at its ends."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.size < 2:
            return [None] * int(x.size)
        slopes = np.empty_like(y)
        slopes[0] = (y[1] - y[0]) / (x[1] - x[0])
        slopes[-1] = (y[-1] - y[-2]) / (x[-1] - x[-2])
        if x.size > 2:
            slopes[1:-1] = (y[2:] - y[:-2]) / (x[2:] - x[:-2])
        return [float(s) for s in slopes]

    def fit_power_law(self, n_a: Sequence[float], mean_s: Sequence[float]) -> PowerFit:
        """Unweighted least squares of log S against log n_A; zero entropies are skipped."""
        n_a = np.asarray(n_a, dtype=float)
        mean_s = np.asarray(mean_s, dtype=float)
        keep = (n_a > 0) & (mean_s > 0)
        if keep.sum() < 2:
            raise ParameterError(f"a power-law fit needs two positive points, got {int(keep.sum())}")
        log_n = np.log(n_a[keep]).reshape(-1, 1)
        log_s = np.log(mean_s[keep])
        model = LinearRegression().fit(log_n, log_s)
        fit = PowerFit(
            gamma=float(model.coef_[0]),
            prefactor=float(np.exp(model.intercept_)),
            r_squared=float(r2_score(log_s, model.predict(log_n))),
            points=int(keep.sum()),
        )
        self.logger.info(f"Power-law fit over {fit.points} points: gamma={fit.gamma:.4f}")
        return fit

    def transition_steepness(self, n_a: Sequence[float], di_dn: Sequence[Optional[float]], n: int) -> float:
        """Largest slope of the discrepancy derivative against the fraction n_A / n."""
        pairs: List[Tuple[float, float]] = [(a / n, d) for a, d in zip(n_a, di_dn) if d is not None]
        if len(pairs) < 2:
            raise ParameterError("steepness needs at least two derivative values")
        fractions, derivative = zip(*pairs)
        return float(max(self.finite_difference(fractions, derivative)))
