"""Summary statistics of Monte Carlo samples"""
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import stats

from cbp.exceptions import InterfaceError


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    std_err: float
    quantiles: Tuple[float, float, float]   # 5%, 50%, 95%
    sorted_values: np.ndarray

    def cdf(self, x: float) -> float:
        """Empirical distribution function"""
        return float(np.searchsorted(self.sorted_values, x, side='right')) / self.n


def summarize(values: Sequence[float]) -> SummaryStats:
    """std_err = sample standard deviation / sqrt(n), zero for a single value"""
    data = np.sort(np.asarray(values, dtype=float))
    if data.ndim != 1 or not len(data):
        raise InterfaceError("summarize needs a non-empty sequence of numbers")
    n = len(data)
    mean = float(np.mean(data))
    std_err = float(np.std(data, ddof=1)) / math.sqrt(n) if n > 1 else 0.0
    q05, q50, q95 = (float(x) for x in np.quantile(data, [0.05, 0.5, 0.95]))
    return SummaryStats(n=n, mean=mean, std_err=std_err, quantiles=(q05, q50, q95), sorted_values=data)


def wilson_interval(successes: int, n: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval of a binomial proportion"""
    if n < 1 or not 0 <= successes <= n:
        raise InterfaceError("need 0 <= successes <= n and n >= 1")
    z = float(stats.norm.ppf(0.5 + confidence / 2.0))
    p_hat = successes / n
    denominator = 1.0 + z * z / n
    centre = (p_hat + z * z / (2 * n)) / denominator
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / n + z * z / (4 * n * n)) / denominator
    return max(0.0, centre - half), min(1.0, centre + half)


def log_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least squares slope of log(y) against x over the points with y > 0"""
    pairs = [(x, math.log(y)) for x, y in zip(xs, ys) if y > 0]
    if len(pairs) < 2:
        return math.nan
    fit = stats.linregress([x for x, _ in pairs], [y for _, y in pairs])
    return float(fit.slope)
