"""
Approximative versions of the infinite system and diagnostics of the
conditions under which they are the unique strong solution.

An approximative version is the limit of the finite truncations X^M as
M grows, all driven by the same paths. X_j^M(t) is non-increasing in M, so
the limit exists pathwise; on a finite schedule of sizes we report the
Cauchy gaps between consecutive levels.

For p = 0 the limit is explicit:

    X_n(t) = inf_{k >= n} (x_k + Y_(n,k)(t))

and is computed by the same downward recursion as the finite p = 0 solution,
tracking the index k attaining the infimum.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from cbp.common import get_setting
from cbp.exceptions import InterfaceError, InternalError, NotSupportedError, warn_sim
from cbp.model import InitialConfig, PathBundle, SystemParams, TimeGrid, sample_brownian
from cbp.solver import ParticleSolution, Tolerances, driving_rows, solve

log = logging.getLogger(__name__)

DEFAULT_SIZES = (4, 8, 16, 32, 64)
ASYMPTOTIC_NOTE = "finite-M diagnostics of an asymptotic condition"


@dataclass
class ApproxVersion:
    """Truncations X^M at the sizes M_1 < M_2 < ... on one driving bundle

    sup_gaps[j-1, l] = sup_{s <= T} |X_j^(M_(l+1))(s) - X_j^(M_l)(s)|
    converged_at[j-1] = the smallest size from which every later gap is
    <= tol_approx, or None
    """
    sizes: List[int]
    truncations: List[ParticleSolution]
    j_max: int
    sup_gaps: np.ndarray
    converged_at: List[Optional[int]]
    tol_approx: float
    x0: InitialConfig
    params: SystemParams

    @property
    def largest(self) -> ParticleSolution:
        return self.truncations[-1]

    @property
    def trajectories(self) -> np.ndarray:
        """The first j_max rows of the largest truncation"""
        return self.largest.X[:self.j_max]

    def truncation(self, M: int) -> ParticleSolution:
        return self.truncations[self.sizes.index(M)]


def default_tol_approx(x0: InitialConfig, j_max: int) -> float:
    return 1e-6 * (1.0 + abs(x0.x(j_max)))


def build_approx(driving: PathBundle, x0: InitialConfig, params: SystemParams,
                 sizes: Sequence[int] = DEFAULT_SIZES, j_max: int = 3,
                 tol_approx: Optional[float] = None,
                 tolerances: Optional[Tolerances] = None) -> ApproxVersion:
    """Solve the truncations at all sizes and record their Cauchy gaps

    A truncation sitting above a smaller one by more than the order
    tolerance is an InternalError.
    """
    # pylint:disable=too-many-arguments,too-many-locals
    sizes = [int(M) for M in sizes]
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InterfaceError("sizes must be strictly increasing, got {}".format(sizes))
    if not 1 <= j_max <= sizes[0]:
        raise InterfaceError("j_max={} must be in 1..{}".format(j_max, sizes[0]))
    tolerances = tolerances or Tolerances.from_settings()
    tol_approx = default_tol_approx(x0, j_max) if tol_approx is None else tol_approx
    truncations = [solve(driving, x0, params, M, tolerances=tolerances) for M in sizes]
    gaps = np.zeros((j_max, len(sizes) - 1))
    for level, (small, big) in enumerate(zip(truncations, truncations[1:])):
        rise = float(np.max(big.X[:small.N] - small.X))
        if rise > tolerances.order:
            raise InternalError(["truncations are not monotone in the system size",
                                 "X^{} exceeds X^{} by {:.3g}".format(big.N, small.N, rise)])
        gaps[:, level] = np.max(np.abs(big.X[:j_max] - small.X[:j_max]), axis=1)
    converged_at = []  # type: List[Optional[int]]
    for row in gaps:
        found = None
        for level in range(len(row) - 1, -1, -1):
            if row[level] > tol_approx:
                break
            found = sizes[level]
        converged_at.append(found)
    log.info("approximative version p=%s sizes=%s: converged_at=%s", params.p, sizes, converged_at)
    return ApproxVersion(sizes=sizes, truncations=truncations, j_max=j_max, sup_gaps=gaps,
                         converged_at=converged_at, tol_approx=tol_approx, x0=x0, params=params)


# --- p = 0

@dataclass
class InfiniteP0Solution:
    grid: TimeGrid
    X: np.ndarray          # rows n = 1..n_watch
    argmin_k: np.ndarray   # the k attaining the infimum, per (n, t)
    k_max: int
    saturated: bool


def _extended_driving(driving: PathBundle, count: int) -> Optional[PathBundle]:
    """More rows of a seeded Brownian bundle; the first rows are unchanged"""
    if driving.count >= count:
        return driving
    if driving.kind != 'brownian' or driving.seed is None:
        return None
    extended = sample_brownian(driving.grid, count, driving.seed)
    if not np.array_equal(extended.values[:driving.count], driving.values):
        return None
    return extended


def _p0_descent(x: np.ndarray, V: np.ndarray, n_watch: int):  # type: ignore[no-untyped-def]
    """Downward recursion X_n = min(x_n + V_n, V_n + inf_{s<=t} (X_(n+1)(s) - V_n(s)))"""
    k_max = len(x)
    X = x[-1] + V[-1]
    arg = np.full(V.shape[1], k_max)
    columns = np.arange(V.shape[1])
    rows_X = [X]
    rows_arg = [arg]
    for n in range(k_max - 2, -1, -1):
        values = X - V[n]
        best = np.minimum.accumulate(values)
        record = np.concatenate(([True], values[1:] < best[:-1]))
        where = np.maximum.accumulate(np.where(record, columns, 0))
        free = x[n] + V[n]
        pushed = V[n] + best
        X = np.minimum(free, pushed)
        arg = np.where(free <= pushed, n + 1, arg[where])
        if n < n_watch:
            rows_X.append(X)
            rows_arg.append(arg)
    rows_X.reverse()
    rows_arg.reverse()
    return np.array(rows_X[:n_watch]), np.array(rows_arg[:n_watch], dtype=int)


def solve_p0_infinite(driving: PathBundle, x0: InitialConfig, n_watch: int, k_max: int,
                      params: Optional[SystemParams] = None, k_max_cap: Optional[int] = None,
                      check_admissible: bool = True) -> InfiniteP0Solution:
    """X_n of the infinite p = 0 system for n <= n_watch, with the infimum over k <= k_max

    When the infimum is attained at k_max, k_max is doubled up to the cap
    (CBP_K_MAX_CAP) while the driving rows can be extended; if it stays
    attained at the boundary, the result is flagged as saturated.
    """
    # pylint:disable=too-many-arguments
    if check_admissible and not x0.is_admissible:
        raise InterfaceError("initial positions must grow like a k**chi with a > 0 and chi > 1/2, "
                             "got {!r}".format(x0))
    if not 1 <= n_watch <= k_max:
        raise InterfaceError("need 1 <= n_watch <= k_max, got n_watch={} k_max={}".format(n_watch, k_max))
    params = SystemParams(p=0.0) if params is None else params.with_p(0.0)
    cap = int(get_setting('CBP_K_MAX_CAP')) if k_max_cap is None else k_max_cap
    while True:
        bundle = _extended_driving(driving, k_max)
        if bundle is None:
            raise InterfaceError("the driving bundle has {} rows, k_max={} needs more".format(driving.count, k_max))
        V = driving_rows(bundle, params, k_max).values
        X, arg = _p0_descent(x0.first(k_max), V, n_watch)
        saturated = bool(np.any(arg[:k_max - 1] == k_max))
        if not saturated or 2 * k_max > cap or _extended_driving(driving, 2 * k_max) is None:
            break
        log.debug("k_max=%d is attained, doubling", k_max)
        k_max *= 2
    if saturated:
        warn_sim("the infimum over k is attained at k_max={}; the value is an upper bound".format(k_max))
    return InfiniteP0Solution(driving.grid, X, arg, k_max, saturated)


# --- conditions

@dataclass(frozen=True)
class ConditionThresholds:
    drift_sup: float = math.inf
    drift_square_sum: float = math.inf
    scon_c: float = 1.0


@dataclass
class ConditionReport:
    """Profiles over the truncation levels M of the size schedule"""
    c1a: float
    c1a_pass: bool
    c1b: float
    c1b_pass: bool
    levels: List[int]
    c2a_profile: Dict[int, float]
    c2b_profile: Optional[Dict[int, float]]   # None: not applicable for p = 0
    growth_liminf: Dict[int, float]
    growth_limsup: Dict[int, float]
    scon_profile: Dict[int, float]
    flags: Dict[str, bool] = field(default_factory=dict)
    note: str = ASYMPTOTIC_NOTE


def _decreasing(values: Sequence[float], tol: float = 0.0) -> bool:
    return all(b <= a + tol for a, b in zip(values, values[1:]))


def check_conditions(av: ApproxVersion, params: Optional[SystemParams] = None,
                     thresholds: Optional[ConditionThresholds] = None) -> ConditionReport:
    """Finite-M profiles of the drift, local time and initial growth conditions

    c2a[M] = sup_{s<=T} (q L_(M,M+1)(s) - p L_(M-1,M)(s)) / max(1, x_M)
    c2b[M] = (q/p)^M L_(M,M+1)(T)
    growth[M] = x_M / sqrt(M)
    scon[M] = sum_{j<=M} exp(-c max(x_j, 0)^2)
    """
    # pylint:disable=too-many-locals
    params = params or av.params
    thresholds = thresholds or ConditionThresholds()
    if len(av.sizes) < 3:
        raise InterfaceError("condition profiles need at least 3 truncation levels")
    sol = av.largest
    levels = av.sizes[:-1]
    p, q = params.p, params.q
    c2a = {}
    c2b = {} if p > 0 else None
    for M in levels:
        scale = max(1.0, av.x0.x(M))
        c2a[M] = float(np.max(q * sol.local_time(M) - p * sol.local_time(M - 1))) / scale
        if c2b is not None:
            c2b[M] = float((q / p) ** M * sol.local_time(M)[-1])
    growth = {M: av.x0.x(M) / math.sqrt(M) for M in av.sizes}
    x = av.x0.first(av.sizes[-1])
    partial = np.cumsum(np.exp(-thresholds.scon_c * np.maximum(x, 0.0) ** 2))
    scon = {M: float(partial[M - 1]) for M in av.sizes}
    tail = levels[-3:]
    flags = {
        'c2a_decreasing': _decreasing([c2a[M] for M in tail]),
        'c2b_decreasing': c2b is not None and _decreasing([c2b[M] for M in tail]),
        'growth_increasing': _decreasing([-growth[M] for M in av.sizes]),
        'scon_levelling': _decreasing(np.diff([scon[M] for M in av.sizes]).tolist()),
    }
    c1a, c1b = params.drift_sup, params.drift_square_sum
    return ConditionReport(c1a=c1a, c1a_pass=c1a <= thresholds.drift_sup and math.isfinite(c1a),
                           c1b=c1b, c1b_pass=c1b <= thresholds.drift_square_sum and math.isfinite(c1b),
                           levels=levels, c2a_profile=c2a, c2b_profile=c2b, growth_liminf=growth,
                           growth_limsup=dict(growth), scon_profile=scon, flags=flags)


def uniqueness_horizon(report: ConditionReport, params: SystemParams, terms: int = 10000) -> float:
    """The horizon of pathwise uniqueness for p > q

        T = (1/4) (1 + sum_j sigma^j (1 + sqrt(j+1)))^(-2) (limsup x_M / sqrt(M))^2

    with the limsup read as the maximum of the last three growth levels.
    """
    if not params.p > params.q:
        raise NotSupportedError("the uniqueness horizon needs p > q, got p={}".format(params.p))
    sigma = params.q / params.p
    j = np.arange(1, terms + 1)
    series = 1.0 + float(np.sum(sigma ** j * (1.0 + np.sqrt(j + 1.0))))
    limsup = max(list(report.growth_limsup.values())[-3:])
    return 0.25 * series ** -2 * limsup ** 2
