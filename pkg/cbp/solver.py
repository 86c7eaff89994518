"""
Grid solution of the N-particle system of competing Brownian particles

    X_j(t) = x_j + V_j(t) + p L_(j-1,j)(t) - q L_(j,j+1)(t),   1 <= j <= N

with L_(0,1) = L_(N,N+1) = 0 and each L_(j,j+1) non-decreasing, starting
at 0 and increasing only when X_j = X_(j+1).

Each local time is the regulator of a one-sided Skorokhod problem for the
gap Z_j = X_(j+1) - X_j, whose driver depends on the two neighbouring local
times. `solve_finite` iterates these coupled maps to their fixed point.
"""
import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np

from cbp.common import get_picard_max_iter, get_picard_tol, get_setting
from cbp.exceptions import ConvergenceError, InterfaceError
from cbp.model import InitialConfig, PathBundle, SystemParams, TimeGrid, drift_apply

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tolerances:
    order: float = 1e-9
    identity: float = 1e-9
    complementarity: float = 1e-9  # multiplied by max(1, max L)

    @classmethod
    def from_settings(cls) -> 'Tolerances':
        return cls(order=float(get_setting('CBP_TOL_ORDER')),
                   identity=float(get_setting('CBP_TOL_IDENTITY')),
                   complementarity=float(get_setting('CBP_TOL_COMPLEMENTARITY')))


@dataclass(frozen=True)
class ResidualReport:
    max_order_violation: float
    max_identity_residual: float
    max_complementarity: float
    max_monotonicity_violation: float
    picard_iters: int
    converged: bool

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


class ParticleSolution:
    """Positions X (N rows) and local times L_(j,j+1) (N - 1 rows) on the grid

    `driving` holds the rows V_1..V_N that were used, so that the residuals
    can be recomputed from the raw arrays.
    """

    def __init__(self, grid: TimeGrid, X: np.ndarray, L: np.ndarray, params: SystemParams,
                 x0: np.ndarray, driving: PathBundle,
                 diagnostics: Optional[ResidualReport] = None) -> None:
        self.grid = grid
        self.X = np.asarray(X, dtype=float)
        self.L = np.asarray(L, dtype=float).reshape(max(self.X.shape[0] - 1, 0), len(grid.times))
        self.params = params
        self.x0 = np.asarray(x0, dtype=float)
        self.driving = driving
        self.diagnostics = diagnostics
        for array in (self.X, self.L, self.x0):
            array.setflags(write=False)

    @property
    def N(self) -> int:  # pylint:disable=invalid-name
        return self.X.shape[0]

    def position(self, j: int) -> np.ndarray:
        if not 1 <= j <= self.N:
            raise InterfaceError("particle {} is out of range 1..{}".format(j, self.N))
        return self.X[j - 1]

    def local_time(self, j: int) -> np.ndarray:
        """L_(j,j+1); identically zero for j = 0 and j = N"""
        if j in (0, self.N):
            return np.zeros(len(self.grid.times))
        if not 0 < j < self.N:
            raise InterfaceError("local time index {} is out of range 0..{}".format(j, self.N))
        return self.L[j - 1]

    def gaps(self) -> np.ndarray:
        return np.diff(self.X, axis=0)

    def with_diagnostics(self, diagnostics: ResidualReport) -> 'ParticleSolution':
        return ParticleSolution(self.grid, self.X, self.L, self.params, self.x0, self.driving, diagnostics)

    def __repr__(self) -> str:
        return 'ParticleSolution(N={}, p={}, {!r})'.format(self.N, self.params.p, self.grid)


# --- helpers

def driving_rows(driving: PathBundle, params: Optional[SystemParams], count: int) -> PathBundle:
    """Rows V_1..V_count; drifts are added only to raw Brownian bundles"""
    driving.require_rows(count)
    bundle = driving.take(count)
    if bundle.kind == 'brownian' and params is not None:
        bundle = drift_apply(bundle, params)
    return bundle


def _initial_positions(x0: InitialConfig, count: int) -> np.ndarray:
    x = x0.first(count)
    if np.any(np.diff(x) < 0):
        raise InterfaceError("initial positions are not non-decreasing: {}".format(x))
    return x


def _padded(L: np.ndarray) -> np.ndarray:
    """Local times with the two identically zero boundary rows"""
    out = np.zeros((L.shape[0] + 2, L.shape[1]))
    out[1:-1] = L
    return out


def positions_from_local_times(x: np.ndarray, V: np.ndarray, L: np.ndarray, p: float) -> np.ndarray:
    padded = _padded(L)
    return x[:, None] + V + p * padded[:-1] - (1.0 - p) * padded[1:]


def skorokhod_regulator(y: np.ndarray) -> np.ndarray:
    """Regulator of the one-sided Skorokhod problem at 0, row-wise

    L(t) = sup_{s <= t} max(0, -y(s)); exact at grid points for piecewise
    linear drivers.
    """
    return np.maximum(np.maximum.accumulate(-y, axis=-1), 0.0)


# --- operations

def verify_solution(sol: ParticleSolution, tolerances: Optional[Tolerances] = None) -> ResidualReport:
    """Recompute order, identity, complementarity and monotonicity residuals"""
    tolerances = tolerances or Tolerances.from_settings()
    X, L = sol.X, sol.L
    p = sol.params.p
    picard_iters = sol.diagnostics.picard_iters if sol.diagnostics else 0
    expected = positions_from_local_times(sol.x0, sol.driving.values[:sol.N], L, p)
    identity = float(np.max(np.abs(X - expected)))
    if sol.N > 1:
        gaps = np.diff(X, axis=0)
        order = float(max(0.0, -np.min(gaps)))
        increments = np.diff(L, axis=1)
        monotonicity = float(max(0.0, -np.min(increments), np.max(np.abs(L[:, 0]))))
        # the gap at the closing time of each step, where the increase is placed
        complementarity = float(np.max(np.sum(np.abs(gaps[:, 1:]) * np.maximum(increments, 0.0), axis=1)))
        l_scale = max(1.0, float(np.max(L)))
    else:
        order = monotonicity = complementarity = 0.0
        l_scale = 1.0
    ok = (order <= tolerances.order and identity <= tolerances.identity and monotonicity <= tolerances.order and
          complementarity <= tolerances.complementarity * l_scale)
    picard_ok = sol.diagnostics.converged if sol.diagnostics else True
    return ResidualReport(max_order_violation=order, max_identity_residual=identity,
                          max_complementarity=complementarity, max_monotonicity_violation=monotonicity,
                          picard_iters=picard_iters, converged=bool(ok and picard_ok))


def _finish(grid: TimeGrid, x: np.ndarray, V: PathBundle, L: np.ndarray, params: SystemParams,
            iters: int, picard_converged: bool, tolerances: Optional[Tolerances]) -> ParticleSolution:
    X = positions_from_local_times(x, V.values, L, params.p)
    provisional = ResidualReport(0.0, 0.0, 0.0, 0.0, iters, picard_converged)
    sol = ParticleSolution(grid, X, L, params, x, V, provisional)
    report = verify_solution(sol, tolerances)
    sol = sol.with_diagnostics(report)
    if not report.converged:
        raise ConvergenceError([
            "the particle system did not converge (N={}, p={})".format(sol.N, params.p),
            "picard_iters={} order={:.3g} identity={:.3g} complementarity={:.3g} monotonicity={:.3g}".format(
                report.picard_iters, report.max_order_violation, report.max_identity_residual,
                report.max_complementarity, report.max_monotonicity_violation)],
            report=report)
    return sol


def solve_finite(driving: PathBundle, x0: InitialConfig, params: SystemParams, N: int,
                 tol_picard: Optional[float] = None, max_iter: Optional[int] = None,
                 tolerances: Optional[Tolerances] = None) -> ParticleSolution:
    """Solve the N-particle system on the grid of `driving`

    Rows of a 'brownian' bundle get the drifts of `params`, other bundles are
    used as V_j directly. The coupled Skorokhod maps

        L_j <- regulator(d_j - p L_(j-1) - q L_(j+1)),   d_j = x_(j+1) - x_j + V_(j+1) - V_j

    are swept in red-black order until the sup-norm change is <= tol_picard.
    """
    # pylint:disable=too-many-arguments,too-many-locals
    if N < 1:
        raise InterfaceError("N must be >= 1, got {}".format(N))
    tol_picard = get_picard_tol() if tol_picard is None else tol_picard
    max_iter = get_picard_max_iter() if max_iter is None else max_iter
    V = driving_rows(driving, params, N)
    x = _initial_positions(x0, N)
    grid = driving.grid
    p, q = params.p, params.q
    if N == 1:
        return _finish(grid, x, V, np.zeros((0, len(grid.times))), params, 0, True, tolerances)

    d = np.diff(x)[:, None] + np.diff(V.values, axis=0)
    padded = np.zeros((N + 1, len(grid.times)))  # rows L_(0,1) .. L_(N,N+1)
    parities = (slice(1, N, 2), slice(2, N, 2))
    iters = 0
    converged = False
    while iters < max_iter:
        iters += 1
        change = 0.0
        for rows in parities:
            lower = slice(rows.start - 1, N - 1, 2)
            upper = slice(rows.start + 1, N + 1, 2)
            new = skorokhod_regulator(d[rows.start - 1::2] - p * padded[lower] - q * padded[upper])
            if new.size:
                change = max(change, float(np.max(np.abs(new - padded[rows]))))
            padded[rows] = new
        if change <= tol_picard:
            converged = True
            break
    log.debug("solve_finite N=%d p=%s: %d sweeps, converged=%s", N, p, iters, converged)
    if not converged:
        L = padded[1:N]
        X = positions_from_local_times(x, V.values, L, p)
        report = verify_solution(
            ParticleSolution(grid, X, L, params, x, V, ResidualReport(0.0, 0.0, 0.0, 0.0, iters, False)),
            tolerances)
        raise ConvergenceError("Picard iteration did not converge in {} sweeps (N={}, p={})".format(
            max_iter, N, p), report=report)
    return _finish(grid, x, V, padded[1:N].copy(), params, iters, True, tolerances)


def solve_p0(driving: PathBundle, x0: InitialConfig, N: int, params: Optional[SystemParams] = None,
             tolerances: Optional[Tolerances] = None) -> ParticleSolution:
    """Closed-form solution for p = 0, downwards from the top particle

        X_N = x_N + V_N
        X_j = x_j + V_j + min(0, inf_{s <= t} (X_(j+1)(s) - x_j - V_j(s)))
    """
    if N < 1:
        raise InterfaceError("N must be >= 1, got {}".format(N))
    params = SystemParams(p=0.0) if params is None else params.with_p(0.0)
    V = driving_rows(driving, params, N)
    x = _initial_positions(x0, N)
    X = np.empty((N, len(driving.times)))
    L = np.zeros((N - 1, len(driving.times)))
    X[N - 1] = x[N - 1] + V.values[N - 1]
    for j in range(N - 2, -1, -1):
        free = x[j] + V.values[j]
        L[j] = -np.minimum(np.minimum.accumulate(X[j + 1] - free), 0.0)
        X[j] = free - L[j]
    sol = ParticleSolution(driving.grid, X, L, params, x, V, ResidualReport(0.0, 0.0, 0.0, 0.0, 0, True))
    return sol.with_diagnostics(verify_solution(sol, tolerances))


def solve_packed(driving: PathBundle, params: SystemParams, M: int, **kwargs: Any) -> ParticleSolution:
    """The M-particle system started from x_1 = ... = x_M = 0"""
    return solve_finite(driving, InitialConfig.packed(), params, M, **kwargs)


def mirror_solution(sol: ParticleSolution) -> ParticleSolution:
    """The system seen upside down: X'_k = -X_(N+1-k) with p' = 1 - p

    Local times are reindexed L'_(k,k+1) = L_(N-k,N+1-k).
    """
    drifts = -sol.params.drift_vector(sol.N)[::-1]
    params = SystemParams(p=sol.params.q, drifts=tuple(drifts), drift_tail=0.0)
    mirrored = ParticleSolution(sol.grid, -sol.X[::-1], sol.L[::-1], params, -sol.x0[::-1],
                                sol.driving.mirrored(), sol.diagnostics)
    return mirrored


def solve_p1(driving: PathBundle, x0: InitialConfig, N: int, params: Optional[SystemParams] = None,
             tolerances: Optional[Tolerances] = None) -> ParticleSolution:
    """Solution for p = 1 as the mirror image of the p = 0 recursion"""
    params = SystemParams(p=1.0) if params is None else params.with_p(1.0)
    V = driving_rows(driving, params, N)
    x = _initial_positions(x0, N)
    image = solve_p0(V.mirrored(), InitialConfig.from_values(-x[::-1]), N, tolerances=tolerances)
    sol = mirror_solution(image)
    sol = ParticleSolution(sol.grid, sol.X, sol.L, params, sol.x0, V, sol.diagnostics)
    return sol.with_diagnostics(verify_solution(sol, tolerances))


def solve(driving: PathBundle, x0: InitialConfig, params: SystemParams, N: int,
          **kwargs: Any) -> ParticleSolution:
    """Dispatch to the closed forms at p = 0 and p = 1, else to solve_finite"""
    if params.p == 0.0:
        return solve_p0(driving, x0, N, params, tolerances=kwargs.get('tolerances'))
    if params.p == 1.0:
        return solve_p1(driving, x0, N, params, tolerances=kwargs.get('tolerances'))
    return solve_finite(driving, x0, params, N, **kwargs)
