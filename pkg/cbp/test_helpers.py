"""
Common helpers for tests: brute force oracles, small deterministic systems
and the switch for slow Monte Carlo tests
"""
import itertools
import math
import os
from unittest import skip as skip, skipUnless as skipUnless, expectedFailure as expectedFailure  # NOQA pylint:disable=unused-import
from typing import Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from cbp.chains import collision_hits
from cbp.lpp import GeomWeightedPaths, u_rows
from cbp.model import InitialConfig, PathBundle, SystemParams, TimeGrid
from cbp.solver import ParticleSolution


def strtobool(val: Union[str, bool]) -> bool:
    """instead of deprecated distutils.util.strtobool(...)"""
    return str(val).lower() in ("y", "yes", "t", "true", "on", "1")


# Monte Carlo acceptance runs take minutes, enable them by SLOW_TESTS=on
slow_tests = strtobool(os.environ.get('SLOW_TESTS', ''))


# --- brute force oracles

def ordered_chains(n_points: int, m: int) -> Iterator[Tuple[int, ...]]:
    """All non-decreasing tuples of m grid indexes in 0..n_points-1"""
    return itertools.combinations_with_replacement(range(n_points), m)


def brute_chain(rows: np.ndarray, maximize: bool) -> float:
    """Optimum of sum_k rows[k](tau_(k+1)) - rows[k](tau_k) over all chains on the columns"""
    n = rows.shape[1]
    best = None
    for points in ordered_chains(n, rows.shape[0] - 1):
        bounds = (0,) + points + (n - 1,)
        value = sum(row[bounds[k + 1]] - row[bounds[k]] for k, row in enumerate(rows))
        if best is None or (value > best if maximize else value < best):
            best = value
    assert best is not None
    return float(best)


def _columns(values: np.ndarray, lo: int, hi: Optional[int]) -> np.ndarray:
    return values[:, lo:values.shape[1] if hi is None else hi + 1]


def brute_v_minus(b: PathBundle, i: int, M: int, lo: int = 0, hi: Optional[int] = None) -> float:
    return brute_chain(_columns(b.values[[j - 1 for j in range(i + M - 1, i - 1, -1)]], lo, hi), maximize=False)


def brute_v_plus(b: PathBundle, i: int, M: int, lo: int = 0, hi: Optional[int] = None) -> float:
    return brute_chain(_columns(b.values[[j - 1 for j in range(i, i + M)]], lo, hi), maximize=True)


def brute_w(g: GeomWeightedPaths, i: int, M: int) -> float:
    return brute_v_minus(g.bundle, i, M)


def brute_u(b: PathBundle, i: int, j: int, M: int) -> float:
    return brute_chain(-b.values[[k - 1 for k in u_rows(i, j, M)]], maximize=True)


def brute_j(b: PathBundle, g: GeomWeightedPaths, i: int) -> float:
    """The J statistic on [0, T], every inner Vminus enumerated separately"""
    best = -math.inf
    w_row = g.row(i)
    for s in range(b.grid.n_steps + 1):
        value = -brute_v_minus(b, 1, i, 0, s) + w_row[s] - w_row[0]
        for j in range(1, i):
            value -= g.r ** (i - j) * brute_v_minus(b, j, i - j + 1, 0, s)
        best = max(best, value)
    return best / math.sqrt(b.grid.horizon)


def brute_r_star(b: PathBundle, g: GeomWeightedPaths, i: int, M: int) -> float:
    top, end = i + M, b.grid.n_steps
    w_row = g.row(top)
    best = -math.inf
    for s in range(end + 1):
        value = w_row[end] - w_row[s]
        for j in range(1, top):
            value -= g.r ** (top - j) * brute_v_minus(b, j, top - j + 1, s, end)
        best = max(best, value)
    return best


def brute_k_star(sol: ParticleSolution, i: int, lo: int, hi: int) -> int:
    """Longest chain lo <= s_(i+k-1) <= ... <= s_i <= hi of collision indexes, by enumeration"""
    hits = collision_hits(sol)
    best = 0
    for k in range(1, sol.N - i + 1):
        times = [np.flatnonzero(hits[j - 1, lo:hi + 1]) + lo for j in range(i + k - 1, i - 1, -1)]
        if any(chain == tuple(sorted(chain)) for chain in itertools.product(*times)):
            best = k
    return best


# --- deterministic systems

def two_chain_system() -> Tuple[PathBundle, InitialConfig, SystemParams]:
    """Four particles where the pair (2,3) meets at t = 0.25 and then the pair (1,2) at t = 0.45

    The collisions are recorded on the grid steps closing at 0.3 and 0.5.
    """
    grid = TimeGrid.uniform(1.0, 10)
    bundle = PathBundle.from_functions(grid, [lambda t: 2 * t, lambda t: 0 * t, lambda t: -t, lambda t: 0 * t])
    return bundle, InitialConfig.from_values([-1.0, 0.0, 0.25, 10.0]), SystemParams(p=0.5)


def linear_paths(grid: TimeGrid, slopes: Sequence[float]) -> PathBundle:
    return PathBundle.deterministic(grid, [slope * grid.times for slope in slopes])
