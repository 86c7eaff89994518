"""
Last passage functionals of driving paths, evaluated exactly on the grid.

Every functional is an optimum of a sum of path increments over a chain of
ordered times. The optimizing times are restricted to grid points, which is
exact for piecewise linear paths: the objective is piecewise linear in each
time separately, so extrema are attained at breakpoints.

A chain visits a sequence of rows r_0, r_1, ..., r_(m-1) in time order:

    sum_k  r_k(tau_(k+1)) - r_k(tau_k),   u = tau_0 <= tau_1 <= ... <= tau_m = v

and it is optimized by the dynamic programme

    F_0(t) = r_0(t) - r_0(u)
    F_k(t) = r_k(t) + opt_{u <= s <= t} (F_(k-1)(s) - r_k(s))

in O(m n) operations. Ties are broken by the earliest time.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from cbp.exceptions import InterfaceError, NotSupportedError
from cbp.model import PathBundle, TimeGrid
from cbp.solver import ParticleSolution

log = logging.getLogger(__name__)

LPP_KINDS = ('Vminus', 'Vplus', 'W', 'Wstar', 'U', 'Rstar', 'Istar', 'J')

Window = Optional[Tuple[float, float]]


@dataclass(frozen=True)
class LppValue:
    """Value of a functional and the grid times of an optimizing chain

    argchain is ordered like the free variables of the functional:
    descending times s_i >= s_(i+1) >= ... for Vminus and W,
    ascending times for the other chains.
    """
    value: float
    argchain: Tuple[float, ...]
    kind: str
    i: int = 0
    M: int = 0
    window: Tuple[float, float] = (0.0, 0.0)
    arg_index: Tuple[int, ...] = field(default=(), compare=False)


class ChainProfile(NamedTuple):
    values: List[np.ndarray]   # F_k on the window, one array per row of the chain
    argopt: List[np.ndarray]   # index of the optimal s for every t, for k >= 1


# --- dynamic programme

def _running_opt(values: np.ndarray, maximize: bool) -> Tuple[np.ndarray, np.ndarray]:
    """Running max (or min) and the earliest index attaining it"""
    if maximize:
        best = np.maximum.accumulate(values)
        record = np.concatenate(([True], values[1:] > best[:-1]))
    else:
        best = np.minimum.accumulate(values)
        record = np.concatenate(([True], values[1:] < best[:-1]))
    index = np.maximum.accumulate(np.where(record, np.arange(len(values)), 0))
    return best, index


def chain_profile(rows: np.ndarray, maximize: bool) -> ChainProfile:
    """The dynamic programme over rows given in time order (columns = window)"""
    values = [rows[0] - rows[0, 0]]
    argopt = []  # type: List[np.ndarray]
    for row in rows[1:]:
        best, index = _running_opt(values[-1] - row, maximize)
        values.append(row + best)
        argopt.append(index)
    return ChainProfile(values, argopt)


def backtrack(profile: ChainProfile, end: int) -> Tuple[int, ...]:
    """Breakpoints tau_1 <= ... <= tau_(m-1) of the optimal chain ending at `end`"""
    points = []
    t = end
    for index in reversed(profile.argopt):
        t = int(index[t])
        points.append(t)
    return tuple(reversed(points))


def chain_objective(rows: np.ndarray, breakpoints: Sequence[int]) -> float:
    """Sum of increments of rows (time order) for the chain with given breakpoints"""
    bounds = [0] + list(breakpoints) + [rows.shape[1] - 1]
    return float(sum(row[bounds[k + 1]] - row[bounds[k]] for k, row in enumerate(rows)))


def optimize_chain(rows: np.ndarray, maximize: bool) -> Tuple[float, Tuple[int, ...]]:
    profile = chain_profile(rows, maximize)
    end = rows.shape[1] - 1
    return float(profile.values[-1][end]), backtrack(profile, end)


def window_indices(grid: TimeGrid, window: Window) -> Tuple[int, int]:
    if window is None:
        return 0, grid.n_steps
    u, v = window
    lo, hi = grid.index_of(u), grid.index_of(v)
    if lo > hi:
        raise InterfaceError("window [{}, {}] is empty".format(u, v))
    return lo, hi


def _rows(bundle: PathBundle, row_numbers: Iterable[int]) -> np.ndarray:
    row_numbers = list(row_numbers)
    if min(row_numbers) < 1:
        raise InterfaceError("row numbers start at 1")
    bundle.require_rows(max(row_numbers))
    return bundle.values[[j - 1 for j in row_numbers]]


def _chain_value(bundle: PathBundle, row_numbers: Sequence[int], window: Window, maximize: bool,
                 kind: str, i: int, M: int, sign: float = 1.0, descending: bool = False) -> LppValue:
    lo, hi = window_indices(bundle.grid, window)
    rows = sign * _rows(bundle, row_numbers)[:, lo:hi + 1]
    value, points = optimize_chain(rows, maximize)
    arg_index = tuple(lo + k for k in points)
    if descending:
        arg_index = tuple(reversed(arg_index))
    times = bundle.times
    return LppValue(value=value, argchain=tuple(float(times[k]) for k in arg_index), kind=kind, i=i, M=M,
                    window=(float(times[lo]), float(times[hi])), arg_index=arg_index)


# --- V and W functionals

def v_minus(b: PathBundle, i: int, M: int, window: Window = None) -> LppValue:
    """inf over u <= s_(i+M-2) <= ... <= s_i <= v of sum_j V_j(s_(j-1)) - V_j(s_j)

    with s_(i+M-1) = u and s_(i-1) = v; the row i+M-1 runs first.
    """
    _check_chain(i, M)
    return _chain_value(b, range(i + M - 1, i - 1, -1), window, False, 'Vminus', i, M, descending=True)


def v_plus(b: PathBundle, i: int, M: int, window: Window = None) -> LppValue:
    """sup over u <= t_i <= ... <= t_(i+M-2) <= v of sum_j V_j(t_j) - V_j(t_(j-1))"""
    _check_chain(i, M)
    return _chain_value(b, range(i, i + M), window, True, 'Vplus', i, M)


def v_plus_profile(b: PathBundle, i: int, M: int) -> np.ndarray:
    """Vplus_M(i, t) at every grid time t"""
    _check_chain(i, M)
    return chain_profile(_rows(b, range(i, i + M)), maximize=True).values[-1]


def _check_chain(i: int, M: int) -> None:
    if i < 1 or M < 1:
        raise InterfaceError("chain needs i >= 1 and M >= 1, got i={} M={}".format(i, M))


class GeomWeightedPaths:
    """W_k(t) = sum_{j <= k} r^(k-j) V_j(t), computed as W_k = r W_(k-1) + V_k"""

    def __init__(self, base: PathBundle, r: float, k_max: int) -> None:
        if not 0.0 <= r <= 1.0:
            raise InterfaceError("r must be in [0, 1], got {}".format(r))
        base.require_rows(k_max)
        W = np.empty((k_max, len(base.times)))
        W[0] = base.values[0]
        for k in range(1, k_max):
            W[k] = r * W[k - 1] + base.values[k]
        self.base = base
        self.r = r
        self.k_max = k_max
        kind = 'deterministic' if base.kind == 'deterministic' else 'driven'
        self.bundle = PathBundle(base.grid, W, kind, base.seed)

    @property
    def W_rows(self) -> np.ndarray:  # pylint:disable=invalid-name
        return self.bundle.values

    def row(self, k: int) -> np.ndarray:
        return self.bundle.row(k)


def w_paths(b: PathBundle, r: float, k_max: int) -> GeomWeightedPaths:
    return GeomWeightedPaths(b, r, k_max)


def w_functional(g: GeomWeightedPaths, i: int, M: int, window: Window = None) -> LppValue:
    """The Vminus chain evaluated on the rows W_k"""
    _check_chain(i, M)
    return _chain_value(g.bundle, range(i + M - 1, i - 1, -1), window, False, 'W', i, M, descending=True)


def w_star(g: GeomWeightedPaths, M: int) -> LppValue:
    """W_M(1, M): the W functional of M rows on the window [0, M]"""
    value = w_functional(g, 1, M, (0.0, float(M)))
    return LppValue(value.value, value.argchain, 'Wstar', 1, M, value.window, value.arg_index)


def alpha_k(r: float, k: int) -> float:
    """(1 - r^k) / (1 - r), and k for r = 1

    >>> alpha_k(0.5, 3)
    1.75
    >>> alpha_k(1.0, 3)
    3.0
    """
    if not 0.0 <= r <= 1.0 or k < 0:
        raise InterfaceError("alpha_k needs r in [0, 1] and k >= 0")
    if r == 1.0:
        return float(k)
    return (1.0 - r ** k) / (1.0 - r)


# --- statistics built from families of V-chains

def _descending_profiles(b: PathBundle, top: int, lo: int, hi: int) -> List[np.ndarray]:
    """profiles[m][t] = Vminus over rows top-m..top on the window [lo, t]"""
    rows = _rows(b, range(top, 0, -1))[:, lo:hi + 1]
    return chain_profile(rows, maximize=False).values


def j_statistic(b: PathBundle, g: GeomWeightedPaths, i: int, window: Window = None) -> LppValue:
    """(v-u)^(-1/2) sup_{u <= s <= v} ( -Vminus_i(1,[u,s]) + W_i(s) - W_i(u)
                                         - sum_{j<i} r^(i-j) Vminus_(i-j+1)(j,[u,s]) )"""
    if i < 1:
        raise InterfaceError("i must be >= 1, got {}".format(i))
    lo, hi = window_indices(b.grid, window)
    if lo == hi:
        raise InterfaceError("the J statistic needs a window of positive length")
    profiles = _descending_profiles(b, i, lo, hi)

    def v_rows_from(j: int) -> np.ndarray:   # Vminus over rows j..i
        return profiles[i - j]

    w_row = g.row(i)[lo:hi + 1]
    objective = -v_rows_from(1) + (w_row - w_row[0])
    for j in range(1, i):
        objective = objective - g.r ** (i - j) * v_rows_from(j)
    k = int(np.argmax(objective))
    times = b.times
    length = times[hi] - times[lo]
    return LppValue(value=float(objective[k]) / math.sqrt(length), argchain=(float(times[lo + k]),), kind='J',
                    i=i, window=(float(times[lo]), float(times[hi])), arg_index=(lo + k,))


def suffix_v_minus(b: PathBundle, bottom: int, top: int, end: int) -> np.ndarray:
    """Vminus over rows bottom..top on the windows [t_s, t_end], for every s <= end

    Computed by the chain programme in reversed time.
    """
    rows = -_rows(b, range(bottom, top + 1))[:, end::-1]
    final = chain_profile(rows, maximize=False).values[-1]
    return final[::-1]


def r_star(g: GeomWeightedPaths, b: PathBundle, i: int, M: int, T: Optional[float] = None) -> LppValue:
    """sup_{0 <= s <= T} { W_K(T) - W_K(s) - sum_{j<K} r^(K-j) Vminus_(K-j+1)(j,[s,T]) },  K = i + M"""
    if i < 1 or M < 0:
        raise InterfaceError("r_star needs i >= 1 and M >= 0")
    top = i + M
    end = b.grid.n_steps if T is None else b.grid.index_of(T)
    w_row = g.row(top)[:end + 1]
    objective = w_row[end] - w_row
    for j in range(1, top):
        objective = objective - g.r ** (top - j) * suffix_v_minus(b, j, top, end)
    k = int(np.argmax(objective))
    return LppValue(value=float(objective[k]), argchain=(float(b.times[k]),), kind='Rstar', i=i, M=M,
                    window=(0.0, float(b.times[end])), arg_index=(k,))


def u_rows(i: int, j: int, M: int) -> List[int]:
    """Row sequence of the flattened chain: blocks k = i+M, ..., i, block k has rows k..k+j"""
    return [row for k in range(i + M, i - 1, -1) for row in range(k, k + j + 1)]


def u_functional(b: PathBundle, i: int, j: int, M: int, T: Optional[float] = None) -> LppValue:
    """sup over the flattened ascending chain 0 = t_0 <= ... <= t_m = T of
    sum_l B_l(t_(l-1)) - B_l(t_l), i.e. of the negated increments
    """
    if i < 1 or j < 0 or M < 0:
        raise InterfaceError("u_functional needs i >= 1, j >= 0, M >= 0")
    window = None if T is None else (0.0, T)
    return _chain_value(b, u_rows(i, j, M), window, True, 'U', i, M, sign=-1.0)


def i_star(sol: ParticleSolution, i: int, M: int, T: Optional[float] = None) -> float:
    """inf_{0 <= s <= T} X_(i+M)(s)"""
    if i < 1 or M < 0 or i + M > sol.N:
        raise InterfaceError("particle {} is out of range 1..{}".format(i + M, sol.N))
    end = sol.grid.n_steps if T is None else sol.grid.index_of(T)
    return float(np.min(sol.position(i + M)[:end + 1]))


# --- the partition pi* of the W_M(1, M) estimate

@dataclass(frozen=True)
class PiStarResult:
    partition: Tuple[float, ...]    # 0 = s_M <= s_(M-1) <= ... <= s_1 <= s_0 = M
    psi: np.ndarray                 # Psi_j = min(G_1j, G_2j), j = 1..M-1
    g1: np.ndarray
    g2: np.ndarray
    value: float                    # L(pi*)
    w_m_1: float                    # W_M(1)
    var_g1: np.ndarray
    var_g2: np.ndarray
    cov: np.ndarray
    a1_sq: np.ndarray
    a2_sq: np.ndarray
    expected_psi: np.ndarray


def pi_star_moments(r: float, M: int) -> Tuple[np.ndarray, ...]:
    """Variances, covariance, a_1j^2, a_2j^2 and E[Psi_j] for j = 1..M-1"""
    if r == 1.0:
        raise NotSupportedError("the moments of Psi_j assume p != q (r < 1)")
    j = np.arange(1, M)
    one = 1.0 - r * r
    var_g1 = (1.0 - r ** (2 * (M - j + 1))) / one
    var_g2 = (1.0 - r ** (2 * (M - j))) / one
    cov = r * (1.0 - r ** (2 * (M - j))) / one
    a1_sq = var_g1 - cov
    a2_sq = var_g2 - cov
    expected = -np.sqrt(a1_sq + a2_sq) / math.sqrt(2.0 * math.pi)
    return var_g1, var_g2, cov, a1_sq, a2_sq, expected


def pi_star_partition(b: PathBundle, M: int, r: float) -> PiStarResult:
    """The partition pi* of [0, M] choosing on [j, j+1] the smaller of two increments

    On A_j = {G_1j <= G_2j} the switch s*_(M-j) is j + 1, otherwise j.
    Needs a grid containing the integer times 0..M.
    """
    if r == 1.0:
        raise NotSupportedError("pi* is defined for p < q only (r < 1)")
    if M < 2:
        raise InterfaceError("pi* needs M >= 2")
    if b.grid.horizon < M:
        raise InterfaceError("pi* needs a horizon >= M = {}".format(M))
    g = w_paths(b, r, M)
    at = [b.grid.index_of(float(k)) for k in range(M + 1)]
    W = g.W_rows
    j = np.arange(1, M)
    g1 = np.array([W[M - k, at[k + 1]] - W[M - k, at[k]] for k in j])      # row M - j + 1
    g2 = np.array([W[M - k - 1, at[k + 1]] - W[M - k - 1, at[k]] for k in j])  # row M - j
    in_a = g1 <= g2
    switch = np.where(in_a, j + 1, j).astype(float)    # s*_(M-j)
    # partition listed from s_M = 0 up to s_0 = M
    partition = (0.0,) + tuple(switch) + (float(M),)
    psi = np.minimum(g1, g2)
    w_m_1 = float(W[M - 1, at[1]])
    var_g1, var_g2, cov, a1_sq, a2_sq, expected = pi_star_moments(r, M)
    # L(pi*) evaluated on the chain rows M, M-1, ..., 1
    breakpoints = [at[int(s)] for s in switch]
    value = chain_objective(W[::-1][:, :at[M] + 1], breakpoints)
    return PiStarResult(partition=partition, psi=psi, g1=g1, g2=g2, value=value, w_m_1=w_m_1,
                        var_g1=var_g1, var_g2=var_g2, cov=cov, a1_sq=a1_sq, a2_sq=a2_sq,
                        expected_psi=expected)


# --- batch evaluation

class LppRequest(NamedTuple):
    kind: str
    i: int
    M: int
    window: Window = None
    j: int = 0


def evaluate_batch(b: PathBundle, requests: Sequence[LppRequest], r: float = 0.0) -> List[LppValue]:
    """Evaluate a list of requests against one bundle"""
    g = None  # type: Optional[GeomWeightedPaths]
    out = []
    for req in requests:
        if req.kind in ('W', 'Wstar', 'J', 'Rstar') and (g is None or g.k_max < b.count):
            g = w_paths(b, r, b.count)
        if req.kind == 'Vminus':
            out.append(v_minus(b, req.i, req.M, req.window))
        elif req.kind == 'Vplus':
            out.append(v_plus(b, req.i, req.M, req.window))
        elif req.kind == 'W':
            assert g is not None
            out.append(w_functional(g, req.i, req.M, req.window))
        elif req.kind == 'Wstar':
            assert g is not None
            out.append(w_star(g, req.M))
        elif req.kind == 'J':
            assert g is not None
            out.append(j_statistic(b, g, req.i, req.window))
        elif req.kind == 'Rstar':
            assert g is not None
            T = None if req.window is None else req.window[1]
            out.append(r_star(g, b, req.i, req.M, T))
        elif req.kind == 'U':
            T = None if req.window is None else req.window[1]
            out.append(u_functional(b, req.i, req.j, req.M, T))
        elif req.kind == 'Istar':
            raise InterfaceError("Istar is a functional of a particle solution, use i_star")
        else:
            raise InterfaceError("unknown functional {!r}, expected one of {}".format(req.kind, LPP_KINDS))
    return out
