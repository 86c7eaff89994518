"""
Parameters, time grids, driving paths and initial configurations.

All objects are immutable after construction; numpy arrays are stored
read-only so that they can be shared by threads and worker processes.
Paths are piecewise linear between grid points.

Indices of particles are 1-based in the public API (row j of a bundle is
B_j), as in the mathematical notation. Array rows are 0-based internally.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from cbp.exceptions import DataError, InterfaceError

log = logging.getLogger(__name__)

KINDS = ('brownian', 'driven', 'deterministic')
RAW = 'raw'
RECENTRED = 'recentred'


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


# --- SystemParams

@dataclass(frozen=True)
class SystemParams:
    """Collision parameter p and the drift sequence g_1, g_2, ...

    The drifts are a finite prefix `drifts` followed by the constant
    `drift_tail` for all later indices.
    """
    p: float
    drifts: Tuple[float, ...] = ()
    drift_tail: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise InterfaceError("collision parameter p={!r} is outside [0, 1]".format(self.p))
        object.__setattr__(self, 'drifts', tuple(float(x) for x in self.drifts))

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def r(self) -> Optional[float]:
        """r = p / q, undefined for q = 0"""
        return self.p / self.q if self.q > 0 else None

    @property
    def sigma(self) -> Optional[float]:
        """sigma = q / p, undefined for p = 0"""
        return self.q / self.p if self.p > 0 else None

    def drift(self, j: int) -> float:
        if j < 1:
            raise InterfaceError("particle index must be >= 1, got {}".format(j))
        if j <= len(self.drifts):
            return self.drifts[j - 1]
        return self.drift_tail

    def drift_vector(self, count: int) -> np.ndarray:
        return np.array([self.drift(j) for j in range(1, count + 1)], dtype=float)

    @property
    def drift_sup(self) -> float:
        """|g|_inf of the whole sequence"""
        return max([abs(self.drift_tail)] + [abs(x) for x in self.drifts])

    @property
    def drift_square_sum(self) -> float:
        """sum of g_j^2 of the whole sequence (infinite for a non-zero tail)"""
        if self.drift_tail != 0.0:
            return math.inf
        return float(sum(x * x for x in self.drifts))

    def with_p(self, p: float) -> 'SystemParams':
        return SystemParams(p=p, drifts=self.drifts, drift_tail=self.drift_tail)


# --- TimeGrid

class TimeGrid:
    """Strictly increasing times 0 = t_0 < ... < t_n = T"""

    def __init__(self, times: Sequence[float]) -> None:
        times_ = np.asarray(times, dtype=float)
        if times_.ndim != 1 or len(times_) < 2:
            raise InterfaceError("a time grid needs at least two times")
        if times_[0] != 0.0:
            raise InterfaceError("a time grid must start at 0, got {}".format(times_[0]))
        if not np.all(np.diff(times_) > 0):
            raise InterfaceError("grid times must be strictly increasing")
        self.times = _frozen(times_)

    @classmethod
    def uniform(cls, horizon: float, n_steps: int) -> 'TimeGrid':
        if not horizon > 0:
            raise InterfaceError("horizon must be positive, got {}".format(horizon))
        if n_steps < 1:
            raise InterfaceError("n_steps must be a positive integer, got {}".format(n_steps))
        return cls(np.linspace(0.0, horizon, n_steps + 1))

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    def index_of(self, t: float) -> int:
        """Index of a grid time. Times between grid points are refused."""
        k = int(np.searchsorted(self.times, t))
        atol = 1e-12 * max(1.0, self.horizon)
        for candidate in (k - 1, k):
            if 0 <= candidate < len(self.times) and abs(self.times[candidate] - t) <= atol:
                return candidate
        raise InterfaceError("time {!r} is not a grid point".format(t))

    def suffix(self, k: int) -> 'TimeGrid':
        """The grid of times t_k, ..., t_n shifted to start at 0"""
        if not 0 <= k < self.n_steps:
            raise InterfaceError("suffix start {} leaves no grid step".format(k))
        return TimeGrid(self.times[k:] - self.times[k])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TimeGrid) and np.array_equal(self.times, other.times)

    def __repr__(self) -> str:
        return 'TimeGrid(T={}, n_steps={})'.format(self.horizon, self.n_steps)


# --- PathBundle

class PathBundle:
    """Samples of paths B_j (or V_j) at the grid times, one row per particle

    kind: 'brownian', 'driven' (drift added) or 'deterministic'
    seed: the seed of sample_brownian, None for deterministic paths
    """

    def __init__(self, grid: TimeGrid, values: np.ndarray, kind: str,
                 seed: Optional[int] = None) -> None:
        values = np.atleast_2d(np.asarray(values, dtype=float))
        if kind not in KINDS:
            raise InterfaceError("unknown path kind {!r}".format(kind))
        if values.shape[0] < 1 or values.shape[1] != len(grid.times):
            raise DataError("path array shape {} does not match {} rows x {} grid times".format(
                values.shape, values.shape[0], len(grid.times)))
        if kind == 'brownian' and np.any(values[:, 0] != 0.0):
            raise DataError("Brownian paths must start at 0")
        self.grid = grid
        self.values = _frozen(values)
        self.kind = kind
        self.seed = seed if kind != 'deterministic' else None

    @classmethod
    def deterministic(cls, grid: TimeGrid, rows: Sequence[Sequence[float]]) -> 'PathBundle':
        return cls(grid, np.asarray(rows, dtype=float), 'deterministic')

    @classmethod
    def from_functions(cls, grid: TimeGrid, functions: Sequence) -> 'PathBundle':  # type: ignore[type-arg]
        """Deterministic paths sampled from callables f(t) at the grid times"""
        return cls(grid, np.array([[f(t) for t in grid.times] for f in functions]), 'deterministic')

    @property
    def count(self) -> int:
        return self.values.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def row(self, j: int) -> np.ndarray:
        """Path of the particle j (1-based)"""
        self.require_rows(j)
        return self.values[j - 1]

    def require_rows(self, last: int) -> None:
        if last > self.count:
            raise InterfaceError("rows up to {} are needed, the bundle has only {}".format(last, self.count))

    def take(self, count: int) -> 'PathBundle':
        self.require_rows(count)
        return PathBundle(self.grid, self.values[:count], self.kind, self.seed)

    def with_values(self, values: np.ndarray, kind: Optional[str] = None) -> 'PathBundle':
        kind = kind or self.kind
        if kind == 'brownian' and np.any(np.asarray(values)[:, 0] != 0.0):
            kind = 'driven'
        return PathBundle(self.grid, values, kind, self.seed)

    def negated(self) -> 'PathBundle':
        return self.with_values(-self.values)

    def mirrored(self) -> 'PathBundle':
        """Negated paths in reversed particle order (row j <-> row N + 1 - j)"""
        return self.with_values(-self.values[::-1])

    def scaled(self, factor: float) -> 'PathBundle':
        return self.with_values(factor * self.values)

    def __repr__(self) -> str:
        return 'PathBundle(kind={!r}, count={}, {!r}, seed={!r})'.format(
            self.kind, self.count, self.grid, self.seed)


# --- InitialConfig

@dataclass(frozen=True)
class InitialConfig:
    """Non-decreasing initial positions x_1 <= x_2 <= ...

    A finite `prefix` and a tail rule for k > len(prefix):
        tail='constant': x_k = the last prefix value (or `b` for an empty prefix)
        tail='power':    x_k = a * k**chi + b
    """
    prefix: Tuple[float, ...] = ()
    tail: str = 'constant'
    a: float = 0.0
    chi: float = 1.0
    b: float = 0.0
    label: str = field(default='', compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'prefix', tuple(float(x) for x in self.prefix))
        if self.tail not in ('constant', 'power'):
            raise InterfaceError("unknown tail rule {!r}".format(self.tail))
        if self.tail == 'power' and (self.a < 0 or self.chi < 0):
            raise InterfaceError("a power tail needs a >= 0 and chi >= 0 to be non-decreasing")
        check = list(self.prefix) + [self.x(len(self.prefix) + 1), self.x(len(self.prefix) + 2)]
        if any(later < earlier for earlier, later in zip(check, check[1:])):
            raise InterfaceError("initial positions are not non-decreasing: {}".format(check))

    @classmethod
    def packed(cls) -> 'InitialConfig':
        return cls(tail='constant', b=0.0, label='packed')

    @classmethod
    def power(cls, a: float, chi: float, b: float = 0.0) -> 'InitialConfig':
        """x_k = a * k**chi + b"""
        return cls(tail='power', a=a, chi=chi, b=b, label='power')

    @classmethod
    def spread(cls, spacing: float) -> 'InitialConfig':
        """x_k = spacing * k"""
        return cls.power(spacing, 1.0)

    @classmethod
    def from_values(cls, values: Sequence[float]) -> 'InitialConfig':
        """A finite configuration, continued by its last value"""
        return cls(prefix=tuple(values), tail='constant', label='values')

    @classmethod
    def half_poisson(cls, count: int, seed: int) -> 'InitialConfig':
        """x_0 = 0 and i.i.d. Exponential(1) gaps, sampled for `count` particles

        Later particles continue with unit spacing (the mean gap).
        """
        rng = Generator(Philox(seed))
        values = np.cumsum(rng.exponential(1.0, size=count))
        return cls(prefix=tuple(values), tail='power', a=1.0, chi=1.0,
                   b=float(values[-1]) - count, label='half_poisson')

    def x(self, k: int) -> float:
        if k < 1:
            raise InterfaceError("particle index must be >= 1, got {}".format(k))
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        if self.tail == 'power':
            return self.a * k ** self.chi + self.b
        return self.prefix[-1] if self.prefix else self.b

    def first(self, count: int) -> np.ndarray:
        """Positions x_1, ..., x_count"""
        return np.array([self.x(k) for k in range(1, count + 1)], dtype=float)

    def mirrored(self, count: int) -> 'InitialConfig':
        """-x_count, ..., -x_1, the initial data of the mirror system"""
        return InitialConfig.from_values(-self.first(count)[::-1])

    @property
    def is_admissible(self) -> bool:
        """Tail grows at least like k**chi with chi > 1/2"""
        return self.tail == 'power' and self.a > 0 and self.chi > 0.5


# --- operations

def replica_seed(base_seed: int, replica: int) -> int:
    """A 64-bit seed of the replica, derived by numpy.random.SeedSequence"""
    state = SeedSequence(entropy=int(base_seed), spawn_key=(int(replica),)).generate_state(1, np.uint64)
    return int(state[0])


def sample_brownian(grid: TimeGrid, count: int, seed: int) -> PathBundle:
    """Independent standard Brownian motions B_1..B_count sampled at grid times

    A deterministic function of (grid, count, seed); the stream is Philox.
    """
    if count < 1:
        raise InterfaceError("at least one path is required, got {}".format(count))
    rng = Generator(Philox(int(seed)))
    steps = np.sqrt(np.diff(grid.times))
    increments = rng.standard_normal((count, grid.n_steps)) * steps
    values = np.zeros((count, grid.n_steps + 1))
    np.cumsum(increments, axis=1, out=values[:, 1:])
    return PathBundle(grid, values, 'brownian', int(seed))


def drift_apply(bundle: PathBundle, params: SystemParams) -> PathBundle:
    """V_j(t) = g_j t + B_j(t) at every grid time

    Only raw Brownian or deterministic bundles take a drift; a driven bundle
    already carries one.
    """
    if bundle.kind not in ('brownian', 'deterministic'):
        raise InterfaceError("drift is added to brownian or deterministic paths, not {!r}".format(bundle.kind))
    drifts = params.drift_vector(bundle.count)
    values = bundle.values + np.outer(drifts, bundle.times)
    return PathBundle(bundle.grid, values, 'driven', bundle.seed)


def translate_path(bundle: PathBundle, t0: float, mode: str = RECENTRED) -> PathBundle:
    """Time translation of all paths to start at the grid time t0

    raw:       s -> w(t0 + s)
    recentred: s -> w(t0 + s) - w(t0)

    t0 must lie before the horizon: a translated bundle keeps at least one
    grid step, so t0 = T is refused.
    """
    if mode not in (RAW, RECENTRED):
        raise InterfaceError("unknown translation mode {!r}".format(mode))
    k = bundle.grid.index_of(t0)
    if k == 0:
        return bundle
    if k == bundle.grid.n_steps:
        raise InterfaceError("translation to the horizon {} leaves no grid step".format(t0))
    values = bundle.values[:, k:]
    if mode == RECENTRED:
        values = values - values[:, :1]
    kind = bundle.kind if mode == RECENTRED or bundle.kind == 'deterministic' else 'driven'
    return PathBundle(bundle.grid.suffix(k), values, kind, bundle.seed)
