"""
Collision chains and the decoupling of the lowest particles.

A collision chain of length k from particle i in the window [u, v] is a
sequence of times u <= s_(i+k-1) <= ... <= s_i <= v at which the pairs
(j, j+1) collide. K*(i, [u, v]) is the maximal length; when it is finite the
first i particles coincide with those of the (i + K*)-particle truncation.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from cbp.exceptions import InterfaceError, warn_sim
from cbp.lpp import Window, window_indices
from cbp.model import InitialConfig
from cbp.solver import ParticleSolution, Tolerances, solve

log = logging.getLogger(__name__)

LOCAL_TIME_INC = 'local_time_inc'
GAP_EPS = 'gap_eps'
RULES = (LOCAL_TIME_INC, GAP_EPS)


@dataclass(frozen=True)
class CollisionChainReport:
    """K*(i, [u, v]) with the greedy chain, listed from s_(i+k-1) up to s_i"""
    i: int
    window: Tuple[float, float]
    k_star: int
    chain_times: Tuple[float, ...]
    censored: bool
    detection_rule: str
    chain_index: Tuple[int, ...] = field(default=(), compare=False)


def collision_hits(sol: ParticleSolution, rule: str = LOCAL_TIME_INC, eps: Optional[float] = None) -> np.ndarray:
    """Boolean (N-1) x (n+1) array: pair (j, j+1) collides at grid time t_k

    local_time_inc: L_(j,j+1) increases on the step closing at t_k
    gap_eps:        X_(j+1)(t_k) - X_j(t_k) <= eps
    """
    if rule == LOCAL_TIME_INC:
        hits = np.zeros(sol.L.shape, dtype=bool)
        hits[:, 1:] = np.diff(sol.L, axis=1) > 0.0
        return hits
    if rule == GAP_EPS:
        if eps is None or not eps > 0:
            raise InterfaceError("the gap_eps rule needs eps > 0, got {!r}".format(eps))
        return sol.gaps() <= eps
    raise InterfaceError("unknown detection rule {!r}, expected one of {}".format(rule, RULES))


def _next_hit(hits: np.ndarray) -> np.ndarray:
    """next[j, k] = the first index >= k with a hit in row j, or n+1"""
    n1 = hits.shape[1]
    marks = np.where(hits, np.arange(n1), n1)
    return np.minimum.accumulate(marks[:, ::-1], axis=1)[:, ::-1]


def k_star(sol: ParticleSolution, i: int, window: Window = None, rule: str = LOCAL_TIME_INC,
           eps: Optional[float] = None) -> CollisionChainReport:
    """Greedy collision chain: for each length k the chain starts with pair i+k-1
    at u, and every lower pair takes its first collision not before the pair
    above it. A chain of length k exists iff the greedy one ends <= v, and
    feasibility is monotone in k.
    """
    if not 1 <= i <= sol.N:
        raise InterfaceError("particle {} is out of range 1..{}".format(i, sol.N))
    lo, hi = window_indices(sol.grid, window)
    nxt = _next_hit(collision_hits(sol, rule, eps))
    best = ()  # type: Tuple[int, ...]
    censored = False
    k = 1
    while True:
        top = i + k - 1
        if top > sol.N - 1:
            censored = True
            break
        s = lo
        chain = []
        for j in range(top, i - 1, -1):
            s = int(nxt[j - 1, s])
            if s > hi:
                break
            chain.append(s)
        if len(chain) < k:
            break
        best = tuple(chain)
        k += 1
    times = sol.grid.times
    report = CollisionChainReport(i=i, window=(float(times[lo]), float(times[hi])), k_star=len(best),
                                  chain_times=tuple(float(times[s]) for s in best), censored=censored,
                                  detection_rule=rule, chain_index=best)
    log.debug("K*(%d, [%s, %s]) = %d%s", i, report.window[0], report.window[1], report.k_star,
              " (censored)" if censored else "")
    return report


def compare_rules(sol: ParticleSolution, i: int, window: Window = None,
                  eps: float = 1e-7) -> Tuple[CollisionChainReport, CollisionChainReport]:
    """K* by both detection rules; a discrepancy is a grid-resolution warning"""
    by_local_time = k_star(sol, i, window, LOCAL_TIME_INC)
    by_gap = k_star(sol, i, window, GAP_EPS, eps)
    if by_local_time.k_star != by_gap.k_star:
        warn_sim(["collision rules disagree on K*({}, {})".format(i, by_local_time.window),
                  "local_time_inc: {}, gap_eps({}): {}".format(by_local_time.k_star, eps, by_gap.k_star)])
    return by_local_time, by_gap


@dataclass(frozen=True)
class DecouplingReport:
    i: int
    horizon: float
    k_star: int
    censored: bool
    max_deviation: Optional[float]
    matched: Optional[bool]   # None when inconclusive

    @property
    def inconclusive(self) -> bool:
        return self.censored


def verify_decoupling(big: ParticleSolution, i: int, T: Optional[float] = None,
                      tolerances: Optional[Tolerances] = None) -> DecouplingReport:
    """Re-solve the (i + K*)-particle truncation and compare the first i rows"""
    tolerances = tolerances or Tolerances.from_settings()
    T = big.grid.horizon if T is None else T
    chain = k_star(big, i, (0.0, T))
    if chain.censored:
        log.info("decoupling of particle %d is inconclusive: K* is censored at N=%d", i, big.N)
        return DecouplingReport(i, T, chain.k_star, True, None, None)
    size = i + chain.k_star
    small = solve(big.driving, InitialConfig.from_values(big.x0[:size]), big.params, size)
    end = big.grid.index_of(T)
    deviation = float(np.max(np.abs(big.X[:i, :end + 1] - small.X[:i, :end + 1])))
    return DecouplingReport(i, T, chain.k_star, False, deviation, deviation <= tolerances.identity)
