"""
Scenarios of the experiment harness.

A scenario computes one replica from (config, replica index, seed) and
reduces the results of all replicas to a summary table and a set of named
assertions. Replica functions are pure, so they can run in any order in
worker processes.
"""
import logging
import math
from dataclasses import replace
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from cbp.approx import build_approx, check_conditions, solve_p0_infinite
from cbp.chains import compare_rules, k_star, verify_decoupling
from cbp.exceptions import InterfaceError
from cbp.harness.config import CHECKS, LPP_REQUEST_KEYS, ExperimentConfig
from cbp.harness.stats import log_slope, summarize, wilson_interval
from cbp.lpp import (
    LppRequest, alpha_k, evaluate_batch, i_star, j_statistic, pi_star_partition, r_star, v_minus, v_plus,
    v_plus_profile, w_functional, w_paths, w_star)
from cbp.model import InitialConfig, PathBundle, SystemParams, replica_seed, sample_brownian
from cbp.rmt import ks_distance, sample_gue_lambda_max
from cbp.solver import ParticleSolution, Tolerances, driving_rows, solve, solve_finite, solve_p0, solve_p1

log = logging.getLogger(__name__)


class ReplicaResult(NamedTuple):
    index: int
    seed: int
    rows: List[List[Any]]
    values: Dict[str, Any]


class Summary(NamedTuple):
    header: List[str]
    rows: List[List[Any]]
    assertions: Dict[str, bool]


STATS_HEADER = ['quantity', 'n', 'mean', 'std_err', 'q05', 'q50', 'q95']


def stats_row(name: str, values: Sequence[float]) -> List[Any]:
    s = summarize(values)
    return [name, s.n, s.mean, s.std_err] + list(s.quantiles)


def tolerances(cfg: ExperimentConfig) -> Tolerances:
    return replace(Tolerances.from_settings(), **dict(cfg.tolerances))


def driving(cfg: ExperimentConfig, count: int, seed: int) -> PathBundle:
    """The driven rows V_1..V_count of the replica"""
    return driving_rows(sample_brownian(cfg.grid, count, seed), cfg.params, count)


class Scenario:
    name = ''
    header = []  # type: List[str]

    def header_for(self, cfg: ExperimentConfig) -> List[str]:
        # pylint:disable=unused-argument
        return ['replica', 'seed'] + self.header

    def replica(self, cfg: ExperimentConfig, index: int, seed: int) -> ReplicaResult:
        raise NotImplementedError

    def summarize(self, cfg: ExperimentConfig, results: List[ReplicaResult]) -> Summary:
        raise NotImplementedError

    def result(self, index: int, seed: int, rows: List[List[Any]], /, **values: Any) -> ReplicaResult:
        return ReplicaResult(index, seed, [[index, seed] + row for row in rows], values)


class Simulate(Scenario):
    name = 'simulate'

    def header_for(self, cfg: ExperimentConfig) -> List[str]:
        N = cfg.knob('N')
        return (['replica', 'seed', 'picard_iters', 'max_order_violation', 'max_identity_residual',
                 'max_complementarity', 'max_monotonicity_violation'] +
                ['x{}_T'.format(j) for j in range(1, N + 1)])

    def replica(self, cfg: ExperimentConfig, index: int, seed: int) -> ReplicaResult:
        N = cfg.knob('N')
        kwargs = {k: cfg.knob(k) for k in ('tol_picard', 'max_iter') if cfg.knob(k) is not None}
        sol = solve(sample_brownian(cfg.grid, N, seed), cfg.x0, cfg.params, N,
                    tolerances=tolerances(cfg), **kwargs)
        d = sol.diagnostics
        assert d is not None
        row = [d.picard_iters, d.max_order_violation, d.max_identity_residual, d.max_complementarity,
               d.max_monotonicity_violation] + list(sol.X[:, -1])
        return self.result(index, seed, [row], final=sol.X[:, -1].tolist(), converged=d.converged)

    def summarize(self, cfg: ExperimentConfig, results: List[ReplicaResult]) -> Summary:
        finals = np.array([r.values['final'] for r in results])
        rows = [stats_row('x{}_T'.format(j + 1), finals[:, j]) for j in range(finals.shape[1])]
        return Summary(STATS_HEADER, rows, {'converged': all(r.values['converged'] for r in results)})


# --- pathwise comparisons

ORACLE_TOLERANCE = 1e-10


def check_truncation(sol: ParticleSolution, V: PathBundle, x0: InitialConfig, params: SystemParams) -> float:
    """X_j^N <= X_j^M for M < N, j <= M"""
    worst = -math.inf
    for M in range(1, sol.N):
        small = solve(V, x0, params, M)
        worst = max(worst, float(np.max(sol.X[:M] - small.X)))
    return worst


def check_packed_bracket(sol: ParticleSolution, packed: ParticleSolution) -> float:
    """x_1 + X~_j <= X_j <= x_N + X~_j"""
    x = sol.x0
    return float(max(np.max(x[0] + packed.X - sol.X), np.max(sol.X - x[-1] - packed.X)))


def check_sandwich(packed: ParticleSolution, V: PathBundle) -> float:
    """Vminus_(N-i+1)(i, T) <= X~_i(T) <= Vplus_i(1, T)"""
    N = packed.N
    worst = -math.inf
    for i in range(1, N + 1):
        final = packed.X[i - 1, -1]
        worst = max(worst, v_minus(V, i, N - i + 1).value - final, final - v_plus(V, 1, i).value)
    return worst


def top_bound(V: PathBundle, r: float, M: int) -> float:
    """W_M(T) - sum_{j<M} r^(M-j) Vminus_(M-j+1)(j, T)"""
    g = w_paths(V, r, M)
    return float(g.row(M)[-1]) - sum(r ** (M - j) * v_minus(V, j, M - j + 1).value for j in range(1, M))


def check_packed_bounds(V: PathBundle, params: SystemParams, N: int, r: float) -> float:
    """The three upper bounds of the packed system with r = p / q"""
    pk = solve(V, InitialConfig.packed(), params.with_p(r / (1.0 + r)), N)
    g = w_paths(V, r, N)
    lowest = w_functional(g, 1, N).value / alpha_k(r, N)
    horizon = V.grid.horizon
    worst = float(np.min(pk.X[0])) - lowest
    worst = max(worst, float(pk.X[N - 1, -1]) - top_bound(V, r, N))
    for i in range(1, N + 1):
        bound = lowest + math.sqrt(horizon) * j_statistic(V, g, i).value
        worst = max(worst, float(np.min(pk.X[i - 1])) - bound)
    return worst


def check_upper_bound(sol: ParticleSolution, V: PathBundle) -> Optional[float]:
    """X_M(T) <= x_M + W_M(T) - sum_j r^(M-j) Vminus_(M-j+1)(j, T)"""
    r = sol.params.r
    if r is None or r > 1.0:
        return None
    return max(float(sol.X[M - 1, -1] - sol.x0[M - 1]) - top_bound(V, r, M) for M in range(1, sol.N + 1))


def check_rstar(sol: ParticleSolution, V: PathBundle) -> Optional[float]:
    """X_K(T) - inf_{s<=T} X_K(s) <= R*_(K-1)(1, T)"""
    r = sol.params.r
    if r is None or r >= 1.0:
        return None
    g = w_paths(V, r, sol.N)
    return max(float(sol.X[K - 1, -1]) - i_star(sol, 1, K - 1) - r_star(g, V, 1, K - 1).value
               for K in range(1, sol.N + 1))


def check_series(sol: ParticleSolution, V: PathBundle) -> Optional[float]:
    """sigma^k q L_(k,k+1)(t) <= sum_{j>k} sigma^j (Vplus_j(1, t) - V_j(t)) at every grid time"""
    sigma = sol.params.sigma
    if sigma is None:
        return None
    N = sol.N
    terms = np.array([sigma ** j * (v_plus_profile(V, 1, j) - V.row(j)) for j in range(1, N + 1)])
    tails = np.cumsum(terms[::-1], axis=0)[::-1]   # tails[k] = sum over j > k (0-based j = k+1..)
    worst = -math.inf
    for k in range(1, N):
        lhs = sigma ** k * sol.params.q * sol.local_time(k)
        worst = max(worst, float(np.max(lhs - tails[k])))
    return worst


def check_elementary_lpp(V: PathBundle, N: int) -> float:
    """|Vplus_j(1, T)| <= sum_{k<=j} 2 sup |V_k|"""
    sups = 2.0 * np.max(np.abs(V.values[:N]), axis=1)
    return max(abs(v_plus(V, 1, j).value) - float(np.sum(sups[:j])) for j in range(1, N + 1))


class Verify(Scenario):
    name = 'verify'
    header = ['check', 'violation']

    def checks(self, cfg: ExperimentConfig) -> Sequence[str]:
        return cfg.knob('checks') or CHECKS

    def replica(self, cfg: ExperimentConfig, index: int, seed: int) -> ReplicaResult:
        # pylint:disable=too-many-branches
        N = cfg.knob('N')
        V = driving(cfg, N, seed)
        params = cfg.params
        sol = solve(V, cfg.x0, params, N)
        packed = solve(V, InitialConfig.packed(), params, N)
        found = {}  # type: Dict[str, Optional[float]]
        for name in self.checks(cfg):
            if name == 'truncation':
                found[name] = check_truncation(sol, V, cfg.x0, params)
            elif name == 'packed_bracket':
                found[name] = check_packed_bracket(sol, packed)
            elif name == 'sandwich':
                found[name] = check_sandwich(packed, V)
            elif name == 'packed_bounds':
                found[name] = max(check_packed_bounds(V, params, N, r) for r in cfg.knob('r_values'))
            elif name == 'upper_bound':
                found[name] = check_upper_bound(sol, V)
            elif name == 'rstar':
                found[name] = check_rstar(sol, V)
            elif name == 'series':
                found[name] = check_series(sol, V)
            elif name == 'elementary_lpp':
                found[name] = check_elementary_lpp(V, N)
            elif name == 'p0_oracle':
                iterated = solve_finite(V, cfg.x0, params.with_p(0.0), N)
                found[name] = float(np.max(np.abs(iterated.X - solve_p0(V, cfg.x0, N, params).X)))
            elif name == 'p1_mirror':
                iterated = solve_finite(V, cfg.x0, params.with_p(1.0), N)
                found[name] = float(np.max(np.abs(iterated.X - solve_p1(V, cfg.x0, N, params).X)))
        rows = [[name, value] for name, value in found.items()]
        return self.result(index, seed, rows, violations=found)

    def summarize(self, cfg: ExperimentConfig, results: List[ReplicaResult]) -> Summary:
        tol = tolerances(cfg).order
        header = ['check', 'replicas', 'max_violation', 'failures']
        rows = []
        assertions = {}
        for name in self.checks(cfg):
            values = [r.values['violations'][name] for r in results if r.values['violations'].get(name) is not None]
            limit = ORACLE_TOLERANCE if name in ('p0_oracle', 'p1_mirror') else tol
            failures = sum(1 for v in values if v > limit)
            rows.append([name, len(values), max(values) if values else None, failures])
            assertions[name] = failures == 0
        return Summary(header, rows, assertions)


# --- last passage functionals

def request_rows(req: LppRequest) -> int:
    if req.kind == 'J':
        return req.i
    if req.kind == 'Wstar':
        return req.M
    if req.kind == 'Rstar':
        return req.i + req.M
    if req.kind == 'U':
        return req.i + req.M + req.j
    return req.i + req.M - 1


def parse_requests(raw: Sequence[Dict[str, Any]]) -> List[LppRequest]:
    out = []
    for item in raw:
        unknown = set(item) - LPP_REQUEST_KEYS
        if unknown:
            raise InterfaceError("unknown keys {} in an lpp request".format(sorted(unknown)))
        window = (float(item['u']), float(item['v'])) if 'u' in item or 'v' in item else None
        out.append(LppRequest(item['kind'], int(item.get('i', 1)), int(item.get('M', 1)), window,
                              int(item.get('j', 0))))
    return out


class Lpp(Scenario):
    name = 'lpp'
    header = ['kind', 'i', 'M', 'u', 'v', 'value', 'argchain']

    def r(self, cfg: ExperimentConfig) -> float:
        r = cfg.knob('r')
        if r is None:
            r = cfg.params.r if cfg.params.r is not None else 0.0
        return float(r)

    def replica(self, cfg: ExperimentConfig, index: int, seed: int) -> ReplicaResult:
        requests = parse_requests(cfg.knob('requests'))
        if not requests:
            raise InterfaceError("the lpp scenario needs at least one request")
        V = driving(cfg, max(request_rows(req) for req in requests), seed)
        values = evaluate_batch(V, requests, self.r(cfg))
        rows = [[v.kind, v.i, v.M, v.window[0], v.window[1], v.value, ' '.join(repr(t) for t in v.argchain)]
                for v in values]
        return self.result(index, seed, rows, values=[v.value for v in values])

    def summarize(self, cfg: ExperimentConfig, results: List[ReplicaResult]) -> Summary:
        requests = parse_requests(cfg.knob('requests'))
        table = np.array([r.values['values'] for r in results])
        rows = [stats_row('{}(i={},M={},j={})'.format(req.kind, req.i, req.M, req.j), table[:, k])
                for k, req in enumerate(requests)]
        return Summary(STATS_HEADER, rows, {})


# --- GUE

class Gue(Scenario):
    name = 'gue'
    header = ['M', 'T', 'lambda_max', 'residual', 'sweeps', 'vplus']

    def replica(self, cfg: ExperimentConfig, index: int, seed: int) -> ReplicaResult:
        M = cfg.knob('M')
        sample = sample_gue_lambda_max(M, cfg.T, seed, cfg.knob('gue_convention'))
        vplus = None
        if cfg.knob('compare_lpp'):
            B = sample_brownian(cfg.grid, M, replica_seed(seed, 1))
            vplus = v_plus(B, 1, M).value
        row = [M, cfg.T, sample.lambda_max, sample.residual, sample.sweeps, vplus]
        return self.result(index, seed, [row], lambda_max=sample.lambda_max, vplus=vplus)

    def summarize(self, cfg: ExperimentConfig, results: List[ReplicaResult]) -> Summary:
        lambdas = [r.values['lambda_max'] for r in results]
        rows = [stats_row('lambda_max', lambdas)]
        assertions = {}
        if cfg.knob('compare_lpp'):
            vplus = [r.values['vplus'] for r in results]
            rows.append(stats_row('vplus', vplus))
            distance = ks_distance(lambdas, vplus)
            p_value = float(stats.ks_2samp(lambdas, vplus).pvalue)
            rows.append(['ks_distance', len(lambdas), distance, None, None, None, None])
            rows.append(['ks_pvalue', len(lambdas), p_value, None, None, None, None])
            assertions['ks_distance'] = distance < cfg.knob('ks_max')
        return Summary(STATS_HEADER, rows, assertions)


# --- collision chains

class Kstar(Scenario):
    name = 'kstar'
    header = ['i', 'u', 'v', 'k_star', 'censored', 'k_star_gap_eps', 'decoupling_deviation']

    def windows(self, cfg: ExperimentConfig) -> List[Tuple[float, float]]:
        return [(float(u), float(v)) for u, v in (cfg.knob('windows') or [(0.0, cfg.T)])]

    def replica(self, cfg: ExperimentConfig, index: int, seed: int) -> ReplicaResult:
        N, i = cfg.knob('N'), cfg.knob('i')
        sol = solve(sample_brownian(cfg.grid, N, seed), cfg.x0, cfg.params, N, tolerances=tolerances(cfg))
        rows = []
        for window in self.windows(cfg):
            if cfg.knob('rule') == 'gap_eps':
                chain = k_star(sol, i, window, 'gap_eps', cfg.knob('eps'))
                other = None
            else:
                chain, by_gap = compare_rules(sol, i, window, cfg.knob('eps'))
                other = by_gap.k_star
            rows.append([i, chain.window[0], chain.window[1], chain.k_star, chain.censored, other, None])
        matched = None
        if cfg.knob('decoupling'):
            report = verify_decoupling(sol, i, cfg.T, tolerances(cfg))
            matched = report.matched
            rows.append([i, 0.0, cfg.T, report.k_star, report.censored, None, report.max_deviation])
        return self.result(index, seed, rows, k_star=[row[3] for row in rows], censored=[row[4] for row in rows],
                           matched=matched)

    def summarize(self, cfg: ExperimentConfig, results: List[ReplicaResult]) -> Summary:
        rows = []
        for k, window in enumerate(self.windows(cfg)):
            values = [r.values['k_star'][k] for r in results if not r.values['censored'][k]]
            censored = sum(1 for r in results if r.values['censored'][k])
            name = 'k_star[{},{}]'.format(*window)
            rows.append(stats_row(name, values) if values else [name, 0, None, None, None, None, None])
            rows.append(['censored[{},{}]'.format(*window), len(results), censored / len(results),
                         None, None, None, None])
        assertions = {}
        if cfg.knob('decoupling'):
            assertions['decoupling'] = all(r.values['matched'] is not False for r in results)
        return Summary(STATS_HEADER, rows, assertions)


# --- approximative versions

def non_increasing(values: Sequence[float], slack: float = 1e-12) -> bool:
    return all(b <= a + slack for a, b in zip(values, values[1:]))


class Approx(Scenario):
    name = 'approx'
    header = ['record', 'j', 'M', 'value']

    def replica(self, cfg: ExperimentConfig, index: int, seed: int) -> ReplicaResult:
        sizes = cfg.knob('sizes')
        bundle = sample_brownian(cfg.grid, sizes[-1], seed)
        av = build_approx(bundle, cfg.x0, cfg.params, sizes, cfg.knob('j_max'), cfg.knob('tol_approx'),
                          tolerances(cfg))
        report = check_conditions(av)
        rows = []  # type: List[List[Any]]
        for j, gaps in enumerate(av.sup_gaps, start=1):
            rows.extend(['sup_gap', j, M, gap] for M, gap in zip(sizes, gaps))
        rows.extend(['c2a', None, M, value] for M, value in report.c2a_profile.items())
        if report.c2b_profile is not None:
            rows.extend(['c2b', None, M, value] for M, value in report.c2b_profile.items())
        rows.extend(['growth', None, M, value] for M, value in report.growth_liminf.items())
        rows.extend(['scon', None, M, value] for M, value in report.scon_profile.items())
        values = {
            'gaps_monotone': all(non_increasing(row) for row in av.sup_gaps),
            'c2b_decreasing': report.flags['c2b_decreasing'],
            'p0_deviation': None,
            'tol_approx': av.tol_approx,
        }  # type: Dict[str, Any]
        if cfg.knob('p0_crosscheck') and cfg.params.p == 0.0:
            k_max = cfg.knob('k_max') or 2 * sizes[-1]
            infinite = solve_p0_infinite(bundle, cfg.x0, av.j_max, k_max, cfg.params)
            deviation = np.max(np.abs(infinite.X - av.trajectories), axis=1)
            rows.extend(['p0_deviation', j, infinite.k_max, value] for j, value in enumerate(deviation, start=1))
            values['p0_deviation'] = float(np.max(deviation))
            values['p0_below'] = bool(np.all(infinite.X <= av.trajectories + tolerances(cfg).order))
        return self.result(index, seed, rows, **values)

    def summarize(self, cfg: ExperimentConfig, results: List[ReplicaResult]) -> Summary:
        header = ['quantity', 'replicas', 'passed']
        rows = [['gaps_monotone', len(results), sum(r.values['gaps_monotone'] for r in results)]]
        assertions = {}
        if cfg.knob('assert_trends'):
            assertions['gaps_monotone'] = all(r.values['gaps_monotone'] for r in results)
            if cfg.params.p > cfg.params.q:
                rows.append(['c2b_decreasing', len(results), sum(r.values['c2b_decreasing'] for r in results)])
                assertions['c2b_decreasing'] = all(r.values['c2b_decreasing'] for r in results)
        crosschecked = [r for r in results if r.values['p0_deviation'] is not None]
        if crosschecked:
            within = sum(r.values['p0_deviation'] <= r.values['tol_approx'] for r in crosschecked)
            rows.append(['p0_crosscheck', len(crosschecked), within])
            assertions['p0_crosscheck'] = within == len(crosschecked)
            assertions['p0_below'] = all(r.values['p0_below'] for r in crosschecked)
        return Summary(header, rows, assertions)


# --- tail bounds

class Tailbounds(Scenario):
    name = 'tailbounds'
    header = ['statistic', 'M', 'value']

    def replica(self, cfg: ExperimentConfig, index: int, seed: int) -> ReplicaResult:
        M_list = cfg.knob('M_list')
        rstar_M = cfg.knob('rstar_M')
        p, q = cfg.params.p, cfg.params.q
        V = driving(cfg, max(max(M_list), rstar_M + 1), seed)
        T = cfg.T
        rows = []  # type: List[List[Any]]
        g = w_paths(V, p / q, V.count) if p < q else None
        for M in M_list:
            rows.append(['vplus_deviation', M, abs(v_plus(V, 1, M).value / math.sqrt(M * T) - 2.0)])
            if cfg.knob('delta') is not None and g is not None:
                rows.append(['w_scaled', M, w_functional(g, 1, M).value / math.sqrt(M * T)])
        if g is not None:
            rows.append(['rstar', rstar_M, r_star(g, V, 1, rstar_M).value])
        return self.result(index, seed, rows, rows=[row[:] for row in rows])

    def summarize(self, cfg: ExperimentConfig, results: List[ReplicaResult]) -> Summary:
        # pylint:disable=too-many-locals
        header = ['statistic', 'M', 'threshold', 'p_hat', 'wilson_low', 'wilson_high']
        n = len(results)
        by_key = {}  # type: Dict[Tuple[str, int], List[float]]
        for r in results:
            for stat, M, value in r.values['rows']:
                by_key.setdefault((stat, M), []).append(value)
        rows = []
        assertions = {}

        def add(stat: str, M: int, threshold: float, hits: int) -> Tuple[float, float, float]:
            low, high = wilson_interval(hits, n)
            rows.append([stat, M, threshold, hits / n, low, high])
            return hits / n, low, high

        alpha = cfg.knob('alpha')
        p_hats = [add('vplus_deviation', M, alpha, sum(v >= alpha for v in by_key[('vplus_deviation', M)]))[0]
                  for M in cfg.knob('M_list')]
        assertions['vplus_decreasing'] = all(b < a for a, b in zip(p_hats, p_hats[1:]))
        delta = cfg.knob('delta')
        if delta is not None:
            events = [add('w_scaled', M, -delta, sum(v >= -delta for v in by_key[('w_scaled', M)]))
                      for M in cfg.knob('M_list')]
            assertions['w_decreasing'] = (all(b[0] <= a[0] for a, b in zip(events, events[1:])) and
                                          events[-1][2] < events[0][1])
        rstar_values = by_key.get(('rstar', cfg.knob('rstar_M')))
        if rstar_values:
            alphas = cfg.knob('rstar_alphas')
            exceed = [add('rstar', cfg.knob('rstar_M'), a, sum(v >= a for v in rstar_values))[0] for a in alphas]
            slope = log_slope(alphas, exceed)
            rows.append(['rstar_log_slope', cfg.knob('rstar_M'), None, slope, None, None])
            assertions['rstar_slope'] = not math.isnan(slope) and slope <= cfg.knob('max_slope')
        return Summary(header, rows, assertions)


# --- pi* and Psi_j

class Psi(Scenario):
    name = 'psi'
    header = ['record', 'j', 'value']

    def replica(self, cfg: ExperimentConfig, index: int, seed: int) -> ReplicaResult:
        M = cfg.knob('M')
        r = cfg.params.p / cfg.params.q
        V = driving(cfg, M, seed)
        result = pi_star_partition(V, M, r)
        optimum = w_star(w_paths(V, r, M), M).value
        rows = [['psi', j, value] for j, value in enumerate(result.psi, start=1)]
        rows += [['L_pi_star', None, result.value], ['W_star', None, optimum]]
        return self.result(index, seed, rows, psi=result.psi.tolist(), expected=result.expected_psi.tolist(),
                           L=result.value, W=optimum)

    def summarize(self, cfg: ExperimentConfig, results: List[ReplicaResult]) -> Summary:
        header = ['quantity', 'n', 'mean', 'std_err', 'expected', 'z_score']
        psi = np.array([r.values['psi'] for r in results])
        expected = results[0].values['expected']
        rows = []
        within = True
        for j in range(psi.shape[1]):
            s = summarize(psi[:, j])
            z = (s.mean - expected[j]) / s.std_err if s.std_err > 0 else math.inf
            within = within and abs(z) <= cfg.knob('sigma_limit')
            rows.append(['psi_{}'.format(j + 1), s.n, s.mean, s.std_err, expected[j], z])
        L = summarize([r.values['L'] for r in results])
        W = summarize([r.values['W'] for r in results])
        rows.append(['L_pi_star', L.n, L.mean, L.std_err, None, None])
        rows.append(['W_star', W.n, W.mean, W.std_err, None, None])
        return Summary(header, rows, {'psi_moments': within, 'upper_bound': W.mean <= L.mean})


REGISTRY = {cls.name: cls() for cls in (Simulate, Verify, Lpp, Gue, Kstar, Approx, Tailbounds, Psi)}
