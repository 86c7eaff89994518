"""
Experiment configuration: JSON documents validated before any computation.

Top-level keys are common to all scenarios; the remaining keys are knobs of
the scenario and are checked against its list. Unknown keys are rejected.
The schema is documented in docs/formats.rst.
"""
import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Mapping, Optional, Tuple

from cbp.exceptions import InterfaceError, NotSupportedError
from cbp.lpp import LPP_KINDS
from cbp.model import InitialConfig, SystemParams, TimeGrid

SCENARIOS = ('simulate', 'lpp', 'gue', 'verify', 'kstar', 'approx', 'tailbounds', 'psi')

COMMON_KEYS = {'scenario', 'p', 'drifts', 'drift_tail', 'x0_rule', 'T', 'n_steps', 'replicas',
               'base_seed', 'output_dir', 'failure_cap', 'max_workers', 'tolerances'}

# knob name -> default, per scenario
SCENARIO_KNOBS = {
    'simulate': {'N': 4, 'tol_picard': None, 'max_iter': None},
    'verify': {'N': 6, 'checks': None, 'r_values': [0.0, 0.25, 0.5, 1.0]},
    'lpp': {'requests': [], 'r': None},
    'gue': {'M': 2, 'gue_convention': None, 'compare_lpp': False, 'ks_max': 0.06},
    'kstar': {'N': 12, 'i': 3, 'windows': None, 'rule': 'local_time_inc', 'eps': 1e-7,
              'decoupling': True},
    'approx': {'sizes': [4, 8, 16, 32, 64], 'j_max': 3, 'tol_approx': None, 'p0_crosscheck': False,
               'k_max': None, 'assert_trends': True},
    'tailbounds': {'M_list': [4, 8, 16, 32], 'alpha': 0.5, 'delta': None, 'rstar_M': 4,
                   'rstar_alphas': [2.0, 3.0, 4.0, 5.0, 6.0], 'max_slope': -0.5},
    'psi': {'M': 6, 'sigma_limit': 3.0},
}  # type: Dict[str, Dict[str, Any]]

# pathwise comparisons of the verify scenario
CHECKS = ('truncation', 'packed_bracket', 'sandwich', 'packed_bounds', 'upper_bound', 'rstar', 'series',
          'elementary_lpp', 'p0_oracle', 'p1_mirror')
LPP_REQUEST_KEYS = {'kind', 'i', 'M', 'u', 'v', 'j'}
TOLERANCE_KEYS = {'order', 'identity', 'complementarity'}
X0_KINDS = {'packed': set(), 'power': {'a', 'chi', 'b'}, 'spread': {'spacing'}, 'values': {'values'},
            'half_poisson': {'count', 'seed'}}


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    params: SystemParams
    x0: InitialConfig
    T: float = 1.0
    n_steps: int = 512
    replicas: int = 1
    base_seed: int = 0
    output_dir: str = '.'
    failure_cap: Optional[float] = None
    max_workers: Optional[int] = None
    tolerances: Tuple[Tuple[str, float], ...] = ()
    knobs: Tuple[Tuple[str, Any], ...] = field(default=())
    source: Tuple[Tuple[str, Any], ...] = field(default=(), compare=False)

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid.uniform(self.T, self.n_steps)

    def knob(self, name: str) -> Any:
        return dict(self.knobs)[name]

    def with_overrides(self, **overrides: Any) -> 'ExperimentConfig':
        """A copy with the given top-level fields or knobs replaced (command line flags)"""
        fields_ = {k: v for k, v in overrides.items() if k in self.__dataclass_fields__ and v is not None}
        knobs = dict(self.knobs)
        for key, value in overrides.items():
            if key not in fields_ and value is not None:
                if key not in knobs:
                    raise InterfaceError("unknown option {!r} for scenario {!r}".format(key, self.scenario))
                knobs[key] = value
        out = replace(self, knobs=tuple(sorted(knobs.items(), key=lambda kv: kv[0])), **fields_)
        validate(out)
        return out

    def echo(self) -> Dict[str, Any]:
        """The configuration as written to the manifest"""
        out = dict(self.source)
        out.update({'scenario': self.scenario, 'T': self.T, 'n_steps': self.n_steps,
                    'replicas': self.replicas, 'base_seed': self.base_seed, 'p': self.params.p})
        out.update(dict(self.knobs))
        return out


def _number(data: Mapping[str, Any], key: str, default: Any, kind: type = float) -> Any:
    value = data.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InterfaceError("{} must be a number, got {!r}".format(key, value))
    if kind is int and value != int(value):
        raise InterfaceError("{} must be an integer, got {!r}".format(key, value))
    return kind(value)


def parse_x0(rule: Optional[Mapping[str, Any]]) -> InitialConfig:
    if rule is None:
        return InitialConfig.packed()
    if not isinstance(rule, Mapping) or rule.get('kind') not in X0_KINDS:
        raise InterfaceError("x0_rule needs a 'kind' in {}, got {!r}".format(sorted(X0_KINDS), rule))
    kind = rule['kind']
    unknown = set(rule) - X0_KINDS[kind] - {'kind'}
    if unknown:
        raise InterfaceError("unknown keys {} in x0_rule of kind {!r}".format(sorted(unknown), kind))
    if kind == 'packed':
        return InitialConfig.packed()
    if kind == 'power':
        return InitialConfig.power(_number(rule, 'a', 1.0), _number(rule, 'chi', 1.0), _number(rule, 'b', 0.0))
    if kind == 'spread':
        return InitialConfig.spread(_number(rule, 'spacing', 1.0))
    if kind == 'values':
        return InitialConfig.from_values([float(x) for x in rule.get('values', [])])
    return InitialConfig.half_poisson(_number(rule, 'count', 64, int), _number(rule, 'seed', 0, int))


def parse_config(data: Mapping[str, Any], scenario: Optional[str] = None) -> ExperimentConfig:
    """Validate a decoded JSON document; `scenario` overrides its scenario key"""
    if not isinstance(data, Mapping):
        raise InterfaceError("the configuration must be a JSON object")
    scenario = scenario or data.get('scenario')
    if scenario not in SCENARIOS:
        raise InterfaceError("unknown scenario {!r}, expected one of {}".format(scenario, SCENARIOS))
    knob_defaults = SCENARIO_KNOBS[scenario]
    unknown = set(data) - COMMON_KEYS - set(knob_defaults)
    if unknown:
        raise InterfaceError("unknown configuration keys for scenario {!r}: {}".format(scenario, sorted(unknown)))
    tolerances = data.get('tolerances') or {}
    if set(tolerances) - TOLERANCE_KEYS:
        raise InterfaceError("unknown tolerance keys: {}".format(sorted(set(tolerances) - TOLERANCE_KEYS)))
    params = SystemParams(p=_number(data, 'p', 0.5), drifts=tuple(data.get('drifts') or ()),
                          drift_tail=_number(data, 'drift_tail', 0.0))
    knobs = dict(knob_defaults)
    knobs.update({k: v for k, v in data.items() if k in knob_defaults})
    cfg = ExperimentConfig(
        scenario=scenario, params=params, x0=parse_x0(data.get('x0_rule')),
        T=_number(data, 'T', 1.0), n_steps=_number(data, 'n_steps', 512, int),
        replicas=_number(data, 'replicas', 1, int), base_seed=_number(data, 'base_seed', 0, int),
        output_dir=str(data.get('output_dir', '.')), failure_cap=_number(data, 'failure_cap', None),
        max_workers=_number(data, 'max_workers', None, int),
        tolerances=tuple(sorted((k, float(v)) for k, v in tolerances.items())),
        knobs=tuple(sorted(knobs.items(), key=lambda kv: kv[0])),
        source=tuple(sorted(data.items(), key=lambda kv: kv[0])))
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    """Checks of values that do not depend on the scenario code"""
    # pylint:disable=too-many-branches
    if cfg.replicas < 1:
        raise InterfaceError("replicas must be >= 1, got {}".format(cfg.replicas))
    if not (cfg.T > 0 and math.isfinite(cfg.T)) or cfg.n_steps < 1:
        raise InterfaceError("the grid needs T > 0 and n_steps >= 1")
    if cfg.failure_cap is not None and not 0.0 <= cfg.failure_cap <= 1.0:
        raise InterfaceError("failure_cap must be a fraction in [0, 1]")
    knobs = dict(cfg.knobs)
    for name in ('N', 'M', 'i', 'j_max', 'rstar_M'):
        if name in knobs and (not isinstance(knobs[name], int) or knobs[name] < 1):
            raise InterfaceError("{} must be a positive integer, got {!r}".format(name, knobs[name]))
    if cfg.scenario == 'approx':
        sizes = knobs['sizes']
        if len(sizes) < 3 or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise InterfaceError("approx needs at least 3 strictly increasing sizes, got {}".format(sizes))
        if knobs['j_max'] > sizes[0]:
            raise InterfaceError("j_max must not exceed the smallest size")
    if cfg.scenario == 'kstar':
        if knobs['i'] >= knobs['N']:
            raise InterfaceError("kstar needs i < N")
        if knobs['rule'] not in ('local_time_inc', 'gap_eps'):
            raise InterfaceError("unknown collision rule {!r}".format(knobs['rule']))
    if cfg.scenario == 'tailbounds':
        if knobs['delta'] is not None and not cfg.params.p < cfg.params.q:
            raise NotSupportedError("the W tail experiment assumes p < q, got p={}".format(cfg.params.p))
    if cfg.scenario == 'psi':
        if not cfg.params.p < cfg.params.q:
            raise NotSupportedError("the pi* experiment assumes p < q, got p={}".format(cfg.params.p))
        if knobs['M'] < 2 or cfg.T < knobs['M'] or abs(cfg.n_steps / cfg.T - round(cfg.n_steps / cfg.T)) > 1e-9:
            raise InterfaceError("psi needs M >= 2, T >= M and a grid containing the integers")
    if cfg.scenario == 'verify' and knobs['checks'] is not None:
        unknown = set(knobs['checks']) - set(CHECKS)
        if unknown:
            raise InterfaceError("unknown checks {}, expected some of {}".format(sorted(unknown), CHECKS))
    if cfg.scenario == 'lpp':
        for request in knobs['requests']:
            if not isinstance(request, Mapping) or 'kind' not in request:
                raise InterfaceError("every lpp request needs a 'kind', got {!r}".format(request))
            unknown = set(request) - LPP_REQUEST_KEYS
            if unknown:
                raise InterfaceError("unknown keys {} in an lpp request".format(sorted(unknown)))
            kinds = [kind for kind in LPP_KINDS if kind != 'Istar']
            if request['kind'] not in kinds:
                raise InterfaceError("lpp request kind {!r} is not one of {}".format(request['kind'], kinds))


def load_config(path: str, scenario: Optional[str] = None) -> ExperimentConfig:
    try:
        with open(path) as f:
            data = json.load(f)
    except ValueError as exc:
        raise InterfaceError("{}: invalid JSON: {}".format(path, exc))
    return parse_config(data, scenario)
