"""
Run a scenario over its replicas and write the outputs with a manifest.

Replica k uses the seed replica_seed(base_seed, k). Replicas run in a
process pool; the results are reassembled in replica order, so the output
files do not depend on the number of workers.
"""
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, List, Optional, Tuple

import cbp
from cbp.common import get_max_workers, get_setting
from cbp.exceptions import ConvergenceError, Error, InterfaceError
from cbp.harness.config import ExperimentConfig
from cbp.harness.scenarios import REGISTRY, ReplicaResult, Scenario
from cbp.io import content_hash, write_json, write_rows_csv
from cbp.model import replica_seed

log = logging.getLogger(__name__)

Failure = Tuple[int, int, str]


def _run_replica(cfg: ExperimentConfig, index: int) -> Tuple[Optional[ReplicaResult], Optional[Failure]]:
    """Worker entry point; a failed replica is reported, not raised"""
    seed = replica_seed(cfg.base_seed, index)
    try:
        return REGISTRY[cfg.scenario].replica(cfg, index, seed), None
    except ConvergenceError as exc:
        return None, (index, seed, 'convergence: {}'.format(exc))
    except InterfaceError:
        raise
    except Error as exc:
        return None, (index, seed, '{}: {}'.format(type(exc).__name__, exc))


def _workers(cfg: ExperimentConfig) -> int:
    workers = cfg.max_workers if cfg.max_workers is not None else get_max_workers()
    if workers is None:
        workers = os.cpu_count() or 1
    return max(1, min(int(workers), cfg.replicas))


def run_replicas(cfg: ExperimentConfig) -> List[Tuple[Optional[ReplicaResult], Optional[Failure]]]:
    workers = _workers(cfg)
    indexes = range(cfg.replicas)
    if workers == 1:
        return [_run_replica(cfg, k) for k in indexes]
    log.debug("running %d replicas on %d workers", cfg.replicas, workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_replica, [cfg] * cfg.replicas, indexes))


def run_experiment(cfg: ExperimentConfig) -> Dict[str, Any]:
    """Run all replicas of the scenario, write the outputs and return the manifest

    The status is 'failed' when the fraction of failed replicas exceeds
    failure_cap or any assertion of the scenario does not hold.
    """
    started = time.time()
    scenario = REGISTRY[cfg.scenario]  # type: Scenario
    os.makedirs(cfg.output_dir, exist_ok=True)
    outcomes = run_replicas(cfg)
    results = [result for result, _ in outcomes if result is not None]
    failures = [failure for _, failure in outcomes if failure is not None]
    for index, seed, reason in failures:
        log.warning("replica %d (seed %d) failed: %s", index, seed, reason)

    paths = []
    replicas_path = os.path.join(cfg.output_dir, '{}_replicas.csv'.format(cfg.scenario))
    write_rows_csv(replicas_path, scenario.header_for(cfg), (row for r in results for row in r.rows),
                   ['scenario={} base_seed={}'.format(cfg.scenario, cfg.base_seed)])
    paths.append(replicas_path)
    assertions = {}  # type: Dict[str, bool]
    if results:
        summary = scenario.summarize(cfg, results)
        summary_path = os.path.join(cfg.output_dir, '{}_summary.csv'.format(cfg.scenario))
        write_rows_csv(summary_path, summary.header, summary.rows)
        paths.append(summary_path)
        assertions = summary.assertions

    cap = cfg.failure_cap if cfg.failure_cap is not None else float(get_setting('CBP_FAILURE_CAP'))
    over_cap = len(failures) > cap * cfg.replicas
    status = 'ok'
    if over_cap or not results or not all(assertions.values()):
        status = 'failed'
    combined, files = content_hash(paths)
    manifest = {
        'schema': cbp.SCHEMA_VERSION,
        'version': cbp.__version__,
        'config': cfg.echo(),
        'seeds': [replica_seed(cfg.base_seed, k) for k in range(cfg.replicas)],
        'content_hash': combined,
        'files': files,
        'failures': [{'replica': index, 'seed': seed, 'reason': reason} for index, seed, reason in failures],
        'assertions': assertions,
        'status': status,
        'wall_time': time.time() - started,
    }
    write_json(manifest, os.path.join(cfg.output_dir, 'manifest.json'))
    log.info("%s: %d replicas, %d failed, status %s", cfg.scenario, cfg.replicas, len(failures), status)
    return manifest
