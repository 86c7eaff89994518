import json
import logging
from typing import Any

from django.core.management.base import BaseCommand, CommandError

from cbp.exceptions import Error
from cbp.harness.config import SCENARIOS, load_config, parse_config
from cbp.harness.runner import run_experiment

VERBOSITY_LEVELS = {0: logging.ERROR, 1: logging.WARNING, 2: logging.INFO, 3: logging.DEBUG}


class Command(BaseCommand):
    help = "Run a scenario of the competing Brownian particles experiment harness"

    def add_arguments(self, parser):
        parser.add_argument('scenario', choices=SCENARIOS)
        parser.add_argument('--config', dest='config', help="JSON configuration file")
        parser.add_argument('--seed', type=int, dest='base_seed', help="Base seed of the replicas")
        parser.add_argument('--replicas', type=int, dest='replicas')
        parser.add_argument('--out', dest='output_dir', help="Output directory")
        parser.add_argument('--workers', type=int, dest='max_workers')
        # flags of the standalone GUE sampler
        parser.add_argument('--m', type=int, dest='M', help="Matrix size (gue) or chain length (psi)")
        parser.add_argument('--t', type=float, dest='T', help="Time horizon / variance scale")
        parser.add_argument('--samples', type=int, dest='samples', help="Alias of --replicas")

    def handle(self, **options: Any) -> None:  # type: ignore[override]
        logging.getLogger('cbp').setLevel(VERBOSITY_LEVELS.get(int(options['verbosity']), logging.DEBUG))
        scenario = options['scenario']
        try:
            if options['config']:
                cfg = load_config(options['config'], scenario)
            else:
                cfg = parse_config({}, scenario)
            overrides = {key: options[key] for key in ('base_seed', 'output_dir', 'max_workers', 'T', 'M')}
            overrides['replicas'] = options['replicas'] or options['samples']
            cfg = cfg.with_overrides(**overrides)
            manifest = run_experiment(cfg)
        except (Error, OSError) as exc:
            raise CommandError(str(exc))
        self.stdout.write(json.dumps({'status': manifest['status'], 'assertions': manifest['assertions'],
                                      'failures': len(manifest['failures']),
                                      'content_hash': manifest['content_hash']}, sort_keys=True))
        if manifest['status'] != 'ok':
            raise CommandError("scenario {} failed, see {}/manifest.json".format(scenario, cfg.output_dir))
