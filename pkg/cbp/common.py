import importlib
import os
from typing import Any

# Dependencies of cbp on Django are minimalized.
# Only the settings and the management command need Django.

try:
    django_settings = None  # type: Any
    from django.conf import settings as django_settings
except ImportError:
    pass

# settings names and their defaults
DEFAULTS = {
    'CBP_PICARD_TOL': 1e-12,
    'CBP_PICARD_MAX_ITER': 10000,
    'CBP_TOL_ORDER': 1e-9,
    'CBP_TOL_IDENTITY': 1e-9,
    'CBP_TOL_COMPLEMENTARITY': 1e-9,
    'CBP_JACOBI_MAX_SWEEPS': 100,
    'CBP_GUE_VARIANCE_CONVENTION': 'split',
    'CBP_MAX_WORKERS': None,
    'CBP_FAILURE_CAP': 0.0,
    'CBP_K_MAX_CAP': 4096,
}


def _settings_source() -> Any:
    if django_settings is not None and django_settings.configured:
        return django_settings
    module_name = os.environ.get('CBP_SETTINGS_MODULE')
    if module_name:
        return importlib.import_module(module_name)
    return None


def get_setting(name: str, default: Any = None) -> Any:
    """Get a library setting

    The value is taken from Django settings if they are configured, otherwise
    from the module named by the environment variable CBP_SETTINGS_MODULE,
    otherwise the documented default is used.
    """
    if default is None:
        default = DEFAULTS.get(name)
    source = _settings_source()
    if source is None:
        return default
    return getattr(source, name, default)


def get_picard_tol() -> float:
    return float(get_setting('CBP_PICARD_TOL'))


def get_picard_max_iter() -> int:
    return int(get_setting('CBP_PICARD_MAX_ITER'))


def get_max_workers() -> Any:
    """Number of worker processes for replicas

    None: the default of concurrent.futures (number of CPUs)
    0 or 1: run in the current process
    """
    return get_setting('CBP_MAX_WORKERS')
