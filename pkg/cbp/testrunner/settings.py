# Django settings for the test runner and the command line.
from typing import Any, Dict
import os

DEBUG = True

DATABASES = {}  # type: Dict[str, Any]

SECRET_KEY = 'cbp-not-secret'  # used only in tests and by the command line

INSTALLED_APPS = [
    'cbp',
]

USE_TZ = True

# Solver and harness settings, see cbp/common.py for the defaults.
CBP_PICARD_TOL = 1e-12
CBP_PICARD_MAX_ITER = 10000
CBP_TOL_ORDER = 1e-9
CBP_TOL_IDENTITY = 1e-9
CBP_TOL_COMPLEMENTARITY = 1e-9
CBP_MAX_WORKERS = int(os.environ['CBP_MAX_WORKERS']) if os.environ.get('CBP_MAX_WORKERS') else None

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'level': 'DEBUG',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'cbp': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': True,
        },
    },
}
