# cbp - competing Brownian particles
#
# See LICENSE.md for details
#

"""
Simulator and verification library for finite and infinite systems of
competing Brownian particles with asymmetric collision local times.

The numerical core (model, solver, lpp, rmt, approx, chains, harness) runs
without Django. Django is used only by the management command and settings.
"""
import logging

# Version of the CSV/JSON output schemas written by cbp.io
SCHEMA_VERSION = 1

from cbp.exceptions import (  # NOQA pylint:disable=unused-import,useless-import-alias,wrong-import-position
    Error as Error, InterfaceError as InterfaceError, ConvergenceError as ConvergenceError,
)

__version__ = "1.0"

log = logging.getLogger(__name__)
