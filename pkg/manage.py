#!/usr/bin/env python

# cbp - competing Brownian particles
#
# See LICENSE.md for details
#

import os
import sys

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'cbp.testrunner.settings')

if __name__ == "__main__":
    from django.core.management import execute_from_command_line
    execute_from_command_line(sys.argv)
