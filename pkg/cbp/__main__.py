"""Console entry point: `cbp <scenario> ...` runs the management command `cbp`"""
import os
import sys


def main() -> None:
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'cbp.testrunner.settings')
    from django.core.management import execute_from_command_line  # pylint:disable=import-outside-toplevel
    execute_from_command_line([sys.argv[0], 'cbp'] + sys.argv[1:])


if __name__ == '__main__':
    main()
