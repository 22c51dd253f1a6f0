"""Console entry point: ``ctm <subcommand> ...`` without going through manage.py."""
import os
import sys


def main(argv=None):
    """Run the ``ctm`` management command and return its exit code.

    Usage errors exit 2, failed checks 1 and infeasible parameters 3.
    """
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'catalab.settings')
    from django.core.management import execute_from_command_line

    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        execute_from_command_line(['ctm', 'ctm', *argv])
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
