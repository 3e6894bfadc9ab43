#!/usr/bin/env python
"""Command-line entry point for the isodrum toolkit."""
import os
import sys


def main(argv=None):
    """Run an isodrum management command.

    A failing command exits through ``SystemExit`` with its return code:
    1 for a failed check, 2 for a usage or input error.
    """
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "isodrum.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    execute_from_command_line(sys.argv if argv is None else argv)


if __name__ == "__main__":
    main()
