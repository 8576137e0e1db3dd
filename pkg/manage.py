#!/usr/bin/env python
"""Entry point for the influence lab.

    python manage.py run    --config configs/desk_sweep.conf --sigma 1
    python manage.py sweep  --config configs/desk_sweep.conf --sigma 0.1,1,10 --jobs 4
    python manage.py plot   runs/sweep
"""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'influence_lab.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django; install the packages in requirements.txt first."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
