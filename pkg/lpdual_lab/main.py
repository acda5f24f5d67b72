"""
Main entry point for the lpdual command.
The runner lives in core.runner; this module keeps the console script stable.
"""
import sys

from .core.runner import main, run

__all__ = ["main", "run"]

if __name__ == "__main__":
    sys.exit(main())
