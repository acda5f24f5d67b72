import sys

from .core.runner import main

sys.exit(main())
