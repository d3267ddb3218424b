"""Run the command-line interface via ``python -m polylut``."""

import sys

from .cli import main

sys.exit(main())
