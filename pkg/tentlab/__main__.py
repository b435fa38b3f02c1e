"""Entry point for `python -m tentlab`."""

import sys

from tentlab.cli import main

sys.exit(main())
