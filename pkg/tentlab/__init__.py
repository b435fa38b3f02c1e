"""Tent spaces on finite weighted metric measure spaces."""

import logging

logging.getLogger(__name__).addHandler(logging.NullHandler())

logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")

__version__ = "0.1.0"
