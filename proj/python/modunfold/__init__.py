"""Modulo ADC with 1-bit folding information and sliding-DFT unfolding."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
