"""Scenes of closed surfaces with known genus, and tools to score them."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
