"""Two-level decay model of neutral-meson mixing and CP violation."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
