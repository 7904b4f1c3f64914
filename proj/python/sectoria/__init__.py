"""Sectorial forms, associated m-sectorial operators and their holomorphic
semigroups on finite-dimensional spaces."""

from _sectoria import *  # noqa: F401,F403
from _sectoria import __version__  # noqa: F401
