# SPDX-License-Identifier: MIT
"""Convex integration lab for 2D stochastic Navier-Stokes."""
from ._convint import *  # noqa: F401,F403
from ._convint import Config, ConfigError, Rank, __doc__  # noqa: F401
