"""Euler axis/angle kinematics: rotation algebra, integrators, closed forms
and dynamical-systems diagnostics."""

from ._esl import *  # noqa: F401,F403
from ._esl import EslError

__all__ = [name for name in dir() if not name.startswith("_")]
