"""Constrained iterative least-squares solvers.

The compiled core lives in ``fca._core``; everything public is re-exported here.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
