"""Numerical laboratory for concentration of normalized random matrix products.

Computes exact product decompositions, evaluates closed-form concentration
bounds, constructs Baranyai parallel classes, and runs seeded Monte Carlo
experiments that test the bounds empirically.
"""

__version__ = "0.1.0"

from . import baranyai, bounds, ensembles, linalg, montecarlo, products  # noqa: F401
from ._kernels import BACKEND  # noqa: F401
