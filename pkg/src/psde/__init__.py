"""Exact and numeric toolkit for the pseudo-diffusion equation

    Q_t - (1/4) Q_xx + (1/(4 t^2)) Q_pp = 0.
"""

from .scalar import Mobius, ScalarExpr, Substitution
from .gaussian import GaussianExpr

__version__ = "0.1.0"
