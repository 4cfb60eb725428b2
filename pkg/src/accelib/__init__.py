"""First-order convex optimization methods with executable convergence
certificates: momentum/accelerated gradient schemes, Chebyshev iterations,
Anderson-type extrapolation, proximal and restart machinery, plus checkers
for the inequalities their analyses rest on."""

from . import (certify, cli, composite, extrapolation, momentum, oracles,
               poly_methods, prox_outer, restart, tolerances, trace)

__all__ = [
    "certify", "cli", "composite", "extrapolation", "momentum", "oracles",
    "poly_methods", "prox_outer", "restart", "tolerances", "trace",
]

__version__ = "0.1.0"
