"""Constant mean curvature graphs over the hyperbolic plane.

Rotational model solutions, the equidistant-curve flow, admissibility of
boundary curves and a finite-volume solver for the Dirichlet problem on
exterior domains.
"""

__version__ = "0.1.0"
