"""Ribaucour transforms of minimal surfaces and flat fronts in hyperbolic 3-space.

Pipeline: Weierstrass data (f, g) -> solution h of the complex Riccati
equation dh = k h^2 f dz - dg -> transformed data (g'/(k h^2), g + h) ->
the associated flat front in the hyperboloid model of H^3 built from the
Gauss-map pair (g, g + h), plus end classification and a verification
suite for every identity the construction is supposed to satisfy.
"""

__version__ = "0.1.0"

from .mexpr import (  # noqa: F401
    MeroExpr, Const, Var, Z, PoleSignal, ExprSyntaxError,
    parse_expr, eval_expr, diff_expr, local_order,
    LineSeg, ArcSeg, PathSpec, LoopSpec,
    integrate_path, loop_integral, path_from_points, locate_zeros_poles,
)
