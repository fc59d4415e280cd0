"""The complex Riccati equation h' = k h^2 f - g' and its solutions.

k is a nonzero real constant.  Solutions are either closed forms
(expression trees, one per catalogued family) or path-sampled tables
produced by an embedded Dormand-Prince 5(4) integrator that switches to
the reciprocal chart mu = 1/h (which satisfies mu' = g' mu^2 - k f)
whenever |h| grows past the chart threshold, and back when |mu| does.
Blow-up of h is therefore not an error: poles of h are ordinary chart
events and geometrically meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .mexpr import (
    Const, MeroExpr, LoopSpec, PathSpec, PoleSignal, Z,
    compiled, integrate_path, loop_integral,
)
from .weierstrass import WeierstrassData

__all__ = [
    "RiccatiSample", "RiccatiSolution", "IndicialPair",
    "RiccatiIntegrationError",
    "solve_along", "catenoid_closed_form", "trinoid_closed_form",
    "residual", "period_real", "monodromy_defect", "singular_indices",
]

CHART_SWITCH = 10.0
CHART_HYSTERESIS = 0.9
MAX_SWITCHES = 100


class RiccatiIntegrationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class RiccatiSample:
    z: complex
    value: complex
    chart: str  # 'h' or 'mu'

    def h(self):
        """Value in the h-chart regardless of which chart was recorded."""
        if self.chart == "h":
            return self.value
        if self.value == 0:
            raise PoleSignal(self.z, "pole of h")
        return 1.0 / self.value


@dataclass(frozen=True)
class RiccatiSolution:
    """Either a closed form or a sampled trace; k is the Riccati constant."""

    k: float
    kind: str  # 'closed_form' or 'sampled'
    expr: MeroExpr | None = None
    samples: tuple = ()
    n_chart_switches: int = 0

    def __post_init__(self):
        if self.k == 0:
            raise ValueError("k must be a nonzero real constant")
        if self.kind not in ("closed_form", "sampled"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "closed_form" and self.expr is None:
            raise ValueError("closed_form solution needs an expression")

    @classmethod
    def from_expr(cls, expr, k):
        return cls(k=float(k), kind="closed_form", expr=expr)

    def __call__(self, z):
        if self.kind != "closed_form":
            raise ValueError("sampled solutions are not pointwise-evaluable")
        return self.expr(z)

    def trace_rows(self):
        """CSV rows (z_re, z_im, chart, val_re, val_im)."""
        return [(s.z.real, s.z.imag, s.chart, s.value.real, s.value.imag)
                for s in self.samples]


@dataclass(frozen=True)
class IndicialPair:
    """Roots (1 +- sqrt(1+4k))/2 of the indicial equation at a regular
    singular point of the second-order ODE equivalent to the mu-chart
    Riccati equation.  Always lam_plus + lam_minus = 1."""

    lam_plus: float
    lam_minus: float

    @property
    def separation(self):
        return self.lam_plus - self.lam_minus


def singular_indices(k: float) -> IndicialPair:
    if 1.0 + 4.0 * k < 0.0:
        raise ValueError("need 1 + 4k >= 0 for real indicial roots")
    s = math.sqrt(1.0 + 4.0 * k)
    return IndicialPair((1.0 + s) / 2.0, (1.0 - s) / 2.0)


def catenoid_closed_form(m, C):
    """Closed-form solution family for the data f = 1/z^2, g = z:

        h(z) = 2 z (C - z^m) / ((m+1) z^m + (m-1) C),   k = (m^2 - 1)/4.

    m > 0 real (integer m gives a single-valued solution), C complex.
    m = 1 is rejected because it forces k = 0.  For C = 0 the expression
    reduces to the linear h(z) = -2 z / (m+1) and is returned in that
    form.
    """
    m = float(m)
    if m <= 0.0:
        raise ValueError("m must be positive")
    k = (m * m - 1.0) / 4.0
    if k == 0.0:
        raise ValueError("m = 1 gives k = 0, which is not allowed")
    C = complex(C)
    if C == 0:
        h = Const(-2.0 / (m + 1.0)) * Z
    else:
        num = Const(2.0) * Z * (Const(C) - Z ** m)
        den = Const(m + 1.0) * Z ** m + Const((m - 1.0) * C)
        h = num / den
    return h, k


def trinoid_closed_form():
    """The particular solution h(z) = z^2 (z^3 - 1) with k = 5 for the
    three-ended data f = 1/(z^3-1)^2, g = z^2."""
    h = Z ** 2 * (Z ** 3 - Const(1.0))
    return h, 5.0


def residual(W: WeierstrassData, k, h: MeroExpr) -> MeroExpr:
    """h' - k h^2 f + g' as an expression; identically ~0 for solutions."""
    return h.diff() - Const(k) * h * h * W.f + W.g_prime


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) with chart switching

_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = _DP_A[6]
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
          -92097 / 339200, 187 / 2100, 1 / 40)
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)


def _rhs_factory(W, k):
    f_c = compiled(W.f)
    gp_c = compiled(W.g_prime)

    def rhs(chart, z, y):
        if chart == "h":
            return k * y * y * f_c(z) - gp_c(z)
        return gp_c(z) * y * y - k * f_c(z)

    return rhs


def solve_along(W: WeierstrassData, k, z0, h0, path: PathSpec,
                rtol=1e-10, atol=1e-12, keep_samples=True):
    """Integrate the Riccati equation along a path starting at z0.

    Returns a sampled RiccatiSolution whose samples sit at the accepted
    integrator steps.  Chart switches h <-> mu = 1/h happen when the
    current chart's value passes CHART_SWITCH in magnitude (with the new
    value then below 1/CHART_SWITCH, hysteresis keeps switches isolated);
    both charts are recorded at a switch point.  Step underflow and more
    than MAX_SWITCHES switches raise RiccatiIntegrationError.
    """
    k = float(k)
    if k == 0.0:
        raise ValueError("k must be nonzero")
    z0 = complex(z0)
    if abs(path.start - z0) > 1e-9 * (1 + abs(z0)):
        raise ValueError("path must start at z0")

    rhs = _rhs_factory(W, k)
    y = complex(h0)
    chart = "h"
    switches = 0
    if abs(y) > CHART_SWITCH:
        y = 1.0 / y
        chart = "mu"

    samples = [RiccatiSample(z0, y, chart)]

    for seg in path.segments:
        point, velocity = seg.point, seg.velocity
        t = 0.0
        dt = 1e-3
        min_dt = 1e-14

        def F(chart_, t_, y_):
            return rhs(chart_, point(t_), y_) * velocity(t_)

        fsal = F(chart, t, y)
        while t < 1.0:
            dt = min(dt, 1.0 - t)
            ks = [fsal]
            try:
                for i, row in enumerate(_DP_A[1:6], start=1):
                    yi = y
                    for a, kv in zip(row, ks):
                        yi += dt * a * kv
                    ks.append(F(chart, t + dt * _DP_C[i], yi))
                y5 = y
                for b, kv in zip(_DP_B5, ks):
                    y5 += dt * b * kv
                k7 = F(chart, t + dt, y5)
                ks.append(k7)
                y4 = y
                for b, kv in zip(_DP_B4, ks):
                    y4 += dt * b * kv
            except PoleSignal:
                dt *= 0.25
                if dt < min_dt:
                    raise RiccatiIntegrationError(
                        "step underflow near a coefficient pole "
                        f"at path parameter {t:.6f}") from None
                continue
            err = abs(y5 - y4)
            scale = atol + rtol * max(abs(y), abs(y5))
            if err <= scale:
                t += dt
                y = y5
                fsal = k7
                zt = point(t)
                if keep_samples:
                    samples.append(RiccatiSample(zt, y, chart))
                if abs(y) > CHART_SWITCH:
                    switches += 1
                    if switches > MAX_SWITCHES:
                        raise RiccatiIntegrationError("chart thrash: "
                                                      f"> {MAX_SWITCHES} switches")
                    y = 1.0 / y
                    chart = "mu" if chart == "h" else "h"
                    if keep_samples:
                        samples.append(RiccatiSample(zt, y, chart))
                    fsal = F(chart, t, y)
            fac = 0.9 * (scale / err) ** 0.2 if err > 0 else 5.0
            dt *= min(5.0, max(0.2, fac))
            if dt < min_dt and t < 1.0:
                raise RiccatiIntegrationError(
                    f"step underflow at path parameter {t:.6f} "
                    "(essential singularity?)")

    return RiccatiSolution(k=k, kind="sampled", samples=tuple(samples),
                           n_chart_switches=switches)


def monodromy_defect(W: WeierstrassData, sol: RiccatiSolution, loop: LoopSpec) -> float:
    """Relative mismatch |h_end/h_start - 1| after continuing h around the loop.

    Zero (up to integrator error) exactly when the solution is
    single-valued around the loop; this is the sharp witness that a
    transform built from h is well defined across the enclosed puncture.
    """
    if sol.kind != "closed_form":
        raise ValueError("monodromy needs a closed form to continue")
    path = loop.to_path()
    h0 = complex(sol.expr(path.start))
    out = solve_along(W, sol.k, path.start, h0, path)
    h1 = out.samples[-1].h()
    if abs(h0) < 1e-300:
        raise PoleSignal(path.start, "loop starts at a zero of h")
    return abs(h1 / h0 - 1.0)


def period_real(W: WeierstrassData, h, loop: LoopSpec) -> float:
    """Re of the loop integral of dg/h.

    For a closed-form RiccatiSolution the integrand is continued
    analytically around the loop by integrating the Riccati equation
    together with the quadrature variable I' = g' / h (so multivalued
    solutions are handled correctly: the continuation follows the ODE,
    not a fixed branch).  A bare MeroExpr h is integrated directly and is
    only meaningful when h is single-valued on the loop.
    """
    if isinstance(h, RiccatiSolution):
        if h.kind != "closed_form":
            raise ValueError("period of a sampled solution: re-solve along the loop")
        return _period_by_continuation(W, h, loop)
    return integrate_path(W.g_prime / h, loop.to_path(tolerance=1e-11)).real


def _period_by_continuation(W, sol, loop):
    gp_c = compiled(W.g_prime)
    f_c = compiled(W.f)
    k = sol.k
    path = loop.to_path(tolerance=1e-12)
    z_start = path.start
    y = complex(sol.expr(z_start))
    if abs(y) < 1e-13:
        raise PoleSignal(z_start, "loop starts at a zero of h")

    # State (h, I); integrate in whichever chart for h is well conditioned.
    chart = "h" if abs(y) <= CHART_SWITCH else "mu"
    if chart == "mu":
        y = 1.0 / y
    I = 0j

    for seg in path.segments:
        point, velocity = seg.point, seg.velocity

        def F(chart_, t_, state):
            y_, _ = state
            zt = point(t_)
            v = velocity(t_)
            if chart_ == "h":
                if y_ == 0:
                    raise PoleSignal(zt, "h vanished on the loop")
                return (k * y_ * y_ * f_c(zt) - gp_c(zt)) * v, gp_c(zt) / y_ * v
            return (gp_c(zt) * y_ * y_ - k * f_c(zt)) * v, gp_c(zt) * y_ * v

        t, dt = 0.0, 1e-3
        state = (y, I)
        fsal = F(chart, t, state)
        while t < 1.0:
            dt = min(dt, 1.0 - t)
            ks = [fsal]
            try:
                for i, row in enumerate(_DP_A[1:6], start=1):
                    yi = state[0]
                    Ii = state[1]
                    for a, kv in zip(row, ks):
                        yi += dt * a * kv[0]
                        Ii += dt * a * kv[1]
                    ks.append(F(chart, t + dt * _DP_C[i], (yi, Ii)))
                y5, I5 = state
                for b, kv in zip(_DP_B5, ks):
                    y5 += dt * b * kv[0]
                    I5 += dt * b * kv[1]
                k7 = F(chart, t + dt, (y5, I5))
                ks.append(k7)
                y4, I4 = state
                for b, kv in zip(_DP_B4, ks):
                    y4 += dt * b * kv[0]
                    I4 += dt * b * kv[1]
            except PoleSignal:
                dt *= 0.25
                if dt < 1e-14:
                    raise RiccatiIntegrationError(
                        "period continuation hit a pole it could not step over")
                continue
            err = max(abs(y5 - y4), abs(I5 - I4))
            scale = 1e-12 + 1e-11 * max(1.0, abs(state[0]), abs(state[1]))
            if err <= scale:
                t += dt
                state = (y5, I5)
                fsal = k7
                if abs(state[0]) > CHART_SWITCH:
                    state = (1.0 / state[0], state[1])
                    chart = "mu" if chart == "h" else "h"
                    fsal = F(chart, t, state)
            fac = 0.9 * (scale / err) ** 0.2 if err > 0 else 5.0
            dt *= min(5.0, max(0.2, fac))
            if dt < 1e-14 and t < 1.0:
                raise RiccatiIntegrationError("period continuation step underflow")
        y, I = state

    return I.real
