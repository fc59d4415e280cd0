"""Ribaucour transforms of minimal surfaces and their end classification.

Given Weierstrass data (f, g) and a solution h of h' = k h^2 f - g',
the transformed data is

    f~ = g' / (k h^2),        g~ = g + h,

defined away from the zeros of h, which join the puncture set.  The
pair of Gauss maps (g, g~) is simultaneously the Gauss-map pair of the
associated flat front (see hfront), and the scalar pair

    rho = -|xi+|^2 / (1 + |g|^2),    phi = -(1 + |g~|^2) / |xi-|^2

is the Ribaucour data of the normalized pair of immersions, which are
the original and transformed surfaces scaled by the homothety ratio 4k.
At that scale the sphere congruence has radius tau = -phi/rho and the
connecting frontal is X_Z = (phi/2)(N - N~).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .mexpr import (
    Const, Div, MeroExpr, PoleSignal, Z,
    local_order, locate_zeros_poles,
)
from .weierstrass import WeierstrassData, gauss_normal, immerse
from .riccati import RiccatiSolution
from .hfront import FlatFrontData, xi_norms

__all__ = [
    "RibaucourPair", "EndClass",
    "transform", "inverse_transform", "make_pair", "pair_front",
    "ribaucour_data", "associated_frontal", "sphere_congruence",
    "classify_end", "INF",
]

INF = complex("inf")


def _coerce_h(h):
    if isinstance(h, RiccatiSolution):
        if h.kind != "closed_form":
            raise ValueError(
                "transforming needs a closed-form solution; sampled traces "
                "cannot be differentiated")
        return h.expr
    if isinstance(h, MeroExpr):
        return h
    raise TypeError("h must be a MeroExpr or a closed-form RiccatiSolution")


def _h_is_trivial(h, base):
    probe = [base + 0.13, base - 0.07 + 0.11j, base + 0.29j, base + 0.41 - 0.17j]
    vals = []
    for w in probe:
        try:
            vals.append(abs(h(w)))
        except PoleSignal:
            return False
    return max(vals) < 1e-13


def normalized_tau(W: WeierstrassData, g_t: MeroExpr, h: MeroExpr, z):
    """Sphere-congruence radius -(1+|g|^2)(1+|g~|^2)/|h|^2 of the
    normalized pair; equals -phi/rho without any integration."""
    z = complex(z)
    hv = h(z)
    if abs(hv) < 1e-300:
        raise PoleSignal(z, "zero of h")
    gv = W.g(z)
    gtv = g_t(z)
    return -(1.0 + abs(gv) ** 2) * (1.0 + abs(gtv) ** 2) / abs(hv) ** 2


def transform(W: WeierstrassData, h, k, h_zeros=None,
              search_half_width=4.0) -> WeierstrassData:
    """Transformed Weierstrass data (g'/(k h^2), g + h).

    The zeros of h become punctures of the new data (located by the
    argument principle unless supplied).  The base value is placed so
    that the new immersion is the honest Ribaucour partner of W's:
    Z~(z_b) = Z(z_b) + tau_c4 (N - N~)(z_b) with tau_c4 the congruence
    radius at the data's own scale, i.e. normalized tau / (4k).
    """
    h = _coerce_h(h)
    k = float(k)
    if k == 0.0:
        raise ValueError("k must be nonzero")
    if _h_is_trivial(h, W.base_point):
        raise ValueError("h is identically zero")

    f_t = W.g_prime / (Const(k) * h * h)
    g_t = W.g + h

    if h_zeros is None:
        zeros, _ = locate_zeros_poles(h, half_width=search_half_width)
        h_zeros = tuple(z for z, _n in zeros)
    punctures = list(W.punctures)
    for z0 in h_zeros:
        if all(abs(z0 - p) > 1e-9 for p in punctures):
            punctures.append(complex(z0))

    zb = W.base_point
    tau_c4 = normalized_tau(W, g_t, h, zb) / (4.0 * k)
    n_vec = gauss_normal(W, zb)
    gt_val = g_t(zb)
    d = 1.0 + abs(gt_val) ** 2
    nt_vec = np.array([2 * gt_val.real / d, 2 * gt_val.imag / d, (d - 2) / d])
    base_value = np.array(W.base_value) + tau_c4 * (n_vec - nt_vec)

    return WeierstrassData(f=f_t, g=g_t, punctures=tuple(punctures),
                           base_point=zb, base_value=tuple(base_value),
                           exclusion=W.exclusion)


def inverse_transform(W_t: WeierstrassData, h, k, h_zeros=None) -> WeierstrassData:
    """Undo a transform: (W~, -h) solves the same equation for W~ since
    dg~ = k h^2 f~ dz identically, so transforming W~ by -h returns the
    original data (as functions; numerically to rounding)."""
    h = _coerce_h(h)
    return transform(W_t, -h, k, h_zeros=h_zeros)


@dataclass(frozen=True)
class RibaucourPair:
    """A minimal surface, its Ribaucour transform, and the gauge data."""

    W: WeierstrassData
    W_t: WeierstrassData
    h: MeroExpr
    k: float
    h_zeros: tuple = ()
    h_poles: tuple = ()

    @property
    def g_t(self):
        return self.W_t.g

    @cached_property
    def front(self) -> FlatFrontData:
        return pair_front(self)

    @cached_property
    def normalized_plus(self) -> WeierstrassData:
        """Weierstrass data (4 dG-/(G- - G+)^2, G+) of the normalized
        original surface: the homothety by 4k of W's immersion."""
        f_plus = Const(4.0) * self.W_t.g.diff() / (self.h * self.h)
        return WeierstrassData(
            f=f_plus, g=self.W.g, punctures=self.W_t.punctures,
            base_point=self.W.base_point,
            base_value=tuple(4.0 * self.k * v for v in self.W.base_value),
            exclusion=self.W.exclusion)

    @cached_property
    def normalized_minus(self) -> WeierstrassData:
        """Weierstrass data (4 dG+/(G+ - G-)^2, G-) of the normalized
        transformed surface."""
        f_minus = Const(4.0) * self.W.g.diff() / (self.h * self.h)
        return WeierstrassData(
            f=f_minus, g=self.W_t.g, punctures=self.W_t.punctures,
            base_point=self.W.base_point,
            base_value=tuple(4.0 * self.k * v for v in self.W_t.base_value),
            exclusion=self.W.exclusion)


def make_pair(W: WeierstrassData, h, k, search_half_width=4.0) -> RibaucourPair:
    """Build the pair (W, transform(W, h, k)) with zero/pole bookkeeping."""
    h = _coerce_h(h)
    zeros, poles = locate_zeros_poles(h, half_width=search_half_width)
    W_t = transform(W, h, k, h_zeros=tuple(z for z, _ in zeros))
    return RibaucourPair(W=W, W_t=W_t, h=h, k=float(k),
                         h_zeros=tuple(zeros), h_poles=tuple(poles))


def pair_front(pair: RibaucourPair) -> FlatFrontData:
    """Gauss-map pair (g, g~) as flat-front data.

    Zeros of h are punctures (the maps collide), poles of h are simple
    poles of the integrands; both must be avoided by paths.
    """
    punctures = list(pair.W_t.punctures)
    for z0, _n in pair.h_poles:
        if all(abs(z0 - p) > 1e-9 for p in punctures):
            punctures.append(z0)
    return FlatFrontData.from_gauss_maps(
        pair.W.g, pair.g_t, pair.W.base_point, punctures=tuple(punctures),
        exclusion=pair.W.exclusion)


def ribaucour_data(pair: RibaucourPair, z, path=None):
    """(rho, phi) at z for the normalized pair:

        rho = -|xi+|^2 / (1 + |g|^2),   phi = -(1 + |g~|^2) / |xi-|^2.

    Both are negative; their product rho*phi = ||X_Z||^2 > 0, and the
    whole pair rescales by (c, c) under the documented gauge freedom
    without changing the transform formulas.
    """
    z = complex(z)
    xp2, xm2 = xi_norms(pair.front, z, path=path)
    gv = pair.W.g(z)
    gtv = pair.g_t(z)
    rho = -xp2 / (1.0 + abs(gv) ** 2)
    phi = -(1.0 + abs(gtv) ** 2) / xm2
    return rho, phi


def associated_frontal(pair: RibaucourPair, z, path=None):
    """The connecting frontal X_Z = (phi/2)(N - N~) of the normalized
    pair; satisfies <X_Z, N> = rho and ||X_Z||^2 = rho*phi.

    Undefined where h vanishes (N = N~ there)."""
    z = complex(z)
    hv = pair.h(z)
    if abs(hv) < 1e-12:
        raise PoleSignal(z, "zero of h: normals coincide")
    _rho, phi = ribaucour_data(pair, z, path=path)
    n_vec = gauss_normal(pair.W, z)
    nt_vec = gauss_normal(pair.W_t, z)
    return 0.5 * phi * (n_vec - nt_vec)


def sphere_congruence(pair: RibaucourPair, z, path=None):
    """Center and radius of the congruence sphere at z, for the
    normalized pair: center = Z+(z) + tau N(z), radius = |tau| with
    tau = -phi/rho."""
    z = complex(z)
    rho, phi = ribaucour_data(pair, z, path=path)
    if abs(rho) < 1e-300:
        raise ArithmeticError("rho = 0: congruence degenerates")
    tau = -phi / rho
    Zp = immerse(pair.normalized_plus, z)
    n_vec = gauss_normal(pair.W, z)
    return Zp + tau * n_vec, abs(tau)


# ---------------------------------------------------------------------------
# End classification


@dataclass(frozen=True)
class EndClass:
    """Classification of a puncture of the transformed surface.

    orders = (ord g, ord f, ord h): the vanishing order of g - g(z0),
    and the local orders of f and h, all in the chart and sphere
    rotation actually used for the decision (recorded in detail).
    """

    tag: str
    orders: tuple
    location: complex
    detail: str = ""

    TAGS = ("planar_embedded", "planar_nonembedded", "catenoid_type",
            "extends_regularly", "unclassified")


def _su2_rotate(f, g, g_t, h, a, b):
    """Rotate the sphere by the SU(2) element [[a, b], [-conj b, conj a]]:
    g -> (a g + b)/(-conj(b) g + conj(a)) and f -> f * denominator^2,
    applied to both surfaces at once; h -> h / (den_g * den_gt)."""
    bc = Const(-b.conjugate())
    ac = Const(a.conjugate())
    den_g = bc * g + ac
    den_gt = bc * g_t + ac
    f_r = f * den_g * den_g
    g_r = (Const(a) * g + Const(b)) / den_g
    gt_r = (Const(a) * g_t + Const(b)) / den_gt
    h_r = h / (den_g * den_gt)
    return f_r, g_r, gt_r, h_r


def _order_or_none(e, z0, radius):
    try:
        return local_order(e, z0, radius=radius)
    except Exception:
        return None


def classify_end(pair: RibaucourPair, z0, order_radius=8e-3) -> EndClass:
    """Classify the end of the transformed surface at a puncture z0.

    Pass INF (or the string 'inf') to classify the point at infinity via
    the w = 1/z chart.  The decision is pure order arithmetic on
    (f, g', h) at z0, after rotating the sphere whenever g or g~ has a
    pole there:

      * f regular nonzero, g'(z0) != 0, simple zero of h
            -> planar embedded end;
      * f regular nonzero, g' vanishing to order m-1 (umbilic), h
        vanishing to order m  -> planar non-embedded end;
      * f with a double pole, g'(z0) != 0 (a catenoid-type end of the
        original)  -> catenoid-type end with the same limiting normal;
      * f with pole order 2+q, g' vanishing to order p >= q+1 (a planar
        end of the original), h vanishing to order m+1: p = m gives a
        planar non-embedded end; m = q gives a surface extending
        regularly when p > 2m+1, and a planar end (embedded exactly for
        p = 2m) when p < 2m+1;
      * anything else -> unclassified.
    """
    f, g, g_t, h = pair.W.f, pair.W.g, pair.g_t, pair.h
    detail = []
    location = z0

    if (isinstance(z0, str) and z0 == "inf") or (
            isinstance(z0, complex) and not (
                math.isfinite(z0.real) and math.isfinite(z0.imag))) or (
            isinstance(z0, float) and not math.isfinite(z0)):
        inv = Const(1.0) / Z
        f = Const(-1.0) / (Z * Z) * f.substitute(inv)
        g = g.substitute(inv)
        g_t = g_t.substitute(inv)
        h = h.substitute(inv)
        z0 = 0j
        location = INF
        detail.append("w=1/z chart")
    z0 = complex(z0)

    for a, b, name in ((0.0 + 0j, 1.0 + 0j, "flip"),
                       (1 / math.sqrt(2) + 0j, 1 / math.sqrt(2) + 0j, "tilt")):
        n_g = _order_or_none(g, z0, order_radius)
        n_gt = _order_or_none(g_t, z0, order_radius)
        if n_g is None or n_gt is None:
            return EndClass("unclassified", (0, 0, 0), location,
                            "; ".join(detail + ["order detection failed on g"]))
        if n_g >= 0 and n_gt >= 0:
            break
        f, g, g_t, h = _su2_rotate(f, g, g_t, h, a, b)
        detail.append(f"sphere rotation ({name})")
    else:
        n_g = _order_or_none(g, z0, order_radius)
        n_gt = _order_or_none(g_t, z0, order_radius)
        if n_g is None or n_gt is None or n_g < 0 or n_gt < 0:
            return EndClass("unclassified", (0, 0, 0), location,
                            "; ".join(detail + ["gauss maps stuck at the pole"]))

    n_f = _order_or_none(f, z0, order_radius)
    n_gp = _order_or_none(g.diff(), z0, order_radius)
    n_h = _order_or_none(h, z0, order_radius)
    if n_f is None or n_gp is None or n_h is None:
        return EndClass("unclassified", (0, 0, 0), location,
                        "; ".join(detail + ["order detection failed"]))
    orders = (n_gp + 1, n_f, n_h)

    def out(tag, note=""):
        return EndClass(tag, orders, location,
                        "; ".join(detail + ([note] if note else [])))

    if n_f == 0:
        if n_h < 1:
            return out("extends_regularly", "not a puncture: h nonzero")
        if n_gp == 0:
            if n_h == 1:
                return out("planar_embedded")
            return out("unclassified", "h order inconsistent with g'(z0) != 0")
        m = n_gp + 1
        if n_h == m:
            return out("planar_nonembedded", f"umbilic of order {m}")
        return out("unclassified", "umbilic orders do not match")

    if n_f < 0:
        q = -n_f - 2
        if q < 0:
            return out("unclassified", "simple pole of f")
        if q == 0 and n_gp == 0:
            if n_h == 1:
                return out("catenoid_type", "same limiting normal")
            return out("unclassified", "catenoid-type data but h order != 1")
        if n_gp >= q + 1:
            if n_h < 1:
                return out("unclassified", "planar-end data but h(z0) != 0")
            p, m = n_gp, n_h - 1
            if p == m:
                return out("planar_nonembedded", f"new pole order {m + 2}")
            if m == q:
                if p > 2 * m + 1:
                    return out("extends_regularly")
                if p == 2 * m + 1:
                    return out("unclassified", "boundary case p = 2m+1")
                pole = 2 * m + 2 - p
                if pole == 2:
                    return out("planar_embedded")
                return out("planar_nonembedded", f"new pole order {pole}")
            return out("unclassified", "orders violate p = m or m = q")
        return out("unclassified", "not a planar or catenoid-type pattern")

    return out("unclassified", "branch point: f vanishes")
