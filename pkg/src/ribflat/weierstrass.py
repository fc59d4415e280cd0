"""Minimal immersions from Weierstrass data (f, g).

The data is a pair of meromorphic expressions: f is the coefficient of
the holomorphic 1-form f dz and g is the (meromorphic) Gauss map.  The
immersion is

    Z(z) = base_value + Re integral of (Phi1, Phi2, Phi3) dz

with Phi1 = (1 - g^2) f / 2, Phi2 = i (1 + g^2) f / 2, Phi3 = f g.

Stereographic convention (the single source of truth for the whole
package): Pi(n) = (n1 + i n2) / (1 - n3), so the inverse is

    Pi^{-1}(w) = (2 Re w, 2 Im w, |w|^2 - 1) / (1 + |w|^2)

and a pole of g maps to the north pole (0, 0, 1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .mexpr import (
    Const, LineSeg, MeroExpr, PathError, PathSpec, PoleSignal,
    avoiding_path, integrate_path,
)

__all__ = [
    "WeierstrassData", "phi_forms", "immerse", "immerse_grid",
    "gauss_normal", "metric_factor", "gauss_curv", "default_path",
    "phi_integral", "immerse_stencil", "fd_gauss_curv",
]


@dataclass(frozen=True)
class WeierstrassData:
    """Weierstrass pair with its domain bookkeeping.

    punctures are the points of C removed from the domain (poles of f,
    ends, zeros of a transforming function, ...).  base_point anchors
    path integration and base_value pins the immersion there.
    """

    f: MeroExpr
    g: MeroExpr
    punctures: tuple = ()
    base_point: complex = 1.0 + 0j
    base_value: tuple = (0.0, 0.0, 0.0)
    exclusion: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "punctures",
                           tuple(complex(p) for p in self.punctures))
        object.__setattr__(self, "base_point", complex(self.base_point))
        object.__setattr__(self, "base_value",
                           tuple(float(v) for v in self.base_value))
        zb = self.base_point
        for p in self.punctures:
            if abs(zb - p) < 1e-9:
                raise ValueError(f"base point {zb!r} coincides with puncture {p!r}")
        if not (self.f.is_finite_at(zb) and self.g.is_finite_at(zb)):
            raise ValueError(f"base point {zb!r} is a pole of f or g")
        gp = self.g.diff()
        probe = [zb + 0.1, zb + 0.1j, zb - 0.07 + 0.03j, zb + 0.21 - 0.11j]
        if all((not gp.is_finite_at(w)) or abs(gp(w)) < 1e-13 for w in probe):
            raise ValueError("Gauss map g must be non-constant")

    @property
    def g_prime(self):
        return self.g.diff()


def _fg(W):
    """Accept a WeierstrassData or a bare (f, g) pair of expressions.

    The pair form exists for formula-level evaluation with degenerate
    data (a plane's constant Gauss map, say) that WeierstrassData itself
    rejects."""
    if isinstance(W, WeierstrassData):
        return W.f, W.g
    f, g = W
    return f, g


def phi_forms(W):
    """Coefficient functions of the three holomorphic 1-forms:
    ((1 - g^2) f / 2, i (1 + g^2) f / 2, f g)."""
    f, g = _fg(W)
    one = Const(1.0)
    return (Const(0.5) * (one - g * g) * f,
            Const(0.5j) * (one + g * g) * f,
            f * g)


def default_path(W: WeierstrassData, z, exclusion=None):
    """Deterministic pole-avoiding path from the base point to z
    (straight segment, falling back to radial-then-circular moves around
    the punctures; see mexpr.avoiding_path)."""
    excl = W.exclusion if exclusion is None else float(exclusion)
    return avoiding_path(W.base_point, z, punctures=W.punctures,
                         exclusion=excl)


def phi_integral(W: WeierstrassData, path: PathSpec) -> np.ndarray:
    """Re integral of the three forms along the path, as an R^3 vector."""
    out = np.empty(3)
    for j, phi in enumerate(phi_forms(W)):
        out[j] = integrate_path(phi, path).real
    return out


def immerse(W: WeierstrassData, z, path=None) -> np.ndarray:
    """Point of the minimal immersion at z.

    With no explicit path, default_path is used.  Around punctures the
    result depends on the path's homotopy class exactly by the real loop
    periods of the three forms; this function reports whatever the chosen
    path gives and does not try to repair periods.
    """
    z = complex(z)
    base = np.array(W.base_value)
    if path is None:
        if abs(z - W.base_point) < 1e-15:
            return base
        path = default_path(W, z)
    return base + phi_integral(W, path)


def immerse_stencil(W: WeierstrassData, z, eps, path=None):
    """Immersion at z and at z +- eps, z +- i*eps.

    The four neighbours are reached by short straight segments from z, so
    their quadrature error stays tiny relative to eps (important when the
    caller divides differences by eps or eps^2).  Returns a dict keyed by
    (0,0), (1,0), (-1,0), (0,1), (0,-1).
    """
    center = immerse(W, z, path=path)
    out = {(0, 0): center}
    for key, dz in (((1, 0), eps), ((-1, 0), -eps),
                    ((0, 1), 1j * eps), ((0, -1), -1j * eps)):
        seg = PathSpec([LineSeg(z, z + dz)], tolerance=1e-14)
        out[key] = center + phi_integral(W, seg)
    return out


def immerse_grid(W: WeierstrassData, grid):
    """Immersion over a structured grid (see meshio.DomainGrid).

    The three forms are accumulated over a spanning tree of the grid so
    every vertex lies in a consistent homotopy class; the real loop
    periods of well-defined data vanish, which is what makes the result
    independent of the tree.  Returns (values (nu, nv, 3), ok mask).
    """
    from .meshio import accumulate_over_grid, puncture_clear_edge

    kept = np.argwhere(grid.keep)
    if len(kept) == 0:
        raise ValueError("empty grid")
    dists = [abs(grid.zs[tuple(rc)] - W.base_point) for rc in kept]
    root = tuple(kept[int(np.argmin(dists))])
    z_root = grid.zs[root]
    root_val = immerse(W, z_root) if abs(z_root - W.base_point) > 1e-15 \
        else np.array(W.base_value)

    phis = phi_forms(W)

    def edge(z0, z1):
        seg = PathSpec([LineSeg(z0, z1)], tolerance=1e-10)
        return np.array([integrate_path(p, seg).real for p in phis])

    guard = puncture_clear_edge(W.punctures, 0.5 * W.exclusion)
    return accumulate_over_grid(grid, root, root_val, edge, edge_ok=guard)


def gauss_normal(W: WeierstrassData, z) -> np.ndarray:
    """Unit normal Pi^{-1}(g(z)); a pole of g gives (0, 0, 1)."""
    try:
        w = W.g(complex(z))
    except PoleSignal:
        return np.array([0.0, 0.0, 1.0])
    d = 1.0 + (w.real * w.real + w.imag * w.imag)
    return np.array([2.0 * w.real / d, 2.0 * w.imag / d,
                     (d - 2.0) / d])


def metric_factor(W, z) -> float:
    """Conformal factor of the induced metric against |dz|^2:
    (1 + |g|^2)^2 |f|^2 / 4."""
    f, g = _fg(W)
    z = complex(z)
    return 0.25 * (1.0 + abs(g(z)) ** 2) ** 2 * abs(f(z)) ** 2


def gauss_curv(W, z) -> float:
    """Gaussian curvature -16 |g'/f|^2 / (1 + |g|^2)^4 (always <= 0)."""
    f, g = _fg(W)
    z = complex(z)
    fv = f(z)
    if abs(fv) == 0.0:
        raise PoleSignal(z, "zero of f (branch point)")
    return -16.0 * abs(g.diff()(z) / fv) ** 2 / (1.0 + abs(g(z)) ** 2) ** 4


def fd_gauss_curv(W: WeierstrassData, z, eps=1e-4):
    """Finite-difference Gaussian curvature of the immersed surface.

    Independent cross-check of gauss_curv: builds first and second
    fundamental forms from a 3x3 stencil of immersion points and returns
    (LN - M^2) / (EG - F^2).
    """
    z = complex(z)
    pts = {}
    center = immerse(W, z)
    for du in (-1, 0, 1):
        for dv in (-1, 0, 1):
            if du == 0 and dv == 0:
                pts[(0, 0)] = center
                continue
            dz = complex(du * eps, dv * eps)
            seg = PathSpec([LineSeg(z, z + dz)], tolerance=1e-14)
            pts[(du, dv)] = center + phi_integral(W, seg)
    Xu = (pts[(1, 0)] - pts[(-1, 0)]) / (2 * eps)
    Xv = (pts[(0, 1)] - pts[(0, -1)]) / (2 * eps)
    Xuu = (pts[(1, 0)] - 2 * pts[(0, 0)] + pts[(-1, 0)]) / eps ** 2
    Xvv = (pts[(0, 1)] - 2 * pts[(0, 0)] + pts[(0, -1)]) / eps ** 2
    Xuv = (pts[(1, 1)] - pts[(1, -1)] - pts[(-1, 1)] + pts[(-1, -1)]) / (4 * eps ** 2)
    n = np.cross(Xu, Xv)
    n /= np.linalg.norm(n)
    E, F, G = Xu @ Xu, Xu @ Xv, Xv @ Xv
    L, M, N = Xuu @ n, Xuv @ n, Xvv @ n
    return (L * N - M * M) / (E * G - F * F)
