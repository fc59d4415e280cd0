"""Flat fronts (and general frontals) in the hyperboloid model of H^3.

A front is built from a pair of Gauss maps G+, G- (holomorphic for flat
fronts) through the real exponential integrals

    |xi+|^2 = |c1|^2 exp(2 Re int dG+/(G+ - G-)),
    |xi-|^2 = |c0|^2 exp(2 Re int dG-/(G- - G+)),

anchored at a base point.  Only these real quantities ever enter the
coordinate formulas, so no multivalued phase is materialized anywhere.
The constants are pinned deterministically: c0 = 1 and
c1 = G+(z_b) - G-(z_b), which enforces xi+ xi- = G+ - G- everywhere.

L^4 vectors are plain numpy arrays (x0, x1, x2, x3) with the Minkowski
product of signature (-, +, +, +); points of H^3 satisfy <<v, v>> = -1
with x0 > 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .mexpr import (
    LineSeg, LoopSpec, MeroExpr, PathSpec, PoleSignal,
    avoiding_path, compiled, integrate_path,
)
from .meshio import DomainGrid, accumulate_over_grid, puncture_clear_edge

__all__ = [
    "FlatFrontData", "FrontalSample", "DegenerateEnvelopeError",
    "mink", "xi_norms", "flat_front_point", "frontal_from_gauss",
    "existence_residual", "envelopes", "recover_from_envelopes", "to_ball",
    "front_grid", "front_ball_vertices", "form_relations_check",
]

XI_TOL = 3e-14


def mink(u, v):
    """Minkowski product of signature (-, +, +, +)."""
    return -u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] \
        + u[..., 2] * v[..., 2] + u[..., 3] * v[..., 3]


class DegenerateEnvelopeError(ArithmeticError):
    pass


@dataclass(frozen=True)
class FlatFrontData:
    """Gauss-map pair with base point, constants and puncture bookkeeping.

    punctures must include every point where G+ = G- (the fronts of a
    transform pair put the zeros of the gauge function there) and every
    pole of the 1-forms being integrated (simple poles of dG/(G+-G-)).
    """

    Gp: MeroExpr
    Gm: MeroExpr
    base_point: complex
    c0: complex
    c1: complex
    punctures: tuple = ()
    exclusion: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "base_point", complex(self.base_point))
        object.__setattr__(self, "c0", complex(self.c0))
        object.__setattr__(self, "c1", complex(self.c1))
        object.__setattr__(self, "punctures",
                           tuple(complex(p) for p in self.punctures))
        if self.c0 == 0 or self.c1 == 0:
            raise ValueError("c0 and c1 must be nonzero")

    @classmethod
    def from_gauss_maps(cls, Gp, Gm, base_point, punctures=(), exclusion=0.05):
        """Deterministic constants: c0 = 1, c1 = G+(z_b) - G-(z_b)."""
        zb = complex(base_point)
        c1 = Gp(zb) - Gm(zb)
        if c1 == 0:
            raise ValueError("Gauss maps collide at the base point")
        return cls(Gp=Gp, Gm=Gm, base_point=zb, c0=1.0 + 0j, c1=c1,
                   punctures=punctures, exclusion=exclusion)

    def integrand_p(self):
        return self.Gp.diff() / (self.Gp - self.Gm)

    def integrand_m(self):
        return self.Gm.diff() / (self.Gm - self.Gp)

    def default_path(self, z):
        return avoiding_path(self.base_point, z, punctures=self.punctures,
                             exclusion=self.exclusion)


@dataclass(frozen=True)
class FrontalSample:
    z: complex
    X: np.ndarray
    N: np.ndarray
    singular: bool = False


def _re_integrals_expr(FF: FlatFrontData, path) -> tuple:
    ip = integrate_path(FF.integrand_p(), path, tolerance=XI_TOL).real
    im = integrate_path(FF.integrand_m(), path, tolerance=XI_TOL).real
    return ip, im


def xi_norms(FF: FlatFrontData, z, path=None):
    """(|xi+|^2, |xi-|^2) at z, integrating from the base point.

    Both real integrals are computed independently; the product identity
    |xi+|^2 |xi-|^2 = |G+ - G-|^2 is a checkable consequence, not an
    enforced constraint.
    """
    z = complex(z)
    if path is None:
        if abs(z - FF.base_point) < 1e-15:
            ip = im = 0.0
        else:
            path = FF.default_path(z)
    if path is not None:
        ip, im = _re_integrals_expr(FF, path)
    return (abs(FF.c1) ** 2 * math.exp(2.0 * ip),
            abs(FF.c0) ** 2 * math.exp(2.0 * im))


def _assemble(gp, gm, xp2, xm2):
    """Hyperboloid point and unit normal from Gauss-map values and
    the squared xi norms."""
    ap = (abs(gp) ** 2 + 1.0) / xp2
    am = (abs(gm) ** 2 + 1.0) / xm2
    bp = (abs(gp) ** 2 - 1.0) / xp2
    bm = (abs(gm) ** 2 - 1.0) / xm2
    w = gm / xm2 + gp / xp2
    nw = -gm / xm2 + gp / xp2
    X = np.array([0.5 * (am + ap), w.real, w.imag, 0.5 * (bm + bp)])
    N = np.array([0.5 * (ap - am), nw.real, nw.imag, 0.5 * (bp - bm)])
    return X, N


def _check_distinct(gp, gm, z):
    if abs(gp - gm) < 1e-13 * (1.0 + abs(gp) + abs(gm)):
        raise DegenerateEnvelopeError(
            f"Gauss maps agree at z = {z!r}: no frontal there")


def flat_front_point(FF: FlatFrontData, z, path=None, singular_probe=1e-5):
    """FrontalSample of the flat front at z.

    The singular flag comes from a finite-difference rank test of dX
    (smallest singular value below 1e-6 of the largest).  Set
    singular_probe to None to skip it.
    """
    z = complex(z)
    gp = FF.Gp(z)
    gm = FF.Gm(z)
    _check_distinct(gp, gm, z)
    xp2, xm2 = xi_norms(FF, z, path=path)
    X, N = _assemble(gp, gm, xp2, xm2)

    singular = False
    if singular_probe is not None:
        eps = singular_probe * (1.0 + abs(z))
        pts = {}
        for key, dz in ((1, eps), (-1, -eps), (2, 1j * eps), (-2, -1j * eps)):
            seg = PathSpec([LineSeg(z, z + dz)], tolerance=1e-15)
            dip, dim = _re_integrals_expr(FF, seg)
            gpd = FF.Gp(z + dz)
            gmd = FF.Gm(z + dz)
            pts[key], _ = _assemble(gpd, gmd, xp2 * math.exp(2 * dip),
                                    xm2 * math.exp(2 * dim))
        Xu = (pts[1] - pts[-1]) / (2 * eps)
        Xv = (pts[2] - pts[-2]) / (2 * eps)
        singular = _rank_deficient(Xu, Xv)
    return FrontalSample(z=z, X=X, N=N, singular=singular)


def _rank_deficient(Xu, Xv, threshold=1e-6):
    a = Xu @ Xu
    b = Xu @ Xv
    c = Xv @ Xv
    tr = a + c
    disc = math.sqrt(max((a - c) ** 2 + 4 * b * b, 0.0))
    smax2 = 0.5 * (tr + disc)
    smin2 = 0.5 * (tr - disc)
    if smax2 <= 0:
        return True
    return smin2 < (threshold ** 2) * smax2


def _smooth_re_integrals(Gp, Gm, path, rtol=1e-10, n0=64, n_max=1 << 17):
    """Re integrals of dG+/(G+-G-) and dG-/(G--G+) for merely smooth
    (callable) Gauss maps: midpoint increment sums with doubling."""

    def one_pass(n):
        ip = 0.0
        im = 0.0
        for seg in path.segments:
            ts = np.linspace(0.0, 1.0, n + 1)
            zs = np.array([seg.point(t) for t in ts])
            zmid = np.array([seg.point(0.5 * (ts[j] + ts[j + 1]))
                             for j in range(n)])
            gp = np.array([complex(Gp(z)) for z in zs])
            gm = np.array([complex(Gm(z)) for z in zs])
            gpm = np.array([complex(Gp(z)) for z in zmid])
            gmm = np.array([complex(Gm(z)) for z in zmid])
            den = gpm - gmm
            if np.any(np.abs(den) < 1e-13):
                raise DegenerateEnvelopeError("Gauss maps collide on the path")
            ip += float(np.sum((np.diff(gp) / den).real))
            im += float(np.sum((np.diff(gm) / (-den)).real))
        return ip, im

    n = n0
    prev = one_pass(n)
    while n < n_max:
        n *= 2
        cur = one_pass(n)
        if max(abs(cur[0] - prev[0]), abs(cur[1] - prev[1])) < rtol * (
                1.0 + abs(cur[0]) + abs(cur[1])):
            return cur
        prev = cur
    return prev


def frontal_from_gauss(Gp, Gm, c0, c1, z, path, singular_probe=None):
    """General frontal from a smooth Gauss-map pair.

    Meromorphic inputs take exactly the code path of flat_front_point
    (identical floats); plain callables are integrated by midpoint
    increment sums.  Rejects points where the two maps agree.
    """
    z = complex(z)
    c0 = complex(c0)
    c1 = complex(c1)
    if c0 == 0 or c1 == 0:
        raise ValueError("c0 and c1 must be nonzero")
    if isinstance(Gp, MeroExpr) and isinstance(Gm, MeroExpr):
        FF = FlatFrontData(Gp=Gp, Gm=Gm, base_point=path.start, c0=c0, c1=c1)
        return flat_front_point(FF, z, path=path, singular_probe=singular_probe)
    gp = complex(Gp(z))
    gm = complex(Gm(z))
    _check_distinct(gp, gm, z)
    ip, im = _smooth_re_integrals(Gp, Gm, path)
    xp2 = abs(c1) ** 2 * math.exp(2 * ip)
    xm2 = abs(c0) ** 2 * math.exp(2 * im)
    X, N = _assemble(gp, gm, xp2, xm2)
    return FrontalSample(z=z, X=X, N=N, singular=False)


def existence_residual(Gp, Gm, loop: LoopSpec):
    """Re of the loop integral of dG+/(G+ - G-); must vanish for the
    frontal to exist across the enclosed region."""
    path = loop.to_path(tolerance=1e-11)
    if isinstance(Gp, MeroExpr) and isinstance(Gm, MeroExpr):
        return integrate_path(Gp.diff() / (Gp - Gm), path).real
    ip, _ = _smooth_re_integrals(Gp, Gm, path)
    return ip


# ---------------------------------------------------------------------------
# Envelopes of the induced sphere congruence


def envelopes(X, N):
    """The two R^3 envelopes (X+, N+, X-, N-) of the congruence of
    spheres with centers x and radii r, where X = (r, x), N = (s, n).

    Requires r^2 != s^2 (non-degenerate spheres)."""
    X = np.asarray(X, dtype=float)
    N = np.asarray(N, dtype=float)
    r, x = X[0], X[1:]
    s, n = N[0], N[1:]
    scale = abs(r) + abs(s) + 1e-300
    if abs(r + s) < 1e-12 * scale or abs(r - s) < 1e-12 * scale:
        raise DegenerateEnvelopeError("r^2 = s^2: degenerate sphere congruence")
    Np = (x + n) / (r + s)
    Nm = (x - n) / (r - s)
    Xp = x - r * Np
    Xm = x - r * Nm
    return Xp, Np, Xm, Nm


def recover_from_envelopes(Xp, Np, Xm, Nm):
    """Frontal (X, N) in H^3 from its two envelopes, via the support
    functions rho+- = <X+-, N+->."""
    Xp, Np, Xm, Nm = (np.asarray(v, dtype=float) for v in (Xp, Np, Xm, Nm))
    if np.linalg.norm(Np - Nm) < 1e-12:
        raise DegenerateEnvelopeError("N+ = N-: normals must differ")
    rp = Xp @ Np
    rm = Xm @ Nm
    if abs(rp) < 1e-300 or abs(rm) < 1e-300:
        raise DegenerateEnvelopeError("vanishing support function")
    ep = np.concatenate(([1.0], Np))
    em = np.concatenate(([1.0], Nm))
    X = -ep / (2 * rp) - em / (2 * rm)
    N = -ep / (2 * rp) + em / (2 * rm)
    return X, N


def to_ball(v):
    """Hyperboloid -> Poincare ball: (x1, x2, x3) / (1 + x0)."""
    v = np.asarray(v, dtype=float)
    if abs(mink(v, v) + 1.0) > 1e-6 or v[0] <= 0:
        raise ValueError("not a point of the hyperboloid model")
    return v[1:] / (1.0 + v[0])


# ---------------------------------------------------------------------------
# Grid evaluation


def _edge_re_integrals(FF):
    fp = compiled(FF.integrand_p())
    fm = compiled(FF.integrand_m())
    from .mexpr import _gl15

    def edge(z0, z1):
        seg = LineSeg(z0, z1)
        ip = _gl15(lambda t: fp(seg.point(t)) * seg.velocity(t), 0.0, 1.0).real
        im = _gl15(lambda t: fm(seg.point(t)) * seg.velocity(t), 0.0, 1.0).real
        return np.array([ip, im])

    return edge


def front_grid(FF: FlatFrontData, grid: DomainGrid):
    """X, N and validity over a structured grid.

    The two real exponential integrals are accumulated over a spanning
    tree of the grid (single 15-point panel per edge); this is well
    defined because their loop periods vanish for valid data.  Returns
    (X (nu,nv,4), N (nu,nv,4), ok mask, singular mask).
    """
    flat_keep = np.argwhere(grid.keep)
    if len(flat_keep) == 0:
        raise ValueError("empty grid")
    dists = [abs(grid.zs[tuple(rc)] - FF.base_point) for rc in flat_keep]
    root = tuple(flat_keep[int(np.argmin(dists))])
    z_root = grid.zs[root]
    if abs(z_root - FF.base_point) < 1e-15:
        root_val = np.zeros(2)
    else:
        path = FF.default_path(z_root)
        root_val = np.array(_re_integrals_expr(FF, path))

    guard = puncture_clear_edge(FF.punctures, 0.5 * FF.exclusion)
    integrals, reached = accumulate_over_grid(
        grid, root, root_val, _edge_re_integrals(FF), edge_ok=guard)

    nu, nv = grid.nu, grid.nv
    X = np.full((nu, nv, 4), np.nan)
    N = np.full((nu, nv, 4), np.nan)
    ok = np.zeros((nu, nv), dtype=bool)
    gp_c = compiled(FF.Gp)
    gm_c = compiled(FF.Gm)
    c0sq = abs(FF.c0) ** 2
    c1sq = abs(FF.c1) ** 2
    for iu in range(nu):
        for iv in range(nv):
            if not reached[iu, iv]:
                continue
            z = grid.zs[iu, iv]
            try:
                gp = gp_c(z)
                gm = gm_c(z)
                _check_distinct(gp, gm, z)
                xp2 = c1sq * math.exp(2 * integrals[iu, iv, 0])
                xm2 = c0sq * math.exp(2 * integrals[iu, iv, 1])
            except (PoleSignal, DegenerateEnvelopeError, OverflowError):
                continue
            X[iu, iv], N[iu, iv] = _assemble(gp, gm, xp2, xm2)
            ok[iu, iv] = True

    singular = _grid_singular_mask(grid, X, ok)
    return X, N, ok, singular


def _grid_singular_mask(grid, X, ok):
    """Rank test of dX by differences of neighbouring grid values."""
    nu, nv = grid.nu, grid.nv
    singular = np.zeros((nu, nv), dtype=bool)
    for iu in range(1, nu - 1):
        for iv in range(nv):
            ivp = (iv + 1) % nv if grid.wrap_v else iv + 1
            ivm = (iv - 1) % nv if grid.wrap_v else iv - 1
            if ivp >= nv or ivm < 0:
                continue
            if not (ok[iu, iv] and ok[iu + 1, iv] and ok[iu - 1, iv]
                    and ok[iu, ivp] and ok[iu, ivm]):
                continue
            Xu = X[iu + 1, iv] - X[iu - 1, iv]
            Xv = X[iu, ivp] - X[iu, ivm]
            singular[iu, iv] = _rank_deficient(Xu, Xv)
    return singular


def front_ball_vertices(FF: FlatFrontData, grid: DomainGrid):
    """Ball-model vertex positions over the grid, for meshing."""
    X, _, ok, singular = front_grid(FF, grid)
    nu, nv = grid.nu, grid.nv
    values = np.zeros((nu, nv, 3))
    for iu in range(nu):
        for iv in range(nv):
            if ok[iu, iv]:
                values[iu, iv] = X[iu, iv, 1:] / (1.0 + X[iu, iv, 0])
    return values, ok, singular


# ---------------------------------------------------------------------------
# Fundamental-form relations on a sample grid


def _central(F, step, axis):
    sl_p = [slice(1, -1)] * 2
    sl_m = [slice(1, -1)] * 2
    sl_p[axis] = slice(2, None)
    sl_m[axis] = slice(0, -2)
    return (F[tuple(sl_p)] - F[tuple(sl_m)]) / (2.0 * step)


def _interior(F):
    return F[1:-1, 1:-1]


def form_relations_check(FF: FlatFrontData, center, n=50, step=1e-3):
    """Residuals of the fundamental-form identities on an n x n grid.

    Evaluates X, N and the two envelopes on a square grid of spacing
    `step` centered at `center`, forms I, II, III (Minkowski) and
    I+-, II+-, III+- (Euclidean) by central differences, and returns a
    dict of named residual maxima:

      hyperboloid   max of |<<X,X>>+1|, |<<N,N>>-1|, |<<X,N>>|
      xi_product    | |xi+|^2 |xi-|^2 - |G+-G-|^2 |
      symmetry      the envelope symmetry condition ||X+||^2 X- + X+
      form_transfer the three I/II/III transfer identities, both signs
      curvature_transfer   the K+- and H+- transfer identities
      theta         (rho+)^2 + rho+ lap rho+ - |grad rho+|^2  (on III+)
      brioschi      intrinsic curvature of I via the Brioschi formula

    Grid points whose dX rank test fails (plus one ring around them) are
    excluded from the curvature-layer maxima and counted in 'singular'.
    """
    center = complex(center)
    n = int(n)
    offs = (np.arange(n) - (n - 1) / 2.0) * step
    zs = center + offs[:, None] + 1j * offs[None, :]

    # Cumulative integrals: row 0 left-to-right, then columns upward.
    edge = _edge_re_integrals(FF)
    I2 = np.zeros((n, n, 2))
    path0 = FF.default_path(zs[0, 0])
    I2[0, 0] = _re_integrals_expr(FF, path0)
    for iv in range(1, n):
        I2[0, iv] = I2[0, iv - 1] + edge(zs[0, iv - 1], zs[0, iv])
    for iu in range(1, n):
        for iv in range(n):
            I2[iu, iv] = I2[iu - 1, iv] + edge(zs[iu - 1, iv], zs[iu, iv])

    gp_c = compiled(FF.Gp)
    gm_c = compiled(FF.Gm)
    gpv = np.array([[gp_c(z) for z in row] for row in zs])
    gmv = np.array([[gm_c(z) for z in row] for row in zs])
    xp2 = abs(FF.c1) ** 2 * np.exp(2 * I2[..., 0])
    xm2 = abs(FF.c0) ** 2 * np.exp(2 * I2[..., 1])

    ap = (np.abs(gpv) ** 2 + 1) / xp2
    am = (np.abs(gmv) ** 2 + 1) / xm2
    bp = (np.abs(gpv) ** 2 - 1) / xp2
    bm = (np.abs(gmv) ** 2 - 1) / xm2
    w = gmv / xm2 + gpv / xp2
    nw = -gmv / xm2 + gpv / xp2
    X = np.stack([0.5 * (am + ap), w.real, w.imag, 0.5 * (bm + bp)], axis=-1)
    N = np.stack([0.5 * (ap - am), nw.real, nw.imag, 0.5 * (bp - bm)], axis=-1)

    report = {}
    hyp = np.maximum(np.abs(mink(X, X) + 1.0),
                     np.maximum(np.abs(mink(N, N) - 1.0), np.abs(mink(X, N))))
    report["hyperboloid"] = {"max_residual": float(hyp.max()),
                             "tolerance": 1e-12}
    xiprod = np.abs(xp2 * xm2 - np.abs(gpv - gmv) ** 2)
    report["xi_product"] = {"max_residual": float(xiprod.max()),
                            "tolerance": 1e-10}

    r, s = X[..., 0], N[..., 0]
    x3 = X[..., 1:]
    n3 = N[..., 1:]
    Np = (x3 + n3) / (r + s)[..., None]
    Nm = (x3 - n3) / (r - s)[..., None]
    Xp = x3 - r[..., None] * Np
    Xm = x3 - r[..., None] * Nm

    sym = np.linalg.norm(
        (Xp * Xp).sum(-1)[..., None] * Xm + Xp, axis=-1)
    sym2 = np.linalg.norm(
        (Xm * Xm).sum(-1)[..., None] * Xp + Xm, axis=-1)
    report["symmetry"] = {"max_residual": float(max(sym.max(), sym2.max())),
                          "tolerance": 1e-10}

    # First-level derivative fields (interior of the grid).
    def d1(F):
        return _central(F, step, 0), _central(F, step, 1)

    Xu, Xv = d1(X)
    Nu, Nv = d1(N)

    E = mink(Xu, Xu)
    F_ = mink(Xu, Xv)
    G = mink(Xv, Xv)
    e = -mink(Xu, Nu)
    f_ = -0.5 * (mink(Xu, Nv) + mink(Xv, Nu))
    g_ = -mink(Xv, Nv)
    E3 = mink(Nu, Nu)
    F3 = mink(Nu, Nv)
    G3 = mink(Nv, Nv)

    singular = np.zeros((n - 2, n - 2), dtype=bool)
    a = (Xu * Xu).sum(-1)
    b = (Xu * Xv).sum(-1)
    c = (Xv * Xv).sum(-1)
    disc = np.sqrt(np.maximum((a - c) ** 2 + 4 * b * b, 0.0))
    smin2 = 0.5 * (a + c - disc)
    smax2 = 0.5 * (a + c + disc)
    singular |= smin2 < 1e-12 * smax2
    # Dilate by one ring: nested derivatives look one cell further out.
    dil = singular.copy()
    dil[1:, :] |= singular[:-1, :]
    dil[:-1, :] |= singular[1:, :]
    dil[:, 1:] |= singular[:, :-1]
    dil[:, :-1] |= singular[:, 1:]
    good = ~dil
    report["singular"] = {"count": int(singular.sum()),
                          "points": int(singular.size)}

    def emax(arr, mask=None):
        if mask is not None:
            if not mask.any():
                return float("nan")
            return float(np.abs(arr[mask]).max())
        return float(np.abs(arr).max())

    rI = _interior(r)
    sI = _interior(s)

    def euclid_forms(P, Q):
        Pu, Pv = d1(P)
        Qu, Qv = d1(Q)
        return {
            "E": (Pu * Pu).sum(-1), "F": (Pu * Pv).sum(-1),
            "G": (Pv * Pv).sum(-1),
            "e": -(Pu * Qu).sum(-1),
            "f": -0.5 * ((Pu * Qv).sum(-1) + (Pv * Qu).sum(-1)),
            "g": -(Pv * Qv).sum(-1),
            "E3": (Qu * Qu).sum(-1), "F3": (Qu * Qv).sum(-1),
            "G3": (Qv * Qv).sum(-1),
        }

    fp = euclid_forms(Xp, Np)
    fm = euclid_forms(Xm, Nm)

    transfer_max = 0.0
    curvature_max = 0.0
    det = E * G - F_ * F_
    Ke = (e * g_ - f_ * f_) / det
    H = (E * g_ - 2 * F_ * f_ + G * e) / (2 * det)
    for sgn, ff in ((+1.0, fp), (-1.0, fm)):
        for A, B, C, D_ in ((E, ff["E"], ff["E3"], ff["e"]),
                            (F_, ff["F"], ff["F3"], ff["f"]),
                            (G, ff["G"], ff["G3"], ff["g"])):
            resI = A - (B + rI ** 2 * C - 2 * rI * D_)
            transfer_max = max(transfer_max, emax(resI, good))
        for A, B, C, D_ in ((E3, ff["E"], ff["E3"], ff["e"]),
                            (F3, ff["F"], ff["F3"], ff["f"]),
                            (G3, ff["G"], ff["G3"], ff["g"])):
            resIII = A - (B + sI ** 2 * C + sgn * 2 * sI * D_)
            transfer_max = max(transfer_max, emax(resIII, good))
        for A, B, C, D_ in ((e, ff["E"], ff["E3"], ff["e"]),
                            (f_, ff["F"], ff["F3"], ff["f"]),
                            (g_, ff["G"], ff["G3"], ff["g"])):
            resII = A - (sgn * B - rI * sI * C + (sI - sgn * rI) * D_)
            transfer_max = max(transfer_max, emax(resII, good))

        detE = ff["E"] * ff["G"] - ff["F"] ** 2
        KE = (ff["e"] * ff["g"] - ff["f"] ** 2) / detE
        HE = (ff["E"] * ff["g"] - 2 * ff["F"] * ff["f"] + ff["G"] * ff["e"]) / (2 * detE)
        Dh = sI ** 2 + 2 * H * rI * sI + Ke * rI ** 2
        curvature_max = max(curvature_max,
                            emax(KE - (1.0 - sgn * 2 * H + Ke) / Dh, good))
        curvature_max = max(curvature_max,
                            emax(HE - (H * (sI - sgn * rI) + rI * Ke - sgn * sI) / Dh,
                                 good))

    report["form_transfer"] = {"max_residual": transfer_max, "tolerance": 1e-4}
    report["curvature_transfer"] = {"max_residual": curvature_max,
                                    "tolerance": 1e-3}

    # Theta on the spherical metric III+ of the plus-envelope.
    rho = (Xp * Np).sum(-1)
    rho_u, rho_v = d1(rho)
    E3p = fp["E3"]
    F3p = fp["F3"]
    G3p = fp["G3"]
    det3 = E3p * G3p - F3p ** 2
    grad2 = (G3p * rho_u ** 2 - 2 * F3p * rho_u * rho_v + E3p * rho_v ** 2) / det3
    sq = np.sqrt(np.abs(det3))
    A_ = (G3p * rho_u - F3p * rho_v) / sq
    B_ = (E3p * rho_v - F3p * rho_u) / sq
    lap = (_central(A_, step, 0) + _central(B_, step, 1)) / _interior(sq)
    rho_i = _interior(_interior(rho))
    theta = rho_i ** 2 + rho_i * lap - _interior(grad2)
    report["theta"] = {"max_residual": emax(theta, _interior(good)),
                       "tolerance": 1e-3}

    # Brioschi intrinsic curvature of I (zero for a flat front).
    Eu, Ev = d1(E)
    Fu, Fv = d1(F_)
    Gu, Gv = d1(G)
    Evv = _central(Ev, step, 1)
    Guu = _central(Gu, step, 0)
    Fuv = _central(Fu, step, 1)
    Ei, Fi, Gi = (_interior(_interior(q)) for q in (E, F_, G))
    Eui, Evi = _interior(Eu), _interior(Ev)
    Fui, Fvi = _interior(Fu), _interior(Fv)
    Gui, Gvi = _interior(Gu), _interior(Gv)

    def det3x3(m):
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))

    M1 = [[-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eui, Fui - 0.5 * Evi],
          [Fvi - 0.5 * Gui, Ei, Fi],
          [0.5 * Gvi, Fi, Gi]]
    M2 = [[np.zeros_like(Ei), 0.5 * Evi, 0.5 * Gui],
          [0.5 * Evi, Ei, Fi],
          [0.5 * Gui, Fi, Gi]]
    KI = (det3x3(M1) - det3x3(M2)) / (Ei * Gi - Fi * Fi) ** 2
    report["brioschi"] = {"max_residual": emax(KI, _interior(_interior(good))),
                          "tolerance": 1e-3}

    return report
