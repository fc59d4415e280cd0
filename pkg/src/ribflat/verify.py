"""Named, machine-readable checks over a transform pair and its front.

Every check samples deterministically (seed 0x5EED unless overridden),
reports the max residual over its sample set, and passes exactly when
max_residual < tolerance.  Evaluation failures (poles hit by a sample)
are counted; a check only fails from them when more than 1% of its
points are unusable.

Tolerance tiers: algebraic identities 1e-10 (tighter where the identity
is exact by construction), quadrature/ODE-backed identities 1e-6 to
1e-8, finite-difference-backed identities 1e-3 with step 1e-3.
"""

from __future__ import annotations

import math
import cmath
from dataclasses import dataclass, asdict

import numpy as np

from .mexpr import LoopSpec, PoleSignal, QuadratureError, compiled
from .weierstrass import (
    WeierstrassData, gauss_normal, immerse, immerse_stencil, metric_factor,
)
from .riccati import RiccatiSolution, monodromy_defect, period_real, residual
from .ribaucour import RibaucourPair, ribaucour_data, sphere_congruence
from .hfront import FlatFrontData, flat_front_point, form_relations_check, mink

__all__ = [
    "CheckReport", "DEFAULT_SEED", "sample_points",
    "check_riccati", "check_hopf", "check_minimal",
    "check_sphere_congruence", "check_flatness", "check_hyperboloid",
    "check_symmetry", "check_periods", "run_all",
]

DEFAULT_SEED = 0x5EED


@dataclass(frozen=True)
class CheckReport:
    name: str
    max_residual: float
    tolerance: float
    points_tested: int
    passed: bool
    n_failed: int = 0
    detail: str = ""

    @classmethod
    def build(cls, name, max_residual, tolerance, points_tested,
              n_failed=0, detail=""):
        too_many_failures = (points_tested > 0
                             and n_failed > 0.01 * (points_tested + n_failed))
        passed = (max_residual < tolerance) and not too_many_failures
        if too_many_failures and not detail:
            detail = f"{n_failed} evaluation failures"
        return cls(name=name, max_residual=float(max_residual),
                   tolerance=float(tolerance), points_tested=int(points_tested),
                   passed=bool(passed), n_failed=int(n_failed), detail=detail)

    def as_dict(self):
        return asdict(self)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}  {self.name:<22} max_residual={self.max_residual:.3e} "
                f"tolerance={self.tolerance:.1e} points={self.points_tested}"
                + (f" failures={self.n_failed}" if self.n_failed else ""))


def sample_points(seed, n, punctures=(), exclusion=0.12,
                  r_min=0.35, r_max=2.2, center=0j):
    """Deterministic sample of n points in an annulus, rejecting points
    near the punctures."""
    rng = np.random.default_rng(seed)
    punctures = [complex(p) for p in punctures]
    out = []
    attempts = 0
    while len(out) < n and attempts < 100 * n:
        attempts += 1
        r = rng.uniform(r_min, r_max)
        th = rng.uniform(-math.pi, math.pi)
        z = center + r * cmath.exp(1j * th)
        if all(abs(z - p) >= exclusion for p in punctures):
            out.append(z)
    if len(out) < n:
        raise RuntimeError("sampling could not avoid the punctures")
    return out


def _max_over(points, fn):
    worst = 0.0
    n_failed = 0
    n_ok = 0
    for z in points:
        try:
            worst = max(worst, fn(z))
            n_ok += 1
        except (PoleSignal, QuadratureError, ArithmeticError, OverflowError):
            n_failed += 1
    return worst, n_ok, n_failed


def check_riccati(pair: RibaucourPair, n=1000, seed=DEFAULT_SEED,
                  tolerance=1e-9):
    """|h' - k h^2 f + g'| at sampled points."""
    res = compiled(residual(pair.W, pair.k, pair.h))
    pts = sample_points(seed, n, pair.W_t.punctures)
    worst, n_ok, n_failed = _max_over(pts, lambda z: abs(res(z)))
    return CheckReport.build("riccati_residual", worst, tolerance, n_ok, n_failed)


def check_hopf(pair: RibaucourPair, n=1000, seed=DEFAULT_SEED,
               tolerance=1e-10):
    """Shared Hopf differential: f~ g~' = f g' pointwise."""
    lhs = compiled(pair.W_t.f * pair.W_t.g.diff())
    rhs = compiled(pair.W.f * pair.W.g.diff())
    pts = sample_points(seed, n, pair.W_t.punctures)
    worst, n_ok, n_failed = _max_over(pts, lambda z: abs(lhs(z) - rhs(z)))
    return CheckReport.build("hopf_preserved", worst, tolerance, n_ok, n_failed)


def check_minimal(W_t: WeierstrassData, n=40, seed=DEFAULT_SEED,
                  tolerance=1.0):
    """Harmonicity and conformality of the (transformed) immersion.

    Scaled residual: max over points of
      max(|5-point laplacian| / 1e-4,        step 1e-3
          conformality defect  / 1e-6,       step 3e-5, relative to the
          tangency defect      / 1e-6)        metric factor
    so the report passes at tolerance 1.0 exactly when each layer meets
    its own tier.  Sampling stays well away from the punctures: the
    finite-difference tiers assume order-one local geometry, which a
    second-order pole of the 1-form destroys within ~half a unit.
    """
    pts = sample_points(seed, n, W_t.punctures, exclusion=0.6,
                        r_min=0.7, r_max=1.9)

    def one(z):
        lap_eps = 1e-3
        st = immerse_stencil(W_t, z, lap_eps)
        lap = np.abs(st[(1, 0)] + st[(-1, 0)] + st[(0, 1)] + st[(0, -1)]
                     - 4 * st[(0, 0)]) / lap_eps ** 2
        d_eps = 3e-5
        st2 = immerse_stencil(W_t, z, d_eps, path=None)
        Zu = (st2[(1, 0)] - st2[(-1, 0)]) / (2 * d_eps)
        Zv = (st2[(0, 1)] - st2[(0, -1)]) / (2 * d_eps)
        lam2 = metric_factor(W_t, z)
        conf = max(abs(Zu @ Zu - Zv @ Zv), abs(Zu @ Zv)) / lam2
        nrm = gauss_normal(W_t, z)
        tang = max(abs(nrm @ Zu), abs(nrm @ Zv)) / math.sqrt(lam2)
        return max(lap.max() / 1e-4, conf / 1e-6, tang / 1e-6)

    worst, n_ok, n_failed = _max_over(pts, one)
    return CheckReport.build("minimal_immersion", worst, tolerance, n_ok,
                             n_failed,
                             detail="scaled residual (harmonicity/conformality)")


def check_sphere_congruence(pair: RibaucourPair, n=120, seed=DEFAULT_SEED,
                            tolerance=1e-8):
    """Both normalized immersions touch the congruence sphere:
    | ||Z- - center|| - radius | at sampled points."""
    pts = sample_points(seed, n, pair.front.punctures)

    def one(z):
        center, radius = sphere_congruence(pair, z)
        Zm = immerse(pair.normalized_minus, z)
        return abs(float(np.linalg.norm(Zm - center)) - radius)

    worst, n_ok, n_failed = _max_over(pts, one)
    return CheckReport.build("sphere_congruence", worst, tolerance, n_ok,
                             n_failed)


def check_flatness(FF: FlatFrontData, center=None, n=50, step=1e-3,
                   tolerance=1e-3):
    """Theta and the Brioschi intrinsic curvature on the sample grid;
    both vanish for a flat front."""
    if center is None:
        center = FF.base_point + 0.1 + 0.35j
    rep = form_relations_check(FF, center, n=n, step=step)
    worst = max(rep["theta"]["max_residual"], rep["brioschi"]["max_residual"])
    pts = (n - 4) ** 2
    return CheckReport.build("flatness", worst, tolerance, pts,
                             detail=f"grid center {center}")


def check_hyperboloid(FF: FlatFrontData, n=400, seed=DEFAULT_SEED,
                      tolerance=1e-12):
    """<<X,X>>+1, <<N,N>>-1 and <<X,N>> at sampled points.

    The identities are exact in the formulas; what remains is rounding
    amplified by the squared hyperboloid height x0^2 (near punctures x0
    grows without bound), so the residual is measured relative to
    (1 + x0^2).  At moderate heights this coincides with the absolute
    bound."""
    pts = sample_points(seed, n, FF.punctures, center=FF.base_point,
                        r_min=0.02, r_max=0.45)

    def one(z):
        s = flat_front_point(FF, z, singular_probe=None)
        scale = 1.0 + s.X[0] ** 2
        return max(abs(mink(s.X, s.X) + 1.0), abs(mink(s.N, s.N) - 1.0),
                   abs(mink(s.X, s.N))) / scale

    worst, n_ok, n_failed = _max_over(pts, one)
    return CheckReport.build("hyperboloid", worst, tolerance, n_ok, n_failed)


def check_symmetry(FF: FlatFrontData, n=400, seed=DEFAULT_SEED,
                   tolerance=1e-10):
    """Envelope symmetry condition ||X+||^2 X- + X+ = 0 (both mirrors),
    measured relative to the envelope scale 1 + ||X+||^2 + ||X-||^2."""
    from .hfront import envelopes

    pts = sample_points(seed, n, FF.punctures, center=FF.base_point,
                        r_min=0.02, r_max=0.45)

    def one(z):
        s = flat_front_point(FF, z, singular_probe=None)
        Xp, Np, Xm, Nm = envelopes(s.X, s.N)
        scale = 1.0 + Xp @ Xp + Xm @ Xm
        r1 = np.linalg.norm((Xp @ Xp) * Xm + Xp)
        r2 = np.linalg.norm((Xm @ Xm) * Xp + Xm)
        return max(float(r1), float(r2)) / scale

    worst, n_ok, n_failed = _max_over(pts, one)
    return CheckReport.build("symmetry_condition", worst, tolerance, n_ok,
                             n_failed)


def check_periods(obj, loops, tolerance=1e-8):
    """Loop condition: Re loop-integral of dg/h for a pair (continued
    analytically around each loop), or of dG+/(G+-G-) for front data."""
    worst = 0.0
    n_failed = 0
    n_ok = 0
    for loop in loops:
        try:
            if isinstance(obj, RibaucourPair):
                sol = RiccatiSolution.from_expr(obj.h, obj.k)
                val = abs(period_real(obj.W, sol, loop))
            else:
                from .hfront import existence_residual
                val = abs(existence_residual(obj.Gp, obj.Gm, loop))
            worst = max(worst, val)
            n_ok += 1
        except (PoleSignal, QuadratureError, ArithmeticError):
            n_failed += 1
    return CheckReport.build("loop_periods", worst, tolerance, n_ok, n_failed)


def run_all(pair: RibaucourPair, loops=(), seed=DEFAULT_SEED, tol_scale=1.0,
            flatness_center=None):
    """The whole suite over a pair and its derived front, with every
    tolerance multiplied by tol_scale."""
    FF = pair.front
    reports = [
        check_riccati(pair, seed=seed, tolerance=1e-9 * tol_scale),
        check_hopf(pair, seed=seed, tolerance=1e-10 * tol_scale),
        check_minimal(pair.W_t, seed=seed, tolerance=tol_scale),
        check_sphere_congruence(pair, seed=seed, tolerance=1e-8 * tol_scale),
        check_flatness(FF, center=flatness_center, tolerance=1e-3 * tol_scale),
        check_hyperboloid(FF, seed=seed, tolerance=1e-12 * tol_scale),
        check_symmetry(FF, seed=seed, tolerance=1e-10 * tol_scale),
    ]
    if loops:
        reports.append(check_periods(pair, loops, tolerance=1e-8 * tol_scale))
    return reports
