import cmath
import math

import numpy as np
import pytest

from ribflat.mexpr import Const, LoopSpec, Z, parse_expr, path_from_points
from ribflat.weierstrass import gauss_normal
from ribflat.hfront import (
    DegenerateEnvelopeError, FlatFrontData, envelopes, existence_residual,
    flat_front_point, form_relations_check, front_ball_vertices,
    frontal_from_gauss, mink, recover_from_envelopes, to_ball, xi_norms,
)
from ribflat.ribaucour import pair_front


@pytest.fixture(scope="module")
def helicoidal():
    # G- = G+/2: the front associated with the self-transform of the
    # catenoid; xi+ = z^2/2 and xi- = 1/z in closed form (base point 1).
    return FlatFrontData.from_gauss_maps(Z, parse_expr("z/2"), 1.0,
                                         punctures=[0])


def rand_points(n, r_min, r_max, seed=0, center=0j, avoid=(), clearance=0.15):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        z = center + rng.uniform(r_min, r_max) * cmath.exp(
            1j * rng.uniform(-math.pi, math.pi))
        if all(abs(z - a) > clearance for a in avoid):
            out.append(z)
    return out


def test_constants_pinned(helicoidal):
    assert helicoidal.c0 == 1.0
    assert helicoidal.c1 == 0.5


def test_xi_norms_closed_form(helicoidal):
    for z in rand_points(50, 0.3, 2.2, seed=1, avoid=[0]):
        xp2, xm2 = xi_norms(helicoidal, z)
        assert abs(xp2 - abs(z) ** 4 / 4) < 1e-12 * (1 + abs(z) ** 4)
        assert abs(xm2 - 1 / abs(z) ** 2) < 1e-12


def test_xi_product_constraint(helicoidal):
    for z in rand_points(500, 0.3, 2.2, seed=2, avoid=[0]):
        xp2, xm2 = xi_norms(helicoidal, z)
        assert abs(xp2 * xm2 - abs(z / 2) ** 2) < 1e-10


def test_xi_homotopic_paths(helicoidal):
    z = -1.2 + 0.7j
    detour = path_from_points([1.0, 1.0 + 1.6j, -1.2 + 1.6j, z])
    direct = helicoidal.default_path(z)
    a = xi_norms(helicoidal, z, path=direct)
    b = xi_norms(helicoidal, z, path=detour)
    assert abs(a[0] - b[0]) < 1e-10 and abs(a[1] - b[1]) < 1e-10


def test_hand_computed_point(helicoidal):
    s = flat_front_point(helicoidal, 1.0)
    assert np.abs(s.X - np.array([4.625, 4.5, 0.0, -0.375])).max() < 1e-14
    assert abs(mink(s.X, s.X) + 1.0) < 1e-12


def test_pointwise_lorentz_identities(helicoidal):
    for z in rand_points(500, 0.05, 0.45, seed=3, center=1.0, avoid=[0]):
        s = flat_front_point(helicoidal, z, singular_probe=None)
        assert abs(mink(s.X, s.X) + 1.0) < 1e-12
        assert abs(mink(s.N, s.N) - 1.0) < 1e-12
        assert abs(mink(s.X, s.N)) < 1e-12


def test_front_plus_normal_points_to_plus_gauss_map(helicoidal):
    for z in rand_points(50, 0.05, 0.45, seed=4, center=1.0):
        s = flat_front_point(helicoidal, z, singular_probe=None)
        v = s.X + s.N
        gp = helicoidal.Gp(z)
        d = 1 + abs(gp) ** 2
        direction = np.array([1.0, 2 * gp.real / d, 2 * gp.imag / d,
                              (d - 2) / d])
        assert v[0] > 0
        assert np.abs(v - v[0] * direction).max() < 1e-10


def test_frontal_from_gauss_reduces_to_flat_front(helicoidal):
    z = 1.3 + 0.4j
    path = helicoidal.default_path(z)
    a = flat_front_point(helicoidal, z, path=path, singular_probe=None)
    b = frontal_from_gauss(helicoidal.Gp, helicoidal.Gm, helicoidal.c0,
                           helicoidal.c1, z, path)
    assert (a.X == b.X).all() and (a.N == b.N).all()


def test_frontal_from_smooth_callables():
    # Non-holomorphic but valid: G- = G+ - 1 makes the connecting form
    # exact, so every loop integral is purely a boundary term.
    Gp = lambda z: z + 0.3 * z.conjugate()
    Gm = lambda z: Gp(z) - 1.0
    assert abs(existence_residual(Gp, Gm, LoopSpec(0.5, 0.4))) < 1e-8
    path = path_from_points([0.2, 1.1 + 0.6j])
    s = frontal_from_gauss(Gp, Gm, 1.0, 1.0, 1.1 + 0.6j, path)
    assert abs(mink(s.X, s.X) + 1.0) < 1e-8
    assert abs(mink(s.N, s.N) - 1.0) < 1e-8
    assert abs(mink(s.X, s.N)) < 1e-8


def test_frontal_rejects_colliding_maps():
    Gp = lambda z: z
    Gm = lambda z: z.conjugate()
    path = path_from_points([0.5j, 1.0])  # ends on the real axis: Gp = Gm
    with pytest.raises(DegenerateEnvelopeError):
        frontal_from_gauss(Gp, Gm, 1.0, 1.0, 1.0, path)


def test_existence_residual_for_front_data(helicoidal):
    assert abs(existence_residual(helicoidal.Gp, helicoidal.Gm,
                                  LoopSpec(0, 0.5))) < 1e-8


# -- envelopes ------------------------------------------------------------------

def test_envelope_identities(helicoidal):
    for z in rand_points(200, 0.05, 0.45, seed=5, center=1.0):
        s = flat_front_point(helicoidal, z, singular_probe=None)
        Xp, Np, Xm, Nm = envelopes(s.X, s.N)
        assert abs(Np @ Np - 1.0) < 1e-12
        assert abs(Nm @ Nm - 1.0) < 1e-12
        r, x = s.X[0], s.X[1:]
        assert np.abs(Xp + r * Np - x).max() < 1e-12
        assert np.abs(Xm + r * Nm - x).max() < 1e-12
        scale = 1 + Xp @ Xp + Xm @ Xm
        assert np.abs((Xp @ Xp) * Xm + Xp).max() < 1e-10 * scale
        assert np.abs((Xm @ Xm) * Xp + Xm).max() < 1e-10 * scale


def test_envelope_hand_values(helicoidal):
    s = flat_front_point(helicoidal, 1.0)
    Xp, Np, Xm, Nm = envelopes(s.X, s.N)
    assert np.abs(Xp - np.array([-0.125, 0.0, -0.375])).max() < 1e-14
    assert np.abs(Nm - np.array([0.8, 0.0, -0.6])).max() < 1e-14


def test_envelopes_reject_degenerate():
    X = np.array([1.0, 0.3, 0.0, 0.0])
    N = np.array([1.0, 0.9, 0.1, 0.0])  # r - s = 0
    with pytest.raises(DegenerateEnvelopeError):
        envelopes(X, N)


def test_recover_round_trip(helicoidal):
    for z in rand_points(500, 0.05, 0.45, seed=6, center=1.0):
        s = flat_front_point(helicoidal, z, singular_probe=None)
        Xp, Np, Xm, Nm = envelopes(s.X, s.N)
        X2, N2 = recover_from_envelopes(Xp, Np, Xm, Nm)
        assert np.abs(X2 - s.X).max() < 1e-10
        assert np.abs(N2 - s.N).max() < 1e-10
        assert abs(mink(X2, X2) + 1.0) < 1e-10


def test_recover_rejects_equal_normals():
    n = np.array([0.0, 0.0, 1.0])
    with pytest.raises(DegenerateEnvelopeError):
        recover_from_envelopes(np.array([1.0, 0, 0]), n,
                               np.array([0.0, 1, 0]), n)


# -- ball model -------------------------------------------------------------------

def test_to_ball_origin():
    assert np.allclose(to_ball(np.array([1.0, 0, 0, 0])), (0, 0, 0))


def test_to_ball_hand_point(helicoidal):
    b = to_ball(flat_front_point(helicoidal, 1.0).X)
    assert np.abs(b - np.array([0.8, 0.0, -1.0 / 15.0])).max() < 1e-12


def test_to_ball_stays_inside(helicoidal):
    for z in rand_points(1000, 0.3, 1.8, seed=7, avoid=[0]):
        b = to_ball(flat_front_point(helicoidal, z, singular_probe=None).X)
        assert np.linalg.norm(b) < 1.0


def test_to_ball_rejects_non_hyperboloid():
    with pytest.raises(ValueError):
        to_ball(np.array([1.0, 1.0, 0.0, 0.0]))


# -- pair-derived fronts ------------------------------------------------------------

def test_pair_front_gauss_maps(catenoid_pair):
    # The hyperbolic Gauss maps of the pair-derived front are exactly the
    # Gauss maps of the two minimal surfaces.
    FF = catenoid_pair.front
    for z in rand_points(60, 0.3, 1.8, seed=8, avoid=FF.punctures,
                         clearance=0.2):
        s = flat_front_point(FF, z, singular_probe=None)
        # X + N is a positive multiple of (1, stereographic(g))
        v = s.X + s.N
        n = gauss_normal(catenoid_pair.W, z)
        assert np.abs(v[1:] / v[0] - n).max() < 1e-8
        w = s.X - s.N
        nt = gauss_normal(catenoid_pair.W_t, z)
        assert np.abs(w[1:] / w[0] - nt).max() < 1e-8


def test_pair_front_form_relations(catenoid_pair):
    rep = form_relations_check(catenoid_pair.front, 1.2 + 1.2j, n=50, step=1e-3)
    assert rep["hyperboloid"]["max_residual"] < 1e-12
    assert rep["xi_product"]["max_residual"] < 1e-10
    assert rep["symmetry"]["max_residual"] < 1e-10
    assert rep["form_transfer"]["max_residual"] < 1e-4
    assert rep["curvature_transfer"]["max_residual"] < 1e-3
    assert rep["theta"]["max_residual"] < 1e-3
    assert rep["brioschi"]["max_residual"] < 1e-3


def test_front_grid_ball_mesh(catenoid_pair):
    from ribflat.meshio import DomainSpec, sample_domain
    FF = catenoid_pair.front
    spec = DomainSpec(kind="annulus", nu=12, nv=24, r_in=0.45, r_out=2.0,
                      punctures=FF.punctures, exclusion_radius=0.12)
    grid = sample_domain(spec)
    values, ok, singular = front_ball_vertices(FF, grid)
    assert ok.sum() > 0.6 * grid.keep.sum()
    norms = np.linalg.norm(values[ok], axis=1)
    assert (norms < 1.0).all()
