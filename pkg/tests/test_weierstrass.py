import cmath
import math

import numpy as np
import pytest

from ribflat.mexpr import Const, Z, PathError, parse_expr, path_from_points
from ribflat.weierstrass import (
    WeierstrassData, default_path, fd_gauss_curv, gauss_curv, gauss_normal,
    immerse, immerse_stencil, metric_factor, phi_forms,
)


def rand_points(n, r_min, r_max, seed=0):
    rng = np.random.default_rng(seed)
    return [rng.uniform(r_min, r_max) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
            for _ in range(n)]


def test_data_validation(catenoid_W):
    with pytest.raises(ValueError):
        WeierstrassData(f=parse_expr("1/z^2"), g=Z, punctures=[0], base_point=0.0)
    with pytest.raises(ValueError):
        WeierstrassData(f=parse_expr("1/z"), g=Z, base_point=0.0)  # pole of f
    with pytest.raises(ValueError):
        WeierstrassData(f=Const(1.0), g=Const(2.0))  # constant Gauss map


def test_phi_forms_catenoid(catenoid_W):
    _p1, _p2, p3 = phi_forms(catenoid_W)
    for z in rand_points(20, 0.3, 2.5, seed=1):
        assert abs(p3(z) - 1.0 / z) < 1e-14


def test_phi_forms_plane_case():
    f = parse_expr("exp(z)")
    p1, p2, p3 = phi_forms((f, Const(0.0)))
    for z in (0.3, 1 + 1j, -0.5j):
        assert abs(p1(z) - 0.5 * f(z)) < 1e-14
        assert abs(p2(z) - 0.5j * f(z)) < 1e-14
        assert p3(z) == 0


def test_phi_forms_trinoid(trinoid_W):
    _p1, _p2, p3 = phi_forms(trinoid_W)
    for z in rand_points(20, 0.2, 2.0, seed=2):
        assert abs(p3(z) - z ** 2 / (z ** 3 - 1) ** 2) < 1e-12


def test_immerse_at_base_point(catenoid_W):
    assert np.allclose(immerse(catenoid_W, 1.0), (-1.0, 0.0, 0.0))


def test_immerse_standard_catenoid_height(catenoid_W):
    # Base value pinned so the immersion is the standard catenoid:
    # third coordinate ln|z| vanishes on the unit circle.
    for th in (0.4, 1.3, 2.2, -2.8):
        p = immerse(catenoid_W, cmath.exp(1j * th))
        assert abs(p[2]) < 1e-12
        assert abs(math.hypot(p[0], p[1]) - 1.0) < 1e-12


def test_immerse_homotopic_paths_agree(catenoid_W):
    z = -1.4 + 0.6j
    p_default = immerse(catenoid_W, z)
    detour = path_from_points([1.0, 1.0 + 1.8j, -1.4 + 1.8j, z])
    p_detour = immerse(catenoid_W, z, path=detour)
    assert np.abs(p_default - p_detour).max() < 1e-10


def test_immerse_loop_period_is_real_form_period():
    # f = i/z has a real period -pi for the first coordinate around 0;
    # homotopy classes differ by exactly that period vector.
    W = WeierstrassData(f=parse_expr("i/z"), g=Z, punctures=[0], base_point=1.0)
    z = -1.3 - 0.4j
    up = immerse(W, z, path=path_from_points([1.0, 1.0 + 1.5j, -1.3 + 1.5j, z]))
    down = immerse(W, z, path=path_from_points([1.0, 1.0 - 1.5j, -1.3 - 1.5j, z]))
    assert np.abs((up - down) - np.array([-math.pi, 0.0, 0.0])).max() < 1e-10


def test_gauss_normal_conventions(catenoid_W):
    tiny = WeierstrassData(f=Const(1.0), g=Z, base_point=1.0)
    assert np.allclose(gauss_normal(tiny, 0.0), (0, 0, -1))
    assert np.allclose(gauss_normal(tiny, 1.0), (1, 0, 0))
    pole_g = WeierstrassData(f=parse_expr("z^2"), g=parse_expr("1/z"),
                             punctures=[0], base_point=1.0)
    assert np.allclose(gauss_normal(pole_g, 0.0), (0, 0, 1))


def test_gauss_normal_unit_length(catenoid_W):
    for z in rand_points(1000, 0.2, 3.0, seed=3):
        n = gauss_normal(catenoid_W, z)
        assert abs(n @ n - 1.0) < 1e-14


def test_metric_factor(catenoid_W):
    for th in (0.0, 0.9, 2.4):
        assert abs(metric_factor(catenoid_W, cmath.exp(1j * th)) - 1.0) < 1e-14
    assert abs(metric_factor((Const(2.0), Const(0.0)), 0.7) - 1.0) < 1e-15
    for z in rand_points(50, 0.3, 2.0, seed=4):
        assert metric_factor(catenoid_W, z) > 0


def test_gauss_curv(catenoid_W):
    assert abs(gauss_curv(catenoid_W, 1.0) + 1.0) < 1e-14
    assert gauss_curv((Const(1.0), Const(3.0)), 0.5) == 0.0
    for z in rand_points(100, 0.3, 2.5, seed=5):
        assert gauss_curv(catenoid_W, z) <= 0


def test_gauss_curv_vs_finite_difference(catenoid_W):
    for z in (1.0, 1.3 + 0.4j, 0.8 - 0.9j):
        assert abs(gauss_curv(catenoid_W, z) - fd_gauss_curv(catenoid_W, z)) < 1e-3


def test_harmonicity(catenoid_W):
    eps = 1e-3
    for z in (1.1 + 0.2j, 0.8 - 0.5j, -1.3 + 0.7j, 1.7 + 1.1j):
        st = immerse_stencil(catenoid_W, z, eps)
        lap = (st[(1, 0)] + st[(-1, 0)] + st[(0, 1)] + st[(0, -1)]
               - 4 * st[(0, 0)]) / eps ** 2
        assert np.abs(lap).max() < 1e-4


def test_tangency_and_conformality(catenoid_W):
    eps = 1e-4
    for z in (1.1 + 0.2j, 0.8 - 0.5j, -1.3 + 0.7j):
        st = immerse_stencil(catenoid_W, z, eps)
        Zu = (st[(1, 0)] - st[(-1, 0)]) / (2 * eps)
        Zv = (st[(0, 1)] - st[(0, -1)]) / (2 * eps)
        n = gauss_normal(catenoid_W, z)
        assert abs(n @ Zu) < 1e-6 and abs(n @ Zv) < 1e-6
        lam2 = metric_factor(catenoid_W, z)
        assert abs(Zu @ Zu - Zv @ Zv) / lam2 < 1e-6
        assert abs(Zu @ Zv) / lam2 < 1e-6


def test_default_path_avoids_punctures(catenoid_W):
    # Straight path from 1 to -1 would cross the puncture at 0.
    path = default_path(catenoid_W, -1.0 + 0.0j)
    assert path.min_distance(0.0) >= 0.05 * (1 - 1e-9)
    with pytest.raises(PathError):
        default_path(catenoid_W, 1e-12)
