import cmath
import math
import types

import numpy as np
import pytest

from ribflat.mexpr import Const, LoopSpec, Z, parse_expr, path_from_points
from ribflat.weierstrass import WeierstrassData
from ribflat.riccati import (
    RiccatiSolution, catenoid_closed_form, monodromy_defect, period_real,
    residual, singular_indices, solve_along, trinoid_closed_form,
)

from conftest import CBRT2_ROOTS


def rand_points(n, r_min, r_max, seed=0):
    rng = np.random.default_rng(seed)
    return [rng.uniform(r_min, r_max) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
            for _ in range(n)]


POLE_PATH_TARGET = cmath.exp(1j * math.pi / 3)  # nearest pole of the C=2 form


# -- closed forms ------------------------------------------------------------

def test_catenoid_closed_form_m3_C2():
    h, k = catenoid_closed_form(3, 2)
    assert k == 2.0
    ref = parse_expr("z*(2-z^3)/(2*(z^3+1))")
    for z in rand_points(200, 0.2, 2.5, seed=1):
        try:
            expected = ref(z)
        except Exception:
            continue
        assert abs(h(z) - expected) < 1e-12


def test_catenoid_closed_form_rejects_degenerate():
    with pytest.raises(ValueError):
        catenoid_closed_form(1, 0)  # k = 0
    with pytest.raises(ValueError):
        catenoid_closed_form(-2, 1)


def test_catenoid_closed_form_C0():
    h, k = catenoid_closed_form(3, 0)
    assert k == 2.0
    for z in (1.0, 0.5 + 0.5j, -1.2j):
        assert abs(h(z) + z / 2) < 1e-15


def test_trinoid_closed_form(trinoid_W):
    h, k = trinoid_closed_form()
    assert k == 5.0
    res = residual(trinoid_W, k, h)
    checked = 0
    for z in rand_points(1200, 0.2, 2.5, seed=2):
        try:
            assert abs(res(z)) < 1e-10
            checked += 1
        except AssertionError:
            raise
        except Exception:
            continue
    assert checked >= 1000
    from ribflat.mexpr import local_order
    assert abs(h(0.0)) == 0.0
    assert local_order(h, 0.0) == 2


# -- residuals ---------------------------------------------------------------

def test_residual_catenoid_family(catenoid_W):
    h, k = catenoid_closed_form(3, 2)
    res = residual(catenoid_W, k, h)
    checked = 0
    for z in rand_points(1200, 0.3, 3.0, seed=3):
        try:
            assert abs(res(z)) < 1e-9
            checked += 1
        except AssertionError:
            raise
        except Exception:
            continue
    assert checked >= 1000


def test_residual_of_zero_is_g_prime(catenoid_W):
    res = residual(catenoid_W, 2.0, Const(0.0))
    for z in (0.7, 1 + 1j, -2.0 + 0.3j):
        assert abs(res(z) - 1.0) < 1e-15  # g = z, so g' = 1 != 0


def test_bonnet_family_property(catenoid_W):
    rng = np.random.default_rng(7)
    for m in range(2, 7):
        C = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        h, k = catenoid_closed_form(m, C)
        assert abs(k - (m * m - 1) / 4) < 1e-15
        res = residual(catenoid_W, k, h)
        checked = 0
        for z in rand_points(300, 0.3, 2.5, seed=10 + m):
            try:
                assert abs(res(z)) < 1e-9
                checked += 1
            except AssertionError:
                raise
            except Exception:
                continue
        assert checked >= 200


# -- numeric integration -----------------------------------------------------

def test_solve_along_matches_closed_form(catenoid_W):
    h, k = catenoid_closed_form(3, 2)
    path = path_from_points([0.5, 1.5, 1.5 + 1j])
    sol = solve_along(catenoid_W, k, 0.5, h(0.5), path)
    assert sol.kind == "sampled"
    for s in sol.samples:
        assert abs(s.h() - h(s.z)) < 1e-6 * abs(h(s.z))


def test_solve_along_chart_switch_near_pole(catenoid_W):
    h, k = catenoid_closed_form(3, 2)
    target = POLE_PATH_TARGET + 0.025 * cmath.exp(1.1j)
    path = path_from_points([0.5, 1.5, 1.5 + 1j, target])
    sol = solve_along(catenoid_W, k, 0.5, h(0.5), path)
    assert sol.n_chart_switches >= 1
    assert {s.chart for s in sol.samples} == {"h", "mu"}
    for s in sol.samples:
        expected = h(s.z)
        assert abs(s.h() - expected) < 1e-6 * max(abs(expected), 1e-12)


def test_chart_consistency_at_switches(catenoid_W):
    h, k = catenoid_closed_form(3, 2)
    target = POLE_PATH_TARGET + 0.02
    path = path_from_points([0.5, 1.5, target])
    sol = solve_along(catenoid_W, k, 0.5, h(0.5), path)
    switches = 0
    for a, b in zip(sol.samples, sol.samples[1:]):
        if a.z == b.z and a.chart != b.chart:
            assert abs(a.value * b.value - 1.0) < 1e-10
            switches += 1
    assert switches == sol.n_chart_switches >= 1


def test_separable_case():
    # g' = 0, f = 1, k = 1: h' = h^2 with solution h0/(1 - h0 (z - z0)).
    data = types.SimpleNamespace(f=Const(1.0), g_prime=Const(0.0))
    h0 = 0.4 + 0.1j
    path = path_from_points([0.0, 1.0 + 0.5j])
    sol = solve_along(data, 1.0, 0.0, h0, path)
    for s in sol.samples:
        expected = h0 / (1 - h0 * s.z)
        assert abs(s.h() - expected) < 1e-8


def test_reversal_returns_start(catenoid_W):
    h, k = catenoid_closed_form(3, 2)
    path = path_from_points([0.5, 1.5, 1.5 + 1j])
    fwd = solve_along(catenoid_W, k, 0.5, h(0.5), path)
    end = fwd.samples[-1]
    back = solve_along(catenoid_W, k, end.z, end.h(), path.reversed())
    assert abs(back.samples[-1].h() - h(0.5)) < 1e-8


def test_self_convergence(catenoid_W):
    h, k = catenoid_closed_form(3, 2)
    path = path_from_points([0.5, 1.5, 1.5 + 1j])
    coarse = solve_along(catenoid_W, k, 0.5, h(0.5), path, rtol=1e-10)
    fine = solve_along(catenoid_W, k, 0.5, h(0.5), path, rtol=5e-11)
    assert abs(coarse.samples[-1].h() - fine.samples[-1].h()) < 1e-9


def test_trace_rows(catenoid_W):
    h, k = catenoid_closed_form(3, 2)
    sol = solve_along(catenoid_W, k, 0.5, h(0.5), path_from_points([0.5, 1.2]))
    rows = sol.trace_rows()
    assert len(rows) == len(sol.samples)
    assert all(len(r) == 5 and r[2] in ("h", "mu") for r in rows)


# -- period condition ----------------------------------------------------------

def loops_for_integer_case():
    return [LoopSpec(0, 0.1)] + [LoopSpec(w, 0.1) for w in CBRT2_ROOTS]


def test_period_vanishes_for_integer_m(catenoid_W):
    h, k = catenoid_closed_form(3, 2)
    sol = RiccatiSolution.from_expr(h, k)
    for loop in loops_for_integer_case():
        assert abs(period_real(catenoid_W, sol, loop)) < 1e-8
        # direct quadrature route agrees for the single-valued form
        assert abs(period_real(catenoid_W, h, loop)) < 1e-8


def test_period_vanishes_on_empty_loop(catenoid_W):
    h, k = catenoid_closed_form(3, 2)
    assert abs(period_real(catenoid_W, h, LoopSpec(1.8 + 1.8j, 0.1))) < 1e-10


def test_noninteger_m_breaks_well_definedness(catenoid_W):
    # m = 2.5: h is multivalued around 0; the analytic continuation does
    # not return to its start and the real period drifts off zero.
    h, k = catenoid_closed_form(2.5, 2)
    sol = RiccatiSolution.from_expr(h, k)
    defect = monodromy_defect(catenoid_W, sol, LoopSpec(0, 0.1))
    assert defect > 1e-2
    re0 = abs(period_real(catenoid_W, sol, LoopSpec(0, 0.1)))
    assert re0 > 1e-3  # five orders above the integer-case tolerance
    # integer m is single valued in contrast
    h3, k3 = catenoid_closed_form(3, 2)
    sol3 = RiccatiSolution.from_expr(h3, k3)
    assert monodromy_defect(catenoid_W, sol3, LoopSpec(0, 0.1)) < 1e-8


# -- indicial roots ------------------------------------------------------------

def test_singular_indices_values():
    pair = singular_indices(2.0)
    assert (pair.lam_plus, pair.lam_minus) == (2.0, -1.0)
    pair0 = singular_indices(0.0)
    assert (pair0.lam_plus, pair0.lam_minus) == (1.0, 0.0)


def test_singular_indices_relations():
    rng = np.random.default_rng(11)
    for _ in range(20):
        k = rng.uniform(-0.24, 6.0)
        p = singular_indices(k)
        assert abs(p.lam_plus + p.lam_minus - 1.0) < 1e-12
        assert abs(p.separation - math.sqrt(1 + 4 * k)) < 1e-12
    with pytest.raises(ValueError):
        singular_indices(-1.0)
