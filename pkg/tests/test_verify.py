import cmath
import math

import numpy as np
import pytest

from ribflat.mexpr import Const, LoopSpec, compiled
from ribflat.riccati import catenoid_closed_form
from ribflat.ribaucour import make_pair
from ribflat.verify import (
    CheckReport, check_flatness, check_hopf, check_hyperboloid,
    check_minimal, check_periods, check_riccati, check_sphere_congruence,
    check_symmetry, run_all, sample_points,
)

from conftest import CBRT2_ROOTS, UNIT_ROOTS


def catenoid_loops():
    return [LoopSpec(0, 0.1)] + [LoopSpec(w, 0.1) for w in CBRT2_ROOTS]


def trinoid_loops():
    return [LoopSpec(0, 0.1)] + [LoopSpec(w, 0.1) for w in UNIT_ROOTS]


def test_report_pass_criterion():
    rep = CheckReport.build("x", 0.5, 1.0, 10)
    assert rep.passed
    rep2 = CheckReport.build("x", 2.0, 1.0, 10)
    assert not rep2.passed
    rep3 = CheckReport.build("x", 0.0, 1.0, 50, n_failed=5)
    assert not rep3.passed  # 9% failures


def test_sampling_is_deterministic():
    a = sample_points(123, 50, punctures=[1.0])
    b = sample_points(123, 50, punctures=[1.0])
    assert a == b


def test_full_suite_catenoid(catenoid_pair):
    reports = run_all(catenoid_pair, loops=catenoid_loops(),
                      flatness_center=1.2 + 1.2j)
    names = [r.name for r in reports]
    assert names == ["riccati_residual", "hopf_preserved", "minimal_immersion",
                     "sphere_congruence", "flatness", "hyperboloid",
                     "symmetry_condition", "loop_periods"]
    for r in reports:
        assert r.passed, r.line()


def test_full_suite_trinoid(trinoid_pair):
    reports = run_all(trinoid_pair, loops=trinoid_loops(),
                      flatness_center=1.6 + 1.6j)
    for r in reports:
        assert r.passed, r.line()


def test_reports_are_reproducible(catenoid_pair):
    a = check_riccati(catenoid_pair, seed=99)
    b = check_riccati(catenoid_pair, seed=99)
    assert a.max_residual == b.max_residual
    c = check_sphere_congruence(catenoid_pair, n=30, seed=99)
    d = check_sphere_congruence(catenoid_pair, n=30, seed=99)
    assert c.max_residual == d.max_residual


def test_corrupted_gauge_fails_riccati(catenoid_W, catenoid_pair):
    h, k = catenoid_closed_form(3, 2)
    bad = h + Const(0.01)
    bad_pair = make_pair(catenoid_W, bad, k)
    rep = check_riccati(bad_pair)
    assert not rep.passed

    # residual magnitude should sit at the |2 * 0.01 * k * h * f| scale
    scale_expr = compiled(Const(2 * 0.01 * k) * h * catenoid_W.f)
    pts = sample_points(0x5EED, 1000, bad_pair.W_t.punctures)
    expected = 0.0
    for z in pts:
        try:
            expected = max(expected, abs(scale_expr(z)))
        except Exception:
            continue
    assert 0.2 * expected < rep.max_residual < 5.0 * expected


def test_corrupted_gauge_fails_hopf_too(catenoid_W):
    # f~ g~' = (g'/(k h^2))(g' + h') reduces to f g' only via
    # h' = k h^2 f - g', so a non-solution breaks this identity as well.
    h, k = catenoid_closed_form(3, 2)
    bad_pair = make_pair(catenoid_W, h + Const(0.01), k)
    assert not check_hopf(bad_pair).passed


def test_period_check_detects_noninteger(catenoid_W):
    h, k = catenoid_closed_form(2.5, 2)
    pair = make_pair(catenoid_W, h, k, search_half_width=2.0)
    rep = check_periods(pair, [LoopSpec(0, 0.1)])
    assert not rep.passed
    assert rep.max_residual > 1e-3


def test_tolerance_scaling(catenoid_pair):
    rep = check_hopf(catenoid_pair, n=100, tolerance=1e-30)
    assert not rep.passed
