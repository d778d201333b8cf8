import math

import pytest
from hypothesis import given, strategies as st

from ffdensity.characters import FamilySpec
from ffdensity.euler import (ZETA3, EulerRegionError, EulerToleranceError, c_Q, constants,
                             e0_series, euler_eval, family_size_predicted, j_derivative,
                             j_derivative_fd, nonkummer_series_via_e0, quartic_G,
                             series_coefficient, size_budget, squarefree_series_coefficient)
from ffdensity.gfpoly import Poly, enumerate_monic, field_make


def test_trivial_products():
    F = field_make(7).Fq
    f = Poly((1, 2, 0, 1), F)
    assert euler_eval("J_cubic", 7, x=0, y=0, f=f).value == 1
    assert euler_eval("Ef", 7, u=0.01, f=Poly((1,), F)).value == 1
    assert euler_eval("Ef", 7, u=0.01).value == 1


def test_e0_leading_factors():
    u = 1 / 25
    one = euler_eval("E0", 5, u=u, cutoff=1, tol=math.inf).value
    two = euler_eval("E0", 5, u=u, cutoff=2, tol=math.inf).value
    assert abs(one - (25 / 26) ** 5) < 1e-15
    assert abs(two - (25 / 26) ** 5 * (675 / 676) ** 10) < 1e-15


def test_e0_series_matches_product():
    u = 1 / 25
    coeffs = e0_series(5, 20)
    approx = sum(c * u ** k for k, c in enumerate(coeffs))
    assert abs(approx - euler_eval("E0", 5, u=u).value) < 1e-12


def test_region_and_tolerance_errors():
    with pytest.raises(EulerRegionError):
        euler_eval("J0_cubic", 7, x=0.6, y=0.1)
    with pytest.raises(EulerRegionError):
        euler_eval("E0", 5, u=0.3)
    with pytest.raises(EulerToleranceError):
        euler_eval("J0_cubic", 7, x=0.5, y=0.5, cutoff=3)
    with pytest.raises(ValueError):
        euler_eval("nope", 7)
    with pytest.raises(EulerRegionError):
        j_derivative("cubic_diag", 7, 0.6)


SHIPPED_POINTS = [("J0_cubic", 7, dict(x=1 / 7, y=1 / 7)),
                  ("J0_cubic", 7, dict(x=1 / 7, y=ZETA3 / 7)),
                  ("J0_cubic", 7, dict(x=ZETA3 ** 2 / 7, y=1 / 7)),
                  ("J0_quartic", 17, dict(u=1 / 17)),
                  ("E0", 5, dict(u=1 / 25))]


@pytest.mark.parametrize("kind,q,kw", SHIPPED_POINTS)
def test_cutoff_stability(kind, q, kw):
    a = euler_eval(kind, q, cutoff=20, tol=math.inf, **kw).value
    b = euler_eval(kind, q, cutoff=30, **kw).value
    assert abs(a - b) < 1e-10


def test_j_cubic_local_correction():
    F = field_make(7).Fq
    f = Poly((3, 1, 1), F)  # prime of degree 2
    x = y = 1 / 7
    full = euler_eval("J_cubic", 7, x=x, y=y, f=f).value
    base = euler_eval("J0_cubic", 7, x=x, y=y).value
    assert abs(full - base / (1 + x ** 2 + y ** 2)) < 1e-12
    g = Poly((3, 1, 1), F) * Poly((1, 1), F) * Poly((1, 1), F)
    both = euler_eval("J_cubic", 7, x=x, y=y, f=g).value
    assert abs(both - base / (1 + x ** 2 + y ** 2) / (1 + x + y)) < 1e-12


@pytest.mark.parametrize("kind,q", [("cubic_diag", 7), ("quartic_diag", 17), ("cubic_diag", 13)])
def test_derivative_matches_finite_difference(kind, q):
    a = j_derivative(kind, q, 1 / q)
    b = j_derivative_fd(kind, q, 1 / q)
    assert abs(a - b) <= 1e-6 * abs(a)


def test_derivative_zero_slope_at_origin():
    assert j_derivative("cubic_diag", 7, 0.0) == 0
    assert abs(j_derivative_fd("cubic_diag", 7, 0.0, h=1e-4)) < 1e-6


def test_c_Q_values():
    z = ZETA3
    expected = (9 / 7) / (1 + (1 + z) / 7)
    assert abs(c_Q(1, 7) - expected) < 1e-15
    F = field_make(7).Fq
    assert c_Q(Poly((3, 1, 1), F)) == c_Q(2, 7)
    for q in (7, 13, 19):
        for d in range(1, 31):
            c = c_Q(d, q)
            assert abs(c) < 2
            if d % 3 == 0:
                assert c == 1


def test_constants_signs_and_order():
    ctx = field_make(7)
    sizes = {1: 42, 2: 252, 3: 3864, 4: 25200}
    for g, n in sizes.items():
        spec = FamilySpec(ctx, 3, "kummer", g)
        assert series_coefficient(spec) == n
        c = constants(spec, family_size=n)
        assert isinstance(c["h2"], float) and c["h2"] < 0
        assert 0.1 <= c["g_times_abs_h2"] <= 10
        assert c["family_size_source"] == "enumerated"
    cq = constants(FamilySpec(field_make(17), 4, "kummer", 6))
    assert cq["s2"] > 0 and cq["family_size_source"] == "predicted"
    assert 0.1 <= cq["G_times_s2"] <= 10
    assert quartic_G(6) == 5
    with pytest.raises(ZeroDivisionError):
        constants(FamilySpec(ctx, 3, "kummer", 1), family_size=0)


def test_size_ratio_g_to_g_plus_3():
    ctx = field_make(7)
    prev = None
    for g in (1, 2, 3, 4):
        a = family_size_predicted(FamilySpec(ctx, 3, "kummer", g))
        b = family_size_predicted(FamilySpec(ctx, 3, "kummer", g + 3))
        ratio = b / a / (7 ** 3 * (g + 5) / (g + 2))
        assert abs(ratio - 1) < 0.25
        if prev is not None:
            assert a > prev
        prev = a


def test_nonkummer_printed_vs_residue():
    spec = FamilySpec(field_make(5), 3, "nk", 2)
    res = family_size_predicted(spec, "residue")
    printed = family_size_predicted(spec, "printed")
    assert abs(res / printed - 25) < 1e-9
    assert abs(res - 480) <= size_budget(spec)
    assert abs(printed - 480) > size_budget(spec)


@given(st.sampled_from([5, 7, 11]), st.integers(2, 8))
def test_squarefree_series_identity(q, d):
    assert squarefree_series_coefficient(q, d) == q ** d - q ** (d - 1)


def test_squarefree_series_against_enumeration():
    ctx = field_make(7)
    assert squarefree_series_coefficient(7, 3) == sum(1 for _ in enumerate_monic(ctx, 3, "squarefree")) == 294
    assert squarefree_series_coefficient(7, 0) == 1


def test_nonkummer_series_two_routes():
    spec = FamilySpec(field_make(5), 3, "nk", 2)
    for n in range(0, 5):
        assert nonkummer_series_via_e0(5, n) == series_coefficient(spec, d=n)
    assert series_coefficient(spec, d=0) == 1


def test_series_overflow():
    with pytest.raises(OverflowError):
        series_coefficient(FamilySpec(field_make(5), 3, "nk", 2), d=31)
