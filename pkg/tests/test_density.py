import csv
import io
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ffdensity.density import (CSV_COLUMNS, FamilyData, Prediction, TestFunction, compare,
                               conjugate_pair_statistic, empirical_density_charsums,
                               empirical_density_zeros, error_budget, haar_unitary,
                               predict_density, reports_to_csv, rmt_baseline)
from ffdensity.euler import c_Q

GOLDEN = Path(__file__).parent / "data" / "q7_cubic_compare.csv"

coeff_st = st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=6)


@given(coeff_st, st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=8))
def test_test_function_is_real(coeffs, thetas):
    tf = TestFunction(len(coeffs) - 1, tuple(coeffs))
    z = tf.complex_eval(thetas)
    assert np.max(np.abs(z.imag)) < 1e-9
    assert np.allclose(z.real, tf(thetas), atol=1e-9)


@given(coeff_st)
def test_test_function_json_roundtrip(coeffs):
    tf = TestFunction(len(coeffs) - 1, tuple(coeffs))
    assert TestFunction.from_json(tf.to_json()) == tf


def test_test_function_validation_and_scaling():
    with pytest.raises(ValueError):
        TestFunction(2, (1.0, 1.0))
    with pytest.raises(ValueError):
        TestFunction(0, (math.nan,))
    tf = TestFunction.from_scaled(2, 6, lambda y: 1 - y)
    assert tf.phi_hat == (0.25, 0.1875, 0.125)
    assert tf.Phi_hat(1, 6) == 0.75 and tf.coeff(-2) == 0.125 and tf.coeff(3) == 0.0


def test_zeroth_moment_counts_zeros(families):
    for q, s, g in [(7, "kummer", 2), (5, "nonkummer", 2)]:
        fam = families.family(q, s, g)
        tf = TestFunction.plain(0)
        assert abs(empirical_density_zeros(fam, tf) - fam.spec.n_zeros) < 1e-12
        assert abs(empirical_density_charsums(fam, tf) - fam.spec.n_zeros) < 1e-12


def test_single_member_family(families):
    fam = families.family(7, "kummer", 2)
    one = FamilyData(fam.spec, fam.chars[7:8], fam.ldata[7:8])
    tf = TestFunction(2, (0.5, 0.3, -0.2))
    direct = float(np.sum(tf(fam.ldata[7].zeros)))
    assert abs(empirical_density_zeros(one, tf) - direct) < 1e-12
    assert abs(empirical_density_charsums(one, tf) - direct) < 1e-9


def test_paths_agree_with_generic_coefficients(families):
    fam = families.family(7, "kummer", 1)
    tf = TestFunction(4, (0.7, -0.2, 0.4, 1.1, 0.3))
    assert abs(empirical_density_zeros(fam, tf) - empirical_density_charsums(fam, tf)) < 1e-10
    d = empirical_density_zeros(fam, tf, details=True)
    assert d["imag_residue"] < 1e-12 and d["per_zero"] == d["value"] / 1


def test_empirical_requires_zeros(families):
    fam = FamilyData(families.spec(7, "kummer", 1), [])
    with pytest.raises(ValueError):
        empirical_density_zeros(fam, TestFunction.plain(1))


def test_prediction_below_first_prime_term(families):
    for g in (1, 2, 3):
        spec = families.spec(7, "kummer", g)
        tf = TestFunction.plain(2)
        pr = predict_density(spec, tf, family_size=100)
        assert pr.predicted == pr.phi_hat0 == g
    spec = families.spec(5, "nonkummer", 2)
    pr = predict_density(spec, TestFunction.plain(2), family_size=480)
    assert abs(pr.trivial_term + 2 * (5 ** -0.5 + 5 ** -1)) < 1e-15
    assert pr.main_sum == 0 and abs(pr.predicted - (2 + pr.trivial_term)) < 1e-15


def test_twisted_weight_vanishes_on_degrees_divisible_by_three():
    for e in (3, 6, 9, 30):
        assert 1 - c_Q(e, 7) == 0


def test_prediction_imaginary_parts_cancel(families):
    spec = families.spec(7, "kummer", 4)
    pr = predict_density(spec, TestFunction.plain(9), family_size=25200)
    assert pr.imag_residue < 1e-12
    with pytest.raises(ValueError):
        predict_density(spec, TestFunction.plain(61))


def test_error_budgets():
    from ffdensity.characters import FamilySpec
    from ffdensity.gfpoly import field_make
    c7, c5 = field_make(7), field_make(5)
    b = [error_budget(FamilySpec(c7, 3, "kummer", g), 3) for g in (1, 2, 3, 4)]
    assert all(x > y for x, y in zip(b, b[1:]))
    assert abs(b[3] - 10 * 7 ** (1.5 - 2 + 0.3)) < 1e-12
    nk = error_budget(FamilySpec(c5, 3, "nk", 2), 3)
    assert abs(nk - 10 * 5 ** (1.5 - 2 + 0.5)) < 1e-12


def test_haar_unitary_is_unitary():
    U = haar_unitary(6, np.random.default_rng(1))
    assert np.allclose(U.conj().T @ U, np.eye(6), atol=1e-12)


def test_rmt_constant_function_exact():
    mean, se = rmt_baseline(5, TestFunction.plain(0, 0.7), 50)
    assert abs(mean - 3.5) < 1e-12 and se < 1e-12


def test_rmt_deterministic_and_thread_independent():
    tf = TestFunction.plain(2)
    a = rmt_baseline(4, tf, 200, seed=3)
    assert a == rmt_baseline(4, tf, 200, seed=3)
    assert a == rmt_baseline(4, tf, 200, seed=3, threads=4)
    assert a != rmt_baseline(4, tf, 200, seed=4)


def test_rmt_mean_matches_unitary_prediction():
    tf = TestFunction.plain(3)
    mean, se = rmt_baseline(8, tf, 2000, seed=11)
    assert abs(mean - 8) <= 3 * se


def test_conjugate_pairs(families):
    fam = families.family(5, "nonkummer", 2)
    tf = TestFunction(3, (1.0, 0.5, 0.25, 0.1))
    assert abs(conjugate_pair_statistic(fam, tf) - empirical_density_zeros(fam, tf)) < 1e-12
    with pytest.raises(ValueError):
        conjugate_pair_statistic(families.family(7, "kummer", 1), tf)


def test_compare_identical_inputs(families):
    fam = families.family(7, "kummer", 2)
    tf = TestFunction.plain(3)
    emp = empirical_density_zeros(fam, tf)
    rep = compare(fam, tf, Prediction(predicted=emp, phi_hat0=2.0))
    assert rep.deviation == 0 and rep.passed
    assert rep.notes == ["support exceeds unitary regime"] and not rep.unitary_regime
    rep0 = compare(fam, tf, constant=0.0)
    assert not rep0.passed and rep0.path_gap < 1e-8


def test_compare_rejects_mismatched_spec(families):
    with pytest.raises(ValueError):
        compare(families.family(7, "kummer", 1), TestFunction.plain(1),
                spec=families.spec(7, "kummer", 2))


def test_unitary_regime_flag(families):
    rep = compare(families.family(7, "kummer", 3), TestFunction.plain(2))
    assert rep.unitary_regime and rep.limit_check and rep.notes == []


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_golden_q7_cubic_report(families):
    reports = [compare(families.family(7, "kummer", g), TestFunction.plain(N))
               for g in (1, 2, 3) for N in (1, 2, 3)]
    got = _rows(reports_to_csv(reports))
    want = _rows(GOLDEN.read_text())
    assert list(got[0]) == CSV_COLUMNS == list(want[0])
    assert len(got) == len(want) == 9
    for a, b in zip(got, want):
        for k in CSV_COLUMNS:
            if k in ("setting", "pass"):
                assert a[k] == b[k]
            else:
                assert abs(float(a[k]) - float(b[k])) <= 1e-9 * max(1.0, abs(float(b[k])))
