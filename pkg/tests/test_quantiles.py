"""Quantile routines against frozen reference values.

Reference values were computed independently (statistical tables / a
separate library) and frozen here; the implementation under test shares no
code with them.
"""

import math

import pytest

from crossdock_sim.quantiles import f_ppf, normal_ppf, reg_inc_beta, student_t_ppf, two_sided_t

# (p, expected) frozen from tables.
NORMAL_CASES = [
    (0.5, 0.0),
    (0.975, 1.959963984540054),
    (0.95, 1.6448536269514722),
    (0.9995, 3.2905267314919255),
    (0.025, -1.959963984540054),
    (0.0005, -3.2905267314919255),
]

# (p, df, expected): two-sided 95% and 99% columns of the t table.
T_CASES = [
    (0.975, 1, 12.706204736432095),
    (0.975, 2, 4.302652729696142),
    (0.975, 5, 2.570581835636314),
    (0.975, 10, 2.2281388519649385),
    (0.975, 30, 2.0422724563012373),
    (0.975, 100, 1.9839715184496334),
    (0.975, 499, 1.9647293909876649),
    (0.995, 1, 63.65674116287399),
    (0.995, 2, 9.92484320091807),
    (0.995, 5, 4.032142983557536),
    (0.995, 10, 3.16927267261695),
    (0.995, 30, 2.7499956535670305),
    (0.995, 100, 2.6258905214380177),
    (0.995, 499, 2.58571768311148),
]

# (p, df_num, df_den, expected) from F tables at the 0.975 point.
F_CASES = [
    (0.975, 1, 1, 647.7890114778446),
    (0.975, 2, 5, 8.433620739432778),
    (0.975, 5, 10, 4.236085668188633),
    (0.975, 10, 30, 2.511191301356954),
    (0.975, 30, 100, 1.7148488788501206),
    (0.975, 100, 100, 1.4832509898927289),
    (0.975, 499, 499, 1.1920574017201653),
    (0.975, 7, 499, 2.3129110173436565),
]


@pytest.mark.parametrize("p, expected", NORMAL_CASES)
def test_normal_ppf_matches_tables(p, expected):
    assert normal_ppf(p) == pytest.approx(expected, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("p, df, expected", T_CASES)
def test_t_ppf_matches_tables(p, df, expected):
    assert student_t_ppf(p, df) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("p, d1, d2, expected", F_CASES)
def test_f_ppf_matches_tables(p, d1, d2, expected):
    assert f_ppf(p, d1, d2) == pytest.approx(expected, rel=1e-9)


def test_t_ppf_median_is_zero():
    for df in (1, 3, 7, 50):
        assert student_t_ppf(0.5, df) == pytest.approx(0.0, abs=1e-12)


def test_t_ppf_is_antisymmetric():
    for df in (1, 2, 9, 40):
        for p in (0.6, 0.9, 0.99):
            assert student_t_ppf(1.0 - p, df) == pytest.approx(-student_t_ppf(p, df), rel=1e-10)


def test_t_ppf_approaches_normal_for_large_df():
    assert student_t_ppf(0.975, 10_000) == pytest.approx(normal_ppf(0.975), rel=1e-3)


def test_t_ppf_monotone_in_p():
    ps = [0.55, 0.7, 0.9, 0.975, 0.999]
    values = [student_t_ppf(p, 6) for p in ps]
    assert values == sorted(values)
    assert all(b > a for a, b in zip(values, values[1:]))


def test_f_ppf_reciprocal_identity():
    # F_{p; d1, d2} = 1 / F_{1-p; d2, d1}
    for d1, d2 in ((3, 8), (10, 10), (499, 499)):
        assert f_ppf(0.975, d1, d2) == pytest.approx(1.0 / f_ppf(0.025, d2, d1), rel=1e-9)


def test_reg_inc_beta_endpoints():
    assert reg_inc_beta(2.0, 3.0, 0.0) == 0.0
    assert reg_inc_beta(2.0, 3.0, 1.0) == 1.0


def test_reg_inc_beta_symmetry():
    # I_x(a, b) = 1 - I_{1-x}(b, a)
    for a, b, x in ((2.0, 5.0, 0.3), (0.5, 0.5, 0.8), (10.0, 1.5, 0.62)):
        assert reg_inc_beta(a, b, x) == pytest.approx(
            1.0 - reg_inc_beta(b, a, 1.0 - x), rel=1e-12, abs=1e-12)


def test_two_sided_t_is_upper_tail_quantile():
    assert two_sided_t(0.95, 2) == pytest.approx(4.302652729696142, rel=1e-9)
    assert two_sided_t(0.95, 499) == pytest.approx(1.9647293909876649, rel=1e-9)
    assert two_sided_t(0.90, 1) == pytest.approx(6.313751514675041, rel=1e-9)


def test_invalid_arguments_are_rejected():
    for p in (0.0, 1.0, -0.2, 1.7, math.nan):
        with pytest.raises(ValueError):
            student_t_ppf(p, 5)
    with pytest.raises(ValueError):
        student_t_ppf(0.9, 0)
    with pytest.raises(ValueError):
        f_ppf(0.9, 0, 5)
    with pytest.raises(ValueError):
        normal_ppf(1.0)


def test_scipy_cross_check():
    scipy_stats = pytest.importorskip("scipy.stats")
    for p, df, _ in T_CASES:
        assert student_t_ppf(p, df) == pytest.approx(scipy_stats.t.ppf(p, df), rel=1e-10)
    for p, d1, d2, _ in F_CASES:
        assert f_ppf(p, d1, d2) == pytest.approx(scipy_stats.f.ppf(p, d1, d2), rel=1e-9)
