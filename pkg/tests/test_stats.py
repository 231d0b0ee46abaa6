"""Statistics layer against frozen oracle values and algebraic identities.

The numeric fixtures were computed independently (scipy.stats t/f/norm on
the same inputs) and are frozen here; the implementation under test owns
its quantile code, so agreement is a genuine cross-check.
"""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from crossdock_sim.stats import (CAP_REACHED, FIXED_COUNT, SequentialConfig,
                                 SequentialState, TARGET_MET, expected_replications,
                                 half_width, paired_t_compare, sequential_should_continue,
                                 stop_reason, summarize, variance_ratio_compare)


# -- half-width and summaries ----------------------------------------------

def test_half_width_frozen_cases():
    assert half_width([1.0, 2.0, 3.0]) == pytest.approx(2.4841377117195456, rel=1e-9)
    assert half_width([12.1, 14.3, 9.8, 11.7, 13.0]) == pytest.approx(
        2.0654213815666402, rel=1e-9)
    assert half_width([2.5, 3.1], confidence=0.90) == pytest.approx(
        1.89412545444028, rel=1e-9)


def test_half_width_degenerate_samples():
    assert half_width([]) is None
    assert half_width([5.0]) is None
    assert half_width([4.0, 4.0, 4.0]) == 0.0


def test_summarize_frozen_case():
    stats = summarize([12.1, 14.3, 9.8, 11.7, 13.0])
    assert stats.n == 5
    assert stats.mean == pytest.approx(12.18, rel=1e-9)
    assert stats.sd == pytest.approx(1.6634301909007183, rel=1e-9)
    assert stats.half_width == pytest.approx(2.0654213815666402, rel=1e-9)
    assert (stats.min, stats.max) == (9.8, 14.3)
    assert stats.confidence == 0.95


def test_summarize_single_observation_and_empty():
    stats = summarize([7.5])
    assert (stats.n, stats.mean, stats.sd, stats.half_width) == (1, 7.5, None, None)
    with pytest.raises(ValueError):
        summarize([])


def test_quadrupling_the_sample_roughly_halves_the_half_width():
    base = [12.1, 14.3, 9.8, 11.7, 13.0] * 20      # n = 100
    bigger = base * 4                               # n = 400, same spread
    ratio = half_width(bigger) / half_width(base)
    assert ratio == pytest.approx(0.5, rel=0.02)


@settings(max_examples=60, deadline=None)
@given(scale=hst.floats(0.1, 50.0), shift=hst.floats(-100.0, 100.0))
def test_half_width_is_scale_equivariant_and_shift_invariant(scale, shift):
    xs = [12.1, 14.3, 9.8, 11.7, 13.0]
    moved = [scale * x + shift for x in xs]
    assert half_width(moved) == pytest.approx(scale * half_width(xs), rel=1e-9)


# -- sequential stopping rule ----------------------------------------------

def test_continue_until_minimum_replications():
    config = SequentialConfig(target_half_width=1000.0, min_replications=3)
    state = SequentialState()
    assert sequential_should_continue(state, config)
    state.record(5.0)
    state.record(5.0)
    # Half-width is already 0 but the minimum is not reached.
    assert sequential_should_continue(state, config)
    state.record(5.0)
    assert not sequential_should_continue(state, config)
    assert stop_reason(state, config) == TARGET_MET


def test_stop_at_cap_with_target_unmet():
    config = SequentialConfig(target_half_width=1e-6, min_replications=2, replication_cap=4)
    state = SequentialState()
    for value in (1.0, 9.0, 4.0, 6.0):
        assert sequential_should_continue(state, config)
        state.record(value)
    assert not sequential_should_continue(state, config)
    assert stop_reason(state, config) == CAP_REACHED


def test_stops_at_first_satisfaction():
    config = SequentialConfig(target_half_width=2.6, min_replications=3)
    state = SequentialState()
    values = [10.0, 11.0, 10.5, 10.2, 10.8]
    stopped_at = None
    for value in values:
        if not sequential_should_continue(state, config):
            stopped_at = state.completed
            break
        state.record(value)
    # n=3 gives hw 1.25 <= 2.6, so the rule stops right at the minimum.
    assert stopped_at == 3


def test_tighter_targets_never_stop_earlier():
    values = [10.0, 14.0, 9.0, 12.5, 11.1, 10.7, 11.9, 10.2, 11.4, 11.0,
              10.9, 11.3, 10.6, 11.8, 10.4]

    def stopping_n(target):
        config = SequentialConfig(target_half_width=target, min_replications=3,
                                  replication_cap=len(values))
        state = SequentialState()
        for value in values:
            if not sequential_should_continue(state, config):
                break
            state.record(value)
        return state.completed

    widths = [5.0, 2.5, 1.25, 0.6, 0.3]
    ns = [stopping_n(w) for w in widths]
    assert ns == sorted(ns)


def test_met_target_verdict_survives_stable_appends():
    # Appending values that keep the half-width under the target must not
    # flip a stopped run back to continuing.
    config = SequentialConfig(target_half_width=2.0, min_replications=3)
    state = SequentialState(sample=[10.0, 10.5, 10.2])
    assert not sequential_should_continue(state, config)
    for _ in range(5):
        state.record(10.2)  # keeps the spread small
        assert state.half_width(config.confidence) <= 2.0
        assert not sequential_should_continue(state, config)


def test_sequential_config_validation():
    with pytest.raises(ValueError):
        SequentialConfig(target_half_width=0.0)
    with pytest.raises(ValueError):
        SequentialConfig(target_half_width=1.0, confidence=1.0)
    with pytest.raises(ValueError):
        SequentialConfig(target_half_width=1.0, min_replications=1)
    with pytest.raises(ValueError):
        SequentialConfig(target_half_width=1.0, min_replications=5, replication_cap=4)


def test_stop_reason_constants():
    assert (TARGET_MET, CAP_REACHED, FIXED_COUNT) == (
        "target-met", "cap-reached", "fixed-count")


# -- planning estimate ------------------------------------------------------

def test_expected_replications_frozen_case():
    # ceil((z * 2000 / 1)^2) with the exact 0.975 normal quantile; the
    # rounded-z figure 15,366,400 agrees at four significant figures.
    n = expected_replications(2000.0, 1.0)
    assert n == 15_365_836
    assert float(f"{n:.4g}") == float(f"{15_366_400:.4g}")


def test_expected_replications_scaling():
    n = expected_replications(2000.0, 1.0)
    quarter = expected_replications(2000.0, 2.0)
    assert n / quarter == pytest.approx(4.0, rel=1e-6)
    tighter = expected_replications(2000.0, 0.5)
    assert tighter / n == pytest.approx(4.0, rel=1e-6)


def test_expected_replications_edges():
    assert expected_replications(1000.0, 0.5) == 15_365_836  # same ratio, same n
    assert expected_replications(1.0, 1.0) == 4              # ceil(z^2)
    assert expected_replications(0.0, 1.0) == 1
    assert expected_replications(1e-9, 1e6) == 1
    with pytest.raises(ValueError):
        expected_replications(-1.0, 1.0)
    with pytest.raises(ValueError):
        expected_replications(1.0, 0.0)


# -- paired-t comparison ----------------------------------------------------

P3_A = [10.2, 11.5, 9.8, 10.9, 10.4, 11.1]
P3_B = [8.1, 9.6, 7.4, 9.2, 8.0, 9.3]


def test_paired_t_frozen_case_fail_to_reject():
    report = paired_t_compare([1.0, 2.0, 3.0], [2.0, 4.0, 6.0])
    assert report.kind == "means"
    assert report.estimate == -2.0
    assert report.sd == 1.0
    assert report.half_width == pytest.approx(2.4841377117195456, rel=1e-9)
    assert report.ci_low == pytest.approx(-4.484137711719546, rel=1e-9)
    assert report.ci_high == pytest.approx(0.48413771171954556, rel=1e-9)
    assert round(report.ci_low, 4) == -4.4841 and round(report.ci_high, 4) == 0.4841
    assert not report.reject
    assert report.verdict == "fail-to-reject"


def test_paired_t_frozen_case_reject():
    report = paired_t_compare(P3_A, P3_B, identifier="Total Usage Cost")
    assert report.identifier == "Total Usage Cost"
    assert report.estimate == pytest.approx(2.0500000000000003, rel=1e-9)
    assert report.sd == pytest.approx(0.30166206257996714, rel=1e-9)
    assert report.half_width == pytest.approx(0.31657491967595025, rel=1e-9)
    assert report.ci_low == pytest.approx(1.73342508032405, rel=1e-9)
    assert report.ci_high == pytest.approx(2.3665749196759505, rel=1e-9)
    assert report.reject and report.verdict == "reject"
    assert (report.min_a, report.max_a) == (9.8, 11.5)
    assert (report.min_b, report.max_b) == (7.4, 9.6)
    assert (report.n_a, report.n_b) == (6, 6)


def test_paired_t_is_sign_antisymmetric():
    fwd = paired_t_compare(P3_A, P3_B)
    rev = paired_t_compare(P3_B, P3_A)
    assert rev.estimate == -fwd.estimate
    assert rev.ci_low == pytest.approx(-fwd.ci_high, rel=1e-9)
    assert rev.ci_high == pytest.approx(-fwd.ci_low, rel=1e-9)
    assert rev.sd == fwd.sd
    assert rev.reject == fwd.reject


@settings(max_examples=40, deadline=None)
@given(shift=hst.floats(-10.0, 10.0))
def test_paired_t_estimate_tracks_a_constant_shift(shift):
    report = paired_t_compare([x + shift for x in P3_A], P3_B)
    base = paired_t_compare(P3_A, P3_B)
    assert report.estimate == pytest.approx(base.estimate + shift, abs=1e-9)
    assert report.sd == pytest.approx(base.sd, abs=1e-9)


def test_paired_t_input_validation():
    with pytest.raises(ValueError, match="equal length"):
        paired_t_compare([1.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        paired_t_compare([1.0], [2.0])


# -- variance-ratio comparison ----------------------------------------------

V2_A = [3.1, 2.7, 3.9, 3.3, 2.5, 3.6, 3.0, 2.9]
V2_B = [5.0, 5.2, 4.9, 5.5, 5.1, 4.7, 5.3, 5.0, 4.8, 5.4]


def test_variance_ratio_frozen_case_fail_to_reject():
    report = variance_ratio_compare(V2_A, V2_B)
    assert report.kind == "variances"
    assert report.estimate == pytest.approx(3.156228008444756, rel=1e-9)
    assert report.ci_low == pytest.approx(0.7520116599756833, rel=1e-9)
    assert report.ci_high == pytest.approx(15.223172853296177, rel=1e-9)
    assert not report.reject
    assert (report.n_a, report.n_b) == (8, 10)
    assert report.sd is None and report.half_width is None


def test_variance_ratio_frozen_case_reject():
    # Drawn once with numpy PCG64(2718) and frozen: 500 normals of sd 1,
    # then 500 of sd 2; the ratio near 4 is decisively outside the CI of 1.
    import numpy as np
    rng = np.random.Generator(np.random.PCG64(2718))
    b = [float(x) for x in rng.normal(50.0, 1.0, 500)]
    a = [float(x) for x in rng.normal(50.0, 2.0, 500)]
    report = variance_ratio_compare(a, b)
    assert report.estimate == pytest.approx(4.164695967298393, rel=1e-9)
    assert report.ci_low == pytest.approx(3.4937042136466285, rel=1e-10)
    assert report.ci_high == pytest.approx(4.964556653732173, rel=1e-10)
    assert report.reject


def test_variance_ratio_of_a_series_with_itself_is_exactly_one():
    report = variance_ratio_compare(P3_A, P3_A)
    assert report.estimate == 1.0
    assert report.ci_low < 1.0 < report.ci_high
    assert not report.reject


def test_variance_ratio_reciprocal_symmetry():
    fwd = variance_ratio_compare(V2_A, V2_B)
    rev = variance_ratio_compare(V2_B, V2_A)
    assert rev.estimate == pytest.approx(1.0 / fwd.estimate, rel=1e-9)
    assert rev.ci_low == pytest.approx(1.0 / fwd.ci_high, rel=1e-9)
    assert rev.ci_high == pytest.approx(1.0 / fwd.ci_low, rel=1e-9)


def test_variance_ratio_input_validation():
    with pytest.raises(ValueError):
        variance_ratio_compare([1.0], [1.0, 2.0])
    with pytest.raises(ValueError, match="zero"):
        variance_ratio_compare([1.0, 2.0, 3.0], [4.0, 4.0, 4.0])
