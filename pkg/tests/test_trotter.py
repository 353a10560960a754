"""Tests for the splitting-series route: coefficients, convergence, bounds."""

import math

import numpy as np
import pytest

import waveprop as wp
from waveprop.trotter import _series_scales, _tail_bound


@pytest.fixture()
def unit_pair():
    rng = np.random.default_rng(0)
    a = wp.random_hermitian(4, rng=rng, norm=1.0)
    b = wp.random_hermitian(4, rng=rng, norm=1.0)
    h = wp.random_state(4, rng=rng)
    return a, b, h


def test_series_leading_coefficients_are_exact(unit_pair):
    a, b, h = unit_pair
    for m in (1, 4, 16):
        series = wp.taylor_series_build([a, b], h, m, order=6)
        assert np.allclose(series.coefficient(0), h, atol=1e-14)
        assert np.allclose(series.coefficient(1), (a @ a + b @ b) @ h, atol=1e-13)


def test_series_build_validation(unit_pair):
    a, b, h = unit_pair
    with pytest.raises(ValueError):
        wp.taylor_series_build([a, b], h, 0, order=4)
    with pytest.raises(ValueError):
        wp.taylor_series_build([a, b], h, 2, order=-1)
    with pytest.raises(ValueError):
        wp.taylor_series_build([], h, 2, order=4)


def test_errors_halve_as_m_doubles(unit_pair):
    a, b, h = unit_pair
    t = 0.3
    ref = wp.cos_sqrt_sum_oracle([a, b], t) @ h
    errs = [np.linalg.norm(wp.fm_evaluate(a, b, h, t, m) - ref) for m in (8, 16, 32, 64)]
    for lo, hi in zip(errs[1:], errs):
        assert hi / lo == pytest.approx(2.0, rel=0.1)


def test_fitted_decay_exponent_near_one(unit_pair):
    a, b, h = unit_pair
    t = 0.3
    ref = wp.cos_sqrt_sum_oracle([a, b], t) @ h
    ms = np.array([8, 16, 32, 64, 128])
    errs = np.array([np.linalg.norm(wp.fm_evaluate(a, b, h, t, int(m)) - ref) for m in ms])
    slope = np.polyfit(np.log(ms), np.log(errs), 1)[0]
    assert -slope == pytest.approx(1.0, abs=0.05)


def test_tail_bound_covers_truncation_error(unit_pair):
    a, b, h = unit_pair
    t = 0.6  # close enough to the radius that truncation is visible
    amp, _, x, _ = _series_scales([a, b], h, t)
    assert x < 1.0  # inside the radius
    shallow = wp.fm_evaluate(a, b, h, t, 32, order=3)
    deep = wp.fm_evaluate(a, b, h, t, 32, order=24)
    diff = np.linalg.norm(shallow - deep)
    assert 0.0 < diff <= _tail_bound(amp, x, 3)


def test_driver_converges_with_reference(unit_pair):
    a, b, h = unit_pair
    t = 0.3
    ref = wp.cos_sqrt_sum_oracle([a, b], t) @ h
    result, report = wp.cos_noncomm(a, b, h, t, tol=1e-6, reference=ref)
    assert report.verdict == "converged"
    assert not report.caution_outside_radius
    assert report.errors == sorted(report.errors, reverse=True)
    assert np.linalg.norm(result - ref) <= 1e-4
    assert report.tail_bound <= 1e-10


def test_driver_reports_slow_when_cap_hit(unit_pair):
    a, b, h = unit_pair
    _, report = wp.cos_noncomm(a, b, h, 0.3, tol=1e-14, m0=8, m_cap=16)
    assert report.verdict == "slow"
    assert report.m_values == [8, 16]


def test_driver_flags_time_outside_radius(unit_pair):
    a, b, h = unit_pair
    _, report = wp.cos_noncomm(a, b, h, 2.0, tol=1e-12, m0=8, m_cap=16)
    assert report.caution_outside_radius
    assert report.verdict == "outside_radius"
    assert report.radius == pytest.approx(1.0 / math.sqrt(2.0))


def test_richardson_extrapolation_improves_result(unit_pair):
    a, b, h = unit_pair
    t = 0.3
    ref = wp.cos_sqrt_sum_oracle([a, b], t) @ h
    plain, _ = wp.cos_noncomm(a, b, h, t, tol=1e-9, m_cap=64)
    rich, _ = wp.cos_noncomm(a, b, h, t, tol=1e-9, m_cap=64, richardson=True)
    assert np.linalg.norm(rich - ref) <= np.linalg.norm(plain - ref) / 100.0


def test_quadrature_crosscheck_small_m():
    rng = np.random.default_rng(3)
    a = wp.random_hermitian(3, rng=rng, norm=1.0)
    b = wp.random_hermitian(3, rng=rng, norm=1.0)
    h = wp.random_state(3, rng=rng)
    for m in (1, 2):
        _, _, gap = wp.fm_quadrature_crosscheck(a, b, h, 0.2, m)
        assert gap <= 1e-10
    # the 6-dimensional rule for m=3 is kept small via an explicit order;
    # both routes share the truncation so the gap isolates the quadrature
    _, _, gap = wp.fm_quadrature_crosscheck(a, b, h, 0.2, 3, order=5)
    assert gap <= 1e-10


def test_quadrature_crosscheck_rejects_large_m(unit_pair):
    a, b, h = unit_pair
    with pytest.raises(ValueError, match="m in"):
        wp.fm_quadrature_crosscheck(a, b, h, 0.2, 4)


def test_taylor_coefficient_gap_halves(unit_pair):
    a, b, h = unit_pair
    gaps = wp.taylor_limit_check(a, b, 2, h)
    for hi, lo in zip(gaps, gaps[1:]):
        assert hi / lo == pytest.approx(2.0, abs=1e-9)
    assert gaps[0] / gaps[-1] == pytest.approx(8.0, abs=1e-8)


def test_sine_series_matches_sinc_oracle(unit_pair):
    a, b, h = unit_pair
    t = 0.3
    ref = wp.sinc_sqrt_sum_oracle([a, b], t) @ h
    errs = [
        np.linalg.norm(wp.sin_fm_evaluate([a, b], h, t, m) - ref) for m in (8, 32, 128)
    ]
    assert errs[0] > errs[1] > errs[2]
    assert errs[-1] <= 1e-5


def test_sine_is_time_derivative_antiderivative_of_cosine(unit_pair):
    # d/dt [sin(t sqrt(S))/sqrt(S) h] = cos(t sqrt(S)) h, checked with a
    # central difference on the series route at fixed depth
    a, b, h = unit_pair
    t, dt, m = 0.3, 1e-3, 64
    plus = wp.sin_fm_evaluate([a, b], h, t + dt, m)
    minus = wp.sin_fm_evaluate([a, b], h, t - dt, m)
    cos_val = wp.fm_evaluate(a, b, h, t, m)
    assert np.linalg.norm((plus - minus) / (2.0 * dt) - cos_val) <= 1e-5


def test_sine_driver_converges(unit_pair):
    a, b, h = unit_pair
    t = 0.3
    ref = wp.sinc_sqrt_sum_oracle([a, b], t) @ h
    result, report = wp.sin_noncomm(a, b, h, t, tol=1e-6, reference=ref)
    assert report.verdict == "converged"
    assert np.linalg.norm(result - ref) <= 1e-4


def test_three_operator_family(unit_pair):
    rng = np.random.default_rng(9)
    ops = [wp.random_hermitian(4, rng=rng, norm=1.0) for _ in range(3)]
    h = wp.random_state(4, rng=rng)
    t = 0.2
    ref = wp.cos_sqrt_sum_oracle(ops, t) @ h
    errs = [np.linalg.norm(wp.fm_evaluate_q(ops, h, t, m) - ref) for m in (16, 64)]
    assert errs[1] <= errs[0] / 3.0
    result, report = wp.cos_noncomm_q(ops, h, t, tol=1e-7, reference=ref)
    assert report.verdict == "converged"


def test_analytic_vector_bound_holds_on_operator_words(unit_pair):
    a, b, h = unit_pair
    c, k = wp.analytic_bound(a, b, h)
    assert c > 0.0 and k > 0.0
    rng = np.random.default_rng(12)
    for length in (1, 2, 3, 4):
        word = h.copy()
        for _ in range(length):
            word = (a if rng.random() < 0.5 else b) @ word
        assert np.linalg.norm(word) <= c * k**length * math.factorial(length) + 1e-12


def test_report_serializes_to_plain_dict(unit_pair):
    a, b, h = unit_pair
    _, report = wp.cos_noncomm(a, b, h, 0.3, tol=1e-6)
    d = report.to_dict()
    assert set(d) == {
        "m_values",
        "errors",
        "truncation_order",
        "tail_bound",
        "radius",
        "caution_outside_radius",
        "verdict",
    }
    assert isinstance(d["errors"], list)
