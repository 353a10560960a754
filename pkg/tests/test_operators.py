"""Tests for Hermitian operator wrappers, eigendecompositions, and oracles."""

import math
import warnings

import numpy as np
import pytest
from scipy.linalg import expm

import waveprop as wp


def test_hermitian_input_accepted_without_warning():
    a = wp.random_hermitian(4, seed=3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        op = wp.HermitianOperator(a)
    assert not op.symmetrized
    assert np.allclose(op.entries, a)


def test_non_hermitian_input_warns_and_symmetrizes():
    m = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.warns(UserWarning, match="not Hermitian"):
        op = wp.HermitianOperator(m)
    assert op.symmetrized
    assert np.allclose(op.entries, np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_non_square_input_rejected():
    with pytest.raises(ValueError, match="square"):
        wp.HermitianOperator(np.ones((2, 3)))


def test_decomposition_reconstructs_operator():
    a = wp.random_hermitian(6, seed=11)
    dec = wp.HermitianOperator(a).decomposition()
    assert np.all(np.diff(dec.eigenvalues) >= 0)
    v = dec.eigenvectors
    rebuilt = (v * dec.eigenvalues) @ v.conj().T
    assert np.linalg.norm(rebuilt - a) <= 1e-12 * np.linalg.norm(a)


def test_matrix_function_of_zero_argument_is_identity():
    dec = wp.HermitianOperator(np.zeros((3, 3))).decomposition()
    assert np.allclose(dec.matrix_function(np.cos), np.eye(3))


def test_cos_oracle_diagonal_values():
    a = np.diag([1.0, 2.0])
    got = wp.cos_sqrt_sum_oracle([a], 0.5)
    assert np.allclose(np.diag(got), [math.cos(0.5), math.cos(1.0)], atol=1e-14)


def test_cos_oracle_matches_direct_eigendecomposition():
    rng = np.random.default_rng(7)
    a = wp.random_hermitian(5, rng=rng)
    b = wp.random_hermitian(5, rng=rng)
    t = 0.8
    s = a @ a + b @ b
    evals, vecs = np.linalg.eigh(s)
    direct = (vecs * np.cos(t * np.sqrt(np.clip(evals, 0.0, None)))) @ vecs.conj().T
    got = wp.cos_sqrt_sum_oracle([a, b], t)
    assert np.linalg.norm(got - direct) <= 1e-11


def test_sinc_oracle_zero_operator_gives_t():
    t = 0.7
    got = wp.sinc_sqrt_sum_oracle([np.zeros((2, 2))], t)
    assert np.allclose(got, t * np.eye(2), atol=1e-14)


def test_sinc_oracle_diagonal_values():
    a = np.diag([2.0, 3.0])
    t = 0.4
    got = np.diag(wp.sinc_sqrt_sum_oracle([a], t)).real
    expected = [math.sin(t * 2.0) / 2.0, math.sin(t * 3.0) / 3.0]
    assert np.allclose(got, expected, atol=1e-14)


def test_heat_semigroup_matches_expm():
    a = wp.random_hermitian(5, seed=2)
    rho = 0.3
    got = wp.heat_semigroup(a, rho)
    assert np.linalg.norm(got - expm(-rho * a @ a)) <= 1e-12


def test_heat_semigroup_applies_to_vector():
    a = np.diag([1.0, 4.0])
    v = np.array([1.0, 1.0])
    got = wp.heat_semigroup(a, 0.3, vector=v)
    assert np.allclose(got, [math.exp(-0.3), math.exp(-4.8)], atol=1e-14)


def test_trotter_product_converges_to_joint_heat():
    rng = np.random.default_rng(5)
    a = wp.random_hermitian(4, rng=rng, norm=1.0)
    b = wp.random_hermitian(4, rng=rng, norm=1.0)
    rho = 0.4
    target = expm(-rho * (a @ a + b @ b))
    errs = [
        np.linalg.norm(wp.trotter_product(a, b, rho, m) - target) for m in (4, 8, 16)
    ]
    assert errs[0] > errs[1] > errs[2]
    # first-order splitting: error ~ 1/m
    assert errs[2] <= errs[1] / 1.7


def test_random_hermitian_properties():
    a = wp.random_hermitian(6, seed=9, norm=1.0)
    assert np.allclose(a, a.conj().T)
    assert wp.operator_norm(a) == pytest.approx(1.0, rel=1e-12)
    again = wp.random_hermitian(6, seed=9, norm=1.0)
    assert np.array_equal(a, again)


def test_random_state_is_complex_and_reproducible():
    v = wp.random_state(8, seed=4)
    assert v.shape == (8,)
    assert np.iscomplexobj(v)
    assert np.array_equal(v, wp.random_state(8, seed=4))


def test_operator_norm_of_diagonal():
    assert wp.operator_norm(np.diag([1.0, -3.0])) == 3.0


def test_spectral_apply_matches_matrix_function():
    a = wp.random_hermitian(4, seed=13)
    v = wp.random_state(4, seed=14)
    dec = wp.HermitianOperator(a).decomposition()
    assert np.allclose(
        wp.spectral_apply(np.cos, a, v), dec.matrix_function(np.cos) @ v, atol=1e-13
    )


def test_spectral_apply_dimension_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        wp.spectral_apply(np.cos, np.eye(2), np.ones(3))


def test_state_vector_norm():
    sv = wp.StateVector([1.0, 2.0])
    assert sv.dim == 2
    assert sv.norm() == pytest.approx(math.sqrt(5.0))


def test_state_vector_rejects_matrix_input():
    with pytest.raises(ValueError):
        wp.StateVector(np.ones((2, 2)))
