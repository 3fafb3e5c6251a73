"""Randomized invariants; hypothesis draws dimensions and RNG seeds."""
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from nptlab.constructions import ConstructionSpec, realize
from nptlab.qcore import (
    ComplexOperator,
    hs_distance,
    partial_transpose,
    random_density,
    random_hermitian,
    random_pure_state,
    witness_value,
)

dims = st.integers(min_value=2, max_value=4)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(dims, dims, seeds)
def test_pt_is_an_involution(dA, dB, seed):
    X = ComplexOperator(random_hermitian(dA * dB, np.random.default_rng(seed)), dA, dB)
    np.testing.assert_array_equal(partial_transpose(partial_transpose(X)).data, X.data)


@settings(max_examples=40, deadline=None)
@given(dims, dims, seeds)
def test_pt_preserves_trace_hermiticity_and_hs(dA, dB, seed):
    rng = np.random.default_rng(seed)
    X, Y = random_density(dA, dB, rng), random_density(dA, dB, rng)
    PX, PY = partial_transpose(X), partial_transpose(Y)
    assert abs(PX.trace() - X.trace()) < 1e-12
    assert PX.is_hermitian()
    assert abs(hs_distance(PX, PY) - hs_distance(X, Y)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(dims, dims, seeds)
def test_schmidt_coefficients_normalized(dA, dB, seed):
    psi = random_pure_state(dA, dB, np.random.default_rng(seed))
    s = psi.schmidt
    assert abs(np.sum(s.coefficients**2) - 1) < 1e-12
    assert np.all(np.diff(s.coefficients) <= 1e-15)
    np.testing.assert_allclose(s.reconstruct(), psi.amplitudes, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=3, max_value=4), seeds, st.sampled_from([0.01, 0.1, 0.5, 1.0]))
def test_method_two_witness_identity(d, seed, eps):
    rng = np.random.default_rng(seed)
    lam = rng.uniform(0.1, 1.0, d)
    lam /= np.linalg.norm(lam)
    fam = realize(ConstructionSpec(method="MethodII", d1=d, schmidt_coeffs=lam.tolist()))
    assert abs(witness_value(fam.phis[0], fam.rho(eps)) + eps * fam.lambda_abs[0]) < 1e-10
