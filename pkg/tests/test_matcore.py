import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from ejmshare.matcore import (DensityMatrix, DimensionError, IDENTITY2, SIGMA_X, SIGMA_Y,
                              SIGMA_Z, dagger, embed, kron, matmul, min_eigenvalue,
                              partial_trace, trace)
from oracles import PSI_MINUS, random_density

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def cmat(shape):
    return st.tuples(arrays(float, shape, elements=finite), arrays(float, shape, elements=finite)) \
        .map(lambda t: t[0] + 1j * t[1])


def test_kron_identity_and_paulis():
    assert np.allclose(kron(IDENTITY2, IDENTITY2), np.eye(4))
    assert np.allclose(kron(SIGMA_Z, SIGMA_Z), np.diag([1, -1, -1, 1]))


def test_kron_of_singlets_is_rank_one():
    s = np.outer(PSI_MINUS, PSI_MINUS.conj())
    k = kron(s, s)
    assert abs(trace(k) - 1) < 1e-12
    assert np.linalg.matrix_rank(k, tol=1e-10) == 1


def test_basic_ops():
    assert np.allclose(dagger(SIGMA_Y), SIGMA_Y)
    assert trace(np.eye(4)) == 4
    assert np.allclose(matmul(SIGMA_X, SIGMA_X), IDENTITY2)
    with pytest.raises(DimensionError):
        matmul(np.eye(2), np.eye(3))


def test_min_eigenvalue():
    assert min_eigenvalue(IDENTITY2) == pytest.approx(1)
    assert min_eigenvalue(SIGMA_Z) == pytest.approx(-1)
    with pytest.raises(ValueError):
        min_eigenvalue(np.array([[0, 1], [0, 0]]))


def test_partial_trace_product_and_singlet(rng):
    ra, rb = random_density(rng, 2), 0.7 * random_density(rng, 2)
    assert np.allclose(partial_trace(np.kron(ra, rb), [2, 2], [0]), ra * 0.7)
    assert np.allclose(partial_trace(np.kron(ra, rb), [2, 2], [1]), rb)
    s = np.outer(PSI_MINUS, PSI_MINUS.conj())
    assert np.allclose(partial_trace(s, [2, 2], {0}), np.eye(2) / 2)


def test_partial_trace_matches_direct_summation(rng):
    rho = random_density(rng, 8)
    t = rho.reshape(2, 2, 2, 2, 2, 2)
    # keep qubit 1 of three: sum over i0, i2 explicitly
    direct = np.zeros((2, 2), complex)
    for i in range(2):
        for k in range(2):
            direct += t[i, :, k, i, :, k]
    assert np.allclose(partial_trace(rho, [2, 2, 2], [1]), direct, atol=1e-14)
    assert abs(np.trace(partial_trace(rho, [2, 2, 2], [0, 2])) - 1) < 1e-12


def test_partial_trace_errors():
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4), [2, 2], [2])
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4), [2, 2], [])


def test_embed_order():
    op = embed(SIGMA_X, (2, 2, 2), 1)
    assert np.allclose(op, np.kron(np.kron(IDENTITY2, SIGMA_X), IDENTITY2))


def test_density_matrix_validation():
    s = DensityMatrix.from_ket(PSI_MINUS, (2, 2))
    assert s.is_valid()
    assert not DensityMatrix(np.diag([1.5, -0.5]), (2,)).is_valid()
    with pytest.raises(DimensionError):
        DensityMatrix(np.eye(4), (2, 3))


@settings(max_examples=40, deadline=None)
@given(cmat((2, 2)), cmat((2, 2)), cmat((2, 2)))
def test_kron_associative(a, b, c):
    assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12, rtol=0)


@settings(max_examples=40, deadline=None)
@given(cmat((4, 4)), cmat((4, 4)))
def test_trace_cyclic(a, b):
    assert abs(trace(a @ b) - trace(b @ a)) < 1e-12 * max(1, np.abs(a).max() * np.abs(b).max() * 16)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_partial_trace_composes(seed):
    rho = random_density(np.random.default_rng(seed), 16)
    once = partial_trace(rho, [2, 2, 2, 2], [0, 3])
    step = partial_trace(partial_trace(rho, [2, 2, 2, 2], [0, 2, 3]), [2, 2, 2], [0, 2])
    assert np.max(np.abs(once - step)) < 1e-12
