import numpy as np
import pytest

from conftest import random_hermitian, random_matrix
from ensembles.haar import sample_haar
from linalg.codec import matrix_from_json, matrix_to_json
from linalg.core import (
    hermitian_eig,
    operator_norm,
    projector,
    schatten_norm,
    singular_values,
    trace_inner,
)
from linalg.errors import InvalidInputError, InvalidParameterError, NotHermitianError

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_singular_values_examples():
    assert np.allclose(singular_values(np.eye(3)), [1, 1, 1])
    assert np.allclose(singular_values(np.diag([3.0, -1.0])), [3, 1])


def test_singular_values_match_gram_eigenvalues(rng):
    for _ in range(20):
        A = random_matrix(rng, 4)
        w = np.linalg.eigvalsh(A.conj().T @ A)[::-1]
        assert np.allclose(singular_values(A), np.sqrt(np.clip(w, 0, None)), atol=1e-8)


def test_singular_values_match_characteristic_polynomial(rng):
    A = random_matrix(rng, 4)
    roots = np.roots(np.poly(A @ A.conj().T))
    expected = np.sort(np.sqrt(np.abs(roots.real)))[::-1]
    assert np.allclose(singular_values(A), expected, atol=1e-8)


def test_schatten_examples():
    assert schatten_norm(np.eye(4), 1) == pytest.approx(4.0)
    assert schatten_norm(np.eye(4), 2) == pytest.approx(2.0)
    assert schatten_norm(SIGMA_X, "inf") == pytest.approx(1.0)
    assert operator_norm(np.diag([3.0, -5.0])) == pytest.approx(5.0)
    assert schatten_norm(np.zeros((3, 3)), 3) == 0.0


@pytest.mark.parametrize("p", [0.5, 0, -1, "abc"])
def test_schatten_rejects_exponents_below_one(p):
    with pytest.raises(InvalidParameterError):
        schatten_norm(np.eye(2), p)


def test_schatten_rejects_non_square():
    with pytest.raises(InvalidInputError):
        schatten_norm(np.ones((2, 3)), 2)


def test_schatten_large_exponent_does_not_overflow():
    A = np.diag([1e200, 1e199])
    assert schatten_norm(A, 50) == pytest.approx(1e200, rel=1e-12)


def test_trace_norm_duality(rng):
    for _ in range(20):
        A = random_matrix(rng, 3)
        u, _, vh = np.linalg.svd(A)
        assert abs(trace_inner(A, u @ vh)) == pytest.approx(schatten_norm(A, 1), rel=1e-10)
        B = random_matrix(rng, 3)
        B = B / operator_norm(B)
        assert abs(trace_inner(A, B)) <= schatten_norm(A, 1) * (1 + 1e-12)


@pytest.mark.parametrize("p,q", [(1, np.inf), (1.5, 3.0), (2, 2), (3, 1.5), (np.inf, 1)])
def test_holder_inequality(rng, p, q):
    for _ in range(20):
        A, B = random_matrix(rng, 3), random_matrix(rng, 3)
        assert abs(trace_inner(A, B)) <= schatten_norm(A, p) * schatten_norm(B, q) * (1 + 1e-12)


def test_unitary_invariance(rng):
    A = random_matrix(rng, 4)
    U, V = sample_haar(4, rng), sample_haar(4, rng)
    for p in (1, 2, 3, "inf"):
        assert schatten_norm(U @ A @ V, p) == pytest.approx(schatten_norm(A, p), rel=1e-10)


def test_trace_inner_properties(rng):
    A, B = random_matrix(rng, 3), random_matrix(rng, 3)
    assert trace_inner(A, B) == pytest.approx(np.conj(trace_inner(B, A)))
    assert trace_inner(np.eye(2), SIGMA_X) == 0
    assert trace_inner(SIGMA_X, SIGMA_X) == pytest.approx(2.0)
    with pytest.raises(InvalidInputError):
        trace_inner(np.eye(2), np.eye(3))


def test_as_matrix_rejects_non_finite():
    with pytest.raises(InvalidInputError):
        singular_values(np.array([[np.nan, 0], [0, 1]]))


def test_hermitian_eig_examples():
    dec = hermitian_eig(np.diag([2.0, -1.0, 0.0]))
    assert np.allclose(dec.eigenvalues, [2.0, 0.0, -1.0])
    assert np.allclose(hermitian_eig(SIGMA_X).eigenvalues, [1.0, -1.0])
    P = projector([1.0, 0.0, 0.0])
    assert np.allclose(hermitian_eig(P).eigenvalues, [1.0, 0.0, 0.0])


def test_hermitian_eig_reconstructs_and_preserves_trace(rng):
    for d in (2, 3, 5, 8):
        H = random_hermitian(rng, d)
        dec = hermitian_eig(H)
        assert dec.dim == d
        assert np.all(np.diff(dec.eigenvalues) <= 1e-12)
        assert np.allclose(dec.reconstruct(), H, atol=1e-10)
        assert dec.eigenvalues.sum() == pytest.approx(np.trace(H).real, abs=1e-10)
        assert np.allclose(dec.eigenvectors.conj().T @ dec.eigenvectors, np.eye(d), atol=1e-10)


def test_hermitian_eig_fixes_eigenvector_phase(rng):
    dec = hermitian_eig(random_hermitian(rng, 4))
    for k in range(4):
        v = dec.eigenvectors[:, k]
        pivot = int(np.argmax(np.abs(v)))
        assert abs(v[pivot].imag) < 1e-12 and v[pivot].real > 0


def test_hermitian_eig_is_deterministic_on_degenerate_spectra():
    H = np.diag([1.0, 1.0, -1.0]).astype(complex)
    first, second = hermitian_eig(H), hermitian_eig(H.copy())
    assert np.array_equal(first.eigenvectors, second.eigenvectors)
    assert np.allclose(first.eigenvalues, [1, 1, -1])


def test_top_abs_prefers_positive_on_ties():
    dec = hermitian_eig(np.diag([1.0, -1.0]))
    assert dec.eigenvalues[dec.top_abs()] == pytest.approx(1.0)
    dec = hermitian_eig(np.diag([0.5, -2.0]))
    assert dec.eigenvalues[dec.top_abs()] == pytest.approx(-2.0)


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(InvalidInputError):
        hermitian_eig(np.ones((2, 3)))


def test_hermitian_check_is_relative_to_the_operator_norm():
    tiny = 1e-12 * np.array([[0, 1], [0, 0]], dtype=complex)
    with pytest.raises(NotHermitianError):
        hermitian_eig(tiny)
    big = 1e6 * SIGMA_X + 1e-5 * np.array([[0, 1j], [0, 0]])
    assert np.allclose(hermitian_eig(big).eigenvalues, [1e6, -1e6])
    assert np.allclose(hermitian_eig(np.zeros((3, 3))).eigenvalues, 0.0)


def test_matrix_json_roundtrip_and_validation(rng):
    A = random_matrix(rng, 2, 3)
    assert np.array_equal(matrix_from_json(matrix_to_json(A)), A)
    with pytest.raises(InvalidInputError):
        matrix_from_json({"rows": 2, "cols": 2, "entries": [[1, 0]] * 3})
    with pytest.raises(InvalidInputError):
        matrix_from_json({"rows": 1, "cols": 1, "entries": [[float("nan"), 0]]})
    with pytest.raises(InvalidInputError):
        matrix_from_json({"cols": 1, "entries": []})
