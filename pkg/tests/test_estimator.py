import numpy as np
import pytest

from certification.estimator import (
    adjoint_deviation_map,
    deviation_eval,
    deviation_map,
    estimate_sup,
    projector_deviation,
)
from certification.states import random_pure_states
from channels.kraus import apply, make_uniform_channel
from conftest import random_hermitian, random_matrix
from ensembles.families import PAULI, fourier_weyl_family
from ensembles.haar import sample_haar_batch
from ensembles.rng import stream
from linalg.core import operator_norm, projector, trace_inner
from linalg.errors import InvalidInputError, InvalidParameterError


def closed_form_qubit_sup(channel) -> float:
    """sigma_max(T) / 2 with T_ab = tr(sigma_a Phi(sigma_b)) / 2 on the Bloch sphere."""
    T = np.array([[trace_inner(PAULI[a], apply(channel, PAULI[b])).real / 2 for b in (1, 2, 3)] for a in (1, 2, 3)])
    return float(np.linalg.svd(T, compute_uv=False)[0]) / 2


def test_deviation_eval_examples():
    identity = make_uniform_channel([np.eye(3)])
    e0, e1 = np.eye(3)[0], np.eye(3)[1]
    assert deviation_eval(identity, e0, e0) == pytest.approx(2 / 3)
    assert deviation_eval(identity, e0, e1) == pytest.approx(1 / 3)
    with pytest.raises(InvalidInputError):
        deviation_eval(identity, e0, [1, 0])


def test_deviation_eval_vanishes_on_the_full_family(rng):
    channel = make_uniform_channel(fourier_weyl_family(4))
    for x, y in zip(random_pure_states(4, 10, rng), random_pure_states(4, 10, rng)):
        assert deviation_eval(channel, x, y) <= 1e-12


def test_deviation_eval_matches_deviation_map(rng):
    channel = make_uniform_channel(sample_haar_batch(3, 6, rng))
    for x, y in zip(random_pure_states(3, 10, rng), random_pure_states(3, 10, rng)):
        direct = np.trace(projector(y) @ deviation_map(channel, projector(x))).real
        assert deviation_eval(channel, x, y) == pytest.approx(abs(direct), abs=1e-12)
        assert np.allclose(projector_deviation(channel.operators, x), deviation_map(channel, projector(x)))
        assert deviation_eval(channel, x, y) <= 1.0


def test_adjoint_deviation_map(rng):
    channel = make_uniform_channel(sample_haar_batch(3, 4, rng))
    X, Y = random_matrix(rng, 3), random_matrix(rng, 3)
    lhs = trace_inner(Y, deviation_map(channel, X))
    rhs = trace_inner(adjoint_deviation_map(channel, Y), X)
    assert lhs == pytest.approx(rhs)


def test_best_psi_for_fixed_hermitian_is_the_top_eigenvector(rng):
    from certification.estimator import _top_vector

    for _ in range(10):
        H = random_hermitian(rng, 4)
        v, value = _top_vector(H)
        assert value == pytest.approx(operator_norm(H))
        assert abs(np.vdot(v, H @ v)) == pytest.approx(operator_norm(H))
        for x in random_pure_states(4, 50, rng):
            assert abs(np.vdot(x, H @ x)) <= value + 1e-12


def test_estimator_on_the_full_family():
    channel = make_uniform_channel(fourier_weyl_family(3))
    est = estimate_sup(channel, restarts=4, rng=stream(1, 1))
    assert est.value <= 1e-10


def test_estimator_on_the_identity_channel():
    est = estimate_sup(make_uniform_channel([np.eye(3)]), restarts=8, rng=stream(2, 1))
    assert est.value == pytest.approx(2 / 3, abs=1e-8)
    assert est.converged


@pytest.mark.parametrize("seed", range(5))
def test_estimator_matches_qubit_closed_form(seed):
    channel = make_uniform_channel(sample_haar_batch(2, 10, stream(seed, 0)))
    est = estimate_sup(channel, rng=stream(seed, 1))
    assert est.value == pytest.approx(closed_form_qubit_sup(channel), abs=1e-4)
    assert deviation_eval(channel, est.phi, est.psi) == pytest.approx(est.value)


@pytest.mark.parametrize("seed", range(5))
def test_two_qubit_rotations_always_share_an_axis(seed):
    channel = make_uniform_channel(sample_haar_batch(2, 2, stream(seed, 0)))
    est = estimate_sup(channel, restarts=8, rng=stream(seed, 1))
    assert est.value == pytest.approx(0.5, abs=1e-6)


def test_more_restarts_never_lower_the_estimate(rng):
    channel = make_uniform_channel(sample_haar_batch(4, 8, rng))
    few = estimate_sup(channel, restarts=4, rng=stream(11, 1))
    many = estimate_sup(channel, restarts=16, rng=stream(11, 1))
    assert many.value >= few.value
    assert many.restart_values[:4] == few.restart_values


def test_estimator_is_reproducible(rng):
    channel = make_uniform_channel(sample_haar_batch(3, 5, rng))
    a = estimate_sup(channel, restarts=6, rng=stream(3, 1))
    b = estimate_sup(channel, restarts=6, rng=stream(3, 1), threads=3)
    assert a.value == b.value
    assert np.array_equal(a.phi.vector, b.phi.vector)


def test_estimator_flags_non_convergence(rng):
    channel = make_uniform_channel(sample_haar_batch(3, 5, rng))
    est = estimate_sup(channel, restarts=2, max_iters=1, conv_tol=0.0, rng=stream(3, 1))
    assert not est.converged
    assert est.iterations == 1


def test_estimator_parameter_validation():
    channel = make_uniform_channel([np.eye(2)])
    with pytest.raises(InvalidParameterError):
        estimate_sup(channel, rng=None)
    with pytest.raises(InvalidParameterError):
        estimate_sup(channel, restarts=0, rng=stream(1))


@pytest.mark.slow
def test_estimator_against_a_bloch_grid():
    channel = make_uniform_channel(sample_haar_batch(2, 10, stream(42, 0)))
    theta, phi = np.meshgrid(np.linspace(0, np.pi, 300), np.linspace(0, 2 * np.pi, 600, endpoint=False))
    states = np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=-1).reshape(-1, 2)
    W = np.einsum("nab,mb->mna", channel.operators, states)
    H = np.eye(2) / 2 - np.einsum("mna,mnb->mab", W, W.conj()) / channel.n
    grid_max = float(np.max(np.abs(np.linalg.eigvalsh(H))))
    est = estimate_sup(channel, rng=stream(42, 1))
    assert est.value == pytest.approx(grid_max, abs=1e-3)
    assert est.value >= grid_max - 1e-6
