import numpy as np
import pytest

from channels.codec import channel_from_json, channel_to_json, load_channel, save_channel
from channels.kraus import (
    apply,
    apply_adjoint,
    apply_R,
    choi,
    density_matrix,
    is_completely_positive,
    is_trace_preserving,
    is_unital,
    kraus_rank,
    make_kraus_channel,
    make_uniform_channel,
    random_density_matrix,
)
from conftest import random_matrix
from ensembles.families import PAULI, fourier_weyl_family
from ensembles.haar import sample_haar_batch
from ensembles.rng import stream
from linalg.core import operator_norm, projector, trace_inner
from linalg.errors import InvalidInputError, UnitarityViolationError


def test_identity_channel_is_identity(rng):
    channel = make_uniform_channel([np.eye(3)])
    rho = random_density_matrix(3, rng).matrix
    assert np.allclose(apply(channel, rho), rho)
    assert channel.dim == 3 and channel.n == 1 and channel.certified


def test_bit_flip_channel():
    channel = make_uniform_channel([PAULI[1]])
    assert np.allclose(apply(channel, np.diag([1.0, 0.0])), np.diag([0.0, 1.0]))


def test_single_unitary_maps_projector_to_rotated_projector(rng):
    U = sample_haar_batch(4, 1, rng)[0]
    x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    x /= np.linalg.norm(x)
    out = apply(make_uniform_channel([U]), projector(x))
    assert np.allclose(out, projector(U @ x), atol=1e-12)


@pytest.mark.parametrize("d", range(2, 9))
def test_full_fourier_family_is_completely_randomizing(rng, d):
    channel = make_uniform_channel(fourier_weyl_family(d))
    for _ in range(5):
        X = random_matrix(rng, d)
        assert np.allclose(apply(channel, X), apply_R(X), atol=1e-12)
    worst = max(
        operator_norm(apply(channel, random_density_matrix(d, rng).matrix) - np.eye(d) / d) for _ in range(100)
    )
    assert worst <= 1e-12


def test_apply_R_examples():
    assert np.allclose(apply_R(np.diag([1.0, 0.0])), np.eye(2) / 2)
    assert np.allclose(apply_R(np.array([[0, 1], [1, 0]])), np.zeros((2, 2)))


def test_haar_channel_properties(rng):
    channel = make_uniform_channel(sample_haar_batch(3, 5, rng))
    rho = random_density_matrix(3, rng).matrix
    out = apply(channel, rho)
    assert np.trace(out) == pytest.approx(1.0)
    assert np.allclose(out, out.conj().T)
    assert np.linalg.eigvalsh(out).min() >= -1e-12
    assert is_unital(channel)
    assert is_trace_preserving(channel)[0]
    assert is_completely_positive(channel)[0]

    X, Y = random_matrix(rng, 3), random_matrix(rng, 3)
    assert np.allclose(apply(channel, 2 * X + 3j * Y), 2 * apply(channel, X) + 3j * apply(channel, Y))
    assert trace_inner(Y, apply(channel, X)) == pytest.approx(trace_inner(apply_adjoint(channel, Y), X))


def test_choi_of_identity_channel():
    d = 2
    C = choi(make_uniform_channel([np.eye(d)]))
    omega = np.zeros(d * d)
    omega[[i * d + i for i in range(d)]] = 1.0
    assert np.allclose(C, np.outer(omega, omega))


def test_choi_blocks_are_channel_outputs(rng):
    channel = make_uniform_channel(sample_haar_batch(3, 4, rng))
    C = choi(channel)
    E = np.zeros((3, 3))
    E[0, 2] = 1.0
    assert np.allclose(C[0:3, 6:9], apply(channel, E))


@pytest.mark.parametrize("d", range(2, 9))
def test_choi_of_full_family_is_maximally_mixed(d):
    C = choi(make_uniform_channel(fourier_weyl_family(d)))
    assert np.abs(C - np.eye(d * d) / d).max() <= 1e-12


@pytest.mark.parametrize("d", range(2, 7))
def test_full_family_has_full_kraus_rank(d):
    assert kraus_rank(make_uniform_channel(fourier_weyl_family(d))) == d * d


@pytest.mark.parametrize("n", [2, 8, 20])
def test_haar_channel_kraus_rank_is_min_of_n_and_d_squared(n):
    hits = sum(
        kraus_rank(make_uniform_channel(sample_haar_batch(4, n, stream(seed, 0, 4, n)))) == min(n, 16)
        for seed in range(20)
    )
    assert hits >= 19


def test_choi_trace_and_rank(rng):
    channel = make_uniform_channel(sample_haar_batch(4, 2, rng))
    assert np.trace(choi(channel)).real == pytest.approx(4.0)
    assert kraus_rank(channel) == 2
    assert kraus_rank(make_uniform_channel([np.eye(3)])) == 1
    assert kraus_rank(make_uniform_channel(fourier_weyl_family(3))) == 9
    assert kraus_rank(make_uniform_channel(sample_haar_batch(2, 10, rng))) <= 4


def test_make_uniform_channel_rejects_non_unitary():
    with pytest.raises(UnitarityViolationError) as info:
        make_uniform_channel([np.eye(2), 1.01 * np.eye(2), np.eye(2)])
    assert info.value.index == 1
    assert info.value.residual == pytest.approx(0.0201)


def test_make_uniform_channel_rejects_mixed_shapes():
    with pytest.raises(InvalidInputError):
        make_uniform_channel([np.eye(2), np.eye(3)])
    with pytest.raises(InvalidInputError):
        make_uniform_channel([])


def test_relaxed_channel_reports_trace_preservation_residual():
    channel = make_kraus_channel([1.01 * np.eye(2)])
    assert not channel.certified
    ok, residual = is_trace_preserving(channel)
    assert not ok
    assert residual == pytest.approx(0.0201)


def test_operand_dimension_is_checked():
    channel = make_uniform_channel([np.eye(2)])
    with pytest.raises(InvalidInputError):
        apply(channel, np.eye(3))


def test_density_matrix_validation():
    assert density_matrix(np.eye(2) / 2).dim == 2
    with pytest.raises(InvalidInputError):
        density_matrix(np.eye(2))
    with pytest.raises(InvalidInputError):
        density_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidInputError):
        density_matrix(np.array([[0.5, 0.5], [0, 0.5]]))


def test_channel_file_roundtrip(tmp_path, rng):
    channel = make_uniform_channel(sample_haar_batch(2, 3, rng))
    loaded = load_channel(save_channel(channel, tmp_path / "ch.json"))
    assert np.array_equal(loaded.operators, channel.operators)


def test_channel_json_rejects_non_unitary():
    obj = channel_to_json(make_kraus_channel([2.0 * np.eye(2)]))
    with pytest.raises(UnitarityViolationError):
        channel_from_json(obj)
    obj = channel_to_json(make_uniform_channel([np.eye(2)]))
    obj["dim"] = 3
    with pytest.raises(InvalidInputError):
        channel_from_json(obj)
