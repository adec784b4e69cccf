import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qeewitness.errors import CapacityError, ValidationError
from qeewitness.linalg import (
    SZ, frobenius_distance, is_unitary, kron, propagator, trace_distance,
)

from conftest import random_density, random_hermitian

OMEGA_200G = 2 * np.pi * 10.71 * 0.02


def test_zero_generator_gives_identity():
    np.testing.assert_allclose(propagator(np.zeros((2, 2)), 1.0), np.eye(2), atol=1e-15)


def test_diagonal_generator_closed_form():
    assert OMEGA_200G == pytest.approx(1.3459, abs=1e-4)
    u = propagator(1.346 * SZ, 1.0)
    np.testing.assert_allclose(u, np.diag([np.exp(-0.673j), np.exp(0.673j)]), atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-5, 5), st.floats(-5, 5))
def test_group_property(seed, t1, t2):
    h = random_hermitian(np.random.default_rng(seed), 4)
    lhs = propagator(h, t1) @ propagator(h, t2)
    assert np.linalg.norm(lhs - propagator(h, t1 + t2)) < 1e-10
    assert np.linalg.norm(propagator(h, t1) @ propagator(h, -t1) - np.eye(4)) < 1e-10
    assert is_unitary(propagator(h, t1))


def test_spectrum_preserved_under_conjugation(rng):
    h = random_hermitian(rng, 5)
    rho = random_density(rng, 5)
    u = propagator(h, 2.7)
    np.testing.assert_allclose(np.linalg.eigvalsh(u @ rho @ u.conj().T),
                               np.linalg.eigvalsh(rho), atol=1e-10)


def test_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        propagator(np.array([[0, 1], [0, 0]]), 1.0)
    with pytest.raises(ValidationError):
        propagator(np.eye(2), np.inf)


def test_kron_examples(rng):
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    x = np.array([[0, 1], [1, 0]])
    k = kron(np.diag([1, 0]), x)
    np.testing.assert_array_equal(k[:2, :2], x)
    assert not k[2:, :].any() and not k[:, 2:].any()
    a, b = rng.normal(size=(3, 3)), rng.normal(size=(2, 2))
    assert np.trace(kron(a, b)) == pytest.approx(np.trace(a) * np.trace(b))


def test_kron_capacity_guard():
    with pytest.raises(CapacityError):
        kron(np.eye(64), np.eye(128))
    assert kron(np.eye(64), np.eye(128), cap=10**4).shape == (8192, 8192)


def test_frobenius_distance():
    a = np.diag([1.0, 2.0])
    assert frobenius_distance(a, a) == 0
    assert frobenius_distance(np.eye(2), np.zeros((2, 2))) == pytest.approx(np.sqrt(2))
    assert frobenius_distance(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(np.sqrt(2))
    with pytest.raises(ValidationError):
        frobenius_distance(np.eye(2), np.eye(3))


def test_trace_distance_of_orthogonal_projectors():
    assert trace_distance(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(2.0)
