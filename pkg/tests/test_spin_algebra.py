import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import haar_unitary
from kanegates.spin_algebra import (
    MAGIC,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    LinAlgError,
    eig_unit_circle,
    embed,
    embed_pauli,
    equal_up_to_phase,
    expm_hermitian,
    from_magic,
    is_hermitian,
    is_unitary,
    kron,
    matrix_from_json,
    matrix_to_json,
    phase_distance,
    product,
    spin_dot,
    to_magic,
)


def test_kron_orders_left_factor_most_significant():
    up = np.array([1, 0])
    down = np.array([0, 1])
    v = kron(up[:, None], down[:, None]).ravel()
    assert v[1] == 1


def test_embed_places_operator_and_checks_range():
    z3 = embed(PAULI_Z, 3, 4)
    assert z3.shape == (16, 16)
    # site 3 is the least significant bit
    assert np.allclose(np.diag(z3).real, [1, -1] * 8)
    with pytest.raises(IndexError):
        embed(PAULI_Z, 4, 4)


def test_embed_pauli_by_label():
    assert np.allclose(embed_pauli("x", "n1"), embed(PAULI_X, 2, 4))
    assert np.allclose(embed_pauli("Z", "n1", "1-donor"), kron(np.eye(2), PAULI_Z))
    with pytest.raises(IndexError):
        embed_pauli("x", "n2", "1-donor")
    with pytest.raises(ValueError):
        embed_pauli("x", 0, "3-donor")


def test_spin_dot_spectrum_singlet_triplet():
    w = np.linalg.eigvalsh(spin_dot(0, 1, 2))
    assert np.allclose(w, [-3, 1, 1, 1])


def test_magic_basis_is_unitary_and_makes_xx_real_diagonal():
    assert is_unitary(MAGIC)
    for p in (PAULI_X, PAULI_Y, PAULI_Z):
        m = to_magic(kron(p, p))
        assert np.allclose(m, np.diag(np.diag(m)))
        assert np.allclose(m.imag, 0)


def test_local_gates_are_real_orthogonal_in_magic_basis(rng):
    local = kron(haar_unitary(2, rng), haar_unitary(2, rng))
    local /= np.linalg.det(local) ** 0.25
    m = to_magic(local)
    assert np.allclose(m.imag, 0, atol=1e-12) or np.allclose(m.real, 0, atol=1e-12)
    assert np.allclose(from_magic(m), local)


def test_expm_hermitian_matches_pauli_closed_form():
    t = 0.37
    u = expm_hermitian(PAULI_X, t, hbar=1.0)
    assert np.allclose(u, math.cos(t) * np.eye(2) - 1j * math.sin(t) * PAULI_X)


def test_expm_rejects_non_hermitian():
    with pytest.raises(LinAlgError):
        expm_hermitian(np.array([[0, 1], [0, 0]], dtype=complex), 1.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_expm_is_unitary_and_composes(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    h = a + a.conj().T
    u1 = expm_hermitian(h, 0.3, hbar=1.0)
    u2 = expm_hermitian(h, 0.5, hbar=1.0)
    assert is_unitary(u1, 1e-10)
    assert np.allclose(u2 @ u1, expm_hermitian(h, 0.8, hbar=1.0), atol=1e-10)


def test_eig_unit_circle_on_diagonal_and_degenerate():
    d = np.diag(np.exp(1j * np.array([0.3, -1.0, 0.3, math.pi])))
    ev = eig_unit_circle(d)
    assert np.allclose(np.angle(ev[:3]), [-1.0, 0.3, 0.3])
    assert np.isclose(abs(np.angle(ev[3])), math.pi)
    with pytest.raises(LinAlgError):
        eig_unit_circle(np.eye(4) * 2)


def test_is_hermitian_and_unitary_flags():
    assert is_hermitian(PAULI_Y)
    assert not is_hermitian(1j * PAULI_Y)
    assert is_unitary(PAULI_Y)
    assert not is_unitary(2 * PAULI_Y)


def test_phase_helpers():
    a = kron(PAULI_X, PAULI_Z)
    assert equal_up_to_phase(np.exp(0.7j) * a, a)
    assert phase_distance(a, a) == 0
    assert not equal_up_to_phase(a, kron(PAULI_Z, PAULI_X))


def test_product_first_acts_first():
    assert np.allclose(product([PAULI_X, PAULI_Z], 2), PAULI_Z @ PAULI_X)


def test_matrix_json_roundtrip_and_errors():
    m = np.array([[1 + 2j, 0], [0.5, -1j]])
    assert np.array_equal(matrix_from_json(matrix_to_json(m)), m)
    with pytest.raises(ValueError):
        matrix_from_json([[1, 2]])
    with pytest.raises(ValueError):
        matrix_from_json([[[1, 0], [0, 0]]])
