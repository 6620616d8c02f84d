import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import haar_unitary
from kanegates.analytic import u_can_ideal
from kanegates.canonical import (
    AmbiguousBranchWarning,
    canonical_unitary,
    conjugation_flip,
    equivalent_contents,
    hadamard_reorder,
    interaction_content,
    locally_equivalent,
    makhlin_invariants,
    reduce_content,
    synth_content,
    synth_zz,
)
from kanegates.circuits import HADAMARD, cnot_matrix, cz_matrix, sqrt_swap_matrix, swap_matrix
from kanegates.spin_algebra import PAULI_X, PAULI_Y, PAULI_Z, LinAlgError, equal_up_to_phase, kron

Q = math.pi / 4
angle = st.floats(-Q, Q, allow_nan=False)


def test_named_gate_contents():
    assert equivalent_contents(interaction_content(cnot_matrix()).reduced, (0, 0, Q))
    assert np.allclose(interaction_content(swap_matrix()).reduced, (Q, Q, Q), atol=1e-9)
    assert np.allclose(interaction_content(np.eye(4)).reduced, (0, 0, 0), atol=1e-9)
    assert np.allclose(interaction_content(cz_matrix()).reduced, (Q, 0, 0), atol=1e-9)


def test_sqrt_swap_and_inverse_are_distinct():
    a = interaction_content(sqrt_swap_matrix()).reduced
    b = interaction_content(sqrt_swap_matrix().conj().T).reduced
    assert np.allclose(a, (math.pi / 8, math.pi / 8, -math.pi / 8), atol=1e-9)
    assert np.allclose(b, (math.pi / 8,) * 3, atol=1e-9)


def test_controlled_rotation_content_is_quarter_angle():
    for theta in (math.pi / 4, math.pi / 2, 1.0):
        c = interaction_content(cz_matrix(theta)).reduced
        assert np.allclose(c, (theta / 4, 0, 0), atol=1e-9)


def test_native_evolution_content(rng):
    for phi in rng.uniform(-Q, Q, 20):
        c = interaction_content(u_can_ideal(phi))
        assert equivalent_contents(c.reduced, (phi, phi, 0))


def test_round_trip_on_haar_unitaries(rng):
    for _ in range(50):
        u = haar_unitary(4, rng)
        c = interaction_content(u)
        assert locally_equivalent(canonical_unitary(c), u, atol=1e-8)
        local = kron(haar_unitary(2, rng), haar_unitary(2, rng))
        c2 = interaction_content(local @ u @ kron(haar_unitary(2, rng), haar_unitary(2, rng)))
        assert np.allclose(c.reduced, c2.reduced, atol=1e-8)


def test_reduced_chamber_inequalities(rng):
    for _ in range(50):
        a, b, c = interaction_content(haar_unitary(4, rng)).reduced
        assert Q + 1e-12 >= a >= b >= abs(c) - 1e-12


def test_rejects_non_unitary():
    with pytest.raises(LinAlgError):
        interaction_content(2 * np.eye(4))
    with pytest.raises(LinAlgError):
        interaction_content(np.eye(3))


def test_branch_cut_is_reported():
    # exp(i pi/2 XX) = i XX has eigenphases on the cut
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        c = interaction_content(canonical_unitary((math.pi / 2, 0, 0)))
    assert c.ambiguous
    assert any(issubclass(w.category, AmbiguousBranchWarning) for w in rec)
    assert np.allclose(c.reduced, 0, atol=1e-9)


def test_conjugation_flip_matches_matrices():
    t = (0.1, 0.2, -0.3)
    u = canonical_unitary(t)
    for axis, p in (("x", PAULI_X), ("y", PAULI_Y), ("z", PAULI_Z)):
        p1 = kron(p, np.eye(2))
        assert equal_up_to_phase(p1 @ u @ p1, canonical_unitary(conjugation_flip(t, axis)))
    with pytest.raises(ValueError):
        conjugation_flip(t, "w")


def test_hadamard_reorder_matches_matrices():
    t = (0.1, 0.2, -0.3)
    hh = kron(HADAMARD, HADAMARD)
    assert equal_up_to_phase(hh @ canonical_unitary(t) @ hh, canonical_unitary(hadamard_reorder(t)))


def test_makhlin_invariants_of_cnot():
    g1, g2 = makhlin_invariants(cnot_matrix())
    assert abs(g1) < 1e-12 and g2 == pytest.approx(1.0)


def test_synth_zz_exact_and_sign():
    for theta in (0.3, -0.3, math.pi / 2):
        assert equal_up_to_phase(synth_zz(theta).matrix(), canonical_unitary((0, 0, theta)), 1e-12)
    with pytest.raises(ValueError):
        synth_zz(0.0)
    with pytest.raises(ValueError):
        synth_zz(2.0)


def test_synth_native_is_single_segment():
    c = synth_content((math.pi / 8, math.pi / 8, 0))
    assert len(c.steps) == 1 and len(c.interactions()) == 1


def test_synth_swap_uses_native_plus_zz_block():
    c = synth_content((Q, Q, Q))
    assert len(c.interactions()) == 3
    assert equal_up_to_phase(c.matrix(), canonical_unitary((Q, Q, Q)))


def test_synth_range_error():
    with pytest.raises(ValueError):
        synth_content((1.0, 0, 0))


@settings(max_examples=60, deadline=None)
@given(angle, angle, angle)
def test_synth_content_exact(a, b, c):
    circuit = synth_content((a, b, c))
    assert len(circuit.interactions()) <= 6
    assert equal_up_to_phase(circuit.matrix(), canonical_unitary((a, b, c)), 1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_reduce_is_idempotent_and_preserves_class(a, b, c):
    r = reduce_content((a, b, c))
    assert reduce_content(r) == pytest.approx(r, abs=1e-9)
    assert locally_equivalent(canonical_unitary(r), canonical_unitary((a, b, c)), atol=1e-8)
