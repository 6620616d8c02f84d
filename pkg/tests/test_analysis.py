import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import haar_unitary
from kanegates.analysis import (
    basis_fidelities,
    deviation_up_to_local_z,
    fit_local_z,
    gate_error,
    gate_report,
    state_fidelity,
    strict_deviation,
)
from kanegates.canonical import canonical_unitary, synth_content
from kanegates.circuits import rz
from kanegates.spin_algebra import PAULI_X, kron


def test_state_fidelity_examples():
    zero, one = np.array([1, 0]), np.array([0, 1])
    plus = (zero + one) / math.sqrt(2)
    assert state_fidelity(zero, zero) == pytest.approx(1)
    assert state_fidelity(zero, one) == 0
    assert state_fidelity(zero, plus) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        state_fidelity(zero, np.ones(3))


def test_gate_error_examples():
    assert gate_error(np.eye(4), np.eye(4)) == pytest.approx(0, abs=1e-15)
    assert gate_error(kron(PAULI_X, np.eye(2)), np.eye(4)) == 1
    with pytest.raises(ValueError):
        gate_error(np.eye(4), 2 * np.eye(4))


def test_gate_error_counts_leakage():
    assert gate_error(0.99 * np.eye(4), np.eye(4)) == pytest.approx(1 - 0.99**2)


@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10), st.integers(0, 2**32 - 1))
def test_gate_error_global_phase_invariant(gamma, seed):
    rng = np.random.default_rng(seed)
    u, v = haar_unitary(4, rng), haar_unitary(4, rng)
    assert abs(gate_error(np.exp(1j * gamma) * u, v) - gate_error(u, v)) < 1e-12


def test_relative_phases_are_invisible_to_error_but_not_strict():
    d = np.diag(np.exp(1j * np.array([0, 0.1, 0.2, 0.3])))
    assert gate_error(d, np.eye(4)) < 1e-12
    assert strict_deviation(d, np.eye(4)) > 0.1


def test_error_zero_means_perfect_fidelities(rng):
    u = haar_unitary(4, rng)
    assert gate_error(u, u) < 1e-12
    assert min(basis_fidelities(u, u)) >= 1 - 1e-12


def test_local_z_fit_recovers_rotations():
    ideal = canonical_unitary((0.3, 0.2, 0.1))
    d = kron(rz(0.4), rz(-0.7)) * np.exp(0.9j)
    sim = d @ ideal
    assert deviation_up_to_local_z(sim, ideal) < 1e-12
    assert np.allclose(fit_local_z(sim, ideal), np.diag(d))


def test_gate_report_json_schema_and_determinism():
    r1 = gate_report("cnot")
    r2 = gate_report("cnot")
    assert r1.to_json() == r2.to_json()
    d = json.loads(r1.to_json())
    assert set(d) >= {"gate", "time_us", "breakdown", "error", "leakage", "fidelities"}
    assert set(d["breakdown"]) == {"x_us", "z_us", "interaction_us", "wait_us"}
    assert len(d["fidelities"]) == 4
    assert d["error"] == pytest.approx(1 - min(d["fidelities"]))
    assert 0 <= d["error"] <= 1


def test_gate_report_on_circuit_and_oracle():
    c = synth_content((0.2, 0.1, 0.0))
    r = gate_report(c, target=canonical_unitary((0.2, 0.1, 0.0)), oracle=True)
    assert r.error < 5e-4
    assert r.oracle_deviation is not None and r.oracle_deviation < 1e-5
