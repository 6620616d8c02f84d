"""Second-order perturbative frequencies of the donor nuclei.

All functions return angular frequencies in rad/us and take energies in meV.
The ``zeeman_sum`` that appears everywhere is ``muB*B + gn*B``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from kanegates import constants as C
from kanegates.device import DeviceParams, OperatingPoint, PhysicsValidityError, static_hamiltonian
from kanegates.spin_algebra import PAULI_X, PAULI_Y, expm_hermitian, kron

XX_PLUS_YY = kron(PAULI_X, PAULI_X) + kron(PAULI_Y, PAULI_Y)


def zeeman_sum(B: float) -> float:
    return C.MU_B * B + C.GN_MU_N * B


def larmor_omega(A: float, B: float) -> float:
    """Nuclear Larmor frequency with the hyperfine shift, electron spin down."""
    e = 2 * C.GN_MU_N * B + 2 * A + 2 * A**2 / zeeman_sum(B)
    return e / C.HBAR


def zrot_omega(A: float, A_z: float, B: float) -> float:
    """Precession slow-down when the hyperfine coupling drops from A to A_z."""
    e = 2 * (A - A_z) + 2 * (A**2 - A_z**2) / zeeman_sum(B)
    return e / C.HBAR


def xrot_omega(A_x: float, B: float, B_ac: float) -> float:
    """Hyperfine-enhanced nuclear drive strength.

    A resonant pulse of duration t rotates by ``theta = 2 * omega_x * t``.
    """
    e = C.GN_MU_N * B_ac * (1 + A_x / (C.GN_MU_N * B))
    return e / C.HBAR


@dataclass(frozen=True)
class EnergyQuartet:
    """Ground-electron-manifold energies of two coupled donors (meV)."""

    E11: float
    Es: float
    Ea: float
    E00: float
    E0: float

    @property
    def hbar_omega_B(self) -> float:
        return self.E11 - self.E0

    @property
    def hbar_omega_S(self) -> float:
        return self.Es - self.E0

    def centered(self) -> np.ndarray:
        """Energies relative to the symmetry point, ordered (00, a, s, 11)."""
        return np.array([self.E00, self.Ea, self.Es, self.E11]) - self.E0


def second_order_energies(A: float, J: float, B: float) -> EnergyQuartet:
    if not J < C.MU_B * B / 2:
        raise PhysicsValidityError(
            f"J={J} meV is at or beyond the electronic level crossing muB*B/2={C.MU_B * B / 2:.4g}"
        )
    z = zeeman_sum(B)
    gnb = C.GN_MU_N * B
    base = -2 * C.MU_B * B + J
    near = A**2 / (z - 2 * J)
    far = A**2 / z
    # the symmetric-point form makes E11 - E0 = E0 - E00 exact in floating point
    e0 = base - near - far
    hw_b = 2 * A + 2 * gnb + far + near
    hw_s = near - far
    return EnergyQuartet(E11=e0 + hw_b, Es=e0 + hw_s, Ea=e0 - hw_s, E00=e0 - hw_b, E0=e0)


def omega_B(A: float, J: float, B: float) -> float:
    return second_order_energies(A, J, B).hbar_omega_B / C.HBAR


def omega_S(A: float, J: float, B: float) -> float:
    return second_order_energies(A, J, B).hbar_omega_S / C.HBAR


def interaction_time(phi: float, A: float, J: float, B: float) -> float:
    """Free-evolution time giving interaction content (phi, phi, 0); |phi| <= pi/4."""
    if not abs(phi) <= math.pi / 4 + 1e-12:
        raise ValueError(f"|phi|={abs(phi)} exceeds the pi/4 branch limit")
    w = omega_S(A, J, B)
    if w <= 0:
        raise PhysicsValidityError("no nuclear coupling: omega_S is zero")
    return 2 * abs(phi) / w


def u_can_ideal(phi: float) -> np.ndarray:
    """exp(i phi (X⊗X + Y⊗Y))."""
    return expm_hermitian(XX_PLUS_YY, -phi, hbar=1.0)


@dataclass(frozen=True)
class FrequencySet:
    omega_l: float
    omega_z: float
    omega_x: float
    omega_B: float
    omega_S: float

    def to_dict(self) -> dict:
        return asdict(self)


def frequency_set(op: OperatingPoint) -> FrequencySet:
    return FrequencySet(
        omega_l=larmor_omega(op.A, op.B),
        omega_z=zrot_omega(op.A, op.Az, op.B),
        omega_x=xrot_omega(op.Ax, op.B, op.Bac),
        omega_B=omega_B(op.AU, op.JU, op.B),
        omega_S=omega_S(op.AU, op.JU, op.B),
    )


def gate_times(op: OperatingPoint) -> dict[str, float | None]:
    """Durations (us) of the elementary operations at an operating point.

    ``t_H`` counts the X(pi/2) pulse plus its two Z(pi/2) rotations done
    physically; the interaction time is None when J = 0 leaves no coupling.
    """
    f = frequency_set(op)
    t_half_z = (2 * math.pi - math.pi / 2) / f.omega_z
    return {
        "t_Z": math.pi / f.omega_z,
        "t_X": math.pi / (2 * f.omega_x),
        "t_H": math.pi / 2 / (2 * f.omega_x) + 2 * t_half_z,
        "t_interaction_pi_8": 2 * (math.pi / 8) / f.omega_S if f.omega_S > 0 else None,
    }


def _manifold_energies(p: DeviceParams, layout: str) -> np.ndarray:
    """Exact energies of the eigenstates living mostly on the electron-down manifold."""
    h = static_hamiltonian(p, layout)
    w, v = np.linalg.eigh(h)
    n = len(w)
    block = np.arange(n - n // 4 if layout == "2-donor" else n // 2, n)
    weight = np.sum(np.abs(v[block, :]) ** 2, axis=0)
    keep = np.sort(np.argsort(weight)[-len(block):])
    return np.sort(w[keep])


def exact_larmor_omega(A: float, B: float) -> float:
    e = _manifold_energies(DeviceParams(B=B, A1=A, A2=A), "1-donor")
    return float(e[1] - e[0]) / C.HBAR


def exact_frequency_set(op: OperatingPoint) -> FrequencySet:
    """Frequencies from diagonalizing the static Hamiltonians; omega_x stays perturbative."""
    e00, ea, es, e11 = _manifold_energies(DeviceParams(B=op.B, A1=op.AU, A2=op.AU, J=op.JU), "2-donor")
    w_l = exact_larmor_omega(op.A, op.B)
    return FrequencySet(
        omega_l=w_l,
        omega_z=w_l - exact_larmor_omega(op.Az, op.B),
        omega_x=xrot_omega(op.Ax, op.B, op.Bac),
        omega_B=float(e11 - e00) / 2 / C.HBAR,
        omega_S=float(es - ea) / 2 / C.HBAR,
    )


def exact_centered_energies(A: float, J: float, B: float) -> np.ndarray:
    """Exact counterpart of ``EnergyQuartet.centered``: (00, a, s, 11) minus their mean."""
    e = _manifold_energies(DeviceParams(B=B, A1=A, A2=A, J=J), "2-donor")
    return e - e.mean()
