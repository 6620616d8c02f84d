"""Device parameters and the exact donor spin Hamiltonians.

The two-donor Hamiltonian is

    H = sum_i [-gn*B Z_ni + muB*B Z_ei + A_i s_ei.s_ni] + J s_e1.s_e2 + H_ac(t)

with a circularly rotating transverse field in ``H_ac``. Because the field is
circular and the static part conserves total Z, the co-rotating frame removes
the time dependence exactly.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from kanegates import constants as C
from kanegates.spin_algebra import PAULI_X, PAULI_Y, PAULI_Z, embed, layout_spins, spin_dot

__all__ = [
    "PhysicsValidityError",
    "DeviceParams",
    "OperatingPoint",
    "static_hamiltonian",
    "ac_hamiltonian",
    "corotating_hamiltonian",
    "frame_generator",
    "total_z",
    "load_config",
]


class PhysicsValidityError(ValueError):
    """Parameters leave the regime where the device model applies."""


@dataclass(frozen=True)
class DeviceParams:
    """Instantaneous control settings.

    ``omega_ac`` is signed: the drive term is ``X cos(omega_ac t + phase) +
    Y sin(omega_ac t + phase)``, and nuclei precess in the negative sense of
    that convention, so nuclear resonance needs ``omega_ac < 0``.
    """

    B: float = C.B_DEFAULT
    Bac: float = 0.0
    omega_ac: float = 0.0
    phase: float = 0.0
    A1: float = C.A_DEFAULT
    A2: float = C.A_DEFAULT
    J: float = 0.0

    def validate(self) -> None:
        if self.B <= 0:
            raise PhysicsValidityError(f"static field must be positive, got B={self.B}")
        if self.Bac < 0:
            raise PhysicsValidityError(f"rotating field amplitude must be >= 0, got {self.Bac}")
        for name in ("A1", "A2"):
            a = getattr(self, name)
            if not 0 <= a <= C.A_MAX * (1 + 1e-9):
                raise PhysicsValidityError(f"{name}={a} meV outside [0, {C.A_MAX}]")
            if a < 0.5 * C.A_MAX * (1 - 1e-9):
                warnings.warn(
                    f"{name}={a} meV is below 50% of the unperturbed hyperfine coupling",
                    RuntimeWarning,
                    stacklevel=2,
                )
        if not 0 <= self.J <= C.J_MAX * (1 + 1e-9):
            raise PhysicsValidityError(f"J={self.J} meV outside [0, {C.J_MAX}]")
        if not self.far_from_crossing:
            raise PhysicsValidityError(
                f"J={self.J} meV is not below muB*B/2={C.MU_B * self.B / 2:.4g} meV"
            )

    @property
    def far_from_crossing(self) -> bool:
        return self.J < C.MU_B * self.B / 2


@dataclass(frozen=True)
class OperatingPoint:
    """The named control settings the compiler switches between.

    Defaults are the Z-rotation, X-rotation and interaction operating points
    (A, A_z, A_x, B, B_ac, A_U, J_U).
    """

    B: float = C.B_DEFAULT
    A: float = C.A_DEFAULT
    Az: float = C.A_Z_DEFAULT
    Ax: float = C.A_X_DEFAULT
    Bac: float = C.B_AC_DEFAULT
    AU: float = C.A_U_DEFAULT
    JU: float = C.J_U_DEFAULT
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    def validate(self) -> None:
        for a in (self.A, self.Az, self.Ax, self.AU):
            DeviceParams(B=self.B, A1=a, A2=a).validate()
        DeviceParams(B=self.B, A1=self.AU, A2=self.AU, J=self.JU, Bac=self.Bac).validate()
        if not self.Az < self.A:
            raise PhysicsValidityError("A_z must be below the unperturbed A")
        if not self.Ax < self.A:
            raise PhysicsValidityError("A_x must be below the unperturbed A")
        if self.Bac <= 0:
            raise PhysicsValidityError("B_ac must be positive to drive rotations")

    def idle(self) -> DeviceParams:
        return DeviceParams(B=self.B, A1=self.A, A2=self.A)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        return d

    def with_value(self, key: str, value: float) -> "OperatingPoint":
        key = _CONFIG_ALIASES.get(key, key)
        if key not in _OPERATING_FIELDS:
            raise KeyError(f"unknown operating-point parameter {key!r}")
        return replace(self, **{key: float(value)})


_OPERATING_FIELDS = ("B", "A", "Az", "Ax", "Bac", "AU", "JU")
# DeviceParams-style keys map onto the operating point they configure.
_CONFIG_ALIASES = {"J": "JU", "A1": "A", "A2": "A", "A_z": "Az", "A_x": "Ax", "A_U": "AU", "J_U": "JU"}


def load_config(path: str | Path | None) -> OperatingPoint:
    """Read an operating point from JSON; missing keys keep the defaults.

    Accepts the DeviceParams keys ``{B, Bac, omega_ac, phase, A1, A2, J}``
    (``A1``/``A2`` set the unperturbed coupling, ``J`` the interaction
    exchange) as well as ``{A, Az, Ax, AU, JU}``.
    """
    if path is None:
        return OperatingPoint()
    raw = json.loads(Path(path).read_text())
    if not isinstance(raw, dict):
        raise ValueError("config must be a JSON object")
    values: dict[str, float] = {}
    extra: dict = {}
    for key, val in raw.items():
        target = _CONFIG_ALIASES.get(key, key)
        if target in _OPERATING_FIELDS:
            values[target] = float(val)
        elif key in ("omega_ac", "phase"):
            extra[key] = float(val)
        else:
            raise ValueError(f"unknown config key {key!r}")
    if "A1" in raw and "A2" in raw and float(raw["A1"]) != float(raw["A2"]):
        raise ValueError("A1 and A2 must agree: the compiler assumes identical donors at rest")
    return OperatingPoint(**values, extra=extra)


def _n_spins(layout: str) -> int:
    return len(layout_spins(layout))


def total_z(layout: str = "2-donor", nuclei_only: bool = False) -> np.ndarray:
    n = _n_spins(layout)
    sites = range(n // 2, n) if nuclei_only else range(n)
    return sum(embed(PAULI_Z, s, n) for s in sites)


def static_hamiltonian(p: DeviceParams, layout: str = "2-donor") -> np.ndarray:
    """Zeeman, hyperfine and (two-donor only) exchange terms, in meV."""
    n = _n_spins(layout)
    n_donors = n // 2
    couplings = (p.A1, p.A2)[:n_donors]
    h = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n_donors):
        e, nuc = i, n_donors + i
        h += -C.GN_MU_N * p.B * embed(PAULI_Z, nuc, n)
        h += C.MU_B * p.B * embed(PAULI_Z, e, n)
        h += couplings[i] * spin_dot(e, nuc, n)
    if n_donors == 2:
        h += p.J * spin_dot(0, 1, n)
    return h


def _transverse(p: DeviceParams, angle: float, layout: str) -> np.ndarray:
    n = _n_spins(layout)
    n_donors = n // 2
    c, s = math.cos(angle), math.sin(angle)
    h = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n_donors):
        e, nuc = i, n_donors + i
        h += -C.GN_MU_N * p.Bac * (c * embed(PAULI_X, nuc, n) + s * embed(PAULI_Y, nuc, n))
        h += C.MU_B * p.Bac * (c * embed(PAULI_X, e, n) + s * embed(PAULI_Y, e, n))
    return h


def ac_hamiltonian(p: DeviceParams, t: float, layout: str = "2-donor") -> np.ndarray:
    """Rotating-field term at lab time ``t`` (us), in meV."""
    if p.Bac < 0:
        raise PhysicsValidityError("B_ac must be non-negative")
    return _transverse(p, p.omega_ac * t + p.phase, layout)


def lab_hamiltonian(p: DeviceParams, t: float, layout: str = "2-donor") -> np.ndarray:
    return static_hamiltonian(p, layout) + ac_hamiltonian(p, t, layout)


def frame_generator(omega: float, t: float, layout: str = "2-donor") -> np.ndarray:
    """Diagonal of R(t) = exp(i omega t sum_s Z_s / 2) over every spin."""
    return np.exp(0.5j * omega * t * np.real(np.diag(total_z(layout))))


def corotating_hamiltonian(p: DeviceParams, layout: str = "2-donor") -> np.ndarray:
    """Time-independent Hamiltonian in the frame co-rotating with the drive.

    With R(t) = exp(i omega_ac t Sz/2), Sz the total Z of all spins, the lab
    state is psi = R(t)^dagger chi and chi evolves under
    ``H_static + H_ac(0) - hbar*omega_ac*Sz/2``.
    """
    h = static_hamiltonian(p, layout) + _transverse(p, p.phase, layout)
    return h - 0.5 * C.HBAR * p.omega_ac * total_z(layout)
