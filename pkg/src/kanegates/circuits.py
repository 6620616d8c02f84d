"""Ideal gate matrices and abstract two-qubit circuits.

Qubit 1 is nucleus 1 (the first tensor factor, the CNOT target) and qubit 2
is nucleus 2 (the CNOT control). Basis labels ``|ab>`` list nucleus 1 first,
so index = 2*a + b. Rotations use ``R_k(theta) = exp(+i theta sigma_k / 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from kanegates.analytic import u_can_ideal
from kanegates.spin_algebra import I2, PAULI_X, PAULI_Y, PAULI_Z, expm_hermitian, kron

PAULI = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def rot(axis: str, theta: float) -> np.ndarray:
    return expm_hermitian(PAULI[axis], -theta / 2, hbar=1.0)


def rx(theta: float) -> np.ndarray:
    return rot("x", theta)


def ry(theta: float) -> np.ndarray:
    return rot("y", theta)


def rz(theta: float) -> np.ndarray:
    return rot("z", theta)


SINGLE_QUBIT_GATES = ("h", "x", "y", "z", "rx", "ry", "rz")


def single_qubit_matrix(name: str, angle: float = 0.0) -> np.ndarray:
    if name == "h":
        return HADAMARD
    if name in ("x", "y", "z"):
        return PAULI[name]
    if name in ("rx", "ry", "rz"):
        return rot(name[1], angle)
    raise ValueError(f"unknown single-qubit gate {name!r}")


def primitives(name: str, angle: float = 0.0) -> list[tuple[str, float]]:
    """Z/X/Y rotation primitives realizing a single-qubit gate up to global phase."""
    if name == "h":
        return [("z", math.pi / 2), ("x", math.pi / 2), ("z", math.pi / 2)]
    if name in ("x", "y", "z"):
        return [(name, math.pi)]
    if name in ("rx", "ry", "rz"):
        return [(name[1], angle)]
    raise ValueError(f"unknown single-qubit gate {name!r}")


@dataclass(frozen=True)
class SingleGate:
    name: str
    angle: float = 0.0

    def matrix(self) -> np.ndarray:
        return single_qubit_matrix(self.name, self.angle)

    def label(self) -> str:
        if self.name.startswith("r"):
            return f"{self.name.upper()}({self.angle:.6g})"
        return self.name.upper()


@dataclass(frozen=True)
class Local:
    """Single-qubit gates applied in the same time slot (parallel when both set)."""

    q1: SingleGate | None = None
    q2: SingleGate | None = None

    def matrix(self) -> np.ndarray:
        a = self.q1.matrix() if self.q1 else I2
        b = self.q2.matrix() if self.q2 else I2
        return kron(a, b)

    def label(self) -> str:
        parts = []
        if self.q1:
            parts.append(f"{self.q1.label()}(n1)")
        if self.q2:
            parts.append(f"{self.q2.label()}(n2)")
        return " || ".join(parts)


@dataclass(frozen=True)
class Interaction:
    """Native free evolution with interaction content (phi, phi, 0); phi may be negative."""

    phi: float

    def matrix(self) -> np.ndarray:
        return u_can_ideal(self.phi)

    def label(self) -> str:
        return f"U({self.phi:.6g})"


Step = Union[Local, Interaction]


@dataclass(frozen=True)
class AbstractGateSeq:
    """Time-ordered steps; ``steps[0]`` acts first."""

    steps: tuple[Step, ...] = field(default_factory=tuple)
    name: str = "custom"

    def matrix(self) -> np.ndarray:
        out = np.eye(4, dtype=complex)
        for s in self.steps:
            out = s.matrix() @ out
        return out

    def interactions(self) -> list[Interaction]:
        return [s for s in self.steps if isinstance(s, Interaction)]

    def labels(self) -> list[str]:
        return [s.label() for s in self.steps]

    def inverse(self) -> "AbstractGateSeq":
        out = []
        for s in reversed(self.steps):
            if isinstance(s, Interaction):
                out.append(Interaction(-s.phi))
            else:
                out.append(Local(q1=_inverse_gate(s.q1), q2=_inverse_gate(s.q2)))
        return AbstractGateSeq(tuple(out), name=f"{self.name}^-1")

    def __add__(self, other: "AbstractGateSeq") -> "AbstractGateSeq":
        return AbstractGateSeq(self.steps + other.steps, name=self.name)

    def simplified(self) -> "AbstractGateSeq":
        """Merge adjacent native interactions (they commute and add)."""
        out: list[Step] = []
        for s in self.steps:
            if isinstance(s, Interaction) and out and isinstance(out[-1], Interaction):
                merged = out[-1].phi + s.phi
                out.pop()
                if abs(merged) > 1e-15:
                    out.append(Interaction(merged))
            else:
                out.append(s)
        return AbstractGateSeq(tuple(out), name=self.name)


def _inverse_gate(g: SingleGate | None) -> SingleGate | None:
    if g is None or g.name in ("h", "x", "y", "z"):
        return g
    return SingleGate(g.name, -g.angle)


def on1(name: str, angle: float = 0.0) -> Local:
    return Local(q1=SingleGate(name, angle))


def on2(name: str, angle: float = 0.0) -> Local:
    return Local(q2=SingleGate(name, angle))


def both(name: str, angle: float = 0.0) -> Local:
    g = SingleGate(name, angle)
    return Local(q1=g, q2=g)


def seq(steps: Iterable[Step], name: str = "custom") -> AbstractGateSeq:
    return AbstractGateSeq(tuple(steps), name=name)


# ---------------------------------------------------------------- target gates


def cnot_matrix() -> np.ndarray:
    """CNOT with nucleus 2 as control and nucleus 1 as target."""
    m = np.eye(4, dtype=complex)
    m[[1, 3]] = m[[3, 1]]
    return m


def cz_matrix(theta: float = math.pi) -> np.ndarray:
    return np.diag([1, 1, 1, np.exp(1j * theta)]).astype(complex)


def swap_matrix() -> np.ndarray:
    return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def sqrt_swap_matrix() -> np.ndarray:
    p, m = (1 + 1j) / 2, (1 - 1j) / 2
    return np.array([[1, 0, 0, 0], [0, p, m, 0], [0, m, p, 0], [0, 0, 0, 1]], dtype=complex)


# ------------------------------------------------------------- named circuits
#
# The interaction boxes of the CZ, CNOT and swap circuits are the natively
# available evolution exp(-i phi (XX+YY)); the square-root-of-swap circuit is
# written for exp(+i phi (XX+YY)). Each circuit below reproduces its target
# matrix exactly up to global phase (see tests).


def cz_circuit(theta: float = math.pi) -> AbstractGateSeq:
    if not 0 < theta <= 2 * math.pi:
        raise ValueError(f"controlled-Z angle must lie in (0, 2pi], got {theta}")
    if math.isclose(theta, math.pi, abs_tol=1e-12):
        phi = -math.pi / 8
        tail = Local(q1=SingleGate("rz", math.pi / 2), q2=SingleGate("rz", -math.pi / 2))
    else:
        # content theta/4 split over two refocused segments of theta/8
        phi = theta / 8
        tail = Local(q1=SingleGate("rz", -theta / 2), q2=SingleGate("rz", -theta / 2 - math.pi))
    return seq(
        [both("h"), Interaction(phi), on2("x"), Interaction(phi), both("h"), tail],
        name=f"cz({theta:.6g})",
    )


def cnot_circuit() -> AbstractGateSeq:
    return seq(
        [
            Local(q1=SingleGate("rx", math.pi / 2), q2=SingleGate("h")),
            Interaction(-math.pi / 8),
            on2("x"),
            Interaction(-math.pi / 8),
            on2("h"),
            on2("rz", -math.pi / 2),
        ],
        name="cnot",
    )


def swap_circuit() -> AbstractGateSeq:
    return seq(
        [
            both("h"),
            Interaction(-math.pi / 8),
            on2("x"),
            Interaction(-math.pi / 8),
            both("h"),
            on2("z"),
            Interaction(-math.pi / 4),
        ],
        name="swap",
    )


def sqrt_swap_circuit() -> AbstractGateSeq:
    return seq(
        [
            both("h"),
            on2("z"),
            Interaction(math.pi / 16),
            on2("x"),
            Interaction(math.pi / 16),
            on2("z"),
            both("h"),
            Interaction(math.pi / 8),
            on2("z"),
        ],
        name="sqrt_swap",
    )


def single_qubit_circuit(name: str, angle: float = 0.0, qubit: int = 1) -> AbstractGateSeq:
    step = on1(name, angle) if qubit == 1 else on2(name, angle)
    return seq([step], name=name if not name.startswith("r") else f"{name}({angle:.6g})")


NAMED_GATES = ("cnot", "cz", "swap", "sqrt_swap", "h", "x", "y", "z", "rx", "ry", "rz")


def named_circuit(name: str, theta: float | None = None, qubit: int = 1) -> AbstractGateSeq:
    name = name.lower()
    if name == "cnot":
        return cnot_circuit()
    if name == "cz":
        return cz_circuit(math.pi if theta is None else theta)
    if name == "swap":
        return swap_circuit()
    if name in ("sqrt_swap", "sqrtswap"):
        return sqrt_swap_circuit()
    if name in SINGLE_QUBIT_GATES:
        if name.startswith("r") and theta is None:
            raise ValueError(f"gate {name!r} needs an angle")
        return single_qubit_circuit(name, theta or 0.0, qubit)
    raise ValueError(f"unknown gate {name!r}; known: {', '.join(NAMED_GATES)}")


def named_target(name: str, theta: float | None = None, qubit: int = 1) -> np.ndarray:
    """Textbook matrix a named gate should implement."""
    name = name.lower()
    if name == "cnot":
        return cnot_matrix()
    if name == "cz":
        return cz_matrix(math.pi if theta is None else theta)
    if name == "swap":
        return swap_matrix()
    if name in ("sqrt_swap", "sqrtswap"):
        return sqrt_swap_matrix()
    if name in SINGLE_QUBIT_GATES:
        g = single_qubit_matrix(name, theta or 0.0)
        return kron(g, I2) if qubit == 1 else kron(I2, g)
    raise ValueError(f"unknown gate {name!r}")
