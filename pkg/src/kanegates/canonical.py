"""Interaction content of two-qubit unitaries and synthesis from native evolution.

Any two-qubit U factors as ``k1 . exp(i(a XX + b YY + c ZZ)) . k2`` with
single-qubit ``k1, k2``; ``(a, b, c)`` is its interaction content. Contents
are compared in the reduced chamber ``pi/4 >= a >= b >= |c|`` (with ``c >= 0``
when ``a = pi/4``), where local equivalence becomes equality.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from kanegates.circuits import AbstractGateSeq, Interaction, Local, SingleGate, both, on1, seq
from kanegates.spin_algebra import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    LinAlgError,
    eig_unit_circle,
    expm_hermitian,
    is_unitary,
    kron,
    to_magic,
)

XX = kron(PAULI_X, PAULI_X)
YY = kron(PAULI_Y, PAULI_Y)
ZZ = kron(PAULI_Z, PAULI_Z)

BRANCH_ATOL = 1e-9
_QUARTER = math.pi / 4


class AmbiguousBranchWarning(RuntimeWarning):
    """An eigenphase sits on a branch cut; raw content is one of several choices."""


@dataclass(frozen=True)
class InteractionContent:
    """Raw content as extracted, its reduced-chamber representative, and flags."""

    raw: tuple[float, float, float]
    reduced: tuple[float, float, float]
    ambiguous: bool = False

    def __iter__(self):
        return iter(self.reduced)

    def to_dict(self) -> dict:
        return {"raw": list(self.raw), "reduced": list(self.reduced), "ambiguous": self.ambiguous}


def canonical_unitary(content) -> np.ndarray:
    """exp(i(a XX + b YY + c ZZ)); the three terms commute."""
    a, b, c = _triple(content)
    return expm_hermitian(a * XX + b * YY + c * ZZ, -1.0, hbar=1.0)


def _triple(content) -> tuple[float, float, float]:
    if isinstance(content, InteractionContent):
        return content.reduced
    a, b, c = (float(v) for v in content)
    return a, b, c


def reduce_content(content, atol: float = 1e-10) -> tuple[float, float, float]:
    """Map any content onto its reduced-chamber representative.

    Uses the local symmetries: shifting one entry by pi/2, permuting entries,
    and flipping the signs of any two.
    """
    v = list(_triple(content))
    # fold each entry into (-pi/4, pi/4]
    for i, x in enumerate(v):
        y = math.remainder(x, math.pi / 2)
        if y <= -_QUARTER + atol:
            y += math.pi / 2
        v[i] = y
    v.sort(key=abs, reverse=True)
    a, b, c = v
    if a < 0:
        a, c = -a, -c
    if b < 0:
        b, c = -b, -c
    if abs(a - _QUARTER) <= atol and c < 0:
        c = -c
    out = []
    for x in (a, b, c):
        out.append(0.0 if abs(x) < atol else x)
    return tuple(out)


def makhlin_invariants(u: np.ndarray) -> tuple[complex, float]:
    """Local invariants (G1, G2); equal for locally equivalent unitaries."""
    u = np.asarray(u, dtype=complex)
    m = to_magic(u)
    mm = m.T @ m
    det = np.linalg.det(u)
    tr = np.trace(mm)
    g1 = tr**2 / (16 * det)
    g2 = (tr**2 - np.trace(mm @ mm)) / (4 * det)
    return complex(g1), float(g2.real)


def locally_equivalent(u: np.ndarray, v: np.ndarray, atol: float = 1e-8) -> bool:
    g1u, g2u = makhlin_invariants(u)
    g1v, g2v = makhlin_invariants(v)
    return abs(g1u - g1v) <= atol and abs(g2u - g2v) <= atol


def interaction_content(u: np.ndarray, atol: float = 1e-8) -> InteractionContent:
    """Interaction content of a 4x4 unitary.

    Raises ``LinAlgError`` for non-unitary input. An eigenphase of the
    magic-basis product on the branch cut is reported through
    ``ambiguous=True`` and an ``AmbiguousBranchWarning``; the reduced
    representative is unaffected by that choice.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4) or not is_unitary(u, atol=1e-9):
        raise LinAlgError("interaction content needs a 4x4 unitary")
    det = np.linalg.det(u)
    su = u / det ** 0.25
    m = to_magic(su)
    evals = eig_unit_circle(m.T @ m, atol=1e-8)
    two_lam = np.angle(evals)
    ambiguous = bool(np.any(np.abs(np.abs(two_lam) - math.pi) < BRANCH_ATOL))
    lam = two_lam / 2
    # the lambdas must sum to 0 (mod 2pi); shift the extreme ones by pi
    k = int(round(lam.sum() / math.pi))
    order = np.argsort(lam)
    if k > 0:
        for j in order[::-1][:k]:
            lam[j] -= math.pi
    elif k < 0:
        for j in order[: -k]:
            lam[j] += math.pi
    l1, l2, _, l4 = lam
    raw = ((l1 + l4) / 2, (l2 + l4) / 2, (l1 + l2) / 2)
    reduced = reduce_content(raw)
    if not locally_equivalent(canonical_unitary(reduced), u, atol=max(atol, 1e-8)):
        raise LinAlgError("internal check failed: content is not locally equivalent to input")
    if ambiguous:
        warnings.warn(
            "eigenphase on the branch cut; raw content is not unique",
            AmbiguousBranchWarning,
            stacklevel=2,
        )
    return InteractionContent(raw=tuple(float(x) for x in raw), reduced=reduced, ambiguous=ambiguous)


def conjugation_flip(content, axis: str) -> tuple[float, float, float]:
    """Content after conjugating by the Pauli ``axis`` on one qubit.

    The component along ``axis`` is kept; the other two change sign.
    """
    a, b, c = _triple(content)
    axis = axis.lower()
    if axis == "x":
        return a, -b, -c
    if axis == "y":
        return -a, b, -c
    if axis == "z":
        return -a, -b, c
    raise ValueError(f"axis must be x, y or z, got {axis!r}")


def hadamard_reorder(content) -> tuple[float, float, float]:
    """Content after conjugating both qubits by Hadamards: X and Z swap."""
    a, b, c = _triple(content)
    return c, b, a


def synth_zz(theta: float) -> AbstractGateSeq:
    """exp(i theta ZZ) from two native segments refocused by an X on qubit 1.

    Negative theta uses native segments of negative sign.
    """
    if not 0 < abs(theta) <= math.pi / 2 + 1e-12:
        raise ValueError(f"synth_zz needs 0 < |theta| <= pi/2, got {theta}")
    phi = theta / 2
    return seq(
        [both("h"), Interaction(phi), on1("x"), Interaction(phi), both("h"), on1("z")],
        name=f"zz({theta:.6g})",
    )


def synth_content(target, atol: float = 1e-12) -> AbstractGateSeq:
    """Circuit realizing exp(i(a XX + b YY + c ZZ)) exactly up to global phase.

    Splits ``aXX + bYY`` into ``p(XX+YY) + q(XX-YY)`` with ``p = (a+b)/2`` and
    ``q = (a-b)/2``; the ``XX-YY`` part is a native segment flipped by X on
    qubit 1. The ZZ part comes from ``synth_zz``. At most four native
    segments are used.
    """
    a, b, c = _triple(target)
    if max(abs(a), abs(b), abs(c)) > _QUARTER + 1e-12:
        raise ValueError("each content component must satisfy |alpha| <= pi/4")
    p, q = (a + b) / 2, (a - b) / 2
    steps: list = []
    if abs(p) > atol:
        steps.append(Interaction(p))
    if abs(q) > atol:
        steps += [on1("x"), Interaction(q), on1("x")]
    out = seq(steps, name=f"content({a:.6g},{b:.6g},{c:.6g})")
    if abs(c) > atol:
        out = out + synth_zz(c)
    return out


def equivalent_contents(c1, c2, atol: float = 1e-9) -> bool:
    r1, r2 = reduce_content(c1), reduce_content(c2)
    return max(abs(x - y) for x, y in zip(r1, r2)) <= atol


__all__ = [
    "InteractionContent",
    "AmbiguousBranchWarning",
    "canonical_unitary",
    "reduce_content",
    "makhlin_invariants",
    "locally_equivalent",
    "interaction_content",
    "conjugation_flip",
    "hadamard_reorder",
    "synth_zz",
    "synth_content",
    "equivalent_contents",
    "Local",
    "SingleGate",
]
