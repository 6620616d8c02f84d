"""Dense complex linear algebra on the 2-, 4- and 16-dimensional spin spaces.

Spin ordering is fixed throughout the package: ``(electron, nucleus)`` for a
single donor and ``(electron 1, electron 2, nucleus 1, nucleus 2)`` for a
donor pair. Basis index ``0`` of every spin is the ``Z = +1`` state, so a
nucleus in ``|0>`` and an electron in ``|up>`` both sit at index 0.
"""

from __future__ import annotations

import cmath
import math
from typing import Iterable, Sequence

import numpy as np

from kanegates.constants import HBAR

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}

# Columns are the magic (Bell) basis vectors Phi_1 .. Phi_4.
_S = 1 / math.sqrt(2)
MAGIC = np.array(
    [
        [_S, -1j * _S, 0, 0],
        [0, 0, _S, -1j * _S],
        [0, 0, -_S, -1j * _S],
        [_S, 1j * _S, 0, 0],
    ],
    dtype=complex,
)
MAGIC_DAG = MAGIC.conj().T

UNITARY_ATOL = 1e-12
HERMITIAN_RTOL = 1e-12

LAYOUTS = {
    "1-donor": ("e1", "n1"),
    "2-donor": ("e1", "e2", "n1", "n2"),
}


class LinAlgError(ValueError):
    """Raised when a matrix does not satisfy a required structural property."""


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices, left factor most significant."""
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def layout_spins(layout: str) -> tuple[str, ...]:
    try:
        return LAYOUTS[layout]
    except KeyError:
        raise ValueError(f"unknown layout {layout!r}; expected one of {sorted(LAYOUTS)}") from None


def embed(op: np.ndarray, site: int, n_spins: int) -> np.ndarray:
    """Place a 2x2 operator at ``site`` of an ``n_spins`` register."""
    if not 0 <= site < n_spins:
        raise IndexError(f"site {site} out of range for {n_spins} spins")
    return kron(*(op if k == site else I2 for k in range(n_spins)))


def embed_pauli(axis: str, site: int | str, layout: str = "2-donor") -> np.ndarray:
    """Pauli ``axis`` acting on one spin of ``layout``.

    ``site`` is either an integer position or a spin label such as ``"n1"``.
    """
    spins = layout_spins(layout)
    if isinstance(site, str):
        if site not in spins:
            raise IndexError(f"spin {site!r} not present in layout {layout!r}")
        site = spins.index(site)
    return embed(PAULIS[axis.upper()], site, len(spins))


def spin_dot(a: int, b: int, n_spins: int) -> np.ndarray:
    """sigma_a . sigma_b = XX + YY + ZZ between two sites."""
    return sum(embed(p, a, n_spins) @ embed(p, b, n_spins) for p in (PAULI_X, PAULI_Y, PAULI_Z))


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def is_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.abs(dagger(u) @ u - np.eye(len(u))).max() <= atol


def is_hermitian(h: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    h = np.asarray(h)
    scale = max(np.abs(h).max(), 1e-300)
    return np.abs(h - dagger(h)).max() <= rtol * scale


def expm_hermitian(h: np.ndarray, t: float, hbar: float = HBAR) -> np.ndarray:
    """Return ``exp(-i H t / hbar)`` via the eigendecomposition of ``H``.

    Args:
        h: Hermitian matrix, energies in meV.
        t: Duration in microseconds.
        hbar: Reduced Planck constant in meV*us.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, rtol=1e-10):
        raise LinAlgError("expm_hermitian requires a Hermitian matrix")
    h = 0.5 * (h + dagger(h))
    try:
        energies, vecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise LinAlgError(f"eigendecomposition failed: {exc}") from exc
    phases = np.exp(-1j * energies * (t / hbar))
    return (vecs * phases) @ dagger(vecs)


def eig_unit_circle(m: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    """Eigenvalues of a symmetric unitary, sorted by principal argument in (-pi, pi].

    A symmetric unitary ``M = A + iB`` has commuting real symmetric parts ``A``
    and ``B``, so a random real combination of them shares M's eigenvectors and
    can be diagonalized by a real orthogonal matrix. That keeps degenerate
    eigenspaces well behaved, unlike a general complex ``eig``.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise LinAlgError(f"expected a 4x4 matrix, got {m.shape}")
    if np.abs(m - m.T).max() > atol or not is_unitary(m, atol):
        raise LinAlgError("input is not a symmetric unitary within tolerance")
    a, b = m.real, m.imag
    rng = np.random.default_rng(1234)
    for _ in range(10):
        w = rng.uniform(0.1, 1.0)
        _, vecs = np.linalg.eigh(w * a + (1 - w) * b)
        d = vecs.T @ m @ vecs
        if np.abs(d - np.diag(np.diag(d))).max() < 1e-9:
            break
    else:  # pragma: no cover - only with pathological input
        raise LinAlgError("could not diagonalize symmetric unitary")
    evals = np.diag(d)
    evals = evals / np.abs(evals)
    args = np.angle(evals)
    # angle() returns [-pi, pi]; fold -pi onto +pi for a half-open branch
    args = np.where(args <= -math.pi + 1e-15, math.pi, args)
    order = np.argsort(args, kind="stable")
    return evals[order]


def to_magic(u: np.ndarray) -> np.ndarray:
    """Express a 4x4 operator in the magic basis: Q^dagger U Q."""
    return MAGIC_DAG @ np.asarray(u, dtype=complex) @ MAGIC


def from_magic(m: np.ndarray) -> np.ndarray:
    return MAGIC @ np.asarray(m, dtype=complex) @ MAGIC_DAG


def global_phase_align(a: np.ndarray, b: np.ndarray) -> complex:
    """Unit factor g minimizing the mismatch of ``a`` against ``g * b``.

    The phase is fixed on the largest-magnitude entry of ``b``.
    """
    k = int(np.argmax(np.abs(b)))
    ratio = np.asarray(a).flat[k] / np.asarray(b).flat[k]
    if abs(ratio) < 1e-300:
        return 1.0 + 0j
    return ratio / abs(ratio)


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max-entry deviation between ``a`` and ``b`` after removing one global phase."""
    g = global_phase_align(a, b)
    return float(np.abs(np.asarray(a) - g * np.asarray(b)).max())


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-10) -> bool:
    return phase_distance(a, b) <= atol


def product(mats: Iterable[np.ndarray], dim: int = 4) -> np.ndarray:
    """Time-ordered product: the first matrix in ``mats`` acts first."""
    out = np.eye(dim, dtype=complex)
    for m in mats:
        out = m @ out
    return out


def matrix_to_json(m: np.ndarray) -> list[list[list[float]]]:
    """Row-major nested list of ``[re, im]`` pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data: Sequence) -> np.ndarray:
    try:
        arr = np.array(
            [[complex(float(p[0]), float(p[1])) for p in row] for row in data],
            dtype=complex,
        )
    except (TypeError, IndexError, ValueError) as exc:
        raise ValueError(f"malformed complex matrix JSON: {exc}") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def unit_phase(angle: float) -> complex:
    return cmath.exp(1j * angle)
