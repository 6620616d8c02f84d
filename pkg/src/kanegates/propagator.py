"""Schrodinger propagation through a pulse schedule in the full 16-dim space.

``propagate_exact`` exponentiates each segment; AC segments are exact because
the drive is circular and the static Hamiltonian conserves total Z, so the
co-rotating Hamiltonian is constant. ``propagate_rk4`` integrates the lab
frame Schrodinger equation with classic RK4 as an independent check.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace

import numpy as np

from kanegates import constants as C
from kanegates.device import (
    corotating_hamiltonian,
    frame_generator,
    lab_hamiltonian,
    static_hamiltonian,
    total_z,
)
from kanegates.schedule import PulseSchedule
from kanegates.spin_algebra import PAULI_Z, dagger, embed, expm_hermitian

DIM = 16
# electrons |down,down> are the last four basis states: index 12 + 2*n1 + n2
COMPUTATIONAL = np.arange(12, 16)
BASIS_LABELS = ("00", "01", "10", "11")
DEFAULT_DT = 1e-7

_NUCLEAR_Z = (np.real(np.diag(embed(PAULI_Z, 2, 4))), np.real(np.diag(embed(PAULI_Z, 3, 4))))
_SZ = np.real(np.diag(total_z("2-donor")))


@dataclass(frozen=True)
class PropagationResult:
    """Lab-frame unitary plus the frame needed to read it computationally."""

    unitary: np.ndarray
    frame_phase: tuple[float, float] = (0.0, 0.0)
    duration: float = 0.0
    steps: int = 0

    def rotating(self) -> np.ndarray:
        """The unitary expressed in the computational rotating frame."""
        return frame_correction(self.frame_phase)[:, None] * self.unitary


def frame_correction(frame_phase) -> np.ndarray:
    """Diagonal of F^dagger, F = Rz(f1) on nucleus 1 times Rz(f2) on nucleus 2."""
    f1, f2 = frame_phase
    return np.exp(-0.5j * (f1 * _NUCLEAR_Z[0] + f2 * _NUCLEAR_Z[1]))


def _validated(s: PulseSchedule) -> None:
    s.validate()
    if not math.isfinite(s.total):
        raise ValueError("schedule duration is not finite")


def _lab_frame(omega: float, t: float) -> np.ndarray:
    """Diagonal of R(t)^dagger for the drive frame."""
    return np.conj(frame_generator(omega, t))


def segment_unitary(seg, B: float, t0: float) -> np.ndarray:
    p = seg.params(B)
    if seg.kind == "free":
        return expm_hermitian(static_hamiltonian(p), seg.duration)
    u_rot = expm_hermitian(corotating_hamiltonian(p), seg.duration)
    after = _lab_frame(p.omega_ac, t0 + seg.duration)
    before = np.conj(_lab_frame(p.omega_ac, t0))
    return after[:, None] * u_rot * before[None, :]


def propagate_exact(s: PulseSchedule) -> PropagationResult:
    _validated(s)
    u = np.eye(DIM, dtype=complex)
    t = 0.0
    for seg in s.segments:
        u = segment_unitary(seg, s.B, t) @ u
        t += seg.duration
    return PropagationResult(unitary=u, frame_phase=s.frame_phase, duration=t, steps=len(s.segments))


# ------------------------------------------------------------------- RK4


def _gauge(B: float) -> float:
    """Energy of the fully polarized electron pair; subtracting it keeps the
    computational block slowly varying for the integrator."""
    return -2 * C.MU_B * B


def max_eigenfrequency(s: PulseSchedule) -> float:
    e0 = _gauge(s.B)
    w = 0.0
    for seg in s.segments:
        h = lab_hamiltonian(seg.params(s.B), 0.0) - e0 * np.eye(DIM)
        w = max(w, float(np.abs(np.linalg.eigvalsh(h)).max()) / C.HBAR)
    return w


def _rk4_step(h_at, t: float, dt: float) -> np.ndarray:
    """One classic RK4 step for i hbar dU/dt = H(t) U, as a matrix."""
    eye = np.eye(DIM, dtype=complex)
    a1 = -1j * h_at(t) / C.HBAR
    a2 = -1j * h_at(t + dt / 2) / C.HBAR
    a4 = -1j * h_at(t + dt) / C.HBAR
    k1 = a1
    k2 = a2 @ (eye + dt / 2 * k1)
    k3 = a2 @ (eye + dt / 2 * k2)
    k4 = a4 @ (eye + dt * k3)
    return eye + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _rk4_segment(seg, B: float, t0: float, dt: float) -> tuple[np.ndarray, int]:
    p = seg.params(B)
    shift = _gauge(B) * np.eye(DIM)
    n = int(seg.duration // dt)
    rem = seg.duration - n * dt
    if seg.kind == "free":
        h = static_hamiltonian(p) - shift
        step = _rk4_step(lambda _t: h, 0.0, dt)
        u = np.linalg.matrix_power(step, n)
        if rem > 0:
            u = _rk4_step(lambda _t: h, 0.0, rem) @ u
        return u, n + (rem > 0)

    def h_at(t):
        return lab_hamiltonian(p, t) - shift

    # H(t) = V(t) H(0) V(t)^dagger with V(t) = exp(-i omega_ac t Sz / 2), so the
    # step taken at time t is V(t) S0 V(t)^dagger and n steps collapse to
    # V(t0) V(dt)^n (V(dt)^dagger S0)^n V(t0)^dagger.
    def v(t):
        return np.exp(-0.5j * p.omega_ac * t * _SZ)

    s0 = _rk4_step(h_at, 0.0, dt)
    vdt = v(dt)
    inner = np.linalg.matrix_power(np.conj(vdt)[:, None] * s0, n)
    u = v(t0)[:, None] * (vdt**n)[:, None] * inner * np.conj(v(t0))[None, :]
    if rem > 0:
        u = _rk4_step(h_at, t0 + n * dt, rem) @ u
    return u, n + (rem > 0)


def propagate_rk4(s: PulseSchedule, dt: float = DEFAULT_DT) -> PropagationResult:
    """Fixed-step RK4 in the lab frame.

    Raises ``ValueError`` if ``dt`` exceeds a tenth of the shortest period.
    """
    _validated(s)
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    w = max_eigenfrequency(s)
    if w > 0 and dt >= 2 * math.pi / (10 * w):
        raise ValueError(f"dt={dt} us too large: need < {2 * math.pi / (10 * w):.3g} us")
    u = np.eye(DIM, dtype=complex)
    t, steps = 0.0, 0
    for seg in s.segments:
        useg, k = _rk4_segment(seg, s.B, t, dt)
        u = useg @ u
        t += seg.duration
        steps += k
    u = u * np.exp(-1j * _gauge(s.B) * t / C.HBAR)
    return PropagationResult(unitary=u, frame_phase=s.frame_phase, duration=t, steps=steps)


# ------------------------------------------------------------- projection


def project_computational(r: PropagationResult | np.ndarray) -> tuple[np.ndarray, float]:
    """4x4 block on the electron |down,down> manifold and the worst-case leakage.

    The block is not renormalized.
    """
    u = r.rotating() if isinstance(r, PropagationResult) else np.asarray(r)
    block = u[np.ix_(COMPUTATIONAL, COMPUTATIONAL)]
    leakage = float(max(0.0, (1 - np.sum(np.abs(block) ** 2, axis=0)).max()))
    return block, leakage


def basis_state(label: str) -> np.ndarray:
    if label not in BASIS_LABELS:
        raise ValueError(f"unknown initial state {label!r}; expected one of {BASIS_LABELS}")
    psi = np.zeros(DIM, dtype=complex)
    psi[COMPUTATIONAL[BASIS_LABELS.index(label)]] = 1
    return psi


@dataclass(frozen=True)
class TraceRow:
    t_us: float
    populations: tuple[float, float, float, float]
    leakage: float


def sample_trace(s: PulseSchedule, initial: str, n_samples: int = 101) -> list[TraceRow]:
    """Computational populations at uniformly spaced times.

    Each sample restarts the exact propagator from the previous one. Frames
    are diagonal, so populations need no frame correction.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    _validated(s)
    psi = basis_state(initial)
    times = np.linspace(0.0, s.total, n_samples)
    rows: list[TraceRow] = []
    seg_i, t_seg, t = 0, 0.0, 0.0
    segs = s.segments
    for target in times:
        # advance whole segments, then the partial piece up to the sample time
        while seg_i < len(segs) and t_seg + segs[seg_i].duration <= target:
            seg = segs[seg_i]
            remaining = t_seg + seg.duration - t
            if remaining > 0:
                psi = segment_unitary(_piece(seg, remaining), s.B, t) @ psi
            t = t_seg + seg.duration
            t_seg = t
            seg_i += 1
        if seg_i < len(segs) and target > t:
            psi = segment_unitary(_piece(segs[seg_i], target - t), s.B, t) @ psi
            t = target
        amps = np.abs(psi[COMPUTATIONAL]) ** 2
        pops = tuple(float(x) for x in amps)
        rows.append(TraceRow(float(target), pops, float(max(0.0, 1 - amps.sum()))))
    return rows


def _piece(seg, duration: float):
    return replace(seg, duration=duration)


def trace_csv(rows: list[TraceRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t_us", "p00", "p01", "p10", "p11", "leakage"])
    for r in rows:
        w.writerow([f"{r.t_us:.9g}", *(f"{p:.12g}" for p in r.populations), f"{r.leakage:.6g}"])
    return buf.getvalue()
