"""Compile abstract circuits into timed control schedules.

Frame model
-----------
Every nucleus n carries a rotating frame ``F_n(t) = Rz(omega_ref t + delta_n)``
with ``omega_ref`` the Larmor frequency at the resting coupling A; the logical
state is ``F^dagger psi_lab``. Logical Z rotations only shift ``delta_n``.
Hardware segments shift it too (drift relative to ``omega_ref``), and the
compiler tracks that drift instead of undoing it. Physical Z segments (A lowered to
A_z) are emitted only to satisfy a constraint:

* a pulse driving both nuclei needs ``delta_1 == delta_2``;
* a native interaction of sign ``-`` needs ``delta_1 - delta_2 == 0`` and a
  ``+`` interaction needs ``delta_1 - delta_2 == pi`` (the relative pi frame
  conjugates ``XX + YY`` to ``-(XX + YY)``).

Under the ``"physical"`` policy every frame is additionally brought back to
zero before each pulse and interaction and at the end, so all circuit Z
gates and drift corrections become real segments. Under ``"virtual"`` the
leftover ``delta_n`` is kept in the schedule's frame record.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

from kanegates import analytic
from kanegates.circuits import AbstractGateSeq, Interaction, Local, named_circuit, primitives
from kanegates.device import DeviceParams, OperatingPoint, PhysicsValidityError

TWO_PI = 2 * math.pi
_MIN_DURATION = 1e-12
POLICIES = ("physical", "virtual")
# frequencies used for timing and frame tracking: closed-form second-order
# expressions, or exact diagonalization of the static Hamiltonians
CALIBRATIONS = ("perturbative", "exact")
DEFAULT_POLICY = "physical"

LABELS = ("x", "z", "interaction", "wait")


@dataclass(frozen=True)
class ControlSegment:
    """One constant-control interval.

    ``kind`` is ``"free"`` or ``"ac"``. For AC pulses the field direction at
    lab time t is ``omega_ac * t + ac_phase``. ``label`` is the timing class
    (x, z, interaction, wait) and ``note`` the gate it came from.
    """

    kind: str
    duration: float
    A1: float
    A2: float
    J: float = 0.0
    Bac: float = 0.0
    omega_ac: float = 0.0
    ac_phase: float = 0.0
    label: str = "wait"
    note: str = ""

    def __post_init__(self):
        if self.kind not in ("free", "ac"):
            raise ValueError(f"segment kind must be 'free' or 'ac', got {self.kind!r}")
        if not self.duration >= 0 or not math.isfinite(self.duration):
            raise ValueError(f"segment duration must be finite and >= 0, got {self.duration}")
        if self.label not in LABELS:
            raise ValueError(f"unknown segment label {self.label!r}")
        if self.kind == "ac" and not self.Bac > 0:
            raise ValueError("an AC pulse needs Bac > 0")
        if self.kind == "free" and self.Bac != 0:
            raise ValueError("free evolution must have Bac = 0")

    def params(self, B: float) -> DeviceParams:
        return DeviceParams(
            B=B, Bac=self.Bac, omega_ac=self.omega_ac, phase=self.ac_phase,
            A1=self.A1, A2=self.A2, J=self.J,
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered segments plus the rotating frame the result is read in.

    ``frame_phase[n]`` is the total frame angle of nucleus n+1 at the end,
    ``omega_ref * total + delta_n``.
    """

    segments: tuple[ControlSegment, ...] = ()
    B: float = OperatingPoint().B
    omega_ref: float = 0.0
    frame_phase: tuple[float, float] = (0.0, 0.0)
    name: str = "custom"
    policy: str = DEFAULT_POLICY

    @property
    def total(self) -> float:
        return math.fsum(s.duration for s in self.segments)

    def validate(self) -> None:
        for s in self.segments:
            with_warnings_off(s.params(self.B).validate)
        if not all(math.isfinite(f) for f in self.frame_phase):
            raise ValueError("frame phases must be finite")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "policy": self.policy,
            "B": self.B,
            "omega_ref": self.omega_ref,
            "frame_phase": list(self.frame_phase),
            "segments": [s.to_dict() for s in self.segments],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "PulseSchedule":
        try:
            segs = tuple(ControlSegment(**s) for s in d["segments"])
            return cls(
                segments=segs,
                B=float(d["B"]),
                omega_ref=float(d.get("omega_ref", 0.0)),
                frame_phase=tuple(float(x) for x in d.get("frame_phase", (0.0, 0.0))),
                name=str(d.get("name", "custom")),
                policy=str(d.get("policy", DEFAULT_POLICY)),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed schedule: {exc}") from exc

    def __add__(self, other: "PulseSchedule") -> "PulseSchedule":
        """Concatenate; frames compose because both start from the identity frame."""
        if self.B != other.B or self.omega_ref != other.omega_ref:
            raise ValueError("can only concatenate schedules compiled for the same field")
        tail = tuple(replace(s, ac_phase=s.ac_phase - s.omega_ac * self.total) for s in other.segments)
        return PulseSchedule(
            segments=self.segments + tail,
            B=self.B,
            omega_ref=self.omega_ref,
            frame_phase=tuple(a + b for a, b in zip(self.frame_phase, other.frame_phase)),
            name=f"{self.name}+{other.name}",
            policy=self.policy,
        )


def with_warnings_off(fn):
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return fn()


def save_schedule(s: PulseSchedule, path: str | Path) -> None:
    Path(path).write_text(s.to_json() + "\n")


def load_schedule(path: str | Path) -> PulseSchedule:
    return PulseSchedule.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class TimingBreakdown:
    """Durations by class. ``z`` includes ``wait``; ``x + z + interaction == total``."""

    x: float = 0.0
    z: float = 0.0
    interaction: float = 0.0
    wait: float = 0.0
    total: float = 0.0

    def to_dict(self) -> dict:
        return {"x_us": self.x, "z_us": self.z, "interaction_us": self.interaction, "wait_us": self.wait}


def breakdown(s: PulseSchedule) -> TimingBreakdown:
    sums = {k: math.fsum(g.duration for g in s.segments if g.label == k) for k in LABELS}
    return TimingBreakdown(
        x=sums["x"],
        z=sums["z"] + sums["wait"],
        interaction=sums["interaction"],
        wait=sums["wait"],
        total=s.total,
    )


def _wrap(x: float) -> float:
    """Angle in [0, 2pi), with values a hair below 2pi folded to 0."""
    y = x % TWO_PI
    return 0.0 if TWO_PI - y < 1e-9 else y


@dataclass
class ScheduleBuilder:
    """Incremental compiler state: time, per-nucleus frame offsets, segments."""

    op: OperatingPoint = field(default_factory=OperatingPoint)
    policy: str = DEFAULT_POLICY
    calibration: str = "perturbative"
    stark: bool = True

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        if self.calibration not in CALIBRATIONS:
            raise ValueError(f"calibration must be one of {CALIBRATIONS}, got {self.calibration!r}")
        op = self.op
        if self.calibration == "exact":
            f = analytic.exact_frequency_set(op)
            self.w_d = analytic.exact_larmor_omega(op.Ax, op.B)
        else:
            f = analytic.frequency_set(op)
            self.w_d = analytic.larmor_omega(op.Ax, op.B)
        self.w_ref, self.w_z, self.w_x, self.w_B, self.w_S = (
            f.omega_l, f.omega_z, f.omega_x, f.omega_B, f.omega_S
        )
        if self.w_z <= 0:
            raise PhysicsValidityError("A_z must lower the Larmor frequency")
        # precession of an undriven nucleus at A while the drive sits at w_d
        detune = self.w_ref - self.w_d
        rabi = 2 * analytic.xrot_omega(op.A, op.B, op.Bac)
        self.w_stark = math.hypot(detune, rabi) - detune if self.stark else 0.0
        self.t = 0.0
        self.delta = [0.0, 0.0]
        self.segments: list[ControlSegment] = []

    # ---------------------------------------------------------------- emit

    def _emit(self, seg: ControlSegment, drift: tuple[float, float]) -> None:
        if seg.duration <= _MIN_DURATION:
            return
        self.segments.append(seg)
        for n in (0, 1):
            self.delta[n] += drift[n] * seg.duration
        self.t += seg.duration

    def virtual_z(self, theta: float, qubit: int) -> None:
        self.delta[qubit - 1] -= theta

    def _z_segment(self, duration: float, qubits: Sequence[int], note: str) -> None:
        a = [self.op.A, self.op.A]
        drift = [0.0, 0.0]
        for q in qubits:
            a[q - 1] = self.op.Az
            drift[q - 1] = -self.w_z
        seg = ControlSegment("free", duration, a[0], a[1], label="z", note=note)
        self._emit(seg, tuple(drift))

    def sync(self, targets: dict[int, float], note: str = "frame") -> None:
        """Bring ``delta_q`` to ``targets[q]`` (mod 2pi) by lowering A to A_z."""
        need = {q: _wrap(self.delta[q - 1] - v) / self.w_z for q, v in targets.items()}
        need = {q: t for q, t in need.items() if t > _MIN_DURATION}
        if len(need) == 2:
            common = min(need.values())
            self._z_segment(common, (1, 2), note)
            need = {q: t - common for q, t in need.items() if t - common > _MIN_DURATION}
        for q, t in need.items():
            self._z_segment(t, (q,), note)
        for q, v in targets.items():
            self.delta[q - 1] = v + math.remainder(self.delta[q - 1] - v, TWO_PI)

    def sync_relative(self, rel: float, note: str = "frame") -> None:
        """Make ``delta_1 - delta_2 == rel`` (mod 2pi) with the cheaper single segment."""
        gap = _wrap(self.delta[0] - self.delta[1] - rel)
        if gap == 0.0:
            return
        if gap <= TWO_PI - gap:
            self.sync({1: self.delta[1] + rel}, note)
        else:
            self.sync({2: self.delta[0] - rel}, note)

    def _sync_absolute(self, rel: float, note: str) -> None:
        if rel == 0.0:
            self.sync({1: 0.0, 2: 0.0}, note)
            return
        # cheaper of (pi, 0) and (0, pi)
        cost_a = max(_wrap(self.delta[0] - math.pi), _wrap(self.delta[1]))
        cost_b = max(_wrap(self.delta[0]), _wrap(self.delta[1] - math.pi))
        self.sync({1: math.pi, 2: 0.0} if cost_a <= cost_b else {1: 0.0, 2: math.pi}, note)

    # ------------------------------------------------------------ operations

    def pulse(self, theta: float, axis: str, qubits: Sequence[int], note: str = "") -> None:
        """Resonant rotation by ``theta`` about logical X or Y on the given nuclei."""
        if theta == 0:
            return
        if axis not in ("x", "y"):
            raise ValueError(f"pulse axis must be x or y, got {axis!r}")
        qubits = tuple(sorted(set(qubits)))
        if self.policy == "physical":
            self.sync({q: 0.0 for q in (1, 2)}, note or "frame")
        elif len(qubits) == 2:
            self.sync_relative(0.0, note or "frame")
        psi = (0.0 if axis == "x" else math.pi / 2) + (math.pi if theta < 0 else 0.0)
        q0 = qubits[0]
        phase = psi + (self.w_d - self.w_ref) * self.t - self.delta[q0 - 1]
        phase = math.remainder(phase, TWO_PI)
        a = [self.op.A, self.op.A]
        drift = [self.w_stark, self.w_stark]
        for q in qubits:
            a[q - 1] = self.op.Ax
            drift[q - 1] = self.w_d - self.w_ref
        seg = ControlSegment(
            "ac",
            abs(theta) / (2 * self.w_x),
            a[0],
            a[1],
            Bac=self.op.Bac,
            omega_ac=-self.w_d,
            ac_phase=phase,
            label="x",
            note=note,
        )
        self._emit(seg, tuple(drift))

    def interaction(self, phi: float, note: str = "") -> None:
        """Native evolution exp(i phi (XX+YY)) in the logical frame; phi of either sign."""
        if phi == 0:
            return
        analytic.interaction_time(phi, self.op.AU, self.op.JU, self.op.B)  # range checks
        duration = 2 * abs(phi) / self.w_S
        rel = 0.0 if phi < 0 else math.pi
        if self.policy == "physical":
            self._sync_absolute(rel, note or "frame")
        else:
            self.sync_relative(rel, note or "frame")
        seg = ControlSegment(
            "free", duration, self.op.AU, self.op.AU, J=self.op.JU, label="interaction", note=note
        )
        drift = self.w_B - self.w_ref
        self._emit(seg, (drift, drift))

    def wait(self, duration: float, note: str = "wait") -> None:
        self._emit(ControlSegment("free", duration, self.op.A, self.op.A, label="wait", note=note), (0.0, 0.0))

    def local(self, step: Local) -> None:
        """Expand single-qubit gates into primitives, pairing equal pulses in parallel."""
        queues = {}
        for q, g in ((1, step.q1), (2, step.q2)):
            if g is not None:
                queues[q] = [(ax, ang, g.label()) for ax, ang in primitives(g.name, g.angle)]
        while any(queues.values()):
            for q, ops in queues.items():
                while ops and ops[0][0] == "z":
                    ax, ang, note = ops.pop(0)
                    self.virtual_z(ang, q)
            heads = {q: ops[0] for q, ops in queues.items() if ops}
            if not heads:
                break
            if len(heads) == 2 and heads[1][:2] == heads[2][:2]:
                ax, ang, _ = heads[1]
                note = f"{heads[1][2]}(n1) || {heads[2][2]}(n2)"
                self.pulse(ang, ax, (1, 2), note)
                queues[1].pop(0)
                queues[2].pop(0)
            else:
                q = min(heads)
                ax, ang, note = queues[q].pop(0)
                self.pulse(ang, ax, (q,), f"{note}(n{q})")

    def run(self, circuit: AbstractGateSeq) -> "ScheduleBuilder":
        for step in circuit.steps:
            if isinstance(step, Interaction):
                self.interaction(step.phi, step.label())
            else:
                self.local(step)
        return self

    def finish(self, name: str = "custom") -> PulseSchedule:
        if self.policy == "physical":
            self.sync({1: 0.0, 2: 0.0}, "frame")
        frame = tuple(self.w_ref * self.t + d for d in self.delta)
        return PulseSchedule(
            segments=tuple(self.segments),
            B=self.op.B,
            omega_ref=self.w_ref,
            frame_phase=frame,
            name=name,
            policy=self.policy,
        )


# ------------------------------------------------------------ public helpers


def seg_z_rotation(theta: float, target, op: OperatingPoint | None = None) -> list[ControlSegment]:
    """Physical Rz(theta): lower A to A_z for ``((-theta) mod 2pi) / omega_z``.

    Lowering A slows precession, a negative rotation in the rotating frame, so
    a positive angle is realized through its complement.
    """
    b = ScheduleBuilder(op or OperatingPoint(), policy="virtual")
    qubits = (1, 2) if target == "both" else (int(target),)
    for q in qubits:
        b.virtual_z(theta, q)
    b.sync({q: 0.0 for q in qubits}, f"RZ({theta:.6g})")
    return b.segments


def seg_xy_rotation(theta: float, axis: str, target, op: OperatingPoint | None = None) -> list[ControlSegment]:
    b = ScheduleBuilder(op or OperatingPoint(), policy="virtual")
    qubits = (1, 2) if target == "both" else (int(target),)
    b.pulse(theta, axis.lower(), qubits, f"R{axis.upper()}({theta:.6g})")
    return b.segments


def seg_interaction(phi: float, op: OperatingPoint | None = None) -> PulseSchedule:
    """A single native segment; the frame record absorbs the local Z factors."""
    b = ScheduleBuilder(op or OperatingPoint(), policy="virtual")
    b.interaction(phi, f"U({phi:.6g})")
    return b.finish(name=f"interaction({phi:.6g})")


def compile_circuit(
    circuit: AbstractGateSeq,
    op: OperatingPoint | None = None,
    policy: str = DEFAULT_POLICY,
    calibration: str = "perturbative",
) -> PulseSchedule:
    b = ScheduleBuilder(op or OperatingPoint(), policy=policy, calibration=calibration)
    return b.run(circuit).finish(circuit.name)


def compile_gate(
    gate: str | AbstractGateSeq,
    op: OperatingPoint | None = None,
    theta: float | None = None,
    qubit: int = 1,
    policy: str = DEFAULT_POLICY,
    calibration: str = "perturbative",
) -> PulseSchedule:
    circuit = gate if isinstance(gate, AbstractGateSeq) else named_circuit(gate, theta, qubit)
    return compile_circuit(circuit, op, policy, calibration)


def schedule_from_segments(
    segments: Sequence[ControlSegment], op: OperatingPoint | None = None, name: str = "custom"
) -> PulseSchedule:
    """Wrap raw segments, read in the plain reference frame (no offsets).

    Only meaningful for segments that leave no frame drift behind, such as
    the output of ``seg_z_rotation``; compiled gates carry their own frame.
    """
    op = op or OperatingPoint()
    w_ref = analytic.larmor_omega(op.A, op.B)
    total = math.fsum(s.duration for s in segments)
    return PulseSchedule(
        segments=tuple(segments), B=op.B, omega_ref=w_ref, frame_phase=(w_ref * total,) * 2, name=name
    )
