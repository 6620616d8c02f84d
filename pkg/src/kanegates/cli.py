"""Command-line interface: ``kanegates <command> [options]``.

Exit codes: 0 success, 2 invalid input, 3 parameters outside the model's
validity, 4 file I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from kanegates import __version__
from kanegates.analysis import GateReport, gate_report, report_schedule
from kanegates.analytic import (
    exact_frequency_set,
    frequency_set,
    gate_times,
    second_order_energies,
)
from kanegates.canonical import canonical_unitary, interaction_content, synth_content
from kanegates.circuits import named_circuit, named_target
from kanegates.device import OperatingPoint, PhysicsValidityError, load_config
from kanegates.propagator import sample_trace, trace_csv
from kanegates.constants import HBAR
from kanegates.schedule import CALIBRATIONS, DEFAULT_POLICY, POLICIES, PulseSchedule, compile_circuit
from kanegates.spin_algebra import matrix_from_json, matrix_to_json

EXIT_OK, EXIT_VALIDATION, EXIT_PHYSICS, EXIT_IO = 0, 2, 3, 4


class UsageError(ValueError):
    pass


def _common(defaults: bool) -> argparse.ArgumentParser:
    """Flags accepted both before and after the command name."""
    kw = {} if defaults else {"argument_default": argparse.SUPPRESS}
    p = argparse.ArgumentParser(add_help=False, **kw)
    p.add_argument("--config", help="JSON operating-point file")
    p.add_argument("--out", help="write the result here instead of stdout")
    p.add_argument("--oracle", action="store_true", help="cross-check with the RK4 integrator")
    p.add_argument("--dt", type=float, help="RK4 step in us (default 1e-7)")
    p.add_argument("--policy", choices=POLICIES, help=f"frame policy (default {DEFAULT_POLICY})")
    p.add_argument("--calibration", choices=CALIBRATIONS, help="frequency model (default perturbative)")
    if defaults:
        p.set_defaults(dt=1e-7, policy=DEFAULT_POLICY, calibration="perturbative")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kanegates",
        description="Two-qubit gate compiler and simulator for donor nuclear spins in silicon.",
        parents=[_common(True)],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common(False)

    g = sub.add_parser("gate", parents=[common], help="compile, simulate and score a gate")
    g.add_argument("name", nargs="?", help="cnot, cz, swap, sqrt_swap, h, x, y, z, rx, ry, rz")
    g.add_argument("--theta", type=float, help="angle for cz / rx / ry / rz")
    g.add_argument("--qubit", type=int, choices=(1, 2), default=1, help="nucleus for single-qubit gates")
    g.add_argument("--emit-schedule", help="also write the compiled schedule JSON")
    g.add_argument("--schedule", help="simulate this schedule JSON instead of compiling")

    t = sub.add_parser("trace", parents=[common], help="population trace as CSV")
    t.add_argument("name")
    t.add_argument("--theta", type=float)
    t.add_argument("--qubit", type=int, choices=(1, 2), default=1)
    t.add_argument("--initial", required=True, help="00, 01, 10 or 11 (nucleus 1 first)")
    t.add_argument("--samples", type=int, default=101)

    d = sub.add_parser("decompose", parents=[common], help="interaction content of a 4x4 unitary")
    d.add_argument("file", help="JSON matrix: rows of numbers or [re, im] pairs")

    s = sub.add_parser("synth", parents=[common], help="synthesize exp(i(ax XX + ay YY + az ZZ))")
    s.add_argument("alphas", nargs=3, type=float, metavar=("AX", "AY", "AZ"))
    s.add_argument("--emit-schedule")

    sub.add_parser("params", parents=[common], help="frequencies and elementary gate times")

    w = sub.add_parser("sweep", parents=[common], help="gate time and error versus one parameter")
    w.add_argument("param", help="B, A, Az, Ax, Bac, AU, JU (or aliases J, A_x, ...)")
    w.add_argument("gate")
    w.add_argument("--start", type=float, required=True)
    w.add_argument("--stop", type=float, required=True)
    w.add_argument("--num", type=int, default=5)
    w.add_argument("--theta", type=float)
    return parser


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2)


def _report_json(r: GateReport) -> dict:
    return {"version": __version__, **r.to_dict()}


def _schedule_doc(schedule, target: np.ndarray) -> dict:
    return {**schedule.to_dict(), "target": matrix_to_json(target)}


def cmd_gate(args, op: OperatingPoint) -> str:
    if args.schedule:
        raw = json.loads(Path(args.schedule).read_text())
        schedule = load_schedule_doc(raw)
        if "target" in raw:
            target = matrix_from_json(raw["target"])
        elif args.name:
            target = named_target(args.name, args.theta, args.qubit)
        else:
            raise UsageError("schedule has no target matrix; pass a gate name")
        report = report_schedule(schedule, target, oracle=args.oracle, dt=args.dt)
        return _dumps(_report_json(report))
    if not args.name:
        raise UsageError("gate needs a name or --schedule")
    circuit = named_circuit(args.name, args.theta, args.qubit)
    target = named_target(args.name, args.theta, args.qubit)
    schedule = compile_circuit(circuit, op, policy=args.policy, calibration=args.calibration)
    if args.emit_schedule:
        Path(args.emit_schedule).write_text(_dumps(_schedule_doc(schedule, target)) + "\n")
    report = report_schedule(schedule, target, oracle=args.oracle, dt=args.dt)
    return _dumps(_report_json(report))


def load_schedule_doc(raw: dict) -> PulseSchedule:
    if not isinstance(raw, dict):
        raise UsageError("schedule file must hold a JSON object")
    return PulseSchedule.from_dict(raw)


def cmd_trace(args, op: OperatingPoint) -> str:
    circuit = named_circuit(args.name, args.theta, args.qubit)
    schedule = compile_circuit(circuit, op, policy=args.policy, calibration=args.calibration)
    return trace_csv(sample_trace(schedule, args.initial, args.samples))


def _read_matrix(path: str) -> np.ndarray:
    raw = json.loads(Path(path).read_text())
    if isinstance(raw, dict):
        raw = raw.get("matrix", raw.get("target"))
    try:
        arr = np.array(raw, dtype=complex)
        if arr.ndim == 2:
            return arr
    except (TypeError, ValueError):
        pass
    return matrix_from_json(raw)


def cmd_decompose(args, op: OperatingPoint) -> str:
    u = _read_matrix(args.file)
    if u.shape != (4, 4):
        raise UsageError(f"expected a 4x4 matrix, got {u.shape}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        content = interaction_content(u)
    return _dumps({"version": __version__, **content.to_dict()})


def cmd_synth(args, op: OperatingPoint) -> str:
    alphas = tuple(args.alphas)
    if any(not math.isfinite(a) or abs(a) > math.pi / 4 + 1e-12 for a in alphas):
        raise UsageError("each interaction-content component must satisfy |alpha| <= pi/4")
    circuit = synth_content(alphas)
    target = canonical_unitary(alphas)
    schedule = compile_circuit(circuit, op, policy=args.policy, calibration=args.calibration)
    if args.emit_schedule:
        Path(args.emit_schedule).write_text(_dumps(_schedule_doc(schedule, target)) + "\n")
    report = report_schedule(schedule, target, name=circuit.name, oracle=args.oracle, dt=args.dt)
    return _dumps(
        {
            "version": __version__,
            "content": list(alphas),
            "circuit": circuit.labels(),
            "native_segments": len(circuit.interactions()),
            "report": report.to_dict(),
        }
    )


def cmd_params(args, op: OperatingPoint) -> str:
    f = frequency_set(op)
    out = {"version": __version__, "operating_point": op.to_dict(), "frequencies": f.to_dict()}
    if args.calibration == "exact":
        out["exact_frequencies"] = exact_frequency_set(op).to_dict()
    q = second_order_energies(op.AU, op.JU, op.B)
    out["hbar_omega_l"] = f.omega_l * HBAR
    out["hbar_omega_B"] = q.hbar_omega_B
    out["hbar_omega_S"] = q.hbar_omega_S
    out["times_us"] = gate_times(op)
    return _dumps(out)


def cmd_sweep(args, op: OperatingPoint) -> str:
    if args.num < 1:
        raise UsageError("sweep range is empty: --num must be at least 1")
    if not (math.isfinite(args.start) and math.isfinite(args.stop)):
        raise UsageError("sweep bounds must be finite")
    values = np.linspace(args.start, args.stop, args.num)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([args.param, "time_us", "error"])
    for v in sorted(values):
        point = op.with_value(args.param, float(v))
        r = gate_report(
            args.gate, point, theta=args.theta, policy=args.policy, calibration=args.calibration
        )
        w.writerow([f"{v:.9g}", f"{r.time_us:.9g}", f"{r.error:.6g}"])
    return buf.getvalue()


COMMANDS = {
    "gate": cmd_gate,
    "trace": cmd_trace,
    "decompose": cmd_decompose,
    "synth": cmd_synth,
    "params": cmd_params,
    "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_VALIDATION
    try:
        op = load_config(args.config)
        if args.command not in ("decompose",):
            op.validate()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            text = COMMANDS[args.command](args, op)
        _emit(text, args.out)
    except PhysicsValidityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except (OSError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
