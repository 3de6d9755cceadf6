"""Command line interface.

Four subcommands: ``algebra`` audits the operator identities at a given
dimension, ``matrices`` dumps the builders as JSON, ``decompose`` reports the
energy decomposition, and ``evolve`` writes a population trajectory as CSV.

Exit status: 0 on success (all audits pass), 1 on user or config errors and
audit failures, 2 on internal numerical failure (eigensolver non-convergence).
"""

import argparse
import json
import sys

import numpy as np

from .algebra import (
    adjoint,
    build_clock,
    build_fourier,
    build_shift,
    mat_mul,
    mat_pow,
    primitive_root,
    root_power,
)
from .hamiltonian import (
    DRIVE_MODELS,
    SystemSpec,
    build_interaction,
    build_drift,
    energies_to_deltas,
    interaction_diagonal,
)
from .propagator import EigenConvergenceError, EvolutionConfig, evolve

_CONFIG_KEYS = frozenset(
    {
        "n",
        "energies",
        "g",
        "omega",
        "drive_model",
        "include_delta0",
        "t_start",
        "t_end",
        "dt",
        "sample_every",
        "initial_state",
        "output_path",
    }
)

_SPEC_KEYS = ("n", "energies", "g", "omega", "drive_model")
_EVOLVE_KEYS = ("t_start", "t_end", "dt", "initial_state")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; keep 2 reserved for numerical
    # failure and report usage problems as user errors instead
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _max_abs(m) -> float:
    return float(np.max(np.abs(m)))


def identity_residuals(n: int):
    """Residuals of the operator identities at dimension n, as (name, value).

    Covers the power cycles, adjoint powers, the commutation phase, the root
    sum, Fourier unitarity, shift diagonalization, and the drive-diagonal
    identity swept over 32 drive phases.
    """
    shift = build_shift(n)
    clock = build_clock(n)
    w = build_fourier(n)
    eye = np.eye(n)
    sigma = primitive_root(n)

    drive_residual = 0.0
    for theta in np.linspace(0.0, 2.0 * np.pi, 32, endpoint=False):
        lhs = build_interaction(n, 1.0, 1.0, float(theta))
        rhs = w @ interaction_diagonal(n, 1.0, float(theta)) @ adjoint(w)
        drive_residual = max(drive_residual, _max_abs(lhs - rhs))

    return [
        ("shift_power", _max_abs(mat_pow(shift, n) - eye)),
        ("clock_power", _max_abs(mat_pow(clock, n) - eye)),
        ("shift_adjoint", _max_abs(adjoint(shift) - mat_pow(shift, n - 1))),
        ("clock_adjoint", _max_abs(adjoint(clock) - mat_pow(clock, n - 1))),
        ("commutation", _max_abs(mat_mul(clock, shift) - sigma * mat_mul(shift, clock))),
        ("root_sum", abs(complex(np.sum(root_power(n, np.arange(n)))))),
        ("fourier_unitary", _max_abs(mat_mul(w, adjoint(w)) - eye)),
        ("diagonalization", _max_abs(w @ clock @ adjoint(w) - shift)),
        ("drive_diagonal", drive_residual),
    ]


def _matrix_to_json(m):
    return [
        [{"re": float(z.real), "im": float(z.imag)} for z in row] for row in np.asarray(m)
    ]


def _write_json(payload, out_path):
    text = json.dumps(payload, indent=2) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)


def _load_config(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"config {path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"config {path}: top level must be a JSON object")
    for key in raw:
        if key not in _CONFIG_KEYS:
            raise ValueError(f"unknown config key: {key!r}")
    return raw


def _require_keys(raw, keys):
    missing = [k for k in keys if k not in raw]
    if missing:
        names = ", ".join(repr(k) for k in missing)
        raise ValueError(f"missing config key(s): {names}")


def _config_int(raw, key):
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"config key {key!r} must be an integer, got {value!r}")
    return value


def _spec_from_config(raw, require_drive=True):
    keys = _SPEC_KEYS if require_drive else ("n", "energies")
    _require_keys(raw, keys)
    n = _config_int(raw, "n")
    energies = raw["energies"]
    if not isinstance(energies, list):
        raise ValueError("config key 'energies' must be a list of numbers")
    return SystemSpec(
        n=n,
        energies=tuple(energies),
        g=raw.get("g", 0.0),
        omega=raw.get("omega", 0.0),
        drive_model=raw.get("drive_model", "none"),
        include_delta0=raw.get("include_delta0", False),
    )


def _initial_state_from_config(value):
    if isinstance(value, bool):
        raise ValueError("config key 'initial_state' must be an index or [re, im] pairs")
    if isinstance(value, int):
        return value
    if isinstance(value, list):
        amplitudes = []
        for item in value:
            if (
                not isinstance(item, list)
                or len(item) != 2
                or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in item)
            ):
                raise ValueError(
                    "config key 'initial_state' entries must be [re, im] number pairs"
                )
            amplitudes.append(complex(item[0], item[1]))
        return amplitudes
    raise ValueError("config key 'initial_state' must be an index or [re, im] pairs")


def _cmd_algebra(args) -> int:
    build_shift(args.n)  # surfaces the dimension error before any output
    tol = args.tol
    rows = identity_residuals(args.n)
    print(f"identity audit: n = {args.n}, tolerance = {tol:g}")
    failures = 0
    for name, residual in rows:
        ok = residual <= tol
        failures += 0 if ok else 1
        print(f"{name:<16} {residual:12.3e}  {'PASS' if ok else 'FAIL'}")
    if failures:
        print(f"{failures} identity check(s) failed")
        return 1
    print("all identities hold")
    return 0


def _cmd_matrices(args) -> int:
    payload = {
        "n": args.n,
        "shift": _matrix_to_json(build_shift(args.n)),
        "clock": _matrix_to_json(build_clock(args.n)),
        "fourier": _matrix_to_json(build_fourier(args.n)),
    }
    _write_json(payload, args.out)
    return 0


def _cmd_decompose(args) -> int:
    raw = _load_config(args.config)
    spec = _spec_from_config(raw, require_drive=False)
    n = spec.n
    deltas = energies_to_deltas(spec.energies)

    pairing = 0.0
    for j in range(n):
        pairing = max(pairing, abs(deltas[(n - j) % n] - deltas[j].conjugate()))
    spec_full = SystemSpec(
        n=n,
        energies=spec.energies,
        g=spec.g,
        omega=spec.omega,
        drive_model=spec.drive_model,
        include_delta0=True,
    )
    reconstruction = _max_abs(build_drift(spec_full) - np.diag(np.asarray(spec.energies)))

    payload = {
        "n": n,
        "energies": [float(e) for e in spec.energies],
        "deltas": [{"re": float(d.real), "im": float(d.imag)} for d in deltas],
        "hermitian_residual": float(pairing),
        "reconstruction_residual": float(reconstruction),
    }
    _write_json(payload, args.out if args.out is not None else raw.get("output_path"))
    return 0


def _cmd_evolve(args) -> int:
    raw = _load_config(args.config)
    spec = _spec_from_config(raw, require_drive=True)
    _require_keys(raw, _EVOLVE_KEYS)
    sample_every = 1
    if "sample_every" in raw:
        sample_every = _config_int(raw, "sample_every")
    config = EvolutionConfig(
        t_start=raw["t_start"],
        t_end=raw["t_end"],
        dt=raw["dt"],
        initial_state=_initial_state_from_config(raw["initial_state"]),
        sample_every=sample_every,
    )
    out_path = args.out if args.out is not None else raw.get("output_path")
    if out_path is None:
        raise ValueError("no output path: pass --out or set 'output_path' in the config")

    traj = evolve(spec, config)
    header = "t," + ",".join(f"p{i}" for i in range(spec.n)) + ",norm_error"
    with open(out_path, "w", newline="") as fh:
        fh.write(header + "\n")
        for k in range(traj.times.shape[0]):
            fields = [format(traj.times[k], ".17g")]
            fields.extend(format(p, ".17g") for p in traj.populations[k])
            fields.append(format(traj.norm_errors[k], ".17g"))
            fh.write(",".join(fields) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nlevel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_alg = sub.add_parser("algebra", help="audit the operator identities")
    p_alg.add_argument("--n", type=int, required=True, help="dimension (>= 2)")
    p_alg.add_argument("--tol", type=float, default=1e-12, help="residual tolerance")
    p_alg.set_defaults(func=_cmd_algebra)

    p_mat = sub.add_parser("matrices", help="dump shift/clock/fourier as JSON")
    p_mat.add_argument("--n", type=int, required=True, help="dimension (>= 2)")
    p_mat.add_argument("--out", default=None, help="output path (default: stdout)")
    p_mat.set_defaults(func=_cmd_matrices)

    p_dec = sub.add_parser("decompose", help="report the energy decomposition")
    p_dec.add_argument("--config", required=True, help="JSON config path")
    p_dec.add_argument("--out", default=None, help="output path (default: stdout)")
    p_dec.set_defaults(func=_cmd_decompose)

    p_evo = sub.add_parser("evolve", help="run a trajectory and write CSV")
    p_evo.add_argument("--config", required=True, help="JSON config path")
    p_evo.add_argument("--out", default=None, help="CSV output path")
    p_evo.set_defaults(func=_cmd_evolve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EigenConvergenceError as exc:
        print(f"nlevel: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"nlevel: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
