"""Command-line front end.

Subcommands: sweep, thresholds, visibility, distribution, ejm_info, replay.
Every file written gets a ``<out>.manifest.json`` sidecar recording the fully
resolved arguments and output checksums; ``replay`` re-runs a manifest and
verifies the checksums.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import re
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__, kernel
from .measmodel import PointerKind, ejm_basis
from .scenario import (NumericInvariantError, OPTIMAL_ANGLES, ScenarioConfig, SourceSpec,
                       run)
from . import serialize as ser
from .sweep import find_critical_visibility, g_grid, sweep_g, theta_scan
from .tbg import evaluate_pairs

EXIT_USAGE = 2
EXIT_NUMERIC = 1

_ANGLE = re.compile(
    r"^\s*(?P<sign>[+-])?\s*(?P<num>\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$")


def parse_angle(text: str) -> float:
    """Parse radians given as a number or a multiple of pi ("pi/8", "3pi/8", "-pi/4")."""
    m = _ANGLE.match(text)
    if m:
        num = float(m.group("num")) if m.group("num") else 1.0
        den = float(m.group("den")) if m.group("den") else 1.0
        if den == 0:
            raise ValueError(f"invalid angle {text!r}")
        val = num * math.pi / den
        return -val if m.group("sign") == "-" else val
    try:
        val = float(text)
    except ValueError:
        raise ValueError(f"invalid angle {text!r}") from None
    if not math.isfinite(val):
        raise ValueError(f"invalid angle {text!r}")
    return val


def _angle_arg(text: str) -> float:
    try:
        return parse_angle(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _angle_list(text: str) -> list[str]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise argparse.ArgumentTypeError("empty angle list")
    for t in items:
        _angle_arg(t)
    return items


def _triple(text: str) -> list[str]:
    items = _angle_list(text)
    if len(items) != 3:
        raise argparse.ArgumentTypeError(f"expected three angles, got {text!r}")
    return items


def _unit(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"value {v} outside [0, 1]")
    return v


def _nonneg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v >= 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"value must be a finite non-negative number, got {text!r}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class UsageError(Exception):
    pass


# --- helpers --------------------------------------------------------------

def _sources(args) -> tuple[SourceSpec, SourceSpec]:
    if args.source == "singlet":
        return SourceSpec(), SourceSpec()
    return SourceSpec.werner(args.v1), SourceSpec.werner(args.v2)


def _check_theta(theta: float):
    if not 0.0 <= theta <= math.pi / 2 + 1e-15:
        raise UsageError(f"theta {theta} outside [0, pi/2]")


def _write(args, text: str, payload_kind: str) -> list[Path]:
    if args.out == "-":
        sys.stdout.write(text)
        return []
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return [path]


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _resolved(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}


def _write_manifest(args, outputs: list[Path]) -> Path | None:
    if not outputs:
        return None
    manifest = {
        "schema_version": ser.SCHEMA_VERSION,
        "tool": "ejmshare",
        "version": __version__,
        "command": args.command,
        "config": _resolved(args),
        "outputs": {p.name: _sha256(p) for p in outputs},
    }
    mpath = Path(str(outputs[0]) + ".manifest.json")
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return mpath


def _with_backend(args):
    if not hasattr(args, "backend"):
        return
    if args.backend == "auto":
        # record the concrete kernel so a replay runs the same code path
        args.backend = "compiled" if kernel.HAVE_COMPILED else "python"
    kernel.set_backend(args.backend)


# --- subcommands ----------------------------------------------------------

def cmd_sweep(args) -> list[Path]:
    theta = parse_angle(args.theta)
    _check_theta(theta)
    if args.z_mode == "dial" and args.z is None:
        raise UsageError("--z is required with --z-mode dial")
    z_dial = args.z if args.z_mode == "dial" else None
    grid = g_grid(args.g_steps)
    rows = sweep_g(theta, args.pointer, grid, _sources(args), z_dial=z_dial, workers=args.workers)
    records = [ser.sweep_record(r) for r in rows]
    if args.format == "csv":
        text = ser.to_csv(ser.SWEEP_COLUMNS, records)
    else:
        text = ser.to_json({"kind": "sweep", "params": _resolved(args), "rows": records})
    return _write(args, text, "sweep")


def cmd_thresholds(args) -> list[Path]:
    labels = args.thetas
    thetas = [parse_angle(t) for t in labels]
    for t in thetas:
        _check_theta(t)
    pointers = ["square", "optimal"] if args.pointer == "both" else [args.pointer]
    results = theta_scan(thetas, pointers, args.z_mode, _sources(args), args.step, workers=args.workers)
    label_of = dict(zip(thetas, labels))
    records = [ser.threshold_record(r, label_of[r.theta]) for r in results]
    if args.format == "csv":
        text = ser.to_csv(ser.THRESHOLD_COLUMNS, records)
    else:
        text = ser.to_json({"kind": "thresholds", "params": _resolved(args),
                            "rows": records, "results": [r.to_dict() for r in results]})
    return _write(args, text, "thresholds")


def cmd_visibility(args) -> list[Path]:
    theta = parse_angle(args.theta)
    _check_theta(theta)
    z = None if args.z == "computed" else _nonneg(args.z)
    res = find_critical_visibility(theta, z, args.pointer, tol=args.tol, g_steps=args.g_steps)
    rec = {"theta": theta, "theta_label": args.theta, "z": z, "pointer": res.pointer.value,
           "V": res.V, "best_G": res.best_G, "note": res.note}
    cols = ["theta", "theta_label", "z", "pointer", "V", "best_G", "note"]
    if args.format == "csv":
        text = ser.to_csv(cols, [rec])
    else:
        text = ser.to_json({"kind": "visibility", "params": _resolved(args), "result": rec})
    return _write(args, text, "visibility")


def _scenario_from_args(args) -> ScenarioConfig:
    if args.config:
        try:
            d = json.loads(Path(args.config).read_text(encoding="utf-8"))
            return ScenarioConfig.from_dict(d)
        except (OSError, ValueError, TypeError) as e:
            raise UsageError(f"bad config file: {e}") from None
    theta = parse_angle(args.theta)
    _check_theta(theta)
    s1, s2 = _sources(args)
    ang = {k: tuple(parse_angle(a) for a in getattr(args, k)) for k in
           ("angles_a1", "angles_a2", "angles_c1", "angles_c2")}
    return ScenarioConfig(source1=s1, source2=s2, theta=theta, pointer=args.pointer,
                          G1=args.g1, G2=args.g2, **ang)


def cmd_distribution(args) -> list[Path]:
    cfg = _scenario_from_args(args)
    tensor = run(cfg)
    if args.format == "csv":
        text = ser.to_csv(ser.DISTRIBUTION_COLUMNS, ser.distribution_records(tensor.probs))
    else:
        reports = evaluate_pairs(tensor)
        text = ser.to_json({
            "kind": "distribution",
            "config": cfg.to_dict(),
            "axes": ["x1", "x2", "z1", "z2", "a1", "a2", "b", "c1", "c2"],
            "probs": tensor.probs.tolist(),
            "tbg": {f"{n}{m}": r.to_dict() for (n, m), r in reports.items()},
        })
    return _write(args, text, "distribution")


def cmd_ejm_info(args) -> list[Path]:
    theta = parse_angle(args.theta)
    _check_theta(theta)
    basis = ejm_basis(theta)
    gram = basis.gram()
    conc = basis.concurrences()
    if args.format == "csv":
        cols = ["b", "m_x", "m_y", "m_z", "eta", "phi", "concurrence"] + \
            [f"{p}{i}" for i in range(4) for p in ("re", "im")]
        recs = []
        for b in range(4):
            r = {"b": b + 1, "m_x": int(basis.m_vectors[b, 0]), "m_y": int(basis.m_vectors[b, 1]),
                 "m_z": int(basis.m_vectors[b, 2]), "eta": basis.eta_phi[b][0],
                 "phi": basis.eta_phi[b][1], "concurrence": float(conc[b])}
            for i in range(4):
                r[f"re{i}"] = float(basis.states[b, i].real)
                r[f"im{i}"] = float(basis.states[b, i].imag)
            recs.append(r)
        text = ser.to_csv(cols, recs)
    else:
        text = ser.to_json({
            "kind": "ejm_info",
            "theta": theta,
            "theta_label": args.theta,
            "states": [{"b": b + 1, "re": basis.states[b].real.tolist(),
                        "im": basis.states[b].imag.tolist()} for b in range(4)],
            "m_vectors": basis.m_vectors.tolist(),
            "eta_phi": [list(p) for p in basis.eta_phi],
            "gram_re": gram.real.tolist(),
            "gram_im": gram.imag.tolist(),
            "concurrence": conc.tolist(),
        })
    return _write(args, text, "ejm_info")


COMMANDS = {
    "sweep": cmd_sweep,
    "thresholds": cmd_thresholds,
    "visibility": cmd_visibility,
    "distribution": cmd_distribution,
    "ejm_info": cmd_ejm_info,
}


def cmd_replay(args) -> int:
    manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    command = manifest["command"]
    ns = argparse.Namespace(**manifest["config"])
    expected = manifest["outputs"]
    with tempfile.TemporaryDirectory() as tmp:
        ns.out = str(Path(tmp) / next(iter(expected)))
        ns.command = command
        _with_backend(ns)
        outputs = COMMANDS[command](ns)
        got = {p.name: _sha256(p) for p in outputs}
    ok = got == expected
    print(f"replay {command}: {'ok' if ok else 'MISMATCH'}")
    return 0 if ok else EXIT_NUMERIC


# --- parser ---------------------------------------------------------------

def _add_common(p, fmt_default="csv"):
    p.add_argument("--out", default="-", help="output path ('-' for stdout, no manifest)")
    p.add_argument("--format", choices=("csv", "json"), default=fmt_default)
    p.add_argument("--backend", choices=("auto",) + kernel.BACKENDS, default="auto")


def _add_sources(p):
    p.add_argument("--source", choices=("singlet", "werner"), default="singlet")
    p.add_argument("--v1", type=_unit, default=1.0)
    p.add_argument("--v2", type=_unit, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ejmshare", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ejmshare {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep", help="sweep the weak-measurement sharpness G")
    p.add_argument("--theta", default="0", type=lambda s: (_angle_arg(s), s)[1])
    p.add_argument("--pointer", choices=[k.value for k in PointerKind], default="square")
    p.add_argument("--g-steps", type=_positive_int, default=101)
    p.add_argument("--z-mode", choices=("computed", "dial"), default="computed")
    p.add_argument("--z", type=_nonneg, default=None)
    p.add_argument("--workers", type=_positive_int, default=1)
    _add_sources(p)
    _add_common(p)

    p = sub.add_parser("thresholds", help="Z onset of simultaneous violation versus theta")
    p.add_argument("--thetas", type=_angle_list, default=["0", "pi/8", "pi/4", "3pi/8"])
    p.add_argument("--pointer", choices=[k.value for k in PointerKind] + ["both"], default="both")
    p.add_argument("--z-mode", choices=("computed", "dial"), default="computed")
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--workers", type=_positive_int, default=1)
    _add_sources(p)
    _add_common(p)

    p = sub.add_parser("visibility", help="critical Werner visibility for sharing")
    p.add_argument("--theta", default="0", type=lambda s: (_angle_arg(s), s)[1])
    p.add_argument("--z", default="computed",
                   help="bound parameter z (number) or 'computed' to use each pair's own Z")
    p.add_argument("--pointer", choices=[k.value for k in PointerKind], default="square")
    p.add_argument("--g-steps", type=_positive_int, default=101)
    p.add_argument("--tol", type=float, default=1e-4)
    _add_common(p)

    p = sub.add_parser("distribution", help="dump the full correlation tensor")
    p.add_argument("--config", default=None, help="JSON scenario config (overrides flags)")
    p.add_argument("--theta", default="0", type=lambda s: (_angle_arg(s), s)[1])
    p.add_argument("--pointer", choices=[k.value for k in PointerKind], default="square")
    p.add_argument("--g1", type=_unit, default=1.0)
    p.add_argument("--g2", type=_unit, default=1.0)
    default_angles = ["pi/4", "pi/4", "0"]
    for k in ("a1", "a2", "c1", "c2"):
        p.add_argument(f"--angles-{k}", type=_triple, default=default_angles,
                       help="alpha,beta,gamma (default pi/4,pi/4,0)")
    _add_sources(p)
    _add_common(p)

    for name in ("ejm_info", "ejm-info"):
        p = sub.add_parser(name, help="EJM basis states, Gram matrix and concurrences")
        p.add_argument("--theta", default="0", type=lambda s: (_angle_arg(s), s)[1])
        _add_common(p, fmt_default="json")

    p = sub.add_parser("replay", help="re-run a manifest and verify output checksums")
    p.add_argument("manifest")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "ejm-info":
        args.command = "ejm_info"
    try:
        if args.command == "replay":
            return cmd_replay(args)
        _with_backend(args)
        outputs = COMMANDS[args.command](args)
        _write_manifest(args, outputs)
    except UsageError as e:
        print(f"ejmshare {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NumericInvariantError as e:
        print(f"ejmshare {args.command}: numeric invariant failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, RuntimeError) as e:
        print(f"ejmshare {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
