"""Command-line entry point: ``qcosamp <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from collections.abc import Sequence
from fractions import Fraction
from typing import Any

import numpy as np

from . import builder, curvefit, fourier, imaging, sampling
from .applications import integrate
from .errors import QCoSampError, ValidationError
from .spec import load_spec, tree_sum
from .statevec import sample

EXIT_OK = 0


# output helpers -----------------------------------------------------------------

def _fmt(v: float) -> str:
    if not math.isfinite(v):
        raise ValidationError(f"cannot serialize non-finite number {v}")
    return format(float(v), ".17g")


def dumps(obj: Any) -> str:
    """JSON with every float written at 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        s = _fmt(obj)
        return s if any(c in s for c in ".en") else s + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _need(args: argparse.Namespace, name: str) -> Any:
    v = getattr(args, name)
    if v is None:
        raise ValidationError(f"--{name.replace('_', '-')} is required for '{args.command}'")
    return v


def parse_grid(text: str | None) -> np.ndarray:
    """``"33"`` -> 33 uniform points on ``[-pi, pi]``; ``"0,0.5,1"`` -> those values."""
    if text is None:
        return sampling.default_grid()
    try:
        if "," not in text:
            k = int(text)
            if k < 1:
                raise ValueError("grid size must be positive")
            return sampling.default_grid(k)
        return np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError as exc:
        raise ValidationError(f"--grid: {exc}") from None


def _check_shots(args: argparse.Namespace) -> None:
    if args.shots < 0:
        raise ValidationError("--shots must be nonnegative")
    if args.shots > 0 and args.seed is None:
        raise ValidationError("--seed is required whenever --shots > 0")


# subcommands ---------------------------------------------------------------------

def cmd_eval(args: argparse.Namespace) -> int:
    spec = load_spec(_need(args, "spec"))
    res = sampling.sweep(spec, parse_grid(args.grid), 0, None, max_qubits=args.max_qubits)
    lines = ["x,mu\n"] + [f"{_fmt(x)},{_fmt(p)}\n" for x, p in zip(res.x_grid, res.simulated)]
    _emit("".join(lines), args.out)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    _check_shots(args)
    spec = load_spec(_need(args, "spec"))
    res = sampling.sweep(spec, parse_grid(args.grid), args.shots, args.seed,
                         max_qubits=args.max_qubits)
    rows = ["x,estimated,exact\n"]
    rows += [f"{_fmt(a)},{_fmt(b)},{_fmt(c)}\n" for a, b, c in
             zip(res.x_grid, res.estimated, res.exact)]
    _emit("".join(rows), args.out)
    report = sampling.mse(res)
    doc = {"mse": report.mse, "errors": report.errors, "shots": args.shots, "seed": args.seed,
           "points": len(res.x_grid)}
    if args.out is not None:
        _emit(dumps(doc) + "\n", args.out + ".mse.json")
    else:
        sys.stderr.write(dumps(doc) + "\n")
    return EXIT_OK


def cmd_sample(args: argparse.Namespace) -> int:
    _check_shots(args)
    if args.shots == 0:
        raise ValidationError("'sample' needs --shots > 0")
    spec = load_spec(_need(args, "spec"))
    a = builder.assemble(spec, max_qubits=args.max_qubits)
    h = sample(a.run(), [a.layout.measured], args.shots, args.seed)
    rows = ["state,count\n"] + [f"{k},{h.counts[k]}\n" for k in sorted(h.counts)]
    _emit("".join(rows), args.out)
    return EXIT_OK


def cmd_integrate(args: argparse.Namespace) -> int:
    spec = load_spec(_need(args, "spec"))
    r = integrate(spec, max_qubits=args.max_qubits)
    _emit(dumps({"probability": r.probability, "integral": r.integral,
                 "grid_mean": r.grid_mean, "points": r.points}) + "\n", args.out)
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    _check_shots(args)
    data = curvefit.DataSet.from_csv(_need(args, "data"))
    shots = args.shots or 4096
    seed = args.seed if args.seed is not None else 0
    res = curvefit.curve_fit(data, args.components, args.resolution, args.iterations, shots,
                             seed, max_qubits=args.max_qubits)
    hist_path = None
    if args.out is not None:
        hist_path = args.out + ".hist.csv"
        res.histogram_csv(hist_path)
    _emit(dumps(res.to_json(hist_path)) + "\n", args.out)
    return EXIT_OK


def _parse_window(text: str) -> imaging.WindowSpec:
    try:
        parts = [int(t) for t in text.lower().split("x")]
    except ValueError:
        raise ValidationError(f"--window must look like 2 or 2x4, got {text!r}") from None
    w, h = (parts[0], parts[0]) if len(parts) == 1 else (parts[0], parts[1])
    return imaging.WindowSpec(w, h)


def cmd_filter(args: argparse.Namespace) -> int:
    img = imaging.read_pgm(_need(args, "image"))
    out = imaging.mean_kernel_filter(img, _parse_window(args.window))
    imaging.write_pgm(out, _need(args, "out"), binary=args.binary)
    return EXIT_OK


def cmd_map(args: argparse.Namespace) -> int:
    doc = _load_json(_need(args, "data"))
    if isinstance(doc, dict) and "lambda" in doc:
        series = fourier.FourierSeries.from_json(doc)
        params, factors = fourier.series_to_params(series)
        comps = [{"n": n, "r": r, "s": s} for n, r, s in zip(params.n, params.r, params.s)]
        out = {"components": comps, "scale": factors.scale, "lambda0": factors.lam0,
               "rho": list(factors.rho), "depths": list(params.depths)}
    elif isinstance(doc, dict) and "components" in doc:
        lam, gam = [doc.get("lambda0", 0.0)], []
        scale = doc.get("scale", 1.0)
        for i, c in enumerate(doc["components"]):
            try:
                a, b = fourier.phases_to_fourier(float(c["r"]), float(c["s"]))
            except (KeyError, TypeError, ValueError):
                raise ValidationError(f"components[{i}] needs numeric r and s") from None
            lam.append(scale * a)
            gam.append(scale * b)
        out = {"lambda": lam, "gamma": gam}
    else:
        raise ValidationError("map input needs either {lambda, gamma} or {components}")
    _emit(dumps(out) + "\n", args.out)
    return EXIT_OK


def cmd_tree_check(args: argparse.Namespace) -> int:
    spec = load_spec(_need(args, "spec"))
    total = tree_sum(spec)
    doc = {"verdict": total == Fraction(1), "sum": str(total), "leaves": len(spec.leaves),
           "depths": list(spec.depths)}
    _emit(dumps(doc) + "\n", args.out)
    return EXIT_OK


COMMANDS = {"eval": cmd_eval, "sweep": cmd_sweep, "sample": cmd_sample,
            "integrate": cmd_integrate, "fit": cmd_fit, "filter": cmd_filter,
            "map": cmd_map, "tree-check": cmd_tree_check}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcosamp", description="Quantum cosine-sampling simulator")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--spec")
        s.add_argument("--data")
        s.add_argument("--image")
        s.add_argument("--out")
        s.add_argument("--shots", type=int, default=0)
        s.add_argument("--seed", type=int)
        s.add_argument("--grid")
        s.add_argument("--iterations", type=int, default=3)
        s.add_argument("--resolution", type=int, default=2)
        s.add_argument("--components", type=int, default=1)
        s.add_argument("--max-qubits", type=int, default=builder.DEFAULT_MAX_QUBITS)
        s.add_argument("--window", default="2")
        s.add_argument("--binary", action="store_true", help="write P5 instead of P2")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return COMMANDS[args.command](args)
    except QCoSampError as exc:
        return _fail(exc.exit_code, exc.kind, str(exc))
    except (OSError, UnicodeDecodeError) as exc:
        return _fail(2, "schema", f"{exc}")


def _fail(code: int, kind: str, message: str) -> int:
    msg = " ".join(message.split())
    sys.stderr.write(f"error: code={code} kind={kind} message={msg}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
