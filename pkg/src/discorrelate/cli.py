"""Command-line entry point: ``discorrelate run|diff|sweep``.

Exit codes: 0 success, 2 bad input, 3 numerical failure, 4 diff outside
tolerance.  Failures print a one-line JSON record on stderr.
"""

from __future__ import annotations

import argparse
import ast
import cmath
import json
import math
import operator
import re
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import report
from .errors import DiscorrelationError, NumericalError, SpecError
from .optics import LossPoint
from .scenarios import (LOSS_STATES, SCENARIOS, SWEEP_PARAMS, ScenarioSpec, encode_params,
                        resolve, run_diff, run_scenario, run_sweep)

EXIT_OK, EXIT_SPEC, EXIT_NUMERICAL, EXIT_DIFF = 0, 2, 3, 4

# -- numeric expressions ----------------------------------------------------------

_CONSTANTS = {"pi": math.pi, "e": math.e, "i": 1j, "j": 1j}
_FUNCS = {"sqrt": cmath.sqrt, "exp": cmath.exp, "cos": cmath.cos, "sin": cmath.sin}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def parse_number(text: str) -> complex:
    """Evaluate a small arithmetic expression such as ``sqrt8``, ``sqrt(2/15)`` or ``2i``.

    Only numbers, ``+ - * / **``, ``pi``, ``e``, ``i`` and ``sqrt/exp/cos/sin``
    are allowed.  ``sqrtN`` is shorthand for ``sqrt(N)``; a number followed
    by ``i`` is imaginary.
    """
    src = re.sub(r"sqrt(\d+(?:\.\d*)?)", r"sqrt(\1)", text.strip())
    src = re.sub(r"(\d(?:\.\d*)?)\s*([ij])\b", r"\1*\2", src)
    try:
        tree = ast.parse(src, mode="eval")
        value = _eval(tree.body)
    except (SyntaxError, TypeError, ZeroDivisionError, OverflowError, ValueError):
        raise SpecError(f"cannot parse numeric value {text!r}") from None
    value = complex(value)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise SpecError(f"numeric value {text!r} is not finite")
    return value


def _eval(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.Name) and node.id in _CONSTANTS:
        return _CONSTANTS[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_eval(node.operand))
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
        return _FUNCS[node.func.id](_eval(node.args[0]))
    raise TypeError("disallowed expression")


def parse_real(text: str) -> float:
    z = parse_number(text)
    if abs(z.imag) > 1e-15 * max(1.0, abs(z.real)):
        raise SpecError(f"expected a real value, got {text!r}")
    return z.real


def parse_dim(text: str) -> int:
    x = parse_real(text)
    if x != int(x):
        raise SpecError(f"dim must be an integer, got {text!r}")
    return int(x)


# -- argument parsing ---------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("usage", message)
        sys.exit(EXIT_SPEC)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("scenario", help=f"one of {', '.join(SCENARIOS)}")
    p.add_argument("--kind", help="circuit kind for the custom scenario")
    p.add_argument("--state", choices=sorted(LOSS_STATES), help="state for fig6 scenarios")
    p.add_argument("--alpha", type=str)
    p.add_argument("--beta", type=str)
    p.add_argument("--alpha-phase", type=str)
    p.add_argument("--beta-phase", type=str)
    p.add_argument("--lambda", dest="lam", type=str)
    p.add_argument("--lambda-b", dest="lam_b", type=str)
    p.add_argument("--t", type=str)
    p.add_argument("--dim", type=str)
    p.add_argument("--loss-point", choices=[lp.value for lp in LossPoint])
    p.add_argument("--edge", action="store_true", help="allow |lambda| = 1 (truncate and renormalize)")


def _outputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--no-plot", action="store_true", help="skip the PNG figure")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="discorrelate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="evaluate a scenario and write its grid or loss curves")
    _common(run)
    run.add_argument("--loss", type=str, help="single loss value 1 - eta")
    _outputs(run)

    diff = sub.add_parser("diff", help="compare closed-form grids against the circuit oracle")
    _common(diff)
    diff.add_argument("--tolerance", type=float, default=1e-9)
    diff.add_argument("--herald-tolerance", type=float, default=1e-8)

    sweep = sub.add_parser("sweep", help="evaluate one state over a parameter grid")
    _common(sweep)
    sweep.add_argument("--loss", type=str, help="fixed loss while sweeping t or phase")
    sweep.add_argument("--param", choices=SWEEP_PARAMS, default="loss")
    sweep.add_argument("--from", dest="start", type=str, default="0")
    sweep.add_argument("--to", dest="stop", type=str, default="1")
    sweep.add_argument("--steps", type=int, default=21)
    _outputs(sweep)
    return parser


def spec_from_args(args: argparse.Namespace) -> ScenarioSpec:
    def opt(name, conv):
        raw = getattr(args, name, None)
        return None if raw is None else conv(raw)

    return ScenarioSpec(
        scenario=args.scenario, kind=args.kind, state=args.state,
        alpha=opt("alpha", parse_number), beta=opt("beta", parse_number),
        alpha_phase=opt("alpha_phase", parse_real), beta_phase=opt("beta_phase", parse_real),
        lam=opt("lam", parse_number), lam_b=opt("lam_b", parse_number),
        t=opt("t", parse_real), dim=opt("dim", parse_dim), loss=opt("loss", parse_real),
        loss_point=opt("loss_point", LossPoint), edge=args.edge)


# -- commands -------------------------------------------------------------------------

def _stem(spec: ScenarioSpec) -> str:
    return spec.scenario + (f"-{spec.state}" if spec.state else "")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args) -> int:
    spec = spec_from_args(args)
    result = run_scenario(spec)
    out = _out_dir(args)
    stem = _stem(spec)
    if result.rows is not None:
        sc = SCENARIOS[spec.scenario]
        return _write_curves(args, out, stem, result.summary, result.rows, x="loss",
                             y=sc.metric, group=("series", "reference", "loss_point"))
    summary = dict(result.summary)
    files = {}
    if args.format == "csv":
        files["grid"] = report.write_grid_csv(out / f"{stem}_grid.csv", result.grid).name
    else:
        summary["grid"] = result.grid.tolist()
    if not args.no_plot:
        files["figure"] = report.plot_grid(out / f"{stem}.png", result.grid, stem).name
    summary["files"] = files
    report.write_json(out / f"{stem}_summary.json", summary)
    print(json.dumps(_brief(summary), sort_keys=True))
    return EXIT_OK


def _brief(summary: dict) -> dict:
    return {k: v for k, v in summary.items() if k not in ("grid", "rows", "parameters")}


def _write_curves(args, out: Path, stem: str, summary: dict, rows: list[dict],
                  x: str, y: str, group: Optional[tuple]) -> int:
    summary = dict(summary)
    files = {}
    if args.format == "csv":
        files["curve"] = report.write_rows_csv(out / f"{stem}_curve.csv", rows).name
    else:
        summary["curve"] = rows
    if not args.no_plot:
        files["figure"] = report.plot_curves(out / f"{stem}.png", rows, x, y, group, stem).name
    summary["files"] = files
    report.write_json(out / f"{stem}_summary.json", summary)
    print(json.dumps(_brief(summary), sort_keys=True))
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = spec_from_args(args)
    if args.steps < 1:
        raise SpecError("--steps must be at least 1")
    values = np.linspace(parse_real(args.start), parse_real(args.stop), args.steps)
    rows = run_sweep(spec, args.param, values)
    stem = f"{_stem(spec)}_sweep-{args.param}"
    if spec.loss_point is not None:
        stem += f"-{spec.loss_point.value}"
    summary = {"scenario": spec.scenario, "param": args.param, "rows": len(rows),
               "parameters": encode_params(resolve(spec))}
    return _write_curves(args, _out_dir(args), stem, summary, rows, x="value", y="E_N",
                         group=None)


def cmd_diff(args) -> int:
    rep = run_diff(spec_from_args(args), args.tolerance, args.herald_tolerance)
    print(json.dumps(rep.as_dict(), sort_keys=True))
    return EXIT_OK if rep.passed else EXIT_DIFF


def _emit_error(code: str, message: str, kind: str = "SpecError") -> None:
    print(json.dumps({"error": kind, "code": code, "message": message}, sort_keys=True),
          file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "diff": cmd_diff, "sweep": cmd_sweep}[args.command]
    try:
        return handler(args)
    except DiscorrelationError as exc:
        _emit_error(exc.code, str(exc), type(exc).__name__)
        return EXIT_NUMERICAL if isinstance(exc, NumericalError) else EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
