"""
Command-line front end.

    diagdiff eval      --input F --theta 0=0.3 --output out.json
    diagdiff grad      --input F --theta 0=0.3 --param 0 --output out.json
    diagdiff gradcheck --input F --theta 0=0.3 [--rules R] --output report.json
    diagdiff stone     --input F --output report.json

Exit codes: 0 ok, 1 check failure, 2 parse error, 3 type error, 4 missing rule.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

import diagdiff.colours  # noqa: F401  (registers the built-in colours)
from diagdiff.autodiff import (
    DEFAULT_GRID, DEFAULT_RULES, GradientRuleSet, diagram_derivative, gradcheck, stone_check)
from diagdiff.diagrams import FormalSum, load_json
from diagdiff.errors import (
    ColourError, InterpretationError, MissingRuleError, ParameterIndexError, ParseError,
    ShiftRuleError, TypeCheckError)
from diagdiff.interpret import check_params, interpret
from diagdiff.tensors import Tensor, tensor_to_json

EXIT_OK, EXIT_CHECK, EXIT_PARSE, EXIT_TYPE, EXIT_RULE = 0, 1, 2, 3, 4


def parse_theta(text: str | None) -> list[float]:
    """``"0=0.3,2=1.5"`` -> ``[0.3, 0.0, 1.5]``; unnamed indices default to 0."""
    if not text:
        return []
    values: dict[int, float] = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        try:
            if not sep:
                raise ValueError(item)
            index = int(key)
            if index < 0:
                raise ValueError(item)
            values[index] = float(value)
        except ValueError:
            raise ParseError(f"cannot read θ assignment {item!r}; expected i=value") from None
    theta = [0.0] * (max(values) + 1)
    for i, v in values.items():
        theta[i] = v
    return theta


def load_sum(path: str) -> FormalSum:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise ParseError(f"cannot read {path}: {err}") from err
    return load_json(data)


def load_rules(path: str | None) -> GradientRuleSet:
    if path is None:
        return DEFAULT_RULES
    try:
        return GradientRuleSet.from_json(json.loads(Path(path).read_text()))
    except (OSError, json.JSONDecodeError) as err:
        raise ParseError(f"cannot read rules {path}: {err}") from err


def _covering(s: FormalSum, theta: list[float], index: int | None = None) -> list[float]:
    check_params(s, theta)
    if index is not None and index >= len(theta):
        theta = theta + [0.0] * (index + 1 - len(theta))
    return theta


def _tensor_rows(t: Tensor) -> list[list]:
    data = np.asarray(t.array)
    return [[r, c, float(data[r, c].real), float(data[r, c].imag)]
            for r in range(data.shape[0]) for c in range(data.shape[1])]


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def cmd_eval(args) -> tuple[str, int]:
    s = load_sum(args.input)
    theta = _covering(s, parse_theta(args.theta))
    t = interpret(s, theta)
    if args.format == "csv":
        return _csv(["row", "col", "re", "im"], _tensor_rows(t)), EXIT_OK
    return dumps(tensor_to_json(t)), EXIT_OK


def cmd_grad(args) -> tuple[str, int]:
    s = load_sum(args.input)
    theta = _covering(s, parse_theta(args.theta), args.param)
    derivative = diagram_derivative(s, args.param, load_rules(args.rules))
    value = interpret(derivative, theta)
    if args.format == "csv":
        return _csv(["row", "col", "re", "im"], _tensor_rows(value)), EXIT_OK
    return dumps({"param": args.param, "theta": theta, "gradient": derivative.to_json(),
                  "value": tensor_to_json(value)}), EXIT_OK


def cmd_gradcheck(args) -> tuple[str, int]:
    s = load_sum(args.input)
    theta = _covering(s, parse_theta(args.theta))
    if args.no_grid:
        grid = None
    elif args.grid:
        grid = [float(v) for v in args.grid.split(",")]
    else:
        grid = DEFAULT_GRID
    params = None if args.param is None else [args.param]
    report = gradcheck(s, theta, grid=grid, params=params, rules=load_rules(args.rules),
                       h=args.h, tol=args.tol, tol_exact=args.tol_exact)
    status = EXIT_OK if report.passed else EXIT_CHECK
    if args.format == "csv":
        keys = ["param", "value", "diagram_vs_dual", "diagram_vs_fd", "dual_vs_fd", "pass"]
        rows = [[p["param"], p["theta"][p["param"]], p["diagram_vs_dual"], p["diagram_vs_fd"],
                 p["dual_vs_fd"], int(p["pass"])] for p in report.points]
        return _csv(keys, rows), status
    return dumps(report.to_json()), status


def cmd_stone(args) -> tuple[str, int]:
    s = load_sum(args.input)
    index = args.param or 0
    times = [float(v) for v in args.times.split(",")] if args.times else None
    kwargs = {"times": times} if times else {}
    report = stone_check(s, index, tol=args.tol_exact, rules=load_rules(args.rules), **kwargs)
    status = EXIT_OK if report.passed else EXIT_CHECK
    if args.format == "csv":
        rows = [[t, e] for t, e in zip(report.times, report.group_errors)]
        return _csv(["t", "error"], rows), status
    return dumps(report.to_json()), status


COMMANDS = {"eval": cmd_eval, "grad": cmd_grad, "gradcheck": cmd_gradcheck, "stone": cmd_stone}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diagdiff", description=__doc__.split("\n\n")[0].strip(),
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--input", required=True, help="diagram or formal-sum JSON file")
    parser.add_argument("--theta", help="parameter values, e.g. 0=0.3,1=-1.2")
    parser.add_argument("--param", type=int, help="parameter index to differentiate")
    parser.add_argument("--h", type=float, default=1e-5, help="finite-difference step")
    parser.add_argument("--tol", type=float, default=1e-6,
                        help="tolerance against finite differences")
    parser.add_argument("--tol-exact", type=float, default=1e-10,
                        help="tolerance between the exact gradients")
    parser.add_argument("--grid", help="comma-separated grid values for gradcheck")
    parser.add_argument("--no-grid", action="store_true", help="gradcheck at --theta only")
    parser.add_argument("--times", help="comma-separated times for stone")
    parser.add_argument("--rules", help="JSON file overriding gradient rules")
    parser.add_argument("--output", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "grad" and args.param is None:
        print("diagdiff: grad needs --param", file=sys.stderr)
        return EXIT_PARSE
    if args.h <= 0 or args.tol <= 0 or args.tol_exact <= 0:
        print("diagdiff: --h and tolerances must be positive", file=sys.stderr)
        return EXIT_PARSE
    try:
        text, status = COMMANDS[args.command](args)
    except (ParseError, ColourError, ShiftRuleError, ParameterIndexError) as err:
        print(f"diagdiff: {err}", file=sys.stderr)
        return EXIT_PARSE
    except (TypeCheckError, InterpretationError) as err:
        print(f"diagdiff: {err}", file=sys.stderr)
        return EXIT_TYPE
    except MissingRuleError as err:
        print(f"diagdiff: {err}", file=sys.stderr)
        return EXIT_RULE
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
