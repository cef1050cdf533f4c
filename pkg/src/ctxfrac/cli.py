"""Command-line front end.

Exit status: 0 on success, 1 on invalid input, 2 when the solver hits its
iteration limit or a scenario exceeds the global-assignment guard.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import sys
from pathlib import Path

import numpy as np

from . import entanglement as ent
from .contextual import SolverLimitError, contextual_fraction
from .scenario import FIXTURE_NAMES, EmpiricalModel, ScenarioTooLarge, fixture_model
from .states import (
    BASIS_ALIASES,
    BellScenario,
    BlochBasis,
    PureState,
    born_model,
    diag_state,
    entanglement_entropy,
    ghz_state,
    schmidt_decompose,
)


class InputError(ValueError):
    pass


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def parse_angle(text: str) -> float:
    """Evaluate a decimal or an arithmetic expression in ``pi``, e.g. ``5*pi/8``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        raise InputError(f"unsupported angle expression {text!r}")

    try:
        value = ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise InputError(f"bad angle {text!r}: {exc}") from None
    if not math.isfinite(value):
        raise InputError(f"angle {text!r} is not finite")
    return value


def parse_state(spec: str) -> PureState:
    """``ghz:N``, ``diag:THETA,PHI`` or ``amps:re,im;re,im;...`` (normalised on read)."""
    kind, _, body = spec.partition(":")
    try:
        if kind == "ghz":
            return ghz_state(int(body))
        if kind == "diag":
            theta, phi = body.split(",")
            return diag_state(parse_angle(theta), parse_angle(phi))
        if kind == "amps":
            pairs = [p.split(",") for p in body.split(";")]
            amps = [complex(float(re), float(im)) for re, im in pairs]
            return PureState.from_unnormalized(amps)
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(f"bad state {spec!r}: {exc}") from None
    raise InputError(f"unknown state kind in {spec!r}; use ghz:, diag: or amps:")


def _parse_bases(text: str) -> list[BlochBasis]:
    tokens = [t.strip() for t in text.split(",")]
    out = []
    while tokens:
        tok = tokens.pop(0)
        if tok.startswith("bloch:"):
            if not tokens:
                raise InputError(f"bloch basis needs THETA,PHI in {text!r}")
            theta, phi = parse_angle(tok[len("bloch:"):]), parse_angle(tokens.pop(0))
            try:
                out.append(BlochBasis(theta, phi))
            except ValueError as exc:
                raise InputError(str(exc)) from None
        elif tok in BASIS_ALIASES:
            out.append(BASIS_ALIASES[tok])
        else:
            raise InputError(f"unknown basis {tok!r}; aliases are {sorted(BASIS_ALIASES)}")
    return out


def parse_scenario(spec: str, n_parties: int) -> BellScenario:
    """``bell:B1,B2`` shared by all parties, or ``bell:B1,B2;B1,B2;...`` per party."""
    kind, _, body = spec.partition(":")
    if kind != "bell" or not body:
        raise InputError(f"scenario must look like bell:B1,B2[;B1,B2...], got {spec!r}")
    pairs = []
    for part in body.split(";"):
        bases = _parse_bases(part)
        if len(bases) != 2:
            raise InputError(f"each party needs two bases, got {len(bases)} in {part!r}")
        pairs.append(tuple(bases))
    if len(pairs) == 1:
        pairs = pairs * n_parties
    if len(pairs) != n_parties:
        raise InputError(f"scenario has {len(pairs)} parties but the state has {n_parties} qubits")
    return BellScenario(tuple(pairs))


def fmt(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _load_model(path: str) -> EmpiricalModel:
    try:
        return EmpiricalModel.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        raise InputError(f"cannot read model {path}: {exc}") from None


def cmd_cf(args) -> None:
    e = _load_model(args.model)
    res = contextual_fraction(e)
    print(f"CF = {fmt(res.cf)}")
    print(f"NCF = {fmt(res.ncf)}")
    print(f"noncontextual (tol {args.tol:g}): {'yes' if res.cf <= args.tol else 'no'}")
    _write(args.out, _dump({"cf": res.cf, "ncf": res.ncf, "noncontextual": res.cf <= args.tol}))
    _write(args.witness, _dump(res.witness.to_json()))


def cmd_born(args) -> None:
    psi = parse_state(args.state)
    e = born_model(psi, parse_scenario(args.scenario, psi.n_qubits))
    for ctx, row in zip(e.scenario.contexts, e.rows):
        print(" ".join(ctx) + " : " + " ".join(fmt(p) for p in row))
    _write(args.out, e.dumps() + "\n")


def _two_qubits(spec: str) -> PureState:
    psi = parse_state(spec)
    if psi.n_qubits != 2:
        raise InputError(f"this command needs a 2-qubit state, got {psi.n_qubits} qubits")
    return psi


def _matrix_json(u: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in u]


def cmd_schmidt(args) -> None:
    form = schmidt_decompose(_two_qubits(args.state))
    np.set_printoptions(precision=6, suppress=True)
    print(f"theta = {fmt(form.theta)}")
    print(f"u_a =\n{form.u_a}")
    print(f"u_b =\n{form.u_b}")
    _write(args.out, _dump({"theta": form.theta, "u_a": _matrix_json(form.u_a),
                            "u_b": _matrix_json(form.u_b)}))


def cmd_entropy(args) -> None:
    s = entanglement_entropy(_two_qubits(args.state))
    print(f"S_ent = {fmt(s)}")
    _write(args.out, _dump({"entropy": s}))


def cmd_distinguished(args) -> None:
    res = ent.distinguished_cf(_two_qubits(args.state))
    print(f"theta = {fmt(res.theta)}")
    print(f"S_ent = {fmt(res.entropy)}")
    print(f"CF = {fmt(res.cf)}")
    _write(args.out, _dump(res._asdict()))


def _grid_summary(grid: ent.SweepGrid) -> None:
    cf = grid.layers["cf"]
    i, j = np.unravel_index(np.argmax(cf), cf.shape)
    a, b = grid.axes
    print(f"grid {a.count}x{b.count}, max CF = {fmt(cf[i, j])} "
          f"at ({a.name}, {b.name}) = ({fmt(a.values()[i])}, {fmt(b.values()[j])})")
    print(f"local maxima: {len(ent.local_maxima(cf))}")


def cmd_sweep_equatorial(args) -> None:
    subject = _two_qubits(args.state) if args.state else None
    grid = ent.equatorial_sweep(subject, args.grid, span=args.span, workers=args.workers)
    _grid_summary(grid)
    _write(args.out, grid.to_csv())


def cmd_sweep_diagonal(args) -> None:
    grid = ent.diagonal_sweep(args.grid, workers=args.workers)
    _grid_summary(grid)
    _write(args.out, grid.to_csv())


def cmd_curve(args) -> None:
    curve = ent.theta_curve(args.points, full=args.full)
    first_positive = next((p for p in curve if p.cf > 1e-6), None)
    print(f"{len(curve)} points, CF at theta = pi/2: {fmt(ent.cf_of_theta(math.pi / 2))}")
    if first_positive:
        print(f"first positive CF at theta = {fmt(first_positive.theta)} "
              f"(S_ent = {fmt(first_positive.entropy)})")
    _write(args.out, ent.curve_csv(curve))


def cmd_threshold(args) -> None:
    print(fmt(ent.threshold_entropy()))


def cmd_monotonicity(args) -> None:
    rep = ent.monotonicity_check(args.samples, args.seed)
    print(f"seed {rep.seed}, {rep.samples} pairs, {rep.violations} violations")
    _write(args.out, rep.to_csv())


def cmd_fixtures(args) -> None:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    for name in FIXTURE_NAMES:
        path = out / f"{name}.json"
        path.write_text(fixture_model(name).dumps() + "\n")
        print(path)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def conv(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ctxfrac", description="Contextual fraction of empirical models and 2-qubit states.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("cf", help="contextual fraction of an empirical-model JSON file")
    s.add_argument("--model", required=True)
    s.add_argument("--out")
    s.add_argument("--witness", help="write the optimal global distribution here")
    s.add_argument("--tol", type=_positive(float), default=1e-6)
    s.set_defaults(func=cmd_cf)

    s = sub.add_parser("born", help="Born-rule model of a state in a Bell scenario")
    s.add_argument("--state", required=True)
    s.add_argument("--scenario", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_born)

    for name, func, text in [
        ("schmidt", cmd_schmidt, "Schmidt angle and local unitaries"),
        ("entropy", cmd_entropy, "entanglement entropy"),
        ("distinguished-cf", cmd_distinguished, "distinguished contextual fraction"),
    ]:
        s = sub.add_parser(name, help=text + " of a 2-qubit state")
        s.add_argument("--state", required=True)
        s.add_argument("--out")
        s.set_defaults(func=func)

    s = sub.add_parser("sweep-equatorial", help="CF over equatorial basis pairs")
    s.add_argument("--state", help="2-qubit state (default ghz:2)")
    s.add_argument("--grid", type=_positive(int), default=64)
    s.add_argument("--span", type=parse_angle, default=math.pi,
                   help="azimuth range [0, span); default pi")
    s.add_argument("--workers", type=_positive(int), default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep_equatorial)

    s = sub.add_parser("sweep-diagonal", help="entropy and x/y CF of diagonal states")
    s.add_argument("--grid", type=_positive(int), default=64)
    s.add_argument("--workers", type=_positive(int), default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep_diagonal)

    s = sub.add_parser("curve-theta", help="entropy and distinguished CF against theta")
    s.add_argument("--points", type=_positive(int), default=201)
    s.add_argument("--full", action="store_true", help="cover theta in [0, pi]")
    s.add_argument("--out")
    s.set_defaults(func=cmd_curve)

    s = sub.add_parser("threshold", help="entropy threshold for a nonzero distinguished CF")
    s.set_defaults(func=cmd_threshold)

    s = sub.add_parser("monotonicity", help="random-pair check of CF against entropy")
    s.add_argument("--samples", type=_positive(int), default=1000)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--out")
    s.set_defaults(func=cmd_monotonicity)

    s = sub.add_parser("fixtures", help="write the three two-context example tables")
    s.add_argument("--out", help="output directory (default .)")
    s.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ScenarioTooLarge, SolverLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0
