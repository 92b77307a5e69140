"""Command-line front end.

Verbs
-----
dsf      state-space JSON -> DSF JSON, plus a limits report
realize  DSF JSON -> minimal state-space JSON, plus the cancellation plan
graph    DSF JSON -> Graphviz DOT of the Boolean structure
check    state-space JSON -> observability / controllability diagnostics

The main artefact goes to ``--out`` when given (the report then goes to
stdout) or to stdout (the report then goes to stderr).

Exit codes: 0 success, 2 invalid input, 3 assumption violated, 4 rank
deficiency, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from typing import Any

import numpy as np

from .config import tolerances
from .dsf import Dsf, dsf_from_ss, final_value_checks
from .errors import (AssumptionViolation, ContractError, DimensionError, DomainError, DsfError,
                     RankDeficiencyError)
from .minreal import minimal_dsf_realization, plan_report, special_case_constant_r
from .polymat import Polynomial, RationalFunction
from .sslib import StateSpace, hidden_controllable, hidden_observable, pbh_controllable, pbh_observable
from .tfmat import mcmillan_degree

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_ASSUMPTION = 3
EXIT_RANK = 4
EXIT_NUMERIC = 5

JSON_DIGITS = 12
TEXT_DIGITS = 6


def _round(obj: Any, digits: int = JSON_DIGITS):
    """Round every float in a JSON-ready structure to ``digits`` significant digits."""
    if isinstance(obj, float):
        v = float(f"{obj:.{digits}g}")
        return 0.0 if v == 0 else v
    if isinstance(obj, (np.floating,)):
        return _round(float(obj), digits)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist(), digits)
    if isinstance(obj, dict):
        return {k: _round(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v, digits) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_round(obj), indent=2, sort_keys=False) + "\n"


def _num(x: complex, digits: int = TEXT_DIGITS) -> str:
    x = complex(x) + 0.0  # drop negative zero
    if abs(x.imag) <= 1e-12 * max(1.0, abs(x)):
        return f"{x.real:.{digits}g}"
    return f"{x.real:.{digits}g}{x.imag:+.{digits}g}j"


def format_poly(p: Polynomial, digits: int = TEXT_DIGITS) -> str:
    if p.is_zero():
        return "0"
    terms = []
    for k in range(p.degree, -1, -1):
        c = p.coeffs[k]
        if c == 0:
            continue
        mono = "" if k == 0 else ("s" if k == 1 else f"s^{k}")
        if mono and c == 1:
            terms.append(mono)
        else:
            terms.append(_num(c, digits) + (f" {mono}" if mono else ""))
    return " + ".join(terms).replace("+ -", "- ")


def format_rf(r: RationalFunction, digits: int = TEXT_DIGITS) -> str:
    if r.is_zero():
        return "0"
    num = format_poly(r.num, digits)
    if r.den.degree == 0:
        return num
    return f"({num})/({format_poly(r.den, digits)})"


def _matrix_text(mat, digits: int = TEXT_DIGITS) -> str:
    mat = np.atleast_2d(np.asarray(mat))
    cells = [[_num(v, digits) for v in row] for row in mat]
    width = max((len(c) for row in cells for c in row), default=1)
    return "\n".join("  [" + " ".join(c.rjust(width) for c in row) + "]" for row in cells)


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ContractError(f"{path}: no such file") from exc
    except json.JSONDecodeError as exc:
        raise ContractError(f"{path}: invalid JSON ({exc})") from exc


def _load_ss(path: str) -> StateSpace:
    try:
        return StateSpace.from_json(_load_json(path))
    except DsfError as exc:
        raise ContractError(f"{path}: {exc}") from exc


def _load_dsf(path: str) -> Dsf:
    try:
        return Dsf.from_json(_load_json(path))
    except (DsfError, KeyError, TypeError, ValueError) as exc:
        raise ContractError(f"{path}: {exc}") from exc


class _Output:
    """Routes the artefact and the report according to ``--out``."""

    def __init__(self, out_path: str | None):
        self.out_path = out_path

    def artefact(self, text: str) -> None:
        if self.out_path:
            with open(self.out_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)

    def report(self, text: str) -> None:
        (sys.stdout if self.out_path else sys.stderr).write(text)


def cmd_dsf(args, out: _Output) -> int:
    sys_ = _load_ss(args.input)
    d = dsf_from_ss(sys_)
    diag, sq, sp = final_value_checks(d)
    out.artefact(dumps(d.to_json()))
    if args.report == "json":
        out.report(dumps({"lim_R": diag, "lim_sQ": sq, "lim_sP": sp}))
    else:
        lines = ["lim R (diagonal):", _matrix_text(diag[None, :]), "lim sQ:", _matrix_text(sq),
                 "lim sP:", _matrix_text(sp)]
        out.report("\n".join(lines) + "\n")
    return EXIT_OK


def _plan_text(rep: dict) -> str:
    lines = []
    if rep.get("notice"):
        lines.append(f"note: {rep['notice']}")
    if rep["zeros"]:
        lines.append("transmission zeros:")
        for z in rep["zeros"]:
            lines.append(f"  {_num(complex(*z['location']))}  pattern {z['boolean']}")
    else:
        lines.append("transmission zeros: none")
    lines.append(f"psi: {rep['psi']}")
    lines.append("table:")
    for i, row in enumerate(rep["table"]):
        mark = "*" if i in rep["selection"] else " "
        lines.append(f" {mark}{i:3d}  pole {_num(complex(*row['pole'])):>20}  {row['row']}")
    lines.append(f"selection: {rep['selection']}  (k={rep['k']}, l={rep['l']})")
    lines.append("N*: " + ", ".join(rep["n_star_text"]))
    lines.append("R*: " + ", ".join(rep["r_star_text"]))
    lines.append(f"order: {rep['order']}")
    lines.append("A:")
    lines.append(_matrix_text(rep["A"]))
    lines.append("B:")
    lines.append(_matrix_text(rep["B"]))
    return "\n".join(lines) + "\n"


def cmd_realize(args, out: _Output) -> int:
    d = _load_dsf(args.input)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = special_case_constant_r(d)
    notice = "no transmission zeros: constant R* fast path (maximum clique)" if res.fast_path else res.notice
    rep = plan_report(res, notice=notice)
    out.artefact(dumps(res.system.to_json()))
    if args.report == "json":
        out.report(dumps(rep))
    else:
        rep["n_star_text"] = [format_rf(e) for e in res.plan.n_star.entries]
        rep["r_star_text"] = [format_rf(e) for e in res.r_star.entries]
        out.report(_plan_text(rep))
    return EXIT_OK


def dsf_to_dot(d: Dsf, name: str = "dsf") -> str:
    """Directed graph with ``y_j -> y_i`` iff ``Q[i, j] != 0`` and ``u_k -> y_i`` iff ``P[i, k] != 0``."""
    p, m = d.n_measured, d.n_inputs
    lines = [f"digraph {name} {{"]
    lines += [f"  y{i + 1};" for i in range(p)]
    lines += [f"  u{k + 1} [shape=box];" for k in range(m)]
    for i in range(p):
        for j in range(p):
            if not d.q[i, j].is_zero():
                lines.append(f"  y{j + 1} -> y{i + 1};")
    for i in range(p):
        for k in range(m):
            if not d.p_mat[i, k].is_zero():
                lines.append(f"  u{k + 1} -> y{i + 1};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_graph(args, out: _Output) -> int:
    out.artefact(dsf_to_dot(_load_dsf(args.input)))
    return EXIT_OK


def cmd_check(args, out: _Output) -> int:
    s = _load_ss(args.input)
    diag = {
        "observable": pbh_observable(s.a, s.c),
        "controllable": pbh_controllable(s.a, s.b),
        "hidden_observable": hidden_observable(s),
        "hidden_controllable": hidden_controllable(s),
        "order": s.n,
        "degree_G": mcmillan_degree(s.transfer_matrix()),
    }
    try:
        diag["dsf_minimal_order"] = minimal_dsf_realization(dsf_from_ss(s)).system.n
    except DsfError as exc:
        diag["dsf_minimal_order"] = None
        diag["dsf_minimal_order_error"] = str(exc)
    if args.report == "json":
        text = dumps(diag)
    else:
        text = "".join(f"{k}: {v}\n" for k, v in diag.items())
    if args.out:
        out.artefact(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="input JSON file")
    common.add_argument("--tol-cluster", type=float, default=1e-8)
    common.add_argument("--tol-rank", type=float, default=1e-8)
    common.add_argument("--tol-bool", type=float, default=1e-7)
    common.add_argument("--seed", type=int, default=0, help="seed for probe points")
    common.add_argument("--out", help="write the main output here instead of stdout")
    common.add_argument("--report", choices=("json", "text"), default="text")
    parser = argparse.ArgumentParser(prog="dsfreal", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    sub.add_parser("dsf", parents=[common], help="state space -> [Q, P]")
    sub.add_parser("realize", parents=[common], help="[Q, P] -> minimal state space")
    sub.add_parser("graph", parents=[common], help="[Q, P] -> DOT")
    sub.add_parser("check", parents=[common], help="state-space diagnostics")
    return parser


_COMMANDS = {"dsf": cmd_dsf, "realize": cmd_realize, "graph": cmd_graph, "check": cmd_check}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with tolerances(tol_cluster=args.tol_cluster, tol_rank=args.tol_rank,
                        tol_bool=args.tol_bool, seed=args.seed):
            return _COMMANDS[args.verb](args, _Output(args.out))
    except (ContractError, DimensionError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except AssumptionViolation as exc:
        print(f"assumption violated: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except RankDeficiencyError as exc:
        print(f"rank deficiency: {exc}", file=sys.stderr)
        return EXIT_RANK
    except (DsfError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
