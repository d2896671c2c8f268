"""Command-line interface: configuration parsing, pipeline orchestration,
rendering, and persistence of runs."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import closedform
from .cases import enumerate_cases, model_inputs
from .cutplane import GateRefusal, check_integrality, enumerate_max_rank_integral
from .discretize import (
    AR2,
    DYN_COND,
    DYN_UNCOND,
    EXCHANGEABLE,
    STATIC,
    STATIONARY,
    ModelSpec,
    patches_for,
)
from .matrices import build_model
from .molp import build_ddcp, make_ineq, oracle_undominated, solve_undominated
from .ratlp import Rat, rat
from .reduce import eliminate_redundant
from .sampler import SamplerConfig, probabilistic_frontier

try:  # pragma: no cover - metadata missing only in odd environments
    from importlib.metadata import version as _pkg_version

    VERSION = _pkg_version("artifact")
except Exception:  # pragma: no cover
    VERSION = "unknown"

FAMILIES = {
    "static": STATIC,
    "dyn-cond": DYN_COND,
    "dyn-uncond": DYN_UNCOND,
    "ar2": AR2,
}
RESTRICTIONS = {"stationary": STATIONARY, "exchangeable": EXCHANGEABLE}

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_GATE = 3


class ValidationError(Exception):
    pass


def parse_rational_matrix(text):
    """Rows separated by ';', entries by ',', rational literals allowed."""
    try:
        return [[rat(x.strip()) for x in row.split(",")] for row in text.split(";")]
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad matrix literal {text!r}: {exc}") from None


def render_inequality(y, labels):
    """Human-readable form of y'p <= 0: positive terms on the left,
    negated negative terms on the right, p indexed by outcome sequence."""

    def term(coeff, label):
        name = "p[" + ",".join(str(i) for i in label) + "]"
        if coeff == 1:
            return name
        return f"{coeff}*{name}"

    left = [term(c, l) for c, l in zip(y, labels) if c > 0]
    right = [term(-c, l) for c, l in zip(y, labels) if c < 0]
    return (" + ".join(left) or "0") + " ≤ " + (" + ".join(right) or "0")


def _spec_from_args(args) -> ModelSpec:
    if args.family not in FAMILIES:
        raise ValidationError(f"unknown family {args.family!r}")
    family = FAMILIES[args.family]
    if args.v is None:
        raise ValidationError("--v is required")
    v = parse_rational_matrix(args.v)
    kwargs = dict(family=family, D=args.D, T=args.T, v=v)
    if args.restriction is not None:
        if args.restriction not in RESTRICTIONS:
            raise ValidationError(f"unknown restriction {args.restriction!r}")
        kwargs["restriction"] = RESTRICTIONS[args.restriction]
    for flag, field in (
        ("gamma", "gamma"),
        ("gamma1", "gamma1"),
        ("gamma2", "gamma2"),
    ):
        val = getattr(args, flag)
        if val is not None:
            kwargs[field] = rat(val)
    if args.y0 is not None:
        kwargs["y0"] = args.y0
    if args.ym1 is not None:
        kwargs["y_minus1"] = args.ym1
    try:
        return ModelSpec(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ValidationError(str(exc)) from None


def _serial(value):
    if isinstance(value, (list, tuple)):
        return [_serial(v) for v in value]
    if isinstance(value, Rat):
        return str(value)
    return value


def run(args) -> dict:
    """discretize -> matrices -> dual polyhedron -> solver -> reduce."""
    spec = _spec_from_args(args)
    timings = {}
    t0 = time.perf_counter()
    patches = patches_for(spec)
    timings["discretize"] = round((time.perf_counter() - t0) * 1000, 3)
    t0 = time.perf_counter()
    model = build_model(spec, patches)
    poly = build_ddcp(model)
    timings["matrices"] = round((time.perf_counter() - t0) * 1000, 3)
    t0 = time.perf_counter()
    if args.solver == "benson":
        raw = solve_undominated(poly)
    elif args.solver == "cutplane":
        raw = enumerate_max_rank_integral(poly)
    elif args.solver == "probabilistic":
        out = probabilistic_frontier(
            poly, SamplerConfig(K=args.K, seed=args.seed)
        )
        raw = out.vectors
    elif args.solver == "oracle":
        raw = oracle_undominated(model).vectors
    else:
        raise ValidationError(f"unknown solver {args.solver!r}")
    timings["solve"] = round((time.perf_counter() - t0) * 1000, 3)
    t0 = time.perf_counter()
    reduced = eliminate_redundant(raw, model)
    timings["reduce"] = round((time.perf_counter() - t0) * 1000, 3)
    return {
        "config": _config_echo(args),
        "patches": len(patches),
        "dims": {
            "rows": len(model.A),
            "cols": len(model.A[0]),
            "zdim": len(model.R),
        },
        "raw": [_serial(v.y) for v in raw],
        "reduced": [_serial(v.y) for v in reduced.vectors],
        "rendered": [
            render_inequality(v.y, model.row_labels) for v in reduced.vectors
        ],
        "timings_ms": timings,
        "seed": args.seed,
        "version": VERSION,
    }


def _config_echo(args):
    keys = (
        "command family D T restriction v gamma gamma1 gamma2 y0 ym1 "
        "solver K seed sigma format threads"
    ).split()
    return {k: getattr(args, k, None) for k in keys}


def _closed_form(args) -> dict:
    fam = args.family
    if fam == "cm":
        v = parse_rational_matrix(args.v) if args.v else [[0, 0], [0, 0]]
        a, b = v[1][0] - v[0][0], v[1][1] - v[0][1]
        out = closedform.cm_inequalities(-1 if a < b else (1 if a > b else 0))
    elif fam in ("pp-static", "exchangeable"):
        v = parse_rational_matrix(args.v)
        dv = [row[1] - row[0] for row in v]
        try:
            rk = closedform.ranked(dv)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        gen = (
            closedform.pp_static_inequalities
            if fam == "pp-static"
            else closedform.exchangeable_family
        )
        out = gen(rk)
    elif fam == "dynamic":
        args.family = "dyn-cond"
        out = closedform.dynamic_family(_spec_from_args(args))
    elif fam == "kpt":
        v = parse_rational_matrix(args.v)
        a1, a2 = v[1][0] - v[0][0], v[1][1] - v[0][1]
        gamma = rat(args.gamma) if args.gamma is not None else Rat(0)
        out = closedform.kpt_family(a1, a2, 2 * gamma, args.y0 or 0)
    elif fam == "pp2":
        args.family = "dyn-cond"
        sets = closedform.pp2_family(_spec_from_args(args))["sets"]
        return {
            "config": _config_echo(args),
            "sets": [sorted(s) for s in sets],
            "version": VERSION,
        }
    elif fam == "ar2":
        args.family = "ar2"
        out = closedform.ar2_family(_spec_from_args(args))
    else:
        raise ValidationError(f"unknown closed-form family {args.family!r}")
    reduced = eliminate_redundant(out.vectors)
    return {
        "config": _config_echo(args),
        "raw": [_serial(v.y) for v in out.vectors],
        "reduced": [_serial(v.y) for v in reduced.vectors],
        "version": VERSION,
    }


def _cases(args) -> dict:
    family = FAMILIES.get(args.family)
    if family is None:
        raise ValidationError(f"unknown family {args.family!r}")
    cases = enumerate_cases(family, D=args.D, T=args.T, symmetry=args.symmetry)
    entries = []
    for case in cases:
        entries.append(
            {
                "ordering": [list(b) for b in case.ordering],
                "representative": {k: str(v) for k, v in case.representative.items()},
            }
        )
    if args.solve_all:
        env = os.environ.get("SHARPSET_THREADS")
        threads = int(env) if env else (args.threads or 1)

        def solve_case(case):
            model = build_model(model_inputs(case))
            reduced = eliminate_redundant(
                solve_undominated(build_ddcp(model)), model
            )
            return {
                "reduced": [_serial(v.y) for v in reduced.vectors],
                "rendered": [
                    render_inequality(v.y, model.row_labels)
                    for v in reduced.vectors
                ],
            }

        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            solved = list(pool.map(solve_case, cases))
        for entry, sol in zip(entries, solved):
            entry.update(sol)
    return {"config": _config_echo(args), "cases": entries, "version": VERSION}


def _reduce_cmd(args) -> dict:
    if args.input == "-":
        payload = json.load(sys.stdin)
    else:
        with open(args.input) as fh:
            payload = json.load(fh)
    rows = payload["vectors"] if isinstance(payload, dict) else payload
    vectors = [make_ineq([rat(c) for c in row], "input") for row in rows]
    reduced = eliminate_redundant(vectors)
    return {
        "reduced": [_serial(v.y) for v in reduced.vectors],
        "removed": [_serial(e["removed"]) for e in reduced.log],
        "version": VERSION,
    }


def _check_integrality(args) -> dict:
    spec = _spec_from_args(args)
    poly = build_ddcp(build_model(spec))
    out = check_integrality(poly, K=args.K, sigma=args.sigma, seed=args.seed)
    out = dict(out)
    out["values"] = _serial(out.get("values", []))
    if "counterexample" in out:
        out["counterexample"] = {
            "objective": _serial(out["counterexample"]["objective"]),
            "value": str(out["counterexample"]["value"]),
        }
    out["config"] = _config_echo(args)
    out["version"] = VERSION
    return out


def _oracle(args) -> dict:
    spec = _spec_from_args(args)
    model = build_model(spec)
    vectors = oracle_undominated(model)
    return {
        "config": _config_echo(args),
        "reduced": [_serial(v.y) for v in vectors.vectors],
        "version": VERSION,
    }


def _add_model_flags(p):
    p.add_argument("--family", required=True)
    p.add_argument("--D", type=int, default=2)
    p.add_argument("--T", type=int, default=2)
    p.add_argument("--restriction", default=None)
    p.add_argument("--v", default=None, help="rows ';'-separated, entries ','")
    p.add_argument("--gamma", default=None)
    p.add_argument("--gamma1", default=None)
    p.add_argument("--gamma2", default=None)
    p.add_argument("--y0", type=int, default=None)
    p.add_argument("--ym1", type=int, default=None)
    p.add_argument("--K", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma", type=int, default=100)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--threads", type=int, default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sharpset",
        description="Minimal conditional moment inequality sets for panel "
        "multinomial choice models, by exact rational LP.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="full pipeline on one model")
    _add_model_flags(p)
    p.add_argument(
        "--solver",
        choices=("benson", "cutplane", "probabilistic", "oracle"),
        default="benson",
    )

    p = sub.add_parser("cases", help="enumerate threshold-ordering cases")
    _add_model_flags(p)
    p.add_argument("--symmetry", choices=("none", "canonical"), default="none")
    p.add_argument("--solve-all", action="store_true")

    p = sub.add_parser("closed-form", help="analytic inequality families")
    _add_model_flags(p)

    p = sub.add_parser("reduce", help="redundancy-eliminate a vector list")
    p.add_argument("input", help="JSON file of vectors, or - for stdin")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("check-integrality", help="randomized integrality evidence")
    _add_model_flags(p)

    p = sub.add_parser("oracle", help="brute-force grid oracle")
    _add_model_flags(p)
    return parser


def _emit(report, args):
    if getattr(args, "format", "json") == "text":
        lines = []
        for key in ("patches", "dims"):
            if key in report:
                lines.append(f"{key}: {report[key]}")
        for r in report.get("rendered", []):
            lines.append(r)
        if "reduced" in report and "rendered" not in report:
            for row in report["reduced"]:
                lines.append(" ".join(row))
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            report = run(args)
        elif args.command == "cases":
            report = _cases(args)
        elif args.command == "closed-form":
            report = _closed_form(args)
        elif args.command == "reduce":
            report = _reduce_cmd(args)
        elif args.command == "check-integrality":
            report = _check_integrality(args)
        elif args.command == "oracle":
            report = _oracle(args)
        else:  # pragma: no cover - argparse enforces the choices
            raise ValidationError(f"unknown command {args.command!r}")
    except ValidationError as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "code": EXIT_VALIDATION}) + "\n")
        return EXIT_VALIDATION
    except GateRefusal as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "code": EXIT_GATE}) + "\n")
        return EXIT_GATE
    _emit(report, args)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
