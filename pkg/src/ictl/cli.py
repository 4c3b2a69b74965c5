"""Command-line front end.

Subcommands: ``validate``, ``check``, ``denote``, ``countermodel``,
``compare``.  Exit codes: 0 success/satisfied/valid, 1 unsatisfied or
search exhausted, 2 input error, 3 invalid frame, 4 engine disagreement,
5 search budget exceeded.

With ``--format json`` each invocation emits a single document shaped
``{"command": ..., "verdict": ..., "witness": ..., "report": [...]}``.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from itertools import chain
from typing import Iterator

from .checker import CheckOutcome, UniversalFailure, check, denote
from .gen import (
    GenParams,
    atom_names,
    enumerate_models,
    find_countermodel,
    random_formula,
    random_model,
)
from .harness import compile_battery, scan_models
from .model import (
    BirelationalModel,
    InvalidModelError,
    ModelFormatError,
    ensure_valid,
    model_from_raw,
    model_to_document,
    load_model,
    validate_frame,
)
from .oracle import Lasso, oracle_check
from .syntax import ParseError, parse_formula, print_formula, subformulas

COMPARE_FORMULAS_PER_RUN = 24


def _read_model(path: str) -> BirelationalModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_raw(load_model(fh.read()))


def _lasso_doc(m: BirelationalModel, lasso: Lasso) -> dict:
    return {
        "prefix": [m.worlds[i] for i in lasso.prefix],
        "cycle": [m.worlds[i] for i in lasso.cycle],
    }


def _witness_doc(m: BirelationalModel, outcome: CheckOutcome) -> dict | None:
    w = outcome.witness
    if w is None:
        return None
    if isinstance(w, UniversalFailure):
        return {"type": "universal-failure", "world": w.world, "lasso": _lasso_doc(m, w.lasso)}
    return {"type": "path", **_lasso_doc(m, w)}


def _witness_text(m: BirelationalModel, outcome: CheckOutcome) -> str | None:
    w = outcome.witness
    if w is None:
        return None
    if isinstance(w, UniversalFailure):
        return f"fails above at {w.world}: {w.lasso.render(m)}"
    return f"path {w.render(m)}"


# ---------------------------------------------------------------------------
# Command handlers: each returns (exit code, json document, human lines)

def _cmd_validate(args) -> tuple[int, dict, list[str]]:
    m = _read_model(args.model)
    report = validate_frame(m, check_c3=args.c3)
    doc = {
        "verdict": "valid" if report.ok else "invalid",
        "witness": None,
        "report": [
            {"rule": v.rule, "witness": list(v.witness), "message": v.message}
            for v in report.violations
        ],
    }
    if report.ok:
        return 0, doc, ["frame valid"]
    lines = [f"frame invalid: {len(report.violations)} violation(s)"]
    lines += [f"  [{v.rule}] {v.message}" for v in report.violations]
    if report.truncated:
        lines.append("  (witness list truncated)")
    return 3, doc, lines


def _cmd_check(args) -> tuple[int, dict, list[str]]:
    m = _read_model(args.model)
    ensure_valid(m)
    f = parse_formula(args.formula)
    if args.world not in m.index:
        raise KeyError(f"unknown world {args.world!r}")
    if args.engine == "fixpoint":
        outcome = check(m, args.world, f)
        verdict = outcome.satisfied
        doc = {
            "verdict": "satisfied" if verdict else "not satisfied",
            "witness": _witness_doc(m, outcome),
            "report": [{"engine": "fixpoint", "satisfied": verdict}],
        }
        lines = [doc["verdict"]]
        text = _witness_text(m, outcome)
        if text:
            lines.append(f"witness: {text}")
        return (0 if verdict else 1), doc, lines
    if args.engine == "oracle":
        verdict = oracle_check(m, args.world, f)
        doc = {
            "verdict": "satisfied" if verdict else "not satisfied",
            "witness": None,
            "report": [{"engine": "oracle", "satisfied": verdict}],
        }
        return (0 if verdict else 1), doc, [doc["verdict"]]
    outcome = check(m, args.world, f)
    oracle_verdict = oracle_check(m, args.world, f)
    agree = outcome.satisfied == oracle_verdict
    doc = {
        "verdict": ("satisfied" if outcome.satisfied else "not satisfied")
        if agree
        else "disagreement",
        "witness": _witness_doc(m, outcome),
        "report": [
            {"engine": "fixpoint", "satisfied": outcome.satisfied},
            {"engine": "oracle", "satisfied": oracle_verdict},
        ],
    }
    lines = [
        f"fixpoint: {'satisfied' if outcome.satisfied else 'not satisfied'}",
        f"oracle:   {'satisfied' if oracle_verdict else 'not satisfied'}",
    ]
    if not agree:
        return 4, doc, lines + ["ENGINES DISAGREE"]
    text = _witness_text(m, outcome)
    if text:
        lines.append(f"witness: {text}")
    return (0 if outcome.satisfied else 1), doc, lines


def _cmd_denote(args) -> tuple[int, dict, list[str]]:
    m = _read_model(args.model)
    ensure_valid(m)
    f = parse_formula(args.formula)
    sets = denote(m, f, validate=False)
    entries = []
    lines = []
    for g in subformulas(f):
        names = sorted(m.names(sets[g]))
        entries.append({"formula": print_formula(g), "worlds": names})
        lines.append(f"{print_formula(g)}: {{{', '.join(names)}}}")
    doc = {"verdict": None, "witness": None, "report": entries}
    return 0, doc, lines


def _cmd_countermodel(args) -> tuple[int, dict, list[str]]:
    f = parse_formula(args.formula)
    result = find_countermodel(
        f, max_worlds=args.max_worlds, atoms=args.atoms, budget=args.budget, seed=args.seed
    )
    if result.found:
        model_doc = model_to_document(result.model)
        doc = {
            "verdict": "countermodel",
            "witness": {"world": result.world, "model": model_doc},
            "report": [{"models_checked": result.models_checked, "bounds": result.bounds}],
        }
        lines = [
            f"countermodel found after {result.models_checked} models; "
            f"refuted at world {result.world}",
            json.dumps(model_doc, indent=2),
        ]
        return 0, doc, lines
    doc = {
        "verdict": result.outcome.replace("_", "-"),
        "witness": None,
        "report": [{"models_checked": result.models_checked, "bounds": result.bounds}],
    }
    if result.outcome == "exhausted":
        lines = [
            f"exhausted: no countermodel among all {result.models_checked} valid models "
            f"with <= {args.max_worlds} worlds"
        ]
        return 1, doc, lines
    return 5, doc, [f"budget exceeded after {result.models_checked} models, no countermodel"]


def _compare_model_stream(args) -> Iterator[BirelationalModel]:
    for n in range(1, args.max_worlds + 1):
        yield from enumerate_models(n, args.atoms)
    rng = random.Random(args.seed ^ 0x5EED)
    for k in range(args.samples):
        params = GenParams(
            n_worlds=args.max_worlds + 1 + k % 3,
            n_atoms=args.atoms,
            seed=rng.getrandbits(63),
        )
        yield random_model(params)


def _cmd_compare(args) -> tuple[int, dict, list[str]]:
    rng = random.Random(args.seed)
    names = atom_names(args.atoms)
    formulas = [
        random_formula(rng, args.depth, names) for _ in range(COMPARE_FORMULAS_PER_RUN)
    ]
    battery = compile_battery(formulas)
    stats = scan_models(_compare_model_stream(args), battery, max_disagreements=3)
    entries = [
        {
            "model": model_to_document(d.model),
            "world": d.world,
            "formula": print_formula(d.formula),
            "fixpoint": d.engine_verdict,
            "oracle": d.oracle_verdict,
        }
        for d in stats.disagreements
    ]
    doc = {
        "verdict": "agreement" if stats.ok else "disagreement",
        "witness": entries[0] if entries else None,
        "report": [
            {
                "models": stats.models,
                "formulas": len(battery.formulas),
                "verdicts": stats.verdicts,
                "disagreements": entries,
            }
        ],
    }
    lines = [
        f"compared {stats.verdicts} verdicts: {len(battery.formulas)} formulas "
        f"(battery of {COMPARE_FORMULAS_PER_RUN} with subformulas) x {stats.models} models"
    ]
    if stats.ok:
        lines.append("engines agree everywhere")
        return 0, doc, lines
    for e in entries:
        lines.append(
            f"DISAGREEMENT at world {e['world']} on {e['formula']!r} "
            f"(fixpoint={e['fixpoint']}, oracle={e['oracle']}) in model:"
        )
        lines.append(json.dumps(e["model"]))
    return 4, doc, lines


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ictl",
        description="Model checking over birelational Kripke models.",
    )
    parser.add_argument(
        "--format", choices=["human", "json"], default="human", help="output format"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check frame and valuation invariants")
    p.add_argument("model")
    p.add_argument("--c3", action="store_true", help="also check the optional C3 condition")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("check", help="check a formula at a world")
    p.add_argument("model")
    p.add_argument("world")
    p.add_argument("formula")
    p.add_argument("--engine", choices=["fixpoint", "oracle", "both"], default="fixpoint")
    p.set_defaults(handler=_cmd_check)

    p = sub.add_parser("denote", help="print the world set of every subformula")
    p.add_argument("model")
    p.add_argument("formula")
    p.set_defaults(handler=_cmd_denote)

    p = sub.add_parser("countermodel", help="search for a model refuting a formula")
    p.add_argument("formula")
    p.add_argument("--max-worlds", type=int, default=3)
    p.add_argument("--atoms", type=int, default=2)
    p.add_argument("--budget", type=int, default=0, help="random models after the exhaustive scan")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_countermodel)

    p = sub.add_parser("compare", help="differential engine-vs-oracle testing")
    p.add_argument("--max-worlds", type=int, default=3)
    p.add_argument("--atoms", type=int, default=2)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--samples", type=int, default=0, help="extra random models")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    is_error = False
    try:
        code, doc, lines = args.handler(args)
    except (ParseError, ModelFormatError) as e:
        code, doc, lines, is_error = 2, {"error": str(e)}, [f"error: {e}"], True
    except KeyError as e:
        msg = e.args[0] if e.args else str(e)
        code, doc, lines, is_error = 2, {"error": str(msg)}, [f"error: {msg}"], True
    except OSError as e:
        code, doc, lines, is_error = 2, {"error": str(e)}, [f"error: {e}"], True
    except InvalidModelError as e:
        report = [
            {"rule": v.rule, "witness": list(v.witness), "message": v.message}
            for v in e.report.violations
        ]
        code = 3
        doc = {"verdict": "invalid", "witness": None, "report": report}
        lines = [f"error: {e}"]
        is_error = True
    doc.setdefault("verdict", None)
    doc.setdefault("witness", None)
    doc.setdefault("report", [])
    doc = {"command": args.command, **doc}
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        stream = sys.stderr if is_error else sys.stdout
        for line in lines:
            print(line, file=stream)
    return code


def entry_point() -> None:
    raise SystemExit(main())
