"""Command-line front end.

Exit codes: 0 success, 10 model found, 20 no model within the bound,
1 usage/parse/validation error, 2 resource limit hit.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .constructs import CONSTRUCTS, ConstructCall, expand, sweep
from .encoders import (
    PeanoCandidate, check_peano, encode_domino, encode_propositional, parse_domino,
)
from .errors import HFSatError, ResourceError, ValidationError
from .normalize import NormalizedConjunction, normalized_conjunctions, skeleton
from .parser import parse, print_formula
from .reduction import reduce_conjunction, tau
from .semantics import dump_model, evaluate, load_model, read_model
from .solver import SearchBound, decide_bounded, oracle_enumerate
from .syntax import EXTENSION_ATOMS, subformulas, validate

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_RESOURCE = 2
EXIT_SAT = 10
EXIT_NO_MODEL = 20

NO_MODEL_NOTE = (
    "note: the fragment is decidable, but no certified model-size bound is "
    "implemented, so this is not a proof of unsatisfiability"
)


@dataclass
class RunConfig:
    command: str
    args: argparse.Namespace
    json: bool = False
    verbose: int = 0
    report: dict = field(default_factory=dict)


def _read_text(value: Optional[str], path: Optional[str]) -> str:
    if path is not None:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    if value is None:
        raise HFSatError("no input given")
    if value == "-":
        return sys.stdin.read()
    return value


def _formula_arg(cfg: RunConfig, timings: dict):
    t0 = time.perf_counter()
    f = parse(_read_text(cfg.args.formula, getattr(cfg.args, "file", None)).strip())
    timings["parse"] = time.perf_counter() - t0
    return f


def _has_ext(f) -> bool:
    return any(isinstance(n, EXTENSION_ATOMS) for n in subformulas(f))


def _out(cfg: RunConfig, text: str) -> None:
    if not cfg.json:
        print(text)


# -- subcommands ------------------------------------------------------------------------


def _cmd_parse(cfg: RunConfig) -> int:
    f = _formula_arg(cfg, {})
    text = print_formula(f)
    cfg.report.update(result="ok", formula=text)
    _out(cfg, text)
    return EXIT_OK


def _cmd_validate(cfg: RunConfig) -> int:
    f = _formula_arg(cfg, {})
    diags = validate(f, extensions=cfg.args.extensions, dialect=cfg.args.dialect)
    cfg.report.update(
        result="valid" if not diags else "invalid",
        diagnostics=[{"kind": d.kind, "message": d.message} for d in diags],
    )
    if diags:
        for d in diags:
            _out(cfg, str(d))
        return EXIT_ERROR
    _out(cfg, "valid")
    return EXIT_OK


def _cmd_normalize(cfg: RunConfig) -> int:
    f = _formula_arg(cfg, {})
    diags = validate(f, extensions=_has_ext(f))
    if diags:
        raise ValidationError(diags)
    sk = skeleton(f)
    blocks = []
    for k, nc in enumerate(normalized_conjunctions(f), start=1):
        blocks.append([print_formula(c) for c in nc.conjuncts])
        if cfg.args.limit and k >= cfg.args.limit:
            break
    cfg.report.update(result="ok", skeleton=str(sk), conjunctions=blocks)
    _out(cfg, f"# skeleton: {sk}")
    for k, block in enumerate(blocks, start=1):
        _out(cfg, f"# conjunction {k}")
        for line in block:
            _out(cfg, line)
    if not blocks:
        _out(cfg, "# no conjunctions: the propositional skeleton is unsatisfiable")
    return EXIT_OK


def _cmd_reduce(cfg: RunConfig) -> int:
    f = _formula_arg(cfg, {})
    nc = NormalizedConjunction.from_formula(f, freshen=False)
    if cfg.args.tau_only:
        out, r = tau(nc)
    else:
        out, r = reduce_conjunction(nc)
    text = print_formula(out)
    cfg.report.update(
        result="ok",
        formula=text,
        renaming={str(k): str(v) for k, v in r.forward.items()},
        universe=str(r.universe),
    )
    _out(cfg, text)
    _out(cfg, "# renaming")
    for line in str(r).splitlines():
        _out(cfg, f"# {line}")
    return EXIT_OK


def _bound(cfg: RunConfig) -> SearchBound:
    return SearchBound(cfg.args.level, cfg.args.breadth, cfg.args.cap)


def _cmd_check_sat(cfg: RunConfig) -> int:
    timings: dict = {}
    f = _formula_arg(cfg, timings)
    b = _bound(cfg)
    t0 = time.perf_counter()
    diags = validate(f, extensions=_has_ext(f))
    timings["validate"] = time.perf_counter() - t0
    if diags:
        raise ValidationError(diags)
    if cfg.args.all_models:
        t0 = time.perf_counter()
        models = oracle_enumerate(f, b)
        timings["enumerate"] = time.perf_counter() - t0
        cfg.report.update(
            result="sat" if models else "no-model-within-bound",
            models=[dump_model(m) for m in models],
            bound=vars(b),
            timings=timings,
        )
        for k, m in enumerate(models, start=1):
            _out(cfg, f"# model {k}")
            _out(cfg, dump_model(m).rstrip())
        if not models:
            _out(cfg, f"no model within bound <{b}>")
            _out(cfg, NO_MODEL_NOTE)
        return EXIT_SAT if models else EXIT_NO_MODEL
    result = decide_bounded(f, b, jobs=cfg.args.jobs)
    timings.update(result.stats.timings)
    cfg.report.update(result=result.kind, bound=vars(b), timings=timings, stats=result.stats.as_dict())
    if result.kind == "sat":
        text = dump_model(result.model)
        cfg.report["model"] = text
        _out(cfg, text.rstrip())
        return EXIT_SAT
    _out(cfg, f"no model within bound <{b}>")
    _out(cfg, NO_MODEL_NOTE)
    return EXIT_NO_MODEL


def _cmd_expand(cfg: RunConfig) -> int:
    call = ConstructCall(cfg.args.name, tuple(cfg.args.vars))
    text = print_formula(expand(call))
    cfg.report.update(result="ok", formula=text)
    _out(cfg, text)
    if cfg.args.check_oracle:
        rep = sweep(cfg.args.name, cfg.args.level, cfg.args.breadth)
        cfg.report["oracle"] = {
            "interpretations": rep.interpretations,
            "mismatches": rep.mismatches,
            "seconds": rep.seconds,
        }
        _out(cfg, f"# oracle sweep: {rep.interpretations} interpretations, {rep.mismatches} mismatches")
        if not rep.ok:
            return EXIT_ERROR
    return EXIT_OK


def _cmd_encode_domino(cfg: RunConfig) -> int:
    d = parse_domino(_read_text(None, cfg.args.file))
    text = print_formula(encode_domino(d))
    cfg.report.update(result="ok", formula=text)
    _out(cfg, text)
    return EXIT_OK


def _cmd_encode_prop(cfg: RunConfig) -> int:
    text = print_formula(encode_propositional(_read_text(cfg.args.formula, None)))
    cfg.report.update(result="ok", formula=text)
    _out(cfg, text)
    return EXIT_OK


def _cmd_check_peano(cfg: RunConfig) -> int:
    pairing, values = read_model(_read_text(None, cfg.args.model))
    by_name = {v.name: x for v, x in values.items()}
    missing = [n for n in ("N", "Z", "S") if n not in by_name]
    if missing:
        raise HFSatError(f"model file lacks {', '.join(missing)}")
    cand = PeanoCandidate(by_name["N"], by_name["Z"], by_name["S"], pairing)
    rep = check_peano(cand, cap=cfg.args.cap)
    cfg.report.update(result="pass" if rep.passed else "fail", axiom=rep.axiom, witness=rep.witness)
    _out(cfg, str(rep))
    return EXIT_OK


def _cmd_eval(cfg: RunConfig) -> int:
    model = load_model(_read_text(None, cfg.args.model))
    f = parse(_read_text(cfg.args.formula, None).strip())
    value = evaluate(model, f, extensions=_has_ext(f))
    cfg.report.update(result="true" if value else "false")
    _out(cfg, "true" if value else "false")
    return EXIT_OK


_COMMANDS = {
    "parse": _cmd_parse,
    "validate": _cmd_validate,
    "normalize": _cmd_normalize,
    "reduce": _cmd_reduce,
    "check-sat": _cmd_check_sat,
    "expand": _cmd_expand,
    "encode-domino": _cmd_encode_domino,
    "encode-prop": _cmd_encode_prop,
    "check-peano": _cmd_check_peano,
    "eval": _cmd_eval,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hfsat", description="Satisfiability toolkit for two-sorted restricted-quantifier formulas over hereditarily finite sets.")
    p.add_argument("--json", action="store_true", help="emit a machine-readable JSON document")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def formula_cmd(name: str, help_: str):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("formula", nargs="?", help="inline formula, or '-' for standard input")
        sp.add_argument("-f", "--file", help="read the formula from a file ('-' for standard input)")
        return sp

    formula_cmd("parse", "parse and print in canonical syntax")
    sp = formula_cmd("validate", "report well-formedness diagnostics")
    sp.add_argument("--extensions", action="store_true", help="allow dom/ran/img/comp literals")
    sp.add_argument("--dialect", choices=("base", "nonpairs"), default="base")
    sp = formula_cmd("normalize", "print the normalized conjunctions, one block per valuation")
    sp.add_argument("--limit", type=int, default=0, help="stop after this many conjunctions")
    sp = formula_cmd("reduce", "map a normalized conjunction to its guarded map-free companion")
    sp.add_argument("--tau-only", action="store_true", help="print only the translated conjunction")
    sp = formula_cmd("check-sat", "bounded model search")
    sp.add_argument("--level", type=int, default=3, help="universe level for set variables")
    sp.add_argument("--breadth", type=int, default=4, help="max pairs per map value")
    sp.add_argument("--cap", type=int, default=10**7, help="max candidate-space size")
    sp.add_argument("--all-models", action="store_true", help="list every model within the bound")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")

    sp = sub.add_parser("expand", help="expand a construct macro")
    sp.add_argument("name", choices=CONSTRUCTS)
    sp.add_argument("vars", nargs="*", help="argument variables; prefix maps with @")
    sp.add_argument("--check-oracle", action="store_true", help="run the exhaustive oracle sweep for this row")
    sp.add_argument("--level", type=int, default=3)
    sp.add_argument("--breadth", type=int, default=3)

    sp = sub.add_parser("encode-domino", help="print the tiling formula of a domino system")
    sp.add_argument("file", help="domino system file ('-' for standard input)")
    sp = sub.add_parser("encode-prop", help="encode a propositional formula")
    sp.add_argument("formula", help="e.g. 'p & ~p'")
    sp = sub.add_parser("check-peano", help="check the Peano axioms on a finite candidate")
    sp.add_argument("model", help="model file with N, Z and S")
    sp.add_argument("--cap", type=int, default=12, help="max |N| for the induction check")
    sp = sub.add_parser("eval", help="evaluate a formula against a model file")
    sp.add_argument("model", help="model file ('-' for standard input)")
    sp.add_argument("formula", help="inline formula")
    return p


def run(cfg: RunConfig) -> int:
    started = time.perf_counter()
    try:
        code = _COMMANDS[cfg.command](cfg)
    except ResourceError as exc:
        cfg.report.update(result="resource-error", error=str(exc))
        code = EXIT_RESOURCE
        print(f"resource limit: {exc}", file=sys.stderr)
    except ValidationError as exc:
        cfg.report.update(
            result="error",
            error=str(exc),
            diagnostics=[{"kind": d.kind, "message": d.message} for d in exc.diagnostics],
        )
        code = EXIT_ERROR
        print(f"error: {exc}", file=sys.stderr)
    except (HFSatError, OSError, ValueError) as exc:
        cfg.report.update(result="error", error=str(exc))
        code = EXIT_ERROR
        print(f"error: {exc}", file=sys.stderr)
    if cfg.json:
        cfg.report.setdefault("timings", {})
        cfg.report["timings"]["total"] = time.perf_counter() - started
        cfg.report["command"] = cfg.command
        cfg.report["exit_code"] = code
        print(json.dumps(cfg.report, indent=2, sort_keys=True))
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(args.command, args, json=args.json, verbose=args.verbose)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
