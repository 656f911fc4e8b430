"""Command line front end.

Five subcommands: check judgement files against a theory, normalize a
term, sweep the finite models over the shipped embeddings, scan for
normal inhabitants of a target type, and scan generated terms for
strong normalization.

Output is line oriented.  Text format prints status, item id, and
detail separated by tabs; json-lines format prints one object per item
after a leading configuration object, with sorted keys and fixed
separators so runs with the same inputs are byte identical.  The exit
code is the most severe that applies: 0 ok, 1 type error, 2 parse
error, 3 budget exhausted, 4 file problem, 5 counterexample found.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .algebra import enumerate_full_algebras, sample_full_algebras, write_alg
from .errors import FuelError, ParseError, PiModuloError
from . import model_cc, model_stt
from .candidates import StronglyNormalizing, sn_check
from .generate import (
    convertible_pairs,
    enumerate_normal_inhabitants,
    sample_well_typed,
)
from .reduction import BETA, BETA_R, Fuel, FuelExhausted, normalize
from .syntax import (
    Judgement,
    parse_judgement,
    parse_judgements,
    parse_term,
    print_judgement,
    print_term,
)
from .terms import term_size
from .theories import builtin_example, load_theory
from .typecheck import check, check_theory, infer

EXIT_OK = 0
EXIT_TYPE = 1
EXIT_PARSE = 2
EXIT_FUEL = 3
EXIT_IO = 4
EXIT_COUNTEREXAMPLE = 5

_STATUS_CODES = {
    "ok": EXIT_OK,
    "type-error": EXIT_TYPE,
    "parse-error": EXIT_PARSE,
    "fuel-exhausted": EXIT_FUEL,
    "io-error": EXIT_IO,
    "counterexample": EXIT_COUNTEREXAMPLE,
    "unknown": EXIT_FUEL,
}


class Reporter:
    def __init__(self, fmt: str, config: dict):
        self.fmt = fmt
        self.worst = EXIT_OK
        if fmt == "json-lines":
            print(json.dumps(config, sort_keys=True, separators=(",", ":")))

    def emit(self, item_id: str, kind: str, status: str, detail: str = "") -> None:
        self.worst = max(self.worst, _STATUS_CODES.get(status, EXIT_IO))
        if self.fmt == "json-lines":
            record = {"detail": detail, "id": item_id, "kind": kind, "status": status}
            print(json.dumps(record, sort_keys=True, separators=(",", ":")))
        else:
            flat = detail.replace("\n", "; ")
            print(f"{status}\t{item_id}\t{flat}")


def _error_status(exc: PiModuloError) -> str:
    if isinstance(exc, ParseError):
        return "parse-error"
    if isinstance(exc, FuelError):
        return "fuel-exhausted"
    return "type-error"


def _read_source(spec: str) -> str:
    if spec.startswith("builtin:"):
        return builtin_example(spec[len("builtin:"):])
    with open(spec, encoding="utf-8") as fh:
        return fh.read()


# --- check ---------------------------------------------------------------------

def cmd_check(args, rep: Reporter) -> None:
    tf = load_theory(args.theory)
    report = check_theory(tf.theory, Fuel(args.fuel))
    for label, status in report.items:
        if status == "ok":
            rep.emit(label, "theory", "ok")
        else:
            rep.emit(label, "theory", "type-error", status)
    for warning in report.warnings:
        rep.emit("overlap", "theory", "ok", warning)
    for spec in args.files:
        try:
            text = _read_source(spec)
        except OSError as exc:
            rep.emit(spec, "file", "io-error", str(exc))
            continue
        try:
            judgements = parse_judgements(text)
        except ParseError as exc:
            rep.emit(spec, "file", "parse-error", str(exc))
            continue
        for j in judgements:
            item = f"{spec}:{j.line}"
            try:
                if j.expected is None:
                    ty = infer(tf.theory, j.ctx, j.term, Fuel(args.fuel))
                    rep.emit(item, "judgement", "ok", f"inferred {print_term(ty)}")
                else:
                    check(tf.theory, j.ctx, j.term, j.expected, Fuel(args.fuel))
                    rep.emit(item, "judgement", "ok", print_judgement(j))
            except PiModuloError as exc:
                rep.emit(item, "judgement", _error_status(exc), str(exc))


# --- normalize -----------------------------------------------------------------

def cmd_normalize(args, rep: Reporter) -> None:
    tf = load_theory(args.theory)
    try:
        text = _read_source(args.file) if args.file else args.term
        t = parse_term(text)
    except PiModuloError as exc:
        rep.emit("input", "term", _error_status(exc), str(exc))
        return
    trace: list = []
    result = normalize(t, tf.theory, args.mode, Fuel(args.fuel), trace=trace)
    if args.trace:
        for i, (pos, label, step) in enumerate(trace, start=1):
            where = ".".join(str(p) for p in pos) or "root"
            rep.emit(f"step{i}", "step", "ok", f"{where}\t{label}\t{print_term(step)}")
    if isinstance(result, FuelExhausted):
        rep.emit("result", "normal-form", "fuel-exhausted", print_term(result.last))
    else:
        rep.emit("result", "normal-form", "ok", print_term(result))


# --- model-check ----------------------------------------------------------------

def _model_family(signature) -> str | None:
    names = {name for name, _ in signature}
    if "U_Type" in names:
        return "cc"
    if "eps" in names and "imp" in names:
        return "stt"
    return None


def _default_context(family: str):
    if family == "stt":
        return (("p", parse_term("o")), ("q", parse_term("o")))
    return (("p", parse_term("U_Type")),)


def _model_algebras(args):
    n = args.algebra_size
    if n <= 2 and args.count == 0:
        return list(enumerate_full_algebras(n))
    count = args.count or 64
    return list(sample_full_algebras(n, count, args.seed))


def _check_rule_on_algebra(spec) -> tuple[str, str]:
    family, name, alg, label = spec
    tf = load_theory(name)
    rule = next(r for r in tf.theory.rules if r.label == label)
    if family == "stt":
        for phi in model_stt.enumerate_valuations(rule.ctx, alg):
            if not model_stt.check_conversion_stt(rule.lhs, rule.rhs, phi, alg):
                return "counterexample", _witness(alg, rule.lhs, rule.rhs, phi)
        return "ok", ""
    for psi in model_cc.enumerate_psis(rule.ctx, alg):
        for phi in model_cc.enumerate_m_valuations(rule.ctx, psi, alg):
            if not model_cc.check_conversion_cc(rule.lhs, rule.rhs, phi, psi, alg):
                return "counterexample", _witness(alg, rule.lhs, rule.rhs, phi, psi)
    return "ok", ""


def _check_pair_on_algebra(spec) -> tuple[str, str]:
    family, alg, t, u, ctx = spec
    if family == "stt":
        for phi in model_stt.enumerate_valuations(ctx, alg):
            if not model_stt.check_conversion_stt(t, u, phi, alg):
                return "counterexample", _witness(alg, t, u, phi)
        return "ok", ""
    for psi in model_cc.enumerate_psis(ctx, alg):
        for phi in model_cc.enumerate_m_valuations(ctx, psi, alg):
            if not model_cc.check_conversion_cc(t, u, phi, psi, alg):
                return "counterexample", _witness(alg, t, u, phi, psi)
    return "ok", ""


def _check_subst_on_algebra(spec) -> tuple[str, str]:
    family, alg, t, x, u, ctx = spec
    if family == "stt":
        for phi in model_stt.enumerate_valuations(ctx, alg):
            if not model_stt.check_substitution_stt(t, x, u, phi, alg):
                return "counterexample", _witness(alg, t, u, phi)
        return "ok", ""
    for psi in model_cc.enumerate_psis(ctx, alg):
        for phi in model_cc.enumerate_m_valuations(ctx, psi, alg):
            if not model_cc.check_substitution_cc(t, x, u, phi, psi, alg):
                return "counterexample", _witness(alg, t, u, phi, psi)
    return "ok", ""


def _witness(alg, t, u, phi, psi=None) -> str:
    lines = [
        f"terms: {print_term(t)}  vs  {print_term(u)}",
        f"valuation: {phi!r}",
    ]
    if psi is not None:
        lines.append(f"outer valuation: {psi!r}")
    lines.append("algebra:")
    lines.append(write_alg(alg).rstrip("\n"))
    return "\n".join(lines)


def cmd_model_check(args, rep: Reporter) -> None:
    tf = load_theory(args.theory)
    family = _model_family(tf.theory.signature)
    if family is None:
        rep.emit("theory", "config", "io-error",
                 "model checking needs a theory over the shipped vocabularies")
        return
    algebras = _model_algebras(args)
    specs = [
        (family, args.theory, alg, rule.label)
        for rule in tf.theory.rules
        for alg in algebras
    ]
    results = _run_items(_check_rule_on_algebra, specs, args.jobs)
    by_rule: dict[str, tuple[int, int]] = {}
    for (_, _, alg, label), (status, detail) in zip(specs, results):
        held, total = by_rule.get(label, (0, 0))
        if status != "ok":
            rep.emit(f"rule {label} algebra {algebras.index(alg)}",
                     "rule-conversion", status, detail)
        else:
            held += 1
        by_rule[label] = (held, total + 1)
    for label, (held, total) in by_rule.items():
        if held == total:
            rep.emit(f"rule {label}", "rule-conversion", "ok",
                     f"holds on {total} algebras")

    ctx = _default_context(family)
    seeds = [t for t, _ in sample_well_typed(tf.theory, args.pairs, args.seed, ctx)]
    pairs = list(convertible_pairs(tf.theory, seeds, max_size=40, ctx=ctx))[: args.pairs]
    pair_algs = algebras[:: max(1, len(algebras) // 8)]
    specs2 = [
        (family, alg, t, u, ctx) for t, u in pairs for alg in pair_algs
    ]
    results2 = _run_items(_check_pair_on_algebra, specs2, args.jobs)
    bad = [
        (i, detail)
        for i, (status, detail) in enumerate(results2)
        if status != "ok"
    ]
    for i, detail in bad:
        rep.emit(f"pair {i}", "pair-conversion", "counterexample", detail)
    rep.emit("pairs", "pair-conversion", "ok" if not bad else "counterexample",
             f"{len(pairs)} convertible pairs over {len(pair_algs)} algebras")

    subst_terms = [t for t, _ in sample_well_typed(tf.theory, args.subst, args.seed + 1, ctx)]
    x = ctx[0][0]
    images = [u for u, ty in sample_well_typed(tf.theory, args.subst, args.seed + 2, ctx)
              if ty == ctx[0][1]]
    if not images:
        images = [parse_term("imp p q" if family == "stt" else "p",
                             var_names=frozenset(n for n, _ in ctx))]
    specs3 = [
        (family, alg, t, x, images[i % len(images)], ctx)
        for i, t in enumerate(subst_terms)
        for alg in pair_algs
    ]
    results3 = _run_items(_check_subst_on_algebra, specs3, args.jobs)
    bad3 = [
        (i, detail) for i, (status, detail) in enumerate(results3) if status != "ok"
    ]
    for i, detail in bad3:
        rep.emit(f"subst {i}", "substitution", "counterexample", detail)
    rep.emit("substitution", "substitution", "ok" if not bad3 else "counterexample",
             f"{len(subst_terms)} instances over {len(pair_algs)} algebras")


def _run_items(worker, specs, jobs: int):
    if jobs <= 1:
        return [worker(s) for s in specs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, specs))


# --- consistency-scan -------------------------------------------------------------

def cmd_consistency_scan(args, rep: Reporter) -> None:
    tf = load_theory(args.theory)
    if args.target:
        target_text = args.target
    elif args.theory == "cc":
        target_text = "x : U_Type |- eps_Type x"
    else:
        target_text = "x : o |- eps x"
    try:
        j = parse_judgement(target_text, 1)
    except ParseError as exc:
        rep.emit("target", "config", "parse-error", str(exc))
        return
    found = 0
    for t in enumerate_normal_inhabitants(tf.theory, j.term, args.max_size, j.ctx):
        found += 1
        rep.emit(f"inhabitant {found}", "inhabitant", "counterexample",
                 print_term(t))
        if found >= args.limit:
            break
    if found == 0:
        rep.emit("scan", "inhabitation", "ok",
                 f"no normal inhabitant of {print_judgement(j)} up to size {args.max_size}")


# --- sn-scan ----------------------------------------------------------------------

def cmd_sn_scan(args, rep: Reporter) -> None:
    tf = load_theory(args.theory)
    family = _model_family(tf.theory.signature)
    ctx = _default_context(family) if family else ()
    counts = {"yes": 0, "unknown": 0}
    for i, (t, _) in enumerate(
        sample_well_typed(tf.theory, args.count, args.seed, ctx, max_size=args.max_size)
    ):
        result = sn_check(t, args.fuel, tf.theory, args.mode)
        match result:
            case StronglyNormalizing(_):
                counts["yes"] += 1
            case FuelExhausted(last):
                counts["unknown"] += 1
                rep.emit(f"term {i}", "sn", "unknown",
                         f"{print_term(t)} not certified; search stopped at {print_term(last)}")
    status = "ok"
    if counts["unknown"] > args.allow_unknown:
        status = "fuel-exhausted"
    rep.emit("summary", "sn", status,
             f"{counts['yes']} normalizing, {counts['unknown']} unknown")


# --- entry ------------------------------------------------------------------------

def _fuel_default() -> int:
    raw = os.environ.get("PIMODULO_FUEL", "")
    try:
        return int(raw)
    except ValueError:
        return 1_000_000


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="pimodulo",
        description="Type checking modulo user-declared rewrite rules, with finite-model and normalization scans.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--theory", default="stt",
                       help="builtin theory name (stt, cc) or a theory file path")
        p.add_argument("--fuel", type=int, default=_fuel_default(),
                       help="reduction budget (env PIMODULO_FUEL)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--format", choices=("text", "json-lines"), default="text")

    p = sub.add_parser("check", help="type-check judgement files against a theory")
    p.add_argument("files", nargs="*",
                   help="judgement files; builtin:NAME reads a packaged example")
    common(p)
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("normalize", help="print the normal form of a term")
    p.add_argument("term", nargs="?", help="term text")
    p.add_argument("--file", help="read the term from a file instead")
    p.add_argument("--mode", choices=(BETA, BETA_R), default=BETA_R)
    p.add_argument("--trace", action="store_true", help="print each step")
    common(p)
    p.set_defaults(run=cmd_normalize)

    p = sub.add_parser("model-check",
                       help="sweep the finite models over rules, pairs, and substitutions")
    p.add_argument("--algebra-size", type=int, default=2)
    p.add_argument("--count", type=int, default=0,
                   help="algebras to sample; 0 means all when the size allows")
    p.add_argument("--pairs", type=int, default=24)
    p.add_argument("--subst", type=int, default=12)
    common(p)
    p.set_defaults(run=cmd_model_check)

    p = sub.add_parser("consistency-scan",
                       help="search for normal inhabitants of a target type")
    p.add_argument("--max-size", type=int, default=8)
    p.add_argument("--target",
                   help="judgement giving context and target, e.g. 'x : o |- eps x'")
    p.add_argument("--limit", type=int, default=5,
                   help="stop after this many inhabitants")
    common(p)
    p.set_defaults(run=cmd_consistency_scan)

    p = sub.add_parser("sn-scan",
                       help="check generated well-typed terms for strong normalization")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-size", type=int, default=24)
    p.add_argument("--mode", choices=(BETA, BETA_R), default=BETA)
    p.add_argument("--allow-unknown", type=int, default=0)
    common(p)
    p.set_defaults(run=cmd_sn_scan)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = {
        "command": args.command,
        "fuel": args.fuel,
        "seed": args.seed,
        "theory": args.theory,
    }
    rep = Reporter(args.format, config)
    try:
        args.run(args, rep)
    except PiModuloError as exc:
        rep.emit("fatal", "error", _error_status(exc), str(exc))
    except OSError as exc:
        rep.emit("fatal", "error", "io-error", str(exc))
    return rep.worst


if __name__ == "__main__":
    sys.exit(main())
