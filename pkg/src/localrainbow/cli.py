"""Operator surface: find / verify / extract / exact / export-cnf /
generate / sweep / bench subcommands.

Exit codes: 0 success (find: certificate re-verified; verify: good or
valid), 1 input error, 2 threshold not met, 3 violation found or invalid
certificate, 4 scale guard exceeded.  All randomness enters through
explicit seeds.  Every run appends a JSON-lines record to the path in
``--log`` or the LOCALRAINBOW_LOG environment variable (no log otherwise).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import time

from . import exact as exact_mod
from . import extract as extract_mod
from .finders import DEFAULT_CONFIG, FinderConfig, finder_for_tag, generic_find
from .generate import GeneratorSpec, construct_good_family, generate
from .model import (
    ColoringFamily,
    FamilyFormatError,
    PatternError,
    ScaleGuardError,
    anchored_to_dict,
    make_pattern,
    read_certificate,
    read_family,
    read_pattern_file,
    write_certificate,
    write_family,
)
from .verify import check_anchored, family_is_good


def _log_record(args, record: dict) -> None:
    path = getattr(args, "log", None) or os.environ.get("LOCALRAINBOW_LOG")
    if not path:
        return
    record["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    with open(path, "a") as fh:
        fh.write(json.dumps(record) + "\n")


def _family_from_args(args) -> ColoringFamily:
    if args.family:
        return read_family(args.family)
    if args.random:
        n, k, seed = args.random
        return generate(GeneratorSpec("uniform-random", n, k, seed))
    if args.mono:
        n = args.mono[0]
        k = args.mono[1] if len(args.mono) > 1 else 2
        return generate(GeneratorSpec("monochromatic", n, k))
    if args.injective is not None:
        n = args.injective
        return generate(GeneratorSpec("injective", n, n * (n - 1) // 2))
    raise FamilyFormatError("no family source given (--family/--random/--mono/--injective)")


def _pattern_from_args(args):
    if getattr(args, "pattern_file", None):
        return read_pattern_file(args.pattern_file)
    return make_pattern(args.pattern)


def _add_family_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", help="family file to read")
    parser.add_argument(
        "--random", nargs=3, type=int, metavar=("N", "K", "SEED"), help="seeded uniform family"
    )
    parser.add_argument(
        "--mono", nargs="+", type=int, metavar="N", help="monochromatic family: N [K]"
    )
    parser.add_argument("--injective", type=int, metavar="N", help="all-distinct edge colors")


def _config_from_args(args) -> FinderConfig:
    cfg = DEFAULT_CONFIG
    updates = {}
    if getattr(args, "coverage", None) is not None:
        updates["coverage"] = args.coverage
    if getattr(args, "pool", None) is not None:
        updates["pair_pool"] = args.pool
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _run_find(args) -> int:
    started = time.perf_counter()
    family = _family_from_args(args)
    pattern_tag = args.pattern
    config = _config_from_args(args)
    dispatch = finder_for_tag(pattern_tag)
    if dispatch is not None:
        finder, kwargs = dispatch
        outcome = finder(family, config=config, **kwargs)
    else:
        outcome = generic_find(family, make_pattern(pattern_tag), config=config)
    micros = int((time.perf_counter() - started) * 1e6)
    record = {
        "subcommand": "find",
        "pattern": pattern_tag,
        "n": family.n,
        "k": family.k,
        "params": {"random": args.random, "mono": args.mono, "family": args.family},
        "micros": micros,
    }
    if outcome.success:
        if not check_anchored(family, outcome.violation):
            print("internal error: certificate failed re-verification", file=sys.stderr)
            return 1
        out = args.out or f"certificate-{pattern_tag.replace(',', '_').replace('+', '-')}.json"
        write_certificate(outcome.violation, out)
        payload = anchored_to_dict(outcome.violation)
        payload["diagnostics"] = outcome.diagnostics
        with open(out, "w") as fh:
            json.dump(payload, fh, indent=1)
        print(f"violation found; certificate written to {out}")
        record.update(outcome="success", certificate=out)
        _log_record(args, record)
        return 0
    refusal = outcome.refusal
    print(
        f"threshold not met at stage {refusal.stage!r}: "
        f"required {refusal.required}, available {refusal.available}",
        file=sys.stderr,
    )
    record.update(outcome="threshold-not-met", stage=refusal.stage)
    _log_record(args, record)
    return 2


def _run_verify(args) -> int:
    family = _family_from_args(args)
    if args.certificate:
        av = read_certificate(args.certificate)
        ok = check_anchored(family, av)
        print("certificate valid" if ok else "certificate INVALID")
        _log_record(args, {"subcommand": "verify", "outcome": "valid" if ok else "invalid"})
        return 0 if ok else 3
    pattern = _pattern_from_args(args)
    try:
        report = family_is_good(family, pattern, copy_guard=args.copy_guard)
    except ScaleGuardError as exc:
        print(f"scale guard: {exc}", file=sys.stderr)
        return 4
    if report.is_good:
        print(f"family is good ({report.copies_checked} copies checked)")
        _log_record(args, {"subcommand": "verify", "outcome": "good"})
        return 0
    print(f"violation found after {report.copies_checked} copies")
    if args.out:
        from .model import AnchoredViolation

        write_certificate(AnchoredViolation(report.witness), args.out)
        print(f"witness written to {args.out}")
    _log_record(args, {"subcommand": "verify", "outcome": "violation"})
    return 3


def _run_extract(args) -> int:
    family = _family_from_args(args)
    kind = args.kind
    if kind == "star":
        ex = extract_mod.star_extract(family)
        payload = {
            "kind": kind,
            "x": ex.x,
            "s_vertices": list(ex.s_vertices),
            "p_vertices": list(ex.p_vertices),
            "triple_count": ex.triple_count,
        }
    elif kind == "matching":
        ex = extract_mod.matching_extract(family)
        payload = {
            "kind": kind,
            "y_vertices": list(ex.y_vertices),
            "matching": [list(e) for e in ex.matching],
            "triple_count": ex.triple_count,
        }
    elif kind == "bipartition":
        ex = extract_mod.bipartition_extract(family)
        payload = {
            "kind": kind,
            "a_vertices": list(ex.a_vertices),
            "b_vertices": list(ex.b_vertices),
            "triple_count": ex.triple_count,
        }
    else:
        ex = extract_mod.clique_extract(family)
        payload = {
            "kind": kind,
            "x_vertices": list(ex.x_vertices),
            "l_vertices": list(ex.l_vertices),
            "pair_count": ex.pair_count,
        }
    text = json.dumps(payload, indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    _log_record(args, {"subcommand": "extract", "kind": kind, "outcome": "ok"})
    return 0


def _run_exact(args) -> int:
    pattern = _pattern_from_args(args)
    result = exact_mod.compute_c(args.n, pattern, args.k_max, node_budget=args.budget)
    if result.value is not None:
        print(f"C({args.n}, {args.pattern}) = {result.value}")
    else:
        upper = result.upper if result.upper is not None else "?"
        print(f"C({args.n}, {args.pattern}) in [{result.lower}, {upper}] (budget bracket)")
    _log_record(
        args,
        {
            "subcommand": "exact",
            "n": args.n,
            "pattern": args.pattern,
            "outcome": result.value if result.value is not None else f">={result.lower}",
        },
    )
    return 0


def _run_export_cnf(args) -> int:
    pattern = _pattern_from_args(args)
    info = exact_mod.export_cnf(args.n, pattern, args.k, args.out)
    print(
        f"wrote {args.out}: {info.num_vars} vars "
        f"({info.color_vars} color + {info.aux_vars} aux), {info.num_clauses} clauses"
    )
    _log_record(args, {"subcommand": "export-cnf", "outcome": "ok", "vars": info.num_vars})
    return 0


def _run_generate(args) -> int:
    pattern = make_pattern(args.pattern) if args.pattern else None
    spec = GeneratorSpec(args.kind, args.n, args.k, args.seed, pattern)
    if args.kind == "resampled-good":
        family, report = construct_good_family(
            args.n, pattern, args.k, seed=args.seed, budget=args.budget
        )
        if family is None:
            print(f"budget exhausted after {report.resamples} resamples", file=sys.stderr)
            return 2
        print(f"good family found after {report.resamples} resamples")
    else:
        family = generate(spec)
    write_family(family, args.out)
    print(f"family written to {args.out}")
    _log_record(args, {"subcommand": "generate", "kind": args.kind, "outcome": "ok"})
    return 0


def _run_sweep(args) -> int:
    fieldnames = ["pattern", "n", "k", "seed", "outcome", "stage", "micros"]
    rows = []
    for n in args.n_list:
        for k in args.k_list:
            for seed in args.seeds:
                family = generate(GeneratorSpec("uniform-random", n, k, seed))
                dispatch = finder_for_tag(args.pattern)
                started = time.perf_counter()
                try:
                    if dispatch is not None:
                        finder, kwargs = dispatch
                        outcome = finder(family, **kwargs)
                    else:
                        outcome = generic_find(family, make_pattern(args.pattern))
                    status = "success" if outcome.success else "threshold-not-met"
                    stage = "" if outcome.success else outcome.refusal.stage
                except (ValueError, ScaleGuardError) as exc:
                    status, stage = "error", str(exc)
                micros = int((time.perf_counter() - started) * 1e6)
                rows.append(
                    {
                        "pattern": args.pattern,
                        "n": n,
                        "k": k,
                        "seed": seed,
                        "outcome": status,
                        "stage": stage,
                        "micros": micros,
                    }
                )
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    print(f"sweep written to {args.out} ({len(rows)} rows)")
    _log_record(args, {"subcommand": "sweep", "rows": len(rows), "outcome": "ok"})
    return 0


_BENCH_POINTS = [
    ("C4", 800, 3),
    ("P4", 400, 3),
    ("S4", 3000, 4),
    ("I4", 3000, 3),
    ("K8", 2000, 3),
]


def _run_bench(args) -> int:
    print(f"{'pattern':12s} {'n':>6s} {'k':>3s} {'outcome':18s} {'millis':>9s}")
    for tag, n, k in _BENCH_POINTS:
        family = generate(GeneratorSpec("uniform-random", n, k, args.seed))
        finder, kwargs = finder_for_tag(tag)
        started = time.perf_counter()
        outcome = finder(family, **kwargs)
        millis = (time.perf_counter() - started) * 1e3
        status = "success" if outcome.success else f"refused:{outcome.refusal.stage}"
        print(f"{tag:12s} {n:6d} {k:3d} {status:18s} {millis:9.1f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="localrainbow",
        description="Rainbow-violation finders and verifiers for per-vertex coloring families",
    )
    parser.add_argument("--log", help="JSON-lines run log (or env LOCALRAINBOW_LOG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_find = sub.add_parser("find", help="run a violation finder")
    p_find.add_argument("pattern", help="pattern tag (C4, P4, S5, I7, K8, K7,7, P2+K2+K2, ...)")
    _add_family_source(p_find)
    p_find.add_argument("--out", help="certificate output path")
    p_find.add_argument("--coverage", type=float, help="peeling coverage target (default 0.99)")
    p_find.add_argument("--pool", type=int, help="pigeonhole candidate pool (default 512)")
    p_find.set_defaults(func=_run_find)

    p_verify = sub.add_parser("verify", help="check goodness or a certificate")
    p_verify.add_argument("--pattern", help="pattern tag for goodness mode")
    p_verify.add_argument("--pattern-file", help="pattern file for goodness mode")
    p_verify.add_argument("--certificate", help="certificate file to validate")
    p_verify.add_argument("--copy-guard", type=int, default=10**8)
    p_verify.add_argument("--out", help="write the violation witness here")
    _add_family_source(p_verify)
    p_verify.set_defaults(func=_run_verify)

    p_extract = sub.add_parser("extract", help="run one extraction lemma")
    p_extract.add_argument("kind", choices=["star", "matching", "bipartition", "clique"])
    _add_family_source(p_extract)
    p_extract.add_argument("--out", help="witness output path")
    p_extract.set_defaults(func=_run_extract)

    p_exact = sub.add_parser("exact", help="compute the minimum color count at desk scale")
    p_exact.add_argument("n", type=int)
    p_exact.add_argument("pattern")
    p_exact.add_argument("--pattern-file")
    p_exact.add_argument("--k-max", type=int, default=5)
    p_exact.add_argument("--budget", type=int, default=5_000_000)
    p_exact.set_defaults(func=_run_exact)

    p_cnf = sub.add_parser("export-cnf", help="emit a DIMACS encoding")
    p_cnf.add_argument("n", type=int)
    p_cnf.add_argument("pattern")
    p_cnf.add_argument("k", type=int)
    p_cnf.add_argument("--pattern-file")
    p_cnf.add_argument("--out", required=True)
    p_cnf.set_defaults(func=_run_export_cnf)

    p_gen = sub.add_parser("generate", help="write a family file")
    p_gen.add_argument(
        "kind",
        choices=["uniform-random", "monochromatic", "injective", "proper-ish", "resampled-good"],
    )
    p_gen.add_argument("n", type=int)
    p_gen.add_argument("k", type=int)
    p_gen.add_argument("seed", type=int, nargs="?", default=0)
    p_gen.add_argument("--pattern", help="target pattern for resampled-good")
    p_gen.add_argument("--budget", type=int, default=10**6)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=_run_generate)

    p_sweep = sub.add_parser("sweep", help="grid of finder runs, CSV out")
    p_sweep.add_argument("--pattern", required=True)
    p_sweep.add_argument("--n-list", type=int, nargs="+", required=True)
    p_sweep.add_argument("--k-list", type=int, nargs="+", required=True)
    p_sweep.add_argument("--seeds", type=int, nargs="+", required=True)
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=_run_sweep)

    p_bench = sub.add_parser("bench", help="time the finders at reference points")
    p_bench.add_argument("--seed", type=int, default=1)
    p_bench.set_defaults(func=_run_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PatternError, FamilyFormatError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except ScaleGuardError as exc:
        print(f"scale guard: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
