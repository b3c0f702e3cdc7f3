"""Command-line front end.

Exit codes: 0 success, 1 a relation or property failed, 2 bad input,
3 a negative verdict (nontrivial word, not unitriangular).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dsl
from . import hnn as H
from .bench import run_bench
from .fuzz import PROPERTIES, FuzzConfig, run_fuzz
from .morphism import EndoMap, apply, compose, endo_from_images
from .unitri import (
    RelationReport,
    UniTri,
    check_alpha_homomorphism,
    check_relation_suite,
    from_endo,
    lambda_gen,
    ut_compose,
    ut_invert,
)
from .words import RankError, Word

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NEGATIVE = 0, 1, 2, 3

# report groups; the eqN aliases are part of the command-line contract
GROUPS = {
    "lambda-conjugation": "conjugation of lambda(3,1), lambda(3,2) by lambda(2,1)",
    "sigma-conjugation": "conjugation of tau1, tau2 by sigma",
    "lambda-commutator": "[L(i,j), L(j,k)] = L(i,k)",
    "disjoint-commute": "generators with no shared index chain commute",
    "hydra": "[[L(3,2), L(2,1)], L(2,1)] = e",
    "stable-letter-sign": "orientation of the image of t",
    "stable-letter": "t (f_j, f_j) t^-1 = (1, f_j) in U_4",
    "fp-commute": "the two lambda-subgroups of U_4 commute",
    "fp-base": "F_2 x F_2 embeds in U_4",
    "alpha-hom": "lambda(3,1), lambda(3,2), lambda(2,1) -> tau1, tau2, sigma is a homomorphism",
}
GROUP_ALIASES = {"eq4": "lambda-conjugation", "eq5": "sigma-conjugation", "eq7": "stable-letter"}


class InputError(Exception):
    pass


def _read(arg: str) -> str:
    return sys.stdin.read() if arg == "-" else arg


def _infer_rank(text: str, kind: str) -> int:
    """Smallest rank that holds every index mentioned in ``text``."""
    tokens = dsl.tokenize(text)
    rank = 2 if kind in ("hnn", "endo") else 1
    for k, tok in enumerate(tokens[:-1]):
        if tok.kind == "f" and tokens[k + 1].kind == "int":
            rank = max(rank, tokens[k + 1].value)
        elif tok.kind in ("L", "tau") and k + 2 < len(tokens) and tokens[k + 2].kind == "int":
            rank = max(rank, tokens[k + 2].value)
    return rank


def _kind_for_auto(text: str) -> str:
    kinds = {t.kind for t in dsl.tokenize(text)}
    return "endo" if kinds & {"tau", "sigma"} else "lambda"


def _eval(text: str, kind: str, rank: int | None):
    text = _read(text)
    if rank is None:
        rank = _infer_rank(text, kind)
    return dsl.evaluate_text(text, kind, rank)


def _emit(args, value) -> None:
    if args.format == "json":
        if isinstance(value, (Word, UniTri, EndoMap, H.HnnWord)):
            payload = value.to_json()
        else:
            payload = value
        print(json.dumps(payload))
    else:
        print(value if isinstance(value, str) else str(value))


# --- commands ------------------------------------------------------------


def cmd_reduce(args) -> int:
    _emit(args, _eval(args.word, "word", args.rank))
    return EXIT_OK


def cmd_apply(args) -> int:
    auto_text = _read(args.auto)
    word_text = _read(args.word)
    kind = args.kind or _kind_for_auto(auto_text)
    rank = args.rank or max(_infer_rank(auto_text, kind), _infer_rank(word_text, "word"))
    auto = dsl.evaluate_text(auto_text, kind, rank)
    endo = auto.to_endo() if isinstance(auto, UniTri) else auto
    _emit(args, apply(endo, dsl.evaluate_text(word_text, "word", rank)))
    return EXIT_OK


def cmd_compose(args) -> int:
    texts = [_read(t) for t in args.autos]
    kinds = {args.kind} if args.kind else {_kind_for_auto(t) for t in texts}
    kind = "endo" if "endo" in kinds else "lambda"
    rank = args.rank or max(_infer_rank(t, kind) for t in texts)
    values = [dsl.evaluate_text(t, kind, rank) for t in texts]
    if kind == "lambda":
        acc = values[0]
        for v in values[1:]:
            acc = ut_compose(acc, v)
    else:
        acc = values[0]
        for v in values[1:]:
            acc = compose(acc, v)
    _emit(args, acc)
    return EXIT_OK


def cmd_invert(args) -> int:
    if (args.ut is None) == (args.word is None):
        raise InputError("give exactly one of --ut or --word")
    if args.ut is not None:
        _emit(args, ut_invert(_eval(args.ut, "lambda", args.rank)))
    else:
        _emit(args, ~_eval(args.word, "word", args.rank))
    return EXIT_OK


def cmd_ut_from_images(args) -> int:
    texts = [_read(t) for t in args.images]
    rank = args.rank or len(texts)
    if len(texts) != rank:
        raise InputError(f"expected {rank} images, got {len(texts)}")
    images = [dsl.evaluate_text(t, "word", rank) for t in texts]
    e = endo_from_images([w.letters for w in images], rank)
    phi = from_endo(e)
    if phi is None:
        _emit(args, {"unitriangular": False} if args.format == "json" else "not unitriangular")
        return EXIT_NEGATIVE
    _emit(args, phi)
    return EXIT_OK


def _corrupt_lambda(rank: int, i: int, j: int, sign: int = 1) -> UniTri:
    # negative control: f_i -> f_j^2 f_i is not a Nielsen generator
    entries = list(lambda_gen(rank, i, j, sign).tuple)
    entries[i - 2] = Word((sign * j, sign * j), rank)
    return UniTri(rank, tuple(entries))


def build_relation_report(limit: int, corrupt: bool = False) -> RelationReport:
    lam = _corrupt_lambda if corrupt else lambda_gen
    rep = check_relation_suite(limit, lam=lam)
    fp = H.verify_fp_relations(base_samples=200)
    for c in fp.report.checks:
        if c.name.startswith("exactly one orientation"):
            c = type(c)("stable-letter-sign", c.name, c.passed, c.detail)
        rep.checks.append(c)
    rep.extend(check_alpha_homomorphism())
    return rep


def cmd_check_relations(args) -> int:
    selected = None
    if args.only:
        selected = []
        for item in args.only:
            for name in item.split(","):
                name = GROUP_ALIASES.get(name.strip(), name.strip())
                if name not in GROUPS:
                    raise InputError(f"unknown group {name!r}; choose from {', '.join(GROUPS)} or eq4/eq5/eq7")
                selected.append(name)
    limit = args.limit
    rep = build_relation_report(limit, corrupt=args.corrupt_generators)
    if selected:
        rep = rep.select(selected)
    if args.format == "json":
        print(json.dumps({
            "passed": rep.passed,
            "checks": [{"group": c.group, "name": c.name, "passed": c.passed, "detail": c.detail} for c in rep.checks],
        }))
    else:
        for line in rep.lines():
            print(line)
        n_ok = sum(c.passed for c in rep.checks)
        print(f"{n_ok}/{len(rep.checks)} identities hold")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_britton(args) -> int:
    w = _eval(args.word, "hnn", args.rank or 2)
    r = H.britton_reduce(w)
    if args.check_trivial:
        trivial = not r.tail and H.pair_is_trivial(r.head)
        if args.format == "json":
            print(json.dumps({"trivial": trivial, "reduced": r.to_json()}))
        else:
            print("trivial" if trivial else f"nontrivial: {r}")
        return EXIT_OK if trivial else EXIT_NEGATIVE
    _emit(args, r)
    return EXIT_OK


def cmd_fp_image(args) -> int:
    if args.rank not in (None, 2):
        raise InputError("the map into U_4 is defined for rank-2 pairs only")
    _emit(args, H.fp_image(_eval(args.word, "hnn", 2)))
    return EXIT_OK


def cmd_fuzz(args) -> int:
    cfg = FuzzConfig(
        samples=args.samples if args.samples is not None else 1000,
        seed=args.seed if args.seed is not None else 0,
        max_length=args.max_length if args.max_length is not None else 12,
        rank=args.rank or 6,
    )
    props = None
    if args.only:
        props = [p.strip() for item in args.only for p in item.split(",")]
        unknown = [p for p in props if p not in PROPERTIES]
        if unknown:
            raise InputError(f"unknown properties {unknown}; choose from {', '.join(PROPERTIES)}")
    corpus = Path(args.corpus) if args.corpus else None
    report = run_fuzz(cfg, props, corpus=corpus, workers=args.workers)
    if args.format == "json":
        print(json.dumps(report.to_json(), sort_keys=True))
    else:
        for line in report.lines():
            print(line)
        for rec in report.replay_failures + report.failures:
            print(json.dumps(rec, sort_keys=True))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_bench(args) -> int:
    try:
        sizes = tuple(int(float(s)) for s in args.sizes.split(","))
    except ValueError:
        raise InputError(f"bad --sizes {args.sizes!r}") from None
    cases, problems = run_bench(sizes, rank=args.rank or 2, seed=args.seed or 0)
    if args.format == "json":
        print(json.dumps({
            "cases": [
                {"case": c.name, "letters": c.letters, "seconds": c.seconds,
                 "letters_per_second": c.throughput, "result_length": c.result_length}
                for c in cases
            ],
            "scaling_ok": not problems,
            "problems": problems,
        }))
    else:
        for c in cases:
            print(f"{c.name:<10} {c.letters:>10} letters  {c.seconds:8.4f} s  {c.throughput:14,.0f} letters/s  -> {c.result_length}")
        print("scaling: linear" if not problems else "\n".join(problems))
    return EXIT_OK if not problems else EXIT_FAIL


# --- argument parsing ----------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--rank", type=int, default=None, help="ambient rank (inferred when omitted)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--max-length", type=int, default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--only", action="append", default=None, help="restrict to named groups/properties")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="fgcalc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", parents=[common], help="freely reduce a word")
    p.add_argument("word", help="word text, or - for stdin")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("apply", parents=[common], help="apply an automorphism to a word")
    p.add_argument("--auto", required=True, help="lambda-word or tau/sigma word")
    p.add_argument("--word", required=True)
    p.add_argument("--kind", choices=("lambda", "endo"), default=None)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("compose", parents=[common], help="compose automorphisms, left factor first")
    p.add_argument("autos", nargs="+")
    p.add_argument("--kind", choices=("lambda", "endo"), default=None)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("invert", parents=[common], help="invert a unitriangular automorphism or a word")
    p.add_argument("--ut", default=None)
    p.add_argument("--word", default=None)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("ut-from-images", parents=[common], help="recognise a unitriangular automorphism")
    p.add_argument("images", nargs="+", help="images of f1, ..., fn")
    p.set_defaults(func=cmd_ut_from_images)

    p = sub.add_parser("check-relations", parents=[common], help="verify the relation suite")
    p.add_argument("--limit", type=int, default=6, help="largest rank for the commutator identities")
    p.add_argument("--corrupt-generators", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_check_relations)

    p = sub.add_parser("britton", parents=[common], help="Britton-reduce an HNN word")
    p.add_argument("word")
    p.add_argument("--check-trivial", action="store_true")
    p.set_defaults(func=cmd_britton)

    p = sub.add_parser("fp-image", parents=[common], help="image of an HNN word in U_4")
    p.add_argument("word")
    p.set_defaults(func=cmd_fp_image)

    p = sub.add_parser("fuzz", parents=[common], help="run the property catalog")
    p.add_argument("--corpus", default=None, help="JSONL failure corpus, replayed first and appended to")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("bench", parents=[common], help="time free reduction")
    p.add_argument("--sizes", default="1e5,1e6,1e7")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (dsl.ParseError, RankError, InputError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
