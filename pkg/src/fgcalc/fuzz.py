"""Property fuzzer over every module's invariants.

Each case is driven by its own RNG seeded from ``(property, case_seed)``, so
a failure record is enough to replay it.  Failures are stored as JSONL
records ``{property, seed, case, expected, actual, kind, rank}`` where
``case``/``expected``/``actual`` are expression-language text of the given
kind and rank.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from . import dsl
from . import hnn as H
from .morphism import EndoMap, compose, evaluate_endo_word, v3_generators
from .unitri import (
    alpha_image,
    evaluate_lambda_word,
    from_endo,
    identity_ut,
    random_lambda_word,
    random_u3_word,
    random_unitri,
    to_endo,
    ut_compose,
    ut_invert,
    U3_GENERATORS,
)
from .words import Word, random_reduced_word, reduce

Failure = Optional[dict]


@dataclass(frozen=True)
class FuzzConfig:
    samples: int = 1000
    seed: int = 0
    max_length: int = 12
    rank: int = 6

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.max_length < 0:
            raise ValueError("max-length must be >= 0")
        if self.rank < 2:
            raise ValueError("rank must be >= 2")


def _fail(kind: str, rank: int, case, expected, actual) -> dict:
    return {
        "kind": kind,
        "rank": rank,
        "case": case if isinstance(case, str) else dsl.format_value(case),
        "expected": expected if isinstance(expected, str) else dsl.format_value(expected),
        "actual": actual if isinstance(actual, str) else dsl.format_value(actual),
    }


def _raw_letters(rng: random.Random, rank: int, n: int) -> list[int]:
    return [rng.choice((1, -1)) * rng.randint(1, rank) for _ in range(n)]


def _raw_text(raw: list[int]) -> str:
    return " ".join(f"f{x}" if x > 0 else f"f{-x}^-1" for x in raw) or "e"


# --- properties: rng, config -> failure or None ----------------------------


def prop_word_idempotent(rng, cfg) -> Failure:
    rank = rng.randint(1, cfg.rank)
    raw = _raw_letters(rng, rank, rng.randint(0, 2 * cfg.max_length))
    w = reduce(raw, rank)
    again = reduce(w.letters, rank)
    if again != w:
        return _fail("word", rank, _raw_text(raw), w, again)
    return None


def prop_word_confluence(rng, cfg) -> Failure:
    rank = rng.randint(1, cfg.rank)
    raw = _raw_letters(rng, rank, rng.randint(0, 2 * cfg.max_length))
    x = rng.choice((1, -1)) * rng.randint(1, rank)
    pos = rng.randint(0, len(raw))
    bigger = raw[:pos] + [x, -x] + raw[pos:]
    if reduce(bigger, rank) != reduce(raw, rank):
        return _fail("word", rank, _raw_text(bigger), reduce(raw, rank), reduce(bigger, rank))
    return None


def prop_word_group_axioms(rng, cfg) -> Failure:
    rank = rng.randint(1, cfg.rank)
    u, v, w = (random_reduced_word(rng.randint(0, cfg.max_length), rank, rng) for _ in range(3))
    one = Word((), rank)
    case = f"({u}) ({v}) ({w})"
    if (u * v) * w != u * (v * w):
        return _fail("word", rank, case, (u * v) * w, u * (v * w))
    if u * one != u or one * u != u:
        return _fail("word", rank, case, u, u * one)
    if u * ~u != one or ~u * u != one:
        return _fail("word", rank, case, one, u * ~u)
    if len(u * v) > len(u) + len(v):
        return _fail("word", rank, case, f"length <= {len(u) + len(v)}", f"length {len(u * v)}")
    return None


def prop_endo_homomorphism(rng, cfg) -> Failure:
    rank = rng.randint(1, min(cfg.rank, 4))
    e = EndoMap(rank, tuple(random_reduced_word(rng.randint(0, 4), rank, rng) for _ in range(rank)))
    u = random_reduced_word(rng.randint(0, cfg.max_length), rank, rng)
    v = random_reduced_word(rng.randint(0, cfg.max_length), rank, rng)
    if e(u * v) != e(u) * e(v):
        return _fail("word", rank, f"({u}) ({v})", e(u) * e(v), e(u * v))
    return None


def prop_endo_associative(rng, cfg) -> Failure:
    gens = v3_generators()
    names = list(gens)
    words = [[(rng.choice(names), rng.choice((1, -1))) for _ in range(rng.randint(0, 5))] for _ in range(3)]
    a, b, c = (evaluate_endo_word(gens, w) for w in words)
    if compose(compose(a, b), c) != compose(a, compose(b, c)):
        return _fail("endo", 2, f"{dsl.format_value(a)} ; {dsl.format_value(b)} ; {dsl.format_value(c)}",
                     compose(a, compose(b, c)), compose(compose(a, b), c))
    return None


def _random_ut(rng, cfg):
    return random_unitri(rng.randint(1, cfg.rank), cfg.max_length, rng)


def prop_ut_roundtrip(rng, cfg) -> Failure:
    phi = _random_ut(rng, cfg)
    back = from_endo(to_endo(phi))
    if back != phi:
        return _fail("lambda", phi.rank, phi, phi, "not unitriangular" if back is None else back)
    return None


def prop_ut_closure(rng, cfg) -> Failure:
    phi = _random_ut(rng, cfg)
    psi = random_unitri(phi.rank, cfg.max_length, rng)
    direct = ut_compose(phi, psi)
    oracle = from_endo(compose(to_endo(phi), to_endo(psi)))
    if oracle != direct:
        return _fail("lambda", phi.rank, f"({dsl.format_value(phi)}) ({dsl.format_value(psi)})",
                     "not unitriangular" if oracle is None else oracle, direct)
    return None


def prop_ut_inverse(rng, cfg) -> Failure:
    phi = _random_ut(rng, cfg)
    inv = ut_invert(phi)
    one = identity_ut(phi.rank)
    for prod in (ut_compose(phi, inv), ut_compose(inv, phi)):
        if prod != one:
            return _fail("lambda", phi.rank, phi, one, prod)
    return None


def prop_alpha_probe(rng, cfg) -> Failure:
    w = random_u3_word(max(cfg.max_length, 1), rng)
    left = evaluate_lambda_word(3, w)
    right = alpha_image(w)
    if left.is_identity != right.is_identity():
        case = dsl.format_value(left) if w else "e"
        text = " ".join(f"L({i},{j})" + ("" if e == 1 else "^-1") for (i, j), e in w) or "e"
        return _fail("lambda", 3, text, f"trivial={left.is_identity}", f"trivial={right.is_identity()} ({case})")
    return None


def prop_alpha_homomorphism(rng, cfg) -> Failure:
    w1 = random_lambda_word(3, rng.randint(0, cfg.max_length), rng, U3_GENERATORS)
    w2 = random_lambda_word(3, rng.randint(0, cfg.max_length), rng, U3_GENERATORS)
    if alpha_image(w1 + w2) != alpha_image(w1) * alpha_image(w2):
        text = " ".join(f"L({i},{j})" + ("" if e == 1 else "^-1") for (i, j), e in w1 + w2) or "e"
        return _fail("lambda", 3, text, alpha_image(w1) * alpha_image(w2), alpha_image(w1 + w2))
    return None


def _random_hnn(rng, cfg):
    return H.random_hnn_word(rng, 2, max_t=8, max_component=min(cfg.max_length, 10))


def prop_hnn_idempotent(rng, cfg) -> Failure:
    w = _random_hnn(rng, cfg)
    r = H.britton_reduce(w)
    rr = H.britton_reduce(H.HnnWord(r.head, r.tail))
    if rr != r:
        return _fail("hnn", 2, w, r, rr)
    return None


def prop_hnn_fp_invariance(rng, cfg) -> Failure:
    w = _random_hnn(rng, cfg)
    a, b = H.fp_image(w), H.fp_image(H.britton_reduce(w))
    if a != b:
        return _fail("hnn", 2, w, a, b)
    return None


def prop_hnn_soundness(rng, cfg) -> Failure:
    # half the cases are w r w^-1 with r a product of relators, so trivial words occur
    w = _random_hnn(rng, cfg)
    if rng.random() < 0.5:
        g = random_reduced_word(rng.randint(0, 6), 2, rng)
        w = w * H.relator(g) * ~w
    if H.hnn_is_trivial(w) and not H.fp_image(w).is_identity:
        return _fail("hnn", 2, w, "e", H.fp_image(w))
    return None


def prop_hnn_relator_insertion(rng, cfg) -> Failure:
    w = _random_hnn(rng, cfg)
    if rng.random() < 0.3:
        w = w * ~w
    g = random_reduced_word(rng.randint(0, 6), 2, rng)
    r = H.relator(g) if rng.random() < 0.5 else ~H.relator(g)
    pos = rng.randint(0, w.t_count)
    bigger = H.insert_at(w, pos, r)
    if H.hnn_is_trivial(bigger) != H.hnn_is_trivial(w):
        return _fail("hnn", 2, bigger, f"trivial={H.hnn_is_trivial(w)}", f"trivial={H.hnn_is_trivial(bigger)}")
    return None


def _roundtrip(value, kind: str, rank: int) -> Failure:
    text = dsl.format_value(value)
    back = dsl.evaluate_text(text, kind, rank)
    if back != value:
        return _fail(kind, rank, text, value, back)
    return None


def prop_dsl_word(rng, cfg) -> Failure:
    rank = rng.randint(1, cfg.rank)
    return _roundtrip(random_reduced_word(rng.randint(0, cfg.max_length), rank, rng), "word", rank)


def prop_dsl_lambda(rng, cfg) -> Failure:
    phi = _random_ut(rng, cfg)
    return _roundtrip(phi, "lambda", phi.rank)


def prop_dsl_endo(rng, cfg) -> Failure:
    gens = v3_generators()
    names = list(gens)
    e = evaluate_endo_word(gens, [(rng.choice(names), rng.choice((1, -1))) for _ in range(rng.randint(0, cfg.max_length))])
    return _roundtrip(e, "endo", 2)


def prop_dsl_hnn(rng, cfg) -> Failure:
    return _roundtrip(_random_hnn(rng, cfg), "hnn", 2)


PROPERTIES: dict[str, Callable] = {
    "word-idempotent": prop_word_idempotent,
    "word-confluence": prop_word_confluence,
    "word-group-axioms": prop_word_group_axioms,
    "endo-homomorphism": prop_endo_homomorphism,
    "endo-associative": prop_endo_associative,
    "ut-roundtrip": prop_ut_roundtrip,
    "ut-closure": prop_ut_closure,
    "ut-inverse": prop_ut_inverse,
    "alpha-probe": prop_alpha_probe,
    "alpha-homomorphism": prop_alpha_homomorphism,
    "hnn-idempotent": prop_hnn_idempotent,
    "hnn-fp-invariance": prop_hnn_fp_invariance,
    "hnn-soundness": prop_hnn_soundness,
    "hnn-relator-insertion": prop_hnn_relator_insertion,
    "dsl-word": prop_dsl_word,
    "dsl-lambda": prop_dsl_lambda,
    "dsl-endo": prop_dsl_endo,
    "dsl-hnn": prop_dsl_hnn,
}


def case_seed(seed: int, index: int) -> int:
    return seed * 10_000_000 + index


def run_case(prop: str, seed: int, cfg: FuzzConfig) -> Failure:
    rng = random.Random(f"{prop}:{seed}")
    try:
        result = PROPERTIES[prop](rng, cfg)
    except Exception as exc:  # a crash is a failure of the property, not of the run
        result = {"kind": "", "rank": 0, "case": "", "expected": "no exception", "actual": repr(exc)}
    if result is None:
        return None
    return {"property": prop, "seed": seed, **result}


@dataclass
class FuzzReport:
    counts: dict[str, int] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)
    replayed: int = 0
    replay_failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and not self.replay_failures

    def merge(self, other: "FuzzReport") -> None:
        for k, v in other.counts.items():
            self.counts[k] = self.counts.get(k, 0) + v
        self.failures.extend(other.failures)
        self.failures.sort(key=lambda r: (r["property"], r["seed"]))

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "counts": dict(sorted(self.counts.items())),
            "replayed": self.replayed,
            "replay_failures": self.replay_failures,
            "failures": self.failures,
        }

    def lines(self) -> list[str]:
        out = []
        if self.replayed:
            out.append(f"replayed {self.replayed} stored failures: {len(self.replay_failures)} still failing")
        by_prop: dict[str, int] = {}
        for f in self.failures:
            by_prop[f["property"]] = by_prop.get(f["property"], 0) + 1
        for prop, n in sorted(self.counts.items()):
            bad = by_prop.get(prop, 0)
            out.append(f"{'PASS' if not bad else 'FAIL'}  {prop}: {n} cases, {bad} failures")
        return out


def _run_shard(args) -> FuzzReport:
    cfg, props, indices = args
    rep = FuzzReport()
    for prop in props:
        rep.counts[prop] = 0
        for i in indices:
            rep.counts[prop] += 1
            failure = run_case(prop, case_seed(cfg.seed, i), cfg)
            if failure is not None:
                rep.failures.append(failure)
    return rep


def load_corpus(path: Path) -> list[dict]:
    if not path.exists():
        return []
    records = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if line:
            records.append(json.loads(line))
    return records


def run_fuzz(
    cfg: FuzzConfig,
    properties: list[str] | None = None,
    corpus: Path | None = None,
    workers: int = 1,
) -> FuzzReport:
    props = sorted(properties or PROPERTIES)
    unknown = [p for p in props if p not in PROPERTIES]
    if unknown:
        raise ValueError(f"unknown properties: {', '.join(unknown)}")

    report = FuzzReport()
    stored = load_corpus(corpus) if corpus else []
    for rec in stored:
        if rec.get("property") not in PROPERTIES:
            continue
        report.replayed += 1
        failure = run_case(rec["property"], rec["seed"], cfg)
        if failure is not None:
            report.replay_failures.append(failure)

    indices = list(range(cfg.samples))
    if workers <= 1:
        report.merge(_run_shard((cfg, props, indices)))
    else:
        shards = [(cfg, props, indices[k::workers]) for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_run_shard, shards):
                report.merge(part)

    if corpus and report.failures:
        known = {(r.get("property"), r.get("seed")) for r in stored}
        with corpus.open("a") as fh:
            for rec in report.failures:
                if (rec["property"], rec["seed"]) not in known:
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return report
