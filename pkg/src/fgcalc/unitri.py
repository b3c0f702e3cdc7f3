"""The unitriangular automorphism group U_n of F_n in tuple coordinates.

An element fixes f1 and sends f_i to u_i f_i with u_i in F_{i-1}; it is
stored as the tuple ``(u_2, ..., u_n)``.  Products use the same right
action as :mod:`fgcalc.morphism`: ``phi * psi`` applies ``phi`` first.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .morphism import EndoMap, compose, identity_endo, substitute, v3_generators
from .words import RankError, Word, _merge, invert, max_generator, word_from_json

LambdaWord = Sequence[tuple[tuple[int, int], int]]


@dataclass(frozen=True)
class UniTri:
    rank: int
    tuple: tuple[Word, ...]

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise RankError("rank must be positive")
        if len(self.tuple) != self.rank - 1:
            raise ValueError(f"U_{self.rank} needs {self.rank - 1} entries, got {len(self.tuple)}")
        for i, u in enumerate(self.tuple, 2):
            if u.rank != self.rank:
                raise RankError(f"entry u_{i} has rank {u.rank}, expected {self.rank}")
            if max_generator(u) >= i:
                raise ValueError(f"entry u_{i} = {u} must lie in F_{i - 1}")

    def __mul__(self, other: "UniTri") -> "UniTri":
        return ut_compose(self, other)

    def __invert__(self) -> "UniTri":
        return ut_invert(self)

    def __str__(self) -> str:
        return format_unitri(self)

    def entry(self, i: int) -> Word:
        """``u_i`` for ``2 <= i <= rank``."""
        return self.tuple[i - 2]

    @property
    def is_identity(self) -> bool:
        return not any(u.letters for u in self.tuple)

    def to_endo(self) -> EndoMap:
        return to_endo(self)

    def to_json(self) -> dict:
        return {"rank": self.rank, "tuple": [list(u.letters) for u in self.tuple]}


def identity_ut(rank: int) -> UniTri:
    return UniTri(rank, tuple(Word((), rank) for _ in range(rank - 1)))


def _from_letters(rank: int, entries: Iterable[tuple[int, ...]]) -> UniTri:
    # internal fast path: entries are known reduced and in range
    obj = object.__new__(UniTri)
    object.__setattr__(obj, "rank", rank)
    object.__setattr__(obj, "tuple", tuple(Word(e, rank) for e in entries))
    return obj


def to_endo(phi: UniTri) -> EndoMap:
    n = phi.rank
    images = [Word((1,), n)]
    for i, u in enumerate(phi.tuple, 2):
        images.append(Word(u.letters + (i,), n))
    return EndoMap(n, tuple(images))


def from_endo(e: EndoMap) -> UniTri | None:
    """Recognise a unitriangular endomorphism; None when ``e`` is not one."""
    n = e.rank
    if e.images[0].letters != (1,):
        return None
    entries = []
    for i, img in enumerate(e.images[1:], 2):
        w = img.letters
        if not w or w[-1] != i:
            return None
        prefix = w[:-1]
        if prefix and max(abs(x) for x in prefix) >= i:
            return None
        entries.append(prefix)
    return _from_letters(n, entries)


def _ut_table(psi: UniTri) -> dict[int, tuple[int, ...]]:
    table: dict[int, tuple[int, ...]] = {1: (1,), -1: (-1,)}
    for i, v in enumerate(psi.tuple, 2):
        img = v.letters + (i,)
        table[i] = img
        table[-i] = tuple(-x for x in reversed(img))
    return table


def ut_compose(phi: UniTri, psi: UniTri) -> UniTri:
    """Apply ``phi`` first, then ``psi``: entries ``psi(u_i) v_i``."""
    if phi.rank != psi.rank:
        raise RankError(f"rank mismatch: {phi.rank} vs {psi.rank}")
    table = _ut_table(psi)
    entries = []
    for u, v in zip(phi.tuple, psi.tuple):
        out = list(substitute(table, u.letters))
        _merge(out, v.letters)
        entries.append(tuple(out))
    return _from_letters(phi.rank, entries)


def ut_invert(phi: UniTri) -> UniTri:
    # v_i = psi(u_i^-1), where psi on F_{i-1} only needs v_2..v_{i-1}
    table: dict[int, tuple[int, ...]] = {1: (1,), -1: (-1,)}
    entries = []
    for i, u in enumerate(phi.tuple, 2):
        v = substitute(table, invert(u).letters)
        entries.append(v)
        img = v + (i,)
        table[i] = img
        table[-i] = tuple(-x for x in reversed(img))
    return _from_letters(phi.rank, entries)


@lru_cache(maxsize=None)
def lambda_gen(rank: int, i: int, j: int, sign: int = 1) -> UniTri:
    """The Nielsen generator ``f_i -> f_j f_i`` (sign -1 gives its inverse)."""
    if not (1 <= j < i <= rank):
        raise RankError(f"lambda({i},{j}) needs 1 <= j < i <= rank={rank}")
    entries = [()] * (rank - 1)
    entries[i - 2] = (sign * j,)
    return _from_letters(rank, entries)


LambdaFactory = Callable[[int, int, int, int], UniTri]


def evaluate_lambda_word(rank: int, word: LambdaWord, lam: LambdaFactory = lambda_gen) -> UniTri:
    acc = identity_ut(rank)
    for (i, j), exp in word:
        if exp not in (1, -1):
            raise ValueError(f"exponent must be +1 or -1, got {exp}")
        acc = ut_compose(acc, lam(rank, i, j, exp))
    return acc


def unitri_to_lambda_word(phi: UniTri) -> list[tuple[tuple[int, int], int]]:
    """A lambda-word evaluating to ``phi``.

    ``phi`` factors as ``psi_2 psi_3 ... psi_n`` where ``psi_i`` only moves
    f_i, and ``psi_i`` is ``u_i`` read in the letters lambda(i, .).
    """
    word = []
    for i, u in enumerate(phi.tuple, 2):
        word.extend(((i, abs(x)), 1 if x > 0 else -1) for x in u.letters)
    return word


def ut_commutator(g: UniTri, f: UniTri) -> UniTri:
    """``[g, f] = g f g^-1 f^-1``."""
    return ut_compose(ut_compose(ut_compose(g, f), ut_invert(g)), ut_invert(f))


def fixes(phi: UniTri, m: int) -> bool:
    """True iff ``phi`` fixes each of f_1, ..., f_m."""
    if m > phi.rank:
        raise ValueError(f"prefix {m} exceeds rank {phi.rank}")
    return all(not phi.tuple[i - 2].letters for i in range(2, m + 1))


def random_lambda_word(rank: int, length: int, rng: random.Random, gens: Sequence[tuple[int, int]] | None = None):
    if gens is None:
        gens = [(i, j) for i in range(2, rank + 1) for j in range(1, i)]
    return [(rng.choice(gens), rng.choice((1, -1))) for _ in range(length)]


def random_unitri(rank: int, max_entry: int, rng: random.Random) -> UniTri:
    from .words import random_reduced_word

    entries = []
    for i in range(2, rank + 1):
        u = random_reduced_word(rng.randint(0, max_entry), i - 1, rng)
        entries.append(u.letters)
    return _from_letters(rank, entries)


def gamma_sample(rank: int, k: int, count: int, seed: int | None = None, max_word: int = 4) -> list[UniTri]:
    """Left-normed commutators ``[...[[x1, x2], x3]..., xk]`` of random lambda-words."""
    if k < 1:
        raise ValueError("weight must be at least 1")
    if rank < 2:
        return [identity_ut(rank) for _ in range(count)]
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        xs = [evaluate_lambda_word(rank, random_lambda_word(rank, rng.randint(1, max_word), rng)) for _ in range(k)]
        acc = xs[0]
        for x in xs[1:]:
            acc = ut_commutator(acc, x)
        out.append(acc)
    return out


# --- the U_3 -> Aut(F_2) embedding ---------------------------------------

ALPHA = {(3, 1): "tau1", (3, 2): "tau2", (2, 1): "sigma"}


def alpha_image(word: LambdaWord) -> EndoMap:
    """Send lambda(3,1), lambda(3,2), lambda(2,1) to tau1, tau2, sigma."""
    gens = _v3()
    acc = identity_endo(2)
    for (i, j), exp in word:
        try:
            fwd, back = gens[ALPHA[(i, j)]]
        except KeyError:
            raise ValueError(f"lambda({i},{j}) is not a generator of U_3") from None
        acc = compose(acc, fwd if exp == 1 else back)
    return acc


@lru_cache(maxsize=1)
def _v3():
    return v3_generators()


U3_GENERATORS = ((3, 1), (3, 2), (2, 1))
_U3_RELATORS = (
    # lambda(3,1) and lambda(2,1) commute
    [((3, 1), 1), ((2, 1), 1), ((3, 1), -1), ((2, 1), -1)],
    # lambda(2,1)^-1 lambda(3,2) lambda(2,1) (lambda(3,1) lambda(3,2))^-1
    [((2, 1), -1), ((3, 2), 1), ((2, 1), 1), ((3, 2), -1), ((3, 1), -1)],
)


def _inverse_word(word):
    return [(g, -e) for g, e in reversed(word)]


def random_u3_word(max_length: int, rng: random.Random):
    """A random lambda-word over U_3; half of them are built to be trivial."""
    if rng.random() < 0.5:
        return random_lambda_word(3, rng.randint(0, max_length), rng, U3_GENERATORS)
    # x r1 x^-1 ... : conjugated relators, then cut to the length bound
    word: list = []
    while True:
        x = random_lambda_word(3, rng.randint(0, 4), rng, U3_GENERATORS)
        r = rng.choice(_U3_RELATORS)
        if rng.random() < 0.5:
            r = _inverse_word(r)
        piece = x + list(r) + _inverse_word(x)
        if len(word) + len(piece) > max_length:
            break
        word.extend(piece)
    return word


@dataclass
class ProbeReport:
    samples: int = 0
    trivial_both: int = 0
    nontrivial_both: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def alpha_faithfulness_probe(samples: int, max_length: int = 30, seed: int | None = None) -> ProbeReport:
    rng = random.Random(seed)
    report = ProbeReport()
    for _ in range(samples):
        w = random_u3_word(max_length, rng)
        left = evaluate_lambda_word(3, w).is_identity
        right = alpha_image(w).is_identity()
        report.samples += 1
        if left != right:
            report.mismatches.append(w)
        elif left:
            report.trivial_both += 1
        else:
            report.nontrivial_both += 1
    return report


# --- relation suite ------------------------------------------------------


@dataclass(frozen=True)
class RelationCheck:
    group: str
    name: str
    passed: bool
    detail: str = ""


@dataclass
class RelationReport:
    checks: list[RelationCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, group: str, name: str, lhs, rhs) -> None:
        ok = lhs == rhs
        detail = "" if ok else f"lhs={lhs} rhs={rhs}"
        self.checks.append(RelationCheck(group, name, ok, detail))

    def extend(self, other: "RelationReport") -> None:
        self.checks.extend(other.checks)

    def select(self, groups: Iterable[str]) -> "RelationReport":
        groups = set(groups)
        return RelationReport([c for c in self.checks if c.group in groups])

    def lines(self) -> list[str]:
        return [
            f"{'PASS' if c.passed else 'FAIL'}  [{c.group}] {c.name}" + (f"  {c.detail}" if c.detail else "")
            for c in self.checks
        ]


def _lam_name(i: int, j: int, e: int = 1) -> str:
    return f"L({i},{j})" + ("^-1" if e == -1 else "")


def check_relation_suite(limit: int = 6, lam: LambdaFactory = lambda_gen) -> RelationReport:
    if limit < 4:
        raise ValueError("rank limit must be at least 4")
    rep = RelationReport()

    def ev(rank, word):
        return evaluate_lambda_word(rank, word, lam)

    # conjugation action of lambda(2,1) on gp(lambda(3,1), lambda(3,2)) in U_3
    rep.add(
        "lambda-conjugation",
        "L(2,1)^-1 L(3,1) L(2,1) = L(3,1)",
        ev(3, [((2, 1), -1), ((3, 1), 1), ((2, 1), 1)]),
        ev(3, [((3, 1), 1)]),
    )
    rep.add(
        "lambda-conjugation",
        "L(2,1)^-1 L(3,2) L(2,1) = L(3,1) L(3,2)",
        ev(3, [((2, 1), -1), ((3, 2), 1), ((2, 1), 1)]),
        ev(3, [((3, 1), 1), ((3, 2), 1)]),
    )

    # the matching action of sigma on tau1, tau2 in Aut(F_2)
    g = _v3()
    t1, t2, s = g["tau1"][0], g["tau2"][0], g["sigma"]
    rep.add("sigma-conjugation", "sigma^-1 tau1 sigma = tau1", s[1] * t1 * s[0], t1)
    rep.add("sigma-conjugation", "sigma^-1 tau2 sigma = tau1 tau2", s[1] * t2 * s[0], t1 * t2)

    # [lambda(i,j), lambda(j,k)] = lambda(i,k)
    for i in range(3, limit + 1):
        for j in range(2, i):
            for k in range(1, j):
                lhs = ev(limit, [((i, j), 1), ((j, k), 1), ((i, j), -1), ((j, k), -1)])
                rep.add(
                    "lambda-commutator",
                    f"[{_lam_name(i, j)}, {_lam_name(j, k)}] = {_lam_name(i, k)}",
                    lhs,
                    ev(limit, [((i, k), 1)]),
                )

    # generators with no shared chain commute
    gens = [(i, j) for i in range(2, limit + 1) for j in range(1, i)]
    for a, b in gens:
        for c, d in gens:
            if (a, b) >= (c, d) or a == c or b == c or d == a:
                continue
            lhs = ev(limit, [((a, b), 1), ((c, d), 1), ((a, b), -1), ((c, d), -1)])
            rep.add("disjoint-commute", f"[{_lam_name(a, b)}, {_lam_name(c, d)}] = e", lhs, identity_ut(limit))

    # one-relator presentation: [[a, b], b] = 1 with a = lambda(3,2), b = lambda(2,1)
    a = ev(3, [((3, 2), 1)])
    b = ev(3, [((2, 1), 1)])
    rep.add("hydra", "[[L(3,2), L(2,1)], L(2,1)] = e", ut_commutator(ut_commutator(a, b), b), identity_ut(3))
    return rep


def check_alpha_homomorphism(samples: int = 200, max_length: int = 12, seed: int | None = 0) -> RelationReport:
    rep = RelationReport()
    for g in U3_GENERATORS:
        for e in (1, -1):
            w = [(g, e)]
            rep.add("alpha-hom", f"alpha({_lam_name(*g, e)}) inverts", alpha_image(w + _inverse_word(w)), identity_endo(2))
    rng = random.Random(seed)
    bad = 0
    for _ in range(samples):
        w1 = random_lambda_word(3, rng.randint(0, max_length), rng, U3_GENERATORS)
        w2 = random_lambda_word(3, rng.randint(0, max_length), rng, U3_GENERATORS)
        if alpha_image(w1 + w2) != alpha_image(w1) * alpha_image(w2):
            bad += 1
    rep.checks.append(
        RelationCheck("alpha-hom", f"alpha(w1 w2) = alpha(w1) alpha(w2) on {samples} random pairs", bad == 0,
                      f"{bad} failures" if bad else "")
    )
    return rep


# --- text and JSON -------------------------------------------------------


def format_unitri(phi: UniTri) -> str:
    return "(" + ", ".join(str(u) for u in phi.tuple) + ")"


def unitri_from_json(data) -> UniTri:
    try:
        rank = data["rank"]
        entries = data["tuple"]
    except (KeyError, TypeError):
        raise ValueError('unitriangular JSON needs "rank" and "tuple"') from None
    if not isinstance(rank, int) or rank < 1:
        raise ValueError("rank must be a positive integer")
    return UniTri(rank, tuple(word_from_json(u, rank) for u in entries))


def lambda_word_to_json(word: LambdaWord) -> list[list[int]]:
    return [[i, j, e] for (i, j), e in word]


def lambda_word_from_json(data) -> list[tuple[tuple[int, int], int]]:
    try:
        return [((int(i), int(j)), int(e)) for i, j, e in data]
    except (TypeError, ValueError):
        raise ValueError("lambda-word JSON must be a list of [i, j, e] triples") from None
