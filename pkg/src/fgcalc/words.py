"""Freely reduced words in a free group F_n of explicit rank.

Letters are encoded as nonzero signed integers: ``+k`` is the generator
``f_k`` and ``-k`` its inverse.  This is also the JSON interchange format.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, Union


class RankError(ValueError):
    """A letter or operand does not fit the ambient rank."""


class Letter(NamedTuple):
    gen: int
    sign: int = 1

    @property
    def code(self) -> int:
        return self.gen * self.sign

    @classmethod
    def from_code(cls, code: int) -> "Letter":
        return cls(abs(code), 1 if code > 0 else -1)


RawLetter = Union[int, Letter]


def _code(x: RawLetter) -> int:
    if isinstance(x, Letter):
        if x.gen < 1 or x.sign not in (1, -1):
            raise ValueError(f"bad letter {x!r}")
        return x.gen * x.sign
    if x == 0:
        raise ValueError("0 is not a letter")
    return int(x)


def _check_rank(rank: int) -> None:
    if rank < 1:
        raise RankError(f"rank must be positive, got {rank}")


def _stack_reduce(codes: Iterable[int]) -> list[int]:
    out: list[int] = []
    push = out.append
    pop = out.pop
    for x in codes:
        if out and out[-1] == -x:
            pop()
        else:
            push(x)
    return out


def _merge(out: list[int], seg: Sequence[int]) -> None:
    """Append reduced ``seg`` to reduced ``out`` in place, cancelling at the seam."""
    k = 0
    n = len(seg)
    while k < n and out and out[-1] == -seg[k]:
        out.pop()
        k += 1
    if k:
        out.extend(seg[k:])
    else:
        out.extend(seg)


@dataclass(frozen=True)
class Word:
    """An element of F_rank as a freely reduced letter tuple.

    The constructor trusts its input; use :func:`reduce` for raw sequences.
    """

    letters: tuple[int, ...]
    rank: int

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        # the identity is falsy, like an empty container
        return bool(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else invert(self)
        out: list[int] = []
        for _ in range(abs(k)):
            _merge(out, base.letters)
        return Word(tuple(out), self.rank)

    def __str__(self) -> str:
        return format_word(self)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def embed(self, new_rank: int) -> "Word":
        return embed(self, new_rank)

    def to_json(self) -> list[int]:
        return list(self.letters)


def identity(rank: int) -> Word:
    _check_rank(rank)
    return Word((), rank)


def generator(k: int, rank: int, sign: int = 1) -> Word:
    if not 1 <= k <= rank:
        raise RankError(f"f{k} is not a generator of F_{rank}")
    return Word((k * sign,), rank)


def reduce(raw: Iterable[RawLetter], rank: int) -> Word:
    """Free reduction of ``raw`` to the unique reduced word in F_rank."""
    _check_rank(rank)
    codes = list(raw)
    if not all(type(x) is int for x in codes):
        codes = [_code(x) for x in codes]
    elif 0 in codes:
        raise ValueError("0 is not a letter")
    if codes and max(max(codes), -min(codes)) > rank:
        bad = next(c for c in codes if abs(c) > rank)
        raise RankError(f"letter f{abs(bad)} exceeds rank {rank}")
    return Word(tuple(_stack_reduce(codes)), rank)


def _same_rank(u: Word, v: Word) -> None:
    if u.rank != v.rank:
        raise RankError(f"rank mismatch: {u.rank} vs {v.rank}")


def multiply(u: Word, v: Word) -> Word:
    _same_rank(u, v)
    out = list(u.letters)
    _merge(out, v.letters)
    return Word(tuple(out), u.rank)


def invert(u: Word) -> Word:
    return Word(tuple(-x for x in reversed(u.letters)), u.rank)


def commutator(g: Word, f: Word) -> Word:
    """``[g, f] = g f g^-1 f^-1``."""
    _same_rank(g, f)
    out = list(g.letters)
    _merge(out, f.letters)
    _merge(out, invert(g).letters)
    _merge(out, invert(f).letters)
    return Word(tuple(out), g.rank)


def max_generator(u: Word) -> int:
    return max((abs(x) for x in u.letters), default=0)


def embed(u: Word, new_rank: int) -> Word:
    """Widen ``u`` into F_new_rank; ranks only ever increase."""
    if new_rank < u.rank:
        raise RankError(f"cannot narrow rank {u.rank} to {new_rank}")
    return Word(u.letters, new_rank)


def restrict(u: Word, new_rank: int) -> Word:
    """Narrow ``u`` into F_new_rank, which must contain it."""
    if max_generator(u) > new_rank:
        raise RankError(f"word uses f{max_generator(u)}, not in F_{new_rank}")
    _check_rank(new_rank)
    return Word(u.letters, new_rank)


def random_reduced_word(length: int, rank: int, seed: int | random.Random | None = None) -> Word:
    """A uniformly random reduced word of exactly ``length`` letters."""
    _check_rank(rank)
    if length < 0:
        raise ValueError("length must be non-negative")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    alphabet = [k for k in range(1, rank + 1)] + [-k for k in range(1, rank + 1)]
    out: list[int] = []
    for _ in range(length):
        if not out:
            out.append(rng.choice(alphabet))
            continue
        # 2*rank - 1 non-cancelling choices: skip the inverse of the last letter
        x = rng.randrange(2 * rank - 1)
        y = alphabet[x]
        if y == -out[-1]:
            y = alphabet[-1]
        out.append(y)
    return Word(tuple(out), rank)


# --- text and JSON -------------------------------------------------------

_TOKEN = re.compile(r"f(\d+)(\^-1)?|e")


def format_word(u: Word) -> str:
    if not u.letters:
        return "e"
    return " ".join(f"f{x}" if x > 0 else f"f{-x}^-1" for x in u.letters)


def parse_word(text: str, rank: int) -> Word:
    """Parse the plain text format (``f2 f1^-1``, ``e``).

    The expression language in :mod:`fgcalc.dsl` accepts a superset.
    """
    codes: list[int] = []
    tokens = text.split()
    if not tokens:
        raise ValueError("empty input; the identity is written 'e'")
    for tok in tokens:
        m = _TOKEN.fullmatch(tok)
        if m is None:
            raise ValueError(f"bad letter {tok!r}")
        if tok == "e":
            continue
        k = int(m.group(1))
        if k == 0:
            raise ValueError("generators are numbered from 1")
        codes.append(-k if m.group(2) else k)
    return reduce(codes, rank)


def word_from_json(data: Sequence[int], rank: int) -> Word:
    if not isinstance(data, (list, tuple)) or not all(
        isinstance(x, int) and not isinstance(x, bool) for x in data
    ):
        raise ValueError("word JSON must be an array of nonzero integers")
    return reduce(data, rank)
