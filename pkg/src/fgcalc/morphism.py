"""Endomorphisms of F_n stored as tables of generator images.

Products follow the right-action convention: ``compose(a, b)`` (also
``a * b``) applies ``a`` first and then ``b``, so that
``apply(a * b, w) == apply(b, apply(a, w))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .words import RankError, Word, _merge, embed, invert, reduce, word_from_json


@dataclass(frozen=True)
class EndoMap:
    rank: int
    images: tuple[Word, ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.rank:
            raise ValueError(f"expected {self.rank} images, got {len(self.images)}")
        for w in self.images:
            if w.rank != self.rank:
                raise RankError(f"image of rank {w.rank} in an endomorphism of F_{self.rank}")

    def __call__(self, w: Word) -> Word:
        return apply(self, w)

    def __mul__(self, other: "EndoMap") -> "EndoMap":
        return compose(self, other)

    def __str__(self) -> str:
        return format_endo(self)

    def is_identity(self) -> bool:
        return all(img.letters == (k,) for k, img in enumerate(self.images, 1))

    def to_json(self) -> dict:
        return {"rank": self.rank, "images": [list(w.letters) for w in self.images]}


def _table(e: EndoMap) -> dict[int, tuple[int, ...]]:
    table: dict[int, tuple[int, ...]] = {}
    for k, img in enumerate(e.images, 1):
        table[k] = img.letters
        table[-k] = invert(img).letters
    return table


def substitute(table: Mapping[int, Sequence[int]], letters: Sequence[int]) -> tuple[int, ...]:
    """Replace each letter by its (reduced) image and freely reduce."""
    out: list[int] = []
    for x in letters:
        _merge(out, table[x])
    return tuple(out)


def apply(e: EndoMap, w: Word) -> Word:
    if w.rank != e.rank:
        raise RankError(f"word of rank {w.rank} fed to an endomorphism of F_{e.rank}")
    return Word(substitute(_table(e), w.letters), e.rank)


def compose(a: EndoMap, b: EndoMap) -> EndoMap:
    """Apply ``a`` first, then ``b``."""
    if a.rank != b.rank:
        raise RankError(f"rank mismatch: {a.rank} vs {b.rank}")
    table = _table(b)
    return EndoMap(a.rank, tuple(Word(substitute(table, img.letters), a.rank) for img in a.images))


def identity_endo(rank: int) -> EndoMap:
    if rank < 1:
        raise RankError("rank must be positive")
    return EndoMap(rank, tuple(Word((k,), rank) for k in range(1, rank + 1)))


def inner_auto(rank: int, c: Word) -> EndoMap:
    """Conjugation ``g -> c^-1 g c``."""
    if c.rank > rank:
        raise RankError(f"conjugator of rank {c.rank} exceeds {rank}")
    c = embed(c, rank)
    ci = invert(c)
    return EndoMap(rank, tuple(ci * Word((k,), rank) * c for k in range(1, rank + 1)))


def tau(i: int, rank: int = 2) -> EndoMap:
    if not 1 <= i <= rank:
        raise RankError(f"tau({i}) needs rank >= {i}")
    return inner_auto(rank, Word((i,), rank))


def sigma(rank: int = 2, power: int = 1) -> EndoMap:
    """The automorphism fixing f1 and sending f2 to f1^power f2."""
    if rank < 2:
        raise RankError("sigma needs rank >= 2")
    sign = 1 if power >= 0 else -1
    imgs = [Word((k,), rank) for k in range(1, rank + 1)]
    imgs[1] = Word((sign,) * abs(power) + (2,), rank)
    return EndoMap(rank, tuple(imgs))


def nielsen_endo(rank: int, i: int, j: int, sign: int = 1) -> EndoMap:
    """``f_i -> f_j f_i`` (or ``f_j^-1 f_i``), all other generators fixed."""
    if not (1 <= j <= rank and 1 <= i <= rank and i != j):
        raise RankError(f"bad Nielsen indices ({i}, {j}) for rank {rank}")
    imgs = [Word((k,), rank) for k in range(1, rank + 1)]
    imgs[i - 1] = Word((sign * j, i), rank)
    return EndoMap(rank, tuple(imgs))


def evaluate_endo_word(
    generators: Mapping[str, tuple[EndoMap, EndoMap]],
    word: Sequence[tuple[str, int]],
    rank: int | None = None,
) -> EndoMap:
    """Fold a word in named automorphisms, each bound to ``(map, inverse)``."""
    if rank is None:
        if not generators:
            raise ValueError("rank is required when no generators are bound")
        rank = next(iter(generators.values()))[0].rank
    acc = identity_endo(rank)
    for name, exp in word:
        if name not in generators:
            raise KeyError(f"unbound generator {name!r}")
        if exp not in (1, -1):
            raise ValueError(f"exponent must be +1 or -1, got {exp}")
        fwd, back = generators[name]
        acc = compose(acc, fwd if exp == 1 else back)
    return acc


def v3_generators() -> dict[str, tuple[EndoMap, EndoMap]]:
    """tau1, tau2, sigma and their inverses, as automorphisms of F_2."""
    return {
        "tau1": (tau(1), inner_auto(2, Word((-1,), 2))),
        "tau2": (tau(2), inner_auto(2, Word((-2,), 2))),
        "sigma": (sigma(), sigma(power=-1)),
    }


def format_endo(e: EndoMap) -> str:
    return "; ".join(f"f{k} -> {img}" for k, img in enumerate(e.images, 1))


def endo_from_json(data: Mapping) -> EndoMap:
    try:
        rank = data["rank"]
        images = data["images"]
    except (KeyError, TypeError):
        raise ValueError('endomorphism JSON needs "rank" and "images"') from None
    if not isinstance(rank, int) or rank < 1:
        raise ValueError("rank must be a positive integer")
    return EndoMap(rank, tuple(word_from_json(img, rank) for img in images))


def endo_from_images(images: Sequence[Sequence[int]], rank: int) -> EndoMap:
    return EndoMap(rank, tuple(reduce(img, rank) for img in images))


def v3_decompose(e: EndoMap) -> tuple[int, Word]:
    """Write an element of gp(tau1, tau2, sigma) as ``sigma^k * tau_c``.

    Returns ``(k, c)``; raises ValueError when ``e`` is not in that group.
    """
    if e.rank != 2:
        raise ValueError("only automorphisms of F_2 are decomposed")
    x1, x2 = e.images[0].letters, e.images[1].letters
    half = len(x1) // 2
    if len(x1) % 2 == 0 or x1[half] != 1:
        raise ValueError("image of f1 is not a conjugate of f1")
    p = Word(x1[:half], 2)
    if x1[half + 1:] != invert(p).letters:
        raise ValueError("image of f1 is not a conjugate of f1")
    c0 = invert(p)
    y = (c0 * e.images[1] * p).letters
    try:
        mid = y.index(2)
    except ValueError:
        raise ValueError("image of f2 has the wrong shape") from None
    head, tail = y[:mid], y[mid + 1:]
    if len(set(head)) > 1 or len(set(tail)) > 1 or not set(head + tail) <= {1, -1}:
        raise ValueError("image of f2 has the wrong shape")
    a = sum(head)
    b = sum(tail)
    c = Word((1 if b > 0 else -1,) * abs(b), 2) * c0
    return a + b, c
