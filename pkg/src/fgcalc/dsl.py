"""Expression language for words, automorphism words and HNN words.

Grammar::

    word  := term { term }
    term  := atom [ "^" integer ]
    atom  := "e" | "f" index | "L(" i "," j ")" | "tau(" i ")" | "sigma" | "t"
           | "(" word ")" | "[" word "," word "]" | "(" word "|" word ")"

Juxtaposition is the product, ``[u, v]`` is ``u v u^-1 v^-1``.  Which
atoms are legal depends on the kind being parsed: ``f`` in words (and
inside HNN pairs), ``L`` in lambda-words, ``tau``/``sigma`` in
endo-words, ``t`` and pairs in HNN words.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from . import hnn as H
from .morphism import EndoMap, identity_endo, inner_auto, sigma, tau, v3_decompose
from .unitri import UniTri, identity_ut, lambda_gen, unitri_to_lambda_word, ut_compose, ut_invert
from .words import Word, format_word

KINDS = ("word", "lambda", "endo", "hnn")
_KIND_ALIASES = {"lambda-word": "lambda", "endo-word": "endo", "hnn-word": "hnn"}

MAX_DEPTH = 200
MAX_EXPONENT = 10**6


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Context:
    kind: str = "word"
    rank: int = 2

    def __post_init__(self) -> None:
        kind = _KIND_ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.rank < 1:
            raise ValueError("rank must be positive")


# --- syntax tree ---------------------------------------------------------


@dataclass(frozen=True)
class WordLit:
    letters: tuple[int, ...] = ()


@dataclass(frozen=True)
class GenRef:
    name: str
    indices: tuple[int, ...] = ()


@dataclass(frozen=True)
class Product:
    items: tuple["Expr", ...]


@dataclass(frozen=True)
class Inverse:
    expr: "Expr"


@dataclass(frozen=True)
class Power:
    expr: "Expr"
    exponent: int


@dataclass(frozen=True)
class Commutator:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class HnnLit:
    left: "Expr"
    right: "Expr"


Expr = Union[WordLit, GenRef, Product, Inverse, Power, Commutator, HnnLit]


# --- tokenizer -----------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>-?\d+)
  | (?P<name>tau|sigma|[eftL])
  | (?P<punct>[()\[\],|^])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int
    value: int = field(default=0, compare=False)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "ws":
            for k, ch in enumerate(chunk):
                if ch == "\n":
                    line += 1
                    line_start = pos + k + 1
        elif kind == "int":
            tokens.append(Token("int", chunk, line, col, int(chunk)))
        elif kind == "name":
            tokens.append(Token(chunk, chunk, line, col))
        else:
            tokens.append(Token(chunk, chunk, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def _decode(data: str | bytes) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        head = data[: exc.start]
        line = head.count(b"\n") + 1
        col = exc.start - (head.rfind(b"\n") + 1) + 1
        raise ParseError("input is not valid UTF-8", line, col) from None


# --- parser --------------------------------------------------------------

_STOP = {")", "]", ",", "|", "eof"}


class _Parser:
    def __init__(self, tokens: list[Token], ctx: Context):
        self.toks = tokens
        self.i = 0
        self.ctx = ctx
        self.depth = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def advance(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {kind!r}, found {found!r}")
        return self.advance()

    def integer(self, what: str) -> Token:
        if self.tok.kind != "int":
            raise self.error(f"expected {what}")
        return self.advance()

    def word(self, kind: str) -> Expr:
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise self.error("expression nested too deeply")
        items = []
        while self.tok.kind not in _STOP:
            items.append(self.term(kind))
        self.depth -= 1
        if not items:
            raise self.error("expected a term (write 'e' for the identity)")
        return items[0] if len(items) == 1 else Product(tuple(items))

    def term(self, kind: str) -> Expr:
        atom = self.atom(kind)
        if self.tok.kind != "^":
            return atom
        self.advance()
        tok = self.integer("an integer exponent")
        k = tok.value
        if abs(k) > MAX_EXPONENT:
            raise self.error(f"exponent {k} exceeds {MAX_EXPONENT}", tok)
        if k == -1:
            return Inverse(atom)
        return Power(atom, k)

    def _kind_gate(self, tok: Token, allowed: str, kind: str) -> None:
        if kind != allowed:
            where = {"word": "words", "lambda": "lambda-words", "endo": "endo-words", "hnn": "hnn-words"}[allowed]
            raise self.error(f"'{tok.text}' is only allowed in {where}", tok)

    def atom(self, kind: str) -> Expr:
        tok = self.tok
        rank = self.ctx.rank
        if tok.kind == "e":
            self.advance()
            return WordLit(())
        if tok.kind == "f":
            self._kind_gate(tok, "word", kind)
            self.advance()
            idx = self.integer("a generator index after 'f'")
            k = idx.value
            if idx.text.startswith("-") or k < 1:
                raise self.error("generator indices start at 1", idx)
            if k > rank:
                raise self.error(f"f{k} exceeds rank {rank}", idx)
            return GenRef("f", (k,))
        if tok.kind == "L":
            self._kind_gate(tok, "lambda", kind)
            self.advance()
            self.expect("(")
            i = self.integer("an index").value
            self.expect(",")
            jt = self.integer("an index")
            self.expect(")")
            j = jt.value
            if not (1 <= j < i <= rank):
                raise self.error(f"L({i},{j}) needs 1 <= j < i <= rank={rank}", tok)
            return GenRef("L", (i, j))
        if tok.kind == "tau":
            self._kind_gate(tok, "endo", kind)
            self.advance()
            self.expect("(")
            i = self.integer("an index").value
            self.expect(")")
            if not 1 <= i <= rank:
                raise self.error(f"tau({i}) needs 1 <= i <= rank={rank}", tok)
            return GenRef("tau", (i,))
        if tok.kind == "sigma":
            self._kind_gate(tok, "endo", kind)
            if rank < 2:
                raise self.error("sigma needs rank >= 2", tok)
            self.advance()
            return GenRef("sigma")
        if tok.kind == "t":
            self._kind_gate(tok, "hnn", kind)
            self.advance()
            return GenRef("t")
        if tok.kind == "[":
            self.advance()
            left = self.word(kind)
            self.expect(",")
            right = self.word(kind)
            self.expect("]")
            return Commutator(left, right)
        if tok.kind == "(":
            self.advance()
            if kind == "hnn" and self._pair_ahead():
                left = self.word("word")
                self.expect("|")
                right = self.word("word")
                self.expect(")")
                return HnnLit(left, right)
            inner = self.word(kind)
            if self.tok.kind == "|":
                raise self.error("pairs '(u | v)' are only allowed in hnn-words")
            self.expect(")")
            return inner
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}")

    def _pair_ahead(self) -> bool:
        depth = 0
        for tok in self.toks[self.i:]:
            if tok.kind in ("(", "["):
                depth += 1
            elif tok.kind in (")", "]"):
                if depth == 0:
                    return False
                depth -= 1
            elif tok.kind == "|" and depth == 0:
                return True
            elif tok.kind == "eof":
                return False
        return False


def parse(text: str | bytes, ctx: Context | str = "word", rank: int | None = None) -> Expr:
    """Parse ``text`` into an expression tree; raises :class:`ParseError`."""
    if isinstance(ctx, str):
        ctx = Context(ctx, rank if rank is not None else 2)
    p = _Parser(tokenize(_decode(text)), ctx)
    expr = p.word(ctx.kind)
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r}")
    return expr


# --- evaluation ----------------------------------------------------------


class _Ops:
    def __init__(self, ctx: Context):
        self.ctx = ctx
        n = ctx.rank
        if ctx.kind == "word":
            self.one = Word((), n)
        elif ctx.kind == "lambda":
            self.one = identity_ut(n)
        elif ctx.kind == "endo":
            # endomorphisms are carried with their inverses
            e = identity_endo(n)
            self.one = (e, e)
        else:
            self.one = H.HnnWord(H.pair_identity(n))

    def mul(self, a, b):
        kind = self.ctx.kind
        if kind == "lambda":
            return ut_compose(a, b)
        if kind == "endo":
            return (a[0] * b[0], b[1] * a[1])
        return a * b

    def inv(self, a):
        kind = self.ctx.kind
        if kind == "lambda":
            return ut_invert(a)
        if kind == "endo":
            return (a[1], a[0])
        return ~a

    def power(self, a, k: int):
        if k < 0:
            a, k = self.inv(a), -k
        result = self.one
        while k:
            if k & 1:
                result = self.mul(result, a)
            k >>= 1
            if k:
                a = self.mul(a, a)
        return result

    def gen(self, ref: GenRef):
        n = self.ctx.rank
        if ref.name == "f":
            return Word(ref.indices, n)
        if ref.name == "L":
            return lambda_gen(n, *ref.indices)
        if ref.name == "tau":
            (i,) = ref.indices
            return (tau(i, n), inner_auto(n, Word((-i,), n)))
        if ref.name == "sigma":
            return (sigma(n), sigma(n, -1))
        if ref.name == "t":
            return H.stable_letter(n)
        raise ValueError(f"unknown generator {ref.name!r}")


def _eval(expr: Expr, ops: _Ops):
    if isinstance(expr, WordLit):
        if ops.ctx.kind == "word":
            return Word(expr.letters, ops.ctx.rank)
        if expr.letters:
            raise ValueError("word literal outside a word context")
        return ops.one
    if isinstance(expr, GenRef):
        return ops.gen(expr)
    if isinstance(expr, Product):
        acc = ops.one
        for item in expr.items:
            acc = ops.mul(acc, _eval(item, ops))
        return acc
    if isinstance(expr, Inverse):
        return ops.inv(_eval(expr.expr, ops))
    if isinstance(expr, Power):
        return ops.power(_eval(expr.expr, ops), expr.exponent)
    if isinstance(expr, Commutator):
        a = _eval(expr.left, ops)
        b = _eval(expr.right, ops)
        return ops.mul(ops.mul(ops.mul(a, b), ops.inv(a)), ops.inv(b))
    if isinstance(expr, HnnLit):
        if ops.ctx.kind != "hnn":
            raise ValueError("pair literal outside an hnn-word")
        sub = _Ops(Context("word", ops.ctx.rank))
        return H.hnn_from_pair(H.PairElem(_eval(expr.left, sub), _eval(expr.right, sub)))
    raise TypeError(f"not an expression: {expr!r}")


def evaluate(expr: Expr, ctx: Context | str = "word", rank: int | None = None):
    """Evaluate to a Word, UniTri, EndoMap or HnnWord according to the kind."""
    if isinstance(ctx, str):
        ctx = Context(ctx, rank if rank is not None else 2)
    value = _eval(expr, _Ops(ctx))
    if ctx.kind == "endo":
        return value[0]
    return value


def evaluate_text(text: str | bytes, kind: str = "word", rank: int = 2):
    ctx = Context(kind, rank)
    return evaluate(parse(text, ctx), ctx)


# --- formatting ----------------------------------------------------------


def _power_text(atom: str, k: int) -> str:
    return atom if k == 1 else f"{atom}^{k}"


def format_value(value) -> str:
    """Text that parses (in the matching kind) back to ``value``."""
    if isinstance(value, Word):
        return format_word(value)
    if isinstance(value, UniTri):
        word = unitri_to_lambda_word(value)
        if not word:
            return "e"
        return " ".join(f"L({i},{j})" + ("" if e == 1 else "^-1") for (i, j), e in word)
    if isinstance(value, EndoMap):
        k, c = v3_decompose(value)
        parts = [_power_text("sigma", k)] if k else []
        parts += [f"tau({abs(x)})" + ("" if x > 0 else "^-1") for x in c.letters]
        return " ".join(parts) or "e"
    if isinstance(value, H.HnnWord):
        return H.format_hnn(value)
    if isinstance(value, H.PairElem):
        return str(value)
    raise TypeError(f"cannot format {type(value).__name__}")


def kind_of(value) -> str:
    if isinstance(value, Word):
        return "word"
    if isinstance(value, UniTri):
        return "lambda"
    if isinstance(value, EndoMap):
        return "endo"
    if isinstance(value, H.HnnWord):
        return "hnn"
    raise TypeError(f"no expression kind for {type(value).__name__}")
