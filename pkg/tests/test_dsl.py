import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgcalc import dsl
from fgcalc import hnn as H
from fgcalc.dsl import Commutator, Context, GenRef, HnnLit, Inverse, ParseError, Power, Product, WordLit
from fgcalc.morphism import evaluate_endo_word, v3_generators
from fgcalc.unitri import lambda_gen, random_unitri, ut_compose
from fgcalc.words import Word, parse_word, random_reduced_word


def test_parse_examples():
    assert dsl.parse("f1 f2^-1", "word", 2) == Product((GenRef("f", (1,)), Inverse(GenRef("f", (2,)))))
    assert dsl.parse("[L(3,2), L(2,1)]", "lambda", 3) == Commutator(GenRef("L", (3, 2)), GenRef("L", (2, 1)))
    expr = dsl.parse("t (f1|f1) t^-1", "hnn", 2)
    lit = HnnLit(GenRef("f", (1,)), GenRef("f", (1,)))
    assert expr == Product((GenRef("t"), lit, Inverse(GenRef("t"))))
    assert dsl.parse("f1^3", "word", 2) == Power(GenRef("f", (1,)), 3)
    assert dsl.parse("e", "word", 1) == WordLit(())


def test_kind_aliases():
    assert Context("lambda-word", 3).kind == "lambda"
    with pytest.raises(ValueError):
        Context("matrix", 2)


def test_eval_examples():
    assert dsl.evaluate_text("e", "word", 2) == Word((), 2)
    got = dsl.evaluate_text("L(2,1)^-1 L(3,2) L(2,1)", "lambda", 3)
    assert got == ut_compose(lambda_gen(3, 3, 1), lambda_gen(3, 3, 2))
    assert dsl.evaluate_text("f1^3", "word", 2) == parse_word("f1 f1 f1", 2)
    assert dsl.evaluate_text("f1^-3 f1^2", "word", 2) == parse_word("f1^-1", 2)
    assert dsl.evaluate_text("[f1, f2]", "word", 2) == parse_word("f1 f2 f1^-1 f2^-1", 2)
    assert dsl.evaluate_text("(f1 f2)^-1", "word", 2) == parse_word("f2^-1 f1^-1", 2)
    assert dsl.evaluate_text("f1^0", "word", 2) == Word((), 2)


def test_eval_endo_and_hnn():
    g = v3_generators()
    assert dsl.evaluate_text("sigma^-1 tau(2) sigma", "endo", 2) == evaluate_endo_word(g, [("tau1", 1), ("tau2", 1)])
    assert dsl.evaluate_text("(sigma tau(1))^-1 sigma tau(1)", "endo", 2).is_identity()
    w = dsl.evaluate_text("t (f1|f1) t^-1", "hnn", 2)
    assert w.t_count == 2 and H.britton_reduce(w).head == H.PairElem(Word((), 2), parse_word("f1", 2))
    assert dsl.evaluate_text("[(f1|e), (e|f2)]", "hnn", 2).t_count == 0
    assert H.hnn_is_trivial(dsl.evaluate_text("[(f1|e), (e|f2)]", "hnn", 2))
    # grouping in hnn-words is distinguished from pairs by the bar
    assert dsl.evaluate_text("(t (f1|e))^2", "hnn", 2).t_count == 2


@pytest.mark.parametrize(
    "text, kind, rank, line, col",
    [
        ("f3", "word", 2, 1, 2),
        ("f1 (", "word", 2, 1, 5),
        ("L(2,3)", "lambda", 3, 1, 1),
        ("L(2,1)", "word", 3, 1, 1),
        ("f1 | f2", "word", 2, 1, 4),
        ("t", "word", 2, 1, 1),
        ("f1\n  f2 ?", "word", 2, 2, 6),
        ("(f1 | f2)", "word", 2, 1, 5),
        ("sigma", "endo", 1, 1, 1),
        ("f0", "word", 2, 1, 2),
        ("f1^", "word", 2, 1, 4),
        ("", "word", 2, 1, 1),
        ("[f1 f2]", "word", 2, 1, 7),
        ("f1^99999999", "word", 2, 1, 4),
        ("(" * 300 + "f1" + ")" * 300, "word", 2, 1, 201),
        (b"f1 \xff", "word", 2, 1, 4),
    ],
)
def test_positioned_errors(text, kind, rank, line, col):
    with pytest.raises(ParseError) as info:
        dsl.parse(text, kind, rank)
    assert (info.value.line, info.value.column) == (line, col)
    assert str(info.value).startswith(f"line {line}, column {col}:")


@given(st.binary(max_size=60))
@settings(max_examples=500)
def test_arbitrary_bytes_never_crash(data):
    for kind in ("word", "lambda", "endo", "hnn"):
        try:
            dsl.parse(data, kind, 4)
        except ParseError as exc:
            assert exc.line >= 1 and exc.column >= 1


token_soup = st.lists(
    st.sampled_from(["f1", "f2", "f9", "e", "t", "L(2,1)", "tau(1)", "sigma", "(", ")", "[", "]", ",", "|", "^", "-1", "2", " "]),
    max_size=25,
).map("".join)


@given(token_soup)
@settings(max_examples=500)
def test_token_soup_never_crashes(text):
    for kind in ("word", "lambda", "endo", "hnn"):
        try:
            expr = dsl.parse(text, kind, 3)
        except ParseError:
            continue
        dsl.evaluate(expr, Context(kind, 3))


def test_format_round_trip_each_kind():
    rng = random.Random(12)
    g = v3_generators()
    names = list(g)
    for _ in range(200):
        w = random_reduced_word(rng.randint(0, 10), 3, rng)
        assert dsl.evaluate_text(dsl.format_value(w), "word", 3) == w
        phi = random_unitri(rng.randint(1, 5), 6, rng)
        assert dsl.evaluate_text(dsl.format_value(phi), "lambda", phi.rank) == phi
        e = evaluate_endo_word(g, [(rng.choice(names), rng.choice((1, -1))) for _ in range(rng.randint(0, 8))])
        assert dsl.evaluate_text(dsl.format_value(e), "endo", 2) == e
        h = H.random_hnn_word(rng)
        assert dsl.evaluate_text(dsl.format_value(h), "hnn", 2) == h


def test_format_examples():
    assert dsl.format_value(lambda_gen(3, 3, 1)) == "L(3,1)"
    assert dsl.format_value(Word((), 2)) == "e"
    assert dsl.format_value(dsl.evaluate_text("sigma^-2 tau(1)", "endo", 2)) == "sigma^-2 tau(1)"
