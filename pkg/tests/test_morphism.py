import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fgcalc.morphism import (
    EndoMap,
    apply,
    compose,
    endo_from_json,
    evaluate_endo_word,
    identity_endo,
    inner_auto,
    nielsen_endo,
    sigma,
    tau,
    v3_decompose,
    v3_generators,
)
from fgcalc.words import RankError, Word, parse_word, random_reduced_word, reduce

from oracles import compose_images, substitute


def W(text, rank=2):
    return parse_word(text, rank)


words2 = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=20).map(lambda r: reduce(r, 2))


def test_apply_examples():
    assert apply(nielsen_endo(2, 2, 1), W("f2")) == W("f1 f2")
    w = W("f2 f1^-1 f2")
    assert apply(identity_endo(2), w) == w
    assert apply(tau(1), W("f2")) == W("f1^-1 f2 f1")


def test_apply_rank_mismatch():
    with pytest.raises(RankError):
        apply(tau(1), W("f1", 3))


def test_compose_examples():
    e = tau(2)
    assert compose(identity_endo(2), e) == e
    assert compose(e, identity_endo(2)) == e
    # apply lambda(3,1) first, then lambda(3,2): f3 -> f1 f3 -> f1 f2 f3
    both = compose(nielsen_endo(3, 3, 1), nielsen_endo(3, 3, 2))
    assert both.images[2] == parse_word("f1 f2 f3", 3)


def test_compose_right_action_against_oracle():
    rng = random.Random(4)
    for _ in range(200):
        a = EndoMap(3, tuple(random_reduced_word(rng.randint(0, 4), 3, rng) for _ in range(3)))
        b = EndoMap(3, tuple(random_reduced_word(rng.randint(0, 4), 3, rng) for _ in range(3)))
        expected = compose_images([w.letters for w in a.images], [w.letters for w in b.images])
        assert [w.letters for w in compose(a, b).images] == expected
        w = random_reduced_word(rng.randint(0, 8), 3, rng)
        assert apply(compose(a, b), w) == apply(b, apply(a, w))
        assert apply(a, w).letters == substitute([x.letters for x in a.images], w.letters)


def test_identity_endo():
    assert identity_endo(1).images == (Word((1,), 1),)
    assert identity_endo(3).images == tuple(Word((k,), 3) for k in (1, 2, 3))


def test_inner_auto_examples():
    t1 = inner_auto(2, W("f1"))
    assert t1.images == (W("f1"), W("f1^-1 f2 f1"))
    assert inner_auto(2, Word((), 2)) == identity_endo(2)
    assert inner_auto(2, W("f2")).images[1] == W("f2")


@given(words2, words2)
def test_inner_auto_is_covariant(c, d):
    assert inner_auto(2, c) * inner_auto(2, d) == inner_auto(2, c * d)


@given(words2, words2)
def test_apply_is_homomorphism(u, v):
    for e in (tau(1), sigma(), compose(sigma(), tau(2))):
        assert apply(e, u * v) == apply(e, u) * apply(e, v)


def test_compose_associative():
    gens = v3_generators()
    rng = random.Random(2)
    names = list(gens)
    for _ in range(100):
        a, b, c = (
            evaluate_endo_word(gens, [(rng.choice(names), rng.choice((1, -1))) for _ in range(4)]) for _ in range(3)
        )
        assert (a * b) * c == a * (b * c)


def test_sigma_conjugation_identities():
    g = v3_generators()
    word = [("sigma", -1), ("tau2", 1), ("sigma", 1)]
    assert evaluate_endo_word(g, word) == compose(tau(1), tau(2))
    assert evaluate_endo_word(g, [("sigma", -1), ("tau1", 1), ("sigma", 1)]) == tau(1)


def test_evaluate_endo_word_edges():
    g = v3_generators()
    assert evaluate_endo_word(g, []) == identity_endo(2)
    assert evaluate_endo_word(g, [("tau1", 1), ("tau1", -1)]) == identity_endo(2)
    with pytest.raises(KeyError):
        evaluate_endo_word(g, [("rho", 1)])


def test_named_inverses():
    for fwd, back in v3_generators().values():
        assert fwd * back == identity_endo(2) == back * fwd


def test_v3_decompose_round_trip():
    g = v3_generators()
    names = list(g)
    rng = random.Random(8)
    for _ in range(300):
        e = evaluate_endo_word(g, [(rng.choice(names), rng.choice((1, -1))) for _ in range(rng.randint(0, 12))])
        k, c = v3_decompose(e)
        assert compose(sigma(power=k), inner_auto(2, c)) == e


def test_v3_decompose_rejects_outsiders():
    with pytest.raises(ValueError):
        v3_decompose(EndoMap(2, (W("f2"), W("f1"))))


def test_json_round_trip():
    e = compose(sigma(), tau(2))
    assert endo_from_json(e.to_json()) == e
    assert e.to_json()["rank"] == 2
    with pytest.raises(ValueError):
        endo_from_json({"images": []})
