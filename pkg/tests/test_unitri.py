import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgcalc.morphism import compose, identity_endo, inner_auto, tau, v3_generators
from fgcalc.unitri import (
    UniTri,
    alpha_faithfulness_probe,
    alpha_image,
    check_alpha_homomorphism,
    check_relation_suite,
    evaluate_lambda_word,
    fixes,
    from_endo,
    gamma_sample,
    identity_ut,
    lambda_gen,
    lambda_word_from_json,
    lambda_word_to_json,
    random_unitri,
    to_endo,
    unitri_from_json,
    unitri_to_lambda_word,
    ut_commutator,
    ut_compose,
    ut_invert,
)
from fgcalc.words import RankError, Word, parse_word

from oracles import compose_images, evaluate_lambda_images, unitri_images


def UT(rank, *entries):
    return UniTri(rank, tuple(parse_word(u, rank) for u in entries))


def images_of(phi):
    return [w.letters for w in to_endo(phi).images]


def test_tuple_invariant_enforced():
    with pytest.raises(ValueError):
        UT(3, "f2", "e")  # u_2 must lie in F_1
    with pytest.raises(ValueError):
        UniTri(3, (Word((), 3),))


def test_small_ranks():
    # U_1 is trivial, U_2 consists of powers of f1
    assert identity_ut(1).tuple == ()
    assert UniTri(1, ()).is_identity
    with pytest.raises(ValueError):
        UT(2, "f2")
    x = lambda_gen(2, 2, 1)
    assert ut_compose(x, x) == UT(2, "f1 f1")


def test_to_endo_examples():
    assert to_endo(identity_ut(3)) == identity_endo(3)
    assert to_endo(lambda_gen(2, 2, 1)).images[1] == parse_word("f1 f2", 2)
    e = to_endo(UT(3, "f1", "f2"))
    assert e.images[1] == parse_word("f1 f2", 3)
    assert e.images[2] == parse_word("f2 f3", 3)


def test_from_endo_examples():
    assert from_endo(identity_endo(3)) == identity_ut(3)
    assert from_endo(to_endo(lambda_gen(3, 3, 2))) == UT(3, "e", "f2")
    assert from_endo(tau(1)) is None


@pytest.mark.parametrize(
    "images",
    [
        ["f1^-1", "f2"],  # f1 not fixed
        ["f1", "f2 f1"],  # does not end in f2
        ["f1", "f1 f2", "f3 f3"],  # prefix leaves F_2
        ["f1", "f2^-1"],
    ],
)
def test_from_endo_rejects(images):
    from fgcalc.morphism import EndoMap

    n = len(images)
    assert from_endo(EndoMap(n, tuple(parse_word(w, n) for w in images))) is None


def test_ut_compose_examples():
    # both against the image-table oracle
    got = ut_compose(lambda_gen(3, 2, 1), lambda_gen(3, 3, 2))
    assert got == UT(3, "f1", "f2")
    assert images_of(got) == compose_images(images_of(lambda_gen(3, 2, 1)), images_of(lambda_gen(3, 3, 2)))
    assert ut_compose(lambda_gen(3, 3, 1), lambda_gen(3, 3, 2)) == UT(3, "e", "f1 f2")
    phi = UT(3, "f1^-1", "f2 f1")
    assert ut_compose(phi, identity_ut(3)) == phi


def test_ut_invert_examples():
    assert ut_invert(lambda_gen(2, 2, 1)) == UT(2, "f1^-1")
    phi = UT(3, "f1", "f2 f1")
    inv = ut_invert(phi)
    assert inv == UT(3, "f1^-1", "f1^-1 f2^-1 f1")
    assert ut_compose(phi, inv).is_identity
    assert ut_invert(identity_ut(4)) == identity_ut(4)


def _random_pair(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    return random_unitri(n, 6, rng), random_unitri(n, 6, rng)


@given(st.integers(0, 10**9))
@settings(max_examples=200)
def test_closure_matches_oracle(seed):
    phi, psi = _random_pair(seed)
    assert from_endo(to_endo(phi)) == phi
    oracle = compose_images(images_of(phi), images_of(psi))
    assert images_of(ut_compose(phi, psi)) == oracle
    assert from_endo(compose(to_endo(phi), to_endo(psi))) == ut_compose(phi, psi)


@given(st.integers(0, 10**9))
@settings(max_examples=200)
def test_inverse_two_sided(seed):
    phi, _ = _random_pair(seed)
    inv = ut_invert(phi)
    assert ut_compose(phi, inv).is_identity
    assert ut_compose(inv, phi).is_identity


@pytest.mark.parametrize(
    "rank, i, j, entries",
    [(3, 3, 2, ("e", "f2")), (4, 4, 3, ("e", "e", "f3")), (2, 2, 1, ("f1",))],
)
def test_lambda_gen(rank, i, j, entries):
    assert lambda_gen(rank, i, j) == UT(rank, *entries)


@pytest.mark.parametrize("args", [(3, 2, 2), (3, 2, 3), (3, 4, 1), (3, 2, 0)])
def test_lambda_gen_index_errors(args):
    with pytest.raises(RankError):
        lambda_gen(*args)


def test_evaluate_lambda_word_examples():
    assert evaluate_lambda_word(2, [((2, 1), 1), ((2, 1), -1)]).is_identity
    comm = [((3, 2), 1), ((2, 1), 1), ((3, 2), -1), ((2, 1), -1)]
    assert evaluate_lambda_word(3, comm) == lambda_gen(3, 3, 1)
    conj = [((2, 1), -1), ((3, 2), 1), ((2, 1), 1)]
    assert evaluate_lambda_word(3, conj) == ut_compose(lambda_gen(3, 3, 1), lambda_gen(3, 3, 2))


def test_evaluate_lambda_word_against_oracle():
    rng = random.Random(6)
    gens = [(i, j) for i in range(2, 5) for j in range(1, i)]
    for _ in range(100):
        word = [(rng.choice(gens), rng.choice((1, -1))) for _ in range(rng.randint(0, 10))]
        assert images_of(evaluate_lambda_word(4, word)) == evaluate_lambda_images(4, word)


def test_unitri_to_lambda_word_round_trip():
    rng = random.Random(1)
    for _ in range(100):
        phi = random_unitri(rng.randint(1, 6), 8, rng)
        assert evaluate_lambda_word(phi.rank, unitri_to_lambda_word(phi)) == phi


def test_fixes_examples():
    assert all(fixes(identity_ut(4), m) for m in range(5))
    assert fixes(lambda_gen(2, 2, 1), 1)
    assert not fixes(lambda_gen(2, 2, 1), 2)
    c = ut_commutator(lambda_gen(3, 3, 2), lambda_gen(3, 2, 1))
    assert fixes(c, 1)


def test_gamma_sample_weight_one_is_plain_words():
    for x in gamma_sample(4, 1, 20, seed=2):
        assert isinstance(x, UniTri) and x.rank == 4


@pytest.mark.parametrize("n", [4, 5])
def test_gamma_sample_stabilizes(n):
    assert all(fixes(x, n - 3) for x in gamma_sample(n, n - 2, 200, seed=n))


def test_weight_four_commutator_in_rank_six_moves_f3():
    # gp(lambda(3,1), lambda(3,2)) is free, so the left-normed commutator of
    # weight 4 below is a nontrivial element of gamma_4 U_6 acting on f3
    L = lambda i, j: lambda_gen(6, i, j)
    x = ut_commutator(ut_commutator(ut_commutator(L(3, 1), L(3, 2)), L(3, 1)), L(3, 2))
    assert not fixes(x, 3)
    assert fixes(x, 2)


def test_gamma_sample_deterministic():
    assert gamma_sample(5, 3, 10, seed=4) == gamma_sample(5, 3, 10, seed=4)


def test_alpha_image_examples():
    assert alpha_image([((3, 1), 1)]) == tau(1)
    w = [((2, 1), -1), ((3, 2), 1), ((2, 1), 1)]
    assert alpha_image(w) == compose(tau(1), tau(2))
    assert alpha_image([]) == identity_endo(2)
    with pytest.raises(ValueError):
        alpha_image([((4, 1), 1)])


def test_alpha_on_free_part_is_conjugation():
    rng = random.Random(9)
    for _ in range(100):
        letters = [rng.choice((1, -1, 2, -2)) for _ in range(rng.randint(0, 10))]
        word = [((3, abs(x)), 1 if x > 0 else -1) for x in letters]
        from fgcalc.words import reduce

        assert alpha_image(word) == inner_auto(2, reduce(letters, 2))


def test_alpha_homomorphism():
    assert check_alpha_homomorphism(samples=300, seed=5).passed


def test_alpha_probe_examples():
    comm = [((3, 1), 1), ((2, 1), 1), ((3, 1), -1), ((2, 1), -1)]
    assert evaluate_lambda_word(3, comm).is_identity
    assert alpha_image(comm).is_identity()
    assert not evaluate_lambda_word(3, [((3, 2), 1)]).is_identity
    assert not alpha_image([((3, 2), 1)]).is_identity()
    rep = alpha_faithfulness_probe(500, 30, seed=1)
    assert rep.passed
    # the sampler must actually exercise both verdicts
    assert rep.trivial_both > 50 and rep.nontrivial_both > 50


def test_relation_suite_passes():
    rep = check_relation_suite(6)
    assert rep.passed, "\n".join(rep.lines())
    groups = {c.group for c in rep.checks}
    assert groups == {"lambda-conjugation", "sigma-conjugation", "lambda-commutator", "disjoint-commute", "hydra"}
    names = [c.name for c in rep.checks]
    assert "[L(4,3), L(3,1)] = L(4,1)" in names
    # k < j < i <= 6 gives C(6,3) = 20 commutator identities
    assert sum(c.group == "lambda-commutator" for c in rep.checks) == 20


def test_relation_suite_rejects_small_limit():
    with pytest.raises(ValueError):
        check_relation_suite(3)


def test_json_round_trip():
    phi = UT(3, "f1^-1", "f2 f1")
    data = phi.to_json()
    assert data == {"rank": 3, "tuple": [[-1], [2, 1]]}
    assert unitri_from_json(data) == phi
    word = [((3, 2), 1), ((2, 1), -1)]
    assert lambda_word_to_json(word) == [[3, 2, 1], [2, 1, -1]]
    assert lambda_word_from_json([[3, 2, 1], [2, 1, -1]]) == word
