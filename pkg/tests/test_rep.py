from itertools import product

import pytest
from hypothesis import given, strategies as st

from invsem.errors import InvalidInput, UniverseMismatch
from invsem.presets import (FINITE_REP_PRESETS, bicyclic_on_N, cuntz2_on_N, rep_preset,
                            symmetric_inverse_rep)
from invsem.rep import Representation, Word, reachable_pairs
from invsem.setalg import AffinePartialMap, UPSet

REPS = [symmetric_inverse_rep(3), rep_preset("brandt5"), bicyclic_on_N(), cuntz2_on_N()]


def points(rep):
    return range(rep.universe_size) if rep.is_finite else range(200)


def words(rep, max_len):
    return st.lists(st.sampled_from(rep.letters()), max_size=max_len).map(
        lambda ls: Word(tuple(ls)))


@pytest.mark.parametrize("rep", REPS, ids=repr)
def test_evaluation_is_a_homomorphism(rep):
    # left factors up to equality of maps, right factors all words
    for u in rep.distinct_words(3):
        for v in rep.words_up_to(3):
            if len(u) + len(v) > 6:
                continue
            uv = rep.eval_word(u * v)
            assert uv == rep.eval_word(u).compose(rep.eval_word(v))
            for x in points(rep):
                inner = rep.apply(v, x)
                assert rep.apply(u * v, x) == (None if inner is None else rep.apply(u, inner))


@pytest.mark.parametrize("rep", REPS, ids=repr)
def test_star_undoes_word_on_its_domain(rep):
    for w in rep.words_up_to(3):
        m = rep.eval_word(w)
        back = rep.eval_word(w.star())
        assert back == m.inverse()
        assert back.compose(m) == rep.identity_map().restrict(m.domain)


@pytest.mark.parametrize("rep", REPS[:2] + REPS[3:], ids=repr)
def test_distinct_words_match_brute_force(rep):
    n = 4
    brute = {}
    for w in rep.words_up_to(n):
        brute.setdefault(rep.eval_word(w), w)
    got = rep.distinct_words(n)
    assert {rep.eval_word(w) for w in got} == set(brute)
    assert len(got) == len(brute)
    # each representative is the shortlex-least word for its map
    for w in got:
        assert (len(w), w) == min((len(v), v) for v in rep.words_up_to(n)
                                  if rep.eval_word(v) == rep.eval_word(w))


@pytest.mark.parametrize("rep", [symmetric_inverse_rep(3), rep_preset("wp:brandt5")], ids=repr)
def test_approx_classes_is_a_partition_by_reachability(rep):
    pts = list(range(rep.universe_size))
    for bound in (0, 1, 2, 4):
        classes = rep.approx_classes(pts, bound)
        assert sorted(x for c in classes for x in c) == pts
        reach = reachable_pairs(rep, pts, bound)
        where = {x: i for i, c in enumerate(classes) for x in c}
        for x, y in reach:
            assert where[x] == where[y]


@given(st.sets(st.integers(0, 60), min_size=1), st.integers(0, 4))
def test_approx_classes_grow_coarser(pts, bound):
    rep = cuntz2_on_N()
    fine = rep.approx_classes(pts, bound)
    coarse = rep.approx_classes(pts, bound + 1)
    where = {x: i for i, c in enumerate(coarse) for x in c}
    for c in fine:
        assert len({where[x] for x in c}) == 1


def test_parse_and_render():
    rep = cuntz2_on_N()
    w = rep.parse_word("d0* d1")
    assert rep.render(w) == "d0* d1"
    assert rep.apply(w, 3) is None  # d1: 3 -> 7, and 7 is odd
    assert rep.apply("d1* d1", 3) == 3
    assert rep.apply("d0* d0", 2) == 2 and rep.apply("d1* d0", 2) is None
    assert rep.apply("d0", 3) == 6
    assert rep.render(rep.parse_word("1")) == "1"
    with pytest.raises(InvalidInput):
        rep.parse_word("x")


def test_bicyclic_actions():
    rep = bicyclic_on_N()
    assert rep.domain_of("a*") == UPSet.interval(1)
    assert rep.act("a", UPSet.naturals()) == UPSet.interval(1)
    assert rep.preimage_act("a", UPSet.finite([0, 3])) == UPSet.finite([2])


def test_bad_representations():
    with pytest.raises(UniverseMismatch):
        Representation(["a"], [AffinePartialMap(1, 1)], universe_size=3)
    with pytest.raises(InvalidInput):
        Representation(["a*"], [AffinePartialMap(1, 1)])
