import random
from itertools import combinations, permutations
from math import comb, factorial

import pytest
from hypothesis import given, strategies as st

from invsem.core import InverseSemigroup, PartialBijection, Semigroup, generate_closure
from invsem.errors import InvalidInput, NotInverse
from invsem.presets import (FINITE_SEMIGROUP_PRESETS, brandt5, brandt5_table, day2,
                            semigroup_preset, symmetric_inverse, symmetric_inverse_rep)

INVERSE_PRESETS = [p for p in FINITE_SEMIGROUP_PRESETS if p != "day2"]


def all_partial_bijections(n):
    out = set()
    for k in range(n + 1):
        for dom in combinations(range(n), k):
            for img in permutations(range(n), k):
                out.add(PartialBijection(n, zip(dom, img)))
    return out


@pytest.mark.parametrize("n", [1, 2, 3])
def test_symmetric_inverse_closure_is_everything(n):
    expected = sum(comb(n, k) ** 2 * factorial(k) for k in range(n + 1))
    sg, elems = symmetric_inverse_rep(n).closure
    assert sg.size == expected == len(all_partial_bijections(n))
    assert set(elems) == all_partial_bijections(n)


def test_known_sizes():
    assert [symmetric_inverse(n).size for n in (1, 2, 3)] == [2, 7, 34]
    assert semigroup_preset("brandt5").size == 6
    assert len(brandt5_table()) == 5 and brandt5().size == 6  # unit adjoined


@pytest.mark.parametrize("name", INVERSE_PRESETS)
def test_axioms(name):
    sg = semigroup_preset(name)
    assert sg.verify_axioms()
    for s in sg.elements():
        x = sg.star(s)
        assert sg.product(s, x, s) == s and sg.product(x, s, x) == x
        assert sg.star(x) == s
    idem = sg.idempotents()
    for e in idem:
        for f in idem:
            assert sg.mul(e, f) == sg.mul(f, e)


@pytest.mark.parametrize("name", INVERSE_PRESETS)
def test_max_group_image_is_a_group_quotient(name):
    sg = semigroup_preset(name)
    g, q = sg.max_group_image()
    assert len(g.idempotents()) == 1
    for s in sg.elements():
        for t in sg.elements():
            assert q[sg.mul(s, t)] == g.mul(q[s], q[t])


def test_group_images():
    assert semigroup_preset("cyclic(4)").max_group_image()[0].size == 4
    # a zero collapses everything
    assert symmetric_inverse(3).max_group_image()[0].size == 1


@pytest.mark.parametrize("name", INVERSE_PRESETS)
def test_min_projection(name):
    sg = semigroup_preset(name)
    mins = sg.minimal_projections()
    assert len(mins) == 1
    for a in sg.elements():
        e = sg.min_projection_from_finite_ideal(a)
        assert e == mins[0]
        assert all(sg.mul(e, s) == sg.mul(s, e) for s in sg.elements())


def test_set_identities_on_random_draws():
    sg = symmetric_inverse(3)
    rng = random.Random(7)
    for _ in range(300):
        s = rng.randrange(sg.size)
        A = {x for x in sg.elements() if rng.random() < 0.4}
        B = {x for x in sg.elements() if rng.random() < 0.4}
        assert all(sg.lemma_sets_check(s, A, B).values())


@given(st.lists(st.integers(-1, 4), min_size=5, max_size=5),
       st.lists(st.integers(-1, 4), min_size=5, max_size=5))
def test_partial_bijection_compose(a, b):
    def to_pb(img):
        pairs, used = [], set()
        for x, y in enumerate(img):
            if y >= 0 and y not in used:
                used.add(y)
                pairs.append((x, y))
        return PartialBijection(5, pairs)
    f, g = to_pb(a), to_pb(b)
    h = f.compose(g)
    for x in range(5):
        gx = g(x)
        assert h(x) == (None if gx is None else f(gx))
    assert f.compose(f.inverse()).compose(f) == f


def test_day2_is_not_inverse():
    sg = day2()
    assert isinstance(sg, Semigroup) and not isinstance(sg, InverseSemigroup)
    with pytest.raises(NotInverse):
        InverseSemigroup(sg.table)


def test_closure_needs_generators():
    with pytest.raises(InvalidInput):
        generate_closure([])
