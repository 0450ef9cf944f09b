from fractions import Fraction
from itertools import combinations
from math import comb

import pytest
import sympy
from hypothesis import given, strategies as st

from invsem import linalg
from invsem.errors import InvalidInput, UniverseMismatch, ZeroSubspace
from invsem.presets import semigroup_preset
from invsem.ring import (F2PlusSemidirect, FiniteSemigroupRing, RingElement, Subspace,
                         annihilated_element, annihilator_check, counterexample_folner_bound,
                         folner_subspace_defect, folner_to_subspace, parse_element, rank)

R = F2PlusSemidirect()
FR = FiniteSemigroupRing(semigroup_preset("symmetric_inverse(2)"))
coeffs = st.fractions(min_value=-4, max_value=4, max_denominator=3)
pairs = st.tuples(st.integers(0, 4), st.text("ab", min_size=1, max_size=3))


def elements(ring, keys):
    return st.lists(st.tuples(keys, coeffs), max_size=4).map(lambda t: RingElement(ring, t))


f2_elems = elements(R, pairs)
fin_elems = elements(FR, st.integers(0, FR.sg.size - 1))


def test_basis_products():
    assert R.mul_basis((2, "a"), (5, "b")) == (6, "ab")
    assert R.mul_basis((0, "a"), (1, "b")) == (0, "ab")
    s = annihilated_element(R)
    assert str(s) == "1*(0,a) - 1*(1,a)"


@given(fin_elems, fin_elems, fin_elems, coeffs)
def test_finite_semigroup_ring_axioms(x, y, z, q):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x + y) * z == x * z + y * z
    assert x.scale(q) * y == (x * y).scale(q) == x * y.scale(q)
    assert x - x == RingElement(FR)


@given(f2_elems, f2_elems, f2_elems, coeffs)
def test_truncated_product_is_bilinear(x, y, z, q):
    assert x * (y + z) == x * y + x * z
    assert (x + y) * z == x * z + y * z
    assert x.scale(q) * y == (x * y).scale(q) == x * y.scale(q)


@given(st.text("ab", min_size=1, max_size=3), st.text("ab", min_size=1, max_size=3), pairs)
def test_words_act_through_their_product(u, v, x):
    # (0,u)(0,v) = (0,uv) and the action of uv on N is the composite of the actions
    assert R.mul_basis(R.mul_basis((0, u), (0, v)), x) == R.mul_basis((0, u), R.mul_basis((0, v), x))


def test_truncated_product_is_not_associative():
    x, y, z = (0, "a"), (1, "a"), (2, "a")
    assert R.mul_basis(R.mul_basis(x, y), z) == (0, "aaa")
    assert R.mul_basis(x, R.mul_basis(y, z)) == (1, "aaa")


@given(f2_elems)
def test_element_text_round_trip(x):
    assert parse_element(str(x), R) == x


def test_parse_errors():
    with pytest.raises(InvalidInput):
        parse_element("1*(0,c)", R)
    with pytest.raises(UniverseMismatch):
        RingElement.basis(R, (0, "a")) + RingElement.basis(FR, 0)
    assert parse_element("2*[1] - 1/2*[3]", FR).as_dict() == {1: 2, 3: Fraction(-1, 2)}


@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=6))
def test_rank_matches_sympy(rows):
    vecs = [{j: Fraction(v) for j, v in enumerate(r)} for r in rows]
    assert linalg.rank(vecs) == sympy.Matrix(rows).rank()


@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=5),
       st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_affine_solver_matches_sympy(rows, rhs):
    rhs = rhs[:len(rows)]
    vecs = [{j: Fraction(v) for j, v in enumerate(r) if v} for r in rows]
    sol = linalg.solve_affine(vecs, rhs, list(range(4)))
    A, b = sympy.Matrix(rows), sympy.Matrix(rhs)
    consistent = A.rank() == A.row_join(b).rank()
    assert (sol is not None) == consistent
    if sol is not None:
        x, basis = sol
        assert all(linalg.dot(r, x) == c for r, c in zip(vecs, rhs))
        assert len(basis) == 4 - A.rank()
        for v in basis:
            assert all(linalg.dot(r, v) == 0 for r in vecs)


@given(st.lists(fin_elems, min_size=1, max_size=4), fin_elems)
def test_subspace_defect(gens, a):
    W = Subspace.span(FR, gens)
    if W.dim == 0:
        with pytest.raises(ZeroSubspace):
            folner_subspace_defect(W, a)
        return
    d = folner_subspace_defect(W, a)
    assert d >= 1
    assert (d == 1) == all(W.contains(a * w) for w in W.basis)
    assert rank(list(W.basis)) == W.dim == rank(gens)


def test_annihilator_small_ball():
    res = annihilator_check(3, 3)
    assert res["passed"] and res["checked"] == 4 * 14


def defects(F):
    S = set(F)
    da = len({R.mul_basis((0, "a"), x) for x in F} - S)
    db = len({R.mul_basis((0, "b"), x) for x in F} - S)
    return da, db


ball = R.ball(4, 4)


@given(st.sets(st.sampled_from(ball), min_size=1, max_size=20))
def test_left_translates_are_not_small(F):
    F = list(F)
    img = {R.mul_basis((0, "a"), x) for x in F}
    assert 2 * len(img) >= len(F)
    da, db = defects(F)
    assert 50 * max(da, db) >= len(F)


def test_counterexample_search_matches_enumeration():
    n_max, len_max, k = 1, 2, 4
    small = R.ball(n_max, len_max)
    eps = Fraction(1, 3)
    count, bad, best = 0, 0, None
    for size in range(1, k + 1):
        for F in combinations(small, size):
            count += 1
            da, db = defects(F)
            bad += da < eps * size and db < eps * size
            r = Fraction(max(da, db), size)
            best = r if best is None else min(best, r)
    res = counterexample_folner_bound(n_max, len_max, k, eps)
    assert res["enumerated"] == count == sum(comb(len(small), s) for s in range(1, k + 1))
    assert res["counterexamples"] == bad
    assert Fraction(res["min_max_defect_ratio"]) == best


def test_folner_set_subspace():
    F = [(0, "a"), (1, "a"), (0, "b")]
    W = folner_to_subspace(R, F)
    assert W.dim == 3
    a = RingElement.basis(R, (0, "a"))
    assert folner_subspace_defect(W, a) == Fraction(rank(list(W.basis) + [a * w for w in W.basis]), 3)
    with pytest.raises(InvalidInput):
        folner_to_subspace(R, [])
