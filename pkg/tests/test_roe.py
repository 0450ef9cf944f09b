from fractions import Fraction
from itertools import chain, combinations

import pytest
from hypothesis import given, strategies as st

from invsem.core import PartialBijection
from invsem.errors import BoundaryContamination, ClassConditionUnmet
from invsem.presets import (bicyclic_on_N, brandt5_rep, cuntz2_on_N, cyclic_rep, rep_preset,
                            symmetric_inverse_rep)
from invsem.rep import Representation
from invsem.roe import (Matrix, Proj, Product, V, build_P, build_V, check_relations,
                        conditional_expectation, corner_dimension, evaluate,
                        folner_projection_defect, isometries_from_paradox, symbol_to_json,
                        trace_factorization_check, trace_functional_space)
from invsem.setalg import FiniteSet, UPSet
from invsem.typesem import ParadoxWitness, paradox_search

from conftest import upsets


def two_swaps():
    return Representation(["g"], [PartialBijection(4, [(0, 1), (1, 0), (2, 3), (3, 2)])], 4,
                          label="two_swaps")


def subsets(xs):
    xs = list(xs)
    return chain.from_iterable(combinations(xs, k) for k in range(1, len(xs) + 1))


matrices = st.integers(1, 5).flatmap(lambda n: st.lists(
    st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=n, max_size=n),
    min_size=n, max_size=n)).map(lambda rows: Matrix(len(rows), len(rows), rows))


@given(matrices)
def test_conditional_expectation_is_a_bimodule_projection(M):
    n = M.rows
    E = conditional_expectation(M)
    assert conditional_expectation(E) == E
    D = Matrix.diagonal([Fraction(i + 1, 2) for i in range(n)])
    assert conditional_expectation(D @ M @ D) == D @ E @ D
    assert E.trace() == M.trace()


@pytest.mark.parametrize("rep,window", [(bicyclic_on_N(), 12), (cuntz2_on_N(), 16),
                                        (symmetric_inverse_rep(3), 3), (brandt5_rep(), 2)],
                         ids=["bicyclic", "cuntz", "sym3", "brandt5"])
def test_partial_isometries(rep, window):
    for w in rep.words_up_to(3):
        t = build_V(rep, w, window)
        s = build_V(rep, w.star(), window)
        Vw, Vs = t.matrix, s.matrix
        assert Vs == Vw.adjoint() or t.boundary or s.boundary
        if not t.boundary and not s.boundary:
            assert Vw @ Vs @ Vw == Vw
            dom = rep.domain_of(w)
            assert Vs @ Vw == build_P(dom, window)


def test_bicyclic_shift_matrix():
    t = build_V(bicyclic_on_N(), "a", 4)
    assert t.boundary == frozenset({3})
    assert t.matrix.nonzero() == {(1, 0): 1, (2, 1): 1, (3, 2): 1}
    sym = Product((V(bicyclic_on_N().word("a*")), V(bicyclic_on_N().word("a"))))
    assert evaluate(sym, bicyclic_on_N(), 4).matrix == Matrix.diagonal([1, 1, 1, 0])
    assert symbol_to_json(Product((Proj(UPSet.finite([1])), sym)), bicyclic_on_N())


def test_commutation_relations():
    b = bicyclic_on_N()
    rep = check_relations(b, 8, ["a", "a*"], [UPSet.residue_class(0, 2)], [lambda x: x * x + 1])
    assert rep.passed and len(rep.interior) == 7
    c = cuntz2_on_N()
    rep = check_relations(c, 32, ["d0", "d1", "d0* d1"], [UPSet.residue_class(1, 3), [2, 5]],
                          [{1: Fraction(1, 2), 4: 3}])
    assert rep.passed


@pytest.mark.parametrize("n", [2, 3])
def test_unique_normalised_trace_on_full_matrix_algebras(n):
    # every matrix unit is realised, and M_n has one tracial state: tr / n
    rep = symmetric_inverse_rep(n)
    space = trace_functional_space(rep, n, 3)
    res = trace_factorization_check(rep, n, 3, space)
    assert res["factorizes"] and res["dimension"] == 0 and res["functionals"] == 1
    assert res["diagonal_weights"] == [[str(Fraction(1, n))] * n]
    assert all(res["positive"])


def test_traces_on_two_orbits_form_a_segment():
    res = trace_factorization_check(two_swaps(), 4, 2)
    assert res["factorizes"] and res["dimension"] == 1
    for weights in res["diagonal_weights"]:
        w = [Fraction(x) for x in weights]
        assert w[0] == w[1] and w[2] == w[3] and sum(w) == 1
    assert trace_factorization_check(cyclic_rep(4), 4, 3)["diagonal_weights"] == [["1/4"] * 4]


def test_trace_space_rejects_leaking_words():
    with pytest.raises(BoundaryContamination):
        trace_functional_space(bicyclic_on_N(), 8, 2)


@pytest.mark.parametrize("rep", [symmetric_inverse_rep(3), cyclic_rep(4), rep_preset("wp:cyclic(3)")],
                         ids=repr)
def test_corner_rank_on_transitive_reps(rep):
    X = range(rep.universe_size)
    for F1 in subsets(X):
        for F2 in subsets(X):
            res = corner_dimension(F1, F2, rep, 8)
            assert res.single_class and res.rank == len(F1) * len(F2)


def test_corner_rank_across_orbits():
    rep = two_swaps()
    res = corner_dimension([0, 2], [0, 2], rep, 4)
    assert not res.single_class and res.rank == 2 < res.expected
    with pytest.raises(ClassConditionUnmet):
        corner_dimension([0, 2], [0, 2], rep, 4, strict=True)


def hs_oracle(F, w, A, rep):
    """Count x in A ∩ D where exactly one of x, w x lies in F."""
    F = set(F)
    ws = rep.word(w).star()
    cand = F | {y for x in F if (y := rep.apply(ws, x)) is not None}
    count = 0
    for x in cand:
        y = rep.apply(w, x)
        if y is not None and x in A and (x in F) != (y in F):
            count += 1
    return Fraction(count, len(F))


@given(st.sets(st.integers(0, 40), min_size=1, max_size=12), upsets(),
       st.sampled_from(["a", "a*", "a a", "a* a", "a a*", "a* a* a"]))
def test_hs_defect_on_bicyclic(F, A, w):
    rep = bicyclic_on_N()
    res = folner_projection_defect(F, w, A, rep)
    assert res.value == hs_oracle(F, w, A, rep)
    assert res.within


@given(st.sets(st.integers(0, 30), min_size=1, max_size=10), upsets(),
       st.sampled_from(["d0", "d1*", "d0* d1", "d1 d0*"]))
def test_hs_defect_on_cuntz(F, A, w):
    rep = cuntz2_on_N()
    res = folner_projection_defect(F, w, A, rep)
    assert res.value == hs_oracle(F, w, A, rep) and res.within


def test_hs_defect_of_an_interval():
    res = folner_projection_defect(range(16), "a", UPSet.naturals(), bicyclic_on_N())
    assert res.value == res.bound == Fraction(1, 16)


def test_cuntz_isometries():
    rep = cuntz2_on_N()
    pw = paradox_search(rep, 2, 2, 2).witness
    iso = isometries_from_paradox(pw, rep, 64)
    assert iso.interior == list(range(32))
    assert all(iso.checks.values())


def test_overlapping_pieces_give_non_orthogonal_ranges():
    rep = symmetric_inverse_rep(1)
    X = FiniteSet.full(1)
    one = rep.word("")
    pw = ParadoxWitness(X, [(X, one)], [(X, one)])
    iso = isometries_from_paradox(pw, rep, 1, check=False)
    assert iso.checks["W1*W1 = 1"] and iso.checks["W2*W2 = 1"]
    assert not iso.checks["W1*W2 = 0"] and not iso.checks["ranges orthogonal"]
