from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from invsem.decide.folner import (EXHAUSTED, FOUND, certificate_for, empirical_density_report,
                                  folner_search, leak, level_sets, namioka_extract,
                                  transitive_refine)
from invsem.decide.measures import amenable_feasible
from invsem.errors import PigeonholeFailed, PreconditionViolated
from invsem.presets import FINITE_REP_PRESETS, bicyclic_on_N, cuntz2_on_N, rep_preset, symmetric_inverse_rep
from invsem.setalg import UPSet


def brute_first(rep, eps, window, max_size, strict=False):
    maps = [rep.letter_map(l) for l in rep.letters()]
    for k in range(1, max_size + 1):
        for F in combinations(window, k):
            S = set(F)
            leaks = [sum(1 for x in F if (y := m(x)) is not None and y not in S) for m in maps]
            if all((lk < eps * k) if strict else (lk <= eps * k) for lk in leaks):
                return list(F)
    return None


@given(st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 6)]),
       st.integers(0, 6), st.integers(6, 14), st.booleans(), st.sampled_from(["b", "c"]))
def test_search_agrees_with_enumeration(eps, lo, width, strict, which):
    rep = bicyclic_on_N() if which == "b" else cuntz2_on_N()
    window = list(range(lo, lo + width))
    res = folner_search(rep, eps, window=window, max_size=5, strict=strict)
    expected = brute_first(rep, eps, window, 5, strict)
    if expected is None:
        assert res.status == EXHAUSTED and res.certificate is None
    else:
        assert res.status == FOUND and list(res.certificate.set) == expected
        assert res.certificate.verify(rep)


def test_bicyclic_intervals():
    rep = bicyclic_on_N()
    res = folner_search(rep, Fraction(1, 8), window=range(64), max_size=64, split=True)
    assert list(res.certificate.set) == list(range(16))
    assert {d.word: d.ratio for d in res.certificate.defects} == {"a": Fraction(1, 16),
                                                                 "a*": Fraction(0)}
    # without splitting the budget the interval can be half as long
    res = folner_search(rep, Fraction(1, 8), window=range(64), max_size=64)
    assert list(res.certificate.set) == list(range(8))


def test_cuntz_has_no_small_folner_sets():
    res = folner_search(cuntz2_on_N(), Fraction(1, 4), window=range(12), exhaustive=True)
    assert res.status == EXHAUSTED


def test_amenable_restriction_and_parallel_search_agree():
    rep = symmetric_inverse_rep(3)
    one = folner_search(rep, Fraction(1, 3), exhaustive=True, amenable=True)
    assert one.status == EXHAUSTED  # no point lies in every domain
    a = folner_search(bicyclic_on_N(), Fraction(1, 5), window=range(20), max_size=10)
    b = folner_search(bicyclic_on_N(), Fraction(1, 5), window=range(20), max_size=10, jobs=2)
    assert a.certificate.set == b.certificate.set


def test_certificate_recomputes_leaks():
    rep = bicyclic_on_N()
    cert = certificate_for(rep, [3, 4, 5])
    assert [(d.word, d.leak) for d in cert.defects] == [("a", 1), ("a*", 1)]
    cert.defects[0].leak = 0
    assert not cert.verify(rep)
    assert leak(rep, "a", UPSet.interval(0, 10).members(20)) == 1


def test_transitive_refine_picks_a_class():
    rep = rep_preset("cyclic(5)")
    both = symmetric_inverse_rep(4)
    cert = certificate_for(rep, range(5))
    assert transitive_refine(cert, rep, Fraction(1, 2)).set == tuple(range(5))
    # two separate orbits in the same set: one of them is returned
    cert = certificate_for(both, range(4))
    out = transitive_refine(cert, both, Fraction(1, 2))
    assert out.verify(both) and all(d.leak < Fraction(1, 2) * len(out.set) for d in out.defects)
    with pytest.raises(PreconditionViolated):
        transitive_refine(certificate_for(bicyclic_on_N(), [0]), bicyclic_on_N(), Fraction(1, 2))


def test_level_sets_reassemble_h():
    h = {0: Fraction(1, 2), 1: Fraction(1, 4), 5: Fraction(1, 4), 7: Fraction(0)}
    lv = level_sets(h)
    assert [l.points for l in lv] == [(0, 1, 5), (0,)]
    for x, v in h.items():
        assert sum(l.gap for l in lv if x in l.points) == v
    assert sum(l.weight for l in lv) == 1


def test_namioka_on_bicyclic_ramp():
    rep = bicyclic_on_N()
    n = 40
    h = {x: Fraction(1, n) for x in range(n)}
    res = namioka_extract(h, Fraction(1, 4), ["a", "a*"], rep)
    assert res.certificate.set == tuple(range(n))
    assert all(d.leak < Fraction(1, 4) * d.size for d in res.certificate.defects)
    with pytest.raises(PreconditionViolated):
        namioka_extract(h, Fraction(1, 4), ["a"], rep)
    with pytest.raises(PreconditionViolated):
        namioka_extract({0: Fraction(1)}, Fraction(1, 4), ["a", "a*"], rep)


AMENABLE = [p for p in FINITE_REP_PRESETS if amenable_feasible(rep_preset(p)).feasible]


@pytest.mark.parametrize("name", AMENABLE)
def test_namioka_on_lp_solutions(name):
    rep = rep_preset(name)
    d = amenable_feasible(rep)
    gens = [rep.render(w) for w in rep.distinct_words(1)[1:]]
    for eps in (Fraction(1, 2), Fraction(1, 4)):
        res = namioka_extract(list(d.measure.atoms), eps, gens, rep)
        assert all(x.leak < eps * x.size for x in res.certificate.defects)


def test_density_report():
    E = UPSet.residue_class(0, 2)
    assert empirical_density_report(E, [range(4), range(10), range(5)]) == [
        Fraction(1, 2), Fraction(1, 2), Fraction(3, 5)]
