import time
from fractions import Fraction

import pytest

from invsem.decide.lp import check_certificate
from invsem.decide.measures import (ActionRelation, UnionRelation, amenable_feasible,
                                    check_measure_properties, day_invariance_feasible,
                                    domain_constraints, domain_measure_feasible,
                                    fragment_feasibility, localized_feasible, periodic_fragment)
from invsem.errors import InvalidWitness
from invsem.presets import (FINITE_REP_PRESETS, FINITE_SEMIGROUP_PRESETS, bicyclic_on_N,
                            cuntz2_on_N, day2, rep_preset, semigroup_preset)
from invsem.setalg import UPSet
from invsem.typesem import paradox_fragment, paradox_search

SMALL_INVERSE = [p for p in FINITE_SEMIGROUP_PRESETS
                 if p != "day2" and semigroup_preset(p).size <= 16]


def test_day_example_has_no_invariant_measure():
    # a^{-1}{b} and b^{-1}{a} are empty, so both atoms vanish
    t0 = time.perf_counter()
    d = day_invariance_feasible(day2())
    assert not d.feasible and d.verify()
    assert time.perf_counter() - t0 < 1
    assert check_certificate(2, d.lp.constraints, d.certificate)
    js = d.to_json()
    assert js["status"] == "Infeasible" and js["verified"]


@pytest.mark.parametrize("name", SMALL_INVERSE)
def test_day_invariance_equals_localized_conditions(name):
    sg = semigroup_preset(name)
    day = day_invariance_feasible(sg)
    loc = localized_feasible(sg)
    assert day.feasible == loc.feasible
    assert day.verify() and loc.verify()
    if sg.size <= 12:
        assert localized_feasible(sg, exhaustive=True).feasible == loc.feasible
    for d in (day, loc):
        if d.feasible:
            rep = check_measure_properties(d.measure, sg)
            assert rep.day and rep.localized and rep.corollary
            assert rep.subsets_checked == 1 << sg.size


def test_measure_properties_detect_a_bad_measure():
    sg = semigroup_preset("symmetric_inverse(2)")
    uniform = [Fraction(1, sg.size)] * sg.size
    rep = check_measure_properties(uniform, sg)
    assert not rep.day and rep.failure is not None


@pytest.mark.parametrize("name", FINITE_REP_PRESETS)
def test_uniform_measure_is_domain_invariant(name):
    rep = rep_preset(name)
    n = rep.universe_size
    t0 = time.perf_counter()
    d = domain_measure_feasible(rep)
    assert d.feasible and d.verify()
    assert time.perf_counter() - t0 < 1
    sg, maps = rep.closure
    uniform = [Fraction(1, n)] * n
    for c in domain_constraints(n, maps, sg.labels):
        assert c.evaluate(uniform) == c.rhs


def _amenable_oracle(rep) -> bool:
    # a measure exists iff some orbit lies inside every domain
    _, maps = rep.closure
    common = set(range(rep.universe_size))
    for m in maps:
        common &= set(m.domain)
    for cls in rep.approx_classes(range(rep.universe_size), rep.universe_size):
        if set(cls) <= common:
            return True
    return False


@pytest.mark.parametrize("name", FINITE_REP_PRESETS)
def test_amenable_lp_matches_orbit_oracle(name):
    rep = rep_preset(name)
    d = amenable_feasible(rep)
    assert d.verify()
    assert d.feasible == _amenable_oracle(rep)


def test_bicyclic_density_fragment_is_feasible():
    rep = bicyclic_on_N()
    sets, rels = periodic_fragment(rep, 8)
    d = fragment_feasibility(rep, sets, rels, candidate=UPSet.natural_density)
    assert d.feasible and d.method == "candidate" and d.verify()
    assert any(isinstance(r, ActionRelation) for r in rels)
    for s, v in zip(d.sets, d.values):
        assert v == s.natural_density()


def test_cuntz_paradox_fragment_is_infeasible():
    rep = cuntz2_on_N()
    pw = paradox_search(rep, 2, 2, 2).witness
    sets, rels, whole = paradox_fragment(pw, rep)
    d = fragment_feasibility(rep, sets, rels, whole=whole)
    assert not d.feasible and d.verify()
    assert d.to_json()["certificate"]["combination"]


def test_relations_are_checked():
    rep = bicyclic_on_N()
    N = UPSet.naturals()
    with pytest.raises(InvalidWitness):
        fragment_feasibility(rep, [N], [UnionRelation(N, (UPSet.residue_class(0, 2),))])
    with pytest.raises(InvalidWitness):
        fragment_feasibility(rep, [N], [ActionRelation(N, "a", N)])
