"""Existence of invariant finitely additive measures, decided by exact LP."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from ..core import InverseSemigroup, PartialBijection, Semigroup
from ..errors import ClosureRequired, InvalidInput, InvalidWitness
from ..rep import Representation, Word
from ..setalg import UPSet
from .lp import Constraint, LPResult, solve_feasibility

FEASIBLE = "Feasible"
INFEASIBLE = "Infeasible"


@dataclass
class RationalMeasure:
    """Atomic measure (one weight per point) or values on a fragment of sets."""

    mode: str
    atoms: tuple[Fraction, ...] | None = None
    fragment: list[tuple[object, Fraction]] | None = None
    mass: Fraction = Fraction(1)

    def __call__(self, subset: Iterable[int]) -> Fraction:
        if self.mode != "atomic":
            for s, v in self.fragment:
                if s == subset:
                    return v
            raise KeyError("set not in fragment")
        return sum((self.atoms[x] for x in subset), Fraction(0))

    def to_json(self) -> dict:
        out = {"mode": self.mode, "mass": str(self.mass)}
        if self.mode == "atomic":
            out["atoms"] = [str(a) for a in self.atoms]
        else:
            out["fragment"] = [{"set": s.to_json(), "value": str(v)} for s, v in self.fragment]
        return out


@dataclass
class Decision:
    status: str
    measure: RationalMeasure | None
    lp: LPResult
    variables: list[str] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE

    @property
    def certificate(self):
        return self.lp.certificate

    def verify(self) -> bool:
        return self.lp.verify()

    def to_json(self) -> dict:
        out = {"status": self.status, "variables": self.variables,
               "lp": {"rows": self.lp.info.get("rows"), "pivots": self.lp.pivots}}
        if self.feasible:
            out["measure"] = self.measure.to_json()
        else:
            out["certificate"] = {"combination": [
                {"constraint_id": cid, "coefficient": str(c)} for cid, c in self.lp.certificate]}
        out["verified"] = self.verify()
        return out


def _decide(n: int, cons: list[Constraint], names: list[str]) -> Decision:
    res = solve_feasibility(n, cons)
    if res.feasible:
        return Decision(FEASIBLE, RationalMeasure("atomic", tuple(res.values)), res, names)
    return Decision(INFEASIBLE, None, res, names)


def _mass(n: int) -> Constraint:
    return Constraint("mass: total = 1", {j: Fraction(1) for j in range(n)}, Fraction(1))


def day_invariance_constraints(sg: Semigroup) -> list[Constraint]:
    """mu(s^{-1} A) = mu(A), reduced to singletons: sum_{t : s t = x} mu(t) = mu(x)."""
    n = sg.size
    lab = sg.labels
    cons = [_mass(n)]
    for s in range(n):
        fibres: dict[int, list[int]] = {x: [] for x in range(n)}
        for t in range(n):
            fibres[sg.mul(s, t)].append(t)
        for x in range(n):
            coeffs: dict[int, Fraction] = {}
            for t in fibres[x]:
                coeffs[t] = coeffs.get(t, 0) + Fraction(1)
            coeffs[x] = coeffs.get(x, 0) - Fraction(1)
            coeffs = {j: c for j, c in coeffs.items() if c}
            cons.append(Constraint(f"invariance s={lab[s]} x={lab[x]}", coeffs))
    return cons


def day_invariance_feasible(sg: Semigroup) -> Decision:
    """Is there a left invariant probability measure on the finite semigroup?"""
    return _decide(sg.size, day_invariance_constraints(sg), list(sg.labels))


def localized_constraints(sg: InverseSemigroup, exhaustive: bool = False) -> list[Constraint]:
    """mu(A) = mu(A ∩ s*sA) and mu(s*sA) = mu(sA) for every s.

    With `exhaustive` every subset A is written out (only for small S); otherwise
    the equivalent point conditions are used: mu vanishes off s*sS and
    mu(s x) = mu(x) on s*sS.
    """
    n = sg.size
    lab = sg.labels
    cons = [_mass(n)]
    if exhaustive:
        if n > 12:
            raise InvalidInput("exhaustive subset constraints need |S| <= 12")
        for s in range(n):
            p = sg.source_projection(s)
            for mask in range(1, 1 << n):
                A = [x for x in range(n) if mask >> x & 1]
                pA = set(sg.image(p, A))
                c1: dict[int, Fraction] = {}
                for x in A:
                    if x not in pA:
                        c1[x] = Fraction(1)
                cons.append(Constraint(f"restriction s={lab[s]} A={mask}", c1))
                c2: dict[int, Fraction] = {}
                for x in pA:
                    c2[x] = c2.get(x, 0) + 1
                for x in sg.image(s, A):
                    c2[x] = c2.get(x, 0) - 1
                cons.append(Constraint(f"transport s={lab[s]} A={mask}",
                                       {j: Fraction(c) for j, c in c2.items() if c}))
        return cons
    for s in range(n):
        p = sg.source_projection(s)
        for x in range(n):
            if sg.mul(p, x) != x:
                cons.append(Constraint(f"restriction s={lab[s]} x={lab[x]}", {x: Fraction(1)}))
            else:
                y = sg.mul(s, x)
                if y != x:
                    cons.append(Constraint(f"transport s={lab[s]} x={lab[x]}",
                                           {y: Fraction(1), x: Fraction(-1)}))
    return cons


def localized_feasible(sg: InverseSemigroup, exhaustive: bool = False) -> Decision:
    return _decide(sg.size, localized_constraints(sg, exhaustive), list(sg.labels))


def _elements(rep_or_maps, elements) -> tuple[int, list[PartialBijection], list[str]]:
    if isinstance(rep_or_maps, Representation):
        rep = rep_or_maps
        if not rep.is_finite:
            raise ClosureRequired("atomic measures need a finite universe and a finite closure")
        if elements is None:
            sg, maps = rep.closure
            return rep.universe_size, list(maps), list(sg.labels)
        maps = [rep.as_map(e) for e in elements]
        return rep.universe_size, maps, [str(e) for e in elements]
    maps = list(rep_or_maps if elements is None else elements)
    if not maps:
        raise InvalidInput("no elements given")
    return maps[0].universe_size, maps, [str(i) for i in range(len(maps))]


def domain_constraints(n: int, maps: Sequence[PartialBijection], labels: Sequence[str]
                       ) -> list[Constraint]:
    """mu(s x) = mu(x) for x in D_{s*s}."""
    cons = []
    seen = set()
    for m, lab in zip(maps, labels):
        for x, y in m.pairs:
            if x != y and (x, y) not in seen:
                seen.add((x, y))
                cons.append(Constraint(f"domain s={lab} x={x}",
                                       {y: Fraction(1), x: Fraction(-1)}))
    return cons


def localization_constraints(n: int, maps: Sequence[PartialBijection], labels: Sequence[str]
                             ) -> list[Constraint]:
    """mu(x) = 0 for x outside D_{s*s}."""
    cons = []
    seen = set()
    for m, lab in zip(maps, labels):
        for x in range(n):
            if m(x) is None and x not in seen:
                seen.add(x)
                cons.append(Constraint(f"localization s={lab} x={x}", {x: Fraction(1)}))
    return cons


def domain_measure_feasible(rep, elements=None) -> Decision:
    n, maps, labels = _elements(rep, elements)
    cons = [_mass(n)] + domain_constraints(n, maps, labels)
    return _decide(n, cons, [str(x) for x in range(n)])


def localization_feasible(rep, elements=None) -> Decision:
    n, maps, labels = _elements(rep, elements)
    cons = [_mass(n)] + localization_constraints(n, maps, labels)
    return _decide(n, cons, [str(x) for x in range(n)])


def amenable_feasible(rep, elements=None) -> Decision:
    """Both domain invariance and localization."""
    n, maps, labels = _elements(rep, elements)
    cons = ([_mass(n)] + domain_constraints(n, maps, labels)
            + localization_constraints(n, maps, labels))
    return _decide(n, cons, [str(x) for x in range(n)])


# ---------------------------------------------------------------------------
# checking a given measure on all (or sampled) subsets of a finite semigroup


@dataclass
class PropertyReport:
    day: bool
    restriction: bool
    transport: bool
    corollary: bool
    subsets_checked: int
    failure: tuple[str, int, int] | None = None

    @property
    def localized(self) -> bool:
        return self.restriction and self.transport

    def to_json(self) -> dict:
        return {"day": self.day, "restriction": self.restriction, "transport": self.transport,
                "corollary": self.corollary, "subsets_checked": self.subsets_checked,
                "failure": list(self.failure) if self.failure else None}


def check_measure_properties(measure: RationalMeasure | Sequence[Fraction], sg: InverseSemigroup,
                             samples: int | None = None, seed: int = 0) -> PropertyReport:
    """Evaluate the invariance identities for every s and every subset A of S.

    Subsets are exhaustive for |S| <= 16, otherwise `samples` random masks are drawn.
    """
    atoms = measure.atoms if isinstance(measure, RationalMeasure) else tuple(measure)
    n = sg.size
    if len(atoms) != n:
        raise InvalidInput("measure has the wrong number of atoms")
    T = sg.table
    if n <= 16 and samples is None:
        masks: Iterable[int] = range(1 << n)
        count = 1 << n
    else:
        rng = random.Random(seed)
        count = samples or 1000
        masks = [rng.getrandbits(n) for _ in range(count)]

    def mu(mask: int) -> Fraction:
        tot = Fraction(0)
        x = 0
        while mask:
            if mask & 1:
                tot += atoms[x]
            mask >>= 1
            x += 1
        return tot

    def img(s: int, mask: int) -> int:
        out, row, x = 0, T[s], 0
        while mask:
            if mask & 1:
                out |= 1 << row[x]
            mask >>= 1
            x += 1
        return out

    fibre = [[0] * n for _ in range(n)]
    for s in range(n):
        for t in range(n):
            fibre[s][T[s][t]] |= 1 << t

    def pre(s: int, mask: int) -> int:
        out, x = 0, 0
        while mask:
            if mask & 1:
                out |= fibre[s][x]
            mask >>= 1
            x += 1
        return out

    flags = {"day": True, "restriction": True, "transport": True, "corollary": True}
    failure = None
    masks = list(masks)
    for s in range(n):
        p = sg.source_projection(s)
        for mask in masks:
            mA = mu(mask)
            pA = img(p, mask)
            checks = {
                "day": mu(pre(s, mask)) == mA,
                "restriction": mA == mu(mask & pA),
                "transport": mu(pA) == mu(img(s, mask)),
                "corollary": mA == mu(img(s, mask & pA)),
            }
            for k, ok in checks.items():
                if not ok and flags[k]:
                    flags[k] = False
                    failure = failure or (k, s, mask)
    return PropertyReport(flags["day"], flags["restriction"], flags["transport"],
                          flags["corollary"], count, failure)


# ---------------------------------------------------------------------------
# fragments of sets with witnessed relations


@dataclass(frozen=True)
class UnionRelation:
    """target is the disjoint union of parts."""

    target: object
    parts: tuple


@dataclass(frozen=True)
class ActionRelation:
    """source lies in the domain of `word` and is carried onto target."""

    source: object
    word: object
    target: object


def verify_relation(rel, rep: Representation) -> None:
    if isinstance(rel, UnionRelation):
        acc = rep.empty_set()
        for part in rel.parts:
            if not acc.isdisjoint(part):
                raise InvalidWitness("union parts are not pairwise disjoint")
            acc = acc | part
        if acc != rel.target:
            raise InvalidWitness("union parts do not cover the target")
    elif isinstance(rel, ActionRelation):
        if not rel.source <= rep.domain_of(rel.word):
            raise InvalidWitness("source is not inside the domain of the word")
        if rep.act(rel.word, rel.source) != rel.target:
            raise InvalidWitness("word does not carry source onto target")
    else:
        raise InvalidInput(f"unknown relation {rel!r}")


@dataclass
class FragmentDecision:
    status: str
    sets: list
    relations: list
    values: list[Fraction] | None
    certificate: list[tuple[str, Fraction]] | None
    method: str
    constraints: list[Constraint]

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE

    def measure(self) -> RationalMeasure:
        return RationalMeasure("fragment", fragment=list(zip(self.sets, self.values)))

    def verify(self) -> bool:
        res = LPResult(self.feasible, len(self.sets), self.constraints, self.values,
                       self.certificate)
        return res.verify()

    def to_json(self) -> dict:
        out = {"status": self.status, "method": self.method, "sets": len(self.sets),
               "relations": len(self.relations), "verified": self.verify()}
        if self.feasible:
            out["measure"] = self.measure().to_json()
        else:
            out["certificate"] = {"combination": [
                {"constraint_id": cid, "coefficient": str(c)} for cid, c in self.certificate]}
        return out


def fragment_feasibility(rep: Representation, sets: Iterable, relations: Iterable,
                         whole=None, candidate: Callable[[object], Fraction] | None = None,
                         check: bool = True) -> FragmentDecision:
    """Is there nu >= 0 on the fragment with nu(whole) = 1 respecting every relation?

    `candidate` (e.g. natural density) is tried first and returned when it satisfies
    all constraints exactly; otherwise the LP decides.
    """
    whole = rep.full_set() if whole is None else whole
    order: list = []
    index: dict = {}

    def ix(s) -> int:
        if s not in index:
            index[s] = len(order)
            order.append(s)
        return index[s]

    ix(whole)
    for s in sets:
        ix(s)
    rels = list(relations)
    cons = [Constraint("mass: whole = 1", {0: Fraction(1)}, Fraction(1))]
    for k, rel in enumerate(rels):
        if check:
            verify_relation(rel, rep)
        if isinstance(rel, UnionRelation):
            coeffs: dict[int, Fraction] = {ix(rel.target): Fraction(1)}
            for part in rel.parts:
                j = ix(part)
                coeffs[j] = coeffs.get(j, 0) - 1
            cons.append(Constraint(f"union #{k}", {j: c for j, c in coeffs.items() if c}))
        else:
            a, b = ix(rel.source), ix(rel.target)
            if a != b:
                cons.append(Constraint(f"action #{k} {rep.render(rep.word(rel.word))}",
                                       {a: Fraction(1), b: Fraction(-1)}))
    n = len(order)
    if candidate is not None:
        vals = [Fraction(candidate(s)) for s in order]
        if all(v >= 0 for v in vals) and all(c.evaluate(vals) == c.rhs for c in cons):
            return FragmentDecision(FEASIBLE, order, rels, vals, None, "candidate", cons)
    res = solve_feasibility(n, cons)
    if res.feasible:
        return FragmentDecision(FEASIBLE, order, rels, res.values, None, "lp", cons)
    return FragmentDecision(INFEASIBLE, order, rels, None, res.certificate, "lp", cons)


def periodic_fragment(rep: Representation, max_period: int, max_threshold: int = 1
                      ) -> tuple[list, list]:
    """All UPSets with period <= max_period and threshold <= max_threshold, with relations.

    Relations: splitting a periodic set into residue classes, refining residue
    classes to larger periods, cutting off the part below the threshold, and
    every generator letter that carries a fragment set onto a fragment set.
    """
    if rep.is_finite:
        raise InvalidInput("periodic fragments live on N")
    periodic = set()
    for p in range(1, max_period + 1):
        for bits in range(1, 1 << p):
            periodic.add(UPSet(p, [r for r in range(p) if bits >> r & 1]))
    sets = set(periodic)
    for A in periodic:
        for t in range(1, max_threshold + 1):
            tail = A & UPSet.interval(t)
            for hb in range(1 << t):
                head = UPSet.finite(x for x in range(t) if hb >> x & 1)
                sets.add(tail | head)
    for t in range(1, max_threshold + 1):
        for hb in range(1, 1 << t):
            sets.add(UPSet.finite(x for x in range(t) if hb >> x & 1))
    sets.discard(UPSet.empty())
    ordered = sorted(sets, key=UPSet.sort_key)
    rels: list = []
    for A in ordered:
        if A.threshold == 0:
            if len(A.residues) > 1:
                rels.append(UnionRelation(A, tuple(UPSet.residue_class(r, A.period)
                                                   for r in sorted(A.residues))))
            if len(A.residues) == 1:
                r = next(iter(A.residues))
                for k in range(2, max_period // A.period + 1):
                    q = k * A.period
                    rels.append(UnionRelation(A, tuple(UPSet.residue_class(r + j * A.period, q)
                                                       for j in range(k))))
        else:
            t = A.threshold
            tail = A & UPSet.interval(t)
            head = A - tail
            if not tail.is_empty() and not head.is_empty():
                rels.append(UnionRelation(A, (tail, head)))
            if not tail.is_empty():
                full = UPSet(A.period, A.residues)
                below = full - tail
                if not below.is_empty():
                    rels.append(UnionRelation(full, (tail, below)))
    present = set(ordered)
    for letter in rep.letters():
        w = Word((letter,))
        m = rep.eval_word(w)
        for A in ordered:
            if A <= m.domain:
                B = m.image(A)
                if B in present and B != A:
                    rels.append(ActionRelation(A, w, B))
    return ordered, rels
