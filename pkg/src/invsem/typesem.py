"""Equidecomposition witnesses between leveled sets, and the paradox constructions.

A leveled set is a finite family of subsets of X indexed by natural levels and
stands for the disjoint union of its levels.  A witness A ~ B is a list of
pieces (set, word, level_from, level_to): the sets partition A level by level,
each lies in the domain of its word, and the images partition B.
"""
from __future__ import annotations

import itertools
import math
import random
import sys
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (InvalidInput, InvalidWitness, IterationCapExceeded, NotRegular)
from .rep import Representation, Word
from .setalg import FiniteSet, UPSet

DEFAULT_SB_CAP = 64
# periodic sets whose period outgrows this are too costly to keep iterating
MAX_SB_PERIOD = 1 << 12


class LeveledSet:
    """Mapping level -> nonempty set; empty levels are dropped."""

    __slots__ = ("parts",)

    def __init__(self, parts: Mapping[int, object] | Iterable[tuple[int, object]] = ()):
        items = parts.items() if isinstance(parts, Mapping) else parts
        out: dict[int, object] = {}
        for lvl, s in items:
            if lvl < 0:
                raise InvalidInput("levels are natural numbers")
            if lvl in out:
                out[lvl] = out[lvl] | s
            else:
                out[lvl] = s
        self.parts = {l: s for l, s in sorted(out.items()) if not s.is_empty()}

    @classmethod
    def single(cls, s, level: int = 0) -> "LeveledSet":
        return cls({level: s})

    @classmethod
    def copies(cls, s, n: int, start: int = 0) -> "LeveledSet":
        return cls({start + i: s for i in range(n)})

    def levels(self) -> list[int]:
        return list(self.parts)

    def get(self, level: int, rep: Representation):
        return self.parts.get(level, rep.empty_set())

    def is_empty(self) -> bool:
        return not self.parts

    def shift(self, k: int) -> "LeveledSet":
        return LeveledSet({l + k: s for l, s in self.parts.items()})

    def union(self, other: "LeveledSet") -> "LeveledSet":
        return LeveledSet(list(self.parts.items()) + list(other.parts.items()))

    __or__ = union

    def intersect(self, other: "LeveledSet") -> "LeveledSet":
        return LeveledSet({l: s & other.parts[l] for l, s in self.parts.items()
                           if l in other.parts})

    __and__ = intersect

    def difference(self, other: "LeveledSet") -> "LeveledSet":
        return LeveledSet({l: (s - other.parts[l]) if l in other.parts else s
                           for l, s in self.parts.items()})

    __sub__ = difference

    def is_subset(self, other: "LeveledSet") -> bool:
        return self.difference(other).is_empty()

    __le__ = is_subset

    def isdisjoint(self, other: "LeveledSet") -> bool:
        return self.intersect(other).is_empty()

    def points(self) -> list[tuple[int, int]]:
        """(level, x) pairs; finite universes only."""
        out = []
        for l, s in self.parts.items():
            if isinstance(s, UPSet) and not s.is_finite():
                raise InvalidInput("infinite level has no point list")
            out.extend((l, x) for x in s)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, LeveledSet) and self.parts == other.parts

    def __hash__(self) -> int:
        return hash(tuple(self.parts.items()))

    def __repr__(self) -> str:
        return "LeveledSet({" + ", ".join(f"{l}: {s!r}" for l, s in self.parts.items()) + "})"

    def to_json(self) -> list[dict]:
        return [{"level": l, "set": s.to_json()} for l, s in self.parts.items()]


@dataclass(frozen=True)
class Piece:
    set: object
    word: Word
    level_from: int = 0
    level_to: int = 0


@dataclass
class EquidecompositionWitness:
    pieces: list[Piece]
    source: LeveledSet
    target: LeveledSet

    def to_json(self, rep: Representation) -> dict:
        return {"pieces": [{"set": p.set.to_json(), "word": rep.render(p.word),
                            "level_from": p.level_from, "level_to": p.level_to}
                           for p in self.pieces],
                "source": self.source.to_json(), "target": self.target.to_json()}


def leveled_from_json(data, rep: Representation) -> LeveledSet:
    if isinstance(data, (str, list)) and not (isinstance(data, list) and data
                                              and isinstance(data[0], dict)):
        return LeveledSet.single(rep.make_set(data))
    return LeveledSet([(int(d["level"]), rep.make_set(d["set"])) for d in data])


def witness_from_json(data: dict, rep: Representation) -> EquidecompositionWitness:
    try:
        pieces = [Piece(rep.make_set(p["set"]), rep.word(p.get("word", "1")),
                        int(p.get("level_from", 0)), int(p.get("level_to", 0)))
                  for p in data["pieces"]]
        src = leveled_from_json(data["source"], rep)
        tgt = leveled_from_json(data["target"], rep)
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed witness: {exc}") from exc
    return EquidecompositionWitness(pieces, src, tgt)


def piece_image(p: Piece, rep: Representation):
    return rep.act(p.word, p.set)


def witness_problems(w: EquidecompositionWitness, rep: Representation) -> list[str]:
    problems = []
    src: dict[int, object] = {}
    tgt: dict[int, object] = {}
    for i, p in enumerate(w.pieces):
        if not p.set <= rep.domain_of(p.word):
            problems.append(f"piece {i} is not inside the domain of {rep.render(p.word)}")
        img = piece_image(p, rep)
        a = src.get(p.level_from, rep.empty_set())
        if not a.isdisjoint(p.set):
            problems.append(f"piece {i} overlaps another piece at source level {p.level_from}")
        src[p.level_from] = a | p.set
        b = tgt.get(p.level_to, rep.empty_set())
        if not b.isdisjoint(img):
            problems.append(f"image of piece {i} overlaps another image at level {p.level_to}")
        tgt[p.level_to] = b | img
    if LeveledSet(src) != w.source:
        problems.append("pieces do not partition the source")
    if LeveledSet(tgt) != w.target:
        problems.append("images do not partition the target")
    return problems


def verify_witness(w: EquidecompositionWitness, rep: Representation) -> bool:
    problems = witness_problems(w, rep)
    if problems:
        raise InvalidWitness("; ".join(problems))
    return True


def _clean(pieces: Iterable[Piece]) -> list[Piece]:
    return [p for p in pieces if not p.set.is_empty()]


def inverse_witness(w: EquidecompositionWitness, rep: Representation) -> EquidecompositionWitness:
    pieces = [Piece(piece_image(p, rep), p.word.star(), p.level_to, p.level_from)
              for p in w.pieces]
    return EquidecompositionWitness(_clean(pieces), w.target, w.source)


def identity_witness(A: LeveledSet) -> EquidecompositionWitness:
    return EquidecompositionWitness([Piece(s, Word(), l, l) for l, s in A.parts.items()], A, A)


def image_of(w: EquidecompositionWitness, S: LeveledSet, rep: Representation) -> LeveledSet:
    """Image of a leveled subset of the source."""
    out = []
    for p in w.pieces:
        part = p.set & S.get(p.level_from, rep)
        if not part.is_empty():
            out.append((p.level_to, rep.act(p.word, part)))
    return LeveledSet(out)


def compose_witnesses(w1: EquidecompositionWitness, w2: EquidecompositionWitness,
                      rep: Representation, strict: bool = True) -> EquidecompositionWitness:
    """A ~ B and B ~ C give A ~ C with pieces s_i*(s_i A_i ∩ B_j) and words t_j s_i.

    With strict=False the first target only needs to lie inside the second
    source, and the result's target is the image.
    """
    if strict and w1.target != w2.source:
        raise InvalidWitness("middle sets differ")
    if not strict and not w1.target <= w2.source:
        raise InvalidWitness("first target is not inside the second source")
    pieces = []
    for p in w1.pieces:
        img = piece_image(p, rep)
        for q in w2.pieces:
            if q.level_from != p.level_to:
                continue
            meet = img & q.set
            if meet.is_empty():
                continue
            pieces.append(Piece(rep.act(p.word.star(), meet), q.word * p.word,
                                p.level_from, q.level_to))
    target = w2.target if strict else image_of(w2, w1.target, rep)
    return EquidecompositionWitness(pieces, w1.source, target)


def _max_level(w: EquidecompositionWitness) -> int | None:
    lv = w.source.levels() + w.target.levels()
    return max(lv) if lv else None


def _min_level(w: EquidecompositionWitness) -> int | None:
    lv = w.source.levels() + w.target.levels()
    return min(lv) if lv else None


def shift_witness(w: EquidecompositionWitness, k: int) -> EquidecompositionWitness:
    return EquidecompositionWitness([Piece(p.set, p.word, p.level_from + k, p.level_to + k)
                                     for p in w.pieces], w.source.shift(k), w.target.shift(k))


def add_witnessed(a: EquidecompositionWitness, b: EquidecompositionWitness
                  ) -> tuple[EquidecompositionWitness, int]:
    """Witness of [A] + [A'] = [B] + [B'] with b moved up by the returned shift."""
    top, bottom = _max_level(a), _min_level(b)
    k = 0 if top is None or bottom is None else max(0, top + 1 - bottom)
    bs = shift_witness(b, k)
    return EquidecompositionWitness(a.pieces + bs.pieces, a.source | bs.source,
                                    a.target | bs.target), k


# ---------------------------------------------------------------------------
# Schröder–Bernstein


@dataclass
class SBResult:
    witness: EquidecompositionWitness
    invariant_part: LeveledSet
    iterations: int


def schroeder_bernstein(w1: EquidecompositionWitness, A: LeveledSet,
                        w2: EquidecompositionWitness, B: LeveledSet, rep: Representation,
                        cap: int = DEFAULT_SB_CAP) -> SBResult:
    """From A ⊔ A0 ~ B (w1) and B ⊔ B0 ~ A (w2) build A ~ B.

    C0 = A0, C_{n+1} = psi(phi(C_n)); the union C is iterated until no new
    points appear.  Raises IterationCapExceeded (with the partial C) otherwise.
    """
    verify_witness(w1, rep)
    verify_witness(w2, rep)
    if not A <= w1.source or w1.target != B or not B <= w2.source or w2.target != A:
        raise InvalidWitness("witnesses do not have the shape A ⊔ A0 ~ B and B ⊔ B0 ~ A")
    C = w1.source - A
    frontier = C
    n = 0
    while True:
        nxt = image_of(w2, image_of(w1, frontier, rep), rep)
        new = nxt - C
        if new.is_empty():
            break
        n += 1
        if n > cap:
            raise IterationCapExceeded(f"no stabilisation after {cap} iterations",
                                       state={"C": C, "iterations": n - 1})
        C = C | new
        frontier = new
        if any(getattr(x, "period", 1) > MAX_SB_PERIOD for x in C.parts.values()):
            raise IterationCapExceeded(f"period of the iterate exceeds {MAX_SB_PERIOD}",
                                       state={"C": C, "iterations": n})
    rest = A - C
    pieces = [Piece(p.set & C.get(p.level_from, rep), p.word, p.level_from, p.level_to)
              for p in w1.pieces]
    for q in w2.pieces:
        img = piece_image(q, rep) & rest.get(q.level_to, rep)
        pieces.append(Piece(img, q.word.star(), q.level_to, q.level_from))
    middle = EquidecompositionWitness(_clean(pieces), w1.source, w2.source)
    verify_witness(middle, rep)
    b_to_a = compose_witnesses(compose_witnesses(inverse_witness(w1, rep), middle, rep), w2, rep)
    out = inverse_witness(b_to_a, rep)
    verify_witness(out, rep)
    return SBResult(out, C, n)


# ---------------------------------------------------------------------------
# König cancellation


@dataclass
class CancelResult:
    witness: EquidecompositionWitness
    labels: dict[tuple[int, int], LeveledSet]  # (j, k) -> C_{j,k} inside A
    targets: dict[tuple[int, int], LeveledSet]  # (j, k) -> D_{j,k} inside B


def _point_map(w: EquidecompositionWitness, rep: Representation
               ) -> dict[tuple[int, int], tuple[tuple[int, int], Word]]:
    out = {}
    for p in w.pieces:
        for x in p.set:
            out[(p.level_from, x)] = ((p.level_to, rep.apply(p.word, x)), p.word)
    return out


def _perfect_matching(left: Sequence, adj: Mapping) -> dict | None:
    """Kuhn's augmenting paths; adj[u] is a list of (v, label)."""
    match_r: dict = {}
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * len(left) + 100))

    def augment(u, seen) -> bool:
        for v, lab in adj[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in match_r or augment(match_r[v][0], seen):
                match_r[v] = (u, lab)
                return True
        return False

    for u in left:
        if not augment(u, set()):
            return None
    return {u: (v, lab) for v, (u, lab) in match_r.items()}


def koenig_cancel(A: LeveledSet, B: LeveledSet, copies_a: Sequence[EquidecompositionWitness],
                  copies_b: Sequence[EquidecompositionWitness], chi: EquidecompositionWitness,
                  rep: Representation) -> CancelResult:
    """From n[A] = n[B] build [A] = [B].

    copies_a[i] witnesses A ~ A_i and copies_b[j] witnesses B ~ B_j, with the A_i
    (and B_j) pairwise disjoint; chi witnesses ⊔A_i ~ ⊔B_j.  The bipartite
    multigraph joining a to b whenever chi(phi_j a) = psi_k b is n-regular and a
    perfect matching of it gives the bijection.
    """
    n = len(copies_a)
    if n == 0 or len(copies_b) != n:
        raise InvalidInput("need the same positive number of copies of A and B")
    for w in list(copies_a) + list(copies_b) + [chi]:
        verify_witness(w, rep)
    union_a, union_b = LeveledSet(), LeveledSet()
    for w in copies_a:
        if w.source != A or not union_a.isdisjoint(w.target):
            raise InvalidWitness("copies of A must start at A and be pairwise disjoint")
        union_a = union_a | w.target
    for w in copies_b:
        if w.source != B or not union_b.isdisjoint(w.target):
            raise InvalidWitness("copies of B must start at B and be pairwise disjoint")
        union_b = union_b | w.target
    if chi.source != union_a or chi.target != union_b:
        raise InvalidWitness("chi must map the copies of A onto the copies of B")
    if not rep.is_finite:
        if n == 1:
            w = compose_witnesses(compose_witnesses(copies_a[0], chi, rep),
                                  inverse_witness(copies_b[0], rep), rep)
            verify_witness(w, rep)
            return CancelResult(w, {(0, 0): A}, {(0, 0): B})
        return _koenig_periodic(A, B, copies_a, copies_b, chi, rep)
    fa = [_point_map(w, rep) for w in copies_a]
    fchi = _point_map(chi, rep)
    back = []
    for w in copies_b:
        back.append(_point_map(inverse_witness(w, rep), rep))
    left = A.points()
    adj: dict = {}
    degree: dict = {b: 0 for b in B.points()}
    for x in left:
        edges = []
        for j in range(n):
            a, u = fa[j][x]
            y, c = fchi[a]
            k = next(k for k in range(n) if y in back[k])
            b, v = back[k][y]
            edges.append((b, (j, k, v * c * u)))
            degree[b] += 1
        adj[x] = edges
    if any(d != n for d in degree.values()):
        raise NotRegular("the class multigraph is not regular")
    matching = _perfect_matching(left, adj)
    if matching is None:
        raise NotRegular("no perfect matching found")
    groups: dict[tuple[Word, int, int], list[int]] = {}
    labels: dict[tuple[int, int], list] = {}
    targets: dict[tuple[int, int], list] = {}
    for (lx, x), ((lb, b), (j, k, word)) in sorted(matching.items()):
        groups.setdefault((word, lx, lb), []).append(x)
        labels.setdefault((j, k), []).append((lx, x))
        targets.setdefault((j, k), []).append((lb, b))
    size = rep.universe_size
    pieces = [Piece(FiniteSet.of(size, xs), word, lx, lb)
              for (word, lx, lb), xs in sorted(groups.items(), key=lambda t: (t[0][1], t[1]))]
    out = EquidecompositionWitness(pieces, A, B)
    verify_witness(out, rep)

    def lset(pts):
        by: dict[int, list[int]] = {}
        for l, x in pts:
            by.setdefault(l, []).append(x)
        return LeveledSet({l: FiniteSet.of(size, xs) for l, xs in by.items()})

    return CancelResult(out, {jk: lset(v) for jk, v in labels.items()},
                        {jk: lset(v) for jk, v in targets.items()})


def _koenig_periodic(A, B, copies_a, copies_b, chi, rep, max_modulus: int = 8,
                     max_atoms: int = 64) -> CancelResult:
    """Cancellation on N: look for a matching constant on periodic atoms of A.

    Route j sends a to psi^-1 chi phi_j a.  A is cut into atoms by the route
    pieces and by residues mod m; choosing one route per atom so that the images
    tile B is an exact-cover problem, solved on bitmasks.  Perfect matchings of
    the class graph need not be periodic, in which case IterationCapExceeded.
    """
    union_b = LeveledSet()
    for w in copies_b:
        union_b = union_b | w.target
    back = EquidecompositionWitness(
        [p for w in copies_b for p in inverse_witness(w, rep).pieces], union_b, B)
    routes = [compose_witnesses(compose_witnesses(w, chi, rep, strict=False), back, rep,
                                strict=False)
              for w in copies_a]
    cuts = [LeveledSet.single(p.set, p.level_from) for r in routes for p in r.pieces]
    levels = sorted(set(A.levels()) | set(B.levels()))
    for modulus in range(1, max_modulus + 1):
        atoms = [A]
        for cut in cuts + [LeveledSet({l: UPSet.residue_class(r, modulus) for l in A.levels()})
                           for r in range(modulus)]:
            nxt = []
            for at in atoms:
                nxt.extend(x for x in (at & cut, at - cut) if not x.is_empty())
            atoms = nxt
        if len(atoms) > max_atoms:
            break
        options = []  # (atom index, route, pieces, image)
        for i, at in enumerate(atoms):
            for j, r in enumerate(routes):
                pieces = [Piece(p.set & at.get(p.level_from, rep), p.word, p.level_from, p.level_to)
                          for p in r.pieces]
                pieces = _clean(pieces)
                img = LeveledSet()
                for p in pieces:
                    img = img | LeveledSet.single(piece_image(p, rep), p.level_to)
                options.append((i, j, pieces, img))
        enc, stride = _bit_encoder([x for o in options for x in o[3].parts.values()]
                                   + list(B.parts.values()))

        def code(ls: LeveledSet) -> int:
            return sum(enc(x) << (stride * levels.index(l)) for l, x in ls.parts.items())

        coded = [(i, j, pieces, code(img)) for i, j, pieces, img in options]
        full = code(B)
        chosen: list = []

        def solve(remaining: int, used: int) -> bool:
            if not remaining:
                return used == (1 << len(atoms)) - 1
            low = remaining & -remaining
            for i, j, pieces, im in coded:
                if used >> i & 1 or not im & low or im & ~remaining:
                    continue
                chosen.append((i, j, pieces))
                if solve(remaining & ~im, used | 1 << i):
                    return True
                chosen.pop()
            return False

        if solve(full, 0):
            cand = EquidecompositionWitness([p for _, _, ps in chosen for p in ps], A, B)
            verify_witness(cand, rep)
            lab: dict = {}
            for i, j, _ in chosen:
                lab[(j, -1)] = lab.get((j, -1), LeveledSet()) | atoms[i]
            return CancelResult(cand, lab, {})
    raise IterationCapExceeded("no periodic matching found within the atom budget",
                               state={"routes": routes})


# ---------------------------------------------------------------------------
# paradoxical decompositions


@dataclass
class ParadoxWitness:
    """A = ⊔ s_i A_i = ⊔ t_j B_j with all A_i, B_j pairwise disjoint inside A."""

    target: object
    pieces_a: list[tuple[object, Word]]
    pieces_b: list[tuple[object, Word]]

    def to_json(self, rep: Representation) -> dict:
        return {"A": self.target.to_json(),
                "pieces_A": [{"A_i": s.to_json(), "s_i": rep.render(w)} for s, w in self.pieces_a],
                "pieces_B": [{"B_j": s.to_json(), "t_j": rep.render(w)} for s, w in self.pieces_b]}


def paradox_from_json(data: dict, rep: Representation) -> ParadoxWitness:
    try:
        return ParadoxWitness(
            rep.make_set(data["A"]),
            [(rep.make_set(p["A_i"]), rep.word(p["s_i"])) for p in data["pieces_A"]],
            [(rep.make_set(p["B_j"]), rep.word(p["t_j"])) for p in data["pieces_B"]])
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed paradox witness: {exc}") from exc


def paradox_problems(pw: ParadoxWitness, rep: Representation) -> list[str]:
    problems = []
    A = pw.target
    seen = rep.empty_set()
    for tag, pieces in (("A", pw.pieces_a), ("B", pw.pieces_b)):
        if not pieces and not A.is_empty():
            problems.append(f"no {tag} pieces")
        cover = rep.empty_set()
        for i, (s, w) in enumerate(pieces):
            if not s <= A:
                problems.append(f"{tag} piece {i} is not inside A")
            if not s <= rep.domain_of(w):
                problems.append(f"{tag} piece {i} is not inside the domain of its word")
            if not seen.isdisjoint(s):
                problems.append(f"{tag} piece {i} meets an earlier piece")
            seen = seen | s
            img = rep.act(w, s)
            if not cover.isdisjoint(img):
                problems.append(f"image of {tag} piece {i} meets an earlier image")
            cover = cover | img
        if cover != A:
            problems.append(f"images of the {tag} pieces do not cover A")
    return problems


def verify_paradox(pw: ParadoxWitness, rep: Representation) -> bool:
    problems = paradox_problems(pw, rep)
    if problems:
        raise InvalidWitness("; ".join(problems))
    return True


def paradox_fragment(pw: ParadoxWitness, rep: Representation) -> tuple[list, list, object]:
    """Sets and relations a paradox witness forces on any measure normalised at A."""
    from .decide.measures import ActionRelation, UnionRelation

    verify_paradox(pw, rep)
    A = pw.target
    sets = [A]
    rels: list = []
    used = rep.empty_set()
    for pieces in (pw.pieces_a, pw.pieces_b):
        images = []
        for s, w in pieces:
            img = rep.act(w, s)
            sets += [s, img]
            images.append(img)
            rels.append(ActionRelation(s, w, img))
            used = used | s
        rels.append(UnionRelation(A, tuple(images)))
    rest = A - used
    parts = tuple(s for s, _ in pw.pieces_a) + tuple(s for s, _ in pw.pieces_b)
    if not rest.is_empty():
        sets.append(rest)
        parts = parts + (rest,)
    rels.append(UnionRelation(A, parts))
    return sets, rels, A


def paradox_to_witness(pw: ParadoxWitness, rep: Representation) -> EquidecompositionWitness:
    """The witness A ⊔ A ~ A' with A' = ⊔A_i ⊔ ⊔B_j inside A, read from a paradox witness."""
    pieces = []
    for lvl, group in ((0, pw.pieces_a), (1, pw.pieces_b)):
        for s, w in group:
            pieces.append(Piece(rep.act(w, s), w.star(), lvl, 0))
    used = rep.empty_set()
    for s, _ in pw.pieces_a + pw.pieces_b:
        used = used | s
    return EquidecompositionWitness(pieces, LeveledSet.copies(pw.target, 2), LeveledSet.single(used))


def witness_to_paradox(w: EquidecompositionWitness, rep: Representation) -> ParadoxWitness:
    """Read a paradox witness from A ~ A ⊔ A (source level 0, target levels 0 and 1)."""
    src = w.source.parts
    if list(src) != [0] or w.target.levels() != [0, 1] or any(
            s != src[0] for s in w.target.parts.values()):
        raise InvalidWitness("expected a witness A ~ A ⊔ A")
    inv = inverse_witness(w, rep)
    pa, pb = [], []
    for p in inv.pieces:
        img = piece_image(p, rep)
        (pa if p.level_from == 0 else pb).append((img, p.word.star()))
    pw = ParadoxWitness(src[0], pa, pb)
    verify_paradox(pw, rep)
    return pw


# ---------------------------------------------------------------------------
# absorption: (n+1)[A] <= n[A] gives [A] = 2[A]


@dataclass
class AbsorbResult:
    witness: EquidecompositionWitness  # A ~ A ⊔ A
    paradox: ParadoxWitness
    steps: list[str] = field(default_factory=list)


def absorb(n: int, embedding: EquidecompositionWitness, A, rep: Representation,
           cap: int = DEFAULT_SB_CAP) -> AbsorbResult:
    """`embedding` maps (n+1) copies of A (levels 0..n) into n copies (levels 0..n-1)."""
    if n < 1:
        raise InvalidInput("n must be positive")
    if A.is_empty():
        return AbsorbResult(EquidecompositionWitness([], LeveledSet(), LeveledSet()),
                            ParadoxWitness(A, [], []), ["A is empty"])
    big = LeveledSet.copies(A, n + 1)
    small = LeveledSet.copies(A, n)
    verify_witness(embedding, rep)
    if embedding.source != big or not embedding.target <= small:
        raise InvalidWitness("embedding must map (n+1) copies of A into n copies")
    steps = []
    # (n+m)A into nA for m = 1..n
    g = embedding
    for m in range(1, n):
        top = LeveledSet.copies(A, n + m + 1)
        shift = [Piece(A, Word(), l, l - 1) for l in range(n + 1, n + m + 1)]
        h_target = embedding.target | LeveledSet.copies(A, m, start=n)
        h = EquidecompositionWitness(embedding.pieces + shift, top, h_target)
        verify_witness(h, rep)
        g = compose_witnesses(h, g, rep, strict=False)
        steps.append(f"embedded {n + m + 1} copies into {n}")
    two_n = LeveledSet.copies(A, 2 * n)
    verify_witness(g, rep)
    slack = small - g.target
    if slack.is_empty():
        chi = inverse_witness(g, rep)
        steps.append("embedding is onto; no Schröder–Bernstein step needed")
    else:
        w1 = identity_witness(two_n)
        w2 = EquidecompositionWitness(
            g.pieces + [Piece(s, Word(), l + 2 * n, l) for l, s in slack.parts.items()],
            two_n | slack.shift(2 * n), small)
        sb = schroeder_bernstein(w1, small, w2, two_n, rep, cap=cap)
        chi = sb.witness
        steps.append(f"Schröder–Bernstein stabilised after {sb.iterations} iterations")
    copies_a = [EquidecompositionWitness([Piece(A, Word(), 0, i)], LeveledSet.single(A),
                                         LeveledSet.single(A, i)) for i in range(n)]
    pair = LeveledSet.copies(A, 2)
    copies_b = [EquidecompositionWitness([Piece(A, Word(), 0, 2 * j), Piece(A, Word(), 1, 2 * j + 1)],
                                         pair, LeveledSet.copies(A, 2, start=2 * j))
                for j in range(n)]
    res = koenig_cancel(LeveledSet.single(A), pair, copies_a, copies_b, chi, rep)
    steps.append("cancelled the common factor")
    pw = witness_to_paradox(res.witness, rep)
    return AbsorbResult(res.witness, pw, steps)


# ---------------------------------------------------------------------------
# bounded search for paradoxical decompositions


@dataclass
class ParadoxSearchResult:
    status: str
    witness: ParadoxWitness | None
    candidates: int

    def to_json(self, rep: Representation) -> dict:
        return {"status": self.status, "candidates": self.candidates,
                "witness": self.witness.to_json(rep) if self.witness else None}


def _candidate_sets(rep: Representation, A, period: int) -> list:
    if rep.is_finite:
        pts = list(A)
        if len(pts) > 16:
            raise InvalidInput("finite search limited to 16 points")
        out = []
        for r in range(1, len(pts) + 1):
            out.extend(FiniteSet.of(rep.universe_size, c) for c in itertools.combinations(pts, r))
        return out
    seen = set()
    for p in range(1, period + 1):
        for bits in range(1, 1 << p):
            s = UPSet(p, [r for r in range(p) if bits >> r & 1])
            if s <= A:
                seen.add(s)
    return sorted(seen, key=UPSet.sort_key)


def _bit_encoder(sets: Sequence):
    """Exact bitmask encoding for a family of finite or periodic sets, and its width.

    Periodic sets agree beyond the largest threshold with period the lcm of
    their periods, so membership on [0, top + lcm) determines each of them.
    """
    if isinstance(sets[0], FiniteSet):
        return (lambda x: x.bits), sets[0].universe_size
    lcm, top = 1, 0
    for x in sets:
        lcm = lcm * x.period // math.gcd(lcm, x.period)
        top = max(top, x.threshold)
    width = top + lcm
    return (lambda x: sum(1 << n for n in range(width) if n in x)), width


def _min_point(s):
    return s.min() if isinstance(s, UPSet) else next(iter(s))


def paradox_search(rep: Representation, word_len: int, period: int, max_pieces: int,
                   target=None) -> ParadoxSearchResult:
    """Look for A = ⊔ s_i A_i = ⊔ t_j B_j with pieces from periodic sets (or all subsets
    of a finite X), words of length <= word_len and at most max_pieces pieces."""
    A = rep.full_set() if target is None else target
    words = [w for w in rep.distinct_words(word_len) if not rep.eval_word(w).is_empty()]
    maps = [rep.eval_word(w) for w in words]
    pairs = []
    for s in _candidate_sets(rep, A, period):
        for w, m in zip(words, maps):
            if s <= m.domain:
                img = m.image(s)
                if img <= A:
                    pairs.append((s, w, img))
    enc, _ = _bit_encoder([A] + [q for pr in pairs for q in (pr[0], pr[2])])
    coded = [(enc(s), enc(img), s, w) for s, w, img in pairs]
    full = enc(A)
    count = 0
    by_point: dict[int, list] = {}

    def through(bit: int) -> list:
        hit = by_point.get(bit)
        if hit is None:
            hit = by_point[bit] = [c for c in coded if c[1] & bit]
        return hit

    def covers(remaining: int, used: int, budget: int):
        """Exact covers of `remaining` by images whose sources avoid `used`."""
        nonlocal count
        if not remaining:
            yield []
            return
        if budget == 0:
            return
        for sm, im, s, w in through(remaining & -remaining):
            if im & ~remaining or sm & used:
                continue
            count += 1
            for rest in covers(remaining & ~im, used | sm, budget - 1):
                yield [(sm, s, w)] + rest

    for total in range(2, max_pieces + 1):
        for na in range(1, total):
            nb = total - na
            for side_a in covers(full, 0, na):
                if len(side_a) != na:
                    continue
                used = 0
                for sm, _, _ in side_a:
                    used |= sm
                for side_b in covers(full, used, nb):
                    if len(side_b) != nb:
                        continue
                    pw = ParadoxWitness(A, [(s, w) for _, s, w in side_a],
                                        [(s, w) for _, s, w in side_b])
                    if not paradox_problems(pw, rep):
                        return ParadoxSearchResult("Found", pw, count)
    return ParadoxSearchResult("Exhausted", None, count)


# ---------------------------------------------------------------------------
# random finite instances for cancellation


def point_map_rep(size: int) -> Representation:
    """All single-point maps x -> y of {0..size-1}, named p{x}_{y}."""
    from .core import PartialBijection

    names, gens = [], []
    for x in range(size):
        for y in range(size):
            names.append(f"p{x}_{y}")
            gens.append(PartialBijection(size, [(x, y)]))
    return Representation(names, gens, size, label=f"point_maps({size})")


def _bijection_witness(rep, src_pts, dst_pts, rng) -> EquidecompositionWitness:
    dst = list(dst_pts)
    rng.shuffle(dst)
    size = rep.universe_size
    pieces = [Piece(FiniteSet.of(size, [x]), rep.word(f"p{x}_{y}"), lx, ly)
              for (lx, x), (ly, y) in zip(src_pts, dst)]

    def lset(pts):
        by: dict[int, list[int]] = {}
        for l, x in pts:
            by.setdefault(l, []).append(x)
        return LeveledSet({l: FiniteSet.of(size, xs) for l, xs in by.items()})

    return EquidecompositionWitness(pieces, lset(src_pts), lset(dst))


def random_cancellation_instance(rng: random.Random, max_points: int = 8, max_copies: int = 3):
    """Random A, B with n[A] = n[B] on a finite set, witnessed by scrambled bijections."""
    size = rng.randint(1, max_points)
    n = rng.randint(1, max_copies)
    rep = point_map_rep(size)
    k = rng.randint(1, size)
    A_pts = rng.sample(range(size), k)
    B_pts = rng.sample(range(size), k)
    A = LeveledSet.single(FiniteSet.of(size, A_pts))
    B = LeveledSet.single(FiniteSet.of(size, B_pts))
    copies_a, copies_b = [], []
    for i in range(n):
        copies_a.append(_bijection_witness(rep, [(0, x) for x in sorted(A_pts)],
                                           [(i, y) for y in rng.sample(range(size), k)], rng))
        copies_b.append(_bijection_witness(rep, [(0, x) for x in sorted(B_pts)],
                                           [(i, y) for y in rng.sample(range(size), k)], rng))
    src = [p for w in copies_a for p in w.target.points()]
    dst = [p for w in copies_b for p in w.target.points()]
    chi = _bijection_witness(rep, src, dst, rng)
    return rep, A, B, copies_a, copies_b, chi
