"""Representations of finitely generated inverse monoids by partial bijections.

A representation fixes named generators, each acting either on a finite set
{0, ..., n-1} (`PartialBijection`) or on N (`AffinePartialMap`).  Words are
read left to right as products, so the word "u v" acts by applying v first.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .core import InverseSemigroup, PartialBijection, generate_closure
from .errors import ClosureRequired, InvalidInput, UniverseMismatch
from .setalg import AffinePartialMap, FiniteSet, UPSet

DEFAULT_WORD_BOUND = 8

Letter = tuple[int, bool]


@dataclass(frozen=True, order=True)
class Word:
    """Product of generators and their stars, e.g. "d0* d1"."""

    letters: tuple[Letter, ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    def star(self) -> "Word":
        return Word(tuple((g, not st) for g, st in reversed(self.letters)))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def render(self, names: Sequence[str]) -> str:
        if not self.letters:
            return "1"
        return " ".join(names[g] + ("*" if st else "") for g, st in self.letters)


class Representation:
    """Generators acting by partial bijections on a finite set or on N."""

    def __init__(self, names: Sequence[str], maps: Sequence, universe_size: int | None = None,
                 label: str = ""):
        if len(names) != len(maps) or not names:
            raise InvalidInput("need one name per generator and at least one generator")
        if len(set(names)) != len(names):
            raise InvalidInput("generator names must be distinct")
        for nm in names:
            if not nm or any(ch.isspace() for ch in nm) or nm.endswith("*") or nm == "1":
                raise InvalidInput(f"bad generator name {nm!r}")
        if universe_size is None:
            if not all(isinstance(m, AffinePartialMap) for m in maps):
                raise UniverseMismatch("generators on N must be affine partial maps")
        else:
            if not all(isinstance(m, PartialBijection) and m.universe_size == universe_size
                       for m in maps):
                raise UniverseMismatch("generators must be partial bijections of the universe")
        self.names = tuple(names)
        self.maps = tuple(maps)
        self.universe_size = universe_size
        self.label = label
        self._inverses = tuple(m.inverse() for m in maps)
        self._cache: dict[Word, object] = {}

    @property
    def is_finite(self) -> bool:
        return self.universe_size is not None

    # words

    def parse_word(self, text: str) -> Word:
        text = text.strip()
        if text in ("", "1"):
            return Word()
        letters = []
        for tok in text.split():
            starred = tok.endswith("*")
            name = tok[:-1] if starred else tok
            if name not in self.names:
                raise InvalidInput(f"unknown generator {name!r}")
            letters.append((self.names.index(name), starred))
        return Word(tuple(letters))

    def word(self, w) -> Word:
        return w if isinstance(w, Word) else self.parse_word(w)

    def render(self, w: Word) -> str:
        return w.render(self.names)

    def letter_map(self, letter: Letter):
        g, st = letter
        return self._inverses[g] if st else self.maps[g]

    def letters(self) -> list[Letter]:
        return [(g, st) for g in range(len(self.names)) for st in (False, True)]

    def words_up_to(self, length: int) -> list[Word]:
        """All words of length <= `length`, shortest first, then lexicographic."""
        out = [Word()]
        layer = [Word()]
        for _ in range(length):
            layer = [Word(w.letters + (l,)) for w in layer for l in self.letters()]
            out.extend(layer)
        return out

    def distinct_words(self, length: int) -> list[Word]:
        """Shortlex-least word for each distinct map given by words of length <= `length`.

        If w and w' give the same map so do w l and w' l, so only new maps are extended.
        """
        seen = {self.eval_word(Word())}
        out = [Word()]
        layer = [Word()]
        for _ in range(length):
            nxt = []
            for w in layer:
                for l in self.letters():
                    v = Word(w.letters + (l,))
                    m = self.eval_word(v)
                    if m not in seen:
                        seen.add(m)
                        nxt.append(v)
            out.extend(nxt)
            layer = nxt
            if not layer:
                break
        return out

    # evaluation

    def identity_map(self):
        if self.is_finite:
            return PartialBijection.identity(self.universe_size)
        return AffinePartialMap.identity()

    def full_set(self):
        return FiniteSet.full(self.universe_size) if self.is_finite else UPSet.naturals()

    def empty_set(self):
        return FiniteSet.empty(self.universe_size) if self.is_finite else UPSet.empty()

    def eval_word(self, w) -> PartialBijection | AffinePartialMap:
        w = self.word(w)
        hit = self._cache.get(w)
        if hit is not None:
            return hit
        m = self.identity_map()
        for letter in w.letters:
            m = m.compose(self.letter_map(letter))
        if len(self._cache) < 100_000:
            self._cache[w] = m
        return m

    def apply(self, w, x: int) -> int | None:
        """Pointwise action; None when x is outside the domain."""
        w = self.word(w)
        for letter in reversed(w.letters):
            x = self.letter_map(letter)(x)
            if x is None:
                return None
        return x

    def domain_of(self, w):
        """D_{w* w}: the domain of the word's map."""
        return self.eval_word(w).domain

    def range_of(self, w):
        return self.eval_word(w).range

    def act(self, w, subset):
        """w(A ∩ D_{w* w})."""
        return self.eval_word(w).image(subset)

    def preimage_act(self, w, subset):
        """{x in D_{w* w} : w x in A}."""
        return self.eval_word(w).preimage(subset)

    def as_map(self, g):
        """Accept a word, a word string or an already evaluated map."""
        if isinstance(g, (PartialBijection, AffinePartialMap)):
            return g
        return self.eval_word(g)

    def make_set(self, value):
        if isinstance(value, (FiniteSet, UPSet)):
            return value
        if self.is_finite:
            return FiniteSet.of(self.universe_size, value)
        if isinstance(value, str):
            return UPSet.parse(value)
        return UPSet.finite(value)

    # closure

    @cached_property
    def closure(self) -> tuple[InverseSemigroup, list[PartialBijection]]:
        if not self.is_finite:
            raise ClosureRequired("the closure of a representation on N is not computed")
        return generate_closure(self.maps, self.names)

    def approx_classes(self, subset: Iterable[int], bound: int = DEFAULT_WORD_BOUND
                       ) -> list[list[int]]:
        """Partition of `subset` generated by: u ~ v when a word of length <= bound maps u to v.

        Classes are sorted by their least element.  Longer bounds can only merge classes.
        """
        pts = sorted(set(subset))
        member = set(pts)
        parent = {x: x for x in pts}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        letter_maps = [self.letter_map(l) for l in self.letters()]
        for u in pts:
            seen = {u}
            frontier = [u]
            for _ in range(bound):
                nxt = []
                for x in frontier:
                    for m in letter_maps:
                        y = m(x)
                        if y is not None and y not in seen:
                            seen.add(y)
                            nxt.append(y)
                frontier = nxt
            for v in seen:
                if v in member:
                    ru, rv = find(u), find(v)
                    if ru != rv:
                        parent[max(ru, rv)] = min(ru, rv)
        classes: dict[int, list[int]] = {}
        for x in pts:
            classes.setdefault(find(x), []).append(x)
        return sorted(classes.values(), key=lambda c: c[0])

    def __repr__(self) -> str:
        where = f"{self.universe_size} points" if self.is_finite else "N"
        return f"Representation({self.label or ','.join(self.names)} on {where})"


def reachable_pairs(rep: Representation, points: Iterable[int], bound: int) -> set[tuple[int, int]]:
    """Pairs (x, y) with y = w x for some word of length <= bound and x in `points`."""
    letter_maps = [rep.letter_map(l) for l in rep.letters()]
    out = set()
    for u in points:
        seen = {u}
        frontier = deque([(u, 0)])
        while frontier:
            x, d = frontier.popleft()
            if d == bound:
                continue
            for m in letter_maps:
                y = m(x)
                if y is not None and y not in seen:
                    seen.add(y)
                    frontier.append((y, d + 1))
        out.update((u, v) for v in seen)
    return out
