"""Finite semigroups, inverse semigroups and partial bijections of a finite set."""
from __future__ import annotations

from collections import deque
from itertools import product
from typing import Iterable, Sequence

from .errors import CapExceeded, InvalidInput, NotInverse, NotMinimal, UniverseMismatch
from .setalg import FiniteSet

DEFAULT_CLOSURE_CAP = 50_000


class PartialBijection:
    """Injective partial map of {0, ..., n-1}; `images[x]` is -1 where undefined."""

    __slots__ = ("universe_size", "images")

    def __init__(self, universe_size: int, pairs: Iterable[tuple[int, int]] = ()):
        images = [-1] * universe_size
        seen = set()
        for x, y in pairs:
            if not (0 <= x < universe_size and 0 <= y < universe_size):
                raise InvalidInput(f"pair ({x}, {y}) outside universe of size {universe_size}")
            if images[x] != -1 and images[x] != y:
                raise InvalidInput(f"point {x} has two images")
            if images[x] == -1 and y in seen:
                raise InvalidInput(f"point {y} has two preimages")
            images[x] = y
            seen.add(y)
        self.universe_size = universe_size
        self.images = tuple(images)

    @classmethod
    def from_images(cls, images: Sequence[int]) -> "PartialBijection":
        pb = cls.__new__(cls)
        targets = [y for y in images if y != -1]
        if len(set(targets)) != len(targets):
            raise InvalidInput("images are not injective")
        pb.universe_size = len(images)
        pb.images = tuple(images)
        return pb

    @classmethod
    def identity(cls, universe_size: int, on: Iterable[int] | None = None) -> "PartialBijection":
        pts = range(universe_size) if on is None else on
        return cls(universe_size, ((x, x) for x in pts))

    @classmethod
    def empty(cls, universe_size: int) -> "PartialBijection":
        return cls(universe_size)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((x, y) for x, y in enumerate(self.images) if y != -1)

    def __call__(self, x: int) -> int | None:
        if not 0 <= x < self.universe_size:
            return None
        y = self.images[x]
        return None if y == -1 else y

    @property
    def domain(self) -> FiniteSet:
        return FiniteSet.of(self.universe_size, (x for x, y in enumerate(self.images) if y != -1))

    @property
    def range(self) -> FiniteSet:
        return FiniteSet.of(self.universe_size, (y for y in self.images if y != -1))

    def _check(self, other: "PartialBijection") -> None:
        if not isinstance(other, PartialBijection) or other.universe_size != self.universe_size:
            raise UniverseMismatch("partial bijections act on different universes")

    def compose(self, other: "PartialBijection") -> "PartialBijection":
        """self o other (apply `other` first)."""
        self._check(other)
        im = self.images
        return PartialBijection.from_images(tuple(-1 if y == -1 else im[y] for y in other.images))

    __mul__ = compose

    def inverse(self) -> "PartialBijection":
        inv = [-1] * self.universe_size
        for x, y in enumerate(self.images):
            if y != -1:
                inv[y] = x
        return PartialBijection.from_images(inv)

    def image(self, subset: FiniteSet) -> FiniteSet:
        if subset.universe_size != self.universe_size:
            raise UniverseMismatch("set and map live on different universes")
        return FiniteSet.of(self.universe_size,
                            (self.images[x] for x in subset if self.images[x] != -1))

    def preimage(self, subset: FiniteSet) -> FiniteSet:
        if subset.universe_size != self.universe_size:
            raise UniverseMismatch("set and map live on different universes")
        return FiniteSet.of(self.universe_size,
                            (x for x, y in enumerate(self.images) if y != -1 and y in subset))

    def restrict(self, subset: FiniteSet) -> "PartialBijection":
        return PartialBijection.from_images(
            tuple(y if x in subset else -1 for x, y in enumerate(self.images)))

    def is_empty(self) -> bool:
        return all(y == -1 for y in self.images)

    def is_idempotent(self) -> bool:
        return all(y in (-1, x) for x, y in enumerate(self.images))

    def __eq__(self, other) -> bool:
        return isinstance(other, PartialBijection) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"PartialBijection({self.universe_size}, {list(self.pairs)})"


class Semigroup:
    """Finite semigroup given by its multiplication table (elements are 0..n-1)."""

    ASSOCIATIVITY_CHECK_LIMIT = 512

    def __init__(self, table: Sequence[Sequence[int]], labels: Sequence[str] | None = None,
                 check: bool = True):
        n = len(table)
        if n == 0:
            raise InvalidInput("a semigroup needs at least one element")
        rows = tuple(tuple(int(v) for v in row) for row in table)
        for row in rows:
            if len(row) != n or any(not 0 <= v < n for v in row):
                raise InvalidInput("table must be square with entries in range")
        if check and n <= self.ASSOCIATIVITY_CHECK_LIMIT:
            for s, t, u in product(range(n), repeat=3):
                if rows[rows[s][t]][u] != rows[s][rows[t][u]]:
                    raise InvalidInput(f"table is not associative at ({s}, {t}, {u})")
        self.table = rows
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
        if len(self.labels) != n:
            raise InvalidInput("one label per element is required")

    @property
    def size(self) -> int:
        return len(self.table)

    def __len__(self) -> int:
        return len(self.table)

    def elements(self) -> range:
        return range(len(self.table))

    def mul(self, s: int, t: int) -> int:
        return self.table[s][t]

    def product(self, *elems: int) -> int:
        acc = elems[0]
        for e in elems[1:]:
            acc = self.table[acc][e]
        return acc

    @property
    def unit(self) -> int | None:
        n = len(self.table)
        for e in range(n):
            if all(self.table[e][s] == s and self.table[s][e] == s for s in range(n)):
                return e
        return None

    @property
    def zero(self) -> int | None:
        n = len(self.table)
        for z in range(n):
            if all(self.table[z][s] == z and self.table[s][z] == z for s in range(n)):
                return z
        return None

    def has_zero(self) -> bool:
        return self.zero is not None

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidInput(f"unknown element {label!r}") from None

    def image(self, s: int, subset: Iterable[int]) -> frozenset:
        """sA = {s a : a in A}."""
        row = self.table[s]
        return frozenset(row[a] for a in subset)

    def preimage(self, s: int, subset: Iterable[int]) -> frozenset:
        """s^{-1}A = {t : s t in A}."""
        target = frozenset(subset)
        row = self.table[s]
        return frozenset(t for t in range(len(row)) if row[t] in target)

    def left_translation(self, s: int) -> tuple[int, ...]:
        return self.table[s]

    def unitize(self) -> "Semigroup":
        """Adjoin a fresh unit, which becomes the last element."""
        n = len(self.table)
        rows = [list(r) + [i] for i, r in enumerate(self.table)]
        rows.append(list(range(n)) + [n])
        return Semigroup(rows, list(self.labels) + ["1"], check=False)

    def klawe_check(self) -> tuple[bool, tuple[int, int, int] | None]:
        """Whether s x = s y always implies x t = y t for some t.

        Returns (holds, counterexample) with counterexample (s, x, y).
        """
        n = len(self.table)
        T = self.table
        for s in range(n):
            for x in range(n):
                for y in range(x + 1, n):
                    if T[s][x] == T[s][y] and not any(T[x][t] == T[y][t] for t in range(n)):
                        return False, (s, x, y)
        return True, None

    def __repr__(self) -> str:
        return f"{type(self).__name__}(size={self.size})"


class InverseSemigroup(Semigroup):
    """Finite inverse semigroup; `star[s]` is the unique inverse of s."""

    def __init__(self, table: Sequence[Sequence[int]], labels: Sequence[str] | None = None,
                 check: bool = True, star: Sequence[int] | None = None):
        super().__init__(table, labels, check=check)
        if star is None or check:
            star = self._compute_star()
        self.star_table = tuple(star)
        if check:
            idem = self.idempotents()
            for e in idem:
                for f in idem:
                    if self.table[e][f] != self.table[f][e]:
                        raise NotInverse(f"idempotents {e} and {f} do not commute")

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]], labels: Sequence[str] | None = None,
                   unitize: bool = True) -> "InverseSemigroup":
        """Read a table; a unit is adjoined when none is present and `unitize` is set."""
        sg = Semigroup(table, labels)
        if unitize and sg.unit is None:
            sg = sg.unitize()
        return cls(sg.table, sg.labels)

    def _compute_star(self) -> list[int]:
        T = self.table
        n = len(T)
        out = []
        for s in range(n):
            cands = [x for x in range(n) if T[T[s][x]][s] == s and T[T[x][s]][x] == x]
            if len(cands) != 1:
                raise NotInverse(f"element {self.labels[s]} has {len(cands)} inverses")
            out.append(cands[0])
        return out

    def star(self, s: int) -> int:
        return self.star_table[s]

    def idempotents(self) -> list[int]:
        return [e for e in range(len(self.table)) if self.table[e][e] == e]

    def source_projection(self, s: int) -> int:
        """s* s."""
        return self.table[self.star_table[s]][s]

    def range_projection(self, s: int) -> int:
        """s s*."""
        return self.table[s][self.star_table[s]]

    def natural_order(self, e: int, f: int) -> bool:
        """e <= f for idempotents: e f = e."""
        return self.table[e][f] == e

    def minimal_projections(self) -> list[int]:
        idem = self.idempotents()
        return [e for e in idem if all(not self.natural_order(f, e) or f == e for f in idem)]

    def lemma_sets_check(self, s: int, A: Iterable[int], B: Iterable[int]) -> dict[str, bool]:
        """Check the set identities for left translation by s on subsets of S."""
        A = frozenset(A)
        B = frozenset(B)
        p = self.source_projection(s)
        q = self.range_projection(s)
        pre = self.preimage(s, A)
        left = self.image(s, pre & self.image(p, pre))
        a_cap = A & self.image(q, A)
        s_pre = self.image(s, pre)
        part1 = (left == a_cap == s_pre and s_pre <= A and A <= self.preimage(s, self.image(s, A)))
        AqB = A & self.image(q, B)
        part2 = self.image(q, AqB) == AqB
        part3 = not self.preimage(s, A - self.image(q, A))
        return {"i": part1, "ii": part2, "iii": part3}

    def max_group_image(self) -> tuple["InverseSemigroup", list[int]]:
        """Quotient by s ~ t iff e s = e t for some idempotent e.

        Returns the group and the quotient map as a list indexed by element.
        """
        n = len(self.table)
        T = self.table
        idem = self.idempotents()
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in idem:
            by_image: dict[int, int] = {}
            for s in range(n):
                key = T[e][s]
                if key in by_image:
                    ra, rb = find(by_image[key]), find(s)
                    if ra != rb:
                        parent[max(ra, rb)] = min(ra, rb)
                else:
                    by_image[key] = s
        roots = sorted({find(s) for s in range(n)})
        cls_of = {r: i for i, r in enumerate(roots)}
        qmap = [cls_of[find(s)] for s in range(n)]
        k = len(roots)
        qt = [[-1] * k for _ in range(k)]
        for s in range(n):
            for t in range(n):
                v = qmap[T[s][t]]
                if qt[qmap[s]][qmap[t]] not in (-1, v):
                    raise InvalidInput("relation is not a congruence")
                qt[qmap[s]][qmap[t]] = v
        labels = [self.labels[r] for r in roots]
        group = InverseSemigroup(qt, labels)
        if len(group.idempotents()) != 1:
            raise InvalidInput("quotient is not a group")
        return group, qmap

    def eventually_minimal_chain(self) -> list[int]:
        """e_n = f_1 ... f_n over an enumeration of the idempotents."""
        chain = []
        acc = None
        for f in self.idempotents():
            acc = f if acc is None else self.table[acc][f]
            chain.append(acc)
        return chain

    def principal_left_ideal(self, a: int) -> frozenset:
        """S a."""
        return frozenset(self.table[s][a] for s in range(len(self.table)))

    def min_projection_from_finite_ideal(self, a: int) -> int:
        """Minimum projection e = s1* s1 ... sk* sk a a*, where S a = {s1 a, ..., sk a}.

        The representative s_i of each point of S a is the first element producing it.
        Raises NotMinimal if e fails to sit below every idempotent or to commute with S.
        """
        T = self.table
        reps: dict[int, int] = {}
        for s in range(len(T)):
            reps.setdefault(T[s][a], s)
        e = self.range_projection(a)
        for s in reps.values():
            e = T[self.source_projection(s)][e]
        n = len(T)
        if not all(T[e][f] == e for f in self.idempotents()):
            raise NotMinimal("constructed projection is not below every idempotent")
        if not all(T[e][s] == T[s][e] for s in range(n)):
            raise NotMinimal("constructed projection is not central")
        return e

    def verify_axioms(self) -> bool:
        T, st = self.table, self.star_table
        n = len(T)
        for s in range(n):
            x = st[s]
            if T[T[s][x]][s] != s or T[T[x][s]][x] != x:
                return False
        self._compute_star()
        idem = self.idempotents()
        return all(T[e][f] == T[f][e] for e in idem for f in idem)


def generate_closure(generators: Sequence[PartialBijection], names: Sequence[str] | None = None,
                     cap: int = DEFAULT_CLOSURE_CAP
                     ) -> tuple[InverseSemigroup, list[PartialBijection]]:
    """Inverse monoid generated by partial bijections, with the identity map adjoined.

    Returns the semigroup (elements labelled by a shortest word) and the
    embedding sending each element to its partial bijection.
    """
    if not generators:
        raise InvalidInput("at least one generator is required")
    n = generators[0].universe_size
    if any(g.universe_size != n for g in generators):
        raise UniverseMismatch("generators act on different universes")
    names = list(names) if names is not None else [f"g{i}" for i in range(len(generators))]
    letters: list[tuple[str, PartialBijection]] = []
    for name, g in zip(names, generators):
        letters.append((name, g))
        letters.append((name + "*", g.inverse()))
    identity = PartialBijection.identity(n)
    elems = [identity]
    labels = ["1"]
    index = {identity: 0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for name, g in letters:
            m = g.compose(elems[i])
            if m not in index:
                if len(elems) >= cap:
                    raise CapExceeded(f"closure exceeds {cap} elements")
                index[m] = len(elems)
                elems.append(m)
                labels.append(name if labels[i] == "1" else f"{name} {labels[i]}")
                queue.append(len(elems) - 1)
    table = [[index[a.compose(b)] for b in elems] for a in elems]
    star = [index[a.inverse()] for a in elems]
    return InverseSemigroup(table, labels, check=False, star=star), elems


def semigroup_from_maps(maps: Sequence[PartialBijection], labels: Sequence[str] | None = None
                        ) -> InverseSemigroup:
    """Inverse semigroup from a list of partial bijections closed under product and inverse."""
    index = {m: i for i, m in enumerate(maps)}
    if len(index) != len(maps):
        raise InvalidInput("maps must be distinct")
    try:
        table = [[index[a.compose(b)] for b in maps] for a in maps]
        star = [index[a.inverse()] for a in maps]
    except KeyError:
        raise InvalidInput("maps are not closed under product and inverse") from None
    return InverseSemigroup(table, labels, check=False, star=star)


def read_table_text(text: str, labels: Sequence[str] | None = None) -> list[list[int]]:
    """Parse "n" followed by n rows of n integers."""
    tokens = text.split()
    if not tokens:
        raise InvalidInput("empty table")
    try:
        n = int(tokens[0])
        vals = [int(t) for t in tokens[1:]]
    except ValueError as exc:
        raise InvalidInput("table must contain integers") from exc
    if len(vals) != n * n:
        raise InvalidInput(f"expected {n * n} entries, got {len(vals)}")
    return [vals[i * n:(i + 1) * n] for i in range(n)]
