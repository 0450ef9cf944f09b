"""Exact set algebra on finite universes and on eventually periodic subsets of N.

`FiniteSet` is a bitset over {0, ..., n-1}.  `UPSet` is a subset of the
naturals that is periodic from some threshold on; it is kept in a canonical
form (smallest period, then smallest threshold) so that equality of sets is
equality of fields.  `AffinePartialMap` is n -> (a*n + b)/c restricted to a
`UPSet` domain, and maps `UPSet`s to `UPSet`s.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Callable, Iterable, Iterator

from .errors import InvalidInput, NonIntegralComposition, UniverseMismatch

INFINITE = math.inf


def _ceil_div(p: int, q: int) -> int:
    return -((-p) // q)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


class FiniteSet:
    """Subset of {0, ..., universe_size - 1} stored as an int bitmask."""

    __slots__ = ("universe_size", "bits")

    def __init__(self, universe_size: int, bits: int = 0):
        if universe_size < 0:
            raise InvalidInput("universe size must be nonnegative")
        if bits < 0 or bits >> universe_size:
            raise InvalidInput("bits outside the universe")
        self.universe_size = universe_size
        self.bits = bits

    @classmethod
    def of(cls, universe_size: int, points: Iterable[int]) -> "FiniteSet":
        bits = 0
        for x in points:
            if not 0 <= x < universe_size:
                raise InvalidInput(f"point {x} outside universe of size {universe_size}")
            bits |= 1 << x
        return cls(universe_size, bits)

    @classmethod
    def full(cls, universe_size: int) -> "FiniteSet":
        return cls(universe_size, (1 << universe_size) - 1)

    @classmethod
    def empty(cls, universe_size: int) -> "FiniteSet":
        return cls(universe_size, 0)

    def _check(self, other: "FiniteSet") -> None:
        if not isinstance(other, FiniteSet):
            raise UniverseMismatch("cannot combine a finite set with a non-finite set")
        if other.universe_size != self.universe_size:
            raise UniverseMismatch(
                f"universe sizes differ: {self.universe_size} vs {other.universe_size}")

    def union(self, other):
        self._check(other)
        return FiniteSet(self.universe_size, self.bits | other.bits)

    def intersect(self, other):
        self._check(other)
        return FiniteSet(self.universe_size, self.bits & other.bits)

    def difference(self, other):
        self._check(other)
        return FiniteSet(self.universe_size, self.bits & ~other.bits)

    def complement(self):
        return FiniteSet(self.universe_size, ((1 << self.universe_size) - 1) & ~self.bits)

    __or__ = union
    __and__ = intersect
    __sub__ = difference
    __invert__ = complement

    def is_subset(self, other) -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    __le__ = is_subset

    def isdisjoint(self, other) -> bool:
        self._check(other)
        return self.bits & other.bits == 0

    def is_empty(self) -> bool:
        return self.bits == 0

    def cardinality(self) -> int:
        return self.bits.bit_count()

    __len__ = cardinality

    def natural_density(self) -> Fraction:
        """Proportion of the universe occupied by the set."""
        if self.universe_size == 0:
            return Fraction(0)
        return Fraction(self.cardinality(), self.universe_size)

    def __contains__(self, x) -> bool:
        return isinstance(x, int) and 0 <= x < self.universe_size and bool(self.bits >> x & 1)

    def __iter__(self) -> Iterator[int]:
        b, i = self.bits, 0
        while b:
            if b & 1:
                yield i
            b >>= 1
            i += 1

    def members(self, limit: int | None = None) -> list[int]:
        return [x for x in self if limit is None or x < limit]

    def __eq__(self, other) -> bool:
        return (isinstance(other, FiniteSet) and self.universe_size == other.universe_size
                and self.bits == other.bits)

    def __hash__(self) -> int:
        return hash((self.universe_size, self.bits))

    def __repr__(self) -> str:
        return f"FiniteSet({self.universe_size}, {list(self)})"

    def to_json(self) -> list[int]:
        return list(self)


class UPSet:
    """Eventually periodic subset of N in canonical form.

    For n >= threshold, n is a member iff n % period is in `residues`.
    Below the threshold membership is given explicitly by `head`.
    """

    __slots__ = ("period", "residues", "threshold", "head")

    def __init__(self, period: int = 1, residues: Iterable[int] = (), threshold: int = 0,
                 head: Iterable[int] = ()):
        if period < 1:
            raise InvalidInput("period must be positive")
        if threshold < 0:
            raise InvalidInput("threshold must be nonnegative")
        res = frozenset(r % period for r in residues)
        hd = frozenset(head)
        if any(not 0 <= x < threshold for x in hd):
            raise InvalidInput("head points must lie below the threshold")
        p, res = _minimal_period(period, res)
        t = threshold
        while t > 0 and ((t - 1) in hd) == (((t - 1) % p) in res):
            t -= 1
        self.period = p
        self.residues = res
        self.threshold = t
        self.head = frozenset(x for x in hd if x < t)

    # constructors

    @classmethod
    def from_predicate(cls, pred: Callable[[int], bool], period: int, threshold: int) -> "UPSet":
        """Build the set of n with pred(n), assuming pred is `period`-periodic on [threshold, inf)."""
        threshold = max(threshold, 0)
        head = [n for n in range(threshold) if pred(n)]
        res = [(threshold + k) % period for k in range(period) if pred(threshold + k)]
        return cls(period, res, threshold, head)

    @classmethod
    def naturals(cls) -> "UPSet":
        return cls(1, (0,))

    @classmethod
    def empty(cls) -> "UPSet":
        return cls(1, ())

    @classmethod
    def finite(cls, points: Iterable[int]) -> "UPSet":
        pts = frozenset(points)
        if any(x < 0 for x in pts):
            raise InvalidInput("points must be natural numbers")
        return cls(1, (), max(pts) + 1 if pts else 0, pts)

    @classmethod
    def residue_class(cls, r: int, p: int) -> "UPSet":
        return cls(p, (r,))

    @classmethod
    def interval(cls, lo: int, hi: int | None = None) -> "UPSet":
        """[lo, hi) or [lo, inf) when hi is None."""
        if hi is None:
            return cls(1, (0,), lo, ())
        return cls.finite(range(lo, hi))

    # membership and size

    def __contains__(self, n) -> bool:
        if not isinstance(n, int) or n < 0:
            return False
        if n < self.threshold:
            return n in self.head
        return (n % self.period) in self.residues

    def members(self, limit: int) -> list[int]:
        return [n for n in range(limit) if n in self]

    def is_empty(self) -> bool:
        return not self.residues and not self.head

    def is_finite(self) -> bool:
        return not self.residues

    def cardinality(self):
        return len(self.head) if not self.residues else INFINITE

    def natural_density(self) -> Fraction:
        return Fraction(len(self.residues), self.period)

    def min(self) -> int | None:
        if self.head:
            return min(self.head)
        if not self.residues:
            return None
        return min(n for n in range(self.threshold, self.threshold + self.period) if n in self)

    def __iter__(self) -> Iterator[int]:
        if not self.is_finite():
            raise InvalidInput("cannot iterate an infinite set; use members(limit)")
        return iter(sorted(self.head))

    def __len__(self) -> int:
        if not self.is_finite():
            raise InvalidInput("infinite set has no len(); use cardinality()")
        return len(self.head)

    # boolean algebra

    def _combine(self, other: "UPSet", op: Callable[[bool, bool], bool]) -> "UPSet":
        if not isinstance(other, UPSet):
            raise UniverseMismatch("cannot combine a UPSet with a non-UPSet")
        p = _lcm(self.period, other.period)
        t = max(self.threshold, other.threshold)
        return UPSet.from_predicate(lambda n: op(n in self, n in other), p, t)

    def union(self, other):
        return self._combine(other, lambda x, y: x or y)

    def intersect(self, other):
        return self._combine(other, lambda x, y: x and y)

    def difference(self, other):
        return self._combine(other, lambda x, y: x and not y)

    def symmetric_difference(self, other):
        return self._combine(other, lambda x, y: x != y)

    def complement(self):
        return UPSet.from_predicate(lambda n: n not in self, self.period, self.threshold)

    __or__ = union
    __and__ = intersect
    __sub__ = difference
    __xor__ = symmetric_difference
    __invert__ = complement

    def is_subset(self, other) -> bool:
        return self.difference(other).is_empty()

    __le__ = is_subset

    def isdisjoint(self, other) -> bool:
        return self.intersect(other).is_empty()

    def _key(self):
        return (self.period, tuple(sorted(self.residues)), self.threshold, tuple(sorted(self.head)))

    def __eq__(self, other) -> bool:
        return isinstance(other, UPSet) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def sort_key(self):
        return self._key()

    # text form

    def __str__(self) -> str:
        parts = []
        if self.residues:
            res = ",".join(str(r) for r in sorted(self.residues))
            first = f"{res} mod {self.period}"
            if self.threshold:
                first += f" | n >= {self.threshold}"
            parts.append(first)
        elif self.threshold and not self.head:
            parts.append(f"mod 1 | n >= {self.threshold}")
        if self.head:
            parts.append("+{" + ",".join(str(x) for x in sorted(self.head)) + "}")
        return "{" + "; ".join(parts) + "}"

    def __repr__(self) -> str:
        return f"UPSet({self})"

    def to_json(self) -> str:
        return str(self)

    @classmethod
    def parse(cls, text: str) -> "UPSet":
        return parse_upset(text)


def _minimal_period(period: int, residues: frozenset) -> tuple[int, frozenset]:
    for d in range(1, period + 1):
        if period % d:
            continue
        if all(((r + d) % period in residues) == (r in residues) for r in range(period)):
            return d, frozenset(r for r in residues if r < d)
    return period, residues


_BRACE_LIST = re.compile(r"^\{\s*([0-9,\s]*)\}$")


def _int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise InvalidInput(f"bad integer list: {text!r}") from exc


def _split_top(text: str, sep: str) -> list[str]:
    depth, cur, out = 0, [], []
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def parse_upset(text: str) -> UPSet:
    """Parse "{r1,r2 mod p | n >= T; +{a,b}; -{c}}".

    The periodic clause selects {n >= T : n % p in R}; "+{...}" adds points and
    "-{...}" removes points.  "N" is accepted for the whole of N.
    """
    s = text.strip()
    if s in ("N", "ℕ"):
        return UPSet.naturals()
    if not (s.startswith("{") and s.endswith("}")):
        raise InvalidInput(f"UPSet literal must be enclosed in braces: {text!r}")
    body = s[1:-1].strip()
    base = UPSet.empty()
    plus: list[int] = []
    minus: list[int] = []
    for part in _split_top(body, ";"):
        part = part.strip()
        if not part:
            continue
        if part[0] in "+-":
            m = _BRACE_LIST.match(part[1:].strip())
            if not m:
                raise InvalidInput(f"bad exception clause: {part!r}")
            (plus if part[0] == "+" else minus).extend(_int_list(m.group(1)))
            continue
        m = re.fullmatch(r"([0-9,\s]*)mod\s*(\d+)\s*(?:\|\s*n\s*>=\s*(\d+))?", part)
        if not m:
            raise InvalidInput(f"bad periodic clause: {part!r}")
        p = int(m.group(2))
        if p < 1:
            raise InvalidInput("period must be positive")
        res = _int_list(m.group(1))
        t = int(m.group(3) or 0)
        base = UPSet.from_predicate(lambda n, res=frozenset(r % p for r in res), p=p, t=t:
                                    n >= t and n % p in res, p, t)
    if any(x < 0 for x in plus + minus):
        raise InvalidInput("exception points must be natural numbers")
    return (base | UPSet.finite(plus)) - UPSet.finite(minus)


class AffinePartialMap:
    """n -> (a*n + b) / c on a UPSet domain.

    The domain is clipped at construction to the points where the formula
    gives a natural number.  Maps with the same graph compare equal.
    """

    __slots__ = ("a", "b", "c", "domain")

    def __init__(self, a: int, b: int, c: int = 1, domain: UPSet | None = None):
        if a < 1 or c < 1:
            raise InvalidInput("affine maps need a >= 1 and c >= 1")
        g = math.gcd(math.gcd(a, abs(b)), c)
        a, b, c = a // g, b // g, c // g
        dom = UPSet.naturals() if domain is None else domain
        if not isinstance(dom, UPSet):
            raise UniverseMismatch("affine map domains must be UPSets")
        natural = UPSet.from_predicate(
            lambda n: a * n + b >= 0 and (a * n + b) % c == 0, c, max(0, _ceil_div(-b, a)))
        dom = dom & natural
        if dom.is_empty():
            a, b, c = 1, 0, 1
        self.a, self.b, self.c, self.domain = a, b, c, dom

    @classmethod
    def identity(cls, domain: UPSet | None = None) -> "AffinePartialMap":
        return cls(1, 0, 1, domain)

    @classmethod
    def empty(cls) -> "AffinePartialMap":
        return cls(1, 0, 1, UPSet.empty())

    def __call__(self, n: int) -> int | None:
        if n not in self.domain:
            return None
        return (self.a * n + self.b) // self.c

    def image(self, subset: UPSet) -> UPSet:
        d = subset & self.domain
        if d.is_empty():
            return UPSet.empty()
        a, b, c = self.a, self.b, self.c

        def pred(y: int) -> bool:
            num = c * y - b
            return num >= 0 and num % a == 0 and (num // a) in d

        return UPSet.from_predicate(pred, a * d.period, max(0, _ceil_div(a * d.threshold + b, c)))

    def preimage(self, subset: UPSet) -> UPSet:
        if not isinstance(subset, UPSet):
            raise UniverseMismatch("affine maps act on UPSets")
        dom = self.domain
        if dom.is_empty() or subset.is_empty():
            return UPSet.empty()
        a, b, c = self.a, self.b, self.c
        period = _lcm(dom.period, c * subset.period)
        t = max(dom.threshold, _ceil_div(c * subset.threshold - b, a), 0)
        return UPSet.from_predicate(lambda n: n in dom and (a * n + b) // c in subset, period, t)

    @property
    def range(self) -> UPSet:
        return self.image(self.domain)

    def compose(self, other: "AffinePartialMap") -> "AffinePartialMap":
        """self o other (apply `other` first)."""
        dom = other.preimage(self.domain)
        out = AffinePartialMap(self.a * other.a, self.a * other.b + self.b * other.c,
                               self.c * other.c, dom)
        if out.domain != dom:
            raise NonIntegralComposition("composed formula is not integral on the composed domain")
        for n in dom.members(dom.threshold + 2 * dom.period):
            if out(n) != self(other(n)):
                raise NonIntegralComposition(f"composition disagrees at {n}")
        return out

    __mul__ = compose

    def inverse(self) -> "AffinePartialMap":
        if self.domain.is_empty():
            return self
        return AffinePartialMap(self.c, -self.b, self.a, self.range)

    def restrict(self, subset: UPSet) -> "AffinePartialMap":
        return AffinePartialMap(self.a, self.b, self.c, self.domain & subset)

    def is_empty(self) -> bool:
        return self.domain.is_empty()

    def __eq__(self, other) -> bool:
        if not isinstance(other, AffinePartialMap) or self.domain != other.domain:
            return False
        if self.domain.is_finite():
            return all(self(n) == other(n) for n in self.domain)
        return (self.a, self.b, self.c) == (other.a, other.b, other.c)

    def __hash__(self) -> int:
        if self.domain.is_finite():
            return hash((self.domain, tuple(self(n) for n in self.domain)))
        return hash((self.a, self.b, self.c, self.domain))

    def __str__(self) -> str:
        sign = "+" if self.b >= 0 else "-"
        return f"({self.a}*n{sign}{abs(self.b)})/{self.c} on {self.domain}"

    def __repr__(self) -> str:
        return f"AffinePartialMap({self})"

    @classmethod
    def parse(cls, text: str) -> "AffinePartialMap":
        m = re.fullmatch(
            r"\s*\(?\s*(\d*)\s*\*?\s*n\s*(?:([+-])\s*(\d+))?\s*\)?\s*(?:/\s*(\d+))?\s*(?:on\s+(.+))?",
            text)
        if not m:
            raise InvalidInput(f"bad affine map literal: {text!r}")
        a = int(m.group(1) or 1)
        b = int(m.group(3) or 0) * (-1 if m.group(2) == "-" else 1)
        c = int(m.group(4) or 1)
        dom = parse_upset(m.group(5)) if m.group(5) else None
        return cls(a, b, c, dom)


def parse_set(value, universe_size: int | None):
    """Read a set from JSON: a list of ints (finite universe) or a UPSet literal."""
    if universe_size is None:
        if isinstance(value, str):
            return parse_upset(value)
        if isinstance(value, list):
            return UPSet.finite(value)
        raise InvalidInput(f"cannot read a subset of N from {value!r}")
    if isinstance(value, list):
        return FiniteSet.of(universe_size, value)
    raise InvalidInput(f"cannot read a finite set from {value!r}")


def set_to_json(s):
    return s.to_json()
