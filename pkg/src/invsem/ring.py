"""Semigroup rings with rational coefficients and Følner-subspace checks.

Two kinds of basis are supported: the elements of a finite semigroup (by index)
and the symbolic semidirect product N ⋊ F2+, whose elements are pairs
(n, word) with word a nonempty string over {a, b} and

    (n, u) (m, v) = (n + max(m - |u|, 0), uv).

Truncated subtraction is not additive on N, so this product is bilinear but
not associative: ((0,a)(1,a))(2,a) = (0,aaa) while (0,a)((1,a)(2,a)) = (1,aaa).
Only left translations by single basis elements are used below.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Hashable, Iterable, Sequence

from . import linalg
from .core import Semigroup
from .errors import InvalidInput, UniverseMismatch, ZeroSubspace


class FiniteSemigroupRing:
    def __init__(self, sg: Semigroup):
        self.sg = sg

    def mul_basis(self, x: int, y: int) -> int:
        return self.sg.mul(x, y)

    def check_key(self, k) -> int:
        if not isinstance(k, int) or not 0 <= k < self.sg.size:
            raise InvalidInput(f"{k!r} is not an element index of a semigroup of size {self.sg.size}")
        return k

    def sort_key(self, k: int):
        return k

    def render_key(self, k: int) -> str:
        return f"[{k}]"

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteSemigroupRing) and self.sg.table == other.sg.table

    def __hash__(self) -> int:
        return hash(tuple(map(tuple, self.sg.table)))


class F2PlusSemidirect:
    """N ⋊ F2+ where both generators act on N by n -> max(n - 1, 0)."""

    def mul_basis(self, x: tuple[int, str], y: tuple[int, str]) -> tuple[int, str]:
        (n, u), (m, v) = x, y
        return n + max(m - len(u), 0), u + v

    def check_key(self, k) -> tuple[int, str]:
        if (not isinstance(k, tuple) or len(k) != 2 or not isinstance(k[0], int) or k[0] < 0
                or not isinstance(k[1], str) or not re.fullmatch(r"[ab]+", k[1])):
            raise InvalidInput(f"{k!r} is not a pair (n, nonempty word over a, b)")
        return k

    def sort_key(self, k: tuple[int, str]):
        return k[0], len(k[1]), k[1]

    def render_key(self, k: tuple[int, str]) -> str:
        return f"({k[0]},{k[1]})"

    def ball(self, n_max: int, len_max: int, len_min: int = 1) -> list[tuple[int, str]]:
        words = ["".join(p) for L in range(len_min, len_max + 1) for p in product("ab", repeat=L)]
        return [(n, w) for n in range(n_max + 1) for w in words]

    def __eq__(self, other) -> bool:
        return isinstance(other, F2PlusSemidirect)

    def __hash__(self) -> int:
        return hash("f2plus_semidirect")


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class RingElement:
    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms: dict | Iterable[tuple[Hashable, object]] = ()):
        items = terms.items() if isinstance(terms, dict) else terms
        acc: dict = {}
        for k, c in items:
            k = ring.check_key(k)
            acc[k] = acc.get(k, Fraction(0)) + Fraction(c)
        self.ring = ring
        self.terms = tuple(sorted(((k, c) for k, c in acc.items() if c), key=lambda t: ring.sort_key(t[0])))

    @classmethod
    def basis(cls, ring, k) -> "RingElement":
        return cls(ring, [(k, 1)])

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> list:
        return [k for k, _ in self.terms]

    def _same(self, other: "RingElement") -> None:
        if self.ring != other.ring:
            raise UniverseMismatch("ring elements over different semigroups")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._same(other)
        return RingElement(self.ring, self.terms + other.terms)

    def __neg__(self) -> "RingElement":
        return RingElement(self.ring, [(k, -c) for k, c in self.terms])

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + (-other)

    def scale(self, q) -> "RingElement":
        q = Fraction(q)
        return RingElement(self.ring, [(k, q * c) for k, c in self.terms])

    def __mul__(self, other):
        if not isinstance(other, RingElement):
            return self.scale(other)
        self._same(other)
        mb = self.ring.mul_basis
        return RingElement(self.ring, [(mb(x, y), c * d) for x, c in self.terms for y, d in other.terms])

    def __rmul__(self, q):
        return self.scale(q)

    def __eq__(self, other) -> bool:
        return isinstance(other, RingElement) and self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, (k, c) in enumerate(self.terms):
            sign = "-" if c < 0 else "+"
            body = f"{_frac_str(abs(c))}*{self.ring.render_key(k)}"
            out.append(("-" + body if sign == "-" else body) if i == 0 else f" {sign} {body}")
        return "".join(out)

    __repr__ = __str__

    def to_json(self):
        return str(self)


_PAIR_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*\s*)?\(\s*(\d+)\s*,\s*([ab]+)\s*\)\s*")
_INDEX_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*\s*)?\[\s*(\d+)\s*\]\s*")


def parse_element(text, ring) -> RingElement:
    """Literals "q1*(n1,w1) + q2*(n2,w2)" for N ⋊ F2+ and "q*[i] + ..." (or a JSON
    list of [index, coefficient] pairs) for finite semigroups."""
    if isinstance(text, list):
        try:
            return RingElement(ring, [(int(k), Fraction(str(c))) for k, c in text])
        except (TypeError, ValueError) as exc:
            raise InvalidInput(f"bad ring element {text!r}: {exc}") from exc
    pattern = _PAIR_TERM if isinstance(ring, F2PlusSemidirect) else _INDEX_TERM
    text = text.strip()
    if text == "0":
        return RingElement(ring)
    pos, terms = 0, []
    while pos < len(text):
        m = pattern.match(text, pos)
        if not m or m.end() == pos or (terms and not m.group(1)):
            raise InvalidInput(f"cannot parse ring element at {text[pos:]!r}")
        q = Fraction(m.group(2) or 1) * (-1 if m.group(1) == "-" else 1)
        key = (int(m.group(3)), m.group(4)) if pattern is _PAIR_TERM else int(m.group(3))
        terms.append((key, q))
        pos = m.end()
    if not terms:
        raise InvalidInput("empty ring element")
    return RingElement(ring, terms)


# ---------------------------------------------------------------------------
# subspaces


def rank(elements: Sequence[RingElement]) -> int:
    """Dimension of the span, by fraction-free elimination."""
    return linalg.rank([e.as_dict() for e in elements])


@dataclass(frozen=True)
class Subspace:
    """Span of ring elements, stored as a reduced row-echelon basis."""

    ring: object
    basis: tuple[RingElement, ...]

    @classmethod
    def span(cls, ring, elements: Iterable[RingElement]) -> "Subspace":
        rows: list[dict] = []
        for e in elements:
            if e.ring != ring:
                raise UniverseMismatch("element from another ring")
            rows.append(e.as_dict())
        order = sorted({k for r in rows for k in r}, key=ring.sort_key)
        basis: list[dict] = []
        for col in order:
            piv = next((r for r in rows if r.get(col)), None)
            if piv is None:
                continue
            rows = [r for r in rows if r is not piv]
            inv = 1 / piv[col]
            piv = {k: v * inv for k, v in piv.items()}
            for group in (rows, basis):
                for i, r in enumerate(group):
                    f = r.get(col)
                    if f:
                        new = dict(r)
                        for k, v in piv.items():
                            new[k] = new.get(k, 0) - f * v
                        group[i] = {k: v for k, v in new.items() if v}
            basis.append(piv)
        return cls(ring, tuple(RingElement(ring, b) for b in basis))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, e: RingElement) -> bool:
        return rank(list(self.basis) + [e]) == self.dim

    def to_json(self) -> list[str]:
        return [str(b) for b in self.basis]


def folner_to_subspace(ring, F: Iterable) -> Subspace:
    F = list(F)
    if not F:
        raise InvalidInput("F must be nonempty")
    return Subspace.span(ring, [RingElement.basis(ring, f) for f in F])


def folner_subspace_defect(W: Subspace, a: RingElement) -> Fraction:
    """dim(aW + W) / dim(W)."""
    if W.dim == 0:
        raise ZeroSubspace("W is the zero subspace")
    joined = list(W.basis) + [a * w for w in W.basis]
    return Fraction(rank(joined), W.dim)


# ---------------------------------------------------------------------------
# the N ⋊ F2+ example


def annihilated_element(ring: F2PlusSemidirect) -> RingElement:
    """(0,a) - (1,a), killed by every basis element from the left."""
    return RingElement(ring, [((0, "a"), 1), ((1, "a"), -1)])


def annihilator_check(n_max: int = 8, len_max: int = 5) -> dict:
    ring = F2PlusSemidirect()
    s = annihilated_element(ring)
    ball = ring.ball(n_max, len_max)
    bad = [ring.render_key(x) for x in ball if not (RingElement.basis(ring, x) * s).is_zero()]
    return {"element": str(s), "n_max": n_max, "len_max": len_max, "checked": len(ball),
            "nonzero": bad, "passed": not bad}


def counterexample_folner_bound(n_max: int = 2, len_max: int = 3, max_size: int = 6,
                                eps=Fraction(1, 50)) -> dict:
    """Enumerate every F in the ball with 1 <= |F| <= max_size and count those with
    |(0,a)F \\ F| < eps|F| and |(0,b)F \\ F| < eps|F|.

    Also reports the least value of max(|(0,a)F \\ F|, |(0,b)F \\ F|) / |F|.
    """
    eps = Fraction(eps)
    ring = F2PlusSemidirect()
    ball = ring.ball(n_max, len_max)
    index = {x: i for i, x in enumerate(ball)}
    extra: dict = {}

    def bit(y) -> int:
        i = index.get(y)
        if i is None:
            i = extra.setdefault(y, len(ball) + len(extra))
        return 1 << i

    img_a = [bit(ring.mul_basis((0, "a"), x)) for x in ball]
    img_b = [bit(ring.mul_basis((0, "b"), x)) for x in ball]
    count = 0
    bad: list[list[str]] = []
    best: dict[int, int] = {}  # size -> least max-defect
    chosen: list[int] = []

    def dfs(start: int, F: int, ia: int, ib: int, k: int) -> None:
        nonlocal count
        for i in range(start, len(ball)):
            nF, na, nb = F | 1 << i, ia | img_a[i], ib | img_b[i]
            count += 1
            chosen.append(i)
            da = (na & ~nF).bit_count()
            db = (nb & ~nF).bit_count()
            m = max(da, db)
            if m < best.get(k + 1, m + 1):
                best[k + 1] = m
            if da < eps * (k + 1) and db < eps * (k + 1):
                bad.append([ring.render_key(ball[j]) for j in chosen])
            if k + 1 < max_size:
                dfs(i + 1, nF, na, nb, k + 1)
            chosen.pop()

    dfs(0, 0, 0, 0, 0)
    ratio = min((Fraction(m, k) for k, m in best.items()), default=None)
    return {"n_max": n_max, "len_max": len_max, "max_size": max_size, "eps": str(eps),
            "ball_size": len(ball), "enumerated": count, "counterexamples": len(bad),
            "examples": bad[:10], "min_max_defect_ratio": None if ratio is None else str(ratio)}
