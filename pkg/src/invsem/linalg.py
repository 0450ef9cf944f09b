"""Exact linear algebra on sparse rational vectors (dicts column -> value)."""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Hashable, Mapping, Sequence

Vector = Mapping[Hashable, Fraction]


def rank(vectors: Sequence[Vector]) -> int:
    """Rank by fraction-free (Bareiss) elimination after clearing denominators."""
    cols: dict = {}
    for v in vectors:
        for k, c in v.items():
            if c:
                cols.setdefault(k, len(cols))
    width = len(cols)
    M = []
    for v in vectors:
        den = lcm(1, *(Fraction(c).denominator for c in v.values()))
        row = [0] * width
        for k, c in v.items():
            if c:
                row[cols[k]] = int(Fraction(c) * den)
        if any(row):
            M.append(row)
    r, prev = 0, 1
    for c in range(width):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        p = M[r]
        for i in range(r + 1, len(M)):
            q = M[i][c]
            M[i] = [(p[c] * M[i][j] - q * p[j]) // prev for j in range(width)]
        prev = p[c]
        r += 1
        if r == len(M):
            break
    return r


def solve_affine(rows: Sequence[Vector], rhs: Sequence[Fraction], unknowns: Sequence[Hashable]
                 ) -> tuple[dict, list[dict]] | None:
    """Solutions of rows . x = rhs as (particular, nullspace basis), or None if inconsistent.

    Free unknowns are those without a pivot in the reduced echelon form, taken
    in the order given; the particular solution sets them to zero.
    """
    order = {u: i for i, u in enumerate(unknowns)}
    work = []
    for row, b in zip(rows, rhs):
        r = {k: Fraction(c) for k, c in row.items() if c}
        work.append((r, Fraction(b)))
    pivots: dict = {}  # unknown -> (row, rhs) with coefficient 1 on the unknown
    for r, b in work:
        for u, (pr, pb) in pivots.items():
            f = r.get(u)
            if f:
                for k, c in pr.items():
                    r[k] = r.get(k, 0) - f * c
                    if not r[k]:
                        del r[k]
                b -= f * pb
        if not r:
            if b:
                return None
            continue
        u = min(r, key=order.__getitem__)
        inv = 1 / r[u]
        r = {k: c * inv for k, c in r.items()}
        b *= inv
        for v, (pr, pb) in list(pivots.items()):
            f = pr.get(u)
            if f:
                new = dict(pr)
                for k, c in r.items():
                    new[k] = new.get(k, 0) - f * c
                    if not new[k]:
                        del new[k]
                pivots[v] = (new, pb - f * b)
        pivots[u] = (r, b)
    free = [u for u in unknowns if u not in pivots]
    particular = {u: Fraction(0) for u in unknowns}
    for u, (_, b) in pivots.items():
        particular[u] = b
    basis = []
    for f in free:
        vec = {u: Fraction(0) for u in unknowns}
        vec[f] = Fraction(1)
        for u, (r, _) in pivots.items():
            vec[u] = -r.get(f, 0)
        basis.append(vec)
    return particular, basis


def dot(row: Vector, x: Mapping[Hashable, Fraction]) -> Fraction:
    return sum((c * x.get(k, 0) for k, c in row.items()), Fraction(0))

