"""Exact feasibility of {x >= 0 : A x = b} over the rationals.

Phase-one simplex with Bland's rule on Fractions.  Feasible answers carry a
solution, infeasible ones a Farkas combination y of the constraints with
y.A <= 0 coefficientwise and y.b > 0.  Both are re-checked against the full
constraint list before being returned.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence


@dataclass
class Constraint:
    """sum(coeffs[j] * x_j) == rhs."""

    id: str
    coeffs: dict[int, Fraction]
    rhs: Fraction = Fraction(0)

    def evaluate(self, values: Sequence[Fraction]) -> Fraction:
        return sum((c * values[j] for j, c in self.coeffs.items()), Fraction(0))


@dataclass
class LPResult:
    feasible: bool
    n_vars: int
    constraints: list[Constraint]
    values: list[Fraction] | None = None
    certificate: list[tuple[str, Fraction]] | None = None
    pivots: int = 0
    info: dict = field(default_factory=dict)

    def verify(self) -> bool:
        if self.feasible:
            return check_solution(self.constraints, self.values)
        return check_certificate(self.n_vars, self.constraints, self.certificate)


def check_solution(constraints: Sequence[Constraint], values: Sequence[Fraction] | None) -> bool:
    if values is None or any(v < 0 for v in values):
        return False
    return all(c.evaluate(values) == c.rhs for c in constraints)


def combine(n_vars: int, constraints: Sequence[Constraint],
            certificate: Sequence[tuple[str, Fraction]]) -> tuple[list[Fraction], Fraction]:
    """Coefficients and constant of the combination sum y_i (row_i)."""
    by_id = {c.id: c for c in constraints}
    coeffs = [Fraction(0)] * n_vars
    const = Fraction(0)
    for cid, y in certificate:
        row = by_id[cid]
        for j, a in row.coeffs.items():
            coeffs[j] += y * a
        const += y * row.rhs
    return coeffs, const


def check_certificate(n_vars: int, constraints: Sequence[Constraint],
                      certificate: Sequence[tuple[str, Fraction]] | None) -> bool:
    """A valid certificate gives sum(nonpositive * x) == positive, impossible for x >= 0."""
    if not certificate:
        return False
    ids = {c.id for c in constraints}
    if any(cid not in ids for cid, _ in certificate):
        return False
    coeffs, const = combine(n_vars, constraints, certificate)
    return all(a <= 0 for a in coeffs) and const > 0


def _independent_rows(n_vars: int, rows: list[tuple[dict[int, Fraction], Fraction]]) -> list[int]:
    """Indices of a maximal set of rows independent as augmented rows [a | b]."""
    echelon: dict[int, dict[int, Fraction]] = {}
    keep = []
    for idx, (coeffs, rhs) in enumerate(rows):
        r = {j: c for j, c in coeffs.items() if c}
        if rhs:
            r[n_vars] = rhs
        while r:
            p = min(r)
            base = echelon.get(p)
            if base is None:
                inv = 1 / r[p]
                echelon[p] = {j: c * inv for j, c in r.items()}
                keep.append(idx)
                break
            f = r[p]
            for j, c in base.items():
                v = r.get(j, 0) - f * c
                if v:
                    r[j] = v
                else:
                    r.pop(j, None)
    return keep


def solve_feasibility(n_vars: int, constraints: Sequence[Constraint]) -> LPResult:
    constraints = list(constraints)
    if len({c.id for c in constraints}) != len(constraints):
        raise ValueError("constraint ids must be unique")
    rows = [({j: Fraction(a) for j, a in c.coeffs.items()}, Fraction(c.rhs)) for c in constraints]
    keep = _independent_rows(n_vars, rows)
    m = len(keep)
    width = n_vars + m
    signs = []
    T: list[list[Fraction]] = []
    for k, idx in enumerate(keep):
        coeffs, rhs = rows[idx]
        sg = -1 if rhs < 0 else 1
        signs.append(sg)
        row = [Fraction(0)] * (width + 1)
        for j, a in coeffs.items():
            row[j] = sg * a
        row[n_vars + k] = Fraction(1)
        row[width] = sg * rhs
        T.append(row)
    basis = [n_vars + k for k in range(m)]
    # reduced costs of phase one: minimise the sum of artificials
    cost = [Fraction(0)] * (width + 1)
    for row in T:
        for j in range(n_vars):
            cost[j] -= row[j]
        cost[width] -= row[width]
    pivots = 0
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][width] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:  # cannot happen: phase one is bounded below by zero
            raise RuntimeError("phase one reported unbounded")
        piv = T[leave][enter]
        prow = [v / piv for v in T[leave]]
        T[leave] = prow
        for i in range(m):
            if i != leave and T[i][enter]:
                f = T[i][enter]
                Ti = T[i]
                for j in range(width + 1):
                    if prow[j]:
                        Ti[j] -= f * prow[j]
        f = cost[enter]
        for j in range(width + 1):
            if prow[j]:
                cost[j] -= f * prow[j]
        basis[leave] = enter
        pivots += 1
    infeas = sum((T[i][width] for i in range(m) if basis[i] >= n_vars), Fraction(0))
    info = {"rows": len(constraints), "independent_rows": m}
    if infeas == 0:
        values = [Fraction(0)] * n_vars
        for i, b in enumerate(basis):
            if b < n_vars:
                values[b] = T[i][width]
        res = LPResult(True, n_vars, constraints, values=values, pivots=pivots, info=info)
    else:
        y = [Fraction(0)] * m
        for i, b in enumerate(basis):
            if b >= n_vars:
                for k in range(m):
                    y[k] += T[i][n_vars + k]
        cert = [(constraints[keep[k]].id, signs[k] * y[k]) for k in range(m) if y[k]]
        res = LPResult(False, n_vars, constraints, certificate=cert, pivots=pivots, info=info)
    if not res.verify():
        raise RuntimeError("simplex result failed exact re-verification")
    return res
