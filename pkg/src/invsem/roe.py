"""Finite matrix models of the operators V_s and P_A on l2 of a window.

A window is a finite list of points of X.  V_w sends the basis vector of x to
that of w x; columns whose image leaves the window are zeroed and reported as
the boundary, and identities are only asserted on the remaining interior.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import linalg
from .errors import BoundaryContamination, ClassConditionUnmet, InvalidInput, InvalidWitness
from .rep import Representation, Word

ZERO, ONE = Fraction(0), Fraction(1)


class Matrix:
    """Dense square-or-rectangular matrix of Fractions."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Sequence[Sequence] | None = None):
        self.rows, self.cols = rows, cols
        if data is None:
            self.data = [[ZERO] * cols for _ in range(rows)]
        else:
            if len(data) != rows or any(len(r) != cols for r in data):
                raise InvalidInput("matrix data does not match its dimensions")
            self.data = [[Fraction(v) for v in r] for r in data]

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        m = cls(n, n)
        for i in range(n):
            m.data[i][i] = ONE
        return m

    @classmethod
    def diagonal(cls, values: Sequence) -> "Matrix":
        m = cls(len(values), len(values))
        for i, v in enumerate(values):
            m.data[i][i] = Fraction(v)
        return m

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        return self.data[ij[0]][ij[1]]

    def _shape(self, other: "Matrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise InvalidInput("matrix dimensions differ")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._shape(other)
        return Matrix(self.rows, self.cols,
                      [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(-1)

    def scale(self, q) -> "Matrix":
        q = Fraction(q)
        return Matrix(self.rows, self.cols, [[q * a for a in r] for r in self.data])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise InvalidInput("matrix dimensions do not allow a product")
        sparse = [[(j, v) for j, v in enumerate(r) if v] for r in other.data]
        out = Matrix(self.rows, other.cols)
        for i, r in enumerate(self.data):
            acc = out.data[i]
            for k, a in enumerate(r):
                if a:
                    for j, b in sparse[k]:
                        acc[j] += a * b
        return out

    def adjoint(self) -> "Matrix":
        """Transpose; entries are rational, so this is the adjoint."""
        return Matrix(self.cols, self.rows, [list(c) for c in zip(*self.data)]) if self.rows \
            else Matrix(self.cols, 0)

    def compress(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(len(rows), len(cols), [[self.data[i][j] for j in cols] for i in rows])

    def trace(self) -> Fraction:
        return sum((self.data[i][i] for i in range(min(self.rows, self.cols))), ZERO)

    def is_zero(self) -> bool:
        return not any(v for r in self.data for v in r)

    def nonzero(self) -> dict[tuple[int, int], Fraction]:
        return {(i, j): v for i, r in enumerate(self.data) for j, v in enumerate(r) if v}

    def hs_norm_sq(self) -> Fraction:
        return sum((v * v for r in self.data for v in r), ZERO)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Matrix) and self.rows == other.rows and self.cols == other.cols
                and self.data == other.data)

    def to_json(self) -> list[list[str]]:
        return [[str(v) for v in r] for r in self.data]

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols})"


@dataclass
class Truncation:
    """An operator compressed to a window, with the columns that leaked out."""

    matrix: Matrix
    boundary: frozenset[int] = frozenset()


class Window:
    def __init__(self, points: Iterable[int]):
        self.points = sorted(set(points))
        self.index = {x: i for i, x in enumerate(self.points)}

    @classmethod
    def of(cls, value) -> "Window":
        if isinstance(value, Window):
            return value
        if isinstance(value, int):
            return cls(range(value))
        return cls(value)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, x) -> bool:
        return x in self.index

    def positions(self, pts: Iterable[int]) -> list[int]:
        return sorted(self.index[x] for x in pts if x in self.index)


def build_V(rep: Representation, w, window) -> Truncation:
    window = Window.of(window)
    w = rep.word(w)
    m = Matrix(len(window), len(window))
    boundary = []
    for x in window.points:
        y = rep.apply(w, x)
        if y is None:
            continue
        if y in window:
            m.data[window.index[y]][window.index[x]] = ONE
        else:
            boundary.append(x)
    return Truncation(m, frozenset(boundary))


def build_P(A, window) -> Matrix:
    window = Window.of(window)
    return Matrix.diagonal([ONE if x in A else ZERO for x in window.points])


def multiplication(f: Callable[[int], Fraction] | Mapping[int, Fraction], window) -> Matrix:
    window = Window.of(window)
    get = f.get if isinstance(f, Mapping) else f
    return Matrix.diagonal([Fraction(get(x) or 0) for x in window.points])


# ---------------------------------------------------------------------------
# operator symbols


@dataclass(frozen=True)
class V:
    word: Word


@dataclass(frozen=True)
class Proj:
    set: object


@dataclass(frozen=True)
class Product:
    factors: tuple


@dataclass(frozen=True)
class Sum:
    terms: tuple  # of (Fraction, symbol)


def evaluate(symbol, rep: Representation, window) -> Truncation:
    """Matrix of a symbol on the window; the boundary collects every leaking factor."""
    window = Window.of(window)
    if isinstance(symbol, V):
        return build_V(rep, symbol.word, window)
    if isinstance(symbol, Proj):
        return Truncation(build_P(symbol.set, window))
    if isinstance(symbol, Product):
        acc = Truncation(Matrix.identity(len(window)))
        for f in symbol.factors:
            t = evaluate(f, rep, window)
            acc = Truncation(acc.matrix @ t.matrix, acc.boundary | t.boundary)
        return acc
    if isinstance(symbol, Sum):
        acc = Truncation(Matrix(len(window), len(window)))
        for q, s in symbol.terms:
            t = evaluate(s, rep, window)
            acc = Truncation(acc.matrix + t.matrix.scale(q), acc.boundary | t.boundary)
        return acc
    raise InvalidInput(f"unknown operator symbol {symbol!r}")


def symbol_to_json(symbol, rep: Representation):
    if isinstance(symbol, V):
        return {"V": rep.render(symbol.word)}
    if isinstance(symbol, Proj):
        return {"P": symbol.set.to_json()}
    if isinstance(symbol, Product):
        return {"product": [symbol_to_json(f, rep) for f in symbol.factors]}
    return {"sum": [[str(q), symbol_to_json(s, rep)] for q, s in symbol.terms]}


# ---------------------------------------------------------------------------
# commutation relations


@dataclass
class RelationReport:
    interior: list[int]
    checked: int
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"interior_size": len(self.interior), "checked": self.checked,
                "failures": self.failures, "passed": self.passed}


def check_relations(rep: Representation, window, words: Sequence, sets: Sequence = (),
                    functions: Sequence = ()) -> RelationReport:
    """V_s M_f = M_{sf} V_s and P_A V_s = V_s P_{s*(A ∩ D_ss*)} on the interior.

    (sf)(x) = f(s* x) on the range of s and 0 elsewhere.  The interior is the
    set of columns that no sampled word pushes out of the window.
    """
    window = Window.of(window)
    words = [rep.word(w) for w in words]
    trunc = {w: build_V(rep, w, window) for w in words}
    leak = set().union(*(t.boundary for t in trunc.values())) if trunc else set()
    cols = [window.index[x] for x in window.points if x not in leak]
    rows = list(range(len(window)))
    failures, checked = [], 0
    for w in words:
        Vw = trunc[w].matrix
        name = rep.render(w)
        for f in functions:
            get = f.get if isinstance(f, Mapping) else f

            def moved(x, w=w, get=get):
                y = rep.apply(w.star(), x)
                return ZERO if y is None else Fraction(get(y) or 0)

            lhs = Vw @ multiplication(f, window)
            rhs = multiplication(moved, window) @ Vw
            checked += 1
            if lhs.compress(rows, cols) != rhs.compress(rows, cols):
                failures.append(f"V_{name} f != (sf) V_{name}")
        for A in sets:
            if isinstance(A, (str, list)):
                A = rep.make_set(A)
            pulled = rep.act(w.star(), A & rep.range_of(w))
            lhs = build_P(A, window) @ Vw
            rhs = Vw @ build_P(pulled, window)
            checked += 1
            if lhs.compress(rows, cols) != rhs.compress(rows, cols):
                failures.append(f"P_A V_{name} != V_{name} P_s*(A)")
    return RelationReport([window.points[j] for j in cols], checked, failures)


def conditional_expectation(M: Matrix) -> Matrix:
    if M.rows != M.cols:
        raise InvalidInput("conditional expectation needs a square matrix")
    return Matrix.diagonal([M.data[i][i] for i in range(M.rows)])


# ---------------------------------------------------------------------------
# tracial functionals on the span of monomials V_w P_A


@dataclass
class TraceSpace:
    """Functionals are dicts on matrix units (row point, column point)."""

    units: list[tuple[int, int]]  # the span A_L, as matrix units
    unknowns: list[tuple[int, int]]  # units of A_L and of all products of two of them
    particular: dict
    directions: list[dict]
    equations: int

    def functionals(self) -> list[dict]:
        """The particular solution and its translates by each direction, all with tau(1) = 1."""
        out = [self.particular]
        for d in self.directions:
            out.append({u: self.particular[u] + d[u] for u in self.unknowns})
        return out

    def to_json(self) -> dict:
        def enc(f):
            return [[y, x, str(v)] for (y, x), v in sorted(f.items()) if v]
        return {"span_dimension": len(self.units), "unknowns": len(self.unknowns),
                "equations": self.equations, "dimension": len(self.directions),
                "functionals": [enc(f) for f in self.functionals()]}


def _units(rep: Representation, window: Window, L: int) -> tuple[list[tuple[int, int]], list[Word]]:
    """Matrix units e_{wx,x} spanning {V_w P_A : |w| <= L, A within the window}."""
    words = rep.distinct_words(L)
    units: set[tuple[int, int]] = set()
    for w in words:
        for x in window.points:
            y = rep.apply(w, x)
            if y is None:
                continue
            if y not in window:
                raise BoundaryContamination(f"{rep.render(w)} moves {x} out of the window")
            units.add((y, x))
    return sorted(units), words


def trace_functional_space(rep: Representation, window, L: int) -> TraceSpace:
    """All tau with tau(ab) = tau(ba) for a, b in the spanning units and tau(1) = 1."""
    window = Window.of(window)
    units, _ = _units(rep, window, L)
    unknown_set = set(units)
    for (y, x) in units:
        for (u, v) in units:
            if x == u:
                unknown_set.add((y, v))
    unknowns = sorted(unknown_set)
    rows, rhs = [], []
    seen = set()
    for a in units:
        for b in units:
            row: dict = {}
            if a[1] == b[0]:
                row[(a[0], b[1])] = row.get((a[0], b[1]), 0) + 1
            if b[1] == a[0]:
                row[(b[0], a[1])] = row.get((b[0], a[1]), 0) - 1
            row = {k: Fraction(v) for k, v in row.items() if v}
            key = tuple(sorted(row.items()))
            if row and key not in seen:
                seen.add(key)
                rows.append(row)
                rhs.append(ZERO)
    rows.append({(x, x): ONE for x in window.points})
    rhs.append(ONE)
    sol = linalg.solve_affine(rows, rhs, unknowns)
    if sol is None:
        raise InvalidInput("no normalised tracial functional on this span")
    particular, directions = sol
    return TraceSpace(units, unknowns, particular, directions, len(rows))


def _three_colouring(rep: Representation, w: Word, window: Window) -> list[list[int]]:
    """Split the points of the window moved by w into classes C with w C ∩ C = ∅.

    The graph x -- w x has degree at most two, so greedy colouring needs three colours.
    """
    moved = [x for x in window.points if rep.apply(w, x) not in (None, x)]
    nbrs: dict[int, set[int]] = {x: set() for x in moved}
    for x in moved:
        y = rep.apply(w, x)
        if y in nbrs:
            nbrs[x].add(y)
            nbrs[y].add(x)
    colour: dict[int, int] = {}
    for x in moved:
        used = {colour[y] for y in nbrs[x] if y in colour}
        colour[x] = next(c for c in range(3) if c not in used)
    return [[x for x in moved if colour[x] == c] for c in range(3)]


def trace_factorization_check(rep: Representation, window, L: int,
                              space: TraceSpace | None = None) -> dict:
    """Check tau = tau∘E on the span for every basis functional, exactly.

    Also reports the three-colour split of the moved points of each word and
    the diagonal weights tau(e_xx) (positivity is read off these).
    """
    window = Window.of(window)
    space = space or trace_functional_space(rep, window, L)
    _, words = _units(rep, window, L)
    functionals = space.functionals()
    failures = []
    for i, tau in enumerate(functionals):
        for (y, x) in space.units:
            if y != x and tau[(y, x)] != 0:
                failures.append(f"functional {i} is nonzero on e_({y},{x})")
        for w in words:
            M = build_V(rep, w, window).matrix
            t = sum((tau[(window.points[r], window.points[c])] * v
                     for (r, c), v in M.nonzero().items()), ZERO)
            d = sum((tau[(x, x)] * M.data[window.index[x]][window.index[x]]
                     for x in window.points), ZERO)
            if t != d:
                failures.append(f"functional {i}: tau(V_{rep.render(w)}) != tau(E(V))")
    colouring = {}
    for w in words:
        classes = _three_colouring(rep, w, window)
        ok = all(rep.apply(w, x) not in set(c) for c in classes for x in c)
        colouring[rep.render(w) or "1"] = {"sizes": [len(c) for c in classes], "valid": ok}
        if not ok:
            failures.append(f"colouring of {rep.render(w)} is not proper")
    weights = [[str(tau[(x, x)]) for x in window.points] for tau in functionals]
    return {"functionals": len(functionals), "dimension": len(space.directions),
            "factorizes": not failures, "failures": failures, "diagonal_weights": weights,
            "positive": [all(tau[(x, x)] >= 0 for x in window.points) for tau in functionals],
            "colouring": colouring}


# ---------------------------------------------------------------------------
# corners, Hilbert–Schmidt defects, isometries


@dataclass
class CornerResult:
    rank: int
    expected: int
    single_class: bool

    def to_json(self) -> dict:
        return {"rank": self.rank, "expected": self.expected, "single_class": self.single_class}


def corner_dimension(F1: Iterable[int], F2: Iterable[int], rep: Representation, L: int,
                     strict: bool = False) -> CornerResult:
    """Rank of the span of P_F2 V_w P_u P_F1 over |w| <= L and points u of F1."""
    F1, F2 = sorted(set(F1)), sorted(set(F2))
    window = Window(set(F1) | set(F2))
    classes = rep.approx_classes(window.points, bound=L)
    single = len(classes) <= 1
    # P_F2 V_w P_u P_F1 is the matrix unit e_(wu, u) when wu lies in F2, else zero
    in_f2 = set(F2)
    mats = set()
    for w in rep.distinct_words(L):
        m = rep.eval_word(w)
        for u in F1:
            y = m(u)
            if y in in_f2:
                mats.add((window.index[y], window.index[u]))
    r = linalg.rank([{ij: ONE} for ij in sorted(mats)])
    res = CornerResult(r, len(F1) * len(F2), single)
    if strict and not single:
        raise ClassConditionUnmet(f"F1 ∪ F2 splits into {len(classes)} classes", rank=r)
    return res


@dataclass
class HSDefect:
    value: Fraction
    bound: Fraction

    @property
    def within(self) -> bool:
        return self.value <= self.bound

    def to_json(self) -> dict:
        return {"defect": str(self.value), "bound": str(self.bound), "within_bound": self.within}


def folner_projection_defect(F: Iterable[int], w, A, rep: Representation) -> HSDefect:
    """||V_w P_A P_F - P_F V_w P_A||_2^2 / |F| and its bound
    (|w(F ∩ D) \\ F| + |w*(F ∩ D') \\ F|) / |F| with D, D' the domain and range of w."""
    F = set(F)
    if not F:
        raise InvalidInput("F must be nonempty")
    w = rep.word(w)
    ws = w.star()
    out = {rep.apply(w, x) for x in F} - {None} - F
    back = {rep.apply(ws, x) for x in F} - {None} - F
    window = Window(F | out | back)
    Vw = build_V(rep, w, window).matrix
    PA = build_P(A, window)
    PF = build_P(F, window)
    diff = Vw @ PA @ PF - PF @ Vw @ PA
    value = diff.hs_norm_sq() / len(F)
    bound = Fraction(len(out) + len(back), len(F))
    res = HSDefect(value, bound)
    if not res.within:
        raise RuntimeError("Hilbert–Schmidt defect exceeds its bound")
    return res


@dataclass
class IsometryReport:
    W1: Matrix
    W2: Matrix
    interior: list[int]
    boundary: list[int]
    checks: dict[str, bool]

    def to_json(self, include_matrices: bool = False) -> dict:
        out = {"window_size": self.W1.rows, "interior": [min(self.interior), max(self.interior) + 1]
               if self.interior else [], "interior_size": len(self.interior),
               "boundary_size": len(self.boundary), "checks": self.checks}
        if include_matrices:
            out["W1"], out["W2"] = self.W1.to_json(), self.W2.to_json()
        return out


def isometries_from_paradox(pw, rep: Representation, window, check: bool = True) -> IsometryReport:
    """W1 = sum V_{s_i*} P_{s_i A_i} and W2 = sum V_{t_j*} P_{t_j B_j}.

    On the interior (columns no piece map pushes out of the window) a valid
    witness gives W1*W1 = W2*W2 = P_A and W1*W2 = 0, i.e. two isometries of
    l2(A) with orthogonal ranges.
    """
    from .typesem import paradox_problems

    if check:
        problems = paradox_problems(pw, rep)
        if problems:
            raise InvalidWitness("; ".join(problems))
    window = Window.of(window)
    n = len(window)

    def build(pieces):
        W = Matrix(n, n)
        leak: set[int] = set()
        for s, w in pieces:
            t = build_V(rep, w.star(), window)
            W = W + t.matrix @ build_P(rep.act(w, s), window)
            leak |= {x for x in t.boundary if x in rep.act(w, s)}
        return W, leak

    W1, b1 = build(pw.pieces_a)
    W2, b2 = build(pw.pieces_b)
    boundary = sorted(b1 | b2)
    interior = [x for x in window.points if x not in b1 | b2 and x in pw.target]
    idx = [window.index[x] for x in interior]
    PA = build_P(pw.target, window).compress(idx, idx)
    g1 = (W1.adjoint() @ W1).compress(idx, idx)
    g2 = (W2.adjoint() @ W2).compress(idx, idx)
    cross = (W1.adjoint() @ W2).compress(idx, idx)
    ranges = W1 @ W1.adjoint() @ W2 @ W2.adjoint()
    checks = {"W1*W1 = 1": g1 == PA, "W2*W2 = 1": g2 == PA, "W1*W2 = 0": cross.is_zero(),
              "ranges orthogonal": ranges.is_zero()}
    return IsometryReport(W1, W2, interior, boundary, checks)
