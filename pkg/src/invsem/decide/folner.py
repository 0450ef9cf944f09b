"""Følner sets for actions by partial bijections: search, refinement and extraction."""
from __future__ import annotations

import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..errors import InvalidInput, PigeonholeFailed, PreconditionViolated
from ..rep import DEFAULT_WORD_BOUND, Representation, Word

FOUND = "Found"
EXHAUSTED = "Exhausted"


def _gen_words(rep: Representation, gens) -> list[Word]:
    if gens is None:
        return [Word((l,)) for l in rep.letters()]
    return [rep.word(g) for g in gens]


def leak(rep: Representation, word, points: Iterable[int]) -> int:
    """|w(F ∩ D_{w*w}) \\ F| for a finite set of points F."""
    F = set(points)
    m = rep.as_map(word)
    return sum(1 for x in F if (y := m(x)) is not None and y not in F)


@dataclass
class Defect:
    word: str
    leak: int
    size: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.leak, self.size) if self.size else Fraction(0)


@dataclass
class FolnerCertificate:
    set: tuple[int, ...]
    defects: list[Defect]

    def recompute(self, rep: Representation) -> list[Defect]:
        return [Defect(d.word, leak(rep, d.word, self.set), len(self.set)) for d in self.defects]

    def verify(self, rep: Representation) -> bool:
        return self.recompute(rep) == self.defects

    def max_ratio(self) -> Fraction:
        return max((d.ratio for d in self.defects), default=Fraction(0))

    def to_json(self) -> dict:
        return {"set": list(self.set),
                "defects": [{"word": d.word, "leak": d.leak, "size": d.size}
                            for d in self.defects]}


def certificate_for(rep: Representation, points: Iterable[int], gens=None) -> FolnerCertificate:
    pts = tuple(sorted(set(points)))
    words = _gen_words(rep, gens)
    return FolnerCertificate(pts, [Defect(rep.render(w), leak(rep, w, pts), len(pts))
                                   for w in words])


@dataclass
class SearchResult:
    status: str
    certificate: FolnerCertificate | None
    sizes_searched: int
    nodes: int

    def to_json(self) -> dict:
        return {"status": self.status, "sizes_searched": self.sizes_searched,
                "nodes": self.nodes,
                "certificate": self.certificate.to_json() if self.certificate else None}


def leak_bound(eps: Fraction, size: int, strict: bool) -> int:
    """Largest leak L with L/size <= eps (or < eps when strict)."""
    x = eps * size
    if strict:
        return math.ceil(x) - 1
    return math.floor(x)


class _Searcher:
    """Depth-first search in lexicographic order over subsets of a window.

    Points are decided in increasing order; the leak through x -> s x is counted
    as soon as both x and s x are decided, which prunes early.
    """

    def __init__(self, window: Sequence[int], targets: Sequence[Sequence[int | None]]):
        self.window = list(window)
        N = len(window)
        idx = {x: i for i, x in enumerate(window)}
        self.n_gens = len(targets)
        self.now_out = [[] for _ in range(N)]  # gens whose image leaves the window
        self.back = [[] for _ in range(N)]     # (gen, earlier index)
        self.incoming = [[] for _ in range(N)]  # (gen, earlier source index)
        for j, tg in enumerate(targets):
            for i, y in enumerate(tg):
                if y is None:
                    continue
                ti = idx.get(y)
                if ti is None:
                    self.now_out[i].append(j)
                elif ti < i:
                    self.back[i].append((j, ti))
                elif ti > i:
                    self.incoming[ti].append((j, i))
        self.nodes = 0

    def first(self, k: int, bound: int, start: int = 0, forced_first: int | None = None):
        N = len(self.window)
        chosen = [False] * N
        leaks = [0] * self.n_gens
        picked: list[int] = []
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * N + 100))

        def dfs(i: int) -> bool:
            self.nodes += 1
            if i == N:
                return len(picked) == k
            need = k - len(picked)
            if need > N - i:
                return False
            options = (True, False) if need > 0 else (False,)
            if forced_first is not None and i <= forced_first:
                options = (i == forced_first,)
            for inc in options:
                changed = []
                ok = True
                if inc:
                    for j in self.now_out[i]:
                        leaks[j] += 1
                        changed.append(j)
                    for j, ti in self.back[i]:
                        if not chosen[ti]:
                            leaks[j] += 1
                            changed.append(j)
                else:
                    for j, src in self.incoming[i]:
                        if chosen[src]:
                            leaks[j] += 1
                            changed.append(j)
                if any(leaks[j] > bound for j in changed):
                    ok = False
                if ok:
                    chosen[i] = inc
                    if inc:
                        picked.append(i)
                    if dfs(i + 1):
                        return True
                    if inc:
                        picked.pop()
                    chosen[i] = False
                for j in changed:
                    leaks[j] -= 1
            return False

        if dfs(start):
            return [self.window[i] for i in picked]
        return None


def _shard(args):
    window, targets, k, bound, first = args
    s = _Searcher(window, targets)
    return s.first(k, bound, forced_first=first), s.nodes


def folner_search(rep: Representation, eps, gens=None, window: Iterable[int] | None = None,
                  max_size: int | None = None, exhaustive: bool = False, strict: bool = False,
                  split: bool = False, amenable: bool = False, jobs: int = 1) -> SearchResult:
    """Smallest, then lexicographically first, F in the window with small defects.

    Every generator s must satisfy |s(F ∩ D_{s*s}) \\ F| <= eps |F| (or < with
    `strict`).  With `split` the budget per generator is eps / len(gens).  With
    `amenable` only points in every generator's domain are considered.
    """
    eps = Fraction(eps)
    words = _gen_words(rep, gens)
    if window is None:
        if not rep.is_finite:
            raise InvalidInput("a window is required on N")
        window = range(rep.universe_size)
    pts = sorted(set(window))
    maps = [rep.eval_word(w) for w in words]
    if amenable:
        pts = [x for x in pts if all(m(x) is not None for m in maps)]
    if exhaustive:
        max_size = len(pts)
    if max_size is None:
        raise InvalidInput("give max_size or exhaustive")
    budget = eps / len(words) if split else eps
    targets = [[m(x) for x in pts] for m in maps]
    searcher = _Searcher(pts, targets)
    nodes = 0
    for k in range(1, min(max_size, len(pts)) + 1):
        bound = leak_bound(budget, k, strict)
        if bound < 0:
            continue
        found = None
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_shard, [(pts, targets, k, bound, f)
                                                 for f in range(len(pts) - k + 1)]))
            for res, n in results:
                nodes += n
                if found is None and res is not None:
                    found = res
        else:
            found = searcher.first(k, bound)
        if found is not None:
            cert = certificate_for(rep, found, words)
            return SearchResult(FOUND, cert, k, nodes + searcher.nodes)
    return SearchResult(EXHAUSTED, None, min(max_size, len(pts)), nodes + searcher.nodes)


def transitive_refine(cert: FolnerCertificate, rep: Representation, eps,
                      bound: int = DEFAULT_WORD_BOUND) -> FolnerCertificate:
    """Pass to one class of the word-length-bounded orbit partition of F.

    Requires sum of leaks < eps |F|; returns the first class F_j (by least point)
    whose leaks are all < eps |F_j|.
    """
    eps = Fraction(eps)
    total = sum(d.leak for d in cert.defects)
    if not total < eps * len(cert.set):
        raise PreconditionViolated(f"total leak {total} is not below eps |F| = {eps * len(cert.set)}")
    words = [d.word for d in cert.defects]
    for cls in rep.approx_classes(cert.set, bound):
        sub = certificate_for(rep, cls, words)
        if all(d.leak < eps * len(cls) for d in sub.defects):
            return sub
    raise PigeonholeFailed("no class satisfies the leak bound")


# ---------------------------------------------------------------------------
# extraction of a Følner set from an almost invariant density


def _action_defect(rep: Representation, m, h: Mapping[int, Fraction]) -> Fraction:
    """|| s*h - s*s h ||_1, i.e. sum over x in D_{s*s} of |h(s x) - h(x)|."""
    pts = set(h)
    inv = m.inverse()
    pts |= {y for x in h if (y := inv(x)) is not None}
    tot = Fraction(0)
    for x in pts:
        y = m(x)
        if y is not None:
            tot += abs(h.get(y, Fraction(0)) - h.get(x, Fraction(0)))
    return tot


@dataclass
class LevelSet:
    threshold: Fraction
    gap: Fraction
    points: tuple[int, ...]

    @property
    def weight(self) -> Fraction:
        return self.gap * len(self.points)


@dataclass
class ExtractionResult:
    certificate: FolnerCertificate
    index: int
    levels: list[LevelSet]
    good_indices: dict[str, list[int]]
    action_defects: dict[str, Fraction]

    def to_json(self) -> dict:
        return {"certificate": self.certificate.to_json(), "index": self.index,
                "levels": [{"threshold": str(l.threshold), "gap": str(l.gap),
                            "points": list(l.points)} for l in self.levels],
                "good_indices": self.good_indices,
                "action_defects": {k: str(v) for k, v in self.action_defects.items()}}


def level_sets(h: Mapping[int, Fraction]) -> list[LevelSet]:
    """A_i = {h >= a_i} over the distinct positive values a_1 < ... < a_N of h."""
    vals = sorted({v for v in h.values() if v > 0})
    out = []
    prev = Fraction(0)
    for a in vals:
        out.append(LevelSet(a, a - prev, tuple(sorted(x for x, v in h.items() if v >= a))))
        prev = a
    return out


def namioka_extract(h: Mapping[int, Fraction] | Sequence[Fraction], eps, gens,
                    rep: Representation) -> ExtractionResult:
    """Turn a finitely supported density with small action defects into a Følner set.

    `gens` must be closed under star.  Precondition: for each s in gens,
    ||s*h - s*s h||_1 < eps / len(gens).  Returns a level set A of h with
    |s(A ∩ D_{s*s}) \\ A| < eps |A| for every s in gens.
    """
    eps = Fraction(eps)
    if not isinstance(h, Mapping):
        h = {x: Fraction(v) for x, v in enumerate(h)}
    h = {x: Fraction(v) for x, v in h.items() if v}
    if any(v < 0 for v in h.values()) or not h:
        raise PreconditionViolated("h must be nonnegative with nonempty support")
    labels = [g if isinstance(g, str) else rep.render(g) if isinstance(g, Word) else str(g)
              for g in gens]
    maps = [rep.as_map(g) for g in gens]
    mapset = set(maps)
    if any(m.inverse() not in mapset for m in maps):
        raise PreconditionViolated("generators are not closed under star")
    k = len(maps)
    defects = {}
    for lab, m in zip(labels, maps):
        d = _action_defect(rep, m, h)
        defects[lab] = d
        if not d < eps / k:
            raise PreconditionViolated(f"action defect {d} of {lab} is not below eps/{k}")
    levels = level_sets(h)
    good: dict[str, list[int]] = {}
    common = set(range(len(levels)))
    for lab, m in zip(labels, maps):
        ok = []
        for i, lv in enumerate(levels):
            A = set(lv.points)
            lk = sum(1 for x in A if (y := m(x)) is not None and y not in A)
            if lk < eps * len(A):
                ok.append(i)
        good[lab] = ok
        common &= set(ok)
    if not common:
        raise PigeonholeFailed("no level set is good for every generator")
    i0 = min(common)
    A = levels[i0].points
    cert = FolnerCertificate(A, [Defect(lab, sum(1 for x in A if (y := m(x)) is not None
                                                   and y not in set(A)), len(A))
                                 for lab, m in zip(labels, maps)])
    if not all(d.leak < eps * d.size for d in cert.defects):
        raise PigeonholeFailed("extracted set fails the leak bound")
    return ExtractionResult(cert, i0, levels, good, defects)


def empirical_density_report(subset, folner_sets: Sequence[Iterable[int]]) -> list[Fraction]:
    """|B ∩ F_n| / |F_n| along a sequence of finite sets."""
    out = []
    for F in folner_sets:
        pts = list(F)
        if not pts:
            raise InvalidInput("Følner sets must be nonempty")
        out.append(Fraction(sum(1 for x in pts if x in subset), len(pts)))
    return out


__all__ = ["EXHAUSTED", "FOUND", "Defect", "ExtractionResult", "FolnerCertificate",
           "SearchResult", "certificate_for", "empirical_density_report", "folner_search",
           "leak", "leak_bound", "level_sets", "namioka_extract", "transitive_refine"]
