"""Named semigroups and representations used by the CLI and the test-suites."""
from __future__ import annotations

import re

from .core import InverseSemigroup, PartialBijection, Semigroup
from .errors import InvalidInput
from .rep import Representation
from .setalg import AffinePartialMap


def day2() -> Semigroup:
    """{a, b} with ab = aa = a and ba = bb = b (not an inverse semigroup)."""
    return Semigroup([[0, 0], [1, 1]], ["a", "b"])


def symmetric_inverse_rep(n: int) -> Representation:
    """Natural action of the symmetric inverse monoid on n points."""
    if n < 1:
        raise InvalidInput("symmetric_inverse needs n >= 1")
    gens, names = [], []
    if n >= 2:
        gens.append(PartialBijection(n, [(0, 1), (1, 0)] + [(x, x) for x in range(2, n)]))
        names.append("t")
    if n >= 3:
        gens.append(PartialBijection(n, [(x, (x + 1) % n) for x in range(n)]))
        names.append("c")
    gens.append(PartialBijection.identity(n, range(n - 1)))
    names.append("p")
    return Representation(names, gens, n, label=f"symmetric_inverse({n})")


def symmetric_inverse(n: int) -> InverseSemigroup:
    return symmetric_inverse_rep(n).closure[0]


def brandt5_rep() -> Representation:
    """The four single-point maps of {0, 1}; with the unit they close to 6 elements."""
    gens = [PartialBijection(2, [(i, j)]) for i in range(2) for j in range(2)]
    names = [f"e{i}{j}" for i in range(2) for j in range(2)]
    return Representation(names, gens, 2, label="brandt5")


def brandt5_table() -> list[list[int]]:
    """Five-element Brandt semigroup: 0 and matrix units e_ij (index 1 + 2i + j)."""
    def idx(i, j):
        return 1 + 2 * i + j

    table = [[0] * 5 for _ in range(5)]
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    table[idx(i, j)][idx(k, l)] = idx(i, l) if j == k else 0
    return table


def brandt5() -> InverseSemigroup:
    return InverseSemigroup.from_table(brandt5_table(), ["0", "e00", "e01", "e10", "e11"],
                                       unitize=True)


def cyclic_rep(n: int) -> Representation:
    if n < 1:
        raise InvalidInput("cyclic needs n >= 1")
    return Representation(["g"], [PartialBijection(n, [(x, (x + 1) % n) for x in range(n)])], n,
                          label=f"cyclic({n})")


def cyclic(n: int) -> InverseSemigroup:
    return cyclic_rep(n).closure[0]


def wagner_preston_rep(sg: InverseSemigroup, label: str = "") -> Representation:
    """Left translations x -> s x on s*s S, acting on the points of S."""
    n = sg.size
    gens = []
    for s in range(n):
        p = sg.source_projection(s)
        gens.append(PartialBijection(n, [(x, sg.mul(s, x)) for x in range(n)
                                         if sg.mul(p, x) == x]))
    return Representation([f"s{i}" for i in range(n)], gens, n, label=label or "wagner_preston")


def bicyclic_on_N() -> Representation:
    """a: n -> n + 1, so a*: n -> n - 1 on N \\ {0}."""
    return Representation(["a"], [AffinePartialMap(1, 1, 1)], None, label="bicyclic_on_N")


def cuntz2_on_N() -> Representation:
    """d0: n -> 2n and d1: n -> 2n + 1."""
    return Representation(["d0", "d1"], [AffinePartialMap(2, 0, 1), AffinePartialMap(2, 1, 1)],
                          None, label="cuntz2_on_N")


FINITE_SEMIGROUP_PRESETS = ["day2", "symmetric_inverse(1)", "symmetric_inverse(2)",
                            "symmetric_inverse(3)", "brandt5", "cyclic(1)", "cyclic(2)",
                            "cyclic(3)", "cyclic(4)"]

FINITE_REP_PRESETS = ["symmetric_inverse(1)", "symmetric_inverse(2)", "symmetric_inverse(3)",
                      "brandt5", "cyclic(1)", "cyclic(2)", "cyclic(3)", "cyclic(4)", "cyclic(5)",
                      "wp:symmetric_inverse(1)", "wp:symmetric_inverse(2)", "wp:brandt5",
                      "wp:cyclic(3)"]

INFINITE_REP_PRESETS = ["bicyclic_on_N", "cuntz2_on_N"]

_PARAM = re.compile(r"^([a-z_]+?)[(:]?(\d+)\)?$")


def _split(name: str) -> tuple[str, int | None]:
    m = _PARAM.match(name)
    if m and m.group(1) in ("symmetric_inverse", "cyclic"):
        return m.group(1), int(m.group(2))
    return name, None


def semigroup_preset(name: str) -> Semigroup:
    base, n = _split(name.strip())
    if base == "day2":
        return day2()
    if base == "brandt5":
        return brandt5()
    if base == "symmetric_inverse" and n is not None:
        return symmetric_inverse(n)
    if base == "cyclic" and n is not None:
        return cyclic(n)
    raise InvalidInput(f"unknown semigroup preset {name!r}")


def rep_preset(name: str) -> Representation:
    name = name.strip()
    if name.startswith("wp:"):
        sg = semigroup_preset(name[3:])
        if not isinstance(sg, InverseSemigroup):
            raise InvalidInput(f"{name[3:]} is not an inverse semigroup")
        return wagner_preston_rep(sg, label=name)
    if name == "bicyclic_on_N":
        return bicyclic_on_N()
    if name == "cuntz2_on_N":
        return cuntz2_on_N()
    base, n = _split(name)
    if base == "symmetric_inverse" and n is not None:
        return symmetric_inverse_rep(n)
    if base == "cyclic" and n is not None:
        return cyclic_rep(n)
    if base == "brandt5":
        return brandt5_rep()
    raise InvalidInput(f"unknown representation preset {name!r}")


