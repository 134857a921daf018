"""Finite groups given by multiplication tables.

Elements are addressed by index; ``elements`` holds their display names.
Permutation groups compose right to left: ``(p*q)(i) = p(q(i))``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

MAX_PERM_GROUP = 10080


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class GroupTable:
    elements: tuple[str, ...]
    mult: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        n = len(self.elements)
        if n == 0:
            raise GroupError("a group needs at least one element")
        if len(set(self.elements)) != n:
            raise GroupError("duplicate element name")
        if len(self.mult) != n or any(len(row) != n for row in self.mult):
            raise GroupError("multiplication table is not square")
        if any(not 0 <= x < n for row in self.mult for x in row):
            raise GroupError("multiplication table leaves the element set")

    def validate(self) -> list[str]:
        """Exhaustive check of the group laws."""
        out = []
        n, m = len(self), self.mult
        for a, b, c in product(range(n), repeat=3):
            if m[m[a][b]][c] != m[a][m[b][c]]:
                out.append(f"not associative at ({self.elements[a]}, {self.elements[b]}, {self.elements[c]})")
                break
        es = [e for e in range(n) if all(m[e][x] == x == m[x][e] for x in range(n))]
        if not es:
            out.append("no identity element")
            return out
        e = es[0]
        for a in range(n):
            if not any(m[a][b] == e == m[b][a] for b in range(n)):
                out.append(f"{self.elements[a]} has no inverse")
        return out

    def __len__(self) -> int:
        return len(self.elements)

    @cached_property
    def identity(self) -> int:
        return next(e for e in range(len(self)) if all(self.mult[e][x] == x for x in range(len(self))))

    @cached_property
    def _inverse(self) -> tuple[int, ...]:
        e = self.identity
        return tuple(next(b for b in range(len(self)) if self.mult[a][b] == e) for a in range(len(self)))

    def mul(self, a: int, b: int) -> int:
        return self.mult[a][b]

    def inv(self, a: int) -> int:
        return self._inverse[a]

    def div(self, x: int, y: int) -> int:
        """``x / y = x * y^-1``."""
        return self.mult[x][self._inverse[y]]

    def ldiv(self, x: int, y: int) -> int:
        """``x \\ y = x^-1 * y``."""
        return self.mult[self._inverse[x]][y]

    def conj(self, g: int, a: int) -> int:
        return self.mult[self.mult[g][a]][self._inverse[g]]

    def prod(self, xs: Iterable[int]) -> int:
        acc = self.identity
        for x in xs:
            acc = self.mult[acc][x]
        return acc

    def index(self, name: str) -> int:
        try:
            return self.elements.index(name)
        except ValueError:
            raise GroupError(f"{name!r} is not an element of {self.name or 'the group'}") from None

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """A small generating set, greedily chosen in element order."""
        gens, reached = [], {self.identity}
        for a in range(len(self)):
            if a in reached:
                continue
            gens.append(a)
            frontier = list(reached)
            while frontier:
                nxt = []
                for x in frontier:
                    for g in gens:
                        y = self.mult[x][g]
                        if y not in reached:
                            reached.add(y)
                            nxt.append(y)
                frontier = nxt
        return tuple(gens)


def from_table(elements: Sequence[str], rows: Sequence[Sequence[str]], name: str = "") -> GroupTable:
    idx = {x: k for k, x in enumerate(elements)}
    try:
        mult = tuple(tuple(idx[x] for x in row) for row in rows)
    except KeyError as exc:
        raise GroupError(f"table mentions unknown element {exc.args[0]!r}") from None
    g = GroupTable(tuple(elements), mult, name)
    problems = g.validate()
    if problems:
        raise GroupError("; ".join(problems))
    return g


def cyclic(n: int) -> GroupTable:
    names = tuple(str(k) for k in range(n))
    return GroupTable(names, tuple(tuple((a + b) % n for b in range(n)) for a in range(n)), f"Z/{n}")


def cycle_name(perm: Sequence[int]) -> str:
    seen, parts = set(), []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = perm[j]
        parts.append("(" + ",".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


def from_permutations(degree: int, generators: Sequence[Sequence[Sequence[int]]], name: str = "",
                      cap: int = MAX_PERM_GROUP) -> GroupTable:
    """Expand the permutation group generated by cycle lists into a table."""
    from sympy.combinatorics import Permutation, PermutationGroup

    gens = [Permutation([list(c) for c in cycles], size=degree) for cycles in generators]
    group = PermutationGroup(gens or [Permutation(list(range(degree)))])
    if group.order() > cap:
        raise GroupError(f"group of order {group.order()} exceeds the expansion cap {cap}")
    perms = sorted(tuple(p.array_form) for p in group.generate())
    pos = {p: k for k, p in enumerate(perms)}
    mult = tuple(tuple(pos[tuple(p[q[i]] for i in range(degree))] for q in perms) for p in perms)
    return GroupTable(tuple(cycle_name(p) for p in perms), mult, name)


def symmetric(n: int) -> GroupTable:
    gens = [[list(range(n))], [[0, 1]]] if n > 1 else []
    return from_permutations(n, gens, f"S{n}")
