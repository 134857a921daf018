"""Finite Alexandrov spaces, covers, sieves, and etale gluing.

A finite space is a preorder on its points; the open sets are the
down-closed subsets, so the minimal open of ``x`` is ``{y : y <= x}``.
Opens are plain frozensets of point identifiers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Hashable, Iterable, Mapping

import networkx as nx
from networkx.utils import UnionFind


class SpaceError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteSpace:
    points: tuple[str, ...]
    leq: frozenset[tuple[str, str]]
    name: str = field(default="", compare=False)

    @classmethod
    def from_relations(cls, points: Iterable[str], pairs: Iterable[tuple[str, str]] = (),
                       name: str = "") -> "FiniteSpace":
        """Build a space from generating pairs ``x <= y``; closure is computed."""
        points = tuple(points)
        if len(set(points)) != len(points):
            dup = sorted({p for p in points if points.count(p) > 1})
            raise SpaceError(f"duplicate point identifier(s): {' '.join(dup)}")
        g = nx.DiGraph()
        g.add_nodes_from(points)
        for x, y in pairs:
            for p in (x, y):
                if p not in g:
                    raise SpaceError(f"relation references unknown point {p!r}")
            g.add_edge(x, y)
        closure = nx.transitive_closure(g, reflexive=True)
        return cls(points, frozenset(closure.edges), name)

    @cached_property
    def order(self) -> dict[str, int]:
        return {p: k for k, p in enumerate(self.points)}

    @cached_property
    def _down(self) -> dict[str, frozenset[str]]:
        down: dict[str, set[str]] = {p: set() for p in self.points}
        for x, y in self.leq:
            down[y].add(x)
        return {p: frozenset(s) for p, s in down.items()}

    def le(self, x: str, y: str) -> bool:
        return (x, y) in self.leq

    def sorted(self, pts: Iterable[str]) -> list[str]:
        return sorted(pts, key=self.order.__getitem__)

    def __contains__(self, p: object) -> bool:
        return p in self.order

    def __len__(self) -> int:
        return len(self.points)

    def is_open(self, members: Iterable[str]) -> bool:
        members = frozenset(members)
        return all(self._down[p] <= members for p in members)

    def open(self, members: Iterable[str]) -> frozenset[str]:
        """Validate and return ``members`` as an open set."""
        members = frozenset(members)
        unknown = members - set(self.points)
        if unknown:
            raise SpaceError(f"unknown point(s): {' '.join(sorted(unknown))}")
        if not self.is_open(members):
            raise SpaceError(f"{{{' '.join(self.sorted(members))}}} is not down-closed")
        return members

    @cached_property
    def whole(self) -> frozenset[str]:
        return frozenset(self.points)

    def subspace(self, members: Iterable[str], name: str = "") -> "FiniteSpace":
        members = frozenset(members)
        pts = tuple(p for p in self.points if p in members)
        return FiniteSpace(pts, frozenset((x, y) for x, y in self.leq
                                          if x in members and y in members), name)


def min_open(space: FiniteSpace, point: str) -> frozenset[str]:
    if point not in space:
        raise SpaceError(f"unknown point {point!r}")
    return space._down[point]


def components(space: FiniteSpace, members: Iterable[str]) -> list[frozenset[str]]:
    """Order-connectivity classes of ``members``, ordered by least member."""
    members = frozenset(members)
    g = nx.Graph()
    g.add_nodes_from(members)
    g.add_edges_from((x, y) for x, y in space.leq if x != y and x in members and y in members)
    parts = [frozenset(c) for c in nx.connected_components(g)]
    return sorted(parts, key=lambda c: min(space.order[p] for p in c))


def is_connected(space: FiniteSpace, members: Iterable[str]) -> bool:
    return len(components(space, members)) == 1


@dataclass(frozen=True)
class Cover:
    space: FiniteSpace
    index: tuple[str, ...]
    opens: tuple[frozenset[str], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if len(self.index) != len(self.opens):
            raise SpaceError("cover index and opens differ in length")
        if len(set(self.index)) != len(self.index):
            raise SpaceError("duplicate cover index")
        for i, u in zip(self.index, self.opens):
            if not u:
                raise SpaceError(f"cover member {i!r} is empty")
            self.space.open(u)
        covered = frozenset().union(*self.opens) if self.opens else frozenset()
        if covered != self.space.whole:
            missing = self.space.sorted(self.space.whole - covered)
            raise SpaceError(f"cover misses point(s): {' '.join(missing)}")

    @classmethod
    def from_mapping(cls, space: FiniteSpace, opens: Mapping[str, Iterable[str]],
                     name: str = "") -> "Cover":
        return cls(space, tuple(opens), tuple(frozenset(v) for v in opens.values()), name)

    def __getitem__(self, i: str) -> frozenset[str]:
        return self.opens[self.position[i]]

    @cached_property
    def position(self) -> dict[str, int]:
        return {i: k for k, i in enumerate(self.index)}

    def items(self):
        return zip(self.index, self.opens)

    def __len__(self) -> int:
        return len(self.index)


@dataclass(frozen=True)
class Refinement:
    """``source`` refines ``target``: ``source[i]`` is contained in ``target[alpha[i]]``."""
    source: Cover
    target: Cover
    alpha: Mapping[str, str]

    def __post_init__(self):
        for i, u in self.source.items():
            j = self.alpha.get(i)
            if j is None or j not in self.target.position:
                raise SpaceError(f"refinement has no valid image for index {i!r}")
            if not u <= self.target[j]:
                raise SpaceError(f"{i!r} is not contained in {j!r}")

    def then(self, other: "Refinement") -> "Refinement":
        """Composite ``self`` followed by ``other``."""
        if other.source != self.target:
            raise SpaceError("refinements are not composable")
        return Refinement(self.source, other.target,
                          {i: other.alpha[j] for i, j in self.alpha.items()})


def identity_refinement(cover: Cover) -> Refinement:
    return Refinement(cover, cover, {i: i for i in cover.index})


def minimal_cover(space: FiniteSpace) -> Cover:
    if not space.points:
        raise SpaceError("empty space has no minimal cover")
    return Cover(space, space.points, tuple(min_open(space, p) for p in space.points),
                 name=f"min({space.name})" if space.name else "min")


def whole_cover(space: FiniteSpace, index: str = "X") -> Cover:
    return Cover(space, (index,), (space.whole,), name="whole")


def common_refinement(space: FiniteSpace, u: Cover, v: Cover) -> tuple[Cover, Refinement, Refinement]:
    idx, opens, to_u, to_v = [], [], {}, {}
    for (i, a), (j, b) in product(u.items(), v.items()):
        w = a & b
        if w:
            k = f"{i},{j}"
            idx.append(k)
            opens.append(w)
            to_u[k], to_v[k] = i, j
    w = Cover(space, tuple(idx), tuple(opens), name=f"{u.name}&{v.name}")
    return w, Refinement(w, u, to_u), Refinement(w, v, to_v)


def split_components(space: FiniteSpace, u: Cover) -> Refinement:
    """Refine ``u`` by the connected components of its members.

    Connected members keep their index; a disconnected member ``i`` becomes
    ``i/p`` for each component, ``p`` being the component's first point."""
    idx, opens, alpha = [], [], {}
    for i, a in u.items():
        parts = components(space, a)
        for c in parts:
            k = i if len(parts) == 1 else f"{i}/{space.sorted(c)[0]}"
            idx.append(k)
            opens.append(c)
            alpha[k] = i
    return Refinement(Cover(space, tuple(idx), tuple(opens), name=f"cc({u.name})"), u, alpha)


def find_refinement(space: FiniteSpace, u: Cover, v: Cover | Mapping[str, Iterable[str]]) -> Refinement | None:
    """``v`` may also be a bare family of opens; it covers whenever ``u`` refines it."""
    family = list(v.items()) if isinstance(v, Cover) else [(j, frozenset(b)) for j, b in v.items()]
    alpha = {}
    for i, a in u.items():
        j = next((j for j, b in family if a <= b), None)
        if j is None:
            return None
        alpha[i] = j
    if not isinstance(v, Cover):
        v = Cover(space, tuple(j for j, _ in family), tuple(b for _, b in family))
    return Refinement(u, v, alpha)


# sieves over the canonical generators (the minimal opens)

@dataclass(frozen=True)
class Sieve:
    space: FiniteSpace
    members: frozenset[str]

    def __post_init__(self):
        for p in self.members:
            for q in min_open(self.space, p):
                if q not in self.members:
                    raise SpaceError(f"sieve not down-closed: U_{q} maps into U_{p}")

    @property
    def generators(self) -> list[str]:
        return self.space.sorted(self.members)


def sieve_of_cover(space: FiniteSpace, u: Cover) -> Sieve:
    return Sieve(space, frozenset(p for p in space.points
                                  if any(min_open(space, p) <= a for a in u.opens)))


def cover_of_sieve(space: FiniteSpace, s: Sieve) -> Cover:
    pts = s.generators
    return Cover(space, tuple(pts), tuple(min_open(space, p) for p in pts), name="R(sieve)")


def is_covering_sieve(space: FiniteSpace, s: Sieve) -> bool:
    covered = frozenset().union(*(min_open(space, p) for p in s.members)) if s.members else frozenset()
    return covered == space.whole


def intersect_sieves(s: Sieve, t: Sieve) -> Sieve:
    if s.space != t.space:
        raise SpaceError("sieves live on different spaces")
    return Sieve(s.space, s.members & t.members)


# etale maps

@dataclass(frozen=True)
class EtaleMap:
    """A map ``total -> base``; ``charts`` records, per total point, the
    (cover index, fiber element) pairs naming it in each local chart."""
    total: FiniteSpace
    base: FiniteSpace
    proj: Mapping[str, str]
    charts: Mapping[str, tuple[tuple[str, Hashable], ...]] = field(default_factory=dict)

    def fiber(self, x: str) -> list[str]:
        return self.total.sorted(p for p, b in self.proj.items() if b == x)


def local_homeomorphism_failures(em: EtaleMap) -> list[str]:
    """Points where ``proj`` fails to be monotone or a local homeomorphism."""
    bad = []
    for x, y in em.total.leq:
        if not em.base.le(em.proj[x], em.proj[y]):
            bad.append(f"proj not monotone on {x}<={y}")
    for p in em.total.points:
        down = min_open(em.total, p)
        image = {em.proj[q] for q in down}
        if len(image) != len(down) or image != min_open(em.base, em.proj[p]):
            bad.append(f"proj is not bijective from U_{p} onto U_{em.proj[p]}")
            continue
        for q, r in product(down, down):
            if em.total.le(q, r) != em.base.le(em.proj[q], em.proj[r]):
                bad.append(f"proj does not reflect order on U_{p}")
                break
    return bad


def is_local_homeomorphism(em: EtaleMap) -> bool:
    return not local_homeomorphism_failures(em)


def glue_etale(space: FiniteSpace, cover: Cover, datum) -> EtaleMap:
    """Glue the constant pieces ``S_i x U_i`` along the datum's transitions."""
    from .descent import DescentError, check_cocycle
    from .nerve import component_nerve

    if datum.nerve != component_nerve(space, cover):
        raise DescentError("datum is not over the component nerve of this cover")
    problems = check_cocycle(datum)
    if problems:
        raise DescentError("refusing to glue: " + "; ".join(map(str, problems)))

    sheets = [(i, s, x) for i, u in cover.items() for s in datum.fibers[i] for x in space.sorted(u)]
    uf = UnionFind(sheets)
    for e in datum.nerve.edges:
        lam = datum.transitions[e.id]
        for x in e.support:
            for s in datum.fibers[e.src]:
                uf.union((e.src, s, x), (e.dst, lam[s], x))

    def key(sheet):
        i, s, x = sheet
        return (space.order[x], cover.position[i], datum.fibers[i].index(s))

    rep = {}
    for block in uf.to_sets():
        r = min(block, key=key)
        for sh in block:
            rep[sh] = r
    name = {r: f"{r[2]}#{r[0]}:{r[1]}" for r in set(rep.values())}
    g = nx.DiGraph()
    g.add_nodes_from(name.values())
    for i, u in cover.items():
        for s in datum.fibers[i]:
            for x in u:
                for y in min_open(space, x):
                    g.add_edge(name[rep[(i, s, y)]], name[rep[(i, s, x)]])
    closure = nx.transitive_closure(g, reflexive=True)
    ordered = sorted(set(rep.values()), key=key)
    total = FiniteSpace(tuple(name[r] for r in ordered), frozenset(closure.edges),
                        f"glued({space.name})")
    proj = {name[r]: r[2] for r in ordered}
    charts: dict[str, list] = {name[r]: [] for r in ordered}
    for sh, r in rep.items():
        charts[name[r]].append((sh[0], sh[1]))
    charts = {p: tuple(sorted(c, key=lambda t: cover.position[t[0]])) for p, c in charts.items()}
    return EtaleMap(total, space, proj, charts)


@dataclass(frozen=True)
class Trivialization:
    ok: bool
    fibers: dict[str, tuple] = field(default_factory=dict)
    theta: dict[str, dict[tuple, str]] = field(default_factory=dict)
    datum: object = None
    failures: tuple[str, ...] = ()


def _sheets_over(em: EtaleMap, piece: frozenset[str]) -> list[frozenset[str]] | str:
    """Split the preimage of a connected ``piece`` into sheets mapping
    isomorphically onto it, or explain why that is impossible."""
    pre = [p for p, b in em.proj.items() if b in piece]
    sheets = components(em.total, pre)
    sizes = {len(em.fiber(x)) for x in piece}
    if len(sizes) > 1:
        return f"fiber cardinality varies over {{{' '.join(em.base.sorted(piece))}}}: {sorted(sizes)}"
    for sh in sheets:
        if sorted(em.proj[p] for p in sh) != sorted(piece):
            return f"{{{' '.join(em.base.sorted(piece))}}} is not evenly covered"
    return sheets


def verify_trivialization(em: EtaleMap, cover: Cover) -> Trivialization:
    """Trivialize ``em`` over each member of ``cover`` and recover a datum."""
    from .descent import DescentDatum
    from .nerve import component_nerve

    if em.base != cover.space:
        raise SpaceError("etale map and cover live over different spaces")
    failures = local_homeomorphism_failures(em)
    if failures:
        return Trivialization(False, failures=tuple(failures))
    fibers, theta = {}, {}
    for i, u in cover.items():
        labelled: dict[Hashable, dict[str, str]] = {}
        for piece in components(cover.space, u):
            sheets = _sheets_over(em, piece)
            if isinstance(sheets, str):
                return Trivialization(False, failures=(f"over {i}: {sheets}",))
            named = _name_sheets(em, i, sheets, labelled)
            for s, sh in named.items():
                labelled.setdefault(s, {}).update({em.proj[p]: p for p in sh})
        sizes = {len(em.fiber(x)) for x in u}
        if len(sizes) > 1 or len(labelled) != sizes.pop():
            return Trivialization(False, failures=(f"over {i}: fiber cardinality not constant",))
        fibers[i] = tuple(sorted(labelled, key=_label_key))
        theta[i] = {(s, x): p for s, sec in labelled.items() for x, p in sec.items()}

    nerve = component_nerve(cover.space, cover)
    transitions = {}
    for e in nerve.edges:
        x = e.support_min
        back = {theta[e.dst][(t, x)]: t for t in fibers[e.dst]}
        lam = {s: back[theta[e.src][(s, x)]] for s in fibers[e.src]}
        for y in e.support:
            back_y = {theta[e.dst][(t, y)]: t for t in fibers[e.dst]}
            if any(back_y[theta[e.src][(s, y)]] != lam[s] for s in fibers[e.src]):
                return Trivialization(False, failures=(f"transition not constant on edge {e.id}",))
        transitions[e.id] = lam
    return Trivialization(True, fibers, theta, DescentDatum(nerve, fibers, transitions))


def _label_key(s):
    return (0, s) if isinstance(s, int) else (1, str(s))


def _name_sheets(em: EtaleMap, i: str, sheets: list[frozenset[str]],
                 taken: dict) -> dict[Hashable, frozenset[str]]:
    """Name sheets by their chart labels for index ``i`` when the map carries
    consistent ones; otherwise match them to already named sheets in order."""
    named = {}
    for sh in sheets:
        labels = {s for p in sh for j, s in em.charts.get(p, ()) if j == i}
        if len(labels) != 1:
            break
        named[labels.pop()] = sh
    else:
        if len(named) == len(sheets):
            return named
    ordered = sorted(sheets, key=lambda sh: min(em.total.order[p] for p in sh))
    names = sorted(taken, key=_label_key) if taken else list(range(len(ordered)))
    return dict(zip(names, ordered))
