"""Corpus loaders and seeded random instances shared by the tests."""
from __future__ import annotations

import random
from itertools import combinations, permutations

from cechdescent import io
from cechdescent.descent import DescentDatum
from cechdescent.groupoid import free_groupoid, functor_from_hom, hom_to_group
from cechdescent.groups import symmetric
from cechdescent.nerve import ComponentNerve, build_nerve, component_nerve
from cechdescent.space import Cover, FiniteSpace, min_open


def load(name: str):
    text = io.read(name)
    kind = io.kind_of(text)
    if kind == "space":
        return io.parse_space(text)
    if kind == "nerve":
        return io.parse_nerve(text)
    if kind == "group":
        return io.parse_group(text)
    if kind == "seq-object":
        return io.parse_seq_object(text)
    raise ValueError(kind)


def pc4() -> FiniteSpace:
    return load("pc4.space")


def cover(name: str, space: FiniteSpace) -> Cover:
    return io.parse_cover(io.read(name), space)


def datum(name: str, nerve: ComponentNerve) -> DescentDatum:
    return io.parse_datum(io.read(name), nerve)


def pc4_cd():
    sp = pc4()
    cv = cover("cd.cover", sp)
    return sp, cv, component_nerve(sp, cv)


def double_cover():
    sp, cv, n = pc4_cd()
    return sp, cv, datum("doublecover.datum", n)


# random finite instances

def random_space(rng: random.Random, max_points: int = 5) -> FiniteSpace:
    n = rng.randint(1, max_points)
    pts = [f"p{k}" for k in range(n)]
    pairs = [(x, y) for x, y in permutations(pts, 2) if rng.random() < 0.25]
    return FiniteSpace.from_relations(pts, pairs, "rand")


def random_cover(rng: random.Random, space: FiniteSpace, max_members: int = 4) -> Cover:
    """Unions of random minimal opens, topped up until the space is covered."""
    opens: list[frozenset] = []
    target = rng.randint(1, max_members)
    while len(opens) < target:
        pts = rng.sample(space.points, rng.randint(1, min(2, len(space.points))))
        opens.append(frozenset().union(*(min_open(space, p) for p in pts)))
    left = space.whole - frozenset().union(*opens)
    for p in space.sorted(left):
        if not any(p in u for u in opens):
            opens.append(min_open(space, p))
    return Cover(space, tuple(f"U{k}" for k in range(len(opens))), tuple(opens), "rand")


def random_datum(rng: random.Random, nerve: ComponentNerve, max_fiber: int = 2) -> DescentDatum:
    """A uniformly random permutation representation of the nerve's groupoid,
    relabelled by a random bijection per object."""
    m = rng.randint(1, max_fiber)
    K = symmetric(m)
    g = free_groupoid(nerve)
    homs = hom_to_group(g, K)
    f = functor_from_hom(g, rng.choice(homs), K)
    arrays = _arrays(K, m)
    gauge = {o: rng.randrange(len(K)) for o in nerve.objects}
    fibers = {o: tuple(range(m)) for o in nerve.objects}
    trans = {}
    for e in nerve.edges:
        k = K.mul(gauge[e.dst], K.mul(f[e.id], K.inv(gauge[e.src])))
        trans[e.id] = {s: arrays[k][s] for s in range(m)}
    return DescentDatum(nerve, fibers, trans, "rand")


def _arrays(K, m: int) -> list[tuple[int, ...]]:
    """Permutation arrays for the elements of ``symmetric(m)``, read off the table."""
    from sympy.combinatorics import Permutation
    out = []
    for name in K.elements:
        cycles = [[int(v) for v in c.split(",")] for c in name.strip("()").split(")(") if c]
        out.append(tuple(Permutation(cycles, size=m).array_form))
    return out


def random_space_instance(rng: random.Random, max_points: int = 4, max_members: int = 3,
                          max_fiber: int = 2):
    sp = random_space(rng, max_points)
    cv = random_cover(rng, sp, max_members)
    n = component_nerve(sp, cv)
    return sp, cv, n, random_datum(rng, n, max_fiber)


def random_nerve(rng: random.Random, max_objects: int = 4, max_edges: int = 6,
                 max_triangles: int = 2, min_objects: int = 1, seed_triangle: float = 0.0) -> ComponentNerve:
    """Random multigraph nerve; with probability ``seed_triangle`` the first
    three edges span a triple so that a triangle can be placed on it."""
    k = rng.randint(min_objects, max_objects)
    objs = [str(i) for i in range(k)]
    pairs = list(combinations(objs, 2))
    edges = []
    if k >= 3 and max_edges >= 3 and rng.random() < seed_triangle:
        i, j, l = sorted(rng.sample(objs, 3), key=int)
        edges = [("e0", i, j), ("e1", j, l), ("e2", i, l)]
    if pairs:
        for n in range(len(edges), rng.randint(len(edges), max_edges)):
            i, j = rng.choice(pairs)
            edges.append((f"e{n}", i, j))
    by_pair: dict[tuple[str, str], list[str]] = {}
    for eid, i, j in edges:
        by_pair.setdefault((i, j), []).append(eid)
    triples = [t for t in combinations(objs, 3)
               if all(p in by_pair for p in ((t[0], t[1]), (t[1], t[2]), (t[0], t[2])))]
    tris = []
    lo = 1 if seed_triangle and triples else 0
    for n in range(rng.randint(lo, max_triangles) if triples else 0):
        i, j, l = rng.choice(triples)
        faces = (rng.choice(by_pair[(i, j)]), rng.choice(by_pair[(j, l)]), rng.choice(by_pair[(i, l)]))
        tris.append((f"t{n}", (i, j, l), faces))
    return build_nerve(objs, edges, tris, "rand")
