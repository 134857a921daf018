"""Plain and component-enriched Cech nerves, and the maps refinements induce.

Objects are ordered by declaration; every edge is stored once, oriented
from the earlier object to the later one.  Degenerate simplices are not
stored.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Mapping

from .space import Cover, FiniteSpace, Refinement, components


@dataclass(frozen=True)
class PlainNerve:
    objects: tuple[str, ...]
    pairs: tuple[tuple[str, str], ...]
    triples: tuple[tuple[str, str, str], ...]


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str
    support: tuple[str, ...] = ()  # the component of U_src & U_dst, when space-backed

    @property
    def support_min(self) -> str:
        return self.support[0]


@dataclass(frozen=True)
class Triangle:
    id: str
    objects: tuple[str, str, str]
    faces: tuple[str, str, str]  # edges on (i,j), (j,k), (i,k)
    support: tuple[str, ...] = ()


@dataclass(frozen=True)
class ComponentNerve:
    objects: tuple[str, ...]
    edges: tuple[Edge, ...]
    triangles: tuple[Triangle, ...] = ()
    name: str = field(default="", compare=False)

    @cached_property
    def position(self) -> dict[str, int]:
        return {o: k for k, o in enumerate(self.objects)}

    @cached_property
    def edge(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def triangle(self) -> dict[str, Triangle]:
        return {t.id: t for t in self.triangles}

    def edges_between(self, i: str, j: str) -> list[Edge]:
        a, b = sorted((i, j), key=self.position.__getitem__)
        return [e for e in self.edges if e.src == a and e.dst == b]

    def is_plain(self) -> bool:
        pairs = [(e.src, e.dst) for e in self.edges]
        triples = [t.objects for t in self.triangles]
        return len(set(pairs)) == len(pairs) and len(set(triples)) == len(triples)

    def connected_components(self) -> list[list[str]]:
        from networkx.utils import UnionFind
        uf = UnionFind(self.objects)
        for e in self.edges:
            uf.union(e.src, e.dst)
        blocks = [sorted(b, key=self.position.__getitem__) for b in uf.to_sets()]
        return sorted(blocks, key=lambda b: self.position[b[0]])


def build_nerve(objects, edges, triangles=(), name="") -> ComponentNerve:
    """Assemble a nerve from loose data, orienting edges and sorting
    triangle faces by their endpoints.

    ``edges`` holds ``(id, i, j)``; ``triangles`` holds ``(id, (i, j, k), face_ids)``
    with the faces in any order.  Faces that cannot be matched are kept
    as given so that :func:`validate` can report them.
    """
    objects = tuple(objects)
    pos = {o: k for k, o in enumerate(objects)}
    es = []
    for eid, i, j in edges:
        if i in pos and j in pos and pos[i] > pos[j]:
            i, j = j, i
        es.append(Edge(eid, i, j))
    by_id = {e.id: e for e in es}
    ts = []
    for tid, objs, faces in triangles:
        objs = tuple(sorted(objs, key=lambda o: pos.get(o, len(pos))))
        if len(objs) == 3:
            i, j, k = objs
            want = [{i, j}, {j, k}, {i, k}]
            slots = [None, None, None]
            for f in faces:
                e = by_id.get(f)
                if e is None:
                    continue
                for n, pair in enumerate(want):
                    if {e.src, e.dst} == pair and slots[n] is None:
                        slots[n] = f
                        break
            if None not in slots:
                faces = tuple(slots)
        ts.append(Triangle(tid, objs, tuple(faces)))
    return ComponentNerve(objects, tuple(es), tuple(ts), name)


def plain_nerve(space: FiniteSpace, cover: Cover) -> PlainNerve:
    pairs = tuple((i, j) for (i, a), (j, b) in combinations(cover.items(), 2) if a & b)
    triples = tuple((i, j, k) for (i, a), (j, b), (k, c) in combinations(cover.items(), 3)
                    if a & b & c)
    return PlainNerve(cover.index, pairs, triples)


def _ident(objs, piece, space):
    return "-".join(objs) + "/" + space.sorted(piece)[0]


def component_nerve(space: FiniteSpace, cover: Cover) -> ComponentNerve:
    edges, by_pair = [], {}
    for (i, a), (j, b) in combinations(cover.items(), 2):
        for piece in components(space, a & b):
            e = Edge(_ident((i, j), piece, space), i, j, tuple(space.sorted(piece)))
            edges.append(e)
            by_pair.setdefault((i, j), []).append(e)
    triangles = []
    for (i, a), (j, b), (k, c) in combinations(cover.items(), 3):
        for piece in components(space, a & b & c):
            x = next(iter(piece))
            faces = tuple(next(e.id for e in by_pair[p] if x in e.support)
                          for p in ((i, j), (j, k), (i, k)))
            triangles.append(Triangle(_ident((i, j, k), piece, space), (i, j, k), faces,
                                      tuple(space.sorted(piece))))
    return ComponentNerve(cover.index, tuple(edges), tuple(triangles),
                          name=cover.name)


def forget(n: ComponentNerve) -> PlainNerve:
    pairs = sorted({(e.src, e.dst) for e in n.edges},
                   key=lambda p: (n.position[p[0]], n.position[p[1]]))
    triples = sorted({t.objects for t in n.triangles},
                     key=lambda t: tuple(n.position[o] for o in t))
    return PlainNerve(n.objects, tuple(pairs), tuple(triples))


def validate(n: ComponentNerve) -> list[str]:
    """Diagnostics for a nerve; empty iff it is well formed."""
    out = []
    objs = set(n.objects)
    if len(objs) != len(n.objects):
        out.append("duplicate object")
    ids = [e.id for e in n.edges] + [t.id for t in n.triangles]
    if len(set(ids)) != len(ids):
        out.append("duplicate simplex identifier")
    for e in n.edges:
        if e.src not in objs or e.dst not in objs:
            out.append(f"edge {e.id}: unknown endpoint")
        elif e.src == e.dst:
            out.append(f"edge {e.id}: endpoints coincide")
    for t in n.triangles:
        if len(set(t.objects)) != 3 or not set(t.objects) <= objs:
            out.append(f"triangle {t.id}: needs three distinct known objects")
            continue
        if len(t.faces) != 3:
            out.append(f"triangle {t.id}: needs exactly three faces")
            continue
        i, j, k = t.objects
        for f, pair in zip(t.faces, ((i, j), (j, k), (i, k))):
            e = n.edge.get(f)
            if e is None or {e.src, e.dst} != set(pair):
                if not n.edges_between(*pair):
                    out.append(f"triangle {t.id}: missing face at {{{pair[0]},{pair[1]}}}")
                else:
                    out.append(f"triangle {t.id}: face {f} does not lie on {{{pair[0]},{pair[1]}}}")
    return out


@dataclass(frozen=True)
class NerveMorphism:
    """Edge images are ``(target edge, sign)``; ``None`` marks the identity
    edge at an object (both endpoints collapsed).  Collapsed triangles map
    to ``None``."""
    source: ComponentNerve
    target: ComponentNerve
    objects: Mapping[str, str]
    edges: Mapping[str, tuple[str, int] | None]
    triangles: Mapping[str, str | None]

    def then(self, other: "NerveMorphism") -> "NerveMorphism":
        if other.source != self.target:
            raise ValueError("nerve morphisms are not composable")
        edges = {}
        for eid, img in self.edges.items():
            if img is None or other.edges[img[0]] is None:
                edges[eid] = None
            else:
                f, s = other.edges[img[0]]
                edges[eid] = (f, s * img[1])
        triangles = {t: None if img is None else other.triangles[img]
                     for t, img in self.triangles.items()}
        return NerveMorphism(self.source, other.target,
                             {o: other.objects[a] for o, a in self.objects.items()},
                             edges, triangles)


def identity_morphism(n: ComponentNerve) -> NerveMorphism:
    return NerveMorphism(n, n, {o: o for o in n.objects}, {e.id: (e.id, 1) for e in n.edges},
                         {t.id: t.id for t in n.triangles})


def _orient(target: ComponentNerve, a: str, b: str) -> int:
    return 1 if target.position[a] < target.position[b] else -1


def nerve_map(space: FiniteSpace, ref: Refinement) -> NerveMorphism:
    src = component_nerve(space, ref.source)
    tgt = component_nerve(space, ref.target)
    alpha = dict(ref.alpha)
    edges = {}
    for e in src.edges:
        a, b = alpha[e.src], alpha[e.dst]
        if a == b:
            edges[e.id] = None
            continue
        x = e.support[0]
        f = next(f for f in tgt.edges_between(a, b) if x in f.support)
        edges[e.id] = (f.id, _orient(tgt, a, b))
    triangles = {}
    for t in src.triangles:
        img = {alpha[o] for o in t.objects}
        if len(img) < 3:
            triangles[t.id] = None
            continue
        x = t.support[0]
        triangles[t.id] = next(u.id for u in tgt.triangles
                               if set(u.objects) == img and x in u.support)
    return NerveMorphism(src, tgt, alpha, edges, triangles)


def morphism_diagnostics(nm: NerveMorphism) -> list[str]:
    """Check that edge and triangle maps commute with boundaries."""
    out = []
    src, tgt = nm.source, nm.target
    for e in src.edges:
        a, b = nm.objects[e.src], nm.objects[e.dst]
        img = nm.edges[e.id]
        if a == b:
            if img is not None:
                out.append(f"edge {e.id}: collapsed edge must map to an identity")
            continue
        if img is None:
            out.append(f"edge {e.id}: maps to identity between distinct objects")
            continue
        f = tgt.edge[img[0]]
        if (f.src, f.dst) != ((a, b) if img[1] == 1 else (b, a)):
            out.append(f"edge {e.id}: image {f.id} has wrong endpoints")
    for t in src.triangles:
        img = nm.triangles[t.id]
        face_imgs = [nm.edges[f] for f in t.faces]
        if img is None:
            live = {x[0] for x in face_imgs if x is not None}
            if len({nm.objects[o] for o in t.objects}) == 3 or len(live) > 1:
                out.append(f"triangle {t.id}: degenerate image inconsistent")
            continue
        u = tgt.triangle[img]
        i, j, k = (nm.objects[o] for o in t.objects)
        want = {}
        for f, pair in zip(u.faces, ((u.objects[0], u.objects[1]), (u.objects[1], u.objects[2]),
                                     (u.objects[0], u.objects[2]))):
            want[frozenset(pair)] = f
        for fimg, (p, q) in zip(face_imgs, ((i, j), (j, k), (i, k))):
            f = want[frozenset((p, q))]
            if fimg != (f, _orient(tgt, p, q)):
                out.append(f"triangle {t.id}: boundary does not commute at {{{p},{q}}}")
    return out
