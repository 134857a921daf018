"""The free groupoid on a component nerve and its vertex-group presentations.

A word is a tuple of steps ``(generator, +1 | -1)`` read in path order.
Words evaluate by composition, so the last step acts last:
``eval(s1 s2 ... sn) = g_n^e_n * ... * g_1^e_1``.  This matches the way
descent transitions and cocycles compose.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

from .groups import GroupTable
from .nerve import ComponentNerve, Edge, NerveMorphism, validate

Step = tuple[str, int]
Word = tuple[Step, ...]

DEFAULT_HOM_LIMIT = 10**6


class PresentationError(ValueError):
    pass


def inverse(word: Sequence[Step]) -> Word:
    return tuple((g, -e) for g, e in reversed(word))


def free_reduce(word: Sequence[Step]) -> Word:
    out: list[Step] = []
    for g, e in word:
        if out and out[-1] == (g, -e):
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def evaluate(word: Sequence[Step], images: Mapping[str, int], K: GroupTable) -> int:
    acc = K.identity
    for g, e in word:
        x = images[g]
        acc = K.mul(x if e > 0 else K.inv(x), acc)
    return acc


def format_word(word: Sequence[Step]) -> str:
    if not word:
        return "1"
    return "*".join(g if e > 0 else g + "^-1" for g, e in word)


@dataclass(frozen=True)
class Relation:
    """``rhs = lhs[1] o lhs[0]``: going i->j->k equals going i->k."""
    triangle: str
    lhs: tuple[str, str]
    rhs: str

    @property
    def word(self) -> Word:
        return ((self.lhs[0], 1), (self.lhs[1], 1), (self.rhs, -1))


@dataclass(frozen=True)
class GroupoidPresentation:
    nerve: ComponentNerve
    objects: tuple[str, ...]
    generators: tuple[Edge, ...]
    relations: tuple[Relation, ...]


@dataclass(frozen=True)
class PathWord:
    start: str
    steps: Word = ()

    def end(self, nerve: ComponentNerve) -> str:
        here = self.start
        for eid, d in self.steps:
            e = nerve.edge.get(eid)
            if e is None:
                raise PresentationError(f"unknown edge {eid!r}")
            frm, to = (e.src, e.dst) if d > 0 else (e.dst, e.src)
            if frm != here:
                raise PresentationError(f"step {eid} does not start at {here}")
            here = to
        return here


@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...]
    base: str
    component: tuple[str, ...] = ()
    tree: tuple[str, ...] = ()
    # (generator, word) in elimination order; recover values in reverse order
    eliminated: tuple[tuple[str, Word], ...] = ()
    parent: Mapping[str, tuple[str, int]] = field(default_factory=dict, compare=False)


def free_groupoid(n: ComponentNerve) -> GroupoidPresentation:
    problems = validate(n)
    if problems:
        raise PresentationError("invalid nerve: " + "; ".join(problems))
    rels = tuple(Relation(t.id, (t.faces[0], t.faces[1]), t.faces[2]) for t in n.triangles)
    return GroupoidPresentation(n, n.objects, n.edges, rels)


def _spanning_tree(g: GroupoidPresentation, base: str):
    n = g.nerve
    incident: dict[str, list[tuple[int, int, Edge, str, int]]] = {o: [] for o in n.objects}
    for k, e in enumerate(g.generators):
        incident[e.src].append((n.position[e.dst], k, e, e.dst, 1))
        incident[e.dst].append((n.position[e.src], k, e, e.src, -1))
    parent: dict[str, tuple[str, int]] = {}
    seen, queue = {base}, deque([base])
    while queue:
        v = queue.popleft()
        for _, _, e, w, d in sorted(incident[v], key=lambda t: t[:2]):
            if w not in seen:
                seen.add(w)
                parent[w] = (e.id, d)  # step from v to w
                queue.append(w)
    comp = tuple(o for o in n.objects if o in seen)
    return comp, parent


def _substitute(word: Word, g: str, repl: Word) -> Word:
    out: list[Step] = []
    for h, e in word:
        if h == g:
            out.extend(repl if e > 0 else inverse(repl))
        else:
            out.append((h, e))
    return free_reduce(out)


def _solve_for(relator: Word) -> tuple[str, Word] | None:
    for pos, (g, e) in enumerate(relator):
        if sum(1 for h, _ in relator if h == g) == 1:
            u, v = relator[:pos], relator[pos + 1:]
            w = inverse(u) + inverse(v)
            return g, free_reduce(w if e > 0 else inverse(w))
    return None


def tietze(gens: Sequence[str], relators: Sequence[Word]):
    """Remove generators occurring exactly once in some relator, to a fixed point."""
    gens, rels, gone = list(gens), [r for r in relators if r], []
    while True:
        for k, r in enumerate(rels):
            hit = _solve_for(r)
            if hit:
                break
        else:
            return tuple(gens), tuple(rels), tuple(gone)
        g, w = hit
        gone.append((g, w))
        gens.remove(g)
        rels = [s for s in (_substitute(s, g, w) for i, s in enumerate(rels) if i != k) if s]


def pi1(g: GroupoidPresentation, base: str) -> GroupPresentation:
    if base not in g.nerve.position:
        raise PresentationError(f"unknown base object {base!r}")
    comp, parent = _spanning_tree(g, base)
    members = set(comp)
    tree = {eid for eid, _ in parent.values()}
    gens = [e.id for e in g.generators if e.src in members and e.id not in tree]
    rels = []
    for r in g.relations:
        if g.nerve.edge[r.rhs].src in members:
            w = free_reduce(tuple(s for s in r.word if s[0] not in tree))
            if w:
                rels.append(w)
    gens, rels, gone = tietze(gens, rels)
    return GroupPresentation(gens, rels, base, comp, tuple(sorted(tree, key=[e.id for e in g.generators].index)),
                             gone, dict(parent))


def component_presentations(g: GroupoidPresentation) -> list[GroupPresentation]:
    return [pi1(g, block[0]) for block in g.nerve.connected_components()]


@dataclass(frozen=True)
class Homomorphism:
    """Images of generators; conjugation acts separately on each block."""
    generators: tuple[str, ...]
    images: tuple[int, ...]
    blocks: tuple[int, ...]

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.generators, self.images))


def _homs_one(p: GroupPresentation, K: GroupTable, limit: int | None) -> list[tuple[int, ...]]:
    if limit is not None and len(K) ** len(p.generators) > limit:
        raise PresentationError(f"{len(K)}^{len(p.generators)} assignments exceed the limit {limit}")
    out = []
    for imgs in product(range(len(K)), repeat=len(p.generators)):
        images = dict(zip(p.generators, imgs))
        if all(evaluate(r, images, K) == K.identity for r in p.relators):
            out.append(imgs)
    return out


def hom_to_group(g: GroupoidPresentation | GroupPresentation, K: GroupTable,
                 limit: int | None = DEFAULT_HOM_LIMIT) -> list[Homomorphism]:
    """All homomorphisms into ``K`` in lexicographic element order.

    A groupoid is reduced to one vertex group per connected component; the
    result then lists tuples of component homomorphisms."""
    parts = [g] if isinstance(g, GroupPresentation) else component_presentations(g)
    gens = tuple(x for p in parts for x in p.generators)
    blocks = tuple(k for k, p in enumerate(parts) for _ in p.generators)
    per = [_homs_one(p, K, limit) for p in parts]
    return [Homomorphism(gens, tuple(x for t in combo for x in t), blocks) for combo in product(*per)]


def conj_classes(homs: Sequence[Homomorphism], K: GroupTable) -> list[list[Homomorphism]]:
    """Orbits under conjugation by one element of ``K`` per block."""
    classes: dict[tuple, list[Homomorphism]] = {}
    for h in homs:
        key = []
        for b in sorted(set(h.blocks)):
            imgs = [x for x, bb in zip(h.images, h.blocks) if bb == b]
            key.append(min(tuple(K.conj(c, x) for x in imgs) for c in range(len(K))))
        classes.setdefault(tuple(key), []).append(h)
    return list(classes.values())


def count_classes(g: GroupoidPresentation | GroupPresentation, K: GroupTable,
                  limit: int | None = DEFAULT_HOM_LIMIT) -> int:
    return len(conj_classes(hom_to_group(g, K, limit), K))


# functors from the free groupoid and the vertex-group gauge

def functor_from_hom(g: GroupoidPresentation, hom: Homomorphism, K: GroupTable) -> dict[str, int]:
    """Extend a homomorphism to every edge, with tree edges sent to the identity."""
    values = dict(hom.as_dict())
    for p in component_presentations(g):
        for t in p.tree:
            values[t] = K.identity
        for x, w in reversed(p.eliminated):
            values[x] = evaluate(w, values, K)
    return {e.id: values[e.id] for e in g.generators}


def hom_from_functor(g: GroupoidPresentation, functor: Mapping[str, int], K: GroupTable) -> Homomorphism:
    """Gauge a functor to the spanning trees and read off generator images."""
    parts = component_presentations(g)
    gens, images, blocks = [], [], []
    for k, p in enumerate(parts):
        gauge = {p.base: K.identity}
        order = [p.base]
        for v in order:
            for w, (eid, d) in p.parent.items():
                e = g.nerve.edge[eid]
                frm = e.src if d > 0 else e.dst
                if frm == v and w not in gauge:
                    step = functor[eid] if d > 0 else K.inv(functor[eid])
                    gauge[w] = K.mul(step, gauge[v])
                    order.append(w)
        for x in p.generators:
            e = g.nerve.edge[x]
            gens.append(x)
            images.append(K.mul(K.inv(gauge[e.dst]), K.mul(functor[x], gauge[e.src])))
            blocks.append(k)
    return Homomorphism(tuple(gens), tuple(images), tuple(blocks))


def is_functor(g: GroupoidPresentation, functor: Mapping[str, int], K: GroupTable) -> bool:
    return all(evaluate(r.word, functor, K) == K.identity for r in g.relations)


@dataclass(frozen=True)
class PresentationMorphism:
    source: GroupoidPresentation
    target: GroupoidPresentation
    objects: Mapping[str, str]
    generators: Mapping[str, Word]

    def then(self, other: "PresentationMorphism") -> "PresentationMorphism":
        gens = {x: free_reduce(tuple(s for g, e in w for s in
                                     (other.generators[g] if e > 0 else inverse(other.generators[g]))))
                for x, w in self.generators.items()}
        return PresentationMorphism(self.source, other.target,
                                    {o: other.objects[a] for o, a in self.objects.items()}, gens)


def groupoid_morphism(nm: NerveMorphism) -> PresentationMorphism:
    gens = {eid: () if img is None else ((img[0], img[1]),) for eid, img in nm.edges.items()}
    return PresentationMorphism(free_groupoid(nm.source), free_groupoid(nm.target), dict(nm.objects), gens)


def precompose_functor(pm: PresentationMorphism, functor: Mapping[str, int], K: GroupTable) -> dict[str, int]:
    return {x: evaluate(w, functor, K) for x, w in pm.generators.items()}


def precompose(pm: PresentationMorphism, hom: Homomorphism, K: GroupTable) -> Homomorphism:
    """Pull a homomorphism on the target groupoid back to the source."""
    f = functor_from_hom(pm.target, hom, K)
    return hom_from_functor(pm.source, precompose_functor(pm, f, K), K)


def evaluate_path(datum, path: PathWord) -> dict:
    """The bijection ``S_start -> S_end`` obtained by composing transitions."""
    nerve = datum.nerve
    path.end(nerve)
    current = {s: s for s in datum.fibers[path.start]}
    for eid, d in path.steps:
        lam = datum.transitions[eid]
        if d < 0:
            lam = {t: s for s, t in lam.items()}
        current = {s: lam[t] for s, t in current.items()}
    return current
