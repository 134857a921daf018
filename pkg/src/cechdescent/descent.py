"""Descent data over a component nerve and the category they form.

A datum assigns a finite fiber to every object and a bijection to every
edge, oriented from the earlier object to the later one.  The identity and
inverse laws are built in; the triangle law is checked by
:func:`check_cocycle`.  Morphisms are families of maps commuting with the
transitions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Iterable, Mapping, Sequence

from networkx.utils import UnionFind

from .groupoid import count_classes, free_groupoid
from .groups import GroupTable
from .nerve import ComponentNerve, NerveMorphism, component_nerve, nerve_map
from .space import (
    Cover, FiniteSpace, Refinement, common_refinement, find_refinement, min_open, split_components,
)

DEFAULT_HOM_LIMIT = 12
DEFAULT_CERTIFICATE_LIMIT = 12


class DescentError(ValueError):
    pass


class SizeLimitExceeded(DescentError):
    pass


Element = tuple[str, Hashable]  # (object, fiber element)


@dataclass(frozen=True)
class DescentDatum:
    nerve: ComponentNerve
    fibers: Mapping[str, tuple]
    transitions: Mapping[str, Mapping[Hashable, Hashable]]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        missing = [o for o in self.nerve.objects if o not in self.fibers]
        if missing:
            raise DescentError(f"no fiber for object(s) {' '.join(missing)}")
        for o, f in self.fibers.items():
            if len(set(f)) != len(f):
                raise DescentError(f"fiber {o} repeats an element")
        for e in self.nerve.edges:
            if e.id not in self.transitions:
                raise DescentError(f"no transition for edge {e.id}")
            lam = self.transitions[e.id]
            if set(lam) != set(self.fibers[e.src]) or len(lam) != len(self.fibers[e.dst]) \
                    or set(lam.values()) != set(self.fibers[e.dst]):
                raise DescentError(f"transition at {e.id} is not a bijection "
                                   f"S_{e.src} -> S_{e.dst}")

    @property
    def is_empty(self) -> bool:
        return any(not f for f in self.fibers.values())

    def elements(self) -> list[Element]:
        return [(o, s) for o in self.nerve.objects for s in self.fibers[o]]

    def size(self) -> int:
        return sum(len(f) for f in self.fibers.values())

    def key(self, el: Element) -> tuple[int, int]:
        o, s = el
        return self.nerve.position[o], self.fibers[o].index(s)


@dataclass(frozen=True)
class Violation:
    where: str
    message: str

    def __str__(self) -> str:
        return f"{self.where}: {self.message}"


def constant(nerve: ComponentNerve, values: Sequence[Hashable], name: str = "") -> DescentDatum:
    values = tuple(values)
    return DescentDatum(nerve, {o: values for o in nerve.objects},
                        {e.id: {s: s for s in values} for e in nerve.edges}, name)


def check_cocycle(x: DescentDatum) -> list[Violation]:
    out = []
    for t in x.nerve.triangles:
        eij, ejk, eik = (x.transitions[f] for f in t.faces)
        for s in x.fibers[t.objects[0]]:
            if ejk[eij[s]] != eik[s]:
                out.append(Violation(f"triangle {t.id}",
                                     f"element {s}: {t.faces[1]}o{t.faces[0]} gives {ejk[eij[s]]}, "
                                     f"{t.faces[2]} gives {eik[s]}"))
                break
    return out


# morphisms

@dataclass(frozen=True)
class DatumMorphism:
    source: DescentDatum
    target: DescentDatum
    maps: Mapping[str, Mapping[Hashable, Hashable]]

    def __call__(self, el: Element) -> Element:
        return el[0], self.maps[el[0]][el[1]]

    def is_injective(self) -> bool:
        return all(len(set(m.values())) == len(m) for m in self.maps.values())

    def is_surjective(self) -> bool:
        return all(set(self.maps[o].values()) == set(self.target.fibers[o]) for o in self.maps)

    def is_iso(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def then(self, other: "DatumMorphism") -> "DatumMorphism":
        return DatumMorphism(self.source, other.target,
                             {o: {s: other.maps[o][t] for s, t in m.items()} for o, m in self.maps.items()})


def identity(x: DescentDatum) -> DatumMorphism:
    return DatumMorphism(x, x, {o: {s: s for s in f} for o, f in x.fibers.items()})


def is_morphism(x: DescentDatum, y: DescentDatum, maps: Mapping[str, Mapping]) -> bool:
    if x.nerve != y.nerve:
        return False
    for o in x.nerve.objects:
        m = maps.get(o)
        if m is None or set(m) != set(x.fibers[o]) or not set(m.values()) <= set(y.fibers[o]):
            return False
    for e in x.nerve.edges:
        lam, mu = x.transitions[e.id], y.transitions[e.id]
        src, dst = maps[e.src], maps[e.dst]
        if any(dst[lam[s]] != mu[src[s]] for s in x.fibers[e.src]):
            return False
    return True


def _neighbours(x: DescentDatum) -> dict[Element, list[tuple[Element, str, int]]]:
    nb: dict[Element, list] = {el: [] for el in x.elements()}
    for e in x.nerve.edges:
        for s, t in x.transitions[e.id].items():
            nb[(e.src, s)].append(((e.dst, t), e.id, 1))
            nb[(e.dst, t)].append(((e.src, s), e.id, -1))
    return nb


def homs(x: DescentDatum, y: DescentDatum, limit: int | None = DEFAULT_HOM_LIMIT) -> list[DatumMorphism]:
    """Every morphism ``x -> y``, in canonical order.

    A morphism is fixed by its value on one element of each orbit, so the
    search assigns orbit representatives and propagates along transitions."""
    if x.nerve != y.nerve:
        raise DescentError("data live over different nerves")
    if limit is not None and x.size() > limit:
        raise SizeLimitExceeded(f"source has {x.size()} fiber elements; limit is {limit}")
    nb = _neighbours(x)
    inv = {e.id: {t: s for s, t in y.transitions[e.id].items()} for e in y.nerve.edges}
    reps = [block[0] for block in orbits(x).blocks]
    found = []

    def spread(start: Element, image, assign: dict) -> dict | None:
        new = {start: image}
        stack = [start]
        while stack:
            el = stack.pop()
            img = new[el]
            for other, eid, d in nb[el]:
                want = y.transitions[eid][img] if d > 0 else inv[eid][img]
                seen = new.get(other, assign.get(other))
                if seen is None:
                    new[other] = want
                    stack.append(other)
                elif seen != want:
                    return None
        return new

    def search(k: int, assign: dict):
        if k == len(reps):
            found.append(dict(assign))
            return
        o, s = reps[k]
        for t in y.fibers[o]:
            new = spread((o, s), t, assign)
            if new is not None:
                assign.update(new)
                search(k + 1, assign)
                for el in new:
                    del assign[el]

    search(0, {})
    out = []
    for a in found:
        maps = {o: {s: a[(o, s)] for s in x.fibers[o]} for o in x.nerve.objects}
        out.append(DatumMorphism(x, y, maps))

    def order(m: DatumMorphism):
        return tuple(y.fibers[o].index(m.maps[o][s]) for o in x.nerve.objects for s in x.fibers[o])

    return sorted(out, key=order)


def isomorphisms(x: DescentDatum, y: DescentDatum, limit: int | None = None) -> list[DatumMorphism]:
    if x.size() != y.size():
        return []
    return [m for m in homs(x, y, limit) if m.is_iso()]


def are_isomorphic(x: DescentDatum, y: DescentDatum) -> bool:
    if x.nerve != y.nerve or any(len(x.fibers[o]) != len(y.fibers[o]) for o in x.nerve.objects):
        return False
    return bool(isomorphisms(x, y))


# limits and colimits, computed fiberwise

def product_(x: DescentDatum, y: DescentDatum) -> DescentDatum:
    if x.nerve != y.nerve:
        raise DescentError("data live over different nerves")
    fibers = {o: tuple(product(x.fibers[o], y.fibers[o])) for o in x.nerve.objects}
    trans = {e.id: {(s, t): (x.transitions[e.id][s], y.transitions[e.id][t])
                    for s, t in fibers[e.src]} for e in x.nerve.edges}
    return DescentDatum(x.nerve, fibers, trans)


def coproduct(*data: DescentDatum) -> DescentDatum:
    if not data:
        raise DescentError("coproduct of nothing needs a nerve")
    nerve = data[0].nerve
    if any(d.nerve != nerve for d in data):
        raise DescentError("data live over different nerves")
    fibers = {o: tuple((k, s) for k, d in enumerate(data) for s in d.fibers[o]) for o in nerve.objects}
    trans = {e.id: {(k, s): (k, d.transitions[e.id][s]) for k, d in enumerate(data)
                    for s in d.fibers[e.src]} for e in nerve.edges}
    return DescentDatum(nerve, fibers, trans)


def sum_(x: DescentDatum, y: DescentDatum) -> DescentDatum:
    return coproduct(x, y)


def restrict(x: DescentDatum, keep: Iterable[Element]) -> DescentDatum:
    """The sub-datum on ``keep``, which must be closed under transitions."""
    keep = set(keep)
    fibers = {o: tuple(s for s in x.fibers[o] if (o, s) in keep) for o in x.nerve.objects}
    trans = {}
    for e in x.nerve.edges:
        lam = x.transitions[e.id]
        if any((e.dst, lam[s]) not in keep for s in fibers[e.src]):
            raise DescentError("subset is not closed under the transitions")
        trans[e.id] = {s: lam[s] for s in fibers[e.src]}
    return DescentDatum(x.nerve, fibers, trans)


def equalizer(f: DatumMorphism, g: DatumMorphism) -> DescentDatum:
    if f.source != g.source or f.target != g.target:
        raise DescentError("equalizer needs parallel morphisms")
    x = f.source
    return restrict(x, [(o, s) for o, s in x.elements() if f.maps[o][s] == g.maps[o][s]])


def image(f: DatumMorphism) -> DescentDatum:
    return restrict(f.target, {(o, t) for o, m in f.maps.items() for t in m.values()})


def pullback(nm: NerveMorphism, y: DescentDatum) -> DescentDatum:
    if nm.target != y.nerve:
        raise DescentError("datum is not over the morphism's target")
    fibers = {o: y.fibers[a] for o, a in nm.objects.items()}
    trans = {}
    for e in nm.source.edges:
        img = nm.edges[e.id]
        if img is None:
            trans[e.id] = {s: s for s in fibers[e.src]}
        else:
            lam = y.transitions[img[0]]
            trans[e.id] = dict(lam) if img[1] > 0 else {t: s for s, t in lam.items()}
    return DescentDatum(nm.source, fibers, trans)


# orbits, atoms, components

@dataclass(frozen=True)
class OrbitPartition:
    blocks: tuple[tuple[Element, ...], ...]

    def __len__(self) -> int:
        return len(self.blocks)

    def block_of(self, el: Element) -> int:
        return next(k for k, b in enumerate(self.blocks) if el in b)


def orbits(x: DescentDatum) -> OrbitPartition:
    uf = UnionFind(x.elements())
    for e in x.nerve.edges:
        for s, t in x.transitions[e.id].items():
            uf.union((e.src, s), (e.dst, t))
    blocks = [tuple(sorted(b, key=x.key)) for b in uf.to_sets()]
    return OrbitPartition(tuple(sorted(blocks, key=lambda b: x.key(b[0]))))


def is_connected(x: DescentDatum) -> bool:
    return len(orbits(x)) == 1


def atoms(x: DescentDatum) -> tuple[list[DescentDatum], DatumMorphism]:
    """Split ``x`` into its orbits, with a verified isomorphism from their sum."""
    parts = [restrict(x, b) for b in orbits(x).blocks]
    if not parts:
        return [], identity(x)
    total = coproduct(*parts)
    iso = DatumMorphism(total, x, {o: {(k, s): s for k, s in total.fibers[o]} for o in x.nerve.objects})
    if not (is_morphism(total, x, iso.maps) and iso.is_iso()):
        raise DescentError("atoms failed to reassemble")
    return parts, iso


@dataclass(frozen=True)
class Pi0:
    classes: tuple[tuple[Element, ...], ...]
    certificate: bool
    functions_checked: int


def pi0(x: DescentDatum, limit: int | None = DEFAULT_CERTIFICATE_LIMIT) -> Pi0:
    """The quotient by the orbit relation, with an exhaustive check that
    maps into constant data factor through it (test sets of size <= 3)."""
    parts = orbits(x)
    els = x.elements()
    if limit is not None and len(els) > limit:
        raise SizeLimitExceeded(f"{len(els)} elements; certificate limit is {limit}")
    ok, checked = True, 0
    for size in (1, 2, 3):
        target = constant(x.nerve, tuple(range(size)))
        for values in product(range(size), repeat=len(els)):
            f = dict(zip(els, values))
            maps = {o: {s: f[(o, s)] for s in x.fibers[o]} for o in x.nerve.objects}
            lifts = is_morphism(x, target, maps)
            factors = all(len({f[el] for el in b}) <= 1 for b in parts.blocks)
            checked += 1
            if lifts != factors:
                ok = False
    return Pi0(parts.blocks, ok, checked)


# action triples and the covering-projection test

@dataclass(frozen=True)
class SpaceSite:
    """Probes for a pair are the nonempty opens inside ``U_i & U_j``."""
    space: FiniteSpace
    cover: Cover
    max_points: int = 16

    def probes(self, i: str, j: str) -> list[frozenset[str]]:
        inter = self.cover[i] & self.cover[j]
        pts = self.space.sorted(inter)
        if len(pts) > self.max_points:
            raise SizeLimitExceeded(f"{len(pts)} points in the intersection; probe limit {self.max_points}")
        opens = set()
        for bits in product((0, 1), repeat=len(pts)):
            chosen = [p for p, b in zip(pts, bits) if b]
            if chosen:
                opens.add(frozenset().union(*(min_open(self.space, p) for p in chosen)))
        return sorted(opens, key=lambda u: (len(u), self.space.sorted(u)))

    def region(self, i: str, j: str) -> frozenset[str]:
        return self.cover[i] & self.cover[j]


@dataclass(frozen=True)
class NerveSite:
    """Probes for a pair are its edges."""
    nerve: ComponentNerve


@dataclass(frozen=True)
class ActionTriple:
    pair: tuple[str, str]
    probe: object
    s: Mapping[Hashable, Hashable]


def _pairs(x: DescentDatum) -> list[tuple[str, str]]:
    seen = []
    for e in x.nerve.edges:
        if (e.src, e.dst) not in seen:
            seen.append((e.src, e.dst))
    return seen


def action_triples(x: DescentDatum, pair: tuple[str, str], site) -> list[ActionTriple]:
    i, j = sorted(pair, key=x.nerve.position.__getitem__)
    edges = x.nerve.edges_between(i, j)
    out = []
    if isinstance(site, NerveSite):
        for e in edges:
            out.append(ActionTriple((i, j), e.id, dict(x.transitions[e.id])))
        return out
    for probe in site.probes(i, j):
        met = [e for e in edges if probe & set(e.support)]
        maps = [x.transitions[e.id] for e in met]
        if maps and all(m == maps[0] for m in maps):
            out.append(ActionTriple((i, j), probe, dict(maps[0])))
    return out


@dataclass(frozen=True)
class CoveringTest:
    ok: bool
    witness: Mapping[tuple[str, str], tuple]
    residue: Mapping[tuple[str, str], frozenset]


def is_covering_projection(x: DescentDatum, site) -> CoveringTest:
    witness, residue = {}, {}
    if isinstance(site, NerveSite):
        pairs = _pairs(x)
    else:
        pairs = [(i, j) for n, i in enumerate(site.cover.index) for j in site.cover.index[n + 1:]
                 if site.region(i, j)]
    for pair in pairs:
        triples = action_triples(x, pair, site)
        witness[pair] = tuple(t.probe for t in triples)
        if isinstance(site, NerveSite):
            left = frozenset(e.id for e in x.nerve.edges_between(*pair)) - set(witness[pair])
        else:
            covered = frozenset().union(*witness[pair]) if triples else frozenset()
            left = site.region(*pair) - covered
        if left:
            residue[pair] = left
    return CoveringTest(not residue, witness, residue)


# refinement: colimit homs and pro-systems

@dataclass(frozen=True)
class ColimitHoms:
    morphisms: list[DatumMorphism]
    refinement: Cover
    independent: bool


def _over(x: DescentDatum, space: FiniteSpace, cover: Cover):
    if x.nerve != component_nerve(space, cover):
        raise DescentError("datum is not over the component nerve of its cover")


def colimit_hom(x: DescentDatum, u: Cover, y: DescentDatum, v: Cover, space: FiniteSpace,
                limit: int | None = 64) -> ColimitHoms:
    """Morphisms ``x -> y`` after pulling both back to a common refinement."""
    _over(x, space, u)
    _over(y, space, v)

    def over_common(first, second):
        # members of the common refinement are split into components so that
        # the two pulled-back data become comparable fiber by fiber
        w, a, b = common_refinement(space, first, second)
        r = split_components(space, w)
        return r.source, r.then(a), r.then(b)

    def homs_over(p, q):
        return homs(pullback(nerve_map(space, p), x), pullback(nerve_map(space, q), y), limit)

    w, p, q = over_common(u, v)
    ms = homs_over(p, q)
    w2, q2, p2 = over_common(v, u)  # w2 indexed the other way round
    ms2 = homs_over(p2, q2)
    pos2 = {(p2.alpha[k], q2.alpha[k], min(w2[k])): k for k in w2.index}
    rename = {k: pos2[(p.alpha[k], q.alpha[k], min(w[k]))] for k in w.index}
    other = [{k: m.maps[rename[k]] for k in w.index} for m in ms2]
    first = [dict(m.maps) for m in ms]
    same = len(first) == len(other) and all(a in other for a in first)
    return ColimitHoms(ms, w, same)


@dataclass(frozen=True)
class ProEval:
    counts: tuple[int, ...]
    colimit: int | None
    refinements: tuple[Refinement, ...] = ()


def prosystem_eval(space: FiniteSpace, chain: Sequence[Cover], K: GroupTable,
                   refinements: Sequence[Refinement] | None = None) -> ProEval:
    """Representation class counts per stage, coarse to fine.

    Each stage must refine the one before it.  The colimit count is the
    finest stage's count when that stage refines every stage."""
    if not chain:
        raise DescentError("empty chain")
    refs = list(refinements) if refinements is not None else []
    if not refs:
        for coarse, fine in zip(chain, chain[1:]):
            r = find_refinement(space, fine, coarse)
            if r is None:
                raise DescentError(f"non-chain input: {fine.name or 'stage'} does not refine "
                                   f"{coarse.name or 'its predecessor'}")
            refs.append(r)
    elif len(refs) != len(chain) - 1:
        raise DescentError("need one refinement per consecutive pair of stages")
    counts = tuple(count_classes(free_groupoid(component_nerve(space, c)), K) for c in chain)
    finest = chain[-1]
    cofinal = all(find_refinement(space, finest, c) is not None for c in chain)
    return ProEval(counts, counts[-1] if cofinal else None, tuple(refs))


def prosystem_eval_nerves(nerves: Sequence[ComponentNerve], K: GroupTable) -> ProEval:
    """Counts for abstract stages listed coarse to fine; the last one is taken as cofinal."""
    if not nerves:
        raise DescentError("empty chain")
    counts = tuple(count_classes(free_groupoid(n), K) for n in nerves)
    return ProEval(counts, counts[-1])
