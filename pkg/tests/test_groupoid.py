import random
from itertools import product

from hypothesis import given, settings, strategies as st

from cechdescent.descent import constant, pullback
from cechdescent.groupoid import (
    PathWord, conj_classes, count_classes, evaluate, evaluate_path, free_groupoid, free_reduce,
    functor_from_hom, groupoid_morphism, hom_from_functor, hom_to_group, inverse, is_functor, pi1,
    precompose, tietze,
)
from cechdescent.groups import cyclic, symmetric
from cechdescent.nerve import build_nerve, nerve_map
from cechdescent.space import find_refinement, minimal_cover
from cechdescent.torsor import Cocycle, torsor_datum

from helpers import double_cover, load, pc4_cd, random_datum, random_nerve

Z2, Z3, S3 = cyclic(2), cyclic(3), symmetric(3)


def test_free_groupoid_counts():
    _, _, n = pc4_cd()
    g = free_groupoid(n)
    assert (len(g.objects), len(g.generators), len(g.relations)) == (2, 2, 0)
    g = free_groupoid(load("tet.nerve"))
    assert (len(g.objects), len(g.generators), len(g.relations)) == (4, 6, 4)
    g = free_groupoid(build_nerve(["x"], []))
    assert (len(g.generators), len(g.relations)) == (0, 0)


def test_pi1_examples():
    _, _, n = pc4_cd()
    p = pi1(free_groupoid(n), "c")
    assert (len(p.generators), len(p.relators)) == (1, 0)
    p = pi1(free_groupoid(load("tet.nerve")), "0")
    assert (len(p.generators), len(p.relators)) == (0, 0)
    p = pi1(free_groupoid(load("circle3arc.nerve")), "0")
    assert (p.generators, p.relators) == (("e12",), ())


def test_pi1_tree_is_bfs_in_identifier_order():
    p = pi1(free_groupoid(load("tet.nerve")), "0")
    assert p.tree == ("e01", "e02", "e03")
    p = pi1(free_groupoid(load("figure8.nerve")), "u")
    assert p.tree == ("p",) and p.generators == ("q", "r")


def test_tietze_moves():
    gens, rels, gone = tietze(["a", "b"], [(("a", 1), ("b", 1), ("a", -1))])
    assert gens == ("a",) and rels == () and gone[0][0] == "b"
    gens, rels, _ = tietze(["a"], [(("a", 1), ("a", 1))])
    assert gens == ("a",) and len(rels) == 1


def test_hom_counts():
    _, _, n = pc4_cd()
    assert len(hom_to_group(free_groupoid(n), Z3)) == 3
    assert len(hom_to_group(free_groupoid(load("tet.nerve")), S3)) == 1
    assert len(hom_to_group(free_groupoid(load("figure8.nerve")), Z2)) == 4


def test_conj_classes():
    _, _, n = pc4_cd()
    g = free_groupoid(n)
    assert len(conj_classes(hom_to_group(g, Z3), Z3)) == 3
    assert len(conj_classes(hom_to_group(g, S3), S3)) == 3
    assert count_classes(free_groupoid(load("tet.nerve")), S3) == 1


def test_evaluate_path_double_cover():
    _, _, x = double_cover()
    loop = PathWord("c", (("c-d/a", 1), ("c-d/b", -1)))
    assert loop.end(x.nerve) == "c"
    assert evaluate_path(x, loop) == {"0": "1", "1": "0"}
    assert evaluate_path(x, PathWord("d")) == {"0": "0", "1": "1"}


def test_evaluate_path_in_torsor_is_signed_product():
    n = load("circle3arc.nerve")
    c = Cocycle(n, Z3, {"e01": 1, "e12": 2, "e02": 0})
    t = torsor_datum(n, Z3, c).datum
    loop = PathWord("0", (("e01", 1), ("e12", 1), ("e02", -1)))
    k = evaluate(loop.steps, c.values, Z3)
    assert evaluate_path(t, loop) == {z: Z3.mul(k, z) for z in range(3)}


def test_precomposition_pc4():
    sp, cv, n = pc4_cd()
    ref = find_refinement(sp, minimal_cover(sp), cv)
    pm = groupoid_morphism(nerve_map(sp, ref))
    assert {w for w in pm.generators.values() if w} == {(("c-d/a", 1),), (("c-d/b", 1),)}
    target = free_groupoid(n)
    classes = {}
    for h in hom_to_group(target, Z3):
        pulled = precompose(pm, h, Z3)
        classes.setdefault(pulled.images, []).append(h)
    assert len(classes) == 3  # injective on classes


def _functors(n, K):
    g = free_groupoid(n)
    out = []
    for imgs in product(range(len(K)), repeat=len(n.edges)):
        f = dict(zip([e.id for e in n.edges], imgs))
        if is_functor(g, f, K):
            out.append(f)
    return out


seeds = st.integers(0, 10**6)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([Z2, Z3, S3]))
def test_functor_count_matches_vertex_groups(seed, K):
    n = random_nerve(random.Random(seed), max_edges=4)
    g = free_groupoid(n)
    homs = hom_to_group(g, K)
    tree_edges = len(n.objects) - len(n.connected_components())
    assert len(_functors(n, K)) == len(homs) * len(K) ** tree_edges
    for h in homs:
        f = functor_from_hom(g, h, K)
        assert is_functor(g, f, K)
        assert hom_from_functor(g, f, K) == h


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_free_rank_hom_count(seed):
    rng = random.Random(seed)
    K = rng.choice([Z2, Z3, S3])
    n = random_nerve(rng, max_edges=4, max_triangles=0)
    assert len(hom_to_group(free_groupoid(n), K)) == len(K) ** (
        len(n.edges) - len(n.objects) + len(n.connected_components()))
    if K is not S3:
        homs = hom_to_group(free_groupoid(n), K)
        assert len(conj_classes(homs, K)) == len(homs)


def _paths(n, start, length):
    steps = [(e.id, 1, e.src, e.dst) for e in n.edges] + [(e.id, -1, e.dst, e.src) for e in n.edges]
    frontier = [((), start)]
    for _ in range(length):
        frontier = [(w + ((eid, d),), b) for w, here in frontier for eid, d, a, b in steps if a == here]
        yield from frontier


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_paths_equal_in_pi1_act_equally(seed):
    rng = random.Random(seed)
    n = random_nerve(rng, max_objects=3, max_edges=4)
    x = random_datum(rng, n, max_fiber=3)
    base = n.objects[0]
    for w, end in _paths(n, base, 3):
        if end != base:
            continue
        bij = evaluate_path(x, PathWord(base, w))
        assert evaluate_path(x, PathWord(base, free_reduce(w))) == bij
        back = evaluate_path(x, PathWord(base, inverse(w)))
        assert all(back[bij[s]] == s for s in bij)
        # splicing a triangle relation in anywhere changes nothing
        for k in range(len(w) + 1):
            here = PathWord(base, w[:k]).end(n)
            for t in n.triangles:
                if t.objects[0] == here:
                    loop = ((t.faces[0], 1), (t.faces[1], 1), (t.faces[2], -1))
                    assert evaluate_path(x, PathWord(base, w[:k] + loop + w[k:])) == bij


def test_precomposition_preserves_relations_on_random_chains():
    rng = random.Random(7)
    from helpers import random_cover, random_space
    for _ in range(30):
        sp = random_space(rng)
        u = random_cover(rng, sp)
        ref = find_refinement(sp, minimal_cover(sp), u)
        nm = nerve_map(sp, ref)
        pm = groupoid_morphism(nm)
        for h in hom_to_group(free_groupoid(nm.target), Z2):
            f = functor_from_hom(pm.target, h, Z2)
            pulled = {x: evaluate(w, f, Z2) for x, w in pm.generators.items()}
            assert is_functor(pm.source, pulled, Z2)
        y = constant(nm.target, (0, 1))
        assert pullback(nm, y) == constant(nm.source, (0, 1))
