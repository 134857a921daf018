"""Torsors for a finite group as descent data, and non-abelian H^1.

Conventions: transitions act by left multiplication with the cocycle value,
the torsor structure is right multiplication, ``x / y = x * y^-1`` and
``x \\ y = x^-1 * y``.  A cocycle satisfies ``k_ik = k_jk * k_ij`` on every
triangle; ``k' = g_j * k * g_i^-1`` changes it within its class.

Class counts go three independent ways: homomorphisms from the vertex
groups up to conjugation, cocycles up to coboundary, and torsor data up to
equivariant isomorphism of data.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Mapping

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .descent import DescentDatum, check_cocycle, constant, is_morphism, product_
from .groupoid import component_presentations, count_classes, free_groupoid
from .groups import GroupTable
from .nerve import ComponentNerve

DEFAULT_COCYCLE_LIMIT = 10**6


class TorsorError(ValueError):
    pass


@dataclass(frozen=True)
class Cocycle:
    nerve: ComponentNerve
    K: GroupTable
    values: Mapping[str, int]

    def violations(self) -> list[str]:
        K, out = self.K, []
        for t in self.nerve.triangles:
            ij, jk, ik = (self.values[f] for f in t.faces)
            if K.mul(jk, ij) != ik:
                out.append(f"triangle {t.id}: {K.elements[jk]}*{K.elements[ij]} != {K.elements[ik]}")
        return out

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self.values[e.id] for e in self.nerve.edges)


@dataclass(frozen=True)
class TorsorDatum:
    datum: DescentDatum
    K: GroupTable
    action: Mapping[str, Mapping[tuple[int, int], int]] = field(repr=False)


def torsor_datum(nerve: ComponentNerve, K: GroupTable, c: Cocycle) -> TorsorDatum:
    bad = c.violations()
    if bad:
        raise TorsorError("invalid cocycle: " + "; ".join(bad))
    elems = tuple(range(len(K)))
    trans = {e.id: {z: K.mul(c.values[e.id], z) for z in elems} for e in nerve.edges}
    datum = DescentDatum(nerve, {o: elems for o in nerve.objects}, trans)
    action = {o: {(z, k): K.mul(z, k) for z in elems for k in elems} for o in nerve.objects}
    return TorsorDatum(datum, K, action)


def is_torsor(x: DescentDatum, K: GroupTable, action: Mapping[str, Mapping[tuple, object]]) -> bool:
    """Fibers nonempty, action free and transitive, transitions equivariant,
    and the action map a morphism ``K x X -> X`` of data."""
    if check_cocycle(x):
        return False
    ks = range(len(K))
    for o in x.nerve.objects:
        fib, act = x.fibers[o], action[o]
        if not fib:
            return False
        if any(act[(s, K.identity)] != s for s in fib):
            return False
        if any(act[(act[(s, a)], b)] != act[(s, K.mul(a, b))] for s in fib for a in ks for b in ks):
            return False
        pairs = {(act[(s, k)], s) for s in fib for k in ks}
        if len(pairs) != len(fib) * len(K) or len(pairs) != len(fib) ** 2:
            return False
    for e in x.nerve.edges:
        lam, a, b = x.transitions[e.id], action[e.src], action[e.dst]
        if any(lam[a[(s, k)]] != b[(lam[s], k)] for s in x.fibers[e.src] for k in ks):
            return False
    lifted = product_(constant(x.nerve, tuple(ks)), x)
    maps = {o: {(k, s): action[o][(s, k)] for k, s in lifted.fibers[o]} for o in x.nerve.objects}
    return is_morphism(lifted, x, maps)


# enumeration

def _all_cocycles(nerve: ComponentNerve, K: GroupTable, limit: int | None) -> np.ndarray:
    n, E = len(K), len(nerve.edges)
    if limit is not None and n ** E > limit:
        raise TorsorError(f"{n}^{E} edge assignments exceed the limit {limit}")
    if E == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grid = np.indices((n,) * E).reshape(E, -1).T
    M = np.asarray(K.mult)
    col = {e.id: k for k, e in enumerate(nerve.edges)}
    keep = np.ones(len(grid), dtype=bool)
    for t in nerve.triangles:
        ij, jk, ik = (col[f] for f in t.faces)
        keep &= M[grid[:, jk], grid[:, ij]] == grid[:, ik]
    return grid[keep]


def _codes(rows: np.ndarray, n: int) -> np.ndarray:
    weights = n ** np.arange(rows.shape[1] - 1, -1, -1, dtype=np.int64)
    return rows @ weights


def _orbits(rows: np.ndarray, n: int, moves) -> np.ndarray:
    """Component labels of ``rows`` under the given elementary moves."""
    N = len(rows)
    codes = _codes(rows, n)
    lookup = {int(c): k for k, c in enumerate(codes)}
    src, dst = [np.arange(N)], [np.arange(N)]
    for move in moves:
        moved = move(rows)
        idx = np.array([lookup.get(int(c), -1) for c in _codes(moved, n)])
        if (idx < 0).any():
            raise TorsorError("an elementary move left the set of cocycles")
        src.append(np.arange(N))
        dst.append(idx)
    s, d = np.concatenate(src), np.concatenate(dst)
    graph = coo_matrix((np.ones(len(s)), (s, d)), shape=(N, N))
    return connected_components(graph, directed=False)[1]


@dataclass(frozen=True)
class H1Class:
    representative: Cocycle
    size: int


def _tree_edges(nerve: ComponentNerve) -> set[str]:
    return {t for p in component_presentations(free_groupoid(nerve)) for t in p.tree}


def h1(nerve: ComponentNerve, K: GroupTable, limit: int | None = DEFAULT_COCYCLE_LIMIT) -> list[H1Class]:
    """Cocycles up to coboundary, each with its spanning-tree-gauge representative."""
    rows = _all_cocycles(nerve, K, limit)
    M = np.asarray(K.mult)
    inv = np.array([K.inv(a) for a in range(len(K))])
    moves = []
    for v in nerve.objects:
        into = [k for k, e in enumerate(nerve.edges) if e.dst == v]
        out_of = [k for k, e in enumerate(nerve.edges) if e.src == v]
        for g in K.generators:
            def move(r, into=into, out_of=out_of, g=g):
                r = r.copy()
                r[:, into] = M[g, r[:, into]]
                r[:, out_of] = M[r[:, out_of], inv[g]]
                return r
            moves.append(move)
    labels = _orbits(rows, len(K), moves)
    tree = _tree_edges(nerve)
    tcols = [k for k, e in enumerate(nerve.edges) if e.id in tree]
    gauged = (rows[:, tcols] == K.identity).all(axis=1) if tcols else np.ones(len(rows), dtype=bool)
    classes = []
    for lab in range(labels.max() + 1 if len(labels) else 0):
        members = np.flatnonzero(labels == lab)
        pick = [m for m in members if gauged[m]] or list(members)
        rep = min(pick, key=lambda m: tuple(rows[m]))
        values = {e.id: int(rows[rep, k]) for k, e in enumerate(nerve.edges)}
        classes.append(H1Class(Cocycle(nerve, K, values), len(members)))
    classes.sort(key=lambda c: c.representative.as_tuple())
    return classes


def torsor_classes(nerve: ComponentNerve, K: GroupTable, limit: int | None = DEFAULT_COCYCLE_LIMIT) -> int:
    """Torsor data up to equivariant isomorphism.

    Equivariant maps of the fiber ``K`` are left multiplications, so every
    isomorphism is a product of single-object ones.  Each is applied by
    transporting the transition permutations; the result is checked to be a
    torsor datum again and its cocycle read off from the image of the
    identity."""
    rows = _all_cocycles(nerve, K, limit)
    n = len(K)
    L = np.asarray(K.mult)  # L[k] is left multiplication by k, as a permutation
    e0 = K.identity
    moves = []
    for v in nerve.objects:
        for g in K.generators:
            theta = L[g]
            theta_inv = np.argsort(theta)
            if any(theta[K.mul(z, k)] != K.mul(theta[z], k) for z in range(n) for k in range(n)):
                raise TorsorError("left multiplication failed to be equivariant")

            def move(r, v=v, theta=theta, theta_inv=theta_inv):
                p = L[r]
                for k, e in enumerate(nerve.edges):
                    if e.src == v:
                        p[:, k, :] = p[:, k, :][:, theta_inv]
                    if e.dst == v:
                        p[:, k, :] = theta[p[:, k, :]]
                d = p[:, :, e0]
                if not (p == L[d]).all():
                    raise TorsorError("transport left the torsor data")
                return d
            moves.append(move)
    labels = _orbits(rows, n, moves)
    return int(labels.max() + 1) if len(labels) else 0


@dataclass(frozen=True)
class Counts:
    hom: int
    h1: int
    torsor: int

    @property
    def equal(self) -> bool:
        return self.hom == self.h1 == self.torsor


def compare_counts(nerve: ComponentNerve, K: GroupTable, limit: int | None = DEFAULT_COCYCLE_LIMIT) -> Counts:
    return Counts(count_classes(free_groupoid(nerve), K), len(h1(nerve, K, limit)),
                  torsor_classes(nerve, K, limit))


# the canonical torsor over the cover T -> 1

def sigma_formula(K: GroupTable, z: int, u: int, v: int) -> tuple[int, int, int]:
    """``(v / (z*u), v, u)``, the closed-form transition stated for the canonical torsor."""
    return K.div(v, K.mul(z, u)), v, u


def sigma_from_trivialization(K: GroupTable, z: int, u: int, v: int) -> tuple[int, int, int]:
    """Transition obtained by composing the trivialization ``(z, u) -> z*u``
    over ``u`` with the inverse trivialization over ``v``; solved by search."""
    w = K.mul(z, u)
    z2 = next(a for a in range(len(K)) if K.mul(a, v) == w)
    return z2, v, u


@dataclass(frozen=True)
class DescentLaws:
    instances: int
    identity_failures: tuple[tuple[int, int], ...]
    failures: tuple[tuple[int, int, int], ...]

    @property
    def ok(self) -> bool:
        return not self.failures and not self.identity_failures


def descent_laws(K: GroupTable, sigma: Callable[[GroupTable, int, int, int], tuple[int, int, int]]) -> DescentLaws:
    """Check ``sigma`` on every ``(z, u, v)``: swapping back returns ``z``
    and transitions compose, ``sigma(.., v, w) o sigma(.., u, v) = sigma(.., u, w)``
    for all ``w``.  Identity ``sigma(z, u, u) = z`` is checked on every ``(z, u)``."""
    ks = range(len(K))
    bad, ident = [], []
    for z, u in product(ks, ks):
        if sigma(K, z, u, u)[0] != z:
            ident.append((z, u))
    for z, u, v in product(ks, ks, ks):
        z1, v1, u1 = sigma(K, z, u, v)
        back = sigma(K, z1, v1, u1)
        composes = all(sigma(K, z1, v, w)[0] == sigma(K, z, u, w)[0] for w in ks)
        if back[0] != z or not composes:
            bad.append((z, u, v))
    return DescentLaws(len(K) ** 3, tuple(ident), tuple(bad))


@dataclass(frozen=True)
class TripleCheck:
    s: dict[int, int]
    h: dict[int, int]
    inverse_ok: bool
    square_ok: bool
    square_ok_trivialization: bool


def action_triple_for_torsor(K: GroupTable, x: int, y: int) -> TripleCheck:
    """The bijection ``s(z) = (y/x)/z`` for the probe ``c -> (x*c, y*c)``.

    ``inverse_ok`` checks it against ``h(z) = z \\ (y/x)``; ``square_ok``
    checks the action-triple square against :func:`sigma_formula` at every
    ``c`` and ``z``; ``square_ok_trivialization`` does the same against
    :func:`sigma_from_trivialization`."""
    ks = range(len(K))
    yx = K.div(y, x)
    s = {z: K.div(yx, z) for z in ks}
    h = {z: K.ldiv(z, yx) for z in ks}
    inverse_ok = all(s[h[z]] == z and h[s[z]] == z for z in ks)

    def squares(sigma):
        return all(sigma(K, z, K.mul(x, c), K.mul(y, c))[0] == s[z] for c in ks for z in ks)

    return TripleCheck(s, h, inverse_ok, squares(sigma_formula), squares(sigma_from_trivialization))
