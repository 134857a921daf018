"""Locally constant objects over the convergent sequence ``C = {0} u {1/n}``.

The point ``1/n`` is written ``n``; the limit point is ``0``.  Fibers are
the natural numbers.  Over the intersection of two cover opens the
transition at ``n`` is an affine swap word, applied term by term from the
left, and the transition at the limit is a finitely supported permutation.

Everything is decided symbolically: for ``n`` past a safe threshold, two
affine values ``a1*n + b1`` and ``a2*n + b2`` coincide iff ``(a1, b1) == (a2, b2)``,
so a word can be traced on expressions instead of numbers.  Exact bounds
are then found by scanning down from that threshold.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping


class SeqError(ValueError):
    pass


@dataclass(frozen=True)
class SeqOpen:
    """``{n in isolated}`` together with ``{0} u {n >= tail}`` when ``tail`` is set."""
    isolated: frozenset[int] = frozenset()
    tail: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "isolated", frozenset(self.isolated))
        if not self.isolated and self.tail is None:
            raise SeqError("an open must be nonempty")
        if any(n < 1 for n in self.isolated) or (self.tail is not None and self.tail < 1):
            raise SeqError("point indices start at 1")
        if self.tail is not None:
            object.__setattr__(self, "isolated", frozenset(n for n in self.isolated if n < self.tail))

    def __contains__(self, n: int) -> bool:
        if n == 0:
            return self.tail is not None
        return n in self.isolated or (self.tail is not None and n >= self.tail)

    def __and__(self, other: "SeqOpen") -> "SeqOpen | None":
        tail = None if self.tail is None or other.tail is None else max(self.tail, other.tail)
        horizon = max([*self.isolated, *other.isolated, self.tail or 1, other.tail or 1])
        iso = {n for n in range(1, horizon + 1) if n in self and n in other}
        if not iso and tail is None:
            return None
        return SeqOpen(frozenset(iso), tail)

    def covers_all(self, other: "SeqOpen") -> bool:
        """Whether ``self u other`` is all of ``C``."""
        tails = [t for t in (self.tail, other.tail) if t is not None]
        if not tails:
            return False
        return all(n in self or n in other for n in range(1, min(tails)))

    def finite_part(self, upto: int) -> list[int]:
        return [n for n in range(1, upto + 1) if n in self]

    def __str__(self) -> str:
        parts = []
        if self.tail is not None:
            parts.append(f"tail {self.tail}")
        if self.isolated:
            parts.append("isolated " + " ".join(map(str, sorted(self.isolated))))
        return " ".join(parts)


@dataclass(frozen=True)
class Affine:
    a: int
    b: int

    def __post_init__(self):
        if self.a not in (0, 1):
            raise SeqError(f"malformed affine term: coefficient {self.a} not in {{0,1}}")

    def __call__(self, n: int) -> int:
        return self.a * n + self.b

    def __str__(self) -> str:
        if self.a == 0:
            return str(self.b)
        return "n" if self.b == 0 else f"n{self.b:+d}"


_AFFINE = re.compile(r"^(?:(\d*)n)?(?:([+-]?\d+))?$")


def parse_affine(text: str) -> Affine:
    t = text.replace(" ", "")
    m = _AFFINE.match(t)
    if not t or not m:
        raise SeqError(f"malformed affine term {text!r}")
    coef, const = m.groups()
    if "n" in t:
        a = int(coef) if coef else 1
        b = int(const) if const else 0
    else:
        a, b = 0, int(const)
    return Affine(a, b)


Swap = tuple[Affine, Affine]


@dataclass(frozen=True)
class AffineSwapWord:
    terms: tuple[Swap, ...] = ()

    def apply(self, n: int, s: int) -> int:
        for e1, e2 in self.terms:
            v1, v2 = e1(n), e2(n)
            if s == v1:
                s = v2
            elif s == v2:
                s = v1
        return s

    def trace(self, value: Affine) -> Affine:
        """Symbolic image of an affine value, valid for all large ``n``."""
        for e1, e2 in self.terms:
            if value == e1:
                value = e2
            elif value == e2:
                value = e1
        return value

    def then(self, other: "AffineSwapWord") -> "AffineSwapWord":
        return AffineSwapWord(self.terms + other.terms)

    def constants(self) -> list[int]:
        return [abs(e.b) for t in self.terms for e in t]

    def moved(self, n: int) -> set[int]:
        return {e(n) for t in self.terms for e in t}

    def __str__(self) -> str:
        return " ".join(f"swap({e1},{e2})" for e1, e2 in self.terms)


def parse_word(text: str) -> AffineSwapWord:
    text = text.strip()
    if text in ("", "id"):
        return AffineSwapWord()
    terms, pos = [], 0
    for m in re.finditer(r"\s*swap\(([^,()]*),([^,()]*)\)\s*", text):
        if m.start() != pos:
            break
        terms.append((parse_affine(m.group(1)), parse_affine(m.group(2))))
        pos = m.end()
    if pos != len(text):
        raise SeqError(f"malformed affine term near {text[pos:]!r}")
    return AffineSwapWord(tuple(terms))


@dataclass(frozen=True)
class FinitePerm:
    """A finitely supported permutation of the natural numbers."""
    mapping: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        m = {k: v for k, v in dict(self.mapping).items() if k != v}
        if sorted(m) != sorted(m.values()) or any(k < 0 for k in m):
            raise SeqError("not a permutation of the natural numbers")
        object.__setattr__(self, "mapping", m)

    def __call__(self, s: int) -> int:
        return self.mapping.get(s, s)

    def __eq__(self, other) -> bool:
        return isinstance(other, FinitePerm) and self.mapping == other.mapping

    def __hash__(self) -> int:
        return hash(frozenset(self.mapping.items()))

    def then(self, other: "FinitePerm") -> "FinitePerm":
        keys = set(self.mapping) | set(other.mapping)
        return FinitePerm({k: other(self(k)) for k in keys})

    @property
    def support(self) -> set[int]:
        return set(self.mapping)

    def __str__(self) -> str:
        seen, parts = set(), []
        for k in sorted(self.mapping):
            if k in seen:
                continue
            cyc, j = [], k
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = self.mapping[j]
            parts.append("(" + " ".join(map(str, cyc)) + ")")
        return "".join(parts) or "()"


def parse_cycles(text: str) -> FinitePerm:
    text = text.strip()
    if not re.fullmatch(r"(\(\s*[\d\s,]*\)\s*)*", text):
        raise SeqError(f"malformed cycle notation {text!r}")
    perm: dict[int, int] = {}
    for body in re.findall(r"\(([^)]*)\)", text):
        cyc = [int(x) for x in re.split(r"[\s,]+", body.strip()) if x]
        if len(set(cyc)) != len(cyc) or set(cyc) & set(perm):
            raise SeqError(f"cycles are not disjoint in {text!r}")
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            perm[a] = b
    return FinitePerm(perm)


@dataclass(frozen=True)
class Piece:
    lo: int
    hi: int | None
    word: AffineSwapWord

    def __contains__(self, n: int) -> bool:
        return n >= self.lo and (self.hi is None or n <= self.hi)

    def header(self) -> str:
        if self.lo <= 1 and self.hi is None:
            return "n"
        if self.hi is None:
            return f"n>={self.lo}"
        if self.lo <= 1:
            return f"n<={self.hi}"
        if self.lo == self.hi:
            return f"n={self.lo}"
        return f"{self.lo}<=n<={self.hi}"


@dataclass(frozen=True)
class SeqLCObject:
    U: SeqOpen
    V: SeqOpen
    pieces: tuple[Piece, ...]
    at0: FinitePerm
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.U.covers_all(self.V):
            raise SeqError("the two opens do not cover C")
        meet = self.U & self.V
        if meet is None or meet.tail is None:
            raise SeqError("the intersection must contain a tail")
        object.__setattr__(self, "_meet", meet)
        for n in self.points(self.horizon()):
            w = self.word_at(n)
            for e1, e2 in w.terms:
                v1, v2 = e1(n), e2(n)
                if v1 < 0 or v2 < 0 or v1 == v2:
                    raise SeqError(f"swap({e1},{e2}) is degenerate or negative at n={n}")

    @property
    def meet(self) -> SeqOpen:
        return self._meet  # type: ignore[attr-defined]

    def word_at(self, n: int) -> AffineSwapWord:
        for p in self.pieces:
            if n in p:
                return p.word
        return AffineSwapWord()

    @property
    def far_word(self) -> AffineSwapWord:
        """The word in force for every large ``n``."""
        return next((p.word for p in self.pieces if p.hi is None), AffineSwapWord())

    def horizon(self, s: int = 0) -> int:
        """Past this index distinct affine values in play never collide."""
        consts = [s, self.meet.tail or 1, *self.meet.isolated, *self.at0.support]
        for p in self.pieces:
            consts += [p.lo, p.hi or 0, *p.word.constants()]
        return 2 * max(consts) + 3

    def points(self, upto: int) -> list[int]:
        return self.meet.finite_part(upto)

    def value(self, n: int, s: int) -> int:
        return self.at0(s) if n == 0 else self.word_at(n).apply(n, s)

    def agrees_at(self, n: int, perm: FinitePerm) -> bool:
        """Whether the full transition at ``n`` equals ``perm``."""
        w = self.word_at(n)
        probe = w.moved(n) | perm.support
        return all(w.apply(n, s) == perm(s) for s in probe)

    def perm_at(self, n: int) -> FinitePerm:
        if n == 0:
            return self.at0
        w = self.word_at(n)
        return FinitePerm({s: w.apply(n, s) for s in w.moved(n)})

    def then(self, other: "SeqLCObject") -> "SeqLCObject":
        """Pointwise composite: this transition first, then ``other``'s."""
        if (self.U, self.V) != (other.U, other.V):
            raise SeqError("composites need the same cover")
        cuts = sorted({1} | {p.lo for p in self.pieces + other.pieces}
                      | {p.hi + 1 for p in self.pieces + other.pieces if p.hi is not None})
        pieces = []
        for lo, nxt in zip(cuts, cuts[1:] + [None]):
            hi = None if nxt is None else nxt - 1
            pieces.append(Piece(lo, hi, self.word_at(lo).then(other.word_at(lo))))
        return SeqLCObject(self.U, self.V, tuple(pieces), self.at0.then(other.at0),
                           f"{self.name};{other.name}")


# decision procedures

@dataclass(frozen=True)
class LCReport:
    locally_constant: bool
    bound: int | None  # uniform bound; None when only per-element bounds exist
    failing: tuple[int, ...] = ()


def element_bound(x: SeqLCObject, s: int) -> int | None:
    """Least ``B`` with ``transition_n(s) = transition_0(s)`` for every
    intersection point ``n >= B``; ``None`` if there is none."""
    target = x.at0(s)
    if x.far_word.trace(Affine(0, s)) != Affine(0, target):
        return None
    top = x.horizon(s)
    bound = top
    for n in range(top, 0, -1):
        if n in x.meet and x.value(n, s) != target:
            break
        bound = n
    return bound


def _small_elements(x: SeqLCObject) -> range:
    """Elements that can behave specially; every larger element is moved
    only near its own index and is fixed at the limit."""
    consts = [0, *x.at0.support] + [e.b for p in x.pieces for t in p.word.terms for e in t if e.a == 0]
    return range(max(consts) + 2)


def check_locally_constant(x: SeqLCObject) -> LCReport:
    failing = tuple(s for s in _small_elements(x) if element_bound(x, s) is None)
    if failing:
        return LCReport(False, None, failing)
    return LCReport(True, uniform_bound(x))


def _eventually_limit(x: SeqLCObject) -> bool:
    w = x.far_word
    exprs = {Affine(0, s) for s in _small_elements(x)} | {e for t in w.terms for e in t}
    return all(w.trace(e) == (Affine(0, x.at0(e.b)) if e.a == 0 else e) for e in exprs)


def uniform_bound(x: SeqLCObject) -> int | None:
    """Least ``B`` past which the full transition equals the one at the limit."""
    if not _eventually_limit(x):
        return None
    top = x.horizon()
    bound = top
    for n in range(top, 0, -1):
        if n in x.meet and not x.agrees_at(n, x.at0):
            break
        bound = n
    return bound


@dataclass(frozen=True)
class ConstancyOpens:
    opens: tuple[SeqOpen, ...]
    singletons_from: int | None = None  # every later intersection point is its own class

    def __iter__(self):
        return iter(self.opens)

    def covers(self, n: int) -> bool:
        return any(n in o for o in self.opens) or (
            self.singletons_from is not None and n >= self.singletons_from)


def constancy_opens(x: SeqLCObject) -> ConstancyOpens:
    """Maximal opens of the intersection on which the transition is constant."""
    if not check_locally_constant(x).locally_constant:
        raise SeqError("constancy opens need a locally constant object")
    B = uniform_bound(x)
    N = x.horizon() + 1 if B is None else B
    classes: dict[FinitePerm, list[int]] = {}
    for n in x.points(N - 1):
        classes.setdefault(x.perm_at(n), []).append(n)
    opens = []
    if B is not None:
        opens.append(SeqOpen(frozenset(classes.pop(x.at0, [])), B))
    opens += [SeqOpen(frozenset(ns)) for ns in classes.values()]
    opens.sort(key=lambda o: (min(o.isolated) if o.isolated else o.tail, o.tail is None))
    return ConstancyOpens(tuple(opens), None if B is not None else N)


def is_cp(x: SeqLCObject) -> bool:
    return any(o.tail is not None for o in constancy_opens(x))


def completion(x: SeqLCObject, probe: SeqOpen) -> FinitePerm | None:
    """The single bijection completing ``probe``, or ``None`` (undefined)."""
    meet = x.meet
    horizon = max(x.horizon(), probe.tail or 1, *probe.isolated, 1)
    if any(n not in meet for n in probe.finite_part(horizon)) or (
            probe.tail is not None and 0 not in meet):
        raise SeqError("probe is not inside the intersection")
    if probe.tail is not None:
        B = uniform_bound(x)
        if B is None:
            return None
        pts = probe.finite_part(max(B, probe.tail))
        return x.at0 if all(x.agrees_at(n, x.at0) for n in pts) else None
    pts = sorted(probe.isolated)
    first = x.perm_at(pts[0])
    return first if all(x.agrees_at(n, first) for n in pts[1:]) else None


def restriction_is_constant(x: SeqLCObject) -> bool:
    """Past the covering tail every transition is the limit one."""
    B = uniform_bound(x)
    if B is None:
        return False
    return all(x.agrees_at(n, x.at0) for n in range(B, x.horizon() + 1) if n in x.meet)


# text format

def parse_seq(text: str) -> SeqLCObject:
    name, U, V, pieces, at0 = "", None, None, [], FinitePerm()
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("seq-object"):
            name = line[len("seq-object"):].strip()
        elif line.startswith(("coverU:", "coverV:")):
            o = _parse_open(line.split(":", 1)[1])
            if line.startswith("coverU"):
                U = o
            else:
                V = o
        elif line.startswith("at "):
            head, _, body = line[3:].partition(":")
            head = head.replace(" ", "")
            if head == "0":
                at0 = parse_cycles(body)
            else:
                lo, hi = _parse_range(head)
                pieces.append(Piece(lo, hi, parse_word(body)))
        else:
            raise SeqError(f"unrecognised line {line!r}")
    if U is None or V is None:
        raise SeqError("both coverU and coverV are required")
    return SeqLCObject(U, V, tuple(pieces), at0, name)


def _parse_open(text: str) -> SeqOpen:
    toks = text.split()
    tail, iso, mode = None, set(), None
    for t in toks:
        if t in ("tail", "isolated"):
            mode = t
        elif t.isdigit() and mode == "tail" and tail is None:
            tail = int(t)
        elif t.isdigit() and mode == "isolated":
            iso.add(int(t))
        else:
            raise SeqError(f"malformed open {text.strip()!r}")
    return SeqOpen(frozenset(iso), tail)


def _parse_range(head: str) -> tuple[int, int | None]:
    if head == "n":
        return 1, None
    for pat, f in ((r"n>=(\d+)", lambda a: (int(a), None)), (r"n<=(\d+)", lambda a: (1, int(a))),
                   (r"n=(\d+)", lambda a: (int(a), int(a))),
                   (r"(\d+)<=n<=(\d+)", lambda a, b: (int(a), int(b)))):
        m = re.fullmatch(pat, head)
        if m:
            return f(*m.groups())
    raise SeqError(f"malformed range {head!r}")


def format_seq(x: SeqLCObject) -> str:
    lines = [f"seq-object {x.name}".rstrip(), f"coverU: {x.U}", f"coverV: {x.V}"]
    lines += [f"at {p.header()}: {p.word}".rstrip() for p in x.pieces]
    lines.append(f"at 0: {x.at0}")
    return "\n".join(lines) + "\n"


def numeric_tail_check(x: SeqLCObject, start: int, upto: int) -> bool:
    """Brute force: does one bijection agree with every transition on
    ``[start, upto]`` and at the limit?"""
    return all(x.agrees_at(n, x.at0) for n in range(start, upto + 1) if n in x.meet)


def points_with(x: SeqLCObject, perm: FinitePerm, ns: Iterable[int]) -> list[int]:
    return [n for n in ns if x.agrees_at(n, perm)]
