"""Line-oriented text formats for every input kind, and a named registry.

Comments start with ``#``.  Each parser raises :class:`ParseError` for
anything it cannot turn into a valid value, so callers can tell bad input
apart from failed computations.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .descent import DescentDatum
from .groups import GroupTable, from_permutations, from_table
from .nerve import ComponentNerve, build_nerve, validate
from .seqspace import SeqLCObject, format_seq, parse_seq
from .space import Cover, FiniteSpace


class ParseError(ValueError):
    pass


def _lines(text: str) -> list[str]:
    out = []
    for raw in text.splitlines():
        for part in raw.split("#", 1)[0].split(";"):
            if part.strip():
                out.append(part.strip())
    return out


def _header(lines: list[str], kind: str) -> tuple[str, str]:
    if not lines or not (lines[0] == kind or lines[0].startswith(kind + " ")):
        raise ParseError(f"expected a '{kind}' header")
    rest = lines[0][len(kind):].strip()
    name, _, on = rest.partition(" on ")
    return name.strip(), on.strip()


def _wrap(fn):
    def inner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ParseError:
            raise
        except (ValueError, KeyError, IndexError) as exc:
            raise ParseError(str(exc)) from exc
    inner.__name__, inner.__doc__ = fn.__name__, fn.__doc__
    return inner


# spaces and covers

@_wrap
def parse_space(text: str) -> FiniteSpace:
    lines = _lines(text)
    name = ""
    if lines and lines[0].split()[0] == "space":
        name, _ = _header(lines, "space")
        lines = lines[1:]
    points, pairs = None, []
    for line in lines:
        key, _, body = line.partition(":")
        if key.strip() == "points":
            points = body.split()
        elif key.strip() == "le":
            for tok in body.split():
                x, sep, y = tok.partition("<")
                if not sep or not x or not y:
                    raise ParseError(f"malformed relation {tok!r}")
                pairs.append((x, y))
        else:
            raise ParseError(f"unrecognised line {line!r}")
    if points is None:
        raise ParseError("missing 'points:' line")
    return FiniteSpace.from_relations(points, pairs, name)


def format_space(space: FiniteSpace) -> str:
    pos = space.order
    strict = sorted(((x, y) for x, y in space.leq if x != y), key=lambda p: (pos[p[0]], pos[p[1]]))
    lines = [f"space {space.name}".rstrip(), "points: " + " ".join(space.points)]
    if strict:
        lines.append("le: " + " ".join(f"{x}<{y}" for x, y in strict))
    return "\n".join(lines) + "\n"


@_wrap
def parse_cover(text: str, space: FiniteSpace) -> Cover:
    lines = _lines(text)
    name, _ = _header(lines, "cover")
    opens = {}
    for line in lines[1:]:
        idx, sep, body = line.partition(":")
        idx = idx.strip()
        if not sep or not idx:
            raise ParseError(f"malformed cover line {line!r}")
        if idx in opens:
            raise ParseError(f"duplicate cover index {idx!r}")
        unknown = [p for p in body.split() if p not in space]
        if unknown:
            raise ParseError(f"cover mentions unknown point(s) {' '.join(unknown)}")
        opens[idx] = body.split()
    return Cover.from_mapping(space, opens, name)


def format_cover(cover: Cover) -> str:
    head = f"cover {cover.name}".rstrip()
    if cover.space.name:
        head += f" on {cover.space.name}"
    lines = [head] + [f"{i}: " + " ".join(cover.space.sorted(u)) for i, u in cover.items()]
    return "\n".join(lines) + "\n"


# nerves

@_wrap
def parse_nerve(text: str) -> ComponentNerve:
    lines = _lines(text)
    name, _ = _header(lines, "nerve")
    objects, edges, triangles = None, [], []
    for line in lines[1:]:
        if line.startswith("objects:"):
            objects = line.split(":", 1)[1].split()
        elif line.startswith("edge "):
            eid, _, body = line[5:].partition(":")
            ends = body.split()
            if len(ends) != 2:
                raise ParseError(f"edge {eid.strip()} needs two endpoints")
            edges.append((eid.strip(), *ends))
        elif line.startswith("triangle "):
            tid, _, body = line[9:].partition(":")
            m = re.fullmatch(r"(\S+)\s+(\S+)\s+(\S+)\s+faces\s+(\S+)\s+(\S+)\s+(\S+)", body.strip())
            if not m:
                raise ParseError(f"malformed triangle line {line!r}")
            g = m.groups()
            triangles.append((tid.strip(), g[:3], g[3:]))
        else:
            raise ParseError(f"unrecognised line {line!r}")
    if objects is None:
        raise ParseError("missing 'objects:' line")
    nerve = build_nerve(objects, edges, triangles, name)
    problems = validate(nerve)
    if problems:
        raise ParseError("; ".join(problems))
    return nerve


def format_nerve(n: ComponentNerve) -> str:
    lines = [f"nerve {n.name}".rstrip(), "objects: " + " ".join(n.objects)]
    lines += [f"edge {e.id}: {e.src} {e.dst}" for e in n.edges]
    lines += [f"triangle {t.id}: {' '.join(t.objects)} faces {' '.join(t.faces)}" for t in n.triangles]
    return "\n".join(lines) + "\n"


# groups

@_wrap
def parse_group(text: str) -> GroupTable:
    lines = [ln for raw in text.splitlines() if (ln := raw.split("#", 1)[0].strip())]
    name, _ = _header(lines, "group")
    elements, rows, perm = None, [], None
    in_rows = False
    for line in lines[1:]:
        if line.startswith("elements:"):
            elements = line.split(":", 1)[1].split()
            in_rows = False
        elif line.startswith("mult:"):
            inline = line.split(":", 1)[1]
            rows += [r.split() for r in inline.split(";") if r.strip()]
            in_rows = True
        elif line.startswith("perm-group"):
            m = re.fullmatch(r"perm-group\s+on\s+(\d+)\s*:(.*)", line)
            if not m:
                raise ParseError(f"malformed perm-group line {line!r}")
            perm = (int(m.group(1)), m.group(2))
        elif in_rows:
            rows += [r.split() for r in line.split(";") if r.strip()]
        else:
            raise ParseError(f"unrecognised line {line!r}")
    if perm is not None:
        degree, body = perm
        gens = []
        for g in (s for s in re.split(r"[,;]", body) if s.strip()):
            if not re.fullmatch(r"(\s*\([\d\s]*\)\s*)+", g):
                raise ParseError(f"malformed generator {g.strip()!r}")
            cycles = [[int(v) for v in c.split()] for c in re.findall(r"\(([^)]*)\)", g)]
            if any(v >= degree for c in cycles for v in c):
                raise ParseError(f"generator {g.strip()} moves points outside 0..{degree - 1}")
            gens.append([c for c in cycles if len(c) > 1])
        return from_permutations(degree, gens, name)
    if elements is None:
        raise ParseError("missing 'elements:' line")
    return from_table(elements, rows, name)


def format_group(g: GroupTable) -> str:
    lines = [f"group {g.name}".rstrip(), "elements: " + " ".join(g.elements), "mult:"]
    lines += [" ".join(g.elements[x] for x in row) for row in g.mult]
    return "\n".join(lines) + "\n"


# descent data

@_wrap
def parse_datum(text: str, nerve: ComponentNerve) -> DescentDatum:
    lines = _lines(text)
    name, _ = _header(lines, "datum")
    fibers, trans = {}, {}
    for line in lines[1:]:
        if line.startswith("fiber "):
            o, _, body = line[6:].partition(":")
            fibers[o.strip()] = tuple(body.split())
        elif line.startswith("edge "):
            eid, _, body = line[5:].partition(":")
            lam = {}
            for tok in body.split():
                s, sep, t = tok.partition("->")
                if not sep:
                    raise ParseError(f"malformed assignment {tok!r}")
                if s in lam:
                    raise ParseError(f"edge {eid.strip()} assigns {s} twice")
                lam[s] = t
            trans[eid.strip()] = lam
        else:
            raise ParseError(f"unrecognised line {line!r}")
    extra = set(fibers) - set(nerve.objects)
    if extra:
        raise ParseError(f"fiber for unknown object(s) {' '.join(sorted(extra))}")
    extra = set(trans) - set(nerve.edge)
    if extra:
        raise ParseError(f"transition for unknown edge(s) {' '.join(sorted(extra))}")
    return DescentDatum(nerve, fibers, trans, name)


def format_datum(x: DescentDatum, on: str = "") -> str:
    head = f"datum {x.name}".rstrip()
    on = on or x.nerve.name
    if on:
        head += f" on {on}"
    lines = [head] + [f"fiber {o}: " + " ".join(map(str, x.fibers[o])) for o in x.nerve.objects]
    for e in x.nerve.edges:
        lam = x.transitions[e.id]
        lines.append(f"edge {e.id}: " + " ".join(f"{s}->{lam[s]}" for s in x.fibers[e.src]))
    return "\n".join(lines) + "\n"


@_wrap
def parse_seq_object(text: str) -> SeqLCObject:
    return parse_seq(text)


format_seq_object = format_seq


# registry

KINDS = ("space", "cover", "nerve", "datum", "group", "seq-object")


def corpus_path(name: str) -> Path:
    return Path(str(resources.files("cechdescent") / "corpus" / name))


def resolve(path: str) -> Path:
    """A path as given, or else a file of that name in the bundled corpus."""
    p = Path(path)
    if p.exists():
        return p
    q = corpus_path(path)
    if q.exists():
        return q
    raise ParseError(f"no such file: {path}")


def read(path: str) -> str:
    try:
        return resolve(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 text") from exc


def kind_of(text: str) -> str:
    for line in _lines(text):
        word = line.split()[0]
        if word in ("points:",):
            return "space"
        return word.rstrip(":")
    raise ParseError("empty input")


@dataclass
class Workspace:
    """Loaded inputs by kind and name; names are unique per kind."""
    items: dict[str, dict[str, object]] = field(default_factory=lambda: {k: {} for k in KINDS})

    def add(self, kind: str, name: str, value) -> None:
        if name in self.items[kind] and self.items[kind][name] != value:
            raise ParseError(f"duplicate {kind} name {name!r}")
        self.items[kind][name] = value

    def get(self, kind: str, name: str):
        try:
            return self.items[kind][name]
        except KeyError:
            raise ParseError(f"no {kind} named {name!r} is loaded") from None

    def load(self, path: str, *, space: FiniteSpace | None = None, nerve: ComponentNerve | None = None):
        text = read(path)
        kind = kind_of(text)
        if kind == "space":
            value = parse_space(text)
        elif kind == "cover":
            _, on = _header(_lines(text), "cover")
            value = parse_cover(text, space if space is not None else self.get("space", on))
        elif kind == "nerve":
            value = parse_nerve(text)
        elif kind == "datum":
            _, on = _header(_lines(text), "datum")
            value = parse_datum(text, nerve if nerve is not None else self.get("nerve", on))
        elif kind == "group":
            value = parse_group(text)
        elif kind == "seq-object":
            value = parse_seq_object(text)
        else:
            raise ParseError(f"{path}: unknown input kind {kind!r}")
        self.add(kind, getattr(value, "name", "") or Path(path).stem, value)
        return value
