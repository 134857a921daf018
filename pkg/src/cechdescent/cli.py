"""Batch command line: ``cechdescent <command> [options]``.

Input files are looked up as given, then in the bundled corpus.  Machine
output is one ``key=value`` per line in a fixed order; exit status is 0 on
success, 1 when a computation fails or reports a domain error, 2 on bad
input.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Callable

from . import descent, groupoid, io, nerve, seqspace, space, torsor
from .groups import GroupError

Report = list[tuple[str, object]]


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def emit(report: Report, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "machine":
        for k, v in report:
            print(f"{k}={_fmt(v)}", file=out)
        return
    width = max((len(k) for k, _ in report), default=0)
    for k, v in report:
        print(f"{k.replace('_', ' '):<{width}}  {_fmt(v)}", file=out)


# input resolution

def _space_cover(ws: io.Workspace, args, cover_arg: str = "cover"):
    if not args.space:
        raise io.ParseError("--space is required")
    sp = ws.load(args.space)
    which = getattr(args, cover_arg)
    return sp, _cover(ws, sp, which)


def _cover(ws: io.Workspace, sp: space.FiniteSpace, which: str | None) -> space.Cover:
    if which is None:
        raise io.ParseError("a cover is required")
    if which == "minimal":
        return space.minimal_cover(sp)
    if which == "whole":
        return space.whole_cover(sp)
    return ws.load(which, space=sp)


def _nerve(ws: io.Workspace, args) -> nerve.ComponentNerve:
    if getattr(args, "nerve", None):
        return ws.load(args.nerve)
    sp, cv = _space_cover(ws, args)
    return nerve.component_nerve(sp, cv)


def _datum(ws: io.Workspace, args, path: str | None = None, n=None) -> descent.DescentDatum:
    path = path or args.datum
    if not path:
        raise io.ParseError("--datum is required")
    return ws.load(path, nerve=n if n is not None else _nerve(ws, args))


def _group(ws: io.Workspace, args):
    if not args.group:
        raise io.ParseError("--group is required")
    return ws.load(args.group)


# commands

def cmd_nerve(ws, args) -> Report:
    n = _nerve(ws, args)
    problems = nerve.validate(n)
    rep = [("objects", len(n.objects)), ("edges", len(n.edges)), ("triangles", len(n.triangles)),
           ("plain", n.is_plain()), ("valid", not problems)]
    rep += [("edge", f"{e.id}:{e.src}->{e.dst}") for e in n.edges]
    rep += [("triangle", f"{t.id}:{'/'.join(t.faces)}") for t in n.triangles]
    rep += [("problem", p) for p in problems]
    return rep


def cmd_groupoid(ws, args) -> Report:
    g = groupoid.free_groupoid(_nerve(ws, args))
    rep = [("objects", len(g.objects)), ("generators", len(g.generators)),
           ("relations", len(g.relations))]
    rep += [("relation", f"{r.rhs}={r.lhs[1]}o{r.lhs[0]}") for r in g.relations]
    return rep


def cmd_pi1(ws, args) -> Report:
    g = groupoid.free_groupoid(_nerve(ws, args))
    base = args.base or g.objects[0]
    p = groupoid.pi1(g, base)
    rep = [("base", base), ("generators", len(p.generators)), ("relators", len(p.relators))]
    rep += [("generator", x) for x in p.generators]
    rep += [("relator", groupoid.format_word(r)) for r in p.relators]
    return rep


def cmd_orbits(ws, args) -> Report:
    x = _datum(ws, args)
    parts = descent.orbits(x)
    return [("orbits", len(parts))] + [
        ("orbit", " ".join(f"{o}:{s}" for o, s in b)) for b in parts.blocks]


def cmd_atoms(ws, args) -> Report:
    x = _datum(ws, args)
    parts, iso = descent.atoms(x)
    return [("atoms", len(parts)), ("sizes", [p.size() for p in parts]),
            ("connected", all(descent.is_connected(p) for p in parts)),
            ("reassembles", descent.is_morphism(iso.source, iso.target, iso.maps) and iso.is_iso())]


def cmd_pi0(ws, args) -> Report:
    x = _datum(ws, args)
    p = descent.pi0(x, limit=args.limit)
    return [("classes", len(p.classes)), ("certificate", p.certificate),
            ("functions_checked", p.functions_checked)]


def cmd_check(ws, args) -> Report:
    x = _datum(ws, args)
    bad = descent.check_cocycle(x)
    rep = [("cocycle", not bad), ("violations", len(bad))] + [("violation", str(v)) for v in bad]
    if bad:
        raise _Fail(rep)
    return rep


def cmd_cp_test(ws, args) -> Report:
    if args.nerve:
        x = _datum(ws, args)
        site = descent.NerveSite(x.nerve)
    else:
        sp, cv = _space_cover(ws, args)
        x = _datum(ws, args, n=nerve.component_nerve(sp, cv))
        site = descent.SpaceSite(sp, cv)
    res = descent.is_covering_projection(x, site)
    rep = [("covering_projection", res.ok)]
    for pair, left in res.residue.items():
        rep.append(("residue", f"{pair[0]}-{pair[1]}:" + " ".join(sorted(map(str, left)))))
    return rep


def cmd_homs(ws, args) -> Report:
    n = _nerve(ws, args)
    x = _datum(ws, args, n=n)
    y = _datum(ws, args, path=args.target or args.datum, n=n)
    ms = descent.homs(x, y, limit=args.limit)
    return [("homs", len(ms)), ("isos", sum(m.is_iso() for m in ms))]


def cmd_glue(ws, args) -> Report:
    sp, cv = _space_cover(ws, args)
    x = _datum(ws, args, n=nerve.component_nerve(sp, cv))
    em = space.glue_etale(sp, cv, x)
    fib = sorted({len(em.fiber(b)) for b in sp.points})
    return [("total_points", len(em.total.points)),
            ("components", len(space.components(em.total, em.total.whole))),
            ("fiber_sizes", fib), ("local_homeomorphism", space.is_local_homeomorphism(em))]


def cmd_trivialize(ws, args) -> Report:
    sp, cv = _space_cover(ws, args)
    x = _datum(ws, args, n=nerve.component_nerve(sp, cv))
    em = space.glue_etale(sp, cv, x)
    target = _cover(ws, sp, args.cover2) if args.cover2 else cv
    t = space.verify_trivialization(em, target)
    rep = [("trivialized", t.ok)]
    if t.ok and target is cv:
        rep.append(("round_trip", descent.are_isomorphic(t.datum, x)))
    rep += [("failure", f) for f in t.failures]
    if not t.ok:
        raise _Fail(rep)
    return rep


def cmd_refine(ws, args) -> Report:
    sp, u = _space_cover(ws, args)
    v = _cover(ws, sp, args.cover2)
    r = space.find_refinement(sp, u, v)
    if r is None:
        raise _Fail([("refines", False)])
    return [("refines", True)] + [("alpha", f"{i}->{r.alpha[i]}") for i in u.index]


def cmd_sieve(ws, args) -> Report:
    sp, cv = _space_cover(ws, args)
    s = space.sieve_of_cover(sp, cv)
    return [("members", s.generators), ("covering", space.is_covering_sieve(sp, s))]


def cmd_pro_eval(ws, args) -> Report:
    if not args.space:
        raise io.ParseError("--space is required")
    sp = ws.load(args.space)
    chain = [_cover(ws, sp, c) for c in args.chain]
    K = _group(ws, args)
    res = descent.prosystem_eval(sp, chain, K)
    return [("stages", len(chain)), ("counts", list(res.counts)), ("colimit", res.colimit)]


def cmd_h1(ws, args) -> Report:
    n, K = _nerve(ws, args), _group(ws, args)
    classes = torsor.h1(n, K, limit=args.limit)
    rep: Report = [("classes", len(classes))]
    for c in classes:
        vals = " ".join(f"{e}:{K.elements[k]}" for e, k in c.representative.values.items())
        rep.append(("class", f"size {c.size} rep {vals}".rstrip()))
    return rep


def cmd_compare_counts(ws, args) -> Report:
    n, K = _nerve(ws, args), _group(ws, args)
    c = torsor.compare_counts(n, K, limit=args.limit)
    rep = [("hom", c.hom), ("h1", c.h1), ("torsor", c.torsor), ("equal", c.equal)]
    if not c.equal:
        raise _Fail(rep)
    return rep


def cmd_seq_check(ws, args) -> Report:
    if not args.object:
        raise io.ParseError("--object is required")
    x = ws.load(args.object)
    lc = seqspace.check_locally_constant(x)
    rep: Report = [("locally_constant", lc.locally_constant)]
    if lc.locally_constant:
        rep += [("covering_projection", seqspace.is_cp(x)), ("bound", lc.bound)]
    else:
        rep += [("failing_elements", list(lc.failing))]
    return rep


def cmd_torsor_from_cocycle(ws, args) -> Report:
    n, K = _nerve(ws, args), _group(ws, args)
    if args.values is None:
        raise io.ParseError("--values is required")
    values = {}
    for tok in args.values.split(","):
        e, sep, k = tok.partition("=")
        if not sep:
            raise io.ParseError(f"malformed value {tok!r}; expected edge=element")
        values[e.strip()] = K.index(k.strip())
    missing = [e.id for e in n.edges if e.id not in values]
    if missing:
        raise io.ParseError(f"no value for edge(s) {' '.join(missing)}")
    t = torsor.torsor_datum(n, K, torsor.Cocycle(n, K, values))
    return [("fibers", len(K)), ("orbits", len(descent.orbits(t.datum))),
            ("torsor", torsor.is_torsor(t.datum, K, t.action))]


def cmd_pullback(ws, args) -> Report:
    sp, u = _space_cover(ws, args)
    v = _cover(ws, sp, args.cover2)
    r = space.find_refinement(sp, u, v)
    if r is None:
        raise _Fail([("refines", False)])
    y = _datum(ws, args, n=nerve.component_nerve(sp, v))
    x = replace(descent.pullback(nerve.nerve_map(sp, r), y), name=f"{y.name}-pulled".lstrip("-"))
    return [("datum", line) for line in io.format_datum(x).splitlines()]


class _Fail(Exception):
    """A completed computation whose verdict is negative."""

    def __init__(self, report: Report):
        super().__init__()
        self.report = report


COMMANDS: dict[str, Callable] = {
    "nerve": cmd_nerve, "groupoid": cmd_groupoid, "pi1": cmd_pi1, "orbits": cmd_orbits,
    "atoms": cmd_atoms, "pi0": cmd_pi0, "check": cmd_check, "cp-test": cmd_cp_test,
    "homs": cmd_homs, "glue": cmd_glue, "trivialize": cmd_trivialize, "refine": cmd_refine,
    "sieve": cmd_sieve, "pro-eval": cmd_pro_eval, "h1": cmd_h1,
    "compare-counts": cmd_compare_counts, "seq-check": cmd_seq_check,
    "torsor-from-cocycle": cmd_torsor_from_cocycle, "pullback": cmd_pullback,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cechdescent", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--format", choices=("machine", "human"), default="human")
        p.add_argument("--limit", type=int, default=None, help="enumeration guard override")
        p.add_argument("--space")
        p.add_argument("--nerve")
        p.add_argument("--datum")
        p.add_argument("--group")
        if name == "pro-eval":
            p.add_argument("--cover", dest="chain", action="append", default=[],
                           help="stages, coarse to fine; 'minimal' and 'whole' are built in")
        else:
            p.add_argument("--cover")
        p.add_argument("--cover2", help="second cover (refine, trivialize, pullback)")
        p.add_argument("--target", help="target datum for homs")
        p.add_argument("--base")
        p.add_argument("--object")
        p.add_argument("--values", help="cocycle values edge=element,...")
    return ap


_LIMIT_DEFAULTS = {"pi0": descent.DEFAULT_CERTIFICATE_LIMIT, "homs": descent.DEFAULT_HOM_LIMIT,
                   "h1": torsor.DEFAULT_COCYCLE_LIMIT, "compare-counts": torsor.DEFAULT_COCYCLE_LIMIT}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.limit is None:
        args.limit = _LIMIT_DEFAULTS.get(args.command)
    ws = io.Workspace()
    try:
        report = COMMANDS[args.command](ws, args)
    except io.ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _Fail as fail:
        emit(fail.report, args.format)
        return 1
    except (ValueError, GroupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    emit(report, args.format)
    return 0


if __name__ == "__main__":
    sys.exit(main())
