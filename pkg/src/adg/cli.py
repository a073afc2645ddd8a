"""Command-line interface: ``adg <subcommand> [options]``.

Exit status: 0 success, 1 property violation, 2 usage error, 3 resource refusal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

from . import algorithms, covering, extremal, repro, spectral
from .equations import ParseError, builtin_system, parse_system
from .field import FieldError, field_from_order, parse_modulus
from .graph import ImplicitGraph, ResourceRefusal, parse_graph_spec

DEFAULT_SEED = 0x5EED
EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_REFUSED = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- graph selection ------------------------------------------------------------

def add_graph_args(p: argparse.ArgumentParser):
    p.add_argument("--family", choices=["D", "A", "d", "a"], help="builtin family")
    p.add_argument("--n", type=int, help="dimension n")
    p.add_argument("--q", type=int, help="field order (factored as p^e)")
    p.add_argument("--graph", metavar="FAMILY:n:q", help="shorthand for --family/--n/--q")
    p.add_argument("--system", metavar="FILE", help="equation file instead of a builtin family")
    p.add_argument("--modulus", help="comma-separated little-endian monic modulus coefficients, e.g. 1,1,0,1")


def add_common_args(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--mem-budget", help="memory budget in bytes (suffix K/M/G allowed); overrides ADG_MEM_BUDGET")


def graph_from_args(args) -> ImplicitGraph:
    family, n, q = args.family, args.n, args.q
    if args.graph:
        family, n, q = parse_graph_spec(args.graph)
    if q is None:
        raise UsageError("--q (or --graph FAMILY:n:q) is required")
    modulus = parse_modulus(args.modulus) if args.modulus else None
    field = field_from_order(q, modulus)
    if args.system:
        with open(args.system) as fh:
            system = parse_system(fh.read())
        if n is not None and n != system.n:
            raise UsageError(f"--n {n} disagrees with the {system.n}-dimensional system file")
        return ImplicitGraph(field, system, "custom")
    if family is None or n is None:
        raise UsageError("name a graph with --family/--n/--q, --graph FAMILY:n:q, or --system FILE")
    return ImplicitGraph(field, builtin_system(family, n), family.upper())


def header(g: ImplicitGraph) -> dict:
    return {"family": g.label, "n": g.n, "q": g.q}


# -- output ------------------------------------------------------------------------

def emit(payload: dict, fmt: str, rows: list | None = None, out=None):
    """Write ``payload`` as JSON, or ``rows`` (default: the payload itself) as CSV or text."""
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(payload, sort_keys=True) + "\n")
        return
    if fmt == "csv":
        table = rows if rows is not None else [payload]
        keys = list(dict.fromkeys(k for r in table for k in r))
        w = csv.DictWriter(out, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in table:
            w.writerow({k: _flat(v) for k, v in r.items()})
        return
    for k, v in payload.items():
        if rows is None or not isinstance(v, list):
            out.write(f"{k}: {_flat(v)}\n")
    for r in rows or []:
        out.write("  ".join(f"{k}={_flat(v)}" for k, v in r.items()) + "\n")


def _flat(v):
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    return v


# -- subcommands -----------------------------------------------------------------

def cmd_girth(args):
    g = graph_from_args(args)
    mode = args.mode or ("single_source" if args.assume_transitive else "full")
    r = algorithms.girth(g, cap=args.cap, mode=mode, assume_transitive=args.assume_transitive,
                         workers=args.workers)
    return _cycle_payload(g, r, mode=mode), EXIT_OK


def cmd_cycle(args):
    g = graph_from_args(args)
    cap = args.cap or algorithms.default_cap(g)
    r = algorithms.shortest_cycle_through(g, args.vertex, cap)
    return _cycle_payload(g, r, vertex=str(g.decode(args.vertex))), EXIT_OK


def _cycle_payload(g, r, **extra):
    out = {**header(g), **extra, "result": r.result(), "cap": r.cap, "scanned": r.scanned}
    if r.witness:
        out["witness"] = [str(g.decode(v)) for v in r.witness]
    return out


def cmd_components(args):
    g = graph_from_args(args)
    c = algorithms.components(g)
    return {**header(g), "result": c.count, "sizes": c.sizes, "scanned": g.order}, EXIT_OK


def cmd_shape(args):
    g = graph_from_args(args)
    ce = algorithms.lemma22_shape_check(g, args.max_j)
    out = {**header(g), "result": "ok" if ce is None else "counterexample", "scanned": g.order}
    if ce is not None:
        out["counterexample"] = {"distance": ce.j, "vertex": str(ce.vertex), "reason": ce.reason}
    return out, EXIT_OK if ce is None else EXIT_VIOLATION


def _build_map(args) -> covering.CoordinateMap:
    sf, sn, sq = parse_graph_spec(args.source)
    tf, tn, tq = parse_graph_spec(args.target)
    src, tgt = covering.GraphDescriptor(sf, sn, sq), covering.GraphDescriptor(tf, tn, tq)
    if args.map == "lemma21":
        if sf != "D" or sn % 2 == 0 or sn < 3:
            raise UsageError("lemma21 maps start at D(2k+1, q)")
        m = covering.lemma21_map((sn - 1) // 2, sq)
    elif args.map == "projection":
        if sf != tf:
            raise UsageError("projection maps stay inside one family")
        m = covering.projection_map(sf, sn, tn, sq)
    else:
        try:
            idx = tuple(int(t) for t in args.map.split(","))
        except ValueError:
            raise UsageError(f"--map must be lemma21, projection or comma-separated indices, got {args.map!r}")
        m = covering.CoordinateMap(src, tgt, idx)
    if (m.source, m.target) != (src, tgt):
        raise UsageError(f"--map {args.map} goes {m.source} -> {m.target}, not {src} -> {tgt}")
    return m


def cmd_cover(args):
    m = _build_map(args)
    policy, samples = args.policy, covering.DEFAULT_SAMPLES
    if policy.startswith("sampled"):
        policy, _, count = policy.partition(":")
        if count:
            samples = int(count)
    r = covering.verify_covering(m, policy, samples=samples, seed=args.seed)
    out = {"from": str(m.source), "to": str(m.target), "index_map": list(m.index_map),
           "policy": args.policy, "result": r.to_dict()["verdict"], "scanned": r.checked}
    if r.certificate:
        out["certificate"] = r.certificate
    return out, EXIT_OK if r.passed else EXIT_VIOLATION


def cmd_spectrum(args):
    g = graph_from_args(args)
    rep = spectral.lambda2(g, args.method, per_component=args.per_component, seed=args.seed)
    out = {**header(g), "result": rep.lambda2, "report": rep.to_dict(), "scanned": g.num_points}
    status = EXIT_OK if rep.converged else EXIT_VIOLATION
    if args.check_2sqrtq:
        ok = rep.lambda2 <= rep.bound + 1e-8
        out["check_2sqrtq"] = ok
        if not ok:
            status = EXIT_VIOLATION
    return out, status


def cmd_turan(args):
    b = extremal.turan_bounds(args.n, args.k)
    return {"n": b.n, "k": b.k, "epsilon": b.epsilon, "lower": b.lower, "upper": b.upper}, EXIT_OK


def cmd_report(args):
    g = graph_from_args(args)
    rows = [r.to_dict() for r in extremal.component_report(g, cap=args.cap)]
    return {**header(g), "result": rows, "scanned": g.order}, EXIT_OK, rows


def cmd_export(args):
    g = graph_from_args(args)
    edges = g.edges()
    if args.format in ("edgelist", "text"):
        buf = io.StringIO()
        for p, l in edges.tolist():
            buf.write(f"P{p} L{l}\n")
        sys.stdout.write(buf.getvalue())
        return None, EXIT_OK
    rows = [{"point": int(p), "line": int(l)} for p, l in edges.tolist()]
    return {**header(g), "result": [[r["point"], r["line"]] for r in rows], "scanned": g.order}, EXIT_OK, rows


def cmd_repro(args):
    only = [int(x) for x in args.only.split(",")] if args.only else None
    rows = [r.to_dict() for r in repro.repro_suite(only)]
    ok = all(r["passed"] for r in rows)
    if args.format == "text":
        for r in rows:
            sys.stdout.write(f"[{r['verdict']:>4}] {r['id']:>2} {r['name']}: {r['actual']} ({r['elapsed_s']:.1f}s)\n")
        sys.stdout.write(f"{sum(r['passed'] for r in rows)}/{len(rows)} rows pass\n")
        return None, EXIT_OK if ok else EXIT_VIOLATION
    return {"result": "pass" if ok else "fail", "rows": rows}, EXIT_OK if ok else EXIT_VIOLATION, rows


# -- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adg", description="Graphs defined by equations over finite fields.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help, graph=True):
        p = sub.add_parser(name, help=help)
        if graph:
            add_graph_args(p)
        add_common_args(p)
        p.set_defaults(fn=fn)
        return p

    p = add("girth", cmd_girth, "girth below a cap")
    p.add_argument("--cap", type=int, help="search cycles shorter than this (default 2n+8)")
    p.add_argument("--mode", choices=["full", "single_source"])
    p.add_argument("--assume-transitive", action="store_true",
                   help="assert point-transitivity; scan from (0) only")

    p = add("cycle-through-origin", cmd_cycle, "shortest cycle through a vertex, (0) by default")
    p.add_argument("--cap", type=int)
    p.add_argument("--vertex", type=int, default=0, help="vertex id (default 0, the zero point)")

    add("components", cmd_components, "connected components")

    p = add("shape-check", cmd_shape, "distance-layer shape check for A(n,q)")
    p.add_argument("--max-j", type=int)

    p = add("cover-check", cmd_cover, "verify a covering map", graph=False)
    p.add_argument("--from", dest="source", required=True, metavar="FAMILY:n:q")
    p.add_argument("--to", dest="target", required=True, metavar="FAMILY:n:q")
    p.add_argument("--map", default="lemma21", help="lemma21, projection, or comma-separated 1-based indices")
    p.add_argument("--policy", default="exhaustive", help="exhaustive or sampled[:N]")

    p = add("spectrum", cmd_spectrum, "two largest adjacency eigenvalues")
    p.add_argument("--method", choices=["auto", "dense", "iterative"], default="auto")
    p.add_argument("--per-component", action="store_true")
    p.add_argument("--check-2sqrtq", action="store_true")

    p = add("turan", cmd_turan, "evaluate the Turan-number bounds", graph=False)
    p.add_argument("--n", type=int, required=True, help="number of vertices")
    p.add_argument("--k", type=int, required=True)

    p = add("report", cmd_report, "per-component table against the lower bound")
    p.add_argument("--cap", type=int)

    p = add("export", cmd_export, "edge list")
    for a in p._actions:
        if a.dest == "format":
            a.choices = ["edgelist", "csv", "json", "text"]
            a.default = "edgelist"

    p = add("repro", cmd_repro, "run the reproduction matrix", graph=False)
    p.add_argument("--only", help="comma-separated row ids")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    saved = os.environ.get("ADG_MEM_BUDGET")
    if args.mem_budget:
        os.environ["ADG_MEM_BUDGET"] = args.mem_budget
    t0 = time.perf_counter()
    try:
        res = args.fn(args)
    except ResourceRefusal as exc:
        return _fail(args, EXIT_REFUSED, "resource refusal", exc)
    except (UsageError, ParseError, FieldError, ValueError, OSError) as exc:
        return _fail(args, EXIT_USAGE, "usage error", exc)
    finally:
        if args.mem_budget:
            if saved is None:
                os.environ.pop("ADG_MEM_BUDGET", None)
            else:
                os.environ["ADG_MEM_BUDGET"] = saved
    payload, status = res[0], res[1]
    rows = res[2] if len(res) > 2 else None
    if payload is not None:
        payload["elapsed_ms"] = round((time.perf_counter() - t0) * 1000, 1)
        emit(payload, args.format, rows)
    return status


def _fail(args, status, kind, exc) -> int:
    sys.stderr.write(f"adg {args.command}: {kind}: {exc}\n")
    if getattr(args, "format", None) == "json":
        sys.stdout.write(json.dumps({"error": kind, "message": str(exc), "exit": status}, sort_keys=True) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
