"""Command-line entry point: ``pathoperad <command> [options]``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter

from . import hatgen, joincalc, labelcalc, lift3, nervecat, trees
from .pathcore import PathOpError, complexity, compose, enumerate_canonical, parse, render

CACHE_ENV = "PATHOPERAD_CACHE"
EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def default_cache_dir() -> str:
    return os.environ.get(CACHE_ENV) or os.path.join(os.path.expanduser("~"), ".cache", "pathoperad")


def emit(report: dict, fmt: str) -> str:
    """Serialise a report; dot/csv need the report to carry that rendering."""
    if fmt == "json":
        body = {k: v for k, v in report.items() if k not in ("dot", "csv", "text")}
        return json.dumps(body, sort_keys=True) + "\n"
    if fmt in ("dot", "csv"):
        if fmt not in report:
            raise UsageError(f"format {fmt} is not available for this command")
        return report[fmt]
    if "text" in report:
        return report["text"].rstrip("\n") + "\n"
    lines = []
    for k in sorted(report):
        if k in ("dot", "csv"):
            continue
        v = report[k]
        lines.append(f"{k}: {v if isinstance(v, (str, int)) else json.dumps(v, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def _cuts(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    return tuple(int(p) for p in text.split(",") if p.strip())


def _table(args):
    return hatgen.cached_generate(args.cache_dir, args.m, args.budget)


def _member(args):
    if getattr(args, "oracle", False) or getattr(args, "budget", None) is None:
        return hatgen.HatOracle(args.m)
    return _table(args)


# ---------------------------------------------------------------- commands


def cmd_compose(args):
    x = parse(args.op)
    r = compose(x, [parse(w) for w in args.with_])
    return {"result": render(r), "text": render(r)}, EXIT_OK


def cmd_complexity(args):
    c = complexity(parse(args.op))
    return {"op": args.op, "complexity": c, "text": str(c)}, EXIT_OK


def cmd_graph(args):
    op = parse(args.op)
    g = labelcalc.underlying_graph(op, args.m)
    st = labelcalc.graph_structure(g)
    edges = [f"{u}>{v}" for u, v in g.sorted_edges()]
    return {
        "op": render(op), "m": args.m, "vertices": g.n, "edges": edges,
        "roots": sorted(st["roots"]), "leaves": sorted(st["leaves"]),
        "adjacent": [f"{u}>{v}" for u, v in sorted(st["adjacent"])],
        "dot": g.to_dot(), "text": ",".join(edges),
    }, EXIT_OK


def cmd_join(args):
    res = joincalc.join(parse(args.x), _cuts(args.i), parse(args.y), _cuts(args.j), args.m)
    return {"result": render(res.result), "text": render(res.result)}, EXIT_OK


def cmd_generate(args):
    table = _table(args)
    path = hatgen.cache_path(args.cache_dir, args.m, args.budget)
    rows = table.counts()
    return {"m": args.m, "budget": args.budget, "entries": len(table), "path": path,
            "csv": hatgen.counts_csv(rows)}, EXIT_OK


def cmd_contains(args):
    member = _member(args)
    ans = member.lookup(parse(args.op)) if hasattr(member, "lookup") else member.contains(parse(args.op))
    verdict = {True: "true", False: "false", None: "unknown"}[ans]
    out = {"op": args.op, "m": args.m, "member": verdict, "text": verdict}
    if ans and isinstance(member, hatgen.GenTable):
        out["witness"] = json.loads(json.dumps(member.witness(parse(args.op))))
    return out, EXIT_OK


def cmd_counts(args):
    rows = _table(args).counts()
    data = [{"k": k, "arities": list(a), "bars": b, "count": n} for k, a, b, n in rows]
    return {"m": args.m, "budget": args.budget, "rows": data, "csv": hatgen.counts_csv(rows)}, EXIT_OK


def cmd_labellings(args):
    g = labelcalc.parse_edges(args.edges, args.n)
    objs = nervecat.proper_labellings(g)
    p = nervecat.LabelPoset.of(objs)
    if args.count:
        return {"count": len(objs), "text": str(len(objs))}, EXIT_OK
    return {"objects": objs, "relations": [f"{a}<{b}" for a, b in p.relations()],
            "dot": p.to_dot(), "text": "\n".join(objs)}, EXIT_OK


def cmd_homology(args):
    g = labelcalc.parse_edges(args.edges, args.n)
    verdict = nervecat.contractibility_verdict(g)
    out = {"graph": [f"{u}>{v}" for u, v in g.sorted_edges()], "vertices": g.n, "verdict": verdict}
    if verdict != "has_cycle":
        p = nervecat.poset(g)
        h = nervecat.homology(nervecat.order_complex(p))
        out.update(objects=len(p.objects), betti=h.betti, torsion=h.torsion)
    return out, EXIT_OK


def cmd_check_axioms(args):
    report = joincalc.AxiomReport()
    formulas = {}
    for m in args.m:
        corpus = [op for op in enumerate_canonical(args.unit_tokens) if op.bars >= 1]
        report.extend(joincalc.check_units(m, corpus))
        inst = joincalc.sample_assoc(m, args.count, args.seed)
        report.extend(joincalc.check_associativity(m, inst))
        report.extend(joincalc.check_interchange(m, joincalc.sample_interchange(m, args.count, args.seed)))
        if args.formulas:
            formulas[str(m)] = joincalc.formula_comparison(m, inst)
    out = {"summary": report.summary(), "failures": [r.to_json() for r in report.failures],
           "text": "\n".join(report.to_lines())}
    if args.formulas:
        out["formulas"] = formulas
    return out, EXIT_OK if report.ok else EXIT_COUNTEREXAMPLE


def cmd_lift(args):
    lop = labelcalc.parse_labelled(args.op)
    member = hatgen.HatOracle(args.m)
    res = lift3.lift(lop, args.m, member)
    unique = lift3.verify_unique(lop, args.m, member) if args.verify else None
    out = res.to_json(lop, unique)
    out["text"] = str(res.lifted)
    bad = res.maximal is False or unique is False
    return out, EXIT_COUNTEREXAMPLE if bad else EXIT_OK


def _suite_closure(args):
    rows, bad = {}, 0
    for m in args.m:
        t = hatgen.cached_generate(args.cache_dir, m, args.budget)
        over = [op for op in t.ops() if complexity(op) > m]
        rows[str(m)] = {"entries": len(t), "above_m": len(over)}
        bad += len(over)
    return rows, bad


def _suite_nerve(args):
    verdicts, bad = Counter(), 0
    for n in range(args.max_vertices + 1):
        for g in nervecat.dag_enumerate(n):
            v = nervecat.contractibility_verdict(g)
            verdicts[v] += 1
            if v == "inconclusive":
                bad += 1
            if n and not nervecat.decompose_at_vertex(g, nervecat.source_vertex(g)).ok:
                bad += 1
    return dict(sorted(verdicts.items())), bad


def _suite_circ(args):
    member = hatgen.HatOracle(2)
    agree = Counter()
    for op in enumerate_canonical(args.max_tokens):
        if not member.contains(op):
            continue
        t = trees.op_to_tree(op)
        for lop in labelcalc.all_labellings(op, "C"):
            if not labelcalc.in_plus(lop, 2, member):
                continue
            c = labelcalc.in_circ(lop, 2, member)
            agree["leaf_paths", c == trees.one_c_per_leaf_path(t, lop.src)] += 1
            agree["leaf_and_nullary_paths", c == trees.bimodule_shape(t, lop.src)] += 1
    out = {f"{name}/{'agree' if ok else 'disagree'}": n for (name, ok), n in sorted(agree.items())}
    return out, out.get("leaf_paths/disagree", 0)


def _suite_lift(args):
    tally, bad = Counter(), 0
    for m in args.m:
        if m > lift3.MAX_M:
            continue
        member = hatgen.HatOracle(m)
        for op in enumerate_canonical(args.max_tokens):
            if not member.contains(op):
                continue
            for lop in labelcalc.all_labellings(op):
                if not labelcalc.in_plus(lop, m, member):
                    continue
                ok = lift3.verify_unique(lop, m, member, args.max_tokens)
                tally[f"m={m}/{'unique' if ok else 'not_unique'}"] += 1
                bad += not ok
    return dict(sorted(tally.items())), bad


SUITES = {"closure": _suite_closure, "nerve": _suite_nerve, "circ": _suite_circ, "lift": _suite_lift}


def cmd_verify(args):
    out, bad = {}, 0
    for name in args.suite or sorted(SUITES):
        rows, b = SUITES[name](args)
        out[name] = {"rows": rows, "counterexamples": b}
        bad += b
    return out, EXIT_COUNTEREXAMPLE if bad else EXIT_OK


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pathoperad", description="Lattice path operations, joins and labellings.")
    p.add_argument("--format", choices=("json", "text", "dot", "csv"), default="json")
    p.add_argument("--cache-dir", default=None, help=f"table cache (default ${CACHE_ENV} or ~/.cache)")
    p.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("compose", cmd_compose)
    sp.add_argument("--op", required=True)
    sp.add_argument("--with", dest="with_", action="append", default=[])

    sp = add("complexity", cmd_complexity)
    sp.add_argument("--op", required=True)

    sp = add("graph", cmd_graph)
    sp.add_argument("--op", required=True)
    sp.add_argument("--m", type=int, required=True)

    sp = add("join", cmd_join)
    for name in ("x", "y"):
        sp.add_argument(f"--{name}", required=True)
    sp.add_argument("--i", default="")
    sp.add_argument("--j", default="")
    sp.add_argument("--m", type=int, required=True)

    for name, fn in (("generate", cmd_generate), ("counts", cmd_counts)):
        sp = add(name, fn)
        sp.add_argument("--m", type=int, required=True)
        sp.add_argument("--budget", type=int, default=8)

    sp = add("contains", cmd_contains)
    sp.add_argument("--op", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--budget", type=int, default=None)
    sp.add_argument("--oracle", action="store_true", help="goal-directed search, no budget")

    for name, fn in (("labellings", cmd_labellings), ("homology", cmd_homology)):
        sp = add(name, fn)
        sp.add_argument("--edges", default="")
        sp.add_argument("--n", type=int, default=None, help="vertex count (isolated vertices)")
        if name == "labellings":
            sp.add_argument("--count", action="store_true")

    sp = add("check-axioms", cmd_check_axioms)
    sp.add_argument("--m", type=int, nargs="+", default=[1, 2, 3, 4])
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--unit-tokens", type=int, default=6)
    sp.add_argument("--formulas", action="store_true", help="also compare the closed reindexing formulas")

    sp = add("lift", cmd_lift)
    sp.add_argument("--op", required=True, help='labelled operation, e.g. "1|1 :: (A) -> C"')
    sp.add_argument("--m", type=int, default=3)
    sp.add_argument("--verify", action="store_true")

    sp = add("verify", cmd_verify)
    sp.add_argument("--suite", action="append", choices=sorted(SUITES))
    sp.add_argument("--m", type=int, nargs="+", default=[1, 2, 3])
    sp.add_argument("--budget", type=int, default=8)
    sp.add_argument("--max-tokens", type=int, default=6)
    sp.add_argument("--max-vertices", type=int, default=4)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "fn", None):
            raise UsageError("a command is required")
        args.cache_dir = args.cache_dir or default_cache_dir()
        report, status = args.fn(args)
        out.write(emit(report, args.format))
        return status
    except (UsageError, PathOpError, labelcalc.LabelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (nervecat.CapError, hatgen.BudgetError, lift3.LiftError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
