"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in the
"acceptance criteria" section at the end of the session.
"""

import io
import json
import random
import time
from collections import Counter

from pathoperad import cli
from pathoperad.hatgen import cache_path, cached_generate, counts, generate, load_table, save_table
from pathoperad.joincalc import (
    EVEN, ODD, check_associativity, check_interchange, check_units, formula_comparison,
    join, random_op, reindex_oracle, sample_assoc, sample_interchange,
)
from pathoperad.labelcalc import all_labellings, in_circ, in_plus, parse_edges, underlying_graph
from pathoperad.lift3 import erase_colours, lift, lift_identity, verify_unique
from pathoperad.nervecat import (
    connected, dag_enumerate, decompose_at_vertex, has_cycle, homology, leq, lifting_graph,
    order_complex, poset, proper_labellings, source_vertex,
)
from pathoperad.pathcore import (
    BAR, PathOp, closure_sweep, complexity, complexity_tokens, compose, enumerate_canonical,
    identity, parse, permute, render,
)
from pathoperad.trees import bimodule_shape, enumerate_trees, one_c_per_leaf_path, op_to_tree, tree_counts, tree_to_op


def best_of(fn, repeats=5):
    """(result, fastest wall time) over a few repeats."""
    best, out = None, None
    for _ in range(repeats):
        t = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t
        best = dt if best is None else min(best, dt)
    return out, best


class Clock:
    def __enter__(self):
        self.t = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.dt = time.perf_counter() - self.t


def test_1_composition_fidelity(record):
    x = parse("1|12|21")
    ys = [parse("213|13|23"), parse("122|211")]
    got, dt = best_of(lambda: compose(x, ys))
    ok = got == parse("213|13455|54423") and dt < 1e-3
    record(1, ok, f"{render(got)} in {dt * 1e3:.3f} ms")
    assert got == parse("213|13455|54423")
    assert dt < 1e-3


def test_2_join_fidelity(record):
    x, y = parse("1|1212|2|2"), parse("1|12|2|2|21")
    got, dt = best_of(lambda: join(x, (2,), y, (3,), 3).result)
    want = parse("1|12123|34|42|24|43")
    record(2, got == want and dt < 1e-3, f"{render(got)} in {dt * 1e3:.3f} ms")
    assert got == want
    assert dt < 1e-3


def test_3_complexity_and_graphs(record):
    def run():
        return (
            complexity(parse("1|1|1|323")),
            [complexity(identity(n)) for n in range(8)],
            underlying_graph(parse("12321434"), 3).sorted_edges(),
        )

    (c, ids, edges), dt = best_of(run)
    ok = c == 2 and set(ids) == {0} and edges == [(1, 3), (2, 3), (3, 4)]
    record(3, ok and dt < 1e-3, f"c=2? {c == 2}, edges {edges}, {dt * 1e3:.3f} ms")
    assert c == 2
    assert set(ids) == {0}
    assert edges == [(1, 3), (2, 3), (3, 4)]
    assert dt < 1e-3


# ---------------------------------------------------------------- operad laws


def _inputs_for(rng, op, extra=2):
    return [random_op(rng, a + rng.randint(0, extra), a, max_colours=3) for a in op.arities()]


def _blocks(ys):
    off, out = 0, []
    for y in ys:
        out.append(off)
        off += y.k
    return out


def _law_instances(count, seed, limit=12):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        x = random_op(rng, rng.randint(1, 5), max_colours=3)
        if x.k == 0:
            continue
        ys = _inputs_for(rng, x, 1)
        xy = compose(x, ys)
        zs = _inputs_for(rng, xy, 1)
        if max(len(x), len(xy), len(compose(xy, zs))) > limit or any(len(v) > limit for v in ys + zs):
            continue
        out.append((x, ys, zs, rng.random()))
    return out


def test_4_operad_laws(record):
    with Clock() as clk:
        bad = Counter()
        for x, ys, zs, u in _law_instances(200, seed=4):
            # associativity: zs are grouped by the y each colour came from
            grouped, off = [], 0
            for y in ys:
                grouped.append(zs[off:off + y.k])
                off += y.k
            inner = [compose(y, g) for y, g in zip(ys, grouped)]
            bad["assoc"] += compose(compose(x, ys), zs) != compose(x, inner)
            # units on both sides
            bad["left_unit"] += compose(identity(x.bars), [x]) != x
            bad["right_unit"] += compose(x, [identity(a) for a in x.arities()]) != x
            # equivariance in the outer op
            rng = random.Random(u)
            sigma = list(range(1, x.k + 1))
            rng.shuffle(sigma)
            moved = [None] * x.k
            for c, y in enumerate(ys, 1):
                moved[sigma[c - 1] - 1] = y
            old, new = _blocks(ys), _blocks(moved)
            tau = [0] * sum(y.k for y in ys)
            for c, y in enumerate(ys, 1):
                for t in range(1, y.k + 1):
                    tau[old[c - 1] + t - 1] = new[sigma[c - 1] - 1] + t
            bad["equivariance"] += compose(permute(x, sigma), moved) != permute(compose(x, ys), tau)
            # equivariance in the inputs
            rhos, flat = [], []
            for y, o in zip(ys, old):
                rho = list(range(1, y.k + 1))
                rng.shuffle(rho)
                rhos.append(permute(y, rho))
                flat.extend(o + r for r in rho)
            bad["input_equivariance"] += compose(x, rhos) != permute(compose(x, ys), flat)
    n = sum(bad.values())
    record(4, n == 0 and clk.dt < 10, f"200 instances, failures {dict(bad)}, {clk.dt:.2f} s")
    assert n == 0
    assert clk.dt < 10


def test_5_filtration_closure(record):
    with Clock() as clk:
        checked, bad = closure_sweep(3, 10)
        # the sweep composes on raw tokens; spot-check it against compose()
        rng = random.Random(5)
        ops = [o for o in enumerate_canonical(6) if complexity(o) <= 3]
        spot = 0
        while spot < 300:
            x, y = rng.choice(ops), rng.choice(ops)
            cs = [c for c, a in enumerate(x.arities(), 1) if a == y.bars]
            if not cs:
                continue
            c = rng.choice(cs)
            ys = [identity(a) for a in x.arities()]
            ys[c - 1] = y
            z = compose(x, ys)
            assert complexity(z) <= max(complexity(x), complexity(y))
            spot += 1
    record(5, not bad and clk.dt < 60,
           f"pairs checked per m {checked}, counterexamples {len(bad)}, {clk.dt:.1f} s")
    assert bad == []
    assert clk.dt < 60


def test_6_hat_inside_filtration(record, tables):
    with Clock() as clk:
        exceptions = {}
        sizes = {}
        for m in (1, 2, 3):
            t = tables(m)
            sizes[m] = len(t)
            exceptions[m] = [str(op) for op in t.ops() if complexity(op) > m]
    n = sum(map(len, exceptions.values()))
    record(6, n == 0 and clk.dt < 120, f"orbits {sizes}, exceptions {n}, {clk.dt:.1f} s")
    assert n == 0
    assert clk.dt < 120


def test_7_tree_correspondence(record):
    with Clock() as clk:
        hat = generate(2, 8).ops()
        low = [o for o in enumerate_canonical(8) if complexity(o) <= 2]
        inverse = all(tree_to_op(op_to_tree(o)) == o for o in hat + low)
        trees = list(enumerate_trees(8))
        white = list(enumerate_trees(8, white_only=True))
        inverse = inverse and all(op_to_tree(tree_to_op(t)) == t for t in trees)
        match_hat = counts(hat) == tree_counts(white)
        match_low = counts(low) == tree_counts(trees)
    ok = inverse and match_hat and match_low
    record(7, ok and clk.dt < 60,
           f"H2 {len(hat)} vs {len(white)} white trees, L2 {len(low)} vs {len(trees)} trees, {clk.dt:.1f} s")
    assert inverse and match_hat and match_low
    assert clk.dt < 60


def test_8_complexity_m_axioms(record, tables):
    with Clock() as clk:
        summary = {}
        bad = 0
        for m in (1, 2, 3, 4):
            rep = check_units(m, tables(m).ops())
            rep.extend(check_associativity(m, sample_assoc(m, 100, seed=80 + m)))
            rep.extend(check_interchange(m, sample_interchange(m, 100, seed=90 + m)))
            summary.update(rep.summary())
            bad += len(rep.failures)
    record(8, bad == 0 and clk.dt < 60, f"{len(summary)} diagram groups, counterexamples {bad}, {clk.dt:.1f} s")
    assert bad == 0, summary
    assert clk.dt < 60


def test_9_reindexing_report(record):
    with Clock() as clk:
        reports, bad = [], 0
        for m in (1, 2, 3, 4):
            inst = sample_assoc(m, 100, seed=80 + m)
            bad += len(check_associativity(m, inst).failures)
            for s in inst:
                ip = reindex_oracle(s.x, s.i, s.y, s.j_odd, ODD, s.j, m)
                kp = reindex_oracle(s.y, s.j, s.z, s.k, EVEN, s.j_odd, m)
                xy = join(s.x, s.i, s.y, s.j_odd, m).result
                yz = join(s.y, s.j, s.z, s.k, m).result
                for tup, top in ((ip, xy.bars), (kp, yz.bars)):
                    bad += not all(1 <= v <= top for v in tup)
                    bad += any(a >= b for a, b in zip(tup, tup[1:]))
            reports.append(formula_comparison(m, inst))
    text = json.dumps(reports, sort_keys=True)
    print(text[:2000])
    agree = {r["m"]: (r["i_prime_agree"], r["k_prime_agree"]) for r in reports}
    record(9, bad == 0 and clk.dt < 10, f"oracle failures {bad}; formula agreement (i', k') per m {agree}")
    assert bad == 0
    assert clk.dt < 10


STAR_OBJECTS = sorted({f"{a}A{b}" for a in "ABC" for b in "ABC"} | {"BBB", "BCB"})


def test_10_star_category(record):
    g = parse_edges("2>1,2>3", 3)

    def run():
        objs = proper_labellings(g)
        p = poset(g)
        return objs, p, [leq(a, b) for a, b in (("BAB", "CAC"), ("AAA", "CAA"), ("BBB", "BCB"))]

    (objs, p, arrows), dt = best_of(run)
    ok = sorted(objs) == STAR_OBJECTS and all(arrows) and p.is_partial_order()
    record(10, ok and dt < 1e-3, f"{len(objs)} objects, arrows {arrows}, {dt * 1e3:.3f} ms")
    assert sorted(objs) == STAR_OBJECTS
    assert all(arrows)
    assert dt < 1e-3


def test_11_nerves_of_small_dags(record):
    with Clock() as clk:
        per_n, bad = {}, []
        for n in range(1, 5):
            graphs = dag_enumerate(n)
            per_n[n] = len(graphs)
            for g in graphs:
                c = order_complex(poset(g))
                if not (connected(c) and homology(c).acyclic):
                    bad.append(("homology", g.sorted_edges()))
                if not decompose_at_vertex(g, source_vertex(g)).ok:
                    bad.append(("decompose", g.sorted_edges()))
    ok = not bad and per_n == {1: 1, 2: 2, 3: 6, 4: 31}
    record(11, ok and clk.dt < 300, f"DAG classes {per_n}, failures {len(bad)}, {clk.dt:.2f} s")
    assert per_n == {1: 1, 2: 2, 3: 6, 4: 31}
    assert bad == []
    assert clk.dt < 300


def test_12_lifting_graphs(record, tables):
    ops = tables(3).ops()
    with Clock() as clk:
        rng = random.Random(12)
        cyclic = 0
        for _ in range(100):
            tup = [rng.choice(ops) for _ in range(rng.randint(1, 4))]
            g = lifting_graph(tup, 3)
            cyclic += has_cycle(g)
            assert g.n == sum(o.k for o in tup)
    record(12, cyclic == 0 and clk.dt < 5, f"100 tuples, cyclic {cyclic}, {clk.dt:.2f} s")
    assert cyclic == 0
    assert clk.dt < 5


def test_13_lift_fidelity(record, oracle):
    member = oracle(3)
    with Clock() as clk:
        a = lift_identity(3, "A", 3, member).lifted.op
        b = lift_identity(3, "B", 3, member).lifted.op
        strings = a == parse("12|213|314|41432") and b == parse("23414|413|312|21")
        tally, erase_bad, first_bad = Counter(), 0, None
        for op in enumerate_canonical(8):
            if complexity_tokens(op.tokens, 3) > 3 or not member.contains(op):
                continue
            for lop in all_labellings(op):
                if not in_plus(lop, 3, member):
                    continue
                res = lift(lop, 3, member, check=False)
                erase_bad += erase_colours(res.lifted.op, res.inserted_colours, 3) != lop.op
                ok = verify_unique(lop, 3, member)
                tally[ok] += 1
                if not ok and first_bad is None:
                    first_bad = f"{lop} lifts to {res.lifted}"
    ok = strings and erase_bad == 0 and tally[False] == 0 and clk.dt < 300
    record(13, ok, f"strings {strings}, erase failures {erase_bad}, unique {tally[True]}, "
                   f"not unique {tally[False]} (e.g. {first_bad}), {clk.dt:.1f} s")
    assert strings
    assert erase_bad == 0
    assert clk.dt < 300
    assert tally[False] == 0, first_bad


def test_14_circ_semantics(record, tables, oracle):
    # elements from the table; membership of insertions (m more tokens) from the oracle
    table, member = tables(2, 8), oracle(2)
    with Clock() as clk:
        seen, disagree, b_disagree, refined = 0, [], [], 0
        for op in table.ops():
            t = op_to_tree(op)
            for lop in all_labellings(op, "C"):
                if not in_plus(lop, 2, member):
                    continue
                seen += 1
                c = in_circ(lop, 2, member)
                if c != one_c_per_leaf_path(t, lop.src):
                    disagree.append(str(lop))
                refined += c == bimodule_shape(t, lop.src)
                if c != in_circ(lop, 2, member, insert_label="B"):
                    b_disagree.append(str(lop))
    print(json.dumps({
        "insert_C_vs_insert_B_disagreements": b_disagree,
        "literal_predicate_disagreements": disagree,
        # diagnostic only: the predicate that also constrains paths ending at nullary vertices
        "refined_predicate_agreement": f"{refined}/{seen}",
    }, indent=1))
    ok = not disagree and clk.dt < 60
    record(14, ok, f"{seen} labelled H2 ops, tree predicate disagreements {len(disagree)} "
                   f"(e.g. {disagree[:3]}), B-variant disagreements {len(b_disagree)}, {clk.dt:.1f} s")
    assert clk.dt < 60
    assert disagree == []


def _cli(argv):
    buf = io.StringIO()
    code = cli.main(argv, out=buf)
    return code, buf.getvalue()


def test_15_plumbing(record, tmp_path):
    with Clock() as clk:
        rng = random.Random(15)
        round_trip = True
        for _ in range(500):
            op = random_op(rng, rng.randint(0, 12), max_colours=12)
            for style in ("auto", "compact", "general"):
                round_trip &= parse(render(op, style)) == op
        # cache: save, load, regenerate after damage, and reach the same bytes
        t = generate(3, 8)
        path = cache_path(tmp_path, 3, 8)
        save_table(t, path)
        first = open(path, "rb").read()
        again = load_table(path)
        save_table(again, path)
        second = open(path, "rb").read()
        with open(path, "r+b") as fh:
            fh.truncate(len(first) // 2)
        regen = cached_generate(tmp_path, 3, 8)
        third = open(path, "rb").read()
        cache_ok = first == second == third and regen.entries == t.entries
        argv = ["--seed", "7", "check-axioms", "--m", "2", "3", "--count", "20", "--formulas"]
        runs = [_cli(argv) for _ in range(2)]
        reruns = runs[0] == runs[1] and runs[0][0] == 0
        samples = [sample_assoc(3, 20, seed=7) for _ in range(2)]
        reruns = reruns and samples[0] == samples[1]
    ok = round_trip and cache_ok and reruns and clk.dt < 10
    record(15, ok, f"round trip {round_trip}, cache fixpoint {cache_ok}, reruns identical {reruns}, {clk.dt:.2f} s")
    assert round_trip and cache_ok and reruns
    assert clk.dt < 10
