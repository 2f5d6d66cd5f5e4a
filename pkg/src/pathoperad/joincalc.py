"""
Joins of bar-strings along cut tuples, tuple transport, and executable
checks of the unit / associativity / interchange laws for operads of
complexity m.

A cut tuple lists bar positions (1-based, left to right) of its host
string; every listed bar is consumed by the join.  The even side is cut
floor(m/2) times and the odd side floor((m-1)/2) times, so the join has
m + 1 segments and r + s - m + 1 bars.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .pathcore import BAR, PathOp, PathOpError, as_op, canonical_tokens, eta, key, permute

EVEN = "even"
ODD = "odd"


class CutError(PathOpError):
    pass


def even_cuts(m: int) -> int:
    return m // 2


def odd_cuts(m: int) -> int:
    return (m - 1) // 2


def vee(r: int, s: int, m: int) -> int:
    return r + s - m + 1


def left_unit_cut(m: int) -> tuple[int, ...]:
    return tuple(range(1, 2 * (m // 2), 2))


def right_unit_cut(m: int) -> tuple[int, ...]:
    return tuple(range(2, 2 * ((m - 1) // 2) + 1, 2))


def check_cut(t: Sequence[int], length: int, bars: int, what: str = "cut") -> tuple[int, ...]:
    t = tuple(t)
    if len(t) != length:
        raise CutError(f"{what} {t} must have length {length}")
    if any(b <= a for a, b in zip(t, t[1:])):
        raise CutError(f"{what} {t} is not strictly increasing")
    if t and (t[0] < 1 or t[-1] > bars):
        raise CutError(f"{what} {t} out of range 1..{bars}")
    return t


def _split(tokens, cut):
    """Split at the listed bars (consumed); pieces carry (token, bar_index)."""
    pieces = [[]]
    cutset = set(cut)
    bar = 0
    for t in tokens:
        if t == BAR:
            bar += 1
            if bar in cutset:
                pieces.append([])
                continue
            pieces[-1].append((BAR, bar))
        else:
            pieces[-1].append((t, None))
    return pieces


@dataclass(frozen=True)
class JoinResult:
    result: PathOp
    # bar_origin[b - 1] = (side, bar index in that side) for result bar b
    bar_origin: tuple[tuple[str, int], ...]

    def trace(self) -> dict[tuple[str, int], int]:
        return {orig: idx for idx, orig in enumerate(self.bar_origin, 1)}


def join(x, i: Sequence[int], y, j: Sequence[int], m: int) -> JoinResult:
    x, y = as_op(x), as_op(y)
    if m < 1:
        raise CutError("join needs m >= 1")
    i = check_cut(i, even_cuts(m), x.bars, "even cut")
    j = check_cut(j, odd_cuts(m), y.bars, "odd cut")
    shift = x.k
    even = _split(x.tokens, i)
    odd = _split(tuple(t + shift if t != BAR else BAR for t in y.tokens), j)
    tokens = []
    origin = []
    for n in range(m + 1):
        side, piece = (EVEN, even[n // 2]) if n % 2 == 0 else (ODD, odd[n // 2])
        for t, bar in piece:
            tokens.append(t)
            if t == BAR:
                origin.append((side, bar))
    return JoinResult(PathOp(tuple(tokens)), tuple(origin))


def join_op(x, i, y, j, m) -> PathOp:
    return join(x, i, y, j, m).result


def bar_trace(x, i, y, j, m) -> dict[tuple[str, int], int]:
    return join(x, i, y, j, m).trace()


def reindex_oracle(x, i, y, j, side: str, t: Sequence[int], m: int) -> tuple[int, ...]:
    """Carry a tuple of surviving bars of one side into the join."""
    trace = bar_trace(x, i, y, j, m)
    out = []
    for b in t:
        if (side, b) not in trace:
            raise CutError(f"bar {b} on the {side} side is cut or out of range")
        out.append(trace[side, b])
    return tuple(sorted(out))


def _count_less(tup, value):
    return sum(1 for v in tup if v < value)


def reindex_formula_i(i, j, j_prime, m: int, r: int) -> tuple[int, ...]:
    """Literal evaluation of i'_a = i_{n+1} + j'_a - 2n + 1 (i_{n+1} := r past the end)."""
    if set(j) & set(j_prime):
        raise CutError(f"{tuple(j)} and {tuple(j_prime)} overlap")
    h = m // 2
    out = []
    for jp in j_prime:
        n = _count_less(j, jp)
        base = i[n] if n < h else r
        out.append(base + jp - 2 * n + 1)
    return tuple(out)


def reindex_formula_j(i, i_prime, j, m: int, s: int) -> tuple[int, ...]:
    """Literal evaluation of j'_a = j_n + i'_a - 2n (j_0 := 0, j_n := s past the end)."""
    if set(i) & set(i_prime):
        raise CutError(f"{tuple(i)} and {tuple(i_prime)} overlap")
    h = (m - 1) // 2
    out = []
    for ip in i_prime:
        n = _count_less(i, ip)
        if n == 0:
            base = 0
        elif n <= h:
            base = j[n - 1]
        else:
            base = s
        out.append(base + ip - 2 * n)
    return tuple(out)


def join_decompositions(z, m: int):
    """Every way of reading z as a join, as (x, i, y, j) with x, y canonical.

    Covers all splittings of the token sequence into m + 1 consecutive
    (possibly empty) segments whose even and odd parts share no colour.
    """
    z = as_op(z)
    toks = z.tokens
    out = []
    for bounds in valid_bounds(toks, m):
        xt, i, yt, j = split_at(toks, bounds, m)
        out.append((PathOp(canonical_tokens(xt)), i, PathOp(canonical_tokens(yt)), j))
    return out


def _bounds(length, m):
    # m nondecreasing cut points in 0..length
    from itertools import combinations_with_replacement

    return combinations_with_replacement(range(length + 1), m)


def valid_bounds(toks, m: int):
    """Segment boundaries (m cut points) whose even and odd parts share no colour.

    Depth-first with pruning: a colour is pinned to the parity of the
    segment it first appears in.
    """
    length = len(toks)
    side: dict[int, int] = {}
    bounds: list[int] = []
    out = []

    def rec(pos, seg):
        par = seg % 2
        if seg == m:
            for t in toks[pos:]:
                if t != BAR and side.get(t, par) != par:
                    return
            out.append(tuple(bounds))
            return
        bounds.append(pos)
        rec(pos, seg + 1)
        bounds.pop()
        if pos < length:
            t = toks[pos]
            added = False
            if t != BAR:
                s = side.get(t)
                if s is None:
                    side[t] = par
                    added = True
                elif s != par:
                    return
            rec(pos + 1, seg)
            if added:
                del side[t]

    rec(0, 0)
    return out


def split_at(toks, bounds, m):
    """Decompose at segment boundaries; None when the two sides share a colour.

    Returns raw token tuples (original colours) and recovered cut tuples.
    """
    edges = (0,) + tuple(bounds) + (len(toks),)
    segs = [toks[edges[n]:edges[n + 1]] for n in range(m + 1)]
    even_cols = set()
    for s in segs[0::2]:
        even_cols.update(s)
    even_cols.discard(BAR)
    for s in segs[1::2]:
        for t in s:
            if t != BAR and t in even_cols:
                return None
    return _glue(segs[0::2]) + _glue(segs[1::2])


def _glue(parts):
    toks = []
    cut = []
    bars = 0
    for n, part in enumerate(parts):
        if n:
            bars += 1
            cut.append(bars)
            toks.append(BAR)
        toks.extend(part)
        bars += part.count(BAR)
    return tuple(toks), tuple(cut)


# ---------------------------------------------------------------- axiom checks


@dataclass
class AxiomRecord:
    diagram: str
    m: int
    inputs: dict
    status: str
    counterexample: dict | None = None

    def to_json(self) -> dict:
        out = {"diagram": self.diagram, "m": self.m, "inputs": self.inputs, "status": self.status}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class AxiomReport:
    records: list[AxiomRecord] = field(default_factory=list)

    @property
    def failures(self) -> list[AxiomRecord]:
        return [r for r in self.records if r.status != "pass"]

    @property
    def ok(self) -> bool:
        return not self.failures

    def extend(self, other: "AxiomReport"):
        self.records.extend(other.records)
        return self

    def summary(self) -> dict:
        out: dict = {}
        for r in self.records:
            d = out.setdefault(f"{r.diagram}/m={r.m}", {"pass": 0, "fail": 0})
            d["pass" if r.status == "pass" else "fail"] += 1
        return out

    def to_lines(self) -> list[str]:
        recs = sorted(self.records, key=lambda r: json.dumps(r.to_json(), sort_keys=True))
        return [json.dumps(r.to_json(), sort_keys=True) for r in recs]


def _g(op) -> str:
    return key(as_op(op))


def check_units(m: int, corpus) -> AxiomReport:
    """Left unit over every odd cut of each op, right unit over every even cut."""
    report = AxiomReport()
    e = eta(m)
    li, rj = left_unit_cut(m), right_unit_cut(m)
    for op in map(as_op, corpus):
        for j in combinations(range(1, op.bars + 1), odd_cuts(m)):
            got = join_op(e, li, op, j, m)
            _record(report, "left_unit", m, {"y": _g(op), "j": list(j)}, got, op)
        for i in combinations(range(1, op.bars + 1), even_cuts(m)):
            got = join_op(op, i, e, rj, m)
            _record(report, "right_unit", m, {"x": _g(op), "i": list(i)}, got, op)
    return report


def _record(report, diagram, m, inputs, got, want):
    if got == want:
        report.records.append(AxiomRecord(diagram, m, inputs, "pass"))
    else:
        report.records.append(
            AxiomRecord(diagram, m, inputs, "fail", {"lhs": _g(got), "rhs": _g(want)})
        )


@dataclass(frozen=True)
class AssocInstance:
    x: PathOp
    i: tuple[int, ...]
    y: PathOp
    j: tuple[int, ...]  # even-side cut of y (joined with z)
    j_odd: tuple[int, ...]  # odd-side cut of y (joined with x)
    z: PathOp
    k: tuple[int, ...]


def associativity_sides(inst: AssocInstance, m: int):
    """Both composites of the associativity square, plus the transported tuples."""
    x, i, y, j, jo, z, kk = inst.x, inst.i, inst.y, inst.j, inst.j_odd, inst.z, inst.k
    yz = join(y, j, z, kk, m)
    k_prime = reindex_oracle(y, j, z, kk, EVEN, jo, m)
    top = join_op(x, i, yz.result, k_prime, m)
    i_prime = reindex_oracle(x, i, y, jo, ODD, j, m)
    xy = join_op(x, i, y, jo, m)
    bottom = join_op(xy, i_prime, z, kk, m)
    return top, bottom, i_prime, k_prime


def check_associativity(m: int, instances) -> AxiomReport:
    report = AxiomReport()
    for inst in instances:
        top, bottom, _, _ = associativity_sides(inst, m)
        inputs = {
            "x": _g(inst.x), "i": list(inst.i), "y": _g(inst.y), "j": list(inst.j),
            "j_odd": list(inst.j_odd), "z": _g(inst.z), "k": list(inst.k),
        }
        _record(report, "associativity", m, inputs, bottom, top)
    return report


@dataclass(frozen=True)
class InterchangeInstance:
    x: PathOp
    i: tuple[int, ...]
    i2: tuple[int, ...]
    y: PathOp
    j: tuple[int, ...]
    z: PathOp
    k: tuple[int, ...]


def interchange_sides(inst: InterchangeInstance, m: int):
    """Plug y at i and z at i2 in both orders; the second is recoloured to x, y, z order."""
    x, i, i2, y, j, z, kk = inst.x, inst.i, inst.i2, inst.y, inst.j, inst.z, inst.k
    j_prime = reindex_oracle(x, i, y, j, EVEN, i2, m)
    first = join_op(join_op(x, i, y, j, m), j_prime, z, kk, m)
    k_prime = reindex_oracle(x, i2, z, kk, EVEN, i, m)
    second = join_op(join_op(x, i2, z, kk, m), k_prime, y, j, m)
    # second has colours x, z, y; swap the z and y blocks
    a, b, c = x.k, z.k, y.k
    sigma = list(range(1, a + 1)) + [a + c + t for t in range(1, b + 1)] + [a + t for t in range(1, c + 1)]
    return first, permute(second, sigma)


def check_interchange(m: int, instances) -> AxiomReport:
    report = AxiomReport()
    if m % 2:
        return report
    for inst in instances:
        first, second = interchange_sides(inst, m)
        inputs = {
            "x": _g(inst.x), "i": list(inst.i), "i2": list(inst.i2), "y": _g(inst.y),
            "j": list(inst.j), "z": _g(inst.z), "k": list(inst.k),
        }
        _record(report, "interchange", m, inputs, second, first)
    return report


# ---------------------------------------------------------------- sampling


def random_op(rng: random.Random, length: int, bars: int | None = None, max_colours: int = 4) -> PathOp:
    """A random canonical op with ``length`` tokens (exactly ``bars`` bars if given)."""
    if bars is None:
        bars = rng.randint(0, length)
    bars = min(bars, length)
    slots = [BAR] * bars + [None] * (length - bars)
    rng.shuffle(slots)
    k = 0
    out = []
    for s in slots:
        if s is None:
            c = rng.randint(1, min(k + 1, max_colours))
            k = max(k, c)
            out.append(c)
        else:
            out.append(BAR)
    return PathOp(canonical_tokens(out))


def random_cut(rng, bars, length, avoid=()):
    pool = [b for b in range(1, bars + 1) if b not in set(avoid)]
    return tuple(sorted(rng.sample(pool, length)))


def sample_assoc(m: int, count: int, seed: int = 0, max_len: int = 8) -> list[AssocInstance]:
    rng = random.Random(seed)
    out = []
    h, g = even_cuts(m), odd_cuts(m)
    while len(out) < count:
        xb = rng.randint(h, h + 3)
        yb = rng.randint(h + g, h + g + 3)
        zb = rng.randint(g, g + 3)
        x = random_op(rng, max(xb, rng.randint(xb, max_len)), xb)
        y = random_op(rng, max(yb, rng.randint(yb, max_len)), yb)
        z = random_op(rng, max(zb, rng.randint(zb, max_len)), zb)
        i = random_cut(rng, xb, h)
        j = random_cut(rng, yb, h)
        jo = random_cut(rng, yb, g, avoid=j)
        k = random_cut(rng, zb, g)
        out.append(AssocInstance(x, i, y, j, jo, z, k))
    return out


def sample_interchange(m: int, count: int, seed: int = 0, max_len: int = 8) -> list[InterchangeInstance]:
    if m % 2:
        return []
    rng = random.Random(seed)
    out = []
    h, g = even_cuts(m), odd_cuts(m)
    while len(out) < count:
        xb = rng.randint(2 * h, 2 * h + 3)
        yb = rng.randint(g, g + 3)
        zb = rng.randint(g, g + 3)
        x = random_op(rng, max(xb, rng.randint(xb, max_len)), xb)
        y = random_op(rng, max(yb, rng.randint(yb, max_len)), yb)
        z = random_op(rng, max(zb, rng.randint(zb, max_len)), zb)
        i = random_cut(rng, xb, h)
        i2 = random_cut(rng, xb, h, avoid=i)
        out.append(InterchangeInstance(x, i, i2, y, random_cut(rng, yb, g), z, random_cut(rng, zb, g)))
    return out


def formula_comparison(m: int, instances) -> dict:
    """Printed closed reindexing formulas vs. bar-trace transport on assoc. instances."""
    rows = []
    agree_i = agree_j = 0
    diffs_i: dict[int, int] = {}
    diffs_j: dict[int, int] = {}
    for inst in instances:
        _, _, i_oracle, k_oracle = associativity_sides(inst, m)
        i_formula = reindex_formula_i(inst.i, inst.j_odd, inst.j, m, inst.x.bars)
        k_formula = reindex_formula_j(inst.j, inst.j_odd, inst.k, m, inst.z.bars)
        agree_i += i_formula == i_oracle
        agree_j += k_formula == k_oracle
        for f, o in zip(i_formula, i_oracle):
            diffs_i[f - o] = diffs_i.get(f - o, 0) + 1
        for f, o in zip(k_formula, k_oracle):
            diffs_j[f - o] = diffs_j.get(f - o, 0) + 1
        if i_formula != i_oracle or k_formula != k_oracle:
            rows.append({
                "i": list(inst.i), "j_odd": list(inst.j_odd), "j": list(inst.j),
                "k": list(inst.k), "r": inst.x.bars, "s": inst.y.bars, "t": inst.z.bars,
                "i_prime_formula": list(i_formula), "i_prime_oracle": list(i_oracle),
                "k_prime_formula": list(k_formula), "k_prime_oracle": list(k_oracle),
            })
    return {
        "m": m,
        "instances": len(instances),
        "i_prime_agree": agree_i,
        "k_prime_agree": agree_j,
        "i_prime_offsets": {str(d): n for d, n in sorted(diffs_i.items())},
        "k_prime_offsets": {str(d): n for d, n in sorted(diffs_j.items())},
        "discrepancies": rows[:20],
    }
