"""
Lifting pointed-bimodule operations to bimodule operations (m <= 3) by
inserting C-labelled colours, plus the exhaustive uniqueness check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .hatgen import HatOracle
from .joincalc import _split, split_at
from .labelcalc import LabelledOp, blocking_insertion, in_circ, in_plus, labelled_insertions
from .pathcore import BAR, PathOp, as_op, identity

MAX_M = 3


class LiftError(ValueError):
    pass


@dataclass(frozen=True)
class LiftResult:
    lifted: LabelledOp
    inserted_colours: frozenset
    maximal: bool | None = None  # in_circ of the lift, when checked

    def to_json(self, source: LabelledOp | None = None, unique=None) -> dict:
        out = {"lifted": str(self.lifted), "inserted_colours": sorted(self.inserted_colours)}
        if source is not None:
            out = {"input": str(source), **out}
        if self.maximal is not None:
            out["maximal"] = self.maximal
        if unique is not None:
            out["unique"] = unique
        return out


def _check_m(m: int):
    if m > MAX_M:
        raise LiftError(f"lifting is only supported for m <= {MAX_M}")
    if m < 1:
        raise LiftError("m must be >= 1")


def normalise(tokens, k: int) -> tuple[int, ...]:
    """Keep colours 1..k; renumber every other colour k+1, k+2, ... by first occurrence."""
    ren = {}
    out = []
    for t in tokens:
        if t == BAR or 1 <= t <= k:
            out.append(t)
            continue
        if t not in ren:
            ren[t] = k + 1 + len(ren)
        out.append(ren[t])
    return tuple(out)


def _result(tokens, lop: LabelledOp) -> LiftResult:
    k = lop.op.k
    toks = normalise(tokens, k)
    op = PathOp(toks)
    extra = op.k - k
    lifted = LabelledOp(op, lop.src + ("C",) * extra, lop.tgt)
    return LiftResult(lifted, frozenset(range(k + 1, op.k + 1)))


def _pattern_a(n: int) -> tuple[int, ...]:
    # seg 0: 1 c1; seg t: c_t 1 c_{t+1}; last: c_n 1 c_n ... c_1
    segs = [[1, 2]]
    for t in range(1, n):
        segs.append([t + 1, 1, t + 2])
    segs.append([n + 1, 1] + list(range(n + 1, 1, -1)))
    out = []
    for idx, s in enumerate(segs):
        if idx:
            out.append(BAR)
        out.extend(s)
    return tuple(out)


def lift_identity(n: int, source_label: str, m: int, member=None) -> LiftResult:
    _check_m(m)
    if n < 0:
        raise LiftError("negative bar count")
    base = LabelledOp(identity(n), (source_label,), "C")
    if source_label == "C":
        return LiftResult(base, frozenset())
    if m == 3 and n >= 1:
        toks = _pattern_a(n)
        if source_label == "B":
            toks = normalise(toks[::-1], 1)
        return _result(toks, base)
    return saturate(base, m, member or HatOracle(m))


def saturate(lop: LabelledOp, m: int, member) -> LiftResult:
    """Insert C colours greedily until none fits."""
    cur = lop
    for _ in range(10 * (len(lop.op) + m) + 10):
        nxt = blocking_insertion(cur, m, member, "C")
        if nxt is None:
            return _result(cur.op.tokens, lop)
        cur = nxt
    raise LiftError(f"saturation of {lop} did not stop")


def erase_colours(lifted, colours, m: int) -> PathOp:
    """Plug eta(m) into the listed colours: their tokens disappear."""
    op = as_op(lifted)
    colours = set(colours)
    ar = op.arities()
    for c in colours:
        if not 1 <= c <= op.k:
            raise LiftError(f"no colour {c}")
        if ar[c - 1] != m - 1:
            raise LiftError(f"colour {c} has arity {ar[c - 1]}, expected {m - 1}")
    keep = [c for c in range(1, op.k + 1) if c not in colours]
    ren = {c: i for i, c in enumerate(keep, 1)}
    return PathOp(tuple(t if t == BAR else ren[t] for t in op.tokens if t not in colours))


class _Lifter:
    def __init__(self, m: int, member: HatOracle, labels: dict, tgt: str):
        self.m = m
        self.member = member
        self.labels = labels
        self.tgt = tgt
        self.fresh = itertools.count(10**6)
        self.id_cache: dict = {}

    def _identity(self, n: int, label: str):
        key = (n, label)
        if key not in self.id_cache:
            self.id_cache[key] = lift_identity(n, label, self.m, self.member).lifted.op.tokens
        return self.id_cache[key]

    def run(self, toks):
        m = self.m
        step = self.member.decomposition(toks)
        if step[0] == "eta":
            if self.tgt != "C":
                return tuple(toks)
            c = next(self.fresh)
            return tuple(_raw_identity(m - 1, c))
        if step[0] == "identity":
            colour = next(t for t in toks if t != BAR)
            pattern = self._identity(toks.count(BAR), self.labels[colour])
            ren = {1: colour}
            return tuple(t if t == BAR else ren.setdefault(t, next(self.fresh)) for t in pattern)
        xt, i, yt, j = split_at(tuple(toks), step[1], m)
        xl, yl = self.run(xt), self.run(yt)
        even = _split(xl, i)
        odd = _split(yl, j)
        out = []
        for n in range(m + 1):
            piece = even[n // 2] if n % 2 == 0 else odd[n // 2]
            out.extend(t for t, _ in piece)
        return tuple(out)


def _raw_identity(n: int, c: int):
    out = [c]
    for _ in range(n):
        out.extend((BAR, c))
    return out


def lift(lop: LabelledOp, m: int, member=None, check: bool = True) -> LiftResult:
    """For m = 3 lift along a join decomposition (lift both sides, rejoin at
    the same cuts); for m <= 2 saturate with C insertions directly."""
    _check_m(m)
    member = member or HatOracle(m)
    if not in_plus(lop, m, member):
        raise LiftError(f"{lop} is not in the pointed-bimodule suboperad")
    if lop.tgt != "C":
        return LiftResult(lop, frozenset(), True if check else None)
    if m < 3:
        res = saturate(lop, m, member)
    else:
        labels = dict(zip(range(1, lop.op.k + 1), lop.src))
        toks = _Lifter(m, member, labels, lop.tgt).run(lop.op.tokens)
        res = _result(toks, lop)
    if check:
        if erase_colours(res.lifted.op, res.inserted_colours, m) != lop.op:
            raise LiftError(f"erasing the lift of {lop} does not recover it")
        res = LiftResult(res.lifted, res.inserted_colours, in_circ(res.lifted, m, member))
    return res


class SearchBoundError(LiftError):
    pass


def maximal_insertions(lop: LabelledOp, m: int, member, state_cap: int = 20000,
                       depth_cap: int | None = None) -> set:
    """Every maximal result of iterated C-insertions, inserted colours normalised."""
    k = lop.op.k
    if depth_cap is None:
        depth_cap = len(lop.op) + 2
    seen: dict = {}
    maximal = set()
    stack = [lop]
    while stack:
        cur = stack.pop()
        key = normalise(cur.op.tokens, k)
        if key in seen:
            continue
        seen[key] = True
        if len(seen) > state_cap or cur.op.k - k > depth_cap:
            raise SearchBoundError(f"insertion search from {lop} exceeded its bound")
        kids = [c for c in labelled_insertions(cur, m, "C") if in_plus(c, m, member)]
        if not kids:
            maximal.add(key)
        stack.extend(kids)
    return maximal


def verify_unique(lop: LabelledOp, m: int, member=None, max_tokens: int = 8) -> bool:
    _check_m(m)
    if len(lop.op) > max_tokens:
        raise LiftError(f"{len(lop.op)} tokens exceeds the exhaustive bound {max_tokens}")
    member = member or HatOracle(m)
    res = lift(lop, m, member)
    if not res.maximal:
        # the constructed lift still admits an insertion, so it is not the
        # unique maximal element whatever the rest of the search finds
        return False
    found = maximal_insertions(lop, m, member)
    return found == {res.lifted.op.tokens}
