"""
A/B/C-labelled operations over the cospan A -> C <- B, underlying graphs,
proper labellings, and the labelled suboperads "plus" and "circ".

Membership in the unlabelled suboperad is delegated to any object with a
``contains(op)`` method (a GenTable or a HatOracle).  Tables raise
BudgetError above their budget, which propagates as "unknown".
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from itertools import combinations_with_replacement, product
from typing import Iterable, Mapping, Sequence

from .pathcore import (BAR, PathOp, as_op, compose, corner_count, in_filtration, parse,
                       permute, render)

LABELS = ("A", "B", "C")


class LabelError(ValueError):
    pass


def _check_label(l: str) -> str:
    if l not in LABELS:
        raise LabelError(f"unknown label {l!r}")
    return l


@dataclass(frozen=True)
class LabelledOp:
    op: PathOp
    src: tuple[str, ...]
    tgt: str

    def __post_init__(self):
        object.__setattr__(self, "op", as_op(self.op))
        object.__setattr__(self, "src", tuple(self.src))
        for l in self.src + (self.tgt,):
            _check_label(l)
        if len(self.src) != self.op.k:
            raise LabelError(f"{len(self.src)} source labels for {self.op.k} colours")

    def __str__(self):
        return f"{render(self.op)} :: ({','.join(self.src)}) -> {self.tgt}"


_LABELLED = re.compile(r"^(.*?)\s*::\s*\(([^)]*)\)\s*->\s*([ABC])\s*$")


def parse_labelled(text: str) -> LabelledOp:
    """Read ``"<op> :: (l1,...,lk) -> l"``."""
    mt = _LABELLED.match(text.strip())
    if not mt:
        raise LabelError(f"not a labelled operation: {text!r}")
    body, srcs, tgt = mt.groups()
    src = tuple(s.strip() for s in srcs.split(",") if s.strip())
    return LabelledOp(parse(body), src, tgt)


def labelled(op, src: Iterable[str] | str, tgt: str) -> LabelledOp:
    return LabelledOp(as_op(op), tuple(src), tgt)


def cospan_valid(lop: LabelledOp) -> bool:
    if lop.tgt == "C":
        return True
    return all(l == lop.tgt for l in lop.src)


# ---------------------------------------------------------------- graphs


@dataclass(frozen=True)
class Digraph:
    n: int
    edges: frozenset

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))
        for u, v in self.edges:
            if u == v:
                raise ValueError("self-loop")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"edge {u}->{v} outside 1..{self.n}")
            if (v, u) in self.edges:
                raise ValueError(f"both {u}->{v} and {v}->{u}")

    def successors(self, u: int) -> list[int]:
        return sorted(v for a, v in self.edges if a == u)

    def predecessors(self, v: int) -> list[int]:
        return sorted(a for a, b in self.edges if b == v)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_dot(self, labels: Sequence[str] | None = None, name: str = "G") -> str:
        lines = [f"digraph {name} {{"]
        for v in range(1, self.n + 1):
            lab = f' [label="{v}{labels[v - 1]}"]' if labels else ""
            lines.append(f"  {v}{lab};")
        for u, v in self.sorted_edges():
            lines.append(f"  {u} -> {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def parse_edges(text: str, n: int | None = None) -> Digraph:
    """``"2>1,2>3"`` -> Digraph; n defaults to the largest vertex mentioned."""
    edges = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        a, _, b = part.partition(">")
        edges.append((int(a), int(b)))
    top = max((max(e) for e in edges), default=0)
    return Digraph(max(top, n or 0), frozenset(edges))


def underlying_graph(op, m: int) -> Digraph:
    op = as_op(op)
    if not in_filtration(op, m):
        warnings.warn(f"{op} has complexity above {m}", stacklevel=2)
    first = {}
    for idx, t in enumerate(op.tokens):
        if t != BAR and t not in first:
            first[t] = idx
    edges = set()
    for a in range(1, op.k + 1):
        for b in range(a + 1, op.k + 1):
            if corner_count(op, a, b) == m:
                edges.add((a, b) if first[a] < first[b] else (b, a))
    return Digraph(op.k, frozenset(edges))


def _lab(labels, v: int):
    if isinstance(labels, Mapping):
        return labels[v]
    return labels[v - 1]


def properly_labelled(g: Digraph, labels) -> bool:
    """Every edge v->w has v labelled A or w labelled B."""
    return all(_lab(labels, v) == "A" or _lab(labels, w) == "B" for v, w in g.edges)


def graph_structure(g: Digraph) -> dict:
    succ = {v: set() for v in range(1, g.n + 1)}
    for u, v in g.edges:
        succ[u].add(v)
    adjacent = set()
    for v, w in g.edges:
        if not any(w in succ[u] for u in succ[v]):
            adjacent.add((v, w))
    has_in = {w for _, w in g.edges}
    roots = {v for v in range(1, g.n + 1) if v not in has_in}
    leaves = {v for v in range(1, g.n + 1) if not succ[v]}
    return {"adjacent": adjacent, "roots": roots, "leaves": leaves}


def semifree_terminal(op, m: int, xk) -> bool:
    st = graph_structure(underlying_graph(op, m))
    if any(_lab(xk, v) != "X" for v in st["roots"] | st["leaves"]):
        return False
    return all(_lab(xk, v) != _lab(xk, w) for v, w in st["adjacent"])


# ---------------------------------------------------------------- suboperads


def in_plus(lop: LabelledOp, m: int, table) -> bool:
    if not cospan_valid(lop):
        return False
    # members never exceed complexity m, so skip the graph for those
    if not in_filtration(lop.op, m):
        return False
    if not properly_labelled(underlying_graph(lop.op, m), lop.src):
        return False
    return table.contains(lop.op)


def insert_colour(op, gaps: Sequence[int]) -> PathOp:
    """op with a fresh colour k+1 placed once at each gap (gap g sits before token g)."""
    op = as_op(op)
    fresh = op.k + 1
    out = []
    gi = 0
    gaps = sorted(gaps)
    for pos in range(len(op.tokens) + 1):
        while gi < len(gaps) and gaps[gi] == pos:
            out.append(fresh)
            gi += 1
        if pos < len(op.tokens):
            out.append(op.tokens[pos])
    return PathOp(tuple(out))


def insertions(op, m: int) -> list[PathOp]:
    """All C(len+m, m) strings with a fresh colour inserted m times."""
    op = as_op(op)
    return [insert_colour(op, g)
            for g in combinations_with_replacement(range(len(op.tokens) + 1), m)]


def labelled_insertions(lop: LabelledOp, m: int, insert_label: str = "C") -> list[LabelledOp]:
    _check_label(insert_label)
    return [LabelledOp(x, lop.src + (insert_label,), lop.tgt) for x in insertions(lop.op, m)]


def blocking_insertion(lop: LabelledOp, m: int, table, insert_label: str = "C"):
    """First insertion that stays in the plus suboperad, or None."""
    for cand in labelled_insertions(lop, m, insert_label):
        if in_plus(cand, m, table):
            return cand
    return None


def in_circ(lop: LabelledOp, m: int, table, insert_label: str = "C") -> bool:
    if not in_plus(lop, m, table):
        return False
    return blocking_insertion(lop, m, table, insert_label) is None


def compose_labelled(x: LabelledOp, ys: Sequence[LabelledOp]) -> LabelledOp:
    if len(ys) != x.op.k:
        raise LabelError(f"{len(ys)} inputs for {x.op.k} colours")
    for idx, (l, y) in enumerate(zip(x.src, ys), 1):
        if y.tgt != l:
            raise LabelError(f"slot {idx}: label {l} but input targets {y.tgt}")
    op = compose(x.op, [y.op for y in ys])
    src = tuple(l for y in ys for l in y.src)
    out = LabelledOp(op, src, x.tgt)
    assert cospan_valid(out) or not all(cospan_valid(v) for v in (x, *ys))
    return out


def permute_labelled(lop: LabelledOp, sigma: Sequence[int]) -> LabelledOp:
    src = [None] * len(lop.src)
    for c, l in enumerate(lop.src, 1):
        src[sigma[c - 1] - 1] = l
    return LabelledOp(permute(lop.op, sigma), tuple(src), lop.tgt)


def all_labellings(op, tgt: str | None = None) -> Iterable[LabelledOp]:
    """Every cospan-valid labelling of op (optionally with a fixed target)."""
    op = as_op(op)
    for t in (tgt,) if tgt else LABELS:
        for src in product(LABELS, repeat=op.k):
            lop = LabelledOp(op, src, t)
            if cospan_valid(lop):
                yield lop
