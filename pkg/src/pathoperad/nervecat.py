"""
Categories of proper labellings as posets, their order complexes, integral
homology, and the small digraph combinatorics used around them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Sequence

from .labelcalc import Digraph, properly_labelled, underlying_graph
from .pathcore import as_op

OBJECT_CAP = 2000
DIM_CAP = 12


class CapError(RuntimeError):
    pass


# ---------------------------------------------------------------- posets


def proper_labellings(g: Digraph) -> list[str]:
    """All proper labellings as strings (vertex 1 first), lexicographic."""
    return ["".join(l) for l in product("ABC", repeat=g.n) if properly_labelled(g, l)]


def leq(a: str, b: str) -> bool:
    if len(a) != len(b):
        raise ValueError("labellings on different vertex sets")
    return all(x == y or (y == "C" and x in "AB") for x, y in zip(a, b))


@dataclass
class LabelPoset:
    objects: list[str]
    below: dict = field(default_factory=dict)  # index -> set of strictly larger indices

    @classmethod
    def of(cls, objects: Sequence[str], cap: int = OBJECT_CAP) -> "LabelPoset":
        objects = list(objects)
        if len(objects) > cap:
            raise CapError(f"{len(objects)} objects exceeds cap {cap}")
        up = {i: {j for j, b in enumerate(objects) if j != i and leq(a, b)}
              for i, a in enumerate(objects)}
        return cls(objects, up)

    def relations(self) -> list[tuple[str, str]]:
        return [(self.objects[i], self.objects[j]) for i in sorted(self.below)
                for j in sorted(self.below[i])]

    def is_partial_order(self) -> bool:
        for i, ups in self.below.items():
            if any(i in self.below[j] for j in ups):
                return False
            for j in ups:
                if not self.below[j] <= ups:
                    return False
        return True

    def to_dot(self) -> str:
        lines = ["digraph C {"]
        for o in self.objects:
            lines.append(f'  "{o}";')
        for a, b in self.relations():
            lines.append(f'  "{a}" -> "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def poset(g: Digraph, cap: int = OBJECT_CAP) -> LabelPoset:
    return LabelPoset.of(proper_labellings(g), cap)


# ---------------------------------------------------------------- complexes


@dataclass
class Complex:
    simplices: list[list[tuple[int, ...]]]  # by dimension, each sorted

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def count(self) -> int:
        return sum(len(s) for s in self.simplices)


def order_complex(p: LabelPoset, dim_cap: int = DIM_CAP) -> Complex:
    """Every chain of the poset, as a sorted tuple of object indices."""
    chains: list[list[tuple[int, ...]]] = [[(i,) for i in range(len(p.objects))]]
    frontier = chains[0]
    while frontier:
        nxt = []
        for ch in frontier:
            for j in sorted(p.below[ch[-1]]):
                nxt.append(ch + (j,))
        if not nxt:
            break
        if len(chains) > dim_cap:
            raise CapError(f"complex dimension exceeds cap {dim_cap}")
        chains.append(nxt)
        frontier = nxt
    return Complex([sorted(tuple(sorted(c)) for c in level) for level in chains])


def simplicial_complex(facets) -> Complex:
    """Face closure of the given facets (handy for fixtures)."""
    faces = set()
    for f in facets:
        f = tuple(sorted(f))
        for r in range(1, len(f) + 1):
            faces.update(combinations(f, r))
    top = max((len(f) for f in faces), default=0)
    return Complex([sorted(f for f in faces if len(f) == d + 1) for d in range(top)])


# ---------------------------------------------------------------- homology


@dataclass
class HomologyReport:
    betti: list[int]
    torsion: list[list[int]]

    @property
    def acyclic(self) -> bool:
        return not any(self.betti) and not any(self.torsion)

    def to_json(self) -> dict:
        return {"betti": self.betti, "torsion": self.torsion}


def _boundary(c: Complex, d: int) -> list[dict]:
    """Columns of the boundary map C_d -> C_{d-1} as {row: coeff}; d=0 is the augmentation."""
    if d == 0:
        return [{0: 1} for _ in c.simplices[0]]
    index = {s: i for i, s in enumerate(c.simplices[d - 1])}
    cols = []
    for s in c.simplices[d]:
        col = {}
        for k in range(len(s)):
            col[index[s[:k] + s[k + 1:]]] = -1 if k % 2 else 1
        cols.append(col)
    return cols


def invariant_factors(cols: list[dict]) -> list[int]:
    """Nonzero Smith invariants of a sparse integer matrix given by columns.

    Unit pivots are eliminated sparsely; whatever survives goes through a
    dense Smith reduction.
    """
    cols = [dict(c) for c in cols if c]
    rows: dict[int, set] = {}
    for j, c in enumerate(cols):
        for r in c:
            rows.setdefault(r, set()).add(j)
    alive = set(range(len(cols)))
    units = 0
    changed = True
    while changed:
        changed = False
        for j in sorted(alive):
            col = cols[j]
            piv = next((r for r, v in col.items() if v in (1, -1)), None)
            if piv is None:
                continue
            pv = col[piv]
            # clear row piv from the other columns
            for j2 in list(rows[piv]):
                if j2 == j:
                    continue
                c2 = cols[j2]
                f = c2[piv] * pv
                for r, v in col.items():
                    nv = c2.get(r, 0) - f * v
                    if nv:
                        if r not in c2:
                            rows.setdefault(r, set()).add(j2)
                        c2[r] = nv
                    else:
                        c2.pop(r, None)
                        rows[r].discard(j2)
                if not c2:
                    alive.discard(j2)
            for r in col:
                rows[r].discard(j)
            alive.discard(j)
            units += 1
            changed = True
    rest = [cols[j] for j in sorted(alive) if cols[j]]
    return [1] * units + _dense_smith(rest)


def _dense_smith(cols: list[dict]) -> list[int]:
    if not cols:
        return []
    rindex = sorted({r for c in cols for r in c})
    pos = {r: i for i, r in enumerate(rindex)}
    a = [[0] * len(cols) for _ in rindex]
    for j, c in enumerate(cols):
        for r, v in c.items():
            a[pos[r]][j] = v
    out = []
    nr, nc = len(a), len(cols)
    t = 0
    while t < min(nr, nc):
        nz = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    dirty = True
            for j in range(t + 1, nc):
                q = a[t][j] // p
                if q:
                    for i in range(nr):
                        a[i][j] -= q * a[i][t]
                if a[t][j]:
                    dirty = True
            if not dirty:
                # divisibility of the remaining block
                bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc)
                            if a[i][j] % p), None)
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                continue
            # move the smallest remaining entry of row/col t to the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t, nr) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, nc) if a[t][j]]
            _, pi, pj = min(cand)
            a[t], a[pi] = a[pi], a[t]
            for row in a:
                row[t], row[pj] = row[pj], row[t]
        out.append(abs(a[t][t]))
        t += 1
    return out


def homology(c: Complex) -> HomologyReport:
    """Reduced integral homology of a simplicial complex."""
    if c.dim > DIM_CAP:
        raise CapError(f"complex dimension {c.dim} exceeds cap {DIM_CAP}")
    factors = [invariant_factors(_boundary(c, d)) for d in range(c.dim + 1)]
    betti, torsion = [], []
    for d in range(c.dim + 1):
        rank_d = len(factors[d])
        above = factors[d + 1] if d + 1 <= c.dim else []
        betti.append(len(c.simplices[d]) - rank_d - len(above))
        torsion.append(sorted(f for f in above if f > 1))
    return HomologyReport(betti, torsion)


# ---------------------------------------------------------------- collapses


def collapses_to_point(c: Complex) -> bool:
    """Greedy elementary collapses; True when a single vertex remains."""
    alive = {s for level in c.simplices for s in level}
    cofaces: dict = {s: set() for s in alive}
    for s in alive:
        if len(s) > 1:
            for k in range(len(s)):
                cofaces[s[:k] + s[k + 1:]].add(s)
    stack = [s for s in alive if len(cofaces[s]) == 1]
    while stack:
        s = stack.pop()
        if s not in alive or len(cofaces[s]) != 1:
            continue
        (t,) = cofaces[s]
        if cofaces[t]:
            continue
        for x in (t, s):
            alive.discard(x)
            for k in (range(len(x)) if len(x) > 1 else ()):
                f = x[:k] + x[k + 1:]
                if f in alive:
                    cofaces[f].discard(x)
                    if len(cofaces[f]) == 1:
                        stack.append(f)
        # a face of t that just lost its last coface but one may now be free
        for k in range(len(t)):
            f = t[:k] + t[k + 1:]
            if f in alive and len(cofaces[f]) == 1:
                stack.append(f)
    return len(alive) == 1


# ---------------------------------------------------------------- digraphs


def has_cycle(g: Digraph) -> bool:
    succ = {v: [] for v in range(1, g.n + 1)}
    for u, v in g.edges:
        succ[u].append(v)
    state = dict.fromkeys(succ, 0)

    def visit(u):
        state[u] = 1
        for w in succ[u]:
            if state[w] == 1 or (state[w] == 0 and visit(w)):
                return True
        state[u] = 2
        return False

    return any(state[v] == 0 and visit(v) for v in succ)


def connected(c: Complex) -> bool:
    n = len(c.simplices[0]) if c.simplices else 0
    if n == 0:
        return False
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in c.simplices[1] if c.dim >= 1 else []:
        parent[find(a)] = find(b)
    return len({find(x) for x in range(n)}) == 1


def contractibility_verdict(g: Digraph) -> str:
    if has_cycle(g):
        return "has_cycle"
    c = order_complex(poset(g))
    if collapses_to_point(c):
        return "collapsible"
    if connected(c) and homology(c).acyclic:
        return "acyclic_homology"
    return "inconclusive"


def _canon(n: int, edges) -> tuple:
    best = None
    for p in permutations(range(1, n + 1)):
        e = tuple(sorted((p[u - 1], p[v - 1]) for u, v in edges))
        if best is None or e < best:
            best = e
    return best


def dag_enumerate(n: int, up_to_iso: bool = True) -> list[Digraph]:
    """Acyclic digraphs on n vertices; every one has a topological order,
    so subsets of the forward pairs reach all isomorphism classes."""
    if n > 5:
        raise CapError("exhaustive DAG enumeration is limited to n <= 5")
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    out, seen = [], set()
    for mask in range(1 << len(pairs)):
        edges = [pairs[b] for b in range(len(pairs)) if mask >> b & 1]
        if up_to_iso:
            key = _canon(n, edges)
            if key in seen:
                continue
            seen.add(key)
            edges = list(key)
        out.append(Digraph(n, frozenset(edges)))
    return out


def iso_class_count(graphs) -> int:
    return len({_canon(g.n, g.edges) for g in graphs})


def lifting_graph(ops, m: int) -> Digraph:
    """Disjoint union of underlying graphs, vertices offset in order."""
    edges, off = [], 0
    for op in ops:
        op = as_op(op)
        g = underlying_graph(op, m)
        edges.extend((u + off, v + off) for u, v in g.edges)
        off += op.k
    return Digraph(off, frozenset(edges))


# ---------------------------------------------------------------- induction step


def _induced(g: Digraph, keep: Sequence[int]) -> tuple[Digraph, list[int]]:
    keep = sorted(keep)
    pos = {v: i + 1 for i, v in enumerate(keep)}
    edges = {(pos[u], pos[v]) for u, v in g.edges if u in pos and v in pos}
    return Digraph(len(keep), frozenset(edges)), keep


def above(g: Digraph, v: int) -> set[int]:
    seen, todo = set(), [v]
    while todo:
        u = todo.pop()
        for a, b in g.edges:
            if a == u and b not in seen:
                seen.add(b)
                todo.append(b)
    seen.discard(v)
    return seen


@dataclass
class Decomposition:
    without_v: Digraph
    g_v: Digraph
    g_v_without_v: Digraph
    cover: bool
    iso_a: bool
    iso_b: bool
    iso_ab: bool

    @property
    def ok(self) -> bool:
        return self.cover and self.iso_a and self.iso_b and self.iso_ab


def _restriction_iso(objs: list[str], keep: list[int], target: Digraph) -> bool:
    """Restricting to ``keep`` is an order isomorphism onto C(target)."""
    image = ["".join(o[v - 1] for v in keep) for o in objs]
    if sorted(image) != sorted(proper_labellings(target)) or len(set(image)) != len(image):
        return False
    return all(leq(a, b) == leq(ia, ib)
               for a, ia in zip(objs, image) for b, ib in zip(objs, image))


def decompose_at_vertex(g: Digraph, v: int) -> Decomposition:
    if any(b == v for _, b in g.edges):
        raise ValueError(f"vertex {v} is the target of an edge")
    up = above(g, v)
    rest = [u for u in range(1, g.n + 1) if u != v]
    low = [u for u in range(1, g.n + 1) if u not in up]
    g1, k1 = _induced(g, rest)
    g2, k2 = _induced(g, low)
    g3, k3 = _induced(g, [u for u in low if u != v])
    objs = proper_labellings(g)
    c_a = [o for o in objs if o[v - 1] == "A"]
    c_b = [o for o in objs if all(o[u - 1] == "B" for u in up)]
    c_ab = [o for o in c_a if o in set(c_b)]
    return Decomposition(
        g1, g2, g3,
        cover=set(c_a) | set(c_b) == set(objs),
        iso_a=_restriction_iso(c_a, k1, g1),
        iso_b=_restriction_iso(c_b, k2, g2),
        iso_ab=_restriction_iso(c_ab, k3, g3),
    )


def source_vertex(g: Digraph) -> int:
    for v in range(1, g.n + 1):
        if not any(b == v for _, b in g.edges):
            return v
    raise ValueError("every vertex has an incoming edge")


def fibre_cube(g: Digraph, base: str, s: Sequence[int]):
    """Labellings agreeing with ``base`` off s and equal to base or C on s.

    Returns the sub-poset when all 2^|s| of them are proper, else None.
    """
    s = sorted(set(s))
    if any(base[v - 1] not in "AB" for v in s):
        raise ValueError("fibre directions must start at A or B")
    objs = []
    for bits in product((0, 1), repeat=len(s)):
        lab = list(base)
        for v, b in zip(s, bits):
            if b:
                lab[v - 1] = "C"
        objs.append("".join(lab))
    if not all(properly_labelled(g, o) for o in objs):
        return None
    return LabelPoset.of(objs)
