"""
Budgeted generation of the suboperads H_m (eta(m) and the identities,
closed under joins, composition and the symmetric action), membership,
counting and on-disk tables.

Tables store one sigma-canonical representative per Sigma-orbit; since the
generated sets are Sigma-closed, exact membership is orbit membership.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable

from .joincalc import even_cuts, join_op, odd_cuts, split_at, valid_bounds
from .pathcore import (
    BAR,
    PathOp,
    PathOpError,
    as_op,
    canonical_tokens,
    complexity_tokens,
    compose,
    eta,
    identity,
    is_identity,
    key,
    parse,
    permute,
)

FORMAT_VERSION = 1


class TableError(Exception):
    pass


class BudgetError(TableError):
    pass


def _key(tokens) -> str:
    return " ".join("|" if t == BAR else str(t) for t in tokens)


def _tokens(k: str) -> tuple[int, ...]:
    return parse(k).tokens if k else ()


@dataclass
class GenTable:
    m: int
    budget: int
    entries: dict[str, tuple] = field(default_factory=dict)
    # which closure rule first produced each entry
    origin: dict[str, str] = field(default_factory=dict)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def ops(self) -> list[PathOp]:
        return [parse(k) if k else PathOp(()) for k in self.entries]

    def contains(self, op, up_to_sigma: bool = True) -> bool:
        """Orbit lookup.  Raises BudgetError past the budget ("unknown")."""
        op = as_op(op)
        if len(op) > self.budget:
            raise BudgetError(f"{len(op)} tokens exceeds budget {self.budget}")
        return _key(canonical_tokens(op.tokens)) in self.entries

    def lookup(self, op) -> bool | None:
        try:
            return self.contains(op)
        except BudgetError:
            return None

    def witness(self, op) -> tuple:
        """Witness for op itself: the stored one, wrapped in a Perm when op is not canonical."""
        op = as_op(op)
        canon = canonical_tokens(op.tokens)
        ck = _key(canon)
        if ck not in self.entries:
            raise KeyError(key(op))
        if canon == op.tokens:
            return self.entries[ck]
        # sigma sends canon colours to op colours
        sigma = {}
        for a, b in zip(canon, op.tokens):
            if a != BAR:
                sigma[a] = b
        return ("perm", ck, tuple(sigma[c] for c in range(1, len(sigma) + 1)))

    def replay(self, witness) -> PathOp:
        return replay(witness, self.entries)

    def counts(self) -> list[tuple[int, tuple[int, ...], int, int]]:
        return counts(self.ops())


def replay(witness, entries: dict[str, tuple], _memo=None) -> PathOp:
    """Rebuild the operation a witness describes (joins and composites canonicalised)."""
    memo = {} if _memo is None else _memo

    def get(k):
        if k not in memo:
            memo[k] = replay(entries[k], entries, memo)
        return memo[k]

    kind = witness[0]
    if kind == "eta":
        return eta(witness[1])
    if kind == "identity":
        return identity(witness[1])
    if kind == "join":
        _, lk, i, rk, j, m = witness
        return PathOp(canonical_tokens(join_op(get(lk), i, get(rk), j, m).tokens))
    if kind == "gamma":
        _, outer, inner = witness
        return PathOp(canonical_tokens(compose(get(outer), [get(k) for k in inner]).tokens))
    if kind == "perm":
        _, base, sigma = witness
        return permute(get(base), sigma)
    raise TableError(f"unknown witness {witness!r}")


def counts(ops: Iterable[PathOp]) -> list[tuple[int, tuple[int, ...], int, int]]:
    """(k, arity profile, bars, count) rows in sorted order."""
    tally: dict = defaultdict(int)
    for op in ops:
        tally[op.k, op.arities(), op.bars] += 1
    return [(k, ar, b, n) for (k, ar, b), n in sorted(tally.items())]


def counts_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "arities", "bars", "count"])
    for k, ar, b, n in rows:
        w.writerow([k, " ".join(map(str, ar)), b, n])
    return buf.getvalue()


# ---------------------------------------------------------------- generation


def _raw_join(x, i, y, j, m, shift):
    # join on token tuples; y colours shifted by ``shift``
    out = []
    xs = _cut_pieces(x, i)
    ys = _cut_pieces(tuple(t + shift if t else t for t in y), j)
    for n in range(m + 1):
        out.extend(xs[n // 2] if n % 2 == 0 else ys[n // 2])
    return out


def _cut_pieces(tokens, cut):
    pieces = [[]]
    bar = 0
    nxt = 0
    for t in tokens:
        if t == BAR:
            bar += 1
            if nxt < len(cut) and cut[nxt] == bar:
                nxt += 1
                pieces.append([])
                continue
        pieces[-1].append(t)
    return pieces


def _join_results(x, y, m, budget):
    """Canonical joins of two canonical token tuples, with their cuts."""
    if len(x) + len(y) - (m - 1) > budget:
        return
    xb, yb = x.count(BAR), y.count(BAR)
    h, g = even_cuts(m), odd_cuts(m)
    if xb < h or yb < g:
        return
    shift = max(x, default=0)
    for i in combinations(range(1, xb + 1), h):
        for j in combinations(range(1, yb + 1), g):
            yield canonical_tokens(_raw_join(x, i, y, j, m, shift)), i, j


def _arities(tokens):
    counts_ = defaultdict(int)
    for t in tokens:
        if t != BAR:
            counts_[t] += 1
    return {c: n - 1 for c, n in counts_.items()}


def _raw_compose(x, c, y):
    """x with y plugged into colour c (identities elsewhere), canonicalised."""
    segs = _cut_pieces(y, tuple(range(1, y.count(BAR) + 1)))
    shift = max(x, default=0)
    out = []
    used = 0
    for t in x:
        if t == c:
            out.extend(v + shift if v else v for v in segs[used])
            used += 1
        else:
            out.append(t)
    return canonical_tokens(out)


def generate(m: int, budget: int, rules: tuple[str, ...] = ("join", "gamma")) -> GenTable:
    """Least fixpoint of {eta(m)} and identities under the given rules, within ``budget`` tokens.

    Semi-naive: each round combines the newly found entries with everything
    known so far.  Joins and partial composites of orbit representatives
    cover whole orbits because both operations are Sigma-equivariant.
    """
    if m < 1:
        raise PathOpError("m must be >= 1")
    if budget < m - 1:
        raise BudgetError(f"budget {budget} cannot hold eta({m})")
    table = GenTable(m, budget)
    known: set[tuple] = set()
    by_len: dict[int, list[tuple]] = defaultdict(list)
    by_bars: dict[tuple, list[tuple]] = defaultdict(list)
    by_arity: dict[tuple, list[tuple]] = defaultdict(list)

    def add(tokens, witness, rule):
        if tokens in known:
            return False
        known.add(tokens)
        k = _key(tokens)
        table.entries[k] = witness
        table.origin[k] = rule
        return True

    def index(tokens):
        by_len[len(tokens)].append(tokens)
        by_bars[tokens.count(BAR), len(tokens)].append(tokens)
        for n in set(_arities(tokens).values()):
            by_arity[n, len(tokens)].append(tokens)

    frontier = []
    e = eta(m).tokens
    add(e, ("eta", m), "seed")
    frontier.append(e)
    n = 0
    while 2 * n + 1 <= budget:
        t = identity(n).tokens
        add(t, ("identity", n), "seed")
        frontier.append(t)
        n += 1

    while frontier:
        frontier.sort(key=lambda t: (len(t), t))
        for a in frontier:
            index(a)
        new = []
        for a in frontier:
            if "join" in rules:
                room = budget + m - 1 - len(a)
                partners = [b for ln in range(room + 1) for b in by_len.get(ln, ())]
                for b in partners:
                    for x, y in ((a, b), (b, a)):
                        for res, i, j in _join_results(x, y, m, budget):
                            if add(res, ("join", _key(x), i, _key(y), j, m), "join"):
                                new.append(res)
            if "gamma" in rules:
                for x, y in _gamma_pairs(a, by_bars, by_arity, budget):
                    for res, w in _gamma_results(x, y, budget):
                        if add(res, w, "gamma"):
                            new.append(res)
        frontier = new
    return table


def _gamma_pairs(a, by_bars, by_arity, budget):
    # partial composite of x and y (slot arity n) has len(x) + len(y) - 2n - 1 tokens
    for n in sorted(set(_arities(a).values())):
        for ln in range(budget + 2 * n + 2 - len(a)):
            for y in by_bars.get((n, ln), ()):
                yield a, y
    n = a.count(BAR)
    for ln in range(budget + 2 * n + 2 - len(a)):
        for x in by_arity.get((n, ln), ()):
            if x != a:
                yield x, a


@lru_cache(maxsize=None)
def _identity_key(n: int) -> str:
    return _key(identity(n).tokens)


def _gamma_results(x, y, budget):
    """Partial composites x o_c y over every colour c with matching arity."""
    ybars = y.count(BAR)
    ar = _arities(x)
    for c in sorted(ar):
        n = ar[c]
        if n != ybars or len(x) + len(y) - 2 * n - 1 > budget:
            continue
        inner = [_identity_key(ar[d]) for d in range(1, len(ar) + 1)]
        inner[c - 1] = _key(y)
        yield _raw_compose(x, c, y), ("gamma", _key(x), inner)


def gamma_novelty(m: int, budget: int) -> dict:
    """Entries reachable with composition but not by joins alone."""
    full = generate(m, budget)
    joins = generate(m, budget, rules=("join",))
    extra = sorted(set(full.entries) - set(joins.entries))
    return {"m": m, "budget": budget, "full": len(full), "join_only": len(joins), "gamma_only": extra}


# ---------------------------------------------------------------- goal-directed membership


class HatOracle:
    """Membership in the join closure of eta(m) and the identities, at any size.

    Searches join decompositions top-down.  A side without colours must be
    eta(m) itself (the only colourless member), so decompositions with two
    coloured sides recurse on strictly fewer colours, and eta-joins are
    explored as a finite search among strings with the same colours.
    Composition adds nothing to this closure (compare ``gamma_novelty``).
    """

    def __init__(self, m: int, strict_unary: bool = False):
        # strict_unary: single-colour members must be identities (the
        # "unary operations are the identities" clause read as a filter)
        self.m = m
        self.strict_unary = strict_unary
        self._memo: dict[tuple, tuple | None] = {}
        self._core: dict[tuple, tuple | None] = {}

    def contains(self, op, up_to_sigma: bool = True) -> bool:
        return self.derivation(as_op(op).tokens) is not None

    def lookup(self, op) -> bool:
        return self.contains(op)

    def derivation(self, tokens) -> tuple | None:
        """Witness-like derivation of the canonical form, or None."""
        tokens = canonical_tokens(tokens)
        if tokens in self._memo:
            return self._memo[tokens]
        res = self._derive(tokens)
        self._memo[tokens] = res
        return res

    def _derive(self, z):
        m = self.m
        if not any(t != BAR for t in z):
            return ("eta", m) if len(z) == m - 1 else None
        if complexity_tokens(z, bound=m) > m:
            return None
        if self.strict_unary and len({t for t in z if t != BAR}) == 1:
            return ("identity", z.count(BAR)) if is_identity(PathOp(z)) else None
        # breadth-first over eta-predecessors; each pred set is closed, so a
        # search that finds no core member rules out every node it saw
        seen = {z: None}
        queue = [z]
        head = 0
        while head < len(queue):
            w = queue[head]
            head += 1
            known = self._memo.get(w) if w != z else None
            if known is not None:
                return self._unwind(w, ("member",), seen)
            core = self._core_step(w)
            if core is not None:
                return self._unwind(w, core, seen)
            for pred, step in self._eta_preds(w):
                if pred in seen:
                    continue
                if pred in self._memo and self._memo[pred] is None:
                    continue
                seen[pred] = (w, step)
                queue.append(pred)
        for w in seen:
            self._memo[w] = None
        return None

    def _unwind(self, w, core, seen):
        # chain[0] derives w; each later step derives the next string towards z
        chain = [core]
        node = w
        while seen[node] is not None:
            parent, step = seen[node]
            chain.append(step)
            node = parent
            self._memo.setdefault(node, ("chain", tuple(chain)) if len(chain) > 1 else step)
        return chain[-1] if len(chain) == 1 else ("chain", tuple(chain))

    def _core_step(self, w):
        if w in self._core:
            return self._core[w]
        res = None
        if is_identity(PathOp(w)):
            res = ("identity", w.count(BAR))
        else:
            m = self.m
            for bounds in valid_bounds(w, m):
                xt, i, yt, j = split_at(w, bounds, m)
                if not _coloured(xt) or not _coloured(yt):
                    continue
                if self.derivation(xt) is not None and self.derivation(yt) is not None:
                    res = ("join", bounds)
                    break
        self._core[w] = res
        return res

    def _eta_preds(self, w):
        """Strings v with w = join(v, i, eta, j) or join(eta, i, v, j)."""
        m = self.m
        out = []
        for bounds in valid_bounds(w, m):
            xt, i, yt, j = split_at(w, bounds, m)
            if not _coloured(yt) and len(yt) == m - 1 and _coloured(xt):
                out.append((canonical_tokens(xt), ("join", bounds)))
            elif not _coloured(xt) and len(xt) == m - 1 and _coloured(yt):
                out.append((canonical_tokens(yt), ("join", bounds)))
        return out

    def decomposition(self, tokens):
        """Segment bounds of one step of a derivation of ``tokens`` (raw colours kept).

        Returns ("identity",), ("eta",) or ("join", bounds) where the join
        sides of ``tokens`` at ``bounds`` are members again.
        """
        tokens = tuple(tokens)
        canon = canonical_tokens(tokens)
        d = self.derivation(canon)
        if d is None:
            raise KeyError(_key(tokens))
        if d[0] in ("eta", "identity"):
            return (d[0],)
        if d[0] == "join":
            return d
        # chain: the last step reaches the query string itself
        return d[1][-1]

    def witness(self, op) -> tuple:
        """A table-style Join witness (sides as canonical keys) for op."""
        op = as_op(op)
        step = self.decomposition(op.tokens)
        if step[0] == "eta":
            return ("eta", self.m)
        if step[0] == "identity":
            return ("identity", op.bars)
        xt, i, yt, j = split_at(op.tokens, step[1], self.m)
        return ("join", _key(canonical_tokens(xt)), i, _key(canonical_tokens(yt)), j, self.m)


def _coloured(tokens) -> bool:
    return any(t != BAR for t in tokens)


# ---------------------------------------------------------------- persistence


def _body_lines(table: GenTable) -> list[str]:
    lines = []
    for k in sorted(table.entries, key=lambda s: (len(_tokens(s)), _tokens(s))):
        lines.append(json.dumps({"key": k, "witness": _wjson(table.entries[k]),
                                 "rule": table.origin.get(k, "")}, sort_keys=True))
    return lines


def _wjson(w):
    return [list(v) if isinstance(v, tuple) else v for v in w]


def _wload(w):
    return tuple(tuple(v) if isinstance(v, list) and w[0] != "gamma" else v for v in w)


def save_table(table: GenTable, path) -> None:
    """Write header + one JSON record per entry; atomic replace."""
    lines = _body_lines(table)
    body = "".join(line + "\n" for line in lines)
    header = {
        "format": "hatgen-table",
        "version": FORMAT_VERSION,
        "m": table.m,
        "budget": table.budget,
        "count": len(lines),
        "sha256": hashlib.sha256(body.encode()).hexdigest(),
    }
    data = json.dumps(header, sort_keys=True) + "\n" + body
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".jsonl")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_table(path) -> GenTable:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    first, _, body = text.partition("\n")
    try:
        header = json.loads(first)
    except json.JSONDecodeError as exc:
        raise TableError(f"{path}: bad header") from exc
    if header.get("format") != "hatgen-table":
        raise TableError(f"{path}: not a table file")
    if header.get("version") != FORMAT_VERSION:
        raise TableError(f"{path}: version {header.get('version')} != {FORMAT_VERSION}")
    lines = body.splitlines()
    if len(lines) != header["count"] or (body and not body.endswith("\n")):
        raise TableError(f"{path}: partial file ({len(lines)} of {header['count']} records)")
    if hashlib.sha256(body.encode()).hexdigest() != header["sha256"]:
        raise TableError(f"{path}: checksum mismatch")
    table = GenTable(header["m"], header["budget"])
    for line in lines:
        rec = json.loads(line)
        table.entries[rec["key"]] = _wload(rec["witness"])
        table.origin[rec["key"]] = rec.get("rule", "")
    return table


def cache_path(cache_dir, m: int, budget: int):
    return os.path.join(os.fspath(cache_dir), f"hat-m{m}-b{budget}-v{FORMAT_VERSION}.jsonl")


def cached_generate(cache_dir, m: int, budget: int) -> GenTable:
    """Load a cached table for (m, budget), regenerating when missing or stale."""
    path = cache_path(cache_dir, m, budget)
    if os.path.exists(path):
        try:
            return load_table(path)
        except TableError:
            pass
    table = generate(m, budget)
    save_table(table, path)
    return table
