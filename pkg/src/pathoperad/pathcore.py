"""
Lattice path operations as strings of colour tokens and vertical bars.

An operation with k sources is a token sequence in which the colours
1..k all occur; colour i occurring n_i + 1 times gives source arity n_i,
and the number of bars is the target arity.  Bars are stored as ``BAR``
(0), colours as positive ints.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

BAR = 0

_GENERAL_TOKEN = re.compile(r"\s*(\||\d+)")


class PathOpError(ValueError):
    pass


@dataclass(frozen=True)
class PathOp:
    tokens: tuple[int, ...]

    def __post_init__(self):
        toks = tuple(self.tokens)
        object.__setattr__(self, "tokens", toks)
        seen = set()
        for t in toks:
            if not isinstance(t, int) or t < 0:
                raise PathOpError(f"bad token {t!r}")
            if t != BAR:
                seen.add(t)
        k = len(seen)
        if seen and max(seen) != k:
            missing = sorted(set(range(1, max(seen) + 1)) - seen)
            raise PathOpError(f"colour gap: missing {missing}")

    @property
    def k(self) -> int:
        return max((t for t in self.tokens), default=0)

    @property
    def bars(self) -> int:
        return self.tokens.count(BAR)

    def arities(self) -> tuple[int, ...]:
        counts = [0] * self.k
        for t in self.tokens:
            if t != BAR:
                counts[t - 1] += 1
        return tuple(c - 1 for c in counts)

    def profile(self) -> tuple[tuple[int, ...], int]:
        return self.arities(), self.bars

    def __len__(self):
        return len(self.tokens)

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"PathOp({render(self)!r})"


def parse(text: str) -> PathOp:
    """Parse compact ("213|13|23") or general ("2 1 3 | 1 3 | 2 3") text.

    Any whitespace switches to the general form, where colours are
    space-separated decimal integers.
    """
    text = text.strip()
    if not text:
        return PathOp(())
    if re.search(r"\s", text):
        tokens = []
        pos = 0
        while pos < len(text):
            match = _GENERAL_TOKEN.match(text, pos)
            if match is None:
                rest = text[pos:].strip()
                if not rest:
                    break
                raise PathOpError(f"invalid character {rest[0]!r} in {text!r}")
            tok = match.group(1)
            tokens.append(BAR if tok == "|" else _colour(tok, text))
            pos = match.end()
        return PathOp(tuple(tokens))
    tokens = []
    for ch in text:
        if ch == "|":
            tokens.append(BAR)
        elif ch.isdigit():
            tokens.append(_colour(ch, text))
        else:
            raise PathOpError(f"invalid character {ch!r} in {text!r}")
    return PathOp(tuple(tokens))


def _colour(tok: str, text: str) -> int:
    value = int(tok)
    if value < 1:
        raise PathOpError(f"empty colour index {tok!r} in {text!r}")
    return value


def render(op: PathOp, style: str = "auto") -> str:
    """Render ``op``; "auto" is compact when k <= 9, general otherwise."""
    if style == "auto":
        style = "compact" if op.k <= 9 else "general"
    if style == "compact":
        if op.k > 9:
            raise PathOpError("compact form needs k <= 9")
        return "".join("|" if t == BAR else str(t) for t in op.tokens)
    if style == "general":
        return " ".join("|" if t == BAR else str(t) for t in op.tokens)
    raise PathOpError(f"unknown style {style!r}")


def key(op: PathOp) -> str:
    """Persistence key: general form of the exact token sequence."""
    return render(op, "general")


def as_op(x) -> PathOp:
    if isinstance(x, PathOp):
        return x
    if isinstance(x, str):
        return parse(x)
    return PathOp(tuple(x))


def identity(n: int) -> PathOp:
    if n < 0:
        raise PathOpError("identity arity must be >= 0")
    toks = [1]
    for _ in range(n):
        toks += [BAR, 1]
    return PathOp(tuple(toks))


def eta(m: int) -> PathOp:
    """The nullary unit of complexity ``m``: m - 1 bars and no colours."""
    if m < 1:
        raise PathOpError("eta needs m >= 1")
    return PathOp((BAR,) * (m - 1))


def is_identity(op: PathOp) -> bool:
    toks = op.tokens
    if op.k != 1 or len(toks) % 2 == 0:
        return False
    return all(t == (1 if idx % 2 == 0 else BAR) for idx, t in enumerate(toks))


def segments(op: PathOp) -> list[tuple[int, ...]]:
    """Bar-delimited segments; always bars + 1 of them."""
    out = [[]]
    for t in op.tokens:
        if t == BAR:
            out.append([])
        else:
            out[-1].append(t)
    return [tuple(s) for s in out]


def compose(x, ys: Sequence) -> PathOp:
    """Operadic composite: occurrence j of colour i becomes segment j of ys[i].

    Colours of ys[i] are shifted by the total colour count of ys[:i].
    """
    x = as_op(x)
    ys = [as_op(y) for y in ys]
    if len(ys) != x.k:
        raise PathOpError(f"expected {x.k} inputs, got {len(ys)}")
    arities = x.arities()
    segs = []
    offset = 0
    for idx, y in enumerate(ys):
        if y.bars != arities[idx]:
            raise PathOpError(
                f"arity mismatch at input {idx + 1}: source arity "
                f"{arities[idx]}, target arity {y.bars}"
            )
        segs.append([tuple(t + offset for t in s) for s in segments(y)])
        offset += y.k
    used = [0] * x.k
    out = []
    for t in x.tokens:
        if t == BAR:
            out.append(BAR)
        else:
            out.extend(segs[t - 1][used[t - 1]])
            used[t - 1] += 1
    return PathOp(tuple(out))


def partial_compose(x, c: int, y) -> PathOp:
    """x with y plugged into colour c and identities elsewhere."""
    x, y = as_op(x), as_op(y)
    ar = x.arities()
    ys = [identity(n) for n in ar]
    ys[c - 1] = y
    return compose(x, ys)


def _check_perm(sigma: Sequence[int], k: int) -> tuple[int, ...]:
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(1, k + 1)):
        raise PathOpError(f"{sigma} is not a permutation of 1..{k}")
    return sigma


def permute(op, sigma: Sequence[int]) -> PathOp:
    """Relabel colour c as sigma[c - 1]."""
    op = as_op(op)
    sigma = _check_perm(sigma, op.k)
    return PathOp(tuple(BAR if t == BAR else sigma[t - 1] for t in op.tokens))


def invert(sigma: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(sigma)
    for src, dst in enumerate(sigma, 1):
        inv[dst - 1] = src
    return tuple(inv)


def canonical_tokens(tokens: Sequence[int]) -> tuple[int, ...]:
    # hot path in generation; avoids PathOp validation
    relabel = {}
    out = []
    for t in tokens:
        if t == BAR:
            out.append(BAR)
        else:
            c = relabel.get(t)
            if c is None:
                c = relabel[t] = len(relabel) + 1
            out.append(c)
    return tuple(out)


def sigma_canonical(op) -> tuple[PathOp, tuple[int, ...]]:
    """Relabel colours by order of first occurrence.

    Returns (rep, sigma) with permute(op, sigma) == rep.
    """
    op = as_op(op)
    relabel = {}
    for t in op.tokens:
        if t != BAR and t not in relabel:
            relabel[t] = len(relabel) + 1
    sigma = tuple(relabel[c] for c in range(1, op.k + 1))
    return permute(op, sigma), sigma


def is_canonical(op: PathOp) -> bool:
    return canonical_tokens(op.tokens) == op.tokens


def _check_pair(op: PathOp, a: int, b: int):
    if not (1 <= a < b <= op.k):
        raise PathOpError(f"need 1 <= a < b <= {op.k}, got ({a}, {b})")


def projection(x, a: int, b: int) -> list[int]:
    x = as_op(x)
    _check_pair(x, a, b)
    return [t for t in x.tokens if t == a or t == b]


def _alternations(seq) -> int:
    return sum(1 for p, q in zip(seq, seq[1:]) if p != q)


def corner_count(x, a: int, b: int) -> int:
    """Corners of the pairwise lattice path: alternations in the projection."""
    return _alternations(projection(x, a, b))


def pair_counts(x) -> dict[tuple[int, int], int]:
    """corner_count for every pair a < b."""
    x = as_op(x)
    k = x.k
    # positions of each colour, then merge per pair
    seqs = [[] for _ in range(k + 1)]
    for idx, t in enumerate(x.tokens):
        if t != BAR:
            seqs[t].append(idx)
    out = {}
    for a, b in combinations(range(1, k + 1), 2):
        merged = sorted([(p, a) for p in seqs[a]] + [(p, b) for p in seqs[b]])
        out[a, b] = _alternations([c for _, c in merged])
    return out


def complexity(x) -> int:
    x = as_op(x)
    return max(pair_counts(x).values(), default=0)


def complexity_tokens(tokens: Sequence[int], bound: int | None = None) -> int:
    """complexity() on a raw token tuple; stops early once ``bound`` is exceeded."""
    last_pos = {}
    counts = {}
    best = 0
    for pos, t in enumerate(tokens):
        if t == BAR:
            continue
        mine = last_pos.get(t, -1)
        for other, opos in last_pos.items():
            if other != t and opos > mine:
                pair = (other, t) if other < t else (t, other)
                n = counts.get(pair, 0) + 1
                counts[pair] = n
                if n > best:
                    best = n
                    if bound is not None and best > bound:
                        return best
        last_pos[t] = pos
    return best


def in_filtration(x, m: int) -> bool:
    if m < 0:
        raise PathOpError("filtration level must be >= 0")
    return complexity(x) <= m


def enumerate_canonical(max_tokens: int, min_tokens: int = 0):
    """Yield every sigma-canonical PathOp with min..max tokens.

    Exactly one representative per Sigma-orbit, in length-then-lexicographic
    order (bar sorts first).
    """
    for length in range(min_tokens, max_tokens + 1):
        yield from (PathOp(t) for t in _rgs(length))


def _rgs(length: int):
    out = []

    def rec(prefix, k):
        if len(prefix) == length:
            out.append(tuple(prefix))
            return
        for t in range(0, k + 2):
            prefix.append(t)
            rec(prefix, max(k, t))
            prefix.pop()

    rec([], 0)
    return out



def closure_sweep(max_m: int, max_tokens: int):
    """Check that x o_c y has complexity <= max(c(x), c(y)) for all canonical
    x, y of complexity <= max_m with len(x) + len(y) <= max_tokens, over every
    colour c whose arity matches y.  That inequality is closure of every L_m,
    m <= max_m, at once.

    Returns ({m: pairs checked inside L_m}, counterexamples as (x, c, y)).
    Canonical representatives suffice since complexity is Sigma-invariant
    and composition is equivariant.
    """
    by_bars: dict[int, list] = {}
    ops = []
    for length in range(max_tokens + 1):
        for t in _rgs(length):
            cx = complexity_tokens(t, max_m)
            if cx <= max_m:
                ops.append((t, cx))
                by_bars.setdefault(t.count(BAR), []).append((t, cx))
    segs: dict = {}
    checked = [0] * (max_m + 1)
    bad = []
    for x, cx in ops:
        k = max(x, default=0)
        room = max_tokens - len(x)
        for c in range(1, k + 1):
            where = [p for p, t in enumerate(x) if t == c]
            for y, cy in by_bars.get(len(where) - 1, ()):
                if len(y) > room:
                    break
                s = segs.get((y, k))
                if s is None:
                    s = segs[y, k] = [tuple(v + k if v else v for v in seg)
                                   for seg in segments(PathOp(y))]
                z = list(x)
                for p, seg in zip(reversed(where), reversed(s)):
                    z[p:p + 1] = seg
                top = cx if cx > cy else cy
                checked[top] += 1
                if complexity_tokens(z, top) > top:
                    bad.append((x, c, y))
    counts = {m: sum(checked[: m + 1]) for m in range(1, max_m + 1)}
    return counts, bad
