"""
Planar black/white trees and their correspondence with complexity <= 2
operations.

A leaf reads as "|", a white vertex v with inputs T1..Tn as
``v T1 v T2 ... v Tn v`` and a black vertex as the plain concatenation
of its inputs.  Blacks are never unary and never adjacent; a nullary
black vertex reads as the empty string.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .pathcore import BAR, PathOp, PathOpError, as_op, complexity

LEAF, WHITE, BLACK = "leaf", "white", "black"


@dataclass(frozen=True)
class BWTree:
    kind: str
    children: tuple["BWTree", ...] = ()
    colour: int = 0

    def __post_init__(self):
        if self.kind == LEAF and self.children:
            raise ValueError("leaves have no inputs")
        if self.kind == BLACK:
            if len(self.children) == 1:
                raise ValueError("unary black vertex")
            if any(c.kind == BLACK for c in self.children):
                raise ValueError("adjacent black vertices")

    def whites(self) -> list["BWTree"]:
        """White vertices in planar preorder."""
        out = [self] if self.kind == WHITE else []
        for c in self.children:
            out.extend(c.whites())
        return out

    def leaves(self) -> int:
        if self.kind == LEAF:
            return 1
        return sum(c.leaves() for c in self.children)

    def has_black(self) -> bool:
        return self.kind == BLACK or any(c.has_black() for c in self.children)

    def size(self) -> int:
        """Token count of the corresponding string."""
        if self.kind == LEAF:
            return 1
        own = len(self.children) + 1 if self.kind == WHITE else 0
        return own + sum(c.size() for c in self.children)

    def profile(self) -> tuple[int, tuple[int, ...], int]:
        """(k, arities by colour, leaves), computed on the tree itself."""
        ws = sorted(self.whites(), key=lambda w: w.colour)
        return len(ws), tuple(len(w.children) for w in ws), self.leaves()


def leaf() -> BWTree:
    return BWTree(LEAF)


def white(colour: int, *children: BWTree) -> BWTree:
    return BWTree(WHITE, tuple(children), colour)


def black(*children: BWTree) -> BWTree:
    return BWTree(BLACK, tuple(children))


def tree_tokens(t: BWTree) -> list[int]:
    if t.kind == LEAF:
        return [BAR]
    if t.kind == BLACK:
        out = []
        for c in t.children:
            out.extend(tree_tokens(c))
        return out
    out = [t.colour]
    for c in t.children:
        out.extend(tree_tokens(c))
        out.append(t.colour)
    return out


def tree_to_op(t: BWTree) -> PathOp:
    return PathOp(tuple(tree_tokens(t)))


def op_to_tree(op) -> BWTree:
    """Inverse of tree_to_op on operations of complexity at most 2."""
    op = as_op(op)
    if complexity(op) > 2:
        raise PathOpError(f"{op} has complexity > 2")
    tree = _as_tree(_units(op.tokens))
    if tree_to_op(tree) != op:
        raise PathOpError(f"{op} does not read as a planar tree")
    return tree


def _units(toks: Sequence[int]) -> list[BWTree]:
    last = {}
    for idx, t in enumerate(toks):
        last[t] = idx
    out = []
    pos = 0
    while pos < len(toks):
        t = toks[pos]
        if t == BAR:
            out.append(leaf())
            pos += 1
            continue
        end = last[t]
        block = toks[pos:end + 1]
        gaps = [[]]
        for s in block[1:]:
            if s == t:
                gaps.append([])
            else:
                gaps[-1].append(s)
        gaps.pop()
        out.append(white(t, *(_as_tree(_units(g)) for g in gaps)))
        pos = end + 1
    return out


def _as_tree(units: list[BWTree]) -> BWTree:
    return units[0] if len(units) == 1 else black(*units)


def number_preorder(t: BWTree) -> BWTree:
    counter = iter(range(1, 10**9))

    def rec(node):
        if node.kind == WHITE:
            c = next(counter)
            return BWTree(WHITE, tuple(rec(ch) for ch in node.children), c)
        return BWTree(node.kind, tuple(rec(ch) for ch in node.children))

    return rec(t)


# ---------------------------------------------------------------- enumeration


def _compositions(total: int, parts: int, least: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(least, total - least * (parts - 1) + 1):
        for rest in _compositions(total - first, parts - 1, least):
            yield (first,) + rest


def _products(choices):
    if not choices:
        yield ()
        return
    for head in choices[0]:
        for tail in _products(choices[1:]):
            yield (head,) + tail


@lru_cache(maxsize=None)
def _shapes(size: int, kinds: frozenset, blacks: bool) -> tuple[BWTree, ...]:
    """Trees of ``size`` tokens with root kind in ``kinds``; ``blacks`` allows
    black vertices anywhere below."""
    out = []
    below = frozenset({LEAF, WHITE, BLACK}) if blacks else frozenset({LEAF, WHITE})
    if LEAF in kinds and size == 1:
        out.append(leaf())
    if WHITE in kinds:
        for arity in range(0, size):
            for sizes in _compositions(size - arity - 1, arity, 0):
                for kids in _products([_shapes(s, below, blacks) for s in sizes]):
                    out.append(BWTree(WHITE, kids))
    if BLACK in kinds:
        if size == 0:
            out.append(BWTree(BLACK))
        nb = frozenset({LEAF, WHITE})
        for p in range(2, size + 1):
            for sizes in _compositions(size, p, 1):
                for kids in _products([_shapes(s, nb, blacks) for s in sizes]):
                    out.append(BWTree(BLACK, kids))
    return tuple(out)


def enumerate_trees(max_size: int, white_only: bool = False) -> Iterator[BWTree]:
    """Every planar tree up to ``max_size`` tokens, whites numbered in preorder.

    ``white_only`` drops all black vertices (the grafting trees).
    Deterministic, duplicate-free.
    """
    kinds = frozenset({LEAF, WHITE}) if white_only else frozenset({LEAF, WHITE, BLACK})
    for size in range(0, max_size + 1):
        for shape in _shapes(size, kinds, not white_only):
            yield number_preorder(shape)


def tree_counts(trees) -> list[tuple[int, tuple[int, ...], int, int]]:
    tally: dict = {}
    for t in trees:
        p = t.profile()
        tally[p] = tally.get(p, 0) + 1
    return [(k, ar, b, n) for (k, ar, b), n in sorted(tally.items())]


# ---------------------------------------------------------------- labelled paths


def vertex_paths(t: BWTree):
    """Maximal root-to-top paths as (white colours along the path, ends_at_leaf)."""
    out = []

    def rec(node, path):
        if node.kind == LEAF:
            out.append((tuple(path), True))
            return
        here = path + [node.colour] if node.kind == WHITE else path
        if not node.children:
            out.append((tuple(here), False))
            return
        for c in node.children:
            rec(c, here)

    rec(t, [])
    return out


def one_c_per_leaf_path(t: BWTree, labels: Sequence[str]) -> bool:
    """Every root-to-leaf path (leaves = inputs) crosses exactly one C vertex."""
    for path, to_leaf in vertex_paths(t):
        if to_leaf and sum(labels[c - 1] == "C" for c in path) != 1:
            return False
    return True


def bimodule_shape(t: BWTree, labels: Sequence[str]) -> bool:
    """Leaf paths cross exactly one C; paths ending at a nullary vertex cross
    one C or are labelled A throughout."""
    for path, to_leaf in vertex_paths(t):
        n_c = sum(labels[c - 1] == "C" for c in path)
        if n_c == 1:
            continue
        if to_leaf or n_c > 1:
            return False
        if not all(labels[c - 1] == "A" for c in path):
            return False
    return True
