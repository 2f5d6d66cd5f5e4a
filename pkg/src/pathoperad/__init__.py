"""Combinatorics of the lattice path operad, its complexity filtration and
the suboperads governing operads of complexity m."""

from .pathcore import (
    BAR,
    PathOp,
    PathOpError,
    complexity,
    compose,
    corner_count,
    eta,
    identity,
    in_filtration,
    parse,
    permute,
    projection,
    render,
    sigma_canonical,
)

__all__ = [
    "BAR",
    "PathOp",
    "PathOpError",
    "complexity",
    "compose",
    "corner_count",
    "eta",
    "identity",
    "in_filtration",
    "parse",
    "permute",
    "projection",
    "render",
    "sigma_canonical",
]
