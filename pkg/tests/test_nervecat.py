from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from pathoperad.labelcalc import Digraph, parse_edges
from pathoperad.nervecat import (
    CapError, LabelPoset, collapses_to_point, connected, contractibility_verdict, dag_enumerate,
    decompose_at_vertex, fibre_cube, has_cycle, homology, invariant_factors, iso_class_count, leq,
    lifting_graph, order_complex, poset, proper_labellings, simplicial_complex, source_vertex,
)
from pathoperad.pathcore import parse

RP2 = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
       (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]


def test_homology_fixtures():
    circle = simplicial_complex([(0, 1), (1, 2), (0, 2)])
    assert homology(circle).betti == [0, 1]
    sphere = simplicial_complex(list(combinations(range(4), 3)))
    assert homology(sphere).betti == [0, 0, 1]
    rp2 = homology(simplicial_complex(RP2))
    assert rp2.betti == [0, 0, 0]
    assert rp2.torsion[1] == [2]
    assert not rp2.acyclic
    assert homology(simplicial_complex([(0, 1, 2)])).acyclic


def test_invariant_factors():
    assert invariant_factors([{0: 2}]) == [2]
    assert invariant_factors([{0: 1, 1: 1}, {0: 1, 1: -1}]) == [1, 2]


def test_collapses():
    assert collapses_to_point(simplicial_complex([(0, 1, 2), (2, 3)]))
    assert not collapses_to_point(simplicial_complex([(0, 1), (1, 2), (0, 2)]))


def test_star_poset():
    g = parse_edges("2>1,2>3", 3)
    objs = proper_labellings(g)
    assert len(objs) == 11
    assert {"BBB", "BCB"} <= set(objs) and "CCC" not in objs
    p = poset(g)
    assert p.is_partial_order()
    assert ("BAB", "CAC") in p.relations()
    assert leq("AAA", "CAA") and not leq("CAA", "AAA")
    assert contractibility_verdict(g) == "collapsible"


def test_cycle_verdict():
    assert contractibility_verdict(parse_edges("1>2,2>3,3>1")) == "has_cycle"


def test_dag_counts():
    assert [len(dag_enumerate(n)) for n in range(6)] == [1, 1, 2, 6, 31, 302]
    raw = dag_enumerate(4, up_to_iso=False)
    assert len(raw) == 2 ** 6 and not any(map(has_cycle, raw))
    assert iso_class_count(raw) == 31
    with pytest.raises(CapError):
        dag_enumerate(6)


def test_caps():
    with pytest.raises(CapError):
        LabelPoset.of(["A"] * 5, cap=3)


def test_decomposition_on_path():
    g = parse_edges("1>2,2>3")
    d = decompose_at_vertex(g, 1)
    assert d.ok
    assert d.g_v.n == 1
    with pytest.raises(ValueError):
        decompose_at_vertex(g, 2)


def test_fibre_cube():
    g = parse_edges("1>2")
    assert fibre_cube(g, "AB", [1, 2]) is None
    cube = fibre_cube(g, "AB", [2])
    assert cube.objects == ["AB", "AC"]


def test_lifting_graph_offsets():
    g = lifting_graph([parse("1212"), parse("12321434")], 3)
    assert g.n == 6
    assert (3, 5) in g.edges and not has_cycle(g)


@st.composite
def dags(draw, n_max=4):
    n = draw(st.integers(1, n_max))
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    perm = draw(st.permutations(list(range(1, n + 1))))
    return Digraph(n, frozenset((perm[u - 1], perm[v - 1]) for u, v in chosen))


@given(dags())
@settings(max_examples=40, deadline=None)
def test_nerve_contractible(g):
    c = order_complex(poset(g))
    assert connected(c) and homology(c).acyclic
    assert decompose_at_vertex(g, source_vertex(g)).ok
