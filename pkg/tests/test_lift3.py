import pytest
from hypothesis import given, settings, strategies as st

from pathoperad.hatgen import HatOracle
from pathoperad.labelcalc import in_circ, in_plus, labelled, parse_labelled
from pathoperad.lift3 import (
    LiftError, erase_colours, lift, lift_identity, maximal_insertions, normalise, verify_unique,
)
from pathoperad.pathcore import identity, parse


def test_identity_patterns_at_three(oracle):
    o = oracle(3)
    assert str(lift_identity(3, "A", 3, o).lifted.op) == "12|213|314|41432"
    assert str(lift_identity(3, "B", 3, o).lifted.op) == "23414|413|312|21"
    assert str(lift_identity(1, "A", 3, o).lifted.op) == "12|212"
    assert lift_identity(2, "C", 3, o).lifted.op == identity(2)


def test_identity_lifts_erase_back(oracle):
    o = oracle(3)
    for n in range(5):
        for lab in "AB":
            res = lift_identity(n, lab, 3, o)
            assert erase_colours(res.lifted.op, res.inserted_colours, 3) == identity(n)


def test_normalise_keeps_originals():
    assert normalise((1, 9, 0, 7, 9), 1) == (1, 2, 0, 3, 2)


def test_lift_rejects(oracle):
    with pytest.raises(LiftError):
        lift(parse_labelled("1|1 :: (A) -> C"), 4)
    with pytest.raises(LiftError):
        lift(parse_labelled("12 :: (A,B) -> A"), 2, oracle(2))
    with pytest.raises(LiftError):
        erase_colours(parse("12|21"), [2], 3)


def test_non_c_targets_are_fixed(oracle):
    lop = parse_labelled("1|1 :: (A) -> A")
    assert lift(lop, 2, oracle(2)).lifted == lop


def test_low_m_saturation(oracle):
    res = lift(parse_labelled("1|1 :: (A) -> C"), 2, oracle(2))
    assert str(res.lifted) == "12|21 :: (A,C) -> C" and res.maximal
    res = lift(parse_labelled("1 :: (A) -> C"), 1, oracle(1))
    assert str(res.lifted.op) == "12"


def test_uniqueness_small(oracle):
    assert verify_unique(parse_labelled("1|1 :: (A) -> C"), 2, oracle(2))
    assert maximal_insertions(parse_labelled("1|1 :: (A) -> C"), 2, oracle(2)) == {(1, 2, 0, 2, 1)}


def test_full_closure_blocks_the_identity_lift(oracle):
    # a unary member in front of the lift is one more admissible C insertion
    o = oracle(3)
    lifted = lift_identity(3, "A", 3, o).lifted
    assert in_plus(lifted, 3, o) and not in_circ(lifted, 3, o)
    assert in_circ(lifted, 3, oracle(3, strict=True))


@given(st.integers(0, 3), st.sampled_from("ABC"), st.sampled_from([1, 2]))
@settings(max_examples=25, deadline=None)
def test_lift_erases_to_input(n, lab, m):
    o = HatOracle(m)
    lop = labelled(identity(n), lab, "C")
    res = lift(lop, m, o)
    assert erase_colours(res.lifted.op, res.inserted_colours, m) == lop.op
    assert res.maximal
