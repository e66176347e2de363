from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lensorder.oracles import balls_table, prequantize
from lensorder.squeeze import (Diagram, Status, SqueezeVerdict, equivariant_verdict,
                               nonequivariant_verdict, obstructing_target, witness_is_rank_one)


def test_equivariant_examples():
    v = equivariant_verdict(2, 3, 0.8, 0.1)
    assert (v.status, v.witness, v.degree) == (Status.OBSTRUCTED, 2, 8)
    assert v.diagram == Diagram(1, 1, 0)
    assert equivariant_verdict(2, 3, 0.8, 0.6).status is Status.NO_VERDICT
    v = equivariant_verdict(1, 2, 2.5, 0.3)
    assert (v.status, v.witness, v.degree) == (Status.OBSTRUCTED, 1, 2)
    with pytest.raises(ValueError):
        equivariant_verdict(2, 3, 0.5, 0.5)
    with pytest.raises(ValueError):
        equivariant_verdict(2, 3, 0.5, 0.7)


def test_nonequivariant_examples():
    assert nonequivariant_verdict(2, 0.8, 0.1).status is Status.SQUEEZABLE
    v = nonequivariant_verdict(2, 1.5, 0.5)
    assert (v.status, v.witness) == (Status.OBSTRUCTED, 1)
    v = nonequivariant_verdict(1, 0.8, 0.1)
    assert v.status is Status.OBSTRUCTED and v.witness is None
    assert nonequivariant_verdict(2, Fraction(5, 2), Fraction(21, 10)).status is Status.NO_VERDICT
    # closed integer endpoints count
    assert nonequivariant_verdict(3, 2, 1).witness == 1
    with pytest.raises(ValueError):
        nonequivariant_verdict(2, 1, 2)


def test_verdict_invariants():
    with pytest.raises(ValueError):
        SqueezeVerdict(Status.NO_VERDICT, witness=2)
    d = equivariant_verdict(2, 3, 0.8, 0.1).to_dict()
    assert d == {"status": "Obstructed", "witness": 2, "degree": 8,
                 "diagram": {"Rpp": 1, "R": 1, "Rp": 0}, "reason": d["reason"]}


rationals = st.fractions(min_value=Fraction(1, 50), max_value=20, max_denominator=50)


@given(st.integers(1, 3), st.sampled_from([2, 3, 5]), rationals, rationals)
def test_diagram_pattern(n, k, R, Rp):
    if not Rp < R:
        R, Rp = Rp + 1, min(R, Rp)
    v = equivariant_verdict(n, k, R, Rp)
    if v.status is Status.OBSTRUCTED:
        assert v.diagram == Diagram(1, 1, 0)
        assert Rp < Fraction(1, v.witness) < R
        # smallest admissible witness
        assert v.witness == 1 or not Fraction(1, v.witness - 1) < R
        assert witness_is_rank_one(n, k, R, 1, v.witness)
        t = prequantize(balls_table(n, k, Rp, 1, v.degree, True))
        assert t.rank(v.degree) == 0
    else:
        assert not any(Rp < Fraction(1, l) < R for l in range(1, int(1 / Rp) + 2))


@given(rationals)
def test_obstruction_always_fires(R):
    v = equivariant_verdict(2, 3, R, obstructing_target(R))
    assert v.status is Status.OBSTRUCTED


def test_contrast_with_nonequivariant():
    for R in (Fraction(1, 3), Fraction(4, 5), Fraction(99, 100)):
        Rp = obstructing_target(R)
        assert equivariant_verdict(2, 3, R, Rp).status is Status.OBSTRUCTED
        assert nonequivariant_verdict(2, R, Rp).status is Status.SQUEEZABLE
