from fractions import Fraction

import pytest

from crossec import (
    Alphabet,
    BOOL,
    DomainError,
    FinRange,
    Inj,
    IntSet,
    Mask,
    NatSet,
    PowFin,
    Prod,
    RatSet,
    Sum,
    UNIT,
    UnitSet,
    Word,
)
from crossec.values import sym_text, value_key, value_to_text


def test_standard_finite_sets():
    assert list(FinRange(3).iter_all()) == [0, 1, 2]
    assert UnitSet().cardinality() == 1
    assert BOOL.cardinality() == 2
    assert FinRange(4).contains(3) and not FinRange(4).contains(4)


def test_rationals_canonical():
    assert Fraction(6, 8) == Fraction(3, 4)
    assert Fraction(3, -4).denominator == 4  # positive denominator
    assert RatSet().contains(Fraction(3, 4))


def test_product_and_sum_membership():
    u = Prod((NatSet(), NatSet()))
    assert u.contains((0, 1)) and not u.contains((0, -1)) and not u.contains((0,))
    s = Sum((NatSet(), BOOL))
    assert s.contains(Inj(1, 5)) and s.contains(Inj(2, 1))
    assert not s.contains(Inj(2, 2)) and not s.contains(5)


def test_powfin_masks():
    u = PowFin(FinRange(3))
    assert u.cardinality() == 8
    m = Mask(0b101, 3)
    assert u.contains(m) and m.indices() == (0, 2) and m.popcount() == 2
    with pytest.raises(DomainError):
        Mask(0b1000, 3)


def test_bool_is_not_a_value():
    with pytest.raises(DomainError):
        value_key(True)


def test_canonical_text():
    assert value_to_text(UNIT) == "()"
    assert value_to_text(5) == "5"
    assert value_to_text(Fraction(3, 4)) == "3/4"
    assert value_to_text((1, 2)) == "(1,2)"
    assert value_to_text(Inj(2, 7)) == "in2(7)"
    assert value_to_text(Mask(0b11001, 5)) == "{0,3,4}"
    ab = Alphabet("ab", ("a", "b"))
    assert sym_text(ab, 0) == "'a"
    assert value_to_text(Word((0, 1, 0))) == '"010"'


def test_value_order_is_total_over_mixed_tuples():
    vals = [(1, 2), (0, 5), (1, 1), (2, 0)]
    assert sorted(vals, key=value_key) == [(0, 5), (1, 1), (1, 2), (2, 0)]
