from fractions import Fraction

import pytest

from crossec import DomainError, Ext, FinRange, IntSet, NatSet, Prod, SolverBounds, ext
from crossec.subsets import FunCond, Int, PinCond, combine, equal_within, materialize, member, normalize


NN = Prod((NatSet(), NatSet()))
ZZ = Prod((IntSet(), IntSet()))


def len2(v):
    return v[0] * v[0] + v[1] * v[1]


def test_member_ext_pairs():
    s = ext(NN, {(0, 1), (1, 1)})
    assert member(s, (0, 1))
    assert not member(s, (2, 2))


def test_member_int_circle():
    s = Int(ZZ, (FunCond(lambda v: len2(v) == 25),))
    assert member(s, (3, 4))
    assert not member(s, (3, 3))


def test_member_empty_and_universe_mismatch():
    s = ext(NatSet(), set())
    assert not member(s, 7)
    with pytest.raises(DomainError):
        member(s, (1, 2))


def test_intersect_ext_int_collapses_to_ext():
    a = ext(NatSet(), {1, 2, 3})
    b = Int(NatSet(), (FunCond(lambda v: v % 2 == 0),))
    out = combine("intersect", a, b)
    assert isinstance(out, Ext) and out.values == {2}


def test_complement_in_finite_universe():
    a = ext(FinRange(4), {0, 1})
    out = combine("complement", a, universe=FinRange(4))
    assert out.values == {2, 3}
    back = combine("complement", out, universe=FinRange(4))
    assert back.values == a.values  # involution


def test_union_of_ext():
    a = ext(ZZ, {(0, 0)})
    b = ext(ZZ, {(1, 1)})
    assert combine("union", a, b).values == {(0, 0), (1, 1)}


def test_union_ext_int_infinite_errors():
    a = ext(NatSet(), {1})
    b = Int(NatSet(), (FunCond(lambda v: v > 5),))
    with pytest.raises(DomainError):
        combine("union", a, b)


def test_demorgan_extensionally_on_finite_universe():
    u = FinRange(6)
    a = ext(u, {0, 1, 2})
    b = ext(u, {2, 3})
    lhs = combine("complement", combine("union", a, b), universe=u)
    rhs = combine(
        "intersect",
        combine("complement", a, universe=u),
        combine("complement", b, universe=u),
    )
    assert lhs.values == rhs.values
    inter_c = combine("complement", combine("intersect", a, b), universe=u)
    union_c = combine(
        "union", combine("complement", a, universe=u), combine("complement", b, universe=u)
    )
    assert inter_c.values == union_c.values


def test_normalize_nat_predicate():
    s = Int(NatSet(), (FunCond(lambda v: v < 3),))
    out = normalize(s, SolverBounds(nat_max=10))
    assert out.values == {0, 1, 2} and not out.truncated


def brutal_circle_points(radius2, lo, hi):
    return {
        (x, y)
        for x in range(lo, hi + 1)
        for y in range(lo, hi + 1)
        if x * x + y * y == radius2
    }


def test_normalize_lattice_circle_matches_brute_force():
    oracle = brutal_circle_points(25, -5, 5)
    assert len(oracle) == 12
    s = Int(ZZ, (FunCond(lambda v: len2(v) == 25),))
    out = normalize(s, SolverBounds(int_min=-5, int_max=5))
    assert out.values == oracle


def test_normalize_ext_identity():
    s = ext(NatSet(), {4, 9})
    assert normalize(s, SolverBounds()) is s


def test_pin_join_covers_components():
    u = Prod((NatSet(), NatSet(), NatSet()))
    s = Int(
        u,
        (
            PinCond((1, 3), frozenset({(0, 7), (1, 7)})),
            PinCond((2,), frozenset({(5,)})),
        ),
    )
    out = materialize(s, SolverBounds(nat_max=2))
    assert out.values == {(0, 5, 7), (1, 5, 7)}


def test_pin_join_fills_missing_component_from_window():
    u = Prod((NatSet(), NatSet()))
    s = Int(u, (PinCond((2,), frozenset({(9,)})),))
    out = materialize(s, SolverBounds(nat_max=2))
    assert out.values == {(0, 9), (1, 9), (2, 9)}


def test_truncation_flag_from_cardinality_cap():
    s = Int(NatSet(), (FunCond(lambda v: True),))
    out = materialize(s, SolverBounds(nat_max=50, node_card_cap=10))
    assert out.truncated


def test_equal_within_window_reports_witness():
    a = ext(NatSet(), {1, 2})
    b = ext(NatSet(), {1, 3})
    eq, _, witness = equal_within(a, b, SolverBounds())
    assert not eq and witness in (2, 3)


def test_member_normalize_agrees_inside_window():
    b = SolverBounds(int_min=-5, int_max=5)
    s = Int(ZZ, (FunCond(lambda v: len2(v) == 25),))
    n = normalize(s, b)
    for x in range(-5, 6):
        for y in range(-5, 6):
            assert member(s, (x, y)) == member(n, (x, y))
