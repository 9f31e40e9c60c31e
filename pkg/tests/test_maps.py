from fractions import Fraction

import pytest

from crossec import (
    Compose,
    Const,
    DomainError,
    Ext,
    Gen,
    Generator,
    ID,
    NatSet,
    Prod,
    SolverBounds,
    UnitSet,
    apply_arrow,
    apply_point,
    compose,
    ext,
    fwd,
    in_generated,
    inv,
    map_size,
    nat_const_expr,
    prodmap,
    proj,
    structure_maps,
)
from crossec.maps import analyze_shuffle, infer_cod, preimage_values, shuffle_apply
from crossec.subsets import Int


N = NatSet()
NN = Prod((N, N))

SUCC = Generator("succ", N, N, lambda v: v + 1, nat_shift=1)
ZERO = Generator("zero", UnitSet(), N, lambda v: 0, const_value=0)
MULT = Generator("mult", NN, N, lambda v: v[0] * v[1])
M_NAT = structure_maps("M_nat", [ZERO, SUCC])
M_NAT_ARITH = structure_maps("M_nat_arith", [ZERO, SUCC, MULT])


def test_apply_point_succ():
    assert apply_point(Gen("succ"), 4, M_NAT) == 5


def test_apply_point_identity():
    assert apply_point(ID, (3, 9), M_NAT) == (3, 9)


def factorial_step_expr():
    # (n, m) -> (n + 1, m * (n + 1))
    return compose(
        prodmap(proj(1), Gen("mult")),
        prodmap(compose(Gen("succ"), proj(1)), proj(2)),
    )


def test_apply_point_factorial_step():
    phi = factorial_step_expr()
    assert apply_point(phi, (2, 2), M_NAT_ARITH) == (3, 6)
    assert apply_point(phi, (0, 1), M_NAT_ARITH) == (1, 1)


def test_infer_cod_checks_wiring():
    phi = factorial_step_expr()
    assert infer_cod(phi, NN, M_NAT_ARITH) == NN
    with pytest.raises(DomainError):
        infer_cod(Compose(Gen("succ"), Gen("succ")), NN, M_NAT)


def test_forward_projection_image():
    a = fwd(proj(1), "s", "t")
    s = ext(NN, {(0, 1), (1, 1), (2, 2)})
    out = apply_arrow(a, s, NN, N, M_NAT, SolverBounds())
    assert out.values == {0, 1, 2}


def test_inverse_succ_on_ext():
    a = inv(Gen("succ"), "s", "t")
    s = ext(N, {1, 2})
    out = apply_arrow(a, s, N, N, M_NAT, SolverBounds())
    assert isinstance(out, Ext) and out.values == {0, 1}


def test_inverse_len2_window_scan():
    ZZ = Prod((__import__("crossec").IntSet(), __import__("crossec").IntSet()))
    LEN2 = Generator("len2", ZZ, N, lambda v: v[0] * v[0] + v[1] * v[1])
    M = structure_maps("M_len", [LEN2])
    a = inv(Gen("len2"), "s", "t")
    s = ext(N, {25})
    out = apply_arrow(a, s, N, ZZ, M, SolverBounds(int_min=-5, int_max=5))
    from crossec.subsets import materialize

    got = materialize(out, SolverBounds(int_min=-5, int_max=5)).values
    oracle = {
        (x, y) for x in range(-5, 6) for y in range(-5, 6) if x * x + y * y == 25
    }
    assert got == oracle and len(oracle) == 12


def test_inverse_projection_produces_pin():
    a = inv(proj(2), "s", "t")
    s = ext(N, {7})
    out = apply_arrow(a, s, N, NN, M_NAT, SolverBounds())
    assert isinstance(out, Int)
    from crossec.subsets import materialize

    got = materialize(out, SolverBounds(nat_max=2))
    assert got.values == {(0, 7), (1, 7), (2, 7)}


def test_in_generated():
    assert in_generated(compose(Gen("succ"), Gen("zero")), M_NAT)
    assert not in_generated(Gen("len2"), M_NAT)
    assert in_generated(prodmap(ID, compose(Gen("succ"), Gen("zero"))), M_NAT)
    from crossec.maps import MapUnion

    assert not in_generated(MapUnion(ID, ID), M_NAT)


def test_map_size_atoms():
    assert map_size(Gen("succ"), M_NAT) == 1
    assert map_size(compose(Gen("succ"), Gen("zero")), M_NAT) == 3
    # id x (succ . 0) = 5, the program-attachment cost of a '1' symbol
    assert map_size(prodmap(ID, compose(Gen("succ"), Gen("zero"))), M_NAT) == 5
    assert map_size(prodmap(ID, Gen("zero")), M_NAT) == 3


def test_map_size_rejects_unresolved():
    with pytest.raises(DomainError):
        map_size(Gen("len2"), M_NAT)


def test_numeral_expr_size():
    assert map_size(nat_const_expr(0), M_NAT) == 1
    assert map_size(nat_const_expr(2), M_NAT) == 5  # succ . succ . 0
    assert apply_point(nat_const_expr(3), (), M_NAT) == 3


def test_projmulti_equals_tuple_of_projections():
    NNN = Prod((N, N, N))
    v = (4, 5, 6)
    assert apply_point(proj(1, 3), v, M_NAT) == (4, 6)
    assert apply_point(proj(1, 3), v, M_NAT) == (
        apply_point(proj(1), v, M_NAT),
        apply_point(proj(3), v, M_NAT),
    )
    assert map_size(proj(1, 3), M_NAT) == 3  # product of two projections


def test_shuffle_analysis_and_preimage():
    # a tuple-valued factor nests, which the slot model cannot express
    nested = prodmap(proj(1, 2, 3), compose(Gen("succ"), proj(4)))
    assert analyze_shuffle(nested, M_NAT) is None
    v = (5, 1, 2, 7)
    assert apply_point(nested, v, M_NAT) == ((5, 1, 2), 8)

    # flat product form used by the machine compiler
    sh2 = analyze_shuffle(
        prodmap(proj(1), proj(2), proj(3), compose(Gen("succ"), proj(4))), M_NAT
    )
    assert shuffle_apply(sh2, v) == (5, 1, 2, 8)
    NNNN = Prod((N, N, N, N))
    pre = list(preimage_values(
        prodmap(proj(1), proj(2), proj(3), compose(Gen("succ"), proj(4))),
        (5, 1, 2, 8),
        NNNN,
        M_NAT,
        SolverBounds(),
    ))
    assert pre == [(5, 1, 2, 7)]


def test_preimage_of_projection_fills_window():
    got = sorted(preimage_values(proj(1), 3, NN, M_NAT, SolverBounds(nat_max=2)))
    assert got == [(3, 0), (3, 1), (3, 2)]


def test_preimage_of_const():
    e = Const(4, N)
    got = list(preimage_values(e, 4, N, M_NAT, SolverBounds(nat_max=3)))
    assert got == [0, 1, 2, 3]
    assert list(preimage_values(e, 5, N, M_NAT, SolverBounds(nat_max=3))) == []
