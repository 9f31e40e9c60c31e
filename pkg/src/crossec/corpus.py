"""Reference diagram corpus: arithmetic recursions, bounded escape-time
iteration, subset summation and first-order random-field minimization.

Each builder returns a :class:`RepresentationData` whose anchors pin the
parameter nodes; solving the diagram reproduces the construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .diagram import Diagram, Node, RepresentationData
from .maps import (
    Gen,
    Generator,
    ID,
    InjMap,
    MapUnion,
    cmpl,
    compose,
    fwd,
    inv,
    prodmap,
    proj,
    structure_maps,
)
from .subsets import Ext, FunCond, Int, ext
from .values import (
    Alphabet,
    BOOL,
    FinRange,
    Mask,
    NatSet,
    PowFin,
    Prod,
    RatSet,
    Sum,
    UnitSet,
)

N = NatSet()
NN = Prod((N, N))
R = RatSet()


def nat_maps():
    """The natural-number structure maps: zero, successor, addition,
    multiplication."""
    return structure_maps(
        "M_nat",
        [
            Generator("zero", UnitSet(), N, lambda v: 0, const_value=0),
            Generator("succ", N, N, lambda v: v + 1, nat_shift=1),
            Generator("add", NN, N, lambda v: v[0] + v[1]),
            Generator("mult", NN, N, lambda v: v[0] * v[1]),
        ],
    )


def factorial_step():
    """(n, m) -> (n+1, m*(n+1))"""
    return compose(
        prodmap(proj(1), Gen("mult")),
        prodmap(compose(Gen("succ"), proj(1)), proj(2)),
    )


def factorial_diagram(cap: int = 64) -> RepresentationData:
    """Pairs (n, n!) grown from (0, 1) by the factorial step.

    The second node is union-marked and graded by the first component, so
    row k of the solve is exactly {(k, k!)}.
    """
    maps = nat_maps()
    nodes = [
        Node("S1", NN),
        Node("S2", NN, union_marked=True, grading=proj(1), grade_cap=cap),
    ]
    arrows = [
        fwd(ID, "S1", "S2"),
        fwd(factorial_step(), "S2", "S2"),
    ]
    d = Diagram(nodes, arrows, maps)
    return RepresentationData(d, {"S1": ext(NN, {(0, 1)})}, "S2")


def fibonacci_diagram() -> RepresentationData:
    """Pairs of consecutive Fibonacci numbers from (1, 1); the projection
    node collects the value set.  Ungraded: solved by the worklist."""
    maps = nat_maps()
    step = prodmap(proj(2), Gen("add"))  # (n, m) -> (m, n+m)
    nodes = [
        Node("S1", NN),
        Node("S2", NN, union_marked=True),
        Node("S3", N),
    ]
    arrows = [
        fwd(ID, "S1", "S2"),
        fwd(step, "S2", "S2"),
        fwd(proj(1), "S2", "S3"),
    ]
    d = Diagram(nodes, arrows, maps)
    return RepresentationData(d, {"S1": ext(NN, {(1, 1)})}, "S3")


# ---------------------------------------------------------------------------
# bounded escape-time iteration over exact complex rationals

C = Prod((R, R))
CCN = Prod((C, C, N))
CC = Prod((C, C))


def _csq_add(c, z):
    (a, b), (x, y) = c, z
    return (x * x - y * y + a, 2 * x * y + b)


def mandelbrot_maps():
    def step(v):
        c, z, k = v
        return (c, _csq_add(c, z), k + 1)

    return structure_maps(
        "M_mandel",
        [Generator("mstep", CCN, CCN, step)],
    )


def mandelbrot_diagram(c_grid: Iterable[Tuple[Fraction, Fraction]], cap: int) -> RepresentationData:
    """Escape-time iteration z -> z^2 + c with the iteration count graded;
    the output node is the complement of the escaping parameter set."""
    maps = mandelbrot_maps()
    nodes = [
        Node("S1", CCN, union_marked=True, grading=proj(3), grade_cap=cap),
        Node("S2", CC),
        Node("S3a", C),
        Node("S3", C),
        Node("S4", CCN),
        Node("S5", C),
    ]
    arrows = [
        fwd(ID, "S4", "S1"),
        fwd(Gen("mstep"), "S1", "S1"),
        fwd(proj(1, 2), "S1", "S2"),
        inv(proj(2), "S5", "S2"),
        fwd(proj(1), "S2", "S3a"),
        cmpl("S3a", "S3"),
    ]
    d = Diagram(nodes, arrows, maps)
    zero = (Fraction(0), Fraction(0))
    seeds = ext(CCN, {(tuple(c), zero, 0) for c in c_grid})
    escape = Int(C, (FunCond(lambda z: z[0] * z[0] + z[1] * z[1] > 4, "escape"),))
    return RepresentationData(d, {"S4": seeds, "S5": escape}, "S3")


# ---------------------------------------------------------------------------
# subset summation


def sum_maps(base: Alphabet):
    px = PowFin(base)
    width = base.cardinality()
    pp = Prod((px, px))
    xr = Prod((base, R))

    def popcount(m):
        return m.popcount()

    return structure_maps(
        f"M_sum_{base.name}",
        [
            Generator("zero", UnitSet(), N, lambda v: 0, const_value=0),
            Generator("succ", N, N, lambda v: v + 1, nat_shift=1),
            Generator("addn", NN, N, lambda v: v[0] + v[1]),
            Generator("sing", base, px, lambda v: Mask(1 << v, width)),
            Generator("munion", pp, px, lambda v: Mask(v[0].bits | v[1].bits, width)),
            Generator("minter", pp, px, lambda v: Mask(v[0].bits & v[1].bits, width)),
            Generator("pc", px, N, popcount),
            Generator("addr", Prod((R, R)), R, lambda v: v[0] + v[1]),
        ],
    )


def sum_diagram(base: Alphabet) -> RepresentationData:
    """Total of an indexed family of rationals, computed by recursively
    merging disjoint sub-families; the union node is graded by the
    cardinality of the index mask."""
    maps = sum_maps(base)
    px = PowFin(base)
    width = base.cardinality()
    xr = Prod((base, R))
    pr = Prod((px, R))
    quad = Prod((px, R, px, R))
    size_grade = compose(Gen("pc"), proj(1))
    quad_grade = compose(Gen("addn"), prodmap(compose(Gen("pc"), proj(1)), compose(Gen("pc"), proj(3))))
    nodes = [
        Node("S1", xr),
        Node("S2u", pr, union_marked=True, grading=size_grade, grade_cap=width),
        Node("S2", pr, grading=size_grade, grade_cap=width),
        Node("S3", pr),
        Node("S4", R),
        Node("S5", px),
        Node("C5", px),
        Node("S6", quad, grading=quad_grade, grade_cap=2 * width),
        Node("S7", px),
    ]
    phi = prodmap(
        compose(Gen("munion"), proj(1, 3)),
        compose(Gen("addr"), proj(2, 4)),
    )
    arrows = [
        fwd(prodmap(compose(Gen("sing"), proj(1)), proj(2)), "S1", "S2u"),
        fwd(phi, "S6", "S2u"),
        fwd(ID, "S2u", "S2"),
        cmpl("S5", "C5"),
        inv(proj(1), "C5", "S2"),
        inv(proj(1, 2), "S2", "S6"),
        inv(proj(3, 4), "S2", "S6"),
        inv(compose(Gen("minter"), proj(1, 3)), "S5", "S6"),
        fwd(ID, "S2", "S3"),
        inv(proj(1), "S7", "S3"),
        fwd(proj(2), "S3", "S4"),
    ]
    d = Diagram(nodes, arrows, maps)
    anchors = {
        "S5": ext(px, {Mask(0, width)}),
        "S7": ext(px, {Mask((1 << width) - 1, width)}),
    }
    return RepresentationData(d, anchors, "S4")


def sum_input(base: Alphabet, weights: Mapping[int, Fraction]) -> Ext:
    xr = Prod((base, R))
    return ext(xr, {(x, Fraction(w)) for x, w in weights.items()})


# ---------------------------------------------------------------------------
# first-order random field


@dataclass(frozen=True)
class FieldSpec:
    """First-order energy: unary terms on vertices, pairwise on edges."""

    vertices: Alphabet
    labels: FinRange
    unary: Mapping[Tuple[int, int], Fraction]  # (v, l) -> cost
    pairwise: Mapping[Tuple[int, int, int, int], Fraction]  # (u, lu, v, lv) -> cost

    def energy(self, config: Mapping[int, int]) -> Fraction:
        total = Fraction(0)
        nv = self.vertices.cardinality()
        for v in range(nv):
            total += Fraction(self.unary.get((v, config[v]), 0))
        for u in range(nv):
            for v in range(nv):
                total += Fraction(self.pairwise.get((u, config[u], v, config[v]), 0))
        return total


def field_diagram(spec: FieldSpec):
    """The random-field diagram: label consistency, full coverage, energy
    summation over vertices-plus-pairs, and the reachable down-set node that
    minimization selects on.

    Returns ``(RepresentationData, free_node, config_candidates)``.
    """
    Vu, Lu = spec.vertices, spec.labels
    nv = Vu.cardinality()
    svl = Prod((Vu, Lu))
    svlvl = Prod((Vu, Lu, Vu, Lu))
    s1u = Sum((svl, svlvl))
    sumvv = Sum((Vu, Prod((Vu, Vu))))
    m2u = Prod((sumvv, R))
    vll = Prod((Vu, Lu, Lu))

    base_maps = sum_maps_for_field(spec, sumvv, svl, svlvl, m2u)

    px = PowFin(sumvv)
    width = sumvv.cardinality()
    pr = Prod((px, R))
    quad = Prod((px, R, px, R))
    size_grade = compose(Gen("pc"), proj(1))
    quad_grade = compose(
        Gen("addn"), prodmap(compose(Gen("pc"), proj(1)), compose(Gen("pc"), proj(3)))
    )

    energy_expr = MapUnion(
        prodmap(compose(InjMap(1, sumvv), proj(1)), Gen("E1")),
        prodmap(compose(InjMap(2, sumvv), proj(1, 3)), Gen("E2")),
    )

    nodes = [
        Node("m5", svl),
        Node("m1", s1u),
        Node("m2", m2u),
        Node("m4c", vll),
        Node("m4", vll),
        Node("m6", Vu),
        # spliced subset-sum fragment
        Node("S2u", pr, union_marked=True, grading=size_grade, grade_cap=width),
        Node("S2", pr, grading=size_grade, grade_cap=width),
        Node("S3", pr),
        Node("m3", R),
        Node("S5", px),
        Node("C5", px),
        Node("S6", quad, grading=quad_grade, grade_cap=2 * width),
        Node("S7", px),
        # reachable down-set of the energy
        Node("Lt2", Prod((R, R))),
        Node("Lt3", Prod((R, BOOL))),
        Node("LtOne", BOOL),
        Node("m7", R),
    ]
    phi = prodmap(
        compose(Gen("munion"), proj(1, 3)),
        compose(Gen("addr"), proj(2, 4)),
    )
    arrows = [
        inv(MapUnion(ID, proj(1, 2)), "m5", "m1"),
        inv(MapUnion(ID, proj(3, 4)), "m5", "m1"),
        fwd(energy_expr, "m1", "m2"),
        inv(proj(1, 2), "m5", "m4"),
        inv(proj(1, 3), "m5", "m4"),
        fwd(proj(1, 2, 2), "m5", "m4c"),
        cmpl("m4c", "m4"),
        fwd(proj(1), "m5", "m6"),
        fwd(prodmap(compose(Gen("sing"), proj(1)), proj(2)), "m2", "S2u"),
        fwd(phi, "S6", "S2u"),
        fwd(ID, "S2u", "S2"),
        cmpl("S5", "C5"),
        inv(proj(1), "C5", "S2"),
        inv(proj(1, 2), "S2", "S6"),
        inv(proj(3, 4), "S2", "S6"),
        inv(compose(Gen("minter"), proj(1, 3)), "S5", "S6"),
        fwd(ID, "S2", "S3"),
        inv(proj(1), "S7", "S3"),
        fwd(proj(2), "S3", "m3"),
        inv(proj(2), "m3", "Lt2"),
        fwd(prodmap(proj(1), Gen("leq")), "Lt2", "Lt3"),
        inv(proj(2), "LtOne", "Lt3"),
        fwd(proj(1), "Lt3", "m7"),
    ]
    d = Diagram(nodes, arrows, base_maps)
    anchors = {
        "m4": ext(vll, set()),
        "m6": ext(Vu, set(range(nv))),
        "S5": ext(px, {Mask(0, width)}),
        "S7": ext(px, {Mask((1 << width) - 1, width)}),
        "LtOne": ext(BOOL, {1}),
    }
    rep = RepresentationData(d, anchors, "m5", min_seq=("m7",))
    nl = Lu.n
    candidates = []
    for combo in _configs(nv, nl):
        candidates.append(ext(svl, {(v, combo[v]) for v in range(nv)}))
    return rep, "m5", tuple(candidates)


def _configs(nv: int, nl: int):
    from itertools import product as iprod

    for labels in iprod(range(nl), repeat=nv):
        yield dict(enumerate(labels))


def sum_maps_for_field(spec: FieldSpec, sumvv, svl, svlvl, m2u):
    px = PowFin(sumvv)
    width = sumvv.cardinality()
    pp = Prod((px, px))

    def mask_index(v):
        # canonical order of Sum universe values
        vals = list(sumvv.iter_all())
        return vals.index(v)

    _index_cache = {v: i for i, v in enumerate(sumvv.iter_all())}

    def sing(v):
        return Mask(1 << _index_cache[v], width)

    def e1(v):
        return Fraction(spec.unary.get((v[0], v[1]), 0))

    def e2(v):
        return Fraction(spec.pairwise.get((v[0], v[1], v[2], v[3]), 0))

    return structure_maps(
        "M_field",
        [
            Generator("zero", UnitSet(), N, lambda v: 0, const_value=0),
            Generator("succ", N, N, lambda v: v + 1, nat_shift=1),
            Generator("addn", NN, N, lambda v: v[0] + v[1]),
            Generator("sing", sumvv, px, sing),
            Generator("munion", pp, px, lambda v: Mask(v[0].bits | v[1].bits, width)),
            Generator("minter", pp, px, lambda v: Mask(v[0].bits & v[1].bits, width)),
            Generator("pc", px, N, lambda m: m.popcount()),
            Generator("addr", Prod((R, R)), R, lambda v: v[0] + v[1]),
            Generator("E1", svl, R, e1),
            Generator("E2", svlvl, R, e2),
            Generator("leq", Prod((R, R)), BOOL, lambda v: 1 if v[0] <= v[1] else 0),
        ],
    )
