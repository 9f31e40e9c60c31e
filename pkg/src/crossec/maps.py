"""Map-expression syntax, powerset-level arrows, generated sets and sizes.

A ``MapExpr`` is a syntax tree over structure-map generators, identity,
the terminal map, projections, constants, composition, products, map
unions and injections.  Arrows lift an expression to powersets as a
forward image, a preimage, or the complement map.

``analyze_shuffle`` recognizes the large fragment of expressions whose
output components are input components shifted by a constant (or are
constants outright).  Those invert structurally, which is what keeps
inverse arrows and forcing-constraint preimages cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from .bounds import BoundsError, SolverBounds, iter_window, window_size
from .subsets import Ext, FunCond, Int, PinCond, Subset, combine, ext, materialize, member
from .values import (
    DomainError,
    Inj,
    Prod,
    Sum,
    UnitSet,
    Universe,
    Value,
    check_in,
)


class MapExpr:
    pass


@dataclass(frozen=True)
class Gen(MapExpr):
    name: str


@dataclass(frozen=True)
class Id(MapExpr):
    pass


@dataclass(frozen=True)
class Omega(MapExpr):
    """The unique map to the one-point set."""


@dataclass(frozen=True)
class Proj(MapExpr):
    i: int  # 1-based


@dataclass(frozen=True)
class ProjMulti(MapExpr):
    idxs: Tuple[int, ...]

    def __post_init__(self):
        if len(self.idxs) < 2:
            raise DomainError("multi-projection needs at least two indices")


@dataclass(frozen=True)
class Const(MapExpr):
    value: Value
    target: Universe


@dataclass(frozen=True)
class Compose(MapExpr):
    outer: MapExpr
    inner: MapExpr


@dataclass(frozen=True)
class ProdMap(MapExpr):
    items: Tuple[MapExpr, ...]

    def __post_init__(self):
        if len(self.items) < 2:
            raise DomainError("product map needs at least two factors")


@dataclass(frozen=True)
class MapUnion(MapExpr):
    f: MapExpr
    g: MapExpr


@dataclass(frozen=True)
class InjMap(MapExpr):
    tag: int
    target: Universe  # the Sum universe injected into


ID = Id()
OMEGA = Omega()


def compose(*exprs: MapExpr) -> MapExpr:
    """compose(f, g, h) = f o g o h."""
    out = exprs[0]
    for e in exprs[1:]:
        out = Compose(out, e)
    return out


def proj(*idxs: int) -> MapExpr:
    return Proj(idxs[0]) if len(idxs) == 1 else ProjMulti(tuple(idxs))


def prodmap(*items: MapExpr) -> MapExpr:
    return ProdMap(tuple(items))


# ---------------------------------------------------------------------------
# structure maps


@dataclass(frozen=True)
class Generator:
    """A named structure map with a total evaluator on its domain.

    ``nat_shift``/``const_value`` mark the two shapes the shuffle analyzer
    understands natively; ``preimage`` optionally enumerates fibers.
    """

    name: str
    domain: Universe
    codomain: Universe
    fn: Callable[[Value], Value] = field(compare=False)
    nat_shift: Optional[int] = None
    const_value: Optional[Value] = None
    preimage: Optional[Callable[[Value, SolverBounds], Iterable[Value]]] = field(
        default=None, compare=False
    )


@dataclass(frozen=True)
class StructureMapSet:
    name: str
    gens: Mapping[str, Generator] = field(default_factory=dict)
    constants: str = "none"  # "none" | "all"
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def gen(self, name: str) -> Generator:
        try:
            return self.gens[name]
        except KeyError:
            raise DomainError(f"unknown structure map {name!r} in {self.name}")

    def has(self, name: str) -> bool:
        return name in self.gens


def structure_maps(name: str, gens: Iterable[Generator], constants: str = "none") -> StructureMapSet:
    return StructureMapSet(name, {g.name: g for g in gens}, constants)


# ---------------------------------------------------------------------------
# typing


def infer_cod(expr: MapExpr, domain: Universe, msl: StructureMapSet) -> Universe:
    """Codomain of ``expr`` on ``domain``; raises on inconsistent wiring."""
    if isinstance(expr, Gen):
        g = msl.gen(expr.name)
        if g.domain != domain:
            if isinstance(g.domain, UnitSet):
                # constant maps mix freely into products and compositions,
                # standing for their precomposition with the terminal map
                return g.codomain
            raise DomainError(f"generator {expr.name} expects domain {g.domain}, got {domain}")
        return g.codomain
    if isinstance(expr, Id):
        return domain
    if isinstance(expr, Omega):
        return UnitSet()
    if isinstance(expr, Proj):
        if not isinstance(domain, Prod) or not 1 <= expr.i <= len(domain.parts):
            raise DomainError(f"projection p{expr.i} does not apply to {domain}")
        return domain.parts[expr.i - 1]
    if isinstance(expr, ProjMulti):
        if not isinstance(domain, Prod) or any(not 1 <= i <= len(domain.parts) for i in expr.idxs):
            raise DomainError(f"projection p{expr.idxs} does not apply to {domain}")
        return Prod(tuple(domain.parts[i - 1] for i in expr.idxs))
    if isinstance(expr, Const):
        check_in(expr.target, expr.value)
        return expr.target
    if isinstance(expr, Compose):
        mid = infer_cod(expr.inner, domain, msl)
        return infer_cod(expr.outer, mid, msl)
    if isinstance(expr, ProdMap):
        return Prod(tuple(infer_cod(f, domain, msl) for f in expr.items))
    if isinstance(expr, MapUnion):
        if not isinstance(domain, Sum) or len(domain.parts) != 2:
            raise DomainError("map union needs a binary sum domain")
        ca = infer_cod(expr.f, domain.parts[0], msl)
        cb = infer_cod(expr.g, domain.parts[1], msl)
        if ca != cb:
            raise DomainError("map union branches disagree on codomain")
        return ca
    if isinstance(expr, InjMap):
        if not isinstance(expr.target, Sum) or not 1 <= expr.tag <= len(expr.target.parts):
            raise DomainError("bad injection target")
        if expr.target.parts[expr.tag - 1] != domain:
            raise DomainError("injection domain mismatch")
        return expr.target
    raise DomainError(f"not a map expression: {expr!r}")


# ---------------------------------------------------------------------------
# point evaluation


def compile_point(expr: MapExpr, msl: StructureMapSet) -> Callable[[Value], Value]:
    key = ("pt", expr)
    hit = msl._cache.get(key)
    if hit is not None:
        return hit

    if isinstance(expr, Gen):
        fn = msl.gen(expr.name).fn
    elif isinstance(expr, Id):
        fn = lambda v: v
    elif isinstance(expr, Omega):
        fn = lambda v: ()
    elif isinstance(expr, Proj):
        i = expr.i - 1
        fn = lambda v: v[i]
    elif isinstance(expr, ProjMulti):
        idxs = tuple(i - 1 for i in expr.idxs)
        fn = lambda v: tuple(v[i] for i in idxs)
    elif isinstance(expr, Const):
        c = expr.value
        fn = lambda v: c
    elif isinstance(expr, Compose):
        f = compile_point(expr.outer, msl)
        g = compile_point(expr.inner, msl)
        fn = lambda v: f(g(v))
    elif isinstance(expr, ProdMap):
        fns = tuple(compile_point(f, msl) for f in expr.items)
        fn = lambda v: tuple(h(v) for h in fns)
    elif isinstance(expr, MapUnion):
        fa = compile_point(expr.f, msl)
        fb = compile_point(expr.g, msl)

        def fn(v, fa=fa, fb=fb):
            if not isinstance(v, Inj):
                raise DomainError("map union applies to tagged values")
            return fa(v.value) if v.tag == 1 else fb(v.value)

    elif isinstance(expr, InjMap):
        tag = expr.tag
        fn = lambda v: Inj(tag, v)
    else:
        raise DomainError(f"not a map expression: {expr!r}")

    msl._cache[key] = fn
    return fn


def apply_point(expr: MapExpr, v: Value, msl: StructureMapSet) -> Value:
    """Deterministic evaluation by structural recursion on the expression."""
    return compile_point(expr, msl)(v)


# ---------------------------------------------------------------------------
# shuffle analysis: output slots as shifted input components or constants

SLOT_COMP = 0  # (SLOT_COMP, src_index, shift); src_index -1 means the scalar input
SLOT_CONST = 1  # (SLOT_CONST, value)

Shuffle = Tuple[bool, Tuple[tuple, ...]]  # (output_is_tuple, slots)


def analyze_shuffle(expr: MapExpr, msl: StructureMapSet) -> Optional[Shuffle]:
    key = ("sh", expr)
    if key in msl._cache:
        return msl._cache[key]
    res = _analyze(expr, msl)
    msl._cache[key] = res
    return res


def _analyze(expr: MapExpr, msl: StructureMapSet) -> Optional[Shuffle]:
    if isinstance(expr, Gen):
        g = msl.gen(expr.name)
        if g.nat_shift is not None:
            return (False, ((SLOT_COMP, -1, g.nat_shift),))
        if g.const_value is not None and isinstance(g.const_value, int):
            return (False, ((SLOT_CONST, g.const_value),))
        return None
    if isinstance(expr, Id):
        return (False, ((SLOT_COMP, -1, 0),))
    if isinstance(expr, Proj):
        return (False, ((SLOT_COMP, expr.i - 1, 0),))
    if isinstance(expr, ProjMulti):
        return (True, tuple((SLOT_COMP, i - 1, 0) for i in expr.idxs))
    if isinstance(expr, Const):
        v = expr.value
        if isinstance(v, int) and not isinstance(v, bool):
            return (False, ((SLOT_CONST, v),))
        if isinstance(v, tuple) and v and all(isinstance(c, int) and not isinstance(c, bool) for c in v):
            return (True, tuple((SLOT_CONST, c) for c in v))
        return None
    if isinstance(expr, ProdMap):
        # only flat products of scalar-valued factors; a tuple-valued factor
        # would nest, which the slot model cannot express
        slots: List[tuple] = []
        for item in expr.items:
            sub = _analyze(item, msl)
            if sub is None or sub[0]:
                return None
            slots.extend(sub[1])
        return (True, tuple(slots))
    if isinstance(expr, Compose):
        inner = _analyze(expr.inner, msl)
        outer = _analyze(expr.outer, msl)
        if outer is not None and all(s[0] == SLOT_CONST for s in outer[1]):
            return outer  # constant-valued composition ignores its input
        if inner is None or outer is None:
            return None
        in_tuple, in_slots = inner
        out_tuple, out_slots = outer
        merged = []
        for slot in out_slots:
            if slot[0] == SLOT_CONST:
                merged.append(slot)
                continue
            _, src, shift = slot
            if src == -1:
                if in_tuple:
                    return None
                base = in_slots[0]
            else:
                if not in_tuple or src >= len(in_slots):
                    return None
                base = in_slots[src]
            if base[0] == SLOT_CONST:
                merged.append((SLOT_CONST, base[1] + shift))
            else:
                merged.append((SLOT_COMP, base[1], base[2] + shift))
        return (out_tuple, tuple(merged))
    return None


def shuffle_apply(sh: Shuffle, v: Value) -> Value:
    out_tuple, slots = sh
    vals = []
    for slot in slots:
        if slot[0] == SLOT_CONST:
            vals.append(slot[1])
        else:
            _, src, shift = slot
            base = v if src == -1 else v[src]
            vals.append(base + shift)
    return tuple(vals) if out_tuple else vals[0]


def compile_inverter(sh: Shuffle):
    """Fast row inverter for a shuffle over a product domain.

    Returns ``(pinned_idxs, fn)`` where ``fn(out_value)`` yields the pinned
    component row (ordered by ``pinned_idxs``) or None when no preimage
    exists.  Scalar-domain shuffles return ``pinned_idxs == None``.
    """
    out_tuple, slots = sh
    comp_slots = []  # (value_index, src, shift)
    const_checks = []  # (value_index, const)
    scalar = False
    for vi, slot in enumerate(slots):
        if slot[0] == SLOT_CONST:
            const_checks.append((vi, slot[1]))
        else:
            _, src, shift = slot
            if src == -1:
                scalar = True
                src = 0
            comp_slots.append((vi, src, shift))
    srcs = sorted({src for _, src, _ in comp_slots})
    order = {s: i for i, s in enumerate(srcs)}

    def fn(out):
        comps = out if out_tuple else (out,)
        if out_tuple and len(comps) != len(slots):
            return None
        row = [None] * len(srcs)
        for vi, c in const_checks:
            if comps[vi] != c:
                return None
        for vi, src, shift in comp_slots:
            val = comps[vi]
            if shift:
                if not isinstance(val, int) or isinstance(val, bool):
                    return None
                val -= shift
                if val < 0:
                    return None
            j = order[src]
            if row[j] is None:
                row[j] = val
            elif row[j] != val:
                return None
        return tuple(row)

    return (None if scalar else tuple(srcs)), fn


def shuffle_invert(sh: Shuffle, out: Value) -> Optional[Tuple[Dict[int, Value], bool]]:
    """Constraints a preimage of ``out`` must satisfy.

    Returns ``(pins, scalar_domain)`` mapping 0-based domain positions to
    required values, or ``None`` when no preimage exists.  Unconstrained
    positions are free.
    """
    out_tuple, slots = sh
    comps = out if out_tuple else (out,)
    if out_tuple and (not isinstance(out, tuple) or len(out) != len(slots)):
        return None
    pins: Dict[int, Value] = {}
    scalar = False
    for slot, val in zip(slots, comps):
        if slot[0] == SLOT_CONST:
            if slot[1] != val:
                return None
            continue
        _, src, shift = slot
        if shift:
            if not isinstance(val, int) or isinstance(val, bool):
                return None
            want = val - shift
            if want < 0:
                return None
        else:
            want = val
        if src == -1:
            scalar = True
            src = 0
        if src in pins and pins[src] != want:
            return None
        pins[src] = want
    return pins, scalar


# ---------------------------------------------------------------------------
# preimage enumeration


def preimage_values(
    expr: MapExpr, t: Value, domain: Universe, msl: StructureMapSet, bounds: SolverBounds
) -> Iterator[Value]:
    """Enumerate the windowed fiber of ``expr`` over ``t``."""
    sh = analyze_shuffle(expr, msl)
    if sh is not None:
        inv = shuffle_invert(sh, t)
        if inv is None:
            return iter(())
        pins, scalar = inv
        if scalar or not isinstance(domain, Prod):
            if 0 in pins:
                v = pins[0]
                return iter((v,)) if domain.contains(v) else iter(())
            return iter_window(domain, bounds)

        def gen():
            cols = []
            ok = True
            for i, p in enumerate(domain.parts):
                if i in pins:
                    if p.contains(pins[i]):
                        cols.append((pins[i],))
                    else:
                        ok = False
                        break
                else:
                    cols.append(tuple(iter_window(p, bounds)))
            if ok:
                from itertools import product as iprod

                for tup in iprod(*cols):
                    yield tup

        return gen()

    if isinstance(expr, Gen):
        g = msl.gen(expr.name)
        if g.preimage is not None:
            return iter(g.preimage(t, bounds))
        return _scan_preimage(expr, t, domain, msl, bounds)
    if isinstance(expr, Compose):
        mid = infer_cod(expr.inner, domain, msl)

        def gen():
            for u in preimage_values(expr.outer, t, mid, msl, bounds):
                yield from preimage_values(expr.inner, u, domain, msl, bounds)

        return gen()
    if isinstance(expr, InjMap):
        if isinstance(t, Inj) and t.tag == expr.tag:
            return iter((t.value,))
        return iter(())
    if isinstance(expr, MapUnion):
        parts = domain.parts if isinstance(domain, Sum) else (None, None)

        def gen():
            for v in preimage_values(expr.f, t, parts[0], msl, bounds):
                yield Inj(1, v)
            for v in preimage_values(expr.g, t, parts[1], msl, bounds):
                yield Inj(2, v)

        return gen()
    if isinstance(expr, Omega):
        return iter_window(domain, bounds) if t == () else iter(())
    return _scan_preimage(expr, t, domain, msl, bounds)


def _scan_preimage(expr, t, domain, msl, bounds):
    if window_size(domain, bounds) > bounds.step_cap:
        raise BoundsError(f"cannot enumerate fiber over {domain}")
    fn = compile_point(expr, msl)
    return (v for v in iter_window(domain, bounds) if fn(v) == t)


# ---------------------------------------------------------------------------
# arrows


@dataclass(frozen=True)
class Arrow:
    kind: str  # "fwd" | "inv" | "cmpl"
    expr: Optional[MapExpr]
    src: str
    dst: str

    def __post_init__(self):
        if self.kind not in ("fwd", "inv", "cmpl"):
            raise DomainError(f"unknown arrow kind {self.kind!r}")
        if (self.expr is None) != (self.kind == "cmpl"):
            raise DomainError("cmpl arrows carry no expression; others must")


def fwd(expr: MapExpr, src: str, dst: str) -> Arrow:
    return Arrow("fwd", expr, src, dst)


def inv(expr: MapExpr, src: str, dst: str) -> Arrow:
    return Arrow("inv", expr, src, dst)


def cmpl(src: str, dst: str) -> Arrow:
    return Arrow("cmpl", None, src, dst)


def image_values(expr: MapExpr, values, msl: StructureMapSet):
    """Bulk forward image; routed through the compiled kernel when possible."""
    sh = analyze_shuffle(expr, msl)
    if sh is not None:
        from .kernel import shuffle_image

        return shuffle_image(sh, values)
    fn = compile_point(expr, msl)
    return [fn(v) for v in values]


def apply_arrow(
    arrow: Arrow,
    s: Subset,
    src_universe: Universe,
    dst_universe: Universe,
    msl: StructureMapSet,
    bounds: SolverBounds,
) -> Subset:
    """Powerset-level application of one arrow to the source assignment."""
    if s.universe != src_universe:
        raise DomainError("subset does not live over the arrow source")

    if arrow.kind == "cmpl":
        if src_universe != dst_universe:
            raise DomainError("cmpl arrows need equal source and target universes")
        return combine("complement", s, universe=src_universe)

    if arrow.kind == "fwd":
        if isinstance(s, Int):
            raise DomainError(
                f"forward image of an intensional subset needs normalization (arrow {arrow.expr})"
            )
        vals = image_values(arrow.expr, list(s.values), msl)
        return Ext(dst_universe, frozenset(vals), s.truncated)

    # inverse: expr maps dst_universe -> src_universe
    expr = arrow.expr
    if isinstance(expr, Id):
        if src_universe != dst_universe:
            raise DomainError("inverse identity needs equal universes")
        return s

    if isinstance(s, Ext):
        sh = analyze_shuffle(expr, msl)
        if sh is not None and isinstance(dst_universe, Prod):
            key = ("invc", expr)
            if key not in msl._cache:
                msl._cache[key] = compile_inverter(sh)
            idxs, invfn = msl._cache[key]
            if idxs is not None:
                parts = [dst_universe.parts[i] for i in idxs]
                rows = set()
                for v in s.values:
                    row = invfn(v)
                    if row is not None and all(p.contains(c) for p, c in zip(parts, row)):
                        rows.add(row)
                if len(idxs) == len(dst_universe.parts):
                    return Ext(dst_universe, frozenset(rows), s.truncated)
                pin = PinCond(tuple(i + 1 for i in idxs), frozenset(rows))
                return Int(dst_universe, (pin,), truncated=s.truncated)
        if sh is not None and not isinstance(dst_universe, Prod):
            key = ("invc", expr)
            if key not in msl._cache:
                msl._cache[key] = compile_inverter(sh)
            idxs, invfn = msl._cache[key]
            if idxs is None or idxs == (0,):
                vals = set()
                for v in s.values:
                    row = invfn(v)
                    if row is not None and row and dst_universe.contains(row[0]):
                        vals.add(row[0])
                return Ext(dst_universe, frozenset(vals), s.truncated)
        if dst_universe.is_finite() and dst_universe.cardinality() <= bounds.node_card_cap:
            fn = compile_point(expr, msl)
            vals = frozenset(v for v in dst_universe.iter_all() if fn(v) in s.values)
            return Ext(dst_universe, vals, s.truncated)

    fn = compile_point(expr, msl)
    cond = FunCond(lambda v, fn=fn, s=s: s.member(fn(v)), f"inv:{expr}")
    return Int(dst_universe, (cond,), truncated=s.truncated)


# ---------------------------------------------------------------------------
# generated sets and sizes


def in_generated(expr: MapExpr, msl: StructureMapSet) -> bool:
    """Whether the expression lies in the closure of the structure maps
    (with identity, the terminal map and projections) under composition
    and product.  Map unions and injections are never members."""
    if isinstance(expr, Gen):
        return msl.has(expr.name)
    if isinstance(expr, (Id, Omega, Proj, ProjMulti)):
        return True
    if isinstance(expr, Const):
        return msl.constants == "all"
    if isinstance(expr, Compose):
        return in_generated(expr.outer, msl) and in_generated(expr.inner, msl)
    if isinstance(expr, ProdMap):
        return all(in_generated(f, msl) for f in expr.items)
    return False


def map_size(expr: MapExpr, msl: StructureMapSet) -> int:
    """Size of the given expression tree relative to the structure maps.

    Leaves cost 1; composition and product nodes cost 1 plus the sum of
    their children.  This is an upper bound on the minimum over all
    semantic decompositions.
    """
    if not in_generated(expr, msl):
        raise DomainError(f"expression not generated by {msl.name}: {expr!r}")
    return _tree_size(expr)


def _tree_size(expr: MapExpr) -> int:
    if isinstance(expr, (Gen, Id, Omega, Proj, Const)):
        return 1
    if isinstance(expr, ProjMulti):
        return 1 + len(expr.idxs)
    if isinstance(expr, Compose):
        return 1 + _tree_size(expr.outer) + _tree_size(expr.inner)
    if isinstance(expr, ProdMap):
        return 1 + sum(_tree_size(f) for f in expr.items)
    raise DomainError(f"no size for {expr!r}")


def nat_const_expr(k: int, zero: str = "zero", succ: str = "succ") -> MapExpr:
    """The numeral succ^k o 0, the only constants available over {0, succ}."""
    e: MapExpr = Gen(zero)
    for _ in range(k):
        e = Compose(Gen(succ), e)
    return e


# ---------------------------------------------------------------------------
# textual form (shared by the DSL printer and the JSON export)


def expr_text(expr: MapExpr) -> str:
    return _expr_text(expr, 0)


def _expr_text(expr: MapExpr, prec: int) -> str:
    # precedence: compose (.) binds looser than product (*)
    if isinstance(expr, Gen):
        return expr.name
    if isinstance(expr, Id):
        return "id"
    if isinstance(expr, Omega):
        return "omega"
    if isinstance(expr, Proj):
        return f"p{expr.i}"
    if isinstance(expr, ProjMulti):
        return "p" + "".join(str(i) for i in expr.idxs)
    if isinstance(expr, Const):
        from .values import value_to_text

        return f"(const {value_to_text(expr.value)} : {expr.target})"
    if isinstance(expr, InjMap):
        return f"inj{expr.tag}"
    if isinstance(expr, Compose):
        s = f"{_expr_text(expr.outer, 1)} . {_expr_text(expr.inner, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(expr, ProdMap):
        s = " * ".join(_expr_text(f, 2) for f in expr.items)
        return f"({s})" if prec > 1 else s
    if isinstance(expr, MapUnion):
        s = f"{_expr_text(expr.f, 1)} + {_expr_text(expr.g, 1)}"
        return f"({s})" if prec > 0 else s
    raise DomainError(f"no text form for {expr!r}")
