"""Dual-representation subsets: finite enumerations and decidable predicates.

An ``Ext`` is a finite enumerated subset.  An ``Int`` is a conjunction of
conditions; inverse projection arrows contribute *pin* conditions (some
components must match a finite row set) which a hash-join planner can turn
back into an ``Ext`` without scanning the whole window.  Intersecting an
``Int`` with any ``Ext`` operand collapses to ``Ext`` by filtering; that is
how every construction in the corpus stays finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, FrozenSet, Iterable, Optional, Tuple

from .bounds import BoundsError, SolverBounds, iter_window, window_size
from .values import DomainError, Prod, Universe, Value, check_in, value_key, value_to_text


@dataclass(frozen=True)
class PinCond:
    """Components at 1-based ``idxs`` must project into the finite ``rows``."""

    idxs: Tuple[int, ...]
    rows: FrozenSet[tuple]

    def holds(self, v: Value) -> bool:
        return tuple(v[i - 1] for i in self.idxs) in self.rows


@dataclass(frozen=True)
class FunCond:
    fn: Callable[[Value], bool]
    label: str = "pred"

    def holds(self, v: Value) -> bool:
        return bool(self.fn(v))


Cond = object


@dataclass(frozen=True)
class Ext:
    universe: Universe
    values: FrozenSet[Value]
    truncated: bool = False

    def member(self, v: Value) -> bool:
        return v in self.values

    def sorted_values(self):
        return sorted(self.values, key=value_key)

    def __repr__(self):
        vals = ",".join(value_to_text(v) for v in self.sorted_values()[:8])
        more = "..." if len(self.values) > 8 else ""
        return f"Ext{{{vals}{more}}}"


@dataclass(frozen=True)
class Int:
    universe: Universe
    conds: Tuple[Cond, ...]
    down_threshold: Optional[Value] = None
    truncated: bool = False

    def member(self, v: Value) -> bool:
        return all(c.holds(v) for c in self.conds)

    def __repr__(self):
        return f"Int({len(self.conds)} conds over {self.universe})"


Subset = object  # Ext | Int


def ext(universe: Universe, values: Iterable[Value], truncated: bool = False) -> Ext:
    """Validated public constructor; solver internals build ``Ext`` directly."""
    vals = frozenset(values)
    for v in vals:
        check_in(universe, v)
    return Ext(universe, vals, truncated)


def empty(universe: Universe) -> Ext:
    return Ext(universe, frozenset())


def member(s: Subset, v: Value) -> bool:
    """Decidable membership; raises on a universe mismatch."""
    check_in(s.universe, v)
    return s.member(v)


def _filter_ext(e: Ext, other: Subset) -> Ext:
    kept = frozenset(v for v in e.values if other.member(v))
    return Ext(e.universe, kept, e.truncated or other.truncated)


def combine(kind: str, a: Subset, b: Optional[Subset] = None, universe: Optional[Universe] = None) -> Subset:
    """Lattice operation on subsets: ``intersect``, ``union`` or ``complement``.

    Complement takes a single operand plus its universe.  A union of an
    ``Ext`` with an ``Int`` over an infinite universe raises: the caller
    must normalize first.
    """
    if kind == "complement":
        u = universe or a.universe
        if u != a.universe:
            raise DomainError("complement universe mismatch")
        if isinstance(a, Ext) and u.is_finite():
            return Ext(u, frozenset(v for v in u.iter_all() if v not in a.values), a.truncated)
        return Int(u, (FunCond(lambda v, s=a: not s.member(v), "not"),), truncated=a.truncated)

    if b is None:
        raise DomainError(f"{kind} needs two operands")
    if a.universe != b.universe:
        raise DomainError("operands live over different universes")
    trunc = a.truncated or b.truncated

    if kind == "intersect":
        if isinstance(a, Ext) and isinstance(b, Ext):
            return Ext(a.universe, a.values & b.values, trunc)
        if isinstance(a, Ext):
            return _filter_ext(a, b)
        if isinstance(b, Ext):
            return _filter_ext(b, a)
        return Int(a.universe, a.conds + b.conds, truncated=trunc)

    if kind == "union":
        if isinstance(a, Ext) and isinstance(b, Ext):
            return Ext(a.universe, a.values | b.values, trunc)
        if isinstance(a, Int) and isinstance(b, Int):
            return Int(
                a.universe,
                (FunCond(lambda v, x=a, y=b: x.member(v) or y.member(v), "or"),),
                truncated=trunc,
            )
        if a.universe.is_finite():
            vals = frozenset(v for v in a.universe.iter_all() if a.member(v) or b.member(v))
            return Ext(a.universe, vals, trunc)
        raise DomainError("non-materializable union of Ext and Int over an infinite universe")

    raise DomainError(f"unknown combine kind {kind!r}")


# ---------------------------------------------------------------------------
# materialization (the join planner)


def _join_pins(u: Prod, pins, bounds: SolverBounds, card_cap: int):
    arity = len(u.parts)
    pins = sorted(pins, key=lambda p: len(p.rows))
    first = pins[0]
    covered = list(first.idxs)
    cands = [dict(zip(first.idxs, row)) for row in first.rows]
    for pin in pins[1:]:
        shared = [i for i in pin.idxs if i in covered]
        fresh = [i for i in pin.idxs if i not in covered]
        index = {}
        for row in pin.rows:
            m = dict(zip(pin.idxs, row))
            key = tuple(m[i] for i in shared)
            index.setdefault(key, []).append(tuple(m[i] for i in fresh))
        nxt = []
        for cand in cands:
            key = tuple(cand[i] for i in shared)
            for ext_vals in index.get(key, ()):
                d = dict(cand)
                d.update(zip(fresh, ext_vals))
                nxt.append(d)
                if len(nxt) > card_cap:
                    raise _Clip()
        cands = nxt
        covered.extend(fresh)
    missing = [i for i in range(1, arity + 1) if i not in covered]
    for i in missing:
        col = list(iter_window(u.parts[i - 1], bounds, None))
        nxt = []
        for cand in cands:
            for v in col:
                d = dict(cand)
                d[i] = v
                nxt.append(d)
                if len(nxt) > card_cap:
                    raise _Clip()
        cands = nxt
    return [tuple(c[i] for i in range(1, arity + 1)) for c in cands]


class _Clip(Exception):
    pass


def materialize(
    s: Subset,
    bounds: SolverBounds,
    comp_caps=None,
    extra_conds: Tuple[Cond, ...] = (),
) -> Ext:
    """Produce an equivalent ``Ext`` restricted to the enumeration window.

    Pin conditions are hash-joined when they cover all product components;
    otherwise the universe window is scanned.  Exceeding the cardinality cap
    clips the result and sets the truncation flag.
    """
    if isinstance(s, Ext):
        if not extra_conds:
            return s
        kept = frozenset(v for v in s.values if all(p.holds(v) for p in extra_conds))
        return Ext(s.universe, kept, s.truncated)

    u = s.universe
    conds = list(s.conds) + list(extra_conds)
    pins = [c for c in conds if isinstance(c, PinCond)]
    rest = [c for c in conds if not isinstance(c, PinCond)]
    cap = bounds.node_card_cap

    if isinstance(u, Prod) and pins:
        covered = set()
        for p in pins:
            covered.update(p.idxs)
        missing = [i for i in range(1, len(u.parts) + 1) if i not in covered]
        fillable = True
        fill = 1
        for i in missing:
            try:
                fill *= window_size(u.parts[i - 1], bounds, None)
            except BoundsError:
                fillable = False
                break
        if fillable and fill <= cap:
            try:
                tuples = _join_pins(u, pins, bounds, cap)
            except _Clip:
                return Ext(u, frozenset(), truncated=True)
            vals = frozenset(
                t for t in tuples if u.contains(t) and all(c.holds(t) for c in rest)
            )
            return Ext(u, vals, s.truncated)

    total = window_size(u, bounds, comp_caps)
    if total > max(cap, bounds.step_cap):
        raise BoundsError(f"window of {u} too large to scan ({total} values)")
    out = set()
    clipped = False
    for v in iter_window(u, bounds, comp_caps):
        if all(c.holds(v) for c in conds):
            out.add(v)
            if len(out) > cap:
                out.pop()
                clipped = True
                break
    return Ext(u, frozenset(out), s.truncated or clipped)


def normalize(s: Subset, bounds: SolverBounds) -> Ext:
    """Ext form of ``s`` within the window; Ext inputs pass through unchanged."""
    return materialize(s, bounds)


def equal_within(a: Subset, b: Subset, bounds: SolverBounds):
    """Set equality decided by enumeration within the window.

    Returns ``(equal, window_limited, witness)`` where the witness is an
    element of the symmetric difference when unequal.
    """
    limited = not (a.universe.is_finite() and isinstance(a, Ext) and isinstance(b, Ext))
    ea = materialize(a, bounds)
    eb = materialize(b, bounds)
    if not a.universe.is_finite():
        limited = True
    diff = ea.values ^ eb.values
    if diff:
        witness = min(diff, key=value_key)
        return False, limited, witness
    return True, limited or ea.truncated or eb.truncated, None
