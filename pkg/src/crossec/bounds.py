"""Enumeration windows and iteration caps for solving over infinite carriers.

Infinite universes (naturals, integers, rationals, words) are only ever
touched through an explicit window.  Results computed under a window are
exact *within* it; exceeding a cardinality or step cap is what sets the
truncation flag, window restriction alone does not.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import product as iter_product
from typing import Dict, Iterator, Optional, Tuple

from .values import (
    DomainError,
    Inj,
    NatSet,
    IntSet,
    Prod,
    RatSet,
    StrSet,
    Sum,
    Universe,
    Value,
    Word,
)


class BoundsError(Exception):
    """A universe cannot be enumerated under the given bounds."""


class CapExceeded(Exception):
    """A cardinality or step cap was hit; partial results are truncated."""


@dataclass(frozen=True)
class SolverBounds:
    nat_max: int = 64
    int_min: int = -16
    int_max: int = 16
    rat_window: Tuple[Fraction, ...] = ()
    str_max_len: int = 6
    grade_cap: Optional[int] = None
    node_card_cap: int = 500_000
    step_cap: int = 5_000_000

    def __post_init__(self):
        if self.nat_max < 0 or self.str_max_len < 0:
            raise ValueError("caps must be non-negative")
        if self.node_card_cap <= 0 or self.step_cap <= 0:
            raise ValueError("caps must be positive")
        if self.int_min > self.int_max:
            raise ValueError("empty int window")

    @property
    def cap(self) -> int:
        """Effective grade cap: explicit K, else the natural-number window."""
        return self.grade_cap if self.grade_cap is not None else self.nat_max

    def with_cap(self, k: int) -> "SolverBounds":
        return replace(self, grade_cap=k)


DEFAULT_BOUNDS = SolverBounds()


def in_window(u: Universe, v: Value, b: SolverBounds) -> bool:
    """Componentwise window membership (assumes ``v`` inhabits ``u``)."""
    if isinstance(u, NatSet):
        return 0 <= v <= b.nat_max
    if isinstance(u, IntSet):
        return b.int_min <= v <= b.int_max
    if isinstance(u, RatSet):
        # rat_window drives enumeration only; exact arithmetic results are
        # always admitted
        return True
    if isinstance(u, StrSet):
        return len(v.syms) <= b.str_max_len
    if isinstance(u, Prod):
        return all(in_window(p, c, b) for p, c in zip(u.parts, v))
    if isinstance(u, Sum):
        return in_window(u.parts[v.tag - 1], v.value, b)
    return True


def window_size(u: Universe, b: SolverBounds, comp_caps: Optional[Dict[int, int]] = None) -> int:
    """Number of values ``iter_window`` would yield."""
    if isinstance(u, Prod):
        total = 1
        for i, p in enumerate(u.parts, start=1):
            n = window_size(p, b)
            if comp_caps and i in comp_caps and isinstance(p, NatSet):
                n = min(n, comp_caps[i] + 1)
            total *= n
        return total
    c = u.cardinality()
    if c is not None:
        return c
    if isinstance(u, NatSet):
        return b.nat_max + 1
    if isinstance(u, IntSet):
        return b.int_max - b.int_min + 1
    if isinstance(u, RatSet):
        if not b.rat_window:
            raise BoundsError("rational universe has no declared window")
        return len(b.rat_window)
    if isinstance(u, Sum):
        return sum(window_size(p, b) for p in u.parts)
    if isinstance(u, StrSet):
        k = u.alphabet.cardinality()
        return sum(k ** n for n in range(b.str_max_len + 1))
    raise BoundsError(f"universe {u} not enumerable under bounds")


def iter_window(
    u: Universe, b: SolverBounds, comp_caps: Optional[Dict[int, int]] = None
) -> Iterator[Value]:
    """Enumerate the window of ``u`` in canonical order.

    ``comp_caps`` optionally tightens the nat window of individual top-level
    product components (1-based); the solver uses it to pin graded
    components to a row index.
    """
    if isinstance(u, Prod):
        def comp_iter(i: int, p: Universe):
            if comp_caps and i in comp_caps and isinstance(p, NatSet):
                hi = min(b.nat_max, comp_caps[i])
                return iter(range(hi + 1))
            return iter_window(p, b)

        return iter_product(*(list(comp_iter(i, p)) for i, p in enumerate(u.parts, start=1)))
    if u.is_finite():
        return u.iter_all()
    if isinstance(u, NatSet):
        return iter(range(b.nat_max + 1))
    if isinstance(u, IntSet):
        return iter(range(b.int_min, b.int_max + 1))
    if isinstance(u, RatSet):
        if not b.rat_window:
            raise BoundsError("rational universe has no declared window")
        return iter(sorted(b.rat_window))
    if isinstance(u, Sum):
        def gen():
            for i, p in enumerate(u.parts, start=1):
                for v in iter_window(p, b):
                    yield Inj(i, v)

        return gen()
    if isinstance(u, StrSet):
        k = u.alphabet.cardinality()

        def words():
            from itertools import product as prod

            for n in range(b.str_max_len + 1):
                for syms in prod(range(k), repeat=n):
                    yield Word(syms)

        return words()
    raise BoundsError(f"universe {u} not enumerable under bounds")
