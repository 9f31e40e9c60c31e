"""Closed element terms and the carrier-set model.

Values are plain Python data wherever possible: unit is ``()``, naturals,
integers and alphabet-symbol indices are ``int``, exact rationals are
``fractions.Fraction`` (always canonical), products are tuples.  Tagged
injections, finite-set bitmasks and finite words get tiny frozen wrappers
so they cannot collide with product tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import Iterator, Optional, Sequence, Tuple

UNIT = ()


class DomainError(Exception):
    """A value was used against a universe or map it does not inhabit."""


@dataclass(frozen=True)
class Inj:
    """Element of a disjoint union, tagged with its 1-based component index."""

    tag: int
    value: "Value"


@dataclass(frozen=True)
class Mask:
    """Subset of a finite universe of the given width, packed as a bitmask."""

    bits: int
    width: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.width:
            raise DomainError(f"mask bits out of range for width {self.width}")

    def indices(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.width) if self.bits >> i & 1)

    def popcount(self) -> int:
        return self.bits.bit_count()


@dataclass(frozen=True)
class Word:
    """A finite string of alphabet-symbol indices."""

    syms: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.syms)


Value = object  # (), int, Fraction, tuple, Inj, Mask, Word


# ---------------------------------------------------------------------------
# universes


class Universe:
    """A set expression denoting the carrier of a diagram node."""

    def contains(self, v: Value) -> bool:
        raise NotImplementedError

    def is_finite(self) -> bool:
        return False

    def cardinality(self) -> Optional[int]:
        return None

    def iter_all(self) -> Iterator[Value]:
        raise DomainError(f"universe {self} is not finitely enumerable")


@dataclass(frozen=True)
class UnitSet(Universe):
    def contains(self, v):
        return v == UNIT

    def is_finite(self):
        return True

    def cardinality(self):
        return 1

    def iter_all(self):
        yield UNIT

    def __str__(self):
        return "unit"


@dataclass(frozen=True)
class FinRange(Universe):
    """The standard finite set {0, 1, ..., n-1}."""

    n: int

    def contains(self, v):
        return isinstance(v, int) and not isinstance(v, bool) and 0 <= v < self.n

    def is_finite(self):
        return True

    def cardinality(self):
        return self.n

    def iter_all(self):
        return iter(range(self.n))

    def __str__(self):
        return f"fin {self.n}"


BOOL = FinRange(2)


@dataclass(frozen=True)
class Alphabet(Universe):
    """A named finite symbol set; values are symbol indices."""

    name: str
    symbols: Tuple[str, ...]

    def contains(self, v):
        return isinstance(v, int) and not isinstance(v, bool) and 0 <= v < len(self.symbols)

    def is_finite(self):
        return True

    def cardinality(self):
        return len(self.symbols)

    def iter_all(self):
        return iter(range(len(self.symbols)))

    def index_of(self, sym: str) -> int:
        try:
            return self.symbols.index(sym)
        except ValueError:
            raise DomainError(f"symbol {sym!r} not in alphabet {self.name}")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class NatSet(Universe):
    def contains(self, v):
        return isinstance(v, int) and not isinstance(v, bool) and v >= 0

    def __str__(self):
        return "nat"


@dataclass(frozen=True)
class IntSet(Universe):
    def contains(self, v):
        return isinstance(v, int) and not isinstance(v, bool)

    def __str__(self):
        return "int"


@dataclass(frozen=True)
class RatSet(Universe):
    def contains(self, v):
        return isinstance(v, (Fraction, int)) and not isinstance(v, bool)

    def __str__(self):
        return "rat"


@dataclass(frozen=True)
class Prod(Universe):
    parts: Tuple[Universe, ...]

    def __post_init__(self):
        if len(self.parts) < 2:
            raise DomainError("product universe needs arity >= 2")

    def contains(self, v):
        return (
            isinstance(v, tuple)
            and len(v) == len(self.parts)
            and all(p.contains(c) for p, c in zip(self.parts, v))
        )

    def is_finite(self):
        return all(p.is_finite() for p in self.parts)

    def cardinality(self):
        total = 1
        for p in self.parts:
            c = p.cardinality()
            if c is None:
                return None
            total *= c
        return total

    def iter_all(self):
        return iter_product(*(p.iter_all() for p in self.parts))

    def __str__(self):
        return "(" + " * ".join(str(p) for p in self.parts) + ")"


@dataclass(frozen=True)
class Sum(Universe):
    parts: Tuple[Universe, ...]

    def contains(self, v):
        return (
            isinstance(v, Inj)
            and 1 <= v.tag <= len(self.parts)
            and self.parts[v.tag - 1].contains(v.value)
        )

    def is_finite(self):
        return all(p.is_finite() for p in self.parts)

    def cardinality(self):
        total = 0
        for p in self.parts:
            c = p.cardinality()
            if c is None:
                return None
            total += c
        return total

    def iter_all(self):
        for i, p in enumerate(self.parts, start=1):
            for v in p.iter_all():
                yield Inj(i, v)

    def __str__(self):
        return "(" + " + ".join(str(p) for p in self.parts) + ")"


@dataclass(frozen=True)
class PowFin(Universe):
    """Power set of a finite universe; values are bitmasks over its order."""

    base: Universe

    def __post_init__(self):
        if self.base.cardinality() is None:
            raise DomainError("powerset universe needs a finite base")

    def width(self) -> int:
        return self.base.cardinality()

    def contains(self, v):
        return isinstance(v, Mask) and v.width == self.width()

    def is_finite(self):
        return True

    def cardinality(self):
        return 1 << self.width()

    def iter_all(self):
        w = self.width()
        for bits in range(1 << w):
            yield Mask(bits, w)

    def __str__(self):
        return f"pow({self.base})"


@dataclass(frozen=True)
class StrSet(Universe):
    """Finite words over an alphabet (houses the automaton tape/input sets)."""

    alphabet: Alphabet

    def contains(self, v):
        k = self.alphabet.cardinality()
        return isinstance(v, Word) and all(0 <= s < k for s in v.syms)

    def __str__(self):
        return f"str({self.alphabet.name})"


# ---------------------------------------------------------------------------
# ordering and text form


def _rank(v: Value) -> int:
    if v == UNIT:
        return 0
    if isinstance(v, bool):
        raise DomainError("bool is not a value")
    if isinstance(v, int):
        return 1
    if isinstance(v, Fraction):
        return 2
    if isinstance(v, tuple):
        return 3
    if isinstance(v, Inj):
        return 4
    if isinstance(v, Mask):
        return 5
    if isinstance(v, Word):
        return 6
    raise DomainError(f"not a value: {v!r}")


def value_key(v: Value):
    """A total order key; used for deterministic iteration everywhere."""
    r = _rank(v)
    if r == 0:
        return (0,)
    if r == 1:
        return (1, v)
    if r == 2:
        return (2, v)
    if r == 3:
        return (3, len(v), tuple(value_key(c) for c in v))
    if r == 4:
        return (4, v.tag, value_key(v.value))
    if r == 5:
        return (5, v.width, v.bits)
    return (6, len(v.syms), v.syms)


def value_to_text(v: Value) -> str:
    """Canonical textual form, used by the DSL and the JSON export."""
    r = _rank(v)
    if r == 0:
        return "()"
    if r in (1, 2):
        return str(v)
    if r == 3:
        return "(" + ",".join(value_to_text(c) for c in v) + ")"
    if r == 4:
        return f"in{v.tag}({value_to_text(v.value)})"
    if r == 5:
        return "{" + ",".join(str(i) for i in v.indices()) + "}"
    return '"' + "".join(str(s) for s in v.syms) + '"'


def sym_text(u: Universe, v: Value) -> str:
    """Like value_to_text but renders alphabet symbols as 'sym quotes."""
    if isinstance(u, Alphabet):
        return "'" + u.symbols[v]
    if isinstance(u, Prod) and isinstance(v, tuple):
        return "(" + ",".join(sym_text(p, c) for p, c in zip(u.parts, v)) + ")"
    if isinstance(u, Sum) and isinstance(v, Inj):
        return f"in{v.tag}({sym_text(u.parts[v.tag - 1], v.value)})"
    return value_to_text(v)


def check_in(u: Universe, v: Value) -> None:
    if not u.contains(v):
        raise DomainError(f"value {value_to_text(v)} not in universe {u}")


def make_rat(num: int, den: int = 1) -> Fraction:
    return Fraction(num, den)


def tuple_value(vs: Sequence[Value]) -> tuple:
    return tuple(vs)
