"""Exact finite distributions and finite value types.

Every probability in the engine is a :class:`fractions.Fraction`; nothing
is ever converted to floating point.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping, Sequence
from fractions import Fraction
from typing import Any

Rational = Fraction

__all__ = [
    "BOOL",
    "UNIT",
    "Dist",
    "FinType",
    "FiniteTypeError",
    "Option",
    "Product",
    "Rational",
    "SetOf",
    "canon_key",
    "dist_bind",
    "dist_equal",
    "mk_uniform",
    "z_mod",
]


class FiniteTypeError(ValueError):
    pass


def canon_key(value: Any) -> tuple:
    """Total order over the values the engine stores in supports and heaps."""
    if value is None:
        return (0,)
    if isinstance(value, bool):
        return (1, int(value))
    if isinstance(value, int):
        return (2, value)
    if isinstance(value, str):
        return (3, value)
    if isinstance(value, tuple):
        return (4, tuple(canon_key(v) for v in value))
    if isinstance(value, (frozenset, set)):
        return (5, tuple(sorted(canon_key(v) for v in value)))
    key = getattr(value, "canon_key", None)
    if key is not None:
        return (6, type(value).__name__, key())
    raise TypeError(f"no canonical ordering for {type(value).__name__}")


# ---------------------------------------------------------------------------
# finite types


class FinType:
    """A named finite type with a canonical enumeration ``0..size-1``.

    ``values`` may be given eagerly or as a zero-argument factory, which is
    useful for large spaces (RSA keys) that are only membership-tested.
    ``member`` overrides the membership test so that a lazy type never has
    to be enumerated just to type-check a value.
    """

    def __init__(
        self,
        name: str,
        values: Sequence[Hashable] | Callable[[], Sequence[Hashable]],
        member: Callable[[Any], bool] | None = None,
    ):
        self.name = name
        self._factory = values if callable(values) else None
        self._values: tuple | None = None if callable(values) else tuple(values)
        self._member = member
        self._index: dict | None = None
        if self._values is not None:
            self._check()

    def _check(self) -> None:
        if not self._values:
            raise FiniteTypeError(f"finite type {self.name!r} must be nonempty")
        if len(set(self._values)) != len(self._values):
            raise FiniteTypeError(f"finite type {self.name!r} has duplicate values")

    def values(self) -> tuple:
        if self._values is None:
            self._values = tuple(self._factory())
            self._check()
        return self._values

    @property
    def size(self) -> int:
        return len(self.values())

    def index(self, value: Any) -> int:
        if self._index is None:
            self._index = {v: i for i, v in enumerate(self.values())}
        try:
            return self._index[value]
        except (KeyError, TypeError):
            raise FiniteTypeError(f"{value!r} is not a value of {self.name}") from None

    def contains(self, value: Any) -> bool:
        if self._member is not None:
            return self._member(value)
        try:
            self.index(value)
        except FiniteTypeError:
            return False
        return True

    def __repr__(self) -> str:
        return f"FinType({self.name})"


def z_mod(n: int, name: str | None = None) -> FinType:
    """The integers ``0..n-1``."""
    if n < 1:
        raise FiniteTypeError("Z_n needs n >= 1")
    return FinType(
        name or f"Z{n}",
        range(n),
        member=lambda v: isinstance(v, int) and not isinstance(v, bool) and 0 <= v < n,
    )


class Product:
    """Tuples whose components range over the given types."""

    def __init__(self, *parts):
        self.parts = tuple(parts)
        self.name = "(" + " x ".join(p.name for p in self.parts) + ")"

    def values(self) -> tuple:
        return tuple(itertools.product(*(p.values() for p in self.parts)))

    @property
    def size(self) -> int:
        n = 1
        for p in self.parts:
            n *= p.size
        return n

    def contains(self, value: Any) -> bool:
        return (
            isinstance(value, tuple)
            and len(value) == len(self.parts)
            and all(p.contains(v) for p, v in zip(self.parts, value))
        )

    def __repr__(self) -> str:
        return f"Product{self.name}"


class Option:
    """``None`` or a value of the inner type (the inner type never holds ``None``)."""

    def __init__(self, inner):
        self.inner = inner
        self.name = f"option {inner.name}"

    def values(self) -> tuple:
        return (None,) + tuple(self.inner.values())

    @property
    def size(self) -> int:
        return 1 + self.inner.size

    def contains(self, value: Any) -> bool:
        return value is None or self.inner.contains(value)

    def __repr__(self) -> str:
        return f"Option({self.inner.name})"


class SetOf:
    """Finite sets (``frozenset``) of elements of the given type."""

    def __init__(self, element):
        self.element = element
        self.name = f"set {element.name}"

    def values(self) -> tuple:
        elems = self.element.values()
        subsets = itertools.chain.from_iterable(
            itertools.combinations(elems, r) for r in range(len(elems) + 1)
        )
        return tuple(frozenset(s) for s in subsets)

    @property
    def size(self) -> int:
        return 2 ** self.element.size

    def contains(self, value: Any) -> bool:
        return isinstance(value, frozenset) and all(self.element.contains(v) for v in value)

    def __repr__(self) -> str:
        return f"SetOf({self.element.name})"


UNIT = FinType("unit", [()])
BOOL = FinType("bool", [False, True], member=lambda v: isinstance(v, bool))


# ---------------------------------------------------------------------------
# distributions


class Dist:
    """A finite probability distribution with exact rational weights.

    The support is kept sorted by :func:`canon_key`, zero weights are
    dropped, and the total mass is exactly one, so two distributions are
    equal precisely when they are structurally equal.
    """

    __slots__ = ("_items", "_weights", "_hash")

    def __init__(self, weights: Mapping[Hashable, Fraction | int]):
        cleaned = {}
        for value, w in weights.items():
            w = Fraction(w)
            if w < 0:
                raise ValueError(f"negative weight {w} for {value!r}")
            if w:
                cleaned[value] = w
        if sum(cleaned.values()) != 1:
            raise ValueError(f"weights sum to {sum(cleaned.values())}, not 1")
        self._items = tuple(sorted(cleaned.items(), key=lambda kv: canon_key(kv[0])))
        self._weights = dict(self._items)
        self._hash = None

    @classmethod
    def from_masses(cls, masses: Mapping[Hashable, Fraction | int]) -> Dist:
        """Normalize nonnegative masses with a positive total."""
        total = sum(Fraction(m) for m in masses.values())
        if total <= 0:
            raise ValueError("cannot normalize zero total mass")
        return cls({v: Fraction(m) / total for v, m in masses.items()})

    @classmethod
    def point(cls, value: Hashable) -> Dist:
        return cls({value: 1})

    def items(self) -> tuple:
        return self._items

    def support(self) -> tuple:
        return tuple(v for v, _ in self._items)

    def __getitem__(self, value: Hashable) -> Fraction:
        return self._weights.get(value, Fraction(0))

    def __iter__(self) -> Iterator:
        return iter(self.support())

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, value: Hashable) -> bool:
        return value in self._weights

    def total(self) -> Fraction:
        return sum((w for _, w in self._items), Fraction(0))

    def prob(self, event: Callable[[Any], bool]) -> Fraction:
        return sum((w for v, w in self._items if event(v)), Fraction(0))

    def bind(self, k: Callable[[Any], Dist]) -> Dist:
        acc: dict = {}
        for v, w in self._items:
            for u, x in k(v).items():
                acc[u] = acc.get(u, Fraction(0)) + w * x
        return Dist(acc)

    def map(self, f: Callable[[Any], Hashable]) -> Dist:
        acc: dict = {}
        for v, w in self._items:
            u = f(v)
            acc[u] = acc.get(u, Fraction(0)) + w
        return Dist(acc)

    def condition(self, event: Callable[[Any], bool]) -> Dist:
        """Restrict to ``event`` and renormalize."""
        return Dist.from_masses({v: w for v, w in self._items if event(v)})

    def normalized(self) -> Dist:
        return Dist(self._weights)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dist):
            return NotImplemented
        return self._weights == other._weights

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._items))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{v!r}: {w}" for v, w in self._items)
        return f"Dist({{{body}}})"

    def canon_key(self) -> tuple:
        return tuple((canon_key(v), w) for v, w in self._items)


def mk_uniform(values: Iterable[Hashable]) -> Dist:
    """Uniform over a multiset; duplicates accumulate weight."""
    values = list(values)
    if not values:
        raise ValueError("empty sample space")
    n = len(values)
    acc: dict = {}
    for v in values:
        acc[v] = acc.get(v, Fraction(0)) + Fraction(1, n)
    return Dist(acc)


def dist_bind(d: Dist, k: Callable[[Any], Dist]) -> Dist:
    return d.bind(k)


def dist_equal(d1: Dist, d2: Dist) -> bool:
    return d1 == d2
