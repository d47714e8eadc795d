"""Typed state locations, immutable heaps and relations between heaps."""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

from .exactdist import canon_key


class StructuralError(Exception):
    """A malformed program or composition, as opposed to an assert failure."""


class HeapError(StructuralError):
    """Undeclared location, ill-typed value, or malformed heap relation."""


@dataclass(frozen=True)
class Location:
    """A state cell ``Package.NAME`` with a value type and initial value.

    Two packages share a cell by declaring equal ``Location`` values.
    """

    id: str
    value_type: Any = field(compare=False)
    initial: Any = None
    # the type is compared by name; type objects themselves are not comparable
    type_name: str = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "type_name", self.value_type.name)
        if not self.value_type.contains(self.initial):
            raise HeapError(f"initial value {self.initial!r} is not a {self.value_type.name} ({self.id})")

    def __repr__(self) -> str:
        return f"@{self.id}"


class Heap:
    """Total map from declared location ids to values; updates return new heaps."""

    __slots__ = ("_cells", "_types", "_hash", "_key")

    def __init__(self, cells: Mapping[str, Any], types: Mapping[str, Any]):
        self._cells = dict(cells)
        self._types = types
        self._hash = None
        self._key = None

    @property
    def ids(self) -> frozenset:
        return frozenset(self._cells)

    def __getitem__(self, loc: str | Location) -> Any:
        lid = loc.id if isinstance(loc, Location) else loc
        try:
            return self._cells[lid]
        except KeyError:
            raise HeapError(f"undeclared location {lid}") from None

    def set(self, loc: str | Location, value: Any) -> Heap:
        lid = loc.id if isinstance(loc, Location) else loc
        if lid not in self._cells:
            raise HeapError(f"undeclared location {lid}")
        if not self._types[lid].contains(value):
            raise HeapError(f"{value!r} is not a {self._types[lid].name} (location {lid})")
        cells = dict(self._cells)
        cells[lid] = value
        return Heap(cells, self._types)

    def items(self):
        return sorted(self._cells.items())

    def canon_key(self) -> tuple:
        if self._key is None:
            self._key = tuple((k, canon_key(v)) for k, v in self.items())
        return self._key

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Heap):
            return NotImplemented
        return self._cells == other._cells

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._cells.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{k}={v!r}" for k, v in self.items())
        return f"Heap({body})"


def heap_init(locations: Iterable[Location]) -> Heap:
    locations = list(locations)
    ids = [loc.id for loc in locations]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise HeapError(f"duplicate location ids: {', '.join(dupes)}")
    return Heap(
        {loc.id: loc.initial for loc in locations},
        {loc.id: loc.value_type for loc in locations},
    )


def _ids(locs: Iterable[str | Location]) -> frozenset:
    return frozenset(x.id if isinstance(x, Location) else x for x in locs)


def heap_ignore(ids: Iterable[str | Location]) -> Callable[[Heap, Heap], bool]:
    """Agreement on every shared location outside ``ids``."""
    ignored = _ids(ids)

    def related(h1: Heap, h2: Heap) -> bool:
        shared = (h1.ids & h2.ids) - ignored
        return all(h1[i] == h2[i] for i in shared)

    return related


# ---------------------------------------------------------------------------
# relations


class HeapRelation:
    def holds(self, h1: Heap, h2: Heap) -> bool:
        raise NotImplementedError

    def __call__(self, h1: Heap, h2: Heap) -> bool:
        return self.holds(h1, h2)

    def __and__(self, other: HeapRelation) -> Conjunction:
        return Conjunction([self, other])


@dataclass(frozen=True)
class Ignore(HeapRelation):
    ids: frozenset

    def __init__(self, ids: Iterable[str | Location]):
        object.__setattr__(self, "ids", _ids(ids))

    def holds(self, h1: Heap, h2: Heap) -> bool:
        unknown = self.ids - (h1.ids | h2.ids)
        if unknown:
            raise HeapError(f"ignored ids not declared in either heap: {sorted(unknown)}")
        return heap_ignore(self.ids)(h1, h2)


@dataclass(frozen=True)
class Conjunction(HeapRelation):
    parts: tuple

    def __init__(self, parts: Iterable[HeapRelation]):
        flat = []
        for p in parts:
            flat.extend(p.parts if isinstance(p, Conjunction) else [p])
        object.__setattr__(self, "parts", tuple(flat))

    def holds(self, h1: Heap, h2: Heap) -> bool:
        return all(p.holds(h1, h2) for p in self.parts)


@dataclass(frozen=True)
class FunctionLink(HeapRelation):
    """``fn(*source values) == target value`` across the two heaps.

    By default the sources are read from the right heap and the target
    from the left one, which is the orientation of the Z-to-SIG link.
    """

    sources: tuple
    fn: Callable[..., Any]
    target: str
    source_side: str = "right"
    target_side: str = "left"

    def __init__(self, sources, fn, target, source_side="right", target_side="left"):
        if source_side not in ("left", "right") or target_side not in ("left", "right"):
            raise HeapError("sides must be 'left' or 'right'")
        object.__setattr__(self, "sources", tuple(s.id if isinstance(s, Location) else s for s in sources))
        object.__setattr__(self, "fn", fn)
        object.__setattr__(self, "target", target.id if isinstance(target, Location) else target)
        object.__setattr__(self, "source_side", source_side)
        object.__setattr__(self, "target_side", target_side)

    def holds(self, h1: Heap, h2: Heap) -> bool:
        src = h1 if self.source_side == "left" else h2
        dst = h1 if self.target_side == "left" else h2
        args = [src[s] for s in self.sources]
        try:
            image = self.fn(*args)
        except Exception as exc:  # mapping not total on the stored values
            raise HeapError(f"link function failed on {args!r}: {exc}") from exc
        return image == dst[self.target]


def relation_holds(r: HeapRelation | Callable[[Heap, Heap], bool], h1: Heap, h2: Heap) -> bool:
    return r(h1, h2)
