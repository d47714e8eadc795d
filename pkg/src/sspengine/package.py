"""Packages: imported signatures, exported bodies, declared state.

Composition works by inlining: ``compose_seq(outer, inner)`` substitutes
each of the outer package's calls with the inner package's body.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

from .command import (
    Assert,
    Call,
    Command,
    Get,
    Put,
    Ret,
    Sample,
    link_calls,
    relabel_calls,
)
from .heap import Heap, Location, StructuralError, heap_init

Body = Callable[[Any], Command]


class CompositionError(StructuralError):
    pass


@dataclass(frozen=True)
class ProcSig:
    """Procedure identity is the natural-number ``id``; ``name`` is for humans."""

    id: int
    name: str
    input_type: Any = field(compare=False)
    output_type: Any = field(compare=False)

    def same_types(self, other: ProcSig) -> bool:
        return (
            self.input_type.name == other.input_type.name
            and self.output_type.name == other.output_type.name
        )

    def __repr__(self) -> str:
        return f"{self.name}#{self.id}: {self.input_type.name} -> {self.output_type.name}"


class Interface(tuple):
    """An ordered tuple of signatures with distinct ids."""

    def __new__(cls, sigs: Iterable[ProcSig] = ()):
        sigs = tuple(sorted(sigs, key=lambda s: s.id))
        ids = [s.id for s in sigs]
        if len(set(ids)) != len(ids):
            raise CompositionError(f"duplicate procedure ids in interface: {ids}")
        return super().__new__(cls, sigs)

    def by_id(self) -> dict[int, ProcSig]:
        return {s.id: s for s in self}

    @property
    def ids(self) -> frozenset:
        return frozenset(s.id for s in self)


class Package:
    def __init__(
        self,
        name: str,
        imports: Iterable[ProcSig],
        exports: Iterable[tuple[ProcSig, Body]],
        locations: Iterable[Location] = (),
    ):
        exports = list(exports)
        ids = [sig.id for sig, _ in exports]
        if len(set(ids)) != len(ids):
            raise CompositionError(f"{name}: duplicate export ids {ids}")
        self.name = name
        self.imports = Interface(imports)
        self.exports: dict[int, tuple[ProcSig, Body]] = {
            sig.id: (sig, body) for sig, body in sorted(exports, key=lambda e: e[0].id)
        }
        self.locations = _merge_locations(name, [list(locations)])

    @property
    def interface(self) -> Interface:
        return Interface(sig for sig, _ in self.exports.values())

    def sig(self, proc: int) -> ProcSig:
        return self.exports[proc][0]

    def body(self, proc: int) -> Body:
        return self.exports[proc][1]

    def initial_heap(self) -> Heap:
        return heap_init(self.locations)

    def __repr__(self) -> str:
        return f"Package({self.name})"


def _merge_locations(name: str, groups: list[list[Location]]) -> tuple[Location, ...]:
    merged: dict[str, Location] = {}
    for group in groups:
        for loc in group:
            prev = merged.get(loc.id)
            if prev is None:
                merged[loc.id] = loc
            elif prev != loc:
                raise CompositionError(
                    f"{name}: conflicting declarations for @{loc.id}: "
                    f"{prev.type_name}={prev.initial!r} vs {loc.type_name}={loc.initial!r}"
                )
    return tuple(merged[k] for k in sorted(merged))


# ---------------------------------------------------------------------------
# validation


def _sample_values(t: Any, cap: int) -> list:
    try:
        return list(itertools.islice(iter(t.values()), cap))
    except Exception:
        return []


def validate(p: Package, max_values: int = 16, rounds: int = 2, max_heaps: int = 64) -> list[str]:
    """Every unresolved call, type mismatch and undeclared location found.

    Bodies are opaque continuations, so they are explored concretely: each
    export runs on up to ``max_values`` arguments, call results range over
    up to ``max_values`` values of the import's output type, and the heaps
    reached in one round seed the next.
    """
    violations: list[str] = []
    seen: set[str] = set()

    def report(msg: str) -> None:
        if msg not in seen:
            seen.add(msg)
            violations.append(msg)

    imports = p.imports.by_id()
    heaps = [p.initial_heap()]
    visited = set(heaps)

    def explore(c: Command, h: Heap, out_type: Any, where: str, finals: list) -> None:
        while True:
            try:
                if isinstance(c, Ret):
                    if not out_type.contains(c.value):
                        report(f"{where}: returns {c.value!r}, not a {out_type.name}")
                    finals.append(h)
                    return
                if isinstance(c, Get):
                    if c.loc not in h.ids:
                        report(f"{where}: get of undeclared location @{c.loc}")
                        return
                    c = c.k(h[c.loc])
                elif isinstance(c, Put):
                    if c.loc not in h.ids:
                        report(f"{where}: put to undeclared location @{c.loc}")
                        return
                    try:
                        h = h.set(c.loc, c.value)
                    except StructuralError as exc:
                        report(f"{where}: {exc}")
                        return
                    c = c.k()
                elif isinstance(c, Sample):
                    for v in c.dist.support():
                        explore(c.k(v), h, out_type, where, finals)
                    return
                elif isinstance(c, Assert):
                    if not c.cond:
                        finals.append(h)
                        return
                    c = c.k()
                elif isinstance(c, Call):
                    target = imports.get(c.proc)
                    if target is None:
                        report(f"{where}: unresolved import {c.proc}")
                        return
                    if not target.input_type.contains(c.arg):
                        report(f"{where}: argument {c.arg!r} to {target.name} is not a {target.input_type.name}")
                        return
                    for v in _sample_values(target.output_type, max_values):
                        explore(c.k(v), h, out_type, where, finals)
                    return
                else:
                    report(f"{where}: not a command: {c!r}")
                    return
            except StructuralError as exc:
                report(f"{where}: {exc}")
                return
            except Exception as exc:
                report(f"{where}: body raised {type(exc).__name__}: {exc}")
                return

    for _ in range(rounds):
        fresh: list[Heap] = []
        for sig, body in p.exports.values():
            for arg in _sample_values(sig.input_type, max_values):
                finals: list[Heap] = []
                try:
                    cmd = body(arg)
                except Exception as exc:
                    report(f"{p.name}.{sig.name}: body raised {type(exc).__name__}: {exc}")
                    continue
                for h in heaps:
                    explore(cmd, h, sig.output_type, f"{p.name}.{sig.name}", finals)
                for h in finals:
                    if h not in visited and len(visited) < max_heaps:
                        visited.add(h)
                        fresh.append(h)
        if not fresh:
            break
        heaps = fresh
    return violations


# ---------------------------------------------------------------------------
# composition


def _check_provides(outer_imports: Iterable[ProcSig], inner: Package, rename: Mapping[int, int]) -> None:
    for sig in outer_imports:
        target_id = rename.get(sig.id, sig.id)
        if target_id not in inner.exports:
            raise CompositionError(f"{inner.name} does not export {sig.name} (id {target_id})")
        target = inner.sig(target_id)
        if not sig.same_types(target):
            raise CompositionError(f"type mismatch linking {sig!r} to {target!r}")


def compose_seq(outer: Package, inner: Package) -> Package:
    """``outer ∘ inner``: inner bodies are inlined at the outer's call sites."""
    _check_provides(outer.imports, inner, {})
    link = {sig.id: inner.body(sig.id) for sig in outer.imports}

    def inline(body: Body) -> Body:
        return lambda arg: link_calls(body(arg), link)

    name = f"{outer.name} o {inner.name}"
    locations = _merge_locations(name, [list(outer.locations), list(inner.locations)])
    return Package(
        name,
        inner.imports,
        [(sig, inline(body)) for sig, body in outer.exports.values()],
        locations,
    )


def compose_rename(outer: Package, rename: Mapping[int, int], inner: Package) -> Package:
    """Composition after relabelling the outer package's imports.

    ``rename`` maps every outer import id to the inner export id it is
    linked to; ids mapped to themselves may be omitted.
    """
    rename = dict(rename)
    unknown = set(rename) - outer.imports.ids
    if unknown:
        raise CompositionError(f"rename keys are not imports of {outer.name}: {sorted(unknown)}")
    full = {i: rename.get(i, i) for i in outer.imports.ids}
    if len(set(full.values())) != len(full):
        raise CompositionError(f"rename map is not injective: {full}")
    _check_provides(outer.imports, inner, full)

    renamed_imports = [
        ProcSig(full[s.id], inner.sig(full[s.id]).name, s.input_type, s.output_type) for s in outer.imports
    ]

    def relabel(body: Body) -> Body:
        return lambda arg: relabel_calls(body(arg), full)

    relabelled = Package(
        outer.name,
        renamed_imports,
        [(sig, relabel(body)) for sig, body in outer.exports.values()],
        outer.locations,
    )
    return compose_seq(relabelled, inner)


def identity_package(interface: Iterable[ProcSig], name: str = "Id") -> Package:
    """Forwards every procedure of ``interface`` to its import of the same id."""
    sigs = list(interface)

    def forward(proc: int) -> Body:
        return lambda arg: Call(proc, arg, Ret)

    return Package(name, sigs, [(s, forward(s.id)) for s in sigs])
