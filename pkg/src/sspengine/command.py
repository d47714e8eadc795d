"""Monadic procedure bodies and their exact distributional semantics.

A :class:`Command` is a finite tree: ``Ret`` leaves and effect nodes whose
continuations are ordinary Python callables.  Bodies are usually written
as generator functions decorated with :func:`procedure`::

    @procedure
    def sign(m):
        sk = yield get(SK)
        yield assert_(sk is not None)
        return scheme.sign(sk, m)

The generator is replayed with the answers seen so far whenever a branch
is explored, so bodies must be deterministic given those answers.
"""

from __future__ import annotations

import functools
import inspect
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .exactdist import Dist, canon_key
from .heap import Heap, Location, StructuralError

__all__ = [
    "FAIL",
    "Assert",
    "AssertFailed",
    "Call",
    "Command",
    "Get",
    "Ok",
    "Put",
    "Ret",
    "Sample",
    "assert_",
    "bind",
    "call",
    "commute_check",
    "footprint",
    "get",
    "interpret",
    "link_calls",
    "procedure",
    "put",
    "relabel_calls",
    "run",
    "sample",
    "seq_pair",
]


def _lid(loc: str | Location) -> str:
    return loc.id if isinstance(loc, Location) else loc


# ---------------------------------------------------------------------------
# outcomes


@dataclass(frozen=True)
class Ok:
    value: Any

    def canon_key(self):
        return canon_key(self.value)

    def __repr__(self) -> str:
        return f"Ok({self.value!r})"


class AssertFailed:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def canon_key(self):
        return ()

    def __repr__(self) -> str:
        return "FAIL"

    def __reduce__(self):
        return (AssertFailed, ())


FAIL = AssertFailed()


# ---------------------------------------------------------------------------
# command tree


class Command:
    __slots__ = ()


@dataclass(frozen=True)
class Ret(Command):
    value: Any


@dataclass(frozen=True)
class Get(Command):
    loc: str
    k: Callable[[Any], Command]


@dataclass(frozen=True)
class Put(Command):
    loc: str
    value: Any
    k: Callable[[], Command]


@dataclass(frozen=True)
class Sample(Command):
    dist: Dist
    k: Callable[[Any], Command]


@dataclass(frozen=True)
class Assert(Command):
    cond: bool
    k: Callable[[], Command]


@dataclass(frozen=True)
class Call(Command):
    proc: int
    arg: Any
    k: Callable[[Any], Command]


def bind(c: Command, f: Callable[[Any], Command]) -> Command:
    """Sequence ``c`` with ``f`` applied to its result (lazily, node by node)."""
    if isinstance(c, Ret):
        return f(c.value)
    if isinstance(c, Get):
        return Get(c.loc, lambda v: bind(c.k(v), f))
    if isinstance(c, Put):
        return Put(c.loc, c.value, lambda: bind(c.k(), f))
    if isinstance(c, Sample):
        return Sample(c.dist, lambda v: bind(c.k(v), f))
    if isinstance(c, Assert):
        return Assert(c.cond, lambda: bind(c.k(), f))
    if isinstance(c, Call):
        return Call(c.proc, c.arg, lambda v: bind(c.k(v), f))
    raise TypeError(f"not a command: {c!r}")


def link_calls(c: Command, link: Mapping[int, Callable[[Any], Command]]) -> Command:
    """Replace every ``Call`` whose target is in ``link`` by the linked body."""
    if isinstance(c, Ret):
        return c
    if isinstance(c, Get):
        return Get(c.loc, lambda v: link_calls(c.k(v), link))
    if isinstance(c, Put):
        return Put(c.loc, c.value, lambda: link_calls(c.k(), link))
    if isinstance(c, Sample):
        return Sample(c.dist, lambda v: link_calls(c.k(v), link))
    if isinstance(c, Assert):
        return Assert(c.cond, lambda: link_calls(c.k(), link))
    if isinstance(c, Call):
        if c.proc in link:
            return bind(link[c.proc](c.arg), lambda v: link_calls(c.k(v), link))
        return Call(c.proc, c.arg, lambda v: link_calls(c.k(v), link))
    raise TypeError(f"not a command: {c!r}")


def relabel_calls(c: Command, mapping: Mapping[int, int]) -> Command:
    if isinstance(c, Ret):
        return c
    if isinstance(c, Get):
        return Get(c.loc, lambda v: relabel_calls(c.k(v), mapping))
    if isinstance(c, Put):
        return Put(c.loc, c.value, lambda: relabel_calls(c.k(), mapping))
    if isinstance(c, Sample):
        return Sample(c.dist, lambda v: relabel_calls(c.k(v), mapping))
    if isinstance(c, Assert):
        return Assert(c.cond, lambda: relabel_calls(c.k(), mapping))
    if isinstance(c, Call):
        return Call(mapping.get(c.proc, c.proc), c.arg, lambda v: relabel_calls(c.k(v), mapping))
    raise TypeError(f"not a command: {c!r}")


# ---------------------------------------------------------------------------
# generator syntax


@dataclass(frozen=True)
class _Req:
    op: str
    a: Any = None
    b: Any = None


def get(loc: str | Location) -> _Req:
    return _Req("get", _lid(loc))


def put(loc: str | Location, value: Any) -> _Req:
    return _Req("put", _lid(loc), value)


def sample(dist: Dist) -> _Req:
    return _Req("sample", dist)


def assert_(cond: bool) -> _Req:
    return _Req("assert", bool(cond))


def call(proc: int, arg: Any = ()) -> _Req:
    return _Req("call", proc, arg)


def run(cmd: Command) -> _Req:
    """Embed an existing command; the generator receives its result."""
    return _Req("run", cmd)


def _node(req: Any, k: Callable[[Any], Command]) -> Command:
    if not isinstance(req, _Req):
        raise TypeError(f"procedure yielded {req!r}; expected get/put/sample/assert_/call/run")
    if req.op == "get":
        return Get(req.a, k)
    if req.op == "put":
        return Put(req.a, req.b, lambda: k(None))
    if req.op == "sample":
        return Sample(req.a, k)
    if req.op == "assert":
        return Assert(req.a, lambda: k(None))
    if req.op == "call":
        return Call(req.a, req.b, k)
    return bind(req.a, k)


def _reify(factory: Callable[[], Any]) -> Command:
    def resume(answers: tuple) -> Command:
        gen = factory()
        try:
            req = next(gen)
            for a in answers:
                req = gen.send(a)
        except StopIteration as stop:
            return Ret(stop.value)
        return _node(req, lambda v: resume(answers + (v,)))

    return resume(())


def procedure(fn: Callable[..., Any]) -> Callable[..., Command]:
    """Turn a generator function (or a function returning a Command) into a body."""

    @functools.wraps(fn)
    def body(*args: Any) -> Command:
        if inspect.isgeneratorfunction(fn):
            return _reify(lambda: fn(*args))
        out = fn(*args)
        return out if isinstance(out, Command) else Ret(out)

    return body


# ---------------------------------------------------------------------------
# semantics


def _add(acc: dict, key: Any, w: Fraction) -> None:
    acc[key] = acc.get(key, Fraction(0)) + w


def _walk(c: Command, h: Heap, p: Fraction, acc: dict, link) -> None:
    while True:
        if isinstance(c, Ret):
            _add(acc, (h, Ok(c.value)), p)
            return
        if isinstance(c, Get):
            c = c.k(h[c.loc])
        elif isinstance(c, Put):
            h = h.set(c.loc, c.value)
            c = c.k()
        elif isinstance(c, Sample):
            for v, w in c.dist.items():
                _walk(c.k(v), h, p * w, acc, link)
            return
        elif isinstance(c, Assert):
            if not c.cond:
                _add(acc, (h, FAIL), p)
                return
            c = c.k()
        elif isinstance(c, Call):
            if link is None or c.proc not in link:
                raise StructuralError(f"unresolved call to procedure {c.proc}")
            c = bind(link[c.proc](c.arg), c.k)
        else:
            raise TypeError(f"not a command: {c!r}")


def interpret(c: Command, h: Heap, link: Mapping[int, Callable[[Any], Command]] | None = None) -> Dist:
    """Exact distribution over ``(final heap, Ok(v) | FAIL)``.

    A failed assert ends the command and keeps the heap at that point.
    """
    acc: dict = {}
    _walk(c, h, Fraction(1), acc, link)
    return Dist(acc)


def seq_pair(first: Command, second: Command, h: Heap, swap: bool = False) -> Dist:
    """Run ``first`` then ``second``; outcomes are reported as a pair.

    Each command's assert failure only ends that command.  With ``swap``
    the pair is reported as ``(second's, first's)`` so that both running
    orders of two commands can be compared directly.
    """
    acc: dict = {}
    for (h1, o1), w1 in interpret(first, h).items():
        for (h2, o2), w2 in interpret(second, h1).items():
            _add(acc, (h2, (o2, o1) if swap else (o1, o2)), w1 * w2)
    return Dist(acc)


def footprint(c: Command, heaps: Iterable[Heap]) -> frozenset:
    """Location ids read or written on any branch, starting from any of ``heaps``."""
    touched: set = set()

    def walk(c: Command, h: Heap) -> None:
        while True:
            if isinstance(c, Ret):
                return
            if isinstance(c, Get):
                touched.add(c.loc)
                c = c.k(h[c.loc])
            elif isinstance(c, Put):
                touched.add(c.loc)
                h = h.set(c.loc, c.value)
                c = c.k()
            elif isinstance(c, Sample):
                for v in c.dist.support():
                    walk(c.k(v), h)
                return
            elif isinstance(c, Assert):
                if not c.cond:
                    return
                c = c.k()
            elif isinstance(c, Call):
                raise StructuralError("footprint is only defined for call-free commands")
            else:
                raise TypeError(f"not a command: {c!r}")

    for h in heaps:
        walk(c, h)
    return frozenset(touched)


def commute_check(c1: Command, c2: Command, heaps: Iterable[Heap]) -> bool | None:
    """Whether ``c1; c2`` and ``c2; c1`` agree on every heap in ``heaps``.

    Returns ``None`` (not applicable) when the two commands touch a common
    location.
    """
    heaps = list(heaps)
    if footprint(c1, heaps) & footprint(c2, heaps):
        return None
    return all(seq_pair(c1, c2, h) == seq_pair(c2, c1, h, swap=True) for h in heaps)
