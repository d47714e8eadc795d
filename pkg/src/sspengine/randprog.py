"""Small random straight-line commands for property checks.

A program is a tuple of ops, each reading or writing one location or
sampling; values are computed from the last value seen, so continuations
depend on earlier results.
"""

from __future__ import annotations

import itertools
import random
from typing import Any

from .command import Assert, Command, Get, Put, Ret, Sample
from .exactdist import mk_uniform, z_mod
from .heap import Heap, Location, heap_init

Op = tuple


def random_program(rng: random.Random, locs: list[str], length: int, size: int = 3) -> tuple[Op, ...]:
    ops = []
    for _ in range(length):
        kind = rng.choice(["get", "put", "sample", "assert"] if locs else ["sample", "assert"])
        if kind == "get":
            ops.append(("get", rng.choice(locs)))
        elif kind == "put":
            ops.append(("put", rng.choice(locs), rng.randrange(size)))
        elif kind == "sample":
            ops.append(("sample", tuple(sorted(rng.sample(range(size), rng.randint(1, size))))))
        else:
            ops.append(("assert", rng.randrange(size)))
    return tuple(ops)


def build(program: tuple[Op, ...], size: int = 3, last: int = 0) -> Command:
    """Commands for ``program``; ``put`` writes ``(last + c) % size``, ``assert`` checks ``last != c``."""
    if not program:
        return Ret(last)
    op, rest = program[0], program[1:]
    if op[0] == "get":
        return Get(op[1], lambda v: build(rest, size, v))
    if op[0] == "put":
        return Put(op[1], (last + op[2]) % size, lambda: build(rest, size, last))
    if op[0] == "sample":
        return Sample(mk_uniform(op[1]), lambda v: build(rest, size, v))
    if op[0] == "assert":
        return Assert(last != op[1], lambda: build(rest, size, last))
    raise ValueError(f"unknown op {op!r}")


def all_heaps(loc_ids: list[str], size: int = 3) -> list[Heap]:
    t = z_mod(size)
    base = heap_init([Location(i, t, 0) for i in loc_ids])
    heaps = []
    for combo in itertools.product(range(size), repeat=len(loc_ids)):
        h = base
        for i, v in zip(loc_ids, combo):
            h = h.set(i, v)
        heaps.append(h)
    return heaps


def disjoint_pair(rng: random.Random, loc_ids: list[str], length: int = 3, size: int = 3) -> tuple[Any, Any]:
    """Two programs over a random split of ``loc_ids`` into disjoint halves."""
    shuffled = list(loc_ids)
    rng.shuffle(shuffled)
    cut = rng.randint(0, len(shuffled))
    return random_program(rng, shuffled[:cut], length, size), random_program(rng, shuffled[cut:], length, size)
