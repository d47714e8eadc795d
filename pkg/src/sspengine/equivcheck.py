"""Perfect-indistinguishability checks for game pairs.

Three independent procedures:

* :func:`transcript_equiv` walks every adaptive query path of length <= k,
  conditioning a belief (a distribution over heaps) on each observed
  outcome, and compares the next-outcome distributions of the two games.
* :func:`strategy_cross_check` computes the best advantage of any
  decision-tree adversary of depth <= k by dynamic programming over
  transcript trees, then replays the optimal tree with :func:`advantage`.
* :func:`check_bisimulation` validates a user-supplied heap relation by
  looking for a weight-preserving coupling of every pair of query steps.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Any

import networkx as nx

from .exactdist import Dist, canon_key
from .game import Game, GameError, Guess, Query, Strategy, advantage, same_interface
from .heap import Heap, StructuralError
from .procs import NAMES


class EnumerationBoundError(StructuralError):
    """The exploration would exceed the configured node budget."""


@dataclass(frozen=True)
class Step:
    proc: int
    arg: Any
    outcome: Any = None  # None on the last (differing) query

    def render(self) -> str:
        name = NAMES.get(self.proc, f"proc{self.proc}")
        arg = "" if self.arg == () else repr(self.arg)
        text = f"{name}({arg})"
        return text if self.outcome is None else f"{text} -> {self.outcome!r}"


def render_transcript(steps) -> str:
    return "; ".join(s.render() for s in steps)


def _check_pair(g1: Game, g2: Game, k: int) -> None:
    if k < 0:
        raise ValueError("depth must be >= 0")
    if not same_interface(g1, g2):
        raise GameError(f"{g1.name} and {g2.name} export different interfaces")


def _outcomes(g: Game, belief: Dist, proc: int, arg: Any) -> tuple[Dist, dict]:
    """Outcome marginal and the (unnormalized) heap mass behind each outcome."""
    by_outcome: dict = {}
    for h, m in belief.items():
        for (h2, o), w in g.step(proc, arg, h).items():
            cell = by_outcome.setdefault(o, {})
            cell[h2] = cell.get(h2, Fraction(0)) + m * w
    marginal = Dist({o: sum(hs.values(), Fraction(0)) for o, hs in by_outcome.items()})
    return marginal, by_outcome


# ---------------------------------------------------------------------------
# transcript equivalence


@dataclass(frozen=True)
class EquivResult:
    equivalent: bool
    depth: int
    transcript: tuple = ()
    dist_left: Dist | None = None
    dist_right: Dist | None = None
    nodes: int = 0

    @property
    def verdict(self) -> str:
        return f"equivalent up to depth {self.depth}" if self.equivalent else "counterexample"

    def render(self) -> str:
        if self.equivalent:
            return self.verdict
        return f"{render_transcript(self.transcript)}: {self.dist_left!r} vs {self.dist_right!r}"


def transcript_equiv(g1: Game, g2: Game, k: int) -> EquivResult:
    """Compare two games against every adaptive adversary making <= k queries."""
    _check_pair(g1, g2, k)
    queries = g1.queries()
    proven: set = set()
    nodes = [0]

    def explore(b1: Dist, b2: Dist, left: int, prefix: tuple):
        key = (b1, b2, left)
        if left == 0 or key in proven:
            return None
        for proc, arg in queries:
            nodes[0] += 1
            m1, hs1 = _outcomes(g1, b1, proc, arg)
            m2, hs2 = _outcomes(g2, b2, proc, arg)
            if m1 != m2:
                return prefix + (Step(proc, arg),), m1, m2
            if left == 1:
                continue
            for o in m1.support():
                found = explore(
                    Dist.from_masses(hs1[o]),
                    Dist.from_masses(hs2[o]),
                    left - 1,
                    prefix + (Step(proc, arg, o),),
                )
                if found:
                    return found
        proven.add(key)
        return None

    found = explore(Dist.point(g1.initial_heap()), Dist.point(g2.initial_heap()), k, ())
    if found is None:
        return EquivResult(True, k, nodes=nodes[0])
    transcript, m1, m2 = found
    return EquivResult(False, k, transcript, m1, m2, nodes[0])


def replay_counterexample(g1: Game, g2: Game, transcript) -> tuple[Dist, Dist]:
    """Recompute the two next-outcome distributions at the end of ``transcript``."""
    b1, b2 = Dist.point(g1.initial_heap()), Dist.point(g2.initial_heap())
    *prefix, last = transcript
    for step in prefix:
        _, hs1 = _outcomes(g1, b1, step.proc, step.arg)
        _, hs2 = _outcomes(g2, b2, step.proc, step.arg)
        if step.outcome not in hs1 or step.outcome not in hs2:
            raise GameError(f"outcome {step.outcome!r} of {step.render()} is unreachable")
        b1, b2 = Dist.from_masses(hs1[step.outcome]), Dist.from_masses(hs2[step.outcome])
    return _outcomes(g1, b1, last.proc, last.arg)[0], _outcomes(g2, b2, last.proc, last.arg)[0]


# ---------------------------------------------------------------------------
# best strategy by dynamic programming


@dataclass(frozen=True)
class CrossCheckResult:
    max_advantage: Fraction
    strategy: Strategy
    replayed_advantage: Fraction
    nodes: int

    @property
    def confirmed(self) -> bool:
        return self.max_advantage == self.replayed_advantage


def _freeze(masses: dict) -> frozenset:
    return frozenset(masses.items())


def strategy_cross_check(g1: Game, g2: Game, k: int, max_nodes: int = 200_000) -> CrossCheckResult:
    """Maximum of ``advantage(a, g1, g2)`` over every strategy of depth <= k.

    Each strategy branches on every outcome of every query, so its value is
    a sum over outcomes of independent subproblems; the best subtree is
    chosen per outcome and per sign of the difference.  Raises
    :class:`EnumerationBoundError` once more than ``max_nodes`` transcript
    nodes have been expanded.
    """
    _check_pair(g1, g2, k)
    queries = g1.queries()
    memo: dict = {}
    nodes = [0]

    def split(g: Game, masses: dict, proc: int, arg: Any) -> dict:
        out: dict = {}
        for h, m in masses.items():
            for (h2, o), w in g.step(proc, arg, h).items():
                cell = out.setdefault(o, {})
                cell[h2] = cell.get(h2, Fraction(0)) + m * w
        return out

    def best(s1: dict, s2: dict, left: int, sign: int):
        """(value, plan) maximising sign * (Pr1[true] - Pr2[true]) on this subtree."""
        key = (_freeze(s1), _freeze(s2), left, sign)
        hit = memo.get(key)
        if hit is not None:
            return hit
        nodes[0] += 1
        if nodes[0] > max_nodes:
            raise EnumerationBoundError(
                f"strategy space of {g1.name} vs {g2.name} at depth {k} exceeds {max_nodes} transcript nodes"
            )
        guess_true = sign * (sum(s1.values(), Fraction(0)) - sum(s2.values(), Fraction(0)))
        value, plan = (guess_true, True) if guess_true > 0 else (Fraction(0), False)
        if left > 0:
            for proc, arg in queries:
                b1, b2 = split(g1, s1, proc, arg), split(g2, s2, proc, arg)
                total, children = Fraction(0), {}
                for o in sorted(set(b1) | set(b2), key=canon_key):
                    v, p = best(b1.get(o, {}), b2.get(o, {}), left - 1, sign)
                    total += v
                    children[o] = p
                if total > value:
                    value, plan = total, (proc, arg, children)
        memo[key] = (value, plan)
        return value, plan

    start1, start2 = {g1.initial_heap(): Fraction(1)}, {g2.initial_heap(): Fraction(1)}
    plus = best(start1, start2, k, 1)
    minus = best(start1, start2, k, -1)
    value, plan = max(plus, minus, key=lambda vp: vp[0])
    strategy = _build(plan)
    return CrossCheckResult(value, strategy, advantage(strategy, g1, g2).advantage, nodes[0])


def _build(plan) -> Strategy:
    if isinstance(plan, bool):
        return Guess(plan)
    proc, arg, children = plan
    return Query(proc, arg, {o: _build(p) for o, p in children.items()}, default=Guess(False), name="optimal")


# ---------------------------------------------------------------------------
# bisimulation


@dataclass(frozen=True)
class BisimResult:
    holds: bool
    depth: int
    pairs_checked: int
    failure: str | None = None

    def render(self) -> str:
        return f"holds up to depth {self.depth}" if self.holds else self.failure or "fails"


def _scale(weights) -> int:
    return lcm(*(w.denominator for w in weights)) if weights else 1


def coupling_exists(
    left: dict[Heap, Fraction], right: dict[Heap, Fraction], r: Callable[[Heap, Heap], bool]
) -> bool:
    """Whether some coupling of two equal-mass branch sets is supported on ``r``."""
    total = sum(left.values(), Fraction(0))
    if total != sum(right.values(), Fraction(0)):
        return False
    scale = _scale(list(left.values()) + list(right.values()))
    g = nx.DiGraph()
    for i, (h, w) in enumerate(left.items()):
        g.add_edge("s", ("l", i), capacity=int(w * scale))
        for j, h2 in enumerate(right):
            if r(h, h2):
                g.add_edge(("l", i), ("r", j))  # no capacity attribute: unbounded
    for j, w in enumerate(right.values()):
        g.add_edge(("r", j), "t", capacity=int(w * scale))
    if "t" not in g or "s" not in g:
        return total == 0
    flow, _ = nx.maximum_flow(g, "s", "t")
    return flow == int(total * scale)


def check_bisimulation(g1: Game, g2: Game, r: Callable[[Heap, Heap], bool], k: int) -> BisimResult:
    """Validate ``r`` as a step-wise relational invariant of ``g1`` and ``g2``.

    Every query from every reachable related heap pair must admit a
    coupling of the two branch sets whose pairs emit the same outcome and
    land in related heaps.  A failure means the relation is too weak or the
    games differ; the two are not distinguished.
    """
    _check_pair(g1, g2, k)
    h1, h2 = g1.initial_heap(), g2.initial_heap()
    if not r(h1, h2):
        return BisimResult(False, k, 0, "relation does not hold on the initial heaps")
    queries = g1.queries()
    frontier = [(h1, h2)]
    seen = {(h1, h2)}
    checked = 0
    for level in range(k):
        nxt = []
        for a, b in frontier:
            checked += 1
            for proc, arg in queries:
                d1, d2 = g1.step(proc, arg, a), g2.step(proc, arg, b)
                by1: dict = {}
                by2: dict = {}
                for (h, o), w in d1.items():
                    by1.setdefault(o, {})[h] = w
                for (h, o), w in d2.items():
                    by2.setdefault(o, {})[h] = w
                where = f"{Step(proc, arg).render()} at depth {level + 1} from {a!r} / {b!r}"
                if set(by1) != set(by2):
                    return BisimResult(False, k, checked, f"outcome supports differ on {where}")
                for o in sorted(by1, key=canon_key):
                    if not coupling_exists(by1[o], by2[o], r):
                        return BisimResult(
                            False, k, checked, f"no coupling for outcome {o!r} of {where}: relation too weak or games inequivalent"
                        )
                    for x in by1[o]:
                        for y in by2[o]:
                            if (x, y) not in seen and r(x, y):
                                seen.add((x, y))
                                nxt.append((x, y))
        frontier = nxt
    return BisimResult(True, k, checked)


__all__ = [
    "BisimResult",
    "CrossCheckResult",
    "EnumerationBoundError",
    "EquivResult",
    "Step",
    "check_bisimulation",
    "coupling_exists",
    "render_transcript",
    "replay_counterexample",
    "strategy_cross_check",
    "transcript_equiv",
]
