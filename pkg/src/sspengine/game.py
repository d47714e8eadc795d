"""Games, adversary strategies and exact advantages.

An adversary is a finite decision tree: each internal node queries one
exported procedure and branches on the observed outcome; each leaf is a
guess.  Probabilities are computed by exhaustive expansion of every
sampling branch, so every number here is an exact ``Fraction``.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .command import FAIL, Ok, interpret, procedure, get, put, run
from .exactdist import UNIT, Dist, Option, Product, SetOf, canon_key
from .heap import Heap, Location, StructuralError, heap_init
from .package import CompositionError, Package, ProcSig, compose_rename, compose_seq
from . import procs


class GameError(StructuralError):
    """A strategy or game that does not fit the interface it is used with."""


class Game:
    """A closed package; outcome distributions of single queries are cached."""

    def __init__(self, package: Package, name: str | None = None):
        if package.imports:
            raise GameError(f"{package.name} is not a game: it imports {list(package.imports)}")
        self.package = package
        self.name = name or package.name
        self._cache: dict = {}

    @property
    def interface(self):
        return self.package.interface

    def sig(self, proc: int) -> ProcSig:
        try:
            return self.package.sig(proc)
        except KeyError:
            raise GameError(f"{self.name} does not export procedure {proc}") from None

    def initial_heap(self) -> Heap:
        return self.package.initial_heap()

    def queries(self) -> list[tuple[int, Any]]:
        """Every (procedure, argument) pair, in canonical order."""
        return [(sig.id, arg) for sig in self.interface for arg in sig.input_type.values()]

    def check_query(self, proc: int, arg: Any) -> ProcSig:
        sig = self.sig(proc)
        if not sig.input_type.contains(arg):
            raise GameError(f"{self.name}.{sig.name}: argument {arg!r} is not a {sig.input_type.name}")
        return sig

    def step(self, proc: int, arg: Any, heap: Heap) -> Dist:
        """Distribution over ``(heap', outcome)`` of one query on ``heap``."""
        key = (proc, arg, heap)
        hit = self._cache.get(key)
        if hit is None:
            self.check_query(proc, arg)
            hit = interpret(self.package.body(proc)(arg), heap)
            self._cache[key] = hit
        return hit

    def __repr__(self) -> str:
        return f"Game({self.name})"


def same_interface(g1: Game, g2: Game) -> bool:
    a, b = g1.interface, g2.interface
    return len(a) == len(b) and all(x.id == y.id and x.same_types(y) for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# strategies


@dataclass(frozen=True)
class Guess:
    value: Any
    name: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Query:
    """Ask ``proc(arg)``; continue with ``children[outcome]``.

    ``children`` is a mapping or a function of the outcome.  Outcomes
    missing from a mapping go to ``default``.
    """

    proc: int
    arg: Any
    children: Mapping[Any, Any] | Callable[[Any], Any]
    default: Any = None
    name: str | None = field(default=None, compare=False)

    def next(self, outcome: Any):
        if callable(self.children):
            return self.children(outcome)
        child = self.children.get(outcome, self.default)
        if child is None:
            raise GameError(f"strategy has no branch for outcome {outcome!r} of procedure {self.proc}")
        return child


Strategy = Guess | Query


def ask(proc: int, arg: Any = (), then: Callable[[Any], Strategy] | None = None, name: str | None = None) -> Query:
    return Query(proc, arg, then, name=name)


def outcome_space(sig: ProcSig) -> list:
    """Every observable outcome of a procedure, the assert failure included."""
    return [Ok(v) for v in sig.output_type.values()] + [FAIL]


def check_strategy(s: Strategy, interface: Iterable[ProcSig], max_depth: int) -> list[str]:
    """Static check of a mapping-based strategy: coverage and depth."""
    sigs = {sig.id: sig for sig in interface}
    problems: list[str] = []

    def walk(s: Strategy, depth: int) -> None:
        if isinstance(s, Guess):
            return
        if depth >= max_depth:
            problems.append(f"query {s.proc}({s.arg!r}) exceeds depth {max_depth}")
            return
        sig = sigs.get(s.proc)
        if sig is None:
            problems.append(f"query of unexported procedure {s.proc}")
            return
        if not sig.input_type.contains(s.arg):
            problems.append(f"argument {s.arg!r} is not a {sig.input_type.name}")
        for o in outcome_space(sig):
            try:
                walk(s.next(o), depth + 1)
            except GameError as exc:
                problems.append(str(exc))

    walk(s, 0)
    return problems


def strategy_depth(s: Strategy, outcomes: Callable[[int], Sequence[Any]]) -> int:
    if isinstance(s, Guess):
        return 0
    return 1 + max(strategy_depth(s.next(o), outcomes) for o in outcomes(s.proc))


def enumerate_strategies(
    queries: Sequence[tuple[int, Any]],
    outcomes: Callable[[int, Any], Sequence[Any]],
    depth: int,
    guesses: Sequence[Any] = (False, True),
) -> Iterator[Strategy]:
    """Every decision tree of depth <= ``depth``.

    Each query branches on ``outcomes(proc, arg)``; any other outcome goes
    to a ``Guess(guesses[0])`` default.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    leaves = [Guess(g) for g in guesses]
    if depth == 0:
        yield from leaves
        return
    smaller = list(enumerate_strategies(queries, outcomes, depth - 1, guesses))
    yield from leaves
    for proc, arg in queries:
        outs = list(outcomes(proc, arg))
        for combo in itertools.product(smaller, repeat=len(outs)):
            yield Query(proc, arg, dict(zip(outs, combo)), default=leaves[0])


def count_strategies(
    queries: Sequence[tuple[int, Any]],
    outcomes: Callable[[int, Any], Sequence[Any]],
    depth: int,
    n_guesses: int = 2,
) -> int:
    if depth == 0:
        return n_guesses
    smaller = count_strategies(queries, outcomes, depth - 1, n_guesses)
    return n_guesses + sum(smaller ** len(list(outcomes(p, a))) for p, a in queries)


# ---------------------------------------------------------------------------
# running strategies


def _add(acc: dict, key: Any, w: Fraction) -> None:
    acc[key] = acc.get(key, Fraction(0)) + w


def _play(
    s: Strategy,
    state: dict,
    step: Callable[[int, Any, Heap], Dist],
    check: Callable[[int, Any], None],
    leaf: Callable[[Any, dict], Fraction],
    depth: int,
    max_depth: int | None,
    counter: list,
) -> Fraction:
    if isinstance(s, Guess):
        counter[0] += 1
        return leaf(s.value, state)
    if not isinstance(s, Query):
        raise GameError(f"not a strategy node: {s!r}")
    if max_depth is not None and depth >= max_depth:
        raise GameError(f"strategy exceeds the query bound {max_depth}")
    check(s.proc, s.arg)
    branches: dict = {}
    for h, m in state.items():
        for (h2, o), w in step(s.proc, s.arg, h).items():
            _add(branches.setdefault(o, {}), h2, m * w)
    total = Fraction(0)
    for o in sorted(branches, key=_outcome_key):
        total += _play(s.next(o), branches[o], step, check, leaf, depth + 1, max_depth, counter)
    return total


def _outcome_key(o: Any):
    return canon_key(o)


def _bool_leaf(value: Any, state: dict) -> Fraction:
    if not isinstance(value, bool):
        raise GameError(f"strategy leaf must be a boolean guess, got {value!r}")
    return sum(state.values(), Fraction(0)) if value else Fraction(0)


def run_game_detail(a: Strategy, g: Game) -> tuple[Fraction, int]:
    """``(Pr[a outputs true against g], number of transcripts explored)``."""
    counter = [0]
    p = _play(a, {g.initial_heap(): Fraction(1)}, g.step, g.check_query, _bool_leaf, 0, None, counter)
    return p, counter[0]


def run_game(a: Strategy, g: Game) -> Fraction:
    return run_game_detail(a, g)[0]


@dataclass(frozen=True)
class AdvantageReport:
    left: str
    right: str
    strategy: str
    pr_true_left: Fraction
    pr_true_right: Fraction
    advantage: Fraction
    transcripts: int


def _strategy_name(a: Strategy) -> str:
    return a.name or type(a).__name__.lower()


def advantage(a: Strategy, g1: Game, g2: Game) -> AdvantageReport:
    if not same_interface(g1, g2):
        raise GameError(f"{g1.name} and {g2.name} export different interfaces")
    p1, n1 = run_game_detail(a, g1)
    p2, n2 = run_game_detail(a, g2)
    return AdvantageReport(g1.name, g2.name, _strategy_name(a), p1, p2, abs(p1 - p2), n1 + n2)


def triangle_check(a: Strategy, g1: Game, g2: Game, g3: Game) -> bool:
    return advantage(a, g1, g3).advantage <= advantage(a, g1, g2).advantage + advantage(a, g2, g3).advantage


# ---------------------------------------------------------------------------
# strategies routed through a package (A o P)


def run_game_through(a: Strategy, p: Package, g: Game, rename: Mapping[int, int] | None = None) -> Fraction:
    """Pr[true] for the adversary ``a o p`` playing ``g``.

    Queries go to ``p``'s exports, whose calls are resolved against ``g``'s
    bodies at interpretation time (no inlining); ``p``'s state is threaded
    through the whole interaction alongside ``g``'s.
    """
    rename = dict(rename or {})
    link = {}
    for sig in p.imports:
        target = rename.get(sig.id, sig.id)
        if not sig.same_types(g.sig(target)):
            raise CompositionError(f"type mismatch linking {sig!r} to {g.sig(target)!r}")
        link[sig.id] = g.package.body(target)
    locations: dict[str, Location] = {}
    for loc in list(p.locations) + list(g.package.locations):
        if locations.setdefault(loc.id, loc) != loc:
            raise CompositionError(f"conflicting declarations for @{loc.id}")
    heap = heap_init(locations.values())
    cache: dict = {}

    def step(proc: int, arg: Any, h: Heap) -> Dist:
        key = (proc, arg, h)
        if key not in cache:
            cache[key] = interpret(p.body(proc)(arg), h, link)
        return cache[key]

    def check(proc: int, arg: Any) -> None:
        if proc not in p.exports:
            raise GameError(f"{p.name} does not export procedure {proc}")
        if not p.sig(proc).input_type.contains(arg):
            raise GameError(f"argument {arg!r} is not a {p.sig(proc).input_type.name}")

    return _play(a, {heap: Fraction(1)}, step, check, _bool_leaf, 0, None, [0])


def reduction_advantages(
    a: Strategy, p: Package, g1: Game, g2: Game, rename: Mapping[int, int] | None = None
) -> tuple[Fraction, Fraction]:
    """``(Adv(a o p, g1, g2), Adv(a, p o g1, p o g2))``."""
    left = abs(run_game_through(a, p, g1, rename) - run_game_through(a, p, g2, rename))
    compose = (lambda g: compose_rename(p, rename, g.package)) if rename else (lambda g: compose_seq(p, g.package))
    right = advantage(a, Game(compose(g1)), Game(compose(g2))).advantage
    return left, right


def reduction_equality_check(
    a: Strategy, p: Package, g1: Game, g2: Game, rename: Mapping[int, int] | None = None
) -> bool:
    left, right = reduction_advantages(a, p, g1, g2, rename)
    return left == right


# ---------------------------------------------------------------------------
# strong unforgeability experiment


def seuf_challenger(scheme) -> tuple[Package, Any]:
    """The challenger of the sEUF-CMA experiment as a package.

    Returns the package (exporting ``get_pk`` and ``sign``) together with
    the command that generates and stores the key pair before the
    adversary runs.
    """
    sk_loc = Location("Challenger.SK", Option(scheme.seckey_type), None)
    pk_loc = Location("Challenger.PK", Option(scheme.pubkey_type), None)
    signed = Location("Challenger.S", SetOf(Product(scheme.message_type, scheme.signature_type)), frozenset())

    @procedure
    def setup(_):
        sk, pk = yield run(scheme.key_gen)
        yield put(sk_loc, sk)
        yield put(pk_loc, pk)
        return ()

    @procedure
    def get_pk(_):
        pk = yield get(pk_loc)
        return pk

    @procedure
    def sign(m):
        sk = yield get(sk_loc)
        sigma = scheme.sign(sk, m)
        s = yield get(signed)
        yield put(signed, s | {(m, sigma)})
        return sigma

    package = Package(
        "Challenger",
        [],
        [
            (ProcSig(procs.GET_PK, "get_pk", UNIT, scheme.pubkey_type), get_pk),
            (ProcSig(procs.SIGN, "sign", scheme.message_type, scheme.signature_type), sign),
        ],
        [sk_loc, pk_loc, signed],
    )
    return package, setup(())


def seuf_experiment(scheme, a: Strategy, qmax: int, ideal: bool = False) -> Fraction:
    """Exact probability that ``a`` outputs a fresh valid forgery.

    The leaves of ``a`` hold candidate pairs ``(m*, sigma*)``.  With
    ``ideal`` the verifier accepts exactly the pairs in the signed set,
    which no fresh pair can satisfy.
    """
    package, setup = seuf_challenger(scheme)
    game = Game(package)
    start: dict = {}
    for (h, o), w in interpret(setup, game.initial_heap()).items():
        if o is FAIL:
            raise GameError("key generation failed with certainty on some branch")
        _add(start, h, w)

    def leaf(value: Any, state: dict) -> Fraction:
        if not (isinstance(value, tuple) and len(value) == 2):
            raise GameError(f"sEUF leaf must be a (message, signature) pair, got {value!r}")
        m, sigma = value
        won = Fraction(0)
        for h, mass in state.items():
            issued = h["Challenger.S"]
            valid = (m, sigma) in issued if ideal else scheme.verify(h["Challenger.PK"], sigma, m)
            if valid and (m, sigma) not in issued:
                won += mass
        return won

    return _play(a, start, game.step, game.check_query, leaf, 0, qmax, [0])


__all__ = [
    "AdvantageReport",
    "Game",
    "GameError",
    "Guess",
    "Query",
    "Strategy",
    "advantage",
    "ask",
    "check_strategy",
    "count_strategies",
    "enumerate_strategies",
    "outcome_space",
    "reduction_advantages",
    "reduction_equality_check",
    "run_game",
    "run_game_detail",
    "run_game_through",
    "same_interface",
    "seuf_challenger",
    "seuf_experiment",
    "strategy_depth",
    "triangle_check",
]
