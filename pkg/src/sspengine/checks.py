"""Named checks grouped into suites; the CLI runs and reports them.

Every check is a function of a :class:`RunConfig` returning a
:class:`CheckOutcome`.  Checks are deterministic: random generators are
seeded and every enumeration follows canonical order.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from . import procs
from .casestudies import (
    ATTPROT_RENAME,
    IDEAL,
    PASSTHROUGH,
    REAL,
    CaseStudyConfig,
    attprim_ideal_invariant,
    build_attprim,
    build_attprot,
    build_attprot_stacks,
    build_keygen,
    build_sigprim,
    build_sigprim_stack,
    build_sigprot,
    forger_strategy,
    seuf_forger,
    seuf_replayer,
    signature_config,
    sigprot_invariant,
    toy_config,
)
from .command import FAIL, Ok, commute_check, get, interpret, procedure, put, sample, assert_
from .equivcheck import check_bisimulation, strategy_cross_check, transcript_equiv
from .exactdist import BOOL, Dist, dist_bind, mk_uniform, z_mod
from .game import (
    Game,
    Guess,
    Query,
    Strategy,
    advantage,
    enumerate_strategies,
    reduction_advantages,
    run_game,
    run_game_through,
    seuf_experiment,
)
from .heap import Location, heap_ignore
from .package import Package, ProcSig, compose_seq, identity_package, validate
from .randprog import all_heaps, build, disjoint_pair
from .rsa import RsaParams, rsa_correctness, rsa_scheme
from .schemes import correctness_suite, mk_injective_hash, mk_toy_symmetric

SEED = 20240601


@dataclass(frozen=True)
class RunConfig:
    suite: str = "all"
    msg_size: int = 3
    state_size: int = 2
    challenge_size: int = 2
    depth: int = 3
    rsa_n: int = 0
    samples: int = 200


@dataclass(frozen=True)
class CheckOutcome:
    status: str  # pass | fail | counterexample
    value: Fraction | None = None
    counterexample: str | None = None


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    run: Callable[[RunConfig], CheckOutcome]


def _ok(cond: bool, value: Fraction | None = None, detail: str | None = None) -> CheckOutcome:
    return CheckOutcome("pass" if cond else "fail", value, None if cond else detail)


# ---------------------------------------------------------------------------
# toy games used by the property and reduction checks


def bernoulli(p: Fraction) -> Dist:
    return Dist({True: p, False: 1 - p})


def biased_coin_game(cfg: CaseStudyConfig, p: Fraction) -> Game:
    """Exports ``prot`` with the signature protocol's types; ``b`` is a p-biased coin."""
    pk0 = cfg.scheme.pubkey_type.values()[0]
    sig0 = cfg.scheme.signature_type.values()[0]

    @procedure
    def prot(_m):
        b = yield sample(bernoulli(p))
        return pk0, sig0, b

    return Game(Package(f"Coin[{p}]", [], [(cfg.sig(procs.PROT), prot)]))


FLIP = 1
COUNTER = Location("Flip.N", z_mod(3), 0)
FLIP_SIG = ProcSig(FLIP, "flip", z_mod(3), BOOL)


def flip_game(biases: tuple, fail_at: int, name: str) -> Game:
    """``flip(arg)``: a stateful coin whose bias depends on ``arg`` and a counter.

    ``flip(2)`` fails its assert when the counter equals ``fail_at``.
    """

    @procedure
    def flip(arg):
        n = yield get(COUNTER)
        yield put(COUNTER, (n + 1) % 3)
        if arg == 2:
            yield assert_(n != fail_at)
        b = yield sample(bernoulli(biases[(arg + n) % 3]))
        return b

    return Game(Package(name, [], [(FLIP_SIG, flip)], [COUNTER]), name)


def flip_games() -> list[Game]:
    F = Fraction
    return [
        flip_game((F(1, 2), F(1, 3), F(2, 3)), 0, "FlipA"),
        flip_game((F(1, 2), F(1, 4), F(3, 4)), 1, "FlipB"),
        flip_game((F(1, 3), F(1, 2), F(1, 2)), 2, "FlipC"),
    ]


def flip_outcomes(_proc: int, _arg: Any) -> list:
    return [Ok(False), Ok(True), FAIL]


def flip_strategies(depth: int = 2):
    return enumerate_strategies([(FLIP, a) for a in range(3)], flip_outcomes, depth)


# ---------------------------------------------------------------------------
# dist-laws


def _random_dist(rng: random.Random, size: int) -> Dist:
    return mk_uniform([rng.randrange(size) for _ in range(rng.randint(1, 6))])


def _kernel(rng: random.Random, size: int) -> Callable[[int], Dist]:
    table = {v: _random_dist(rng, size) for v in range(size)}
    return table.__getitem__


def check_dist_normalization(cfg: RunConfig) -> CheckOutcome:
    rng = random.Random(SEED)
    for _ in range(300):
        size = rng.randint(1, 6)
        d = dist_bind(_random_dist(rng, size), _kernel(rng, size))
        if d.total() != 1 or any(w <= 0 for _, w in d.items()):
            return _ok(False, detail=repr(d))
        if Dist(dict(d.items())) != d:
            return _ok(False, detail=f"renormalizing changed {d!r}")
    return _ok(True)


def check_monad_laws(cfg: RunConfig) -> CheckOutcome:
    rng = random.Random(SEED + 1)
    for _ in range(300):
        size = rng.randint(1, 6)
        d, f, g = _random_dist(rng, size), _kernel(rng, size), _kernel(rng, size)
        v = rng.randrange(size)
        if dist_bind(Dist.point(v), f) != f(v):
            return _ok(False, detail=f"left identity at {v}")
        if dist_bind(d, Dist.point) != d:
            return _ok(False, detail=f"right identity on {d!r}")
        if dist_bind(dist_bind(d, f), g) != dist_bind(d, lambda x: dist_bind(f(x), g)):
            return _ok(False, detail=f"associativity on {d!r}")
    return _ok(True)


def check_swap_lemma(cfg: RunConfig) -> CheckOutcome:
    rng = random.Random(SEED + 2)
    locs = ["A", "B", "C"]
    heaps = all_heaps(locs)
    for _ in range(200):
        p1, p2 = disjoint_pair(rng, locs)
        verdict = commute_check(build(p1), build(p2), heaps)
        if verdict is False:
            return _ok(False, detail=f"{p1} / {p2}")
    return _ok(True)


def check_heap_ignore_laws(cfg: RunConfig) -> CheckOutcome:
    heaps = all_heaps(["A", "B"])
    for ignored in ([], ["A"], ["B"], ["A", "B"]):
        r = heap_ignore(ignored)
        for x in heaps:
            if not r(x, x):
                return _ok(False, detail=f"not reflexive for {ignored}")
        for x, y in itertools.product(heaps, repeat=2):
            if r(x, y) != r(y, x):
                return _ok(False, detail=f"not symmetric for {ignored}")
        for x, y, z in itertools.product(heaps, repeat=3):
            if r(x, y) and r(y, z) and not r(x, z):
                return _ok(False, detail=f"not transitive for {ignored}")
    return _ok(True)


def check_hash_injectivity(cfg: RunConfig) -> CheckOutcome:
    for s in range(1, 5):
        for c in range(1, 5):
            h = mk_injective_hash(z_mod(s, "State"), z_mod(c, "Challenge"), z_mod(s * c))
            if not h.is_injective():
                return _ok(False, detail=f"|S|={s}, |C|={c}")
    return _ok(True)


def check_advantage_laws(cfg: RunConfig) -> CheckOutcome:
    g1, g2, g3 = flip_games()
    count = 0
    for a in flip_strategies(2):
        count += 1
        p1, p2, p3 = run_game(a, g1), run_game(a, g2), run_game(a, g3)
        if advantage(a, g1, g1).advantage != 0:
            return _ok(False, detail=f"identity fails for {a}")
        d12, d21 = abs(p1 - p2), abs(p2 - p1)
        if d12 != d21 or not 0 <= d12 <= 1:
            return _ok(False, detail=f"symmetry/range fails for {a}")
        if abs(p1 - p3) > d12 + abs(p2 - p3):
            return _ok(False, detail=f"triangle fails for {a}")
    return _ok(True, Fraction(count))


# ---------------------------------------------------------------------------
# package-laws


def check_validate_packages(cfg: RunConfig) -> CheckOutcome:
    c = toy_config(cfg.state_size, cfg.challenge_size)
    packages = [build_keygen(c), build_attprot(c)]
    packages += [build_sigprim(c, f) for f in (REAL, IDEAL)]
    packages += [build_attprim(c, f) for f in (PASSTHROUGH, REAL, IDEAL)]
    packages += [g.package for g in build_attprot_stacks(c).values()]
    for p in packages:
        problems = validate(p)
        if problems:
            return _ok(False, detail=f"{p.name}: {problems}")
    return _ok(True, Fraction(len(packages)))


def check_compose_associativity(cfg: RunConfig) -> CheckOutcome:
    c = toy_config(cfg.state_size, cfg.challenge_size)
    att, prim, kg = build_attprim(c, PASSTHROUGH), build_sigprim(c, IDEAL), build_keygen(c)
    left = Game(compose_seq(compose_seq(att, prim), kg))
    right = Game(compose_seq(att, compose_seq(prim, kg)))
    r = transcript_equiv(left, right, min(cfg.depth, 2))
    return CheckOutcome("pass" if r.equivalent else "counterexample", None, None if r.equivalent else r.render())


def check_identity_composition(cfg: RunConfig) -> CheckOutcome:
    c = toy_config(cfg.state_size, cfg.challenge_size)
    stack = compose_seq(build_sigprim(c, REAL), build_keygen(c))
    wrapped = Game(compose_seq(identity_package(stack.interface), stack))
    r = transcript_equiv(Game(stack), wrapped, min(cfg.depth, 2))
    ok = r.equivalent and wrapped.interface.ids == stack.interface.ids
    return _ok(ok, detail=r.render())


# ---------------------------------------------------------------------------
# signatures


def _sig_cfg(cfg: RunConfig) -> CaseStudyConfig:
    return signature_config(mk_toy_symmetric(cfg.msg_size))


def _equiv_and_oracle(g1: Game, g2: Game, depth: int) -> CheckOutcome:
    r = transcript_equiv(g1, g2, depth)
    if not r.equivalent:
        return CheckOutcome("counterexample", None, r.render())
    oracle = strategy_cross_check(g1, g2, depth)
    if oracle.max_advantage != 0 or not oracle.confirmed:
        return CheckOutcome("fail", oracle.max_advantage, "strategy oracle disagrees with transcript equivalence")
    return CheckOutcome("pass", oracle.max_advantage)


def check_sigprot_ind(cfg: RunConfig) -> CheckOutcome:
    c = _sig_cfg(cfg)
    return _equiv_and_oracle(build_sigprot(c, REAL), build_sigprot(c, IDEAL), cfg.depth)


def check_sigprot_bisim(cfg: RunConfig) -> CheckOutcome:
    c = _sig_cfg(cfg)
    r = check_bisimulation(build_sigprot(c, REAL), build_sigprot(c, IDEAL), sigprot_invariant(c), cfg.depth)
    return _ok(r.holds, detail=r.failure)


def check_sigprot_correctness(cfg: RunConfig) -> CheckOutcome:
    c = _sig_cfg(cfg)
    g = build_sigprot(c, REAL)
    for m in c.scheme.message_type.values():
        d = interpret(g.package.body(procs.PROT)(m), g.initial_heap())
        if d.prob(lambda x: not (isinstance(x[1], Ok) and x[1].value[2] is True)) != 0:
            return _ok(False, detail=f"prot({m}) does not always verify")
    return _ok(True)


# ---------------------------------------------------------------------------
# remote attestation


def _ra(cfg: RunConfig) -> tuple[CaseStudyConfig, dict[str, Game]]:
    c = toy_config(cfg.state_size, cfg.challenge_size)
    return c, build_attprot_stacks(c)


def _ra_depth(cfg: RunConfig) -> int:
    return min(cfg.depth, 2)


def check_ra_ind(cfg: RunConfig) -> CheckOutcome:
    _, st = _ra(cfg)
    return _equiv_and_oracle(st["AttProt^Prim_real"], st["AttProt^Prim_ideal"], _ra_depth(cfg))


def _lemma(a: str, b: str) -> Callable[[RunConfig], CheckOutcome]:
    def run(cfg: RunConfig) -> CheckOutcome:
        _, st = _ra(cfg)
        r = transcript_equiv(st[a], st[b], _ra_depth(cfg))
        return CheckOutcome("pass" if r.equivalent else "counterexample", None, None if r.equivalent else r.render())

    return run


def first_outcomes(games: list[Game], queries: list[tuple[int, Any]]) -> Callable[[int, Any], list]:
    """Outcomes of each query from the games' initial heaps, in canonical order."""
    table: dict = {}
    for proc, arg in queries:
        seen = set()
        for g in games:
            seen |= {o for (_, o) in g.step(proc, arg, g.initial_heap()).support()}
        table[(proc, arg)] = sorted(seen, key=lambda o: (o is FAIL, repr(o)))
    return lambda proc, arg: table[(proc, arg)]


def ra_strategies(c: CaseStudyConfig, games: list[Game], samples: int, seed: int = SEED) -> list[Strategy]:
    """All depth-<=1 strategies plus a seeded sample of depth-2 ones."""
    queries = [(procs.PROT, ch) for ch in c.challenge_type.values()]
    outs = first_outcomes(games, queries)
    shallow = list(enumerate_strategies(queries, outs, 1))
    rng = random.Random(seed)
    deep = []
    for _ in range(samples):
        proc, arg = rng.choice(queries)
        deep.append(Query(proc, arg, {o: rng.choice(shallow) for o in outs(proc, arg)}, default=Guess(False)))
    return shallow + deep


def check_protocol_reduction(cfg: RunConfig) -> CheckOutcome:
    c, st = _ra(cfg)
    sig_real, sig_ideal = build_sigprot(c, REAL), build_sigprot(c, IDEAL)
    attprot = build_attprot(c)
    games = [st["AttProt^Prim_real"], st["AttProt^Prim_ideal"]]
    strategies = ra_strategies(c, games, cfg.samples)
    for a in strategies:
        lhs = advantage(a, *games).advantage
        through, composed = reduction_advantages(a, attprot, sig_real, sig_ideal, ATTPROT_RENAME)
        if through != composed:
            return _ok(False, detail=f"reduction equality fails: {through} != {composed} for {a}")
        if lhs > through:
            return _ok(False, detail=f"reduction bound fails: {lhs} > {through} for {a}")
    return _ok(True, Fraction(len(strategies)))


def check_reduction_biased_coin(cfg: RunConfig) -> CheckOutcome:
    c = toy_config(cfg.state_size, cfg.challenge_size)
    g1, g2 = biased_coin_game(c, Fraction(1, 3)), biased_coin_game(c, Fraction(2, 3))
    attprot = build_attprot(c)
    queries = [(procs.PROT, ch) for ch in c.challenge_type.values()]
    outs = first_outcomes([g1, g2], [(procs.PROT, m) for m in c.scheme.message_type.values()])
    first_m = c.scheme.message_type.values()[0]
    strategies = list(enumerate_strategies(queries, lambda p, a: outs(p, first_m), 2))
    best = Fraction(0)
    for a in strategies:
        through, composed = reduction_advantages(a, attprot, g1, g2, ATTPROT_RENAME)
        if through != composed:
            return _ok(False, detail=f"{through} != {composed} for {a}")
        best = max(best, through)
    return _ok(best == Fraction(1, 3), best, f"best advantage {best}, expected 1/3")


def check_primitive_reduction(cfg: RunConfig) -> CheckOutcome:
    c, st = _ra(cfg)
    att = build_attprim(c, PASSTHROUGH)
    prim_real, prim_ideal = build_sigprim_stack(c, REAL), build_sigprim_stack(c, IDEAL)
    games = [st["AttPrimSig_real"], st["AttPrimSig_ideal"]]
    queries = [(procs.GET_PK_A, ())] + [(procs.VERIFY_A, x) for x in c.chal_sig.values()]
    outs = first_outcomes(games, queries)
    strategies = list(enumerate_strategies(queries, outs, 1))
    strategies.append(_att_forger(c))
    worst = Fraction(0)
    for a in strategies:
        lhs = advantage(a, *games).advantage
        rhs = abs(run_game_through(a, att, prim_real) - run_game_through(a, att, prim_ideal))
        if lhs > rhs:
            return _ok(False, detail=f"{lhs} > {rhs} for {a}")
        worst = max(worst, lhs)
    return _ok(True, worst)


def _att_forger(c: CaseStudyConfig) -> Strategy:
    ch = c.challenge_type.values()[0]
    mod = c.scheme.message_type.size

    def after_pk(o):
        if not isinstance(o, Ok):
            return Guess(False)
        a = (c.hash(c.platform_state, ch) + o.value) % mod
        return Query(procs.VERIFY_A, (ch, a), lambda r: Guess(r == Ok(True)))

    return Query(procs.GET_PK_A, (), after_pk, name="attestation-forger")


def check_ra_bisim(cfg: RunConfig) -> CheckOutcome:
    c, st = _ra(cfg)
    r = check_bisimulation(st["SigPrimAtt_ideal"], st["AttPrimSig_ideal"], attprim_ideal_invariant(c), _ra_depth(cfg))
    return _ok(r.holds, detail=r.failure)


def check_ra_sigprot_bisim(cfg: RunConfig) -> CheckOutcome:
    c = toy_config(cfg.state_size, cfg.challenge_size)
    r = check_bisimulation(build_sigprot(c, REAL), build_sigprot(c, IDEAL), sigprot_invariant(c), _ra_depth(cfg))
    return _ok(r.holds, detail=r.failure)


def check_ra_primitive_gap(cfg: RunConfig) -> CheckOutcome:
    c, st = _ra(cfg)
    r = transcript_equiv(st["SigPrimAtt_real"], st["SigPrimAtt_ideal"], 2)
    adv = advantage(_att_forger(c), st["AttPrimSig_real"], st["AttPrimSig_ideal"]).advantage
    return CheckOutcome("pass" if not r.equivalent and adv == 1 else "fail", adv, r.render())


# ---------------------------------------------------------------------------
# rsa


def check_rsa(cfg: RunConfig) -> CheckOutcome:
    r = rsa_correctness(RsaParams(cfg.rsa_n))
    detail = f"failure mass {r.failure_mass}, inverses ok {r.inverse_ok}, witnesses {list(r.witnesses)[:3]}"
    return _ok(r.passed, r.failure_mass, detail)


def check_rsa_generic(cfg: RunConfig) -> CheckOutcome:
    r = correctness_suite(rsa_scheme(RsaParams(cfg.rsa_n)))
    return _ok(r.passed, Fraction(r.checked), repr(r.witnesses))


def check_rsa_sigprot_ind(cfg: RunConfig) -> CheckOutcome:
    c = signature_config(rsa_scheme(RsaParams(cfg.rsa_n)))
    r = transcript_equiv(build_sigprot(c, REAL), build_sigprot(c, IDEAL), 1)
    return CheckOutcome("pass" if r.equivalent else "counterexample", None, None if r.equivalent else r.render())


# ---------------------------------------------------------------------------
# gap demo


def check_gap_counterexample(cfg: RunConfig) -> CheckOutcome:
    c = _sig_cfg(cfg)
    r = transcript_equiv(build_sigprim_stack(c, REAL), build_sigprim_stack(c, IDEAL), min(cfg.depth, 2))
    return CheckOutcome("fail" if r.equivalent else "pass", None, r.render())


def check_forger_advantage(cfg: RunConfig) -> CheckOutcome:
    c = _sig_cfg(cfg)
    adv = advantage(forger_strategy(c), build_sigprim_stack(c, REAL), build_sigprim_stack(c, IDEAL)).advantage
    return _ok(adv == 1, adv, f"advantage {adv}")


def check_seuf_forger(cfg: RunConfig) -> CheckOutcome:
    c = _sig_cfg(cfg)
    p = seuf_experiment(c.scheme, seuf_forger(c), 1)
    return _ok(p == 1, p, f"win probability {p}")


def check_seuf_replayer(cfg: RunConfig) -> CheckOutcome:
    c = _sig_cfg(cfg)
    p = seuf_experiment(c.scheme, seuf_replayer(), 1)
    return _ok(p == 0, p, f"win probability {p}")


def check_seuf_ideal(cfg: RunConfig) -> CheckOutcome:
    c = _sig_cfg(cfg)
    p = max(seuf_experiment(c.scheme, a, 1, ideal=True) for a in (seuf_forger(c), seuf_replayer()))
    return _ok(p == 0, p, f"win probability {p}")


# ---------------------------------------------------------------------------
# registry

SUITES: dict[str, list[Check]] = {
    "dist-laws": [
        Check("dist-normalization", "finite distributions sum to exactly one", check_dist_normalization),
        Check("dist-monad-laws", "bind: left/right identity and associativity", check_monad_laws),
        Check("swap-lemma", "commands on disjoint locations commute", check_swap_lemma),
        Check("heap-ignore-equivalence", "heap_ignore is an equivalence relation", check_heap_ignore_laws),
        Check("hash-injectivity", "injective (state, challenge) hash", check_hash_injectivity),
        Check("advantage-laws", "advantage identity, symmetry and triangle inequality", check_advantage_laws),
    ],
    "package-laws": [
        Check("package-validation", "every call resolved, every location declared", check_validate_packages),
        Check("compose-associativity", "sequential composition associates", check_compose_associativity),
        Check("compose-identity", "composition with a forwarding package", check_identity_composition),
    ],
    "sigproto": [
        Check("theorem-1-perfect-ind", "signature protocol: real vs ideal advantage is 0", check_sigprot_ind),
        Check("sigprot-bisimulation", "heap_ignore {SIG} invariant", check_sigprot_bisim),
        Check("sigprot-correctness", "protocol verification always succeeds", check_sigprot_correctness),
    ],
    "ra-protocol": [
        Check("ra-perfect-ind", "attestation protocol: real vs ideal advantage is 0", check_ra_ind),
        Check("ra-lemma-real", "real attestation protocol stackings agree", _lemma("AttProt^Prim_real", "AttProt^Prot_real")),
        Check("ra-lemma-ideal", "ideal attestation protocol stackings agree", _lemma("AttProt^Prim_ideal", "AttProt^Prot_ideal")),
        Check("ra-protocol-reduction", "protocol reduction bound and reduction equality", check_protocol_reduction),
        Check("ra-reduction-biased-coin", "reduction equality on a distinguishable pair", check_reduction_biased_coin),
        Check("ra-sigprot-bisimulation", "heap_ignore {SIG} invariant at attestation sizes", check_ra_sigprot_bisim),
    ],
    "ra-primitives": [
        Check("ra-primitives-real", "lifted real primitives agree", _lemma("SigPrimAtt_real", "AttPrimSig_real")),
        Check("ra-primitives-ideal", "lifted ideal primitives agree", _lemma("SigPrimAtt_ideal", "AttPrimSig_ideal")),
        Check("ra-primitives-bisimulation", "heap_ignore {Z} and the Z-to-SIG link", check_ra_bisim),
        Check("ra-primitive-reduction", "primitive reduction bound", check_primitive_reduction),
        Check("ra-primitive-gap", "forgeable scheme separates attestation primitives", check_ra_primitive_gap),
    ],
    "rsa": [
        Check("rsa-functional-correctness", "RSA verify(sign) over every key and residue", check_rsa),
        Check("rsa-generic-correctness", "RSA through the generic correctness suite", check_rsa_generic),
        Check("rsa-sigprot-ind", "signature protocol over RSA, one query", check_rsa_sigprot_ind),
    ],
    "gap-demo": [
        Check("primitive-gap-counterexample", "primitive pair is distinguishable", check_gap_counterexample),
        Check("primitive-forger-advantage", "forger advantage against the primitive pair", check_forger_advantage),
        Check("seuf-forger-win", "sEUF-CMA: key-only forgery of the toy scheme", check_seuf_forger),
        Check("seuf-replayer-win", "sEUF-CMA: replaying a signed pair never wins", check_seuf_replayer),
        Check("seuf-ideal-win", "sEUF-CMA against lookup verification", check_seuf_ideal),
    ],
}

SUITE_NAMES = list(SUITES) + ["all"]


def checks_for(suite: str) -> list[Check]:
    if suite == "all":
        return [c for s in SUITES.values() for c in s]
    return list(SUITES[suite])
