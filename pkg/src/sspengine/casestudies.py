"""Package builders for the signature and remote-attestation case studies.

Procedure ids live in :mod:`sspengine.procs`.  Stacks are assembled with
:func:`compose_seq` / :func:`compose_rename` and closed into games.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from . import procs
from .command import Ok, assert_, call, get, procedure, put, run
from .exactdist import BOOL, UNIT, FinType, Option, Product, SetOf, z_mod
from .game import Game, Guess, Query, Strategy
from .heap import FunctionLink, HeapRelation, Ignore, Location
from .package import Package, ProcSig, compose_rename, compose_seq
from .schemes import HashFn, SchemeError, SignatureScheme, forge_toy, mk_injective_hash, mk_toy_symmetric

REAL, IDEAL, PASSTHROUGH = "real", "ideal", "passthrough"


@dataclass(frozen=True)
class CaseStudyConfig:
    scheme: SignatureScheme
    hash: HashFn
    state_type: Any
    challenge_type: Any
    platform_state: Any

    def __post_init__(self):
        if not self.state_type.contains(self.platform_state):
            raise SchemeError(f"platform state {self.platform_state!r} is not a {self.state_type.name}")
        if not self.hash.is_injective():
            raise SchemeError("attestation hash is not injective")

    # signatures ---------------------------------------------------------

    @property
    def sk_loc(self) -> Location:
        return Location("KeyGen.SK", Option(self.scheme.seckey_type), None)

    @property
    def pk_loc(self) -> Location:
        return Location("KeyGen.PK", Option(self.scheme.pubkey_type), None)

    @property
    def sig_loc(self) -> Location:
        return Location("SigPrim.SIG", SetOf(self.msg_sig), frozenset())

    @property
    def st_loc(self) -> Location:
        return Location("Platform.ST", self.state_type, self.platform_state)

    @property
    def z_loc(self) -> Location:
        return Location("AttPrim.Z", SetOf(self.chal_sig), frozenset())

    @property
    def msg_sig(self) -> Product:
        return Product(self.scheme.message_type, self.scheme.signature_type)

    @property
    def chal_sig(self) -> Product:
        return Product(self.challenge_type, self.scheme.signature_type)

    @property
    def prot_out(self) -> Product:
        return Product(self.scheme.pubkey_type, self.scheme.signature_type, BOOL)

    def sig(self, proc: int) -> ProcSig:
        s = self.scheme
        types = {
            procs.KEY_GEN: (UNIT, Product(s.seckey_type, s.pubkey_type)),
            procs.GET_PK: (UNIT, s.pubkey_type),
            procs.SIGN: (s.message_type, s.signature_type),
            procs.VER_SIG: (self.msg_sig, BOOL),
            procs.CHALLENGE: (s.message_type, s.signature_type),
            procs.VERIFY: (self.msg_sig, BOOL),
            procs.PROT: (s.message_type, self.prot_out),
            procs.SIG_PROT: (s.message_type, self.prot_out),
            procs.GET_PK_A: (UNIT, s.pubkey_type),
            procs.ATTEST: (self.challenge_type, Product(s.signature_type, s.message_type)),
            procs.VERIFY_A: (self.chal_sig, BOOL),
        }
        i, o = types[proc]
        return ProcSig(proc, procs.NAMES[proc], i, o)

    def att_prot_sig(self) -> ProcSig:
        # the attestation protocol takes challenges, not messages
        return ProcSig(procs.PROT, "prot", self.challenge_type, self.prot_out)


def toy_config(state_size: int = 2, challenge_size: int = 2, msg_size: int | None = None, platform_state: int = 0):
    """Toy symmetric scheme with ``|Message| = msg_size`` (default ``|S|*|C|``)."""
    if state_size < 1 or challenge_size < 1:
        raise SchemeError("state and challenge spaces must be nonempty")
    msg_size = msg_size or state_size * challenge_size
    scheme = mk_toy_symmetric(msg_size)
    state_type = z_mod(state_size, "State")
    challenge_type = z_mod(challenge_size, "Challenge")
    h = mk_injective_hash(state_type, challenge_type, scheme.message_type)
    return CaseStudyConfig(scheme, h, state_type, challenge_type, platform_state)


def signature_config(scheme: SignatureScheme) -> CaseStudyConfig:
    """A config for the signature-only stacks (one state, one challenge)."""
    state_type = FinType("State", [0])
    challenge_type = FinType("Challenge", [0])
    h = mk_injective_hash(state_type, challenge_type, scheme.message_type)
    return CaseStudyConfig(scheme, h, state_type, challenge_type, 0)


# ---------------------------------------------------------------------------
# signatures


def build_keygen(cfg: CaseStudyConfig) -> Package:
    @procedure
    def key_gen(_):
        sk, pk = yield run(cfg.scheme.key_gen)
        yield put(cfg.sk_loc, sk)
        yield put(cfg.pk_loc, pk)
        return sk, pk

    return Package("KeyGen", [], [(cfg.sig(procs.KEY_GEN), key_gen)], [cfg.sk_loc, cfg.pk_loc])


def build_sigprim(cfg: CaseStudyConfig, flavor: str) -> Package:
    if flavor not in (REAL, IDEAL):
        raise ValueError(f"unknown flavor {flavor!r}")
    s = cfg.scheme
    ideal = flavor == IDEAL

    @procedure
    def get_pk(_):
        _, pk = yield call(procs.KEY_GEN)
        return pk

    @procedure
    def sign(m):
        sk = yield get(cfg.sk_loc)
        yield assert_(sk is not None)
        sigma = s.sign(sk, m)
        if ideal:
            signed = yield get(cfg.sig_loc)
            yield put(cfg.sig_loc, signed | {(m, sigma)})
        return sigma

    @procedure
    def ver_sig(msg_sigma):
        m, sigma = msg_sigma
        if ideal:
            signed = yield get(cfg.sig_loc)
            return (m, sigma) in signed
        pk = yield get(cfg.pk_loc)
        yield assert_(pk is not None)
        return s.verify(pk, sigma, m)

    locations = [cfg.sk_loc, cfg.pk_loc] + ([cfg.sig_loc] if ideal else [])
    return Package(
        f"SigPrim_{flavor}",
        [cfg.sig(procs.KEY_GEN)],
        [
            (cfg.sig(procs.GET_PK), get_pk),
            (cfg.sig(procs.SIGN), sign),
            (cfg.sig(procs.VER_SIG), ver_sig),
        ],
        locations,
    )


def build_sigprim_stack(cfg: CaseStudyConfig, flavor: str) -> Game:
    return Game(compose_seq(build_sigprim(cfg, flavor), build_keygen(cfg)), f"SigPrim_{flavor} o KeyGen")


def build_sigprot_wrapper(cfg: CaseStudyConfig) -> Package:
    @procedure
    def prot(m):
        pk = yield call(procs.GET_PK)
        sigma = yield call(procs.CHALLENGE, m)
        b = yield call(procs.VERIFY, (m, sigma))
        return pk, sigma, b

    return Package(
        "SigProt",
        [cfg.sig(procs.GET_PK), cfg.sig(procs.CHALLENGE), cfg.sig(procs.VERIFY)],
        [(cfg.sig(procs.PROT), prot)],
    )


SIGPROT_RENAME = {procs.CHALLENGE: procs.SIGN, procs.VERIFY: procs.VER_SIG}


def build_sigprot(cfg: CaseStudyConfig, flavor: str) -> Game:
    inner = compose_seq(build_sigprim(cfg, flavor), build_keygen(cfg))
    return Game(compose_rename(build_sigprot_wrapper(cfg), SIGPROT_RENAME, inner), f"SigProt_{flavor}")


# ---------------------------------------------------------------------------
# remote attestation


def build_attprim(cfg: CaseStudyConfig, flavor: str) -> Package:
    """``passthrough`` is the plain attestation layer; ``real`` is the same code."""
    if flavor not in (PASSTHROUGH, REAL, IDEAL):
        raise ValueError(f"unknown flavor {flavor!r}")
    ideal = flavor == IDEAL
    H = cfg.hash

    @procedure
    def get_pk_a(_):
        pk = yield call(procs.GET_PK)
        return pk

    @procedure
    def attest(c):
        s = yield get(cfg.st_loc)
        m = H(s, c)
        a = yield call(procs.SIGN, m)
        if ideal:
            z = yield get(cfg.z_loc)
            yield put(cfg.z_loc, z | {(c, a)})
        return a, m

    @procedure
    def verify_a(chal_att):
        c, a = chal_att
        if ideal:
            z = yield get(cfg.z_loc)
            return (c, a) in z
        s = yield get(cfg.st_loc)
        b = yield call(procs.VER_SIG, (H(s, c), a))
        return b

    imports = [cfg.sig(procs.GET_PK), cfg.sig(procs.SIGN)] + ([] if ideal else [cfg.sig(procs.VER_SIG)])
    locations = [cfg.st_loc] + ([cfg.z_loc] if ideal else [])
    name = "AttPrim" if flavor == PASSTHROUGH else f"AttPrim_{flavor}"
    return Package(
        name,
        imports,
        [
            (cfg.sig(procs.GET_PK_A), get_pk_a),
            (cfg.sig(procs.ATTEST), attest),
            (cfg.sig(procs.VERIFY_A), verify_a),
        ],
        locations,
    )


def build_attprot(cfg: CaseStudyConfig) -> Package:
    """``prot(c)``: hash the platform state with the challenge and run the signature protocol."""

    @procedure
    def prot(c):
        s = yield get(cfg.st_loc)
        out = yield call(procs.SIG_PROT, cfg.hash(s, c))
        return out

    return Package("AttProt", [cfg.sig(procs.SIG_PROT)], [(cfg.att_prot_sig(), prot)], [cfg.st_loc])


def build_attprot_prime(cfg: CaseStudyConfig) -> Package:
    """``prot(c)`` over the attestation primitives; returns ``(pk, a, b)``."""

    @procedure
    def prot(c):
        pk = yield call(procs.GET_PK_A)
        a, _ = yield call(procs.ATTEST, c)
        b = yield call(procs.VERIFY_A, (c, a))
        return pk, a, b

    return Package(
        "AttProt'",
        [cfg.sig(procs.GET_PK_A), cfg.sig(procs.ATTEST), cfg.sig(procs.VERIFY_A)],
        [(cfg.att_prot_sig(), prot)],
    )


ATTPROT_RENAME = {procs.SIG_PROT: procs.PROT}


def _sig_stack(cfg: CaseStudyConfig, flavor: str) -> Package:
    return compose_seq(build_sigprim(cfg, flavor), build_keygen(cfg))


def build_attprot_stacks(cfg: CaseStudyConfig) -> dict[str, Game]:
    stacks: dict[str, Game] = {}
    for f in (REAL, IDEAL):
        prim = compose_seq(build_attprot_prime(cfg), compose_seq(build_attprim(cfg, PASSTHROUGH), _sig_stack(cfg, f)))
        stacks[f"AttProt^Prim_{f}"] = Game(prim, f"AttProt^Prim_{f}")
        sigprot = build_sigprot(cfg, f).package
        stacks[f"AttProt^Prot_{f}"] = Game(
            compose_rename(build_attprot(cfg), ATTPROT_RENAME, sigprot), f"AttProt^Prot_{f}"
        )
        stacks[f"SigPrimAtt_{f}"] = Game(
            compose_seq(build_attprim(cfg, PASSTHROUGH), _sig_stack(cfg, f)), f"SigPrimAtt_{f}"
        )
        stacks[f"AttPrimSig_{f}"] = Game(compose_seq(build_attprim(cfg, f), _sig_stack(cfg, f)), f"AttPrimSig_{f}")
    return stacks


# ---------------------------------------------------------------------------
# relations and adversaries


def sigprot_invariant(cfg: CaseStudyConfig) -> HeapRelation:
    return Ignore([cfg.sig_loc])


def z_to_sig(cfg: CaseStudyConfig):
    H = cfg.hash

    def mapping(z, s):
        return frozenset((H(s, c), a) for c, a in z)

    return mapping


def attprim_ideal_invariant(cfg: CaseStudyConfig) -> HeapRelation:
    """Left heap: SigPrimAtt_ideal; right heap: AttPrimSig_ideal."""
    return Ignore([cfg.z_loc]) & FunctionLink([cfg.z_loc, cfg.st_loc], z_to_sig(cfg), cfg.sig_loc)


def forger_strategy(cfg: CaseStudyConfig, m: Any = 0) -> Strategy:
    """Learn pk, then ask ``ver_sig`` about a signature computed from pk alone."""
    mod = cfg.scheme.message_type.size

    def after_pk(outcome):
        if not isinstance(outcome, Ok):
            return Guess(False)
        sigma = forge_toy(outcome.value, m, mod)
        return Query(procs.VER_SIG, (m, sigma), lambda o: Guess(o == Ok(True)))

    return Query(procs.GET_PK, (), after_pk, name="forger")


def seuf_forger(cfg: CaseStudyConfig, m: Any = 0) -> Strategy:
    """sEUF adversary: read pk, output a fresh forgery without signing anything."""
    mod = cfg.scheme.message_type.size

    def after_pk(outcome):
        return Guess((m, forge_toy(outcome.value, m, mod)))

    return Query(procs.GET_PK, (), after_pk, name="seuf-forger")


def seuf_replayer(m: Any = 0) -> Strategy:
    """Ask for a signature on ``m`` and hand it back unchanged."""

    def after_sign(outcome):
        return Guess((m, outcome.value))

    return Query(procs.SIGN, m, after_sign, name="replayer")


__all__ = [
    "ATTPROT_RENAME",
    "CaseStudyConfig",
    "IDEAL",
    "PASSTHROUGH",
    "REAL",
    "SIGPROT_RENAME",
    "attprim_ideal_invariant",
    "build_attprim",
    "build_attprot",
    "build_attprot_prime",
    "build_attprot_stacks",
    "build_keygen",
    "build_sigprim",
    "build_sigprim_stack",
    "build_sigprot",
    "build_sigprot_wrapper",
    "forger_strategy",
    "seuf_forger",
    "seuf_replayer",
    "signature_config",
    "sigprot_invariant",
    "toy_config",
    "z_to_sig",
]
