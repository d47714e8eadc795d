"""Signature schemes and the injective hash used by the attestation packages."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .command import FAIL, Command, Ret, Sample, interpret
from .exactdist import FiniteTypeError, FinType, mk_uniform, z_mod
from .heap import heap_init


class SchemeError(ValueError):
    pass


@dataclass(frozen=True)
class SignatureScheme:
    """``key_gen`` is a heap-free command returning ``(sk, pk)``.

    ``sign(sk, m)`` and ``verify(pk, sigma, m)`` are deterministic pure
    functions.
    """

    name: str
    key_gen: Command
    sign: Callable[[Any, Any], Any]
    verify: Callable[[Any, Any, Any], bool]
    seckey_type: Any
    pubkey_type: Any
    message_type: Any
    signature_type: Any

    def key_pairs(self) -> dict[tuple, Fraction]:
        """Support of key generation (failing branches dropped) with weights."""
        pairs: dict = {}
        failed = Fraction(0)
        for (_, o), w in interpret(self.key_gen, heap_init([])).items():
            if o is FAIL:
                failed += w
            else:
                pairs[o.value] = pairs.get(o.value, Fraction(0)) + w
        if failed == 1:
            raise SchemeError(f"{self.name}: empty key space (key generation always fails)")
        return pairs


@dataclass(frozen=True)
class CorrectnessReport:
    passed: bool
    checked: int
    witnesses: list = field(default_factory=list)


def correctness_suite(s: SignatureScheme, max_witnesses: int = 10) -> CorrectnessReport:
    """Check ``verify(pk, sign(sk, m), m)`` for every key pair and message."""
    witnesses = []
    checked = 0
    messages = s.message_type.values()
    for sk, pk in s.key_pairs():
        for m in messages:
            checked += 1
            if not s.verify(pk, s.sign(sk, m), m) and len(witnesses) < max_witnesses:
                witnesses.append((sk, pk, m))
    return CorrectnessReport(not witnesses, checked, witnesses)


def mk_toy_symmetric(modulus: int) -> SignatureScheme:
    """Functionally correct and trivially forgeable: ``sigma = m + pk``."""
    if modulus < 2:
        raise SchemeError("toy scheme needs modulus >= 2")
    zn = z_mod(modulus)
    keys = mk_uniform(range(modulus))

    key_gen = Sample(keys, lambda k: Ret((k, k)))
    return SignatureScheme(
        name=f"toy-symmetric-{modulus}",
        key_gen=key_gen,
        sign=lambda sk, m: (m + sk) % modulus,
        verify=lambda pk, sigma, m: sigma == (m + pk) % modulus,
        seckey_type=zn,
        pubkey_type=zn,
        message_type=zn,
        signature_type=zn,
    )


def forge_toy(pk: int, m: int, modulus: int) -> int:
    """A valid toy signature computed from the public key alone."""
    return (m + pk) % modulus


@dataclass(frozen=True)
class HashFn:
    h: Callable[[Any, Any], Any]
    state_type: Any
    challenge_type: Any
    message_type: Any

    def __call__(self, s: Any, c: Any) -> Any:
        return self.h(s, c)

    def is_injective(self) -> bool:
        images = [self.h(s, c) for s in self.state_type.values() for c in self.challenge_type.values()]
        return len(set(images)) == len(images)


def mk_injective_hash(state_type: FinType, challenge_type: FinType, message_type: FinType) -> HashFn:
    """``h(s, c)`` is message number ``index(s) * |C| + index(c)``."""
    nc = challenge_type.size
    needed = state_type.size * nc
    messages = message_type.values()
    if len(messages) < needed:
        raise SchemeError(
            f"message space too small for an injective hash: {len(messages)} < {state_type.size}*{nc}"
        )

    def h(s, c):
        try:
            return messages[state_type.index(s) * nc + challenge_type.index(c)]
        except FiniteTypeError as exc:
            raise SchemeError(str(exc)) from None

    return HashFn(h, state_type, challenge_type, message_type)


__all__ = [
    "CorrectnessReport",
    "HashFn",
    "SchemeError",
    "SignatureScheme",
    "correctness_suite",
    "forge_toy",
    "mk_injective_hash",
    "mk_toy_symmetric",
]
