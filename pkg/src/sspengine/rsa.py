"""Toy RSA with dependent sampling spaces for the primes and the exponent."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .command import FAIL, Command, assert_, interpret, procedure, sample
from .exactdist import FinType, mk_uniform
from .heap import heap_init
from .schemes import SchemeError, SignatureScheme


@dataclass(frozen=True)
class RsaParams:
    n_param: int

    def __post_init__(self):
        if self.n_param < 0:
            raise SchemeError("n_param must be a natural number")

    @property
    def bound(self) -> int:
        return self.n_param + 6


def _is_prime(x: int) -> bool:
    if x < 2:
        return False
    d = 2
    while d * d <= x:
        if x % d == 0:
            return False
        d += 1
    return True


def space_P(params: RsaParams) -> list[int]:
    return [x for x in range(params.bound) if _is_prime(x)]


def space_Q(params: RsaParams, p: int) -> list[int]:
    """Primes other than ``p``; 3 is dropped for p=2 and 2 for p=3 so that phi > 3."""
    primes = space_P(params)
    if p not in primes:
        raise SchemeError(f"{p} is not in the prime space below {params.bound}")
    rest = [q for q in primes if q != p]
    if p == 2:
        rest.remove(3)
    elif p == 3:
        rest.remove(2)
    return rest


def space_E(phi: int) -> list[int]:
    if phi <= 3:
        raise SchemeError("empty exponent space")
    return [x for x in range(2, phi) if gcd(x, phi) == 1]


def mod_inverse(e: int, m: int) -> int:
    """Inverse of ``e`` modulo ``m`` by the extended Euclidean algorithm."""
    r0, r1 = m, e % m
    t0, t1 = 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if r0 != 1:
        raise SchemeError(f"{e} has no inverse modulo {m}")
    return t0 % m


def rsa_keygen_command(params: RsaParams) -> Command:
    @procedure
    def key_gen():
        p = yield sample(mk_uniform(space_P(params)))
        q = yield sample(mk_uniform(space_Q(params, p)))
        yield assert_(p != q)
        n = p * q
        phi = (p - 1) * (q - 1)
        e = yield sample(mk_uniform(space_E(phi)))
        d = mod_inverse(e, phi)
        yield assert_(e * d % phi == 1)
        return (n, d), (n, e)

    return key_gen()


def rsa_sign(sk: tuple[int, int], m: int) -> int:
    n, d = sk
    return pow(m % n, d, n)


def rsa_verify(pk: tuple[int, int], sigma: int, m: int) -> bool:
    n, e = pk
    return pow(sigma, e, n) == m % n


@dataclass(frozen=True)
class RsaKey:
    p: int
    q: int
    e: int
    d: int
    weight: Fraction

    @property
    def n(self) -> int:
        return self.p * self.q

    @property
    def phi(self) -> int:
        return (self.p - 1) * (self.q - 1)


def enumerate_keys(params: RsaParams) -> list[RsaKey]:
    """Every (p, q, e) branch of key generation, in sampling order."""
    keys = []
    P = space_P(params)
    for p in P:
        Q = space_Q(params, p)
        for q in Q:
            phi = (p - 1) * (q - 1)
            E = space_E(phi)
            for e in E:
                w = Fraction(1, len(P) * len(Q) * len(E))
                keys.append(RsaKey(p, q, e, mod_inverse(e, phi), w))
    return keys


def keygen_failure_mass(params: RsaParams) -> Fraction:
    return interpret(rsa_keygen_command(params), heap_init([])).prob(lambda x: x[1] is FAIL)


@dataclass(frozen=True)
class RsaCorrectness:
    keys: int
    checked: int
    failure_mass: Fraction
    inverse_ok: bool
    witnesses: tuple

    @property
    def passed(self) -> bool:
        return self.failure_mass == 0 and self.inverse_ok and not self.witnesses


def rsa_correctness(params: RsaParams) -> RsaCorrectness:
    """Exhaustive functional correctness over every key and every residue."""
    keys = enumerate_keys(params)
    witnesses = []
    checked = 0
    for k in keys:
        for m in range(k.n):
            checked += 1
            if not rsa_verify((k.n, k.e), rsa_sign((k.n, k.d), m), m):
                witnesses.append((k, m))
    return RsaCorrectness(
        len(keys),
        checked,
        keygen_failure_mass(params),
        all(k.e * k.d % k.phi == 1 for k in keys),
        tuple(witnesses),
    )


def rsa_scheme(params: RsaParams) -> SignatureScheme:
    """RSA as a generic scheme; messages are ``Z_{bound^2}``, reduced mod n."""
    b = params.bound
    keys = enumerate_keys(params)
    sks = sorted({(k.n, k.d) for k in keys})
    pks = sorted({(k.n, k.e) for k in keys})
    return SignatureScheme(
        name=f"rsa-{params.n_param}",
        key_gen=rsa_keygen_command(params),
        sign=rsa_sign,
        verify=rsa_verify,
        seckey_type=FinType("RsaSecKey", sks),
        pubkey_type=FinType("RsaPubKey", pks),
        message_type=FinType(f"Z{b * b}", range(b * b)),
        signature_type=FinType(f"Z{b * b}", range(b * b)),
    )


__all__ = [
    "RsaCorrectness",
    "RsaKey",
    "RsaParams",
    "enumerate_keys",
    "keygen_failure_mass",
    "mod_inverse",
    "rsa_correctness",
    "rsa_keygen_command",
    "rsa_scheme",
    "rsa_sign",
    "rsa_verify",
    "space_E",
    "space_P",
    "space_Q",
]
