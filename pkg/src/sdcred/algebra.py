"""Algebraic substrate: BLS12-381 groups, the scalar field, and RSA groups.

Group elements use additive notation (``a + b``, ``k * a``); a formula written
multiplicatively such as ``g^x h^y`` becomes ``x * g + y * h``.  Scalars are
plain Python ints reduced modulo :data:`ORDER`.

Curve arithmetic is delegated to ``py_arkworks_bls12381``.  Generator
derivation uses the RFC 9380 suite :data:`HASH_TO_CURVE_SUITE` from ``py_ecc``.
"""
from __future__ import annotations

import contextlib
import contextvars
import hashlib
import secrets
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import gmpy2
import numpy as np
import py_arkworks_bls12381 as ark
from py_ecc.bls.hash_to_curve import hash_to_G1
from py_ecc.bls.point_compression import compress_G1

from .errors import DecodeError, InvalidArgument

#: Prime order of G1, G2 and GT.
ORDER = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001

G1 = "G1"
G2 = "G2"
GT = "GT"

SCALAR_SIZE = 32
POINT_SIZE = {G1: 48, G2: 96}

HASH_TO_CURVE_SUITE = "BLS12381G1_XMD:SHA-256_SSWU_RO_"

_POINT_CLS = {G1: ark.G1Point, G2: ark.G2Point}

DEFAULT_RNG = secrets.SystemRandom()


# ---------------------------------------------------------------------------
# operation counting

_counter: contextvars.ContextVar[Counter | None] = contextvars.ContextVar(
    "sdcred_op_counter", default=None
)


def _tick(key) -> None:
    c = _counter.get()
    if c is not None:
        c[key] += 1


@contextlib.contextmanager
def count_ops():
    """Count group operations performed inside the block.

    Keys are ``("M", group)``, ``("A", group)``, ``("MSM", group, n)`` and
    ``("P",)``.
    """
    c: Counter = Counter()
    token = _counter.set(c)
    try:
        yield c
    finally:
        _counter.reset(token)


# ---------------------------------------------------------------------------
# scalars


def scalar_to_bytes(value: int) -> bytes:
    return (value % ORDER).to_bytes(SCALAR_SIZE, "big")


def scalar_from_bytes(data: bytes) -> int:
    if len(data) != SCALAR_SIZE:
        raise DecodeError(f"scalar must be {SCALAR_SIZE} bytes, got {len(data)}")
    value = int.from_bytes(data, "big")
    if value >= ORDER:
        raise DecodeError("scalar not reduced modulo the group order")
    return value


def random_scalar(rng=None, nonzero: bool = False) -> int:
    rng = rng or DEFAULT_RNG
    while True:
        # 64 extra bits keep the modular bias below 2^-64
        v = rng.getrandbits(ORDER.bit_length() + 64) % ORDER
        if v or not nonzero:
            return v


def hash_to_scalar(data: bytes) -> int:
    """SHA-256 digest of ``data`` read big-endian and reduced mod ORDER."""
    return int.from_bytes(hashlib.sha256(data).digest(), "big") % ORDER


def _ark_scalar(value: int) -> ark.Scalar:
    return ark.Scalar(value % ORDER)


# ---------------------------------------------------------------------------
# group elements


class GroupElement:
    """An element of G1 or G2 tagged with its group."""

    __slots__ = ("group", "_p")

    def __init__(self, group: str, point):
        self.group = group
        self._p = point

    @classmethod
    def generator(cls, group: str) -> GroupElement:
        return cls(group, _POINT_CLS[group]())

    @classmethod
    def identity(cls, group: str) -> GroupElement:
        return cls(group, _POINT_CLS[group].identity())

    @classmethod
    def from_bytes(cls, group: str, data: bytes) -> GroupElement:
        """Decode a compressed point; rejects points outside the subgroup."""
        if group not in _POINT_CLS:
            raise InvalidArgument(f"unknown group {group!r}")
        if len(data) != POINT_SIZE[group]:
            raise DecodeError(f"{group} element must be {POINT_SIZE[group]} bytes")
        try:
            return cls(group, _POINT_CLS[group].from_compressed_bytes(bytes(data)))
        except ValueError as exc:
            raise DecodeError(f"invalid {group} encoding") from exc

    def to_bytes(self) -> bytes:
        return bytes(self._p.to_compressed_bytes())

    def is_identity(self) -> bool:
        return self._p == _POINT_CLS[self.group].identity()

    def _check(self, other: GroupElement) -> None:
        if not isinstance(other, GroupElement) or other.group != self.group:
            raise InvalidArgument("group elements from different groups")

    def __add__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        _tick(("A", self.group))
        return GroupElement(self.group, self._p + other._p)

    def __sub__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        _tick(("A", self.group))
        return GroupElement(self.group, self._p - other._p)

    def __neg__(self) -> GroupElement:
        return GroupElement(self.group, -self._p)

    def __mul__(self, k: int) -> GroupElement:
        if not isinstance(k, int):
            return NotImplemented
        _tick(("M", self.group))
        return GroupElement(self.group, self._p * _ark_scalar(k))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.group == other.group and self._p == other._p

    def __hash__(self) -> int:
        return hash((self.group, self.to_bytes()))

    def __repr__(self) -> str:
        return f"GroupElement({self.group}, {self.to_bytes().hex()[:16]}...)"


def g1() -> GroupElement:
    return GroupElement.generator(G1)


def g2() -> GroupElement:
    return GroupElement.generator(G2)


def multi_scalar_mul(bases: list[GroupElement], scalars: list[int]) -> GroupElement:
    """Compute ``sum(s_i * B_i)``."""
    if not bases or len(bases) != len(scalars):
        raise InvalidArgument("bases and scalars must be non-empty and equal length")
    group = bases[0].group
    if any(b.group != group for b in bases):
        raise InvalidArgument("bases span several groups")
    _tick(("MSM", group, len(bases)))
    cls = _POINT_CLS[group]
    point = cls.multiexp_unchecked([b._p for b in bases], [_ark_scalar(s) for s in scalars])
    return GroupElement(group, point)


def pairing(a: GroupElement, b: GroupElement):
    if a.group != G1 or b.group != G2:
        raise InvalidArgument("pairing takes (G1, G2) arguments")
    _tick(("P",))
    return ark.GT.pairing(a._p, b._p)


def pairing_product(pairs: list[tuple[GroupElement, GroupElement]]):
    """Product of pairings, computed with a single final exponentiation."""
    for a, b in pairs:
        if a.group != G1 or b.group != G2:
            raise InvalidArgument("pairing takes (G1, G2) arguments")
        _tick(("P",))
    return ark.GT.multi_pairing([a._p for a, _ in pairs], [b._p for _, b in pairs])


def gt_identity():
    return ark.GT.one()


# ---------------------------------------------------------------------------
# hash to group


@lru_cache(maxsize=256)
def _hash_to_g1_vector(seed: bytes, count: int, dst: bytes) -> tuple[GroupElement, ...]:
    out = []
    for i in range(count):
        point = hash_to_G1(seed + i.to_bytes(4, "big"), dst, hashlib.sha256)
        raw = compress_G1(point).to_bytes(48, "big")
        out.append(GroupElement.from_bytes(G1, raw))
    return tuple(out)


def hash_to_group_vector(seed: bytes, count: int, dst: bytes = b"SDCRED-GENERATORS") -> list[GroupElement]:
    """Derive ``count`` G1 elements with unknown discrete logs from ``seed``.

    Element ``i`` is ``hash_to_G1(seed || I2OSP(i, 4))`` under ``dst``, so a
    longer vector extends a shorter one from the same seed.
    """
    if count < 1:
        raise InvalidArgument("count must be positive")
    return list(_hash_to_g1_vector(bytes(seed), count, bytes(dst)))


# ---------------------------------------------------------------------------
# big naturals and RSA groups


def int_to_fixed(value: int, length: int) -> bytes:
    """Big-endian encoding of a non-negative int in exactly ``length`` bytes."""
    if value < 0 or value >= 1 << (8 * length):
        raise InvalidArgument(f"value does not fit in {length} bytes")
    return value.to_bytes(length, "big")


def int_from_fixed(data: bytes, length: int) -> int:
    if len(data) != length:
        raise DecodeError(f"expected {length} bytes, got {len(data)}")
    return int.from_bytes(data, "big")


_SIEVE_PRIMES = np.array(
    [p for p in range(3, 1 << 15) if all(p % d for d in range(2, int(p**0.5) + 1))],
    dtype=np.int64,
)
_SIEVE_WINDOW = 1 << 16
# 2^-128 error bound for Miller-Rabin
_MR_ROUNDS = 64


def _is_probable_prime(n: int) -> bool:
    return bool(gmpy2.is_prime(n, _MR_ROUNDS))


def random_prime(bits: int, rng=None) -> int:
    rng = rng or DEFAULT_RNG
    while True:
        candidate = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        p = int(gmpy2.next_prime(candidate - 1))
        if p.bit_length() == bits and _is_probable_prime(p):
            return p


def random_prime_in_range(low: int, high: int, rng=None) -> int:
    """Uniformly sampled probable prime in ``[low, high]`` (rejection sampling)."""
    rng = rng or DEFAULT_RNG
    span = high - low + 1
    while True:
        candidate = low + rng.randrange(span)
        if gmpy2.is_prime(candidate, 2) and _is_probable_prime(candidate):
            return candidate


def safe_prime(bits: int, rng=None) -> int:
    """Return a ``bits``-bit prime p = 2p' + 1 with p' prime.

    Candidates for p' are sieved in windows so that neither p' nor 2p' + 1 has
    a factor below 2^15, then tested with Miller-Rabin.
    """
    rng = rng or DEFAULT_RNG
    primes = _SIEVE_PRIMES
    offsets = np.arange(_SIEVE_WINDOW, dtype=np.int64)
    while True:
        start = rng.getrandbits(bits - 1) | (1 << (bits - 2))
        start -= start % 2 - 1  # odd
        alive = np.ones(_SIEVE_WINDOW, dtype=bool)
        residues = np.array([start % int(p) for p in primes], dtype=np.int64)
        for p, r in zip(primes, residues):
            # candidate start + 2k; kill k with p | q  or  p | 2q + 1
            inv2 = (p + 1) // 2
            k1 = (-r * inv2) % p
            k2 = ((-(2 * r + 1)) * pow(4, -1, int(p))) % p
            alive[k1::p] = False
            alive[k2::p] = False
        for k in offsets[alive]:
            q = start + 2 * int(k)
            if q.bit_length() != bits - 1:
                break
            if gmpy2.is_prime(q, 1) and gmpy2.is_prime(2 * q + 1, 1):
                if _is_probable_prime(q) and _is_probable_prime(2 * q + 1):
                    return 2 * q + 1


@dataclass(frozen=True)
class RsaGroupParams:
    """Special RSA modulus with quadratic-residue generators.

    ``p`` and ``q`` are the secret safe-prime factors.
    """

    n: int
    generators: tuple[int, ...]
    p: int = field(repr=False)
    q: int = field(repr=False)

    @property
    def byte_length(self) -> int:
        return (self.n.bit_length() + 7) // 8

    @property
    def phi(self) -> int:
        return (self.p - 1) * (self.q - 1)


def random_quadratic_residue(n: int, rng=None) -> int:
    rng = rng or DEFAULT_RNG
    while True:
        a = rng.randrange(2, n - 1)
        if gmpy2.gcd(a, n) == 1:
            return int(gmpy2.powmod(a, 2, n))


def gen_rsa_group(bit_length: int = 3072, generator_count: int = 3, rng=None) -> RsaGroupParams:
    if bit_length < 2048:
        raise InvalidArgument("RSA modulus must have at least 2048 bits")
    if generator_count < 3:
        raise InvalidArgument("at least three generators are required")
    rng = rng or DEFAULT_RNG
    half = bit_length // 2
    while True:
        p = safe_prime(half, rng)
        q = safe_prime(bit_length - half, rng)
        n = p * q
        if p != q and n.bit_length() == bit_length:
            break
    gens = tuple(random_quadratic_residue(n, rng) for _ in range(generator_count))
    return RsaGroupParams(n=n, generators=gens, p=p, q=q)
