"""CL signatures over a special RSA modulus, with a randomized holder proof.

The holder proof uses a challenge-form Fiat-Shamir transcript over the
integers: responses are not reduced, and the verifier checks that they stay in
the bit ranges that bound the hidden exponent and attributes.

Masks are drawn from ``[0, 2^(l + l_H + l_0) - 2^(l + l_H))`` so every response
``mask + c * witness`` stays below ``2^(l + l_H + l_0)`` while the statistical
distance to uniform remains below ``2^-l_0``.  All witnesses are non-negative;
in particular ``v' = v - r e`` is kept positive by drawing ``v`` with its top
bit set and the randomizer ``r`` below ``2^(l_v - l_e - 1)``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import gmpy2

from .algebra import (
    DEFAULT_RNG,
    RsaGroupParams,
    gen_rsa_group,
    int_from_fixed,
    int_to_fixed,
    random_prime_in_range,
)
from .errors import DecodeError, InvalidArgument, VerificationError
from .nizkp import ChallengeContext, length_prefix

CHALLENGE_BYTES = 32


@dataclass(frozen=True)
class ClParams:
    ln: int = 3072
    la: int = 256
    le: int = 460
    le_prime: int = 120
    l0: int = 80
    lh: int = 256
    # serialized widths of the proof responses
    e_hat_bytes: int = 58
    v_hat_bytes: int = 468
    a_hat_bytes: int = 75

    def __post_init__(self):
        if self.le <= self.la + 2:
            raise InvalidArgument("l_e must exceed l_a + 2")
        if self.le - 1 <= self.le_prime + self.l0 + self.lh + 2:
            raise InvalidArgument("l_e too small for the masked range of e")
        if (self.lv + self.lh + self.l0 + 7) // 8 > self.v_hat_bytes:
            raise InvalidArgument("v-hat field too narrow")

    @property
    def lv(self) -> int:
        return self.ln + self.la + self.l0

    @property
    def lr(self) -> int:
        """Bit length of the holder's randomizer ``r``."""
        return self.lv - self.le - 1

    @property
    def n_bytes(self) -> int:
        return self.ln // 8

    @property
    def e_hat_bits(self) -> int:
        return self.le_prime + self.lh + self.l0 + 1

    @property
    def a_hat_bits(self) -> int:
        return self.la + self.lh + self.l0 + 1

    def proof_size(self, n_undisclosed: int) -> int:
        return CHALLENGE_BYTES + self.n_bytes + self.e_hat_bytes + self.v_hat_bytes + self.a_hat_bytes * n_undisclosed


DEFAULT_PARAMS = ClParams()


@dataclass(frozen=True)
class ClPublicKey:
    n: int
    R: tuple[int, ...]
    S: int
    Z: int
    params: ClParams = DEFAULT_PARAMS

    @property
    def m(self) -> int:
        return len(self.R)

    def to_bytes(self) -> bytes:
        w = self.params.n_bytes
        return b"".join(int_to_fixed(x, w) for x in (self.n, *self.R, self.S, self.Z))

    @classmethod
    def from_bytes(cls, data: bytes, params: ClParams = DEFAULT_PARAMS) -> ClPublicKey:
        w = params.n_bytes
        if len(data) % w or len(data) < 4 * w:
            raise DecodeError("CL public key has the wrong length")
        vals = [int.from_bytes(data[i:i + w], "big") for i in range(0, len(data), w)]
        n, *R, S, Z = vals
        if n.bit_length() != params.ln or n % 2 == 0 or any(not 0 < x < n for x in (*R, S, Z)):
            raise DecodeError("CL public key elements out of range")
        return cls(n, tuple(R), S, Z, params)


@dataclass(frozen=True)
class ClSecretKey:
    p: int
    q: int

    @property
    def phi(self) -> int:
        return (self.p - 1) * (self.q - 1)


@dataclass(frozen=True)
class ClSignature:
    A: int
    e: int
    v: int

    def to_bytes(self, params: ClParams = DEFAULT_PARAMS) -> bytes:
        """``A || e || v`` in widths ``l_n``, ``l_e`` and ``l_v`` bits."""
        return (
            int_to_fixed(self.A, params.n_bytes)
            + int_to_fixed(self.e, (params.le + 7) // 8)
            + int_to_fixed(self.v, (params.lv + 7) // 8)
        )

    @classmethod
    def from_bytes(cls, data: bytes, params: ClParams = DEFAULT_PARAMS) -> ClSignature:
        w_a, w_e, w_v = params.n_bytes, (params.le + 7) // 8, (params.lv + 7) // 8
        if len(data) != w_a + w_e + w_v:
            raise DecodeError("CL signature has the wrong length")
        return cls(
            int.from_bytes(data[:w_a], "big"),
            int.from_bytes(data[w_a:w_a + w_e], "big"),
            int.from_bytes(data[w_a + w_e:], "big"),
        )


@dataclass(frozen=True)
class ClHolderProof:
    A_prime: int
    c: bytes
    e_hat: int
    v_hat: int
    a_hat: tuple[int, ...]

    def to_bytes(self, params: ClParams = DEFAULT_PARAMS) -> bytes:
        return (
            self.c
            + int_to_fixed(self.A_prime, params.n_bytes)
            + int_to_fixed(self.e_hat, params.e_hat_bytes)
            + int_to_fixed(self.v_hat, params.v_hat_bytes)
            + b"".join(int_to_fixed(a, params.a_hat_bytes) for a in self.a_hat)
        )

    @classmethod
    def from_bytes(cls, data: bytes, params: ClParams = DEFAULT_PARAMS) -> ClHolderProof:
        fixed = params.proof_size(0)
        rest = len(data) - fixed
        if rest < 0 or rest % params.a_hat_bytes:
            raise DecodeError("CL holder proof has the wrong length")
        pos = 0

        def take(k):
            nonlocal pos
            chunk = data[pos:pos + k]
            pos += k
            return chunk

        c = take(CHALLENGE_BYTES)
        A_prime = int_from_fixed(take(params.n_bytes), params.n_bytes)
        e_hat = int_from_fixed(take(params.e_hat_bytes), params.e_hat_bytes)
        v_hat = int_from_fixed(take(params.v_hat_bytes), params.v_hat_bytes)
        a_hat = tuple(
            int_from_fixed(take(params.a_hat_bytes), params.a_hat_bytes)
            for _ in range(rest // params.a_hat_bytes)
        )
        return cls(A_prime, c, e_hat, v_hat, a_hat)


def _mexp(bases, exps, n) -> int:
    acc = gmpy2.mpz(1)
    for b, x in zip(bases, exps):
        acc = acc * gmpy2.powmod(b, x, n) % n
    return int(acc)


def _mask(bits: int, lh: int, l0: int, rng) -> int:
    bound = (1 << (bits + lh + l0)) - (1 << (bits + lh))
    return rng.randrange(bound)


def cl_keygen(m: int, params: ClParams = DEFAULT_PARAMS, rng=None) -> tuple[ClSecretKey, ClPublicKey]:
    if m < 1:
        raise InvalidArgument("at least one attribute is required")
    group = gen_rsa_group(params.ln, m + 2, rng)
    return keys_from_group(group, m, params)


def keys_from_group(group: RsaGroupParams, m: int, params: ClParams = DEFAULT_PARAMS) -> tuple[ClSecretKey, ClPublicKey]:
    """Take the first ``m + 2`` group generators as ``(R_1..R_m, S, Z)``."""
    if m < 1 or len(group.generators) < m + 2:
        raise InvalidArgument("need at least m + 2 generators")
    *R, S, Z = group.generators[:m + 2]
    return ClSecretKey(group.p, group.q), ClPublicKey(group.n, tuple(R), S, Z, params)


def _check_attributes(pk: ClPublicKey, attributes) -> None:
    if len(attributes) != pk.m:
        raise InvalidArgument(f"expected {pk.m} attributes, got {len(attributes)}")
    for a in attributes:
        if not 0 <= a < 1 << pk.params.la:
            raise InvalidArgument(f"attribute exceeds {pk.params.la} bits")


def cl_sign(sk: ClSecretKey, pk: ClPublicKey, attributes: list[int], rng=None) -> ClSignature:
    rng = rng or DEFAULT_RNG
    _check_attributes(pk, attributes)
    P = pk.params
    low = (1 << (P.le - 1)) + 1
    e = random_prime_in_range(low, (1 << (P.le - 1)) + (1 << (P.le_prime - 1)), rng)
    v = rng.getrandbits(P.lv) | (1 << (P.lv - 1))
    n = pk.n
    denom = _mexp((*pk.R, pk.S), (*attributes, v), n)
    base = pk.Z * int(gmpy2.invert(denom, n)) % n
    d = int(gmpy2.invert(e, sk.phi))
    A = int(gmpy2.powmod(base, d, n))
    return ClSignature(A, e, v)


def cl_verify(pk: ClPublicKey, attributes: list[int], sig: ClSignature) -> None:
    """Raise :class:`VerificationError` unless ``sig`` signs ``attributes``."""
    P = pk.params
    if len(attributes) != pk.m:
        raise VerificationError("malformed", "attribute count mismatch")
    if any(not 0 <= a < 1 << P.la for a in attributes):
        raise VerificationError("attribute-too-large")
    if not (1 << (P.le - 1)) + 1 <= sig.e <= (1 << P.le) - 1:
        raise VerificationError("e-out-of-range")
    if not 0 < sig.A < pk.n or sig.v < 0:
        raise VerificationError("bad-equation", "signature component out of range")
    lhs = _mexp((sig.A, *pk.R, pk.S), (sig.e, *attributes, sig.v), pk.n)
    if lhs != pk.Z % pk.n:
        raise VerificationError("bad-equation")


def _statement(pk: ClPublicKey, A_prime: int, disclosed: dict[int, int]) -> int:
    # Z / (prod_{D} R_i^{a_i} * A'^(2^(l_e - 1)))
    n = pk.n
    idx = sorted(disclosed)
    den = _mexp([pk.R[i - 1] for i in idx] + [A_prime], [disclosed[i] for i in idx] + [1 << (pk.params.le - 1)], n)
    return pk.Z * int(gmpy2.invert(den, n)) % n


def _challenge(context: ChallengeContext, pk: ClPublicKey, A_prime: int, y: int, hidden: list[int], T: int) -> bytes:
    w = pk.params.n_bytes
    h = hashlib.sha256()
    h.update(length_prefix(context.to_bytes()))
    h.update(length_prefix(pk.to_bytes()))
    h.update(length_prefix(b"".join(i.to_bytes(4, "big") for i in hidden)))
    for x in (A_prime, y, T):
        h.update(length_prefix(int_to_fixed(x, w)))
    return h.digest()


def cl_gen_holder_proof(
    pk: ClPublicKey,
    attributes: list[int],
    sig: ClSignature,
    disclosed: list[int],
    context: ChallengeContext,
    rng=None,
    check: bool = True,
) -> ClHolderProof:
    """Randomize ``sig`` and prove knowledge of it and of the hidden attributes.

    ``disclosed`` holds 1-based attribute indices.
    """
    rng = rng or DEFAULT_RNG
    P = pk.params
    if check:
        cl_verify(pk, attributes, sig)
    else:
        _check_attributes(pk, attributes)
    disclosed_set = set(disclosed)
    if any(not 1 <= i <= pk.m for i in disclosed_set):
        raise InvalidArgument("disclosed index out of range")
    hidden = [i for i in range(1, pk.m + 1) if i not in disclosed_set]
    n = pk.n

    r = rng.getrandbits(P.lr)
    A_prime = sig.A * int(gmpy2.powmod(pk.S, r, n)) % n
    e_prime = sig.e - (1 << (P.le - 1))
    v_prime = sig.v - r * sig.e
    if v_prime <= 0:
        raise InvalidArgument("signature randomness v is too small")

    e_t = _mask(P.le_prime, P.lh, P.l0, rng)
    v_t = _mask(P.lv, P.lh, P.l0, rng)
    a_t = [_mask(P.la, P.lh, P.l0, rng) for _ in hidden]
    T = _mexp([A_prime, pk.S] + [pk.R[i - 1] for i in hidden], [e_t, v_t, *a_t], n)

    y = _statement(pk, A_prime, {i: attributes[i - 1] for i in disclosed_set})
    c = _challenge(context, pk, A_prime, y, hidden, T)
    ci = int.from_bytes(c, "big")
    return ClHolderProof(
        A_prime=A_prime,
        c=c,
        e_hat=e_t + ci * e_prime,
        v_hat=v_t + ci * v_prime,
        a_hat=tuple(t + ci * attributes[i - 1] for t, i in zip(a_t, hidden)),
    )


def cl_ver_present_proof(
    pk: ClPublicKey,
    disclosed: dict[int, int],
    proof: ClHolderProof,
    context: ChallengeContext,
) -> None:
    """Verify a holder proof against the disclosed ``{index: attribute}`` map."""
    P = pk.params
    n = pk.n
    if any(not 1 <= i <= pk.m for i in disclosed):
        raise VerificationError("malformed", "disclosed index out of range")
    hidden = [i for i in range(1, pk.m + 1) if i not in disclosed]
    if len(proof.a_hat) != len(hidden) or len(proof.c) != CHALLENGE_BYTES:
        raise VerificationError("malformed", "response count mismatch")
    if any(not 0 <= a < 1 << P.la for a in disclosed.values()):
        raise VerificationError("attribute-too-large")
    if not 0 < proof.A_prime < n or gmpy2.gcd(proof.A_prime, n) != 1:
        raise VerificationError("malformed", "A' not a unit")
    if not 0 <= proof.e_hat < 1 << P.e_hat_bits:
        raise VerificationError("response-out-of-range", "e-hat")
    if any(not 0 <= a < 1 << P.a_hat_bits for a in proof.a_hat):
        raise VerificationError("response-out-of-range", "a-hat")
    if not 0 <= proof.v_hat < 1 << (8 * P.v_hat_bytes):
        raise VerificationError("response-out-of-range", "v-hat")

    try:
        y = _statement(pk, proof.A_prime, disclosed)
        y_inv = int(gmpy2.invert(y, n))
    except ZeroDivisionError:
        # only reachable with a corrupted modulus
        raise VerificationError("malformed", "statement is not a unit") from None
    ci = int.from_bytes(proof.c, "big")
    T = _mexp(
        [y_inv, proof.A_prime, pk.S] + [pk.R[i - 1] for i in hidden],
        [ci, proof.e_hat, proof.v_hat, *proof.a_hat],
        n,
    )
    if _challenge(context, pk, proof.A_prime, y, hidden, T) != proof.c:
        raise VerificationError("proof-equation")
