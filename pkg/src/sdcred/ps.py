"""Pointcheval-Sanders signatures with the two-pairing presentation proof.

By default keys live in G1 and signatures in G2.  With ``swap=True`` the roles
are exchanged: keys in G2, signatures in G1.  The serialized public key
carries its own generator ``g`` followed by ``X, Y_1..Y_m``.

The holder randomizes ``(s1, s2)`` into ``(r s1, r (s2 + t s1))``, a signature
on ``(a_1..a_m, t)`` under the extended key with ``Y_{m+1} = g``, and proves
knowledge of the representation ``J = t g + sum_{i hidden} a_i Y_i``.  The
verifier forms ``J' = J + X + sum_{i disclosed} a_i Y_i`` and checks
``e(J', s1') = e(g, s2')`` with two pairings.  The holder computes no pairing.
"""
from __future__ import annotations

from dataclasses import dataclass

from .algebra import (
    G1,
    G2,
    ORDER,
    POINT_SIZE,
    SCALAR_SIZE,
    GroupElement,
    gt_identity,
    multi_scalar_mul,
    pairing_product,
    random_scalar,
    scalar_from_bytes,
)
from .errors import DecodeError, InvalidArgument, VerificationError
from .nizkp import T_FORM, ChallengeContext, LinearRelation, LinearRelationTranscript, prove_linear, verify_linear


def _groups(swap: bool) -> tuple[str, str]:
    """(key group, signature group)"""
    return (G2, G1) if swap else (G1, G2)


def _pair(key_side: GroupElement, sig_side: GroupElement):
    # canonical argument order is e(G1, G2)
    return (key_side, sig_side) if key_side.group == G1 else (sig_side, key_side)


@dataclass(frozen=True)
class PsPublicKey:
    g: GroupElement
    X: GroupElement
    Y: tuple[GroupElement, ...]

    @property
    def m(self) -> int:
        return len(self.Y)

    @property
    def swap(self) -> bool:
        return self.g.group == G2

    def to_bytes(self) -> bytes:
        return b"".join(p.to_bytes() for p in (self.g, self.X, *self.Y))

    @classmethod
    def from_bytes(cls, data: bytes, swap: bool = False) -> PsPublicKey:
        group, _ = _groups(swap)
        size = POINT_SIZE[group]
        if len(data) % size or len(data) < 3 * size:
            raise DecodeError("PS public key has the wrong length")
        pts = [GroupElement.from_bytes(group, data[i:i + size]) for i in range(0, len(data), size)]
        g, X, *Y = pts
        if g.is_identity():
            raise DecodeError("PS generator is the identity")
        return cls(g, X, tuple(Y))


@dataclass(frozen=True)
class PsSecretKey:
    x: int
    y: tuple[int, ...]


@dataclass(frozen=True)
class PsKeyPair:
    sk: PsSecretKey
    pk: PsPublicKey


def ps_keygen(m: int, rng=None, swap: bool = False) -> PsKeyPair:
    if m < 1:
        raise InvalidArgument("at least one attribute is required")
    group, _ = _groups(swap)
    g = GroupElement.generator(group) * random_scalar(rng, nonzero=True)
    x = random_scalar(rng)
    y = tuple(random_scalar(rng) for _ in range(m))
    return PsKeyPair(PsSecretKey(x, y), PsPublicKey(g, g * x, tuple(g * yi for yi in y)))


@dataclass(frozen=True)
class PsSignature:
    sigma1: GroupElement
    sigma2: GroupElement

    def to_bytes(self) -> bytes:
        return self.sigma1.to_bytes() + self.sigma2.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes, swap: bool = False) -> PsSignature:
        _, group = _groups(swap)
        size = POINT_SIZE[group]
        if len(data) != 2 * size:
            raise DecodeError("PS signature has the wrong length")
        return cls(GroupElement.from_bytes(group, data[:size]), GroupElement.from_bytes(group, data[size:]))


def ps_sign(sk: PsSecretKey, attributes: list[int], rng=None, swap: bool = False) -> PsSignature:
    if len(attributes) != len(sk.y):
        raise InvalidArgument(f"expected {len(sk.y)} attributes, got {len(attributes)}")
    _, group = _groups(swap)
    h = GroupElement.generator(group) * random_scalar(rng, nonzero=True)
    exponent = (sk.x + sum(y * a for y, a in zip(sk.y, attributes))) % ORDER
    return PsSignature(h, h * exponent)


def ps_verify(pk: PsPublicKey, attributes: list[int], sig: PsSignature) -> None:
    """Check ``s1 != 1`` and ``e(g, s2) = e(X + sum a_i Y_i, s1)``."""
    if len(attributes) != pk.m:
        raise VerificationError("malformed", "attribute count mismatch")
    if sig.sigma1.is_identity():
        raise VerificationError("identity-h")
    lhs = pk.X + multi_scalar_mul(list(pk.Y), list(attributes))
    if pairing_product([_pair(pk.g, sig.sigma2), _pair(-lhs, sig.sigma1)]) != gt_identity():
        raise VerificationError("pairing-mismatch")


@dataclass(frozen=True)
class PsHolderProof:
    sigma1: GroupElement
    sigma2: GroupElement
    J: GroupElement
    transcript: LinearRelationTranscript

    def to_bytes(self) -> bytes:
        """``s1' || s2' || J || T || t^ || a^_i...``"""
        return self.sigma1.to_bytes() + self.sigma2.to_bytes() + self.J.to_bytes() + self.transcript.body_bytes()

    @classmethod
    def from_bytes(cls, data: bytes, swap: bool = False) -> PsHolderProof:
        kg, sg = _groups(swap)
        ks, ss = POINT_SIZE[kg], POINT_SIZE[sg]
        head = 2 * ss + 2 * ks
        rest = len(data) - head
        if rest < SCALAR_SIZE or rest % SCALAR_SIZE:
            raise DecodeError("PS holder proof has the wrong length")
        s1 = GroupElement.from_bytes(sg, data[:ss])
        s2 = GroupElement.from_bytes(sg, data[ss:2 * ss])
        J = GroupElement.from_bytes(kg, data[2 * ss:2 * ss + ks])
        T = GroupElement.from_bytes(kg, data[2 * ss + ks:head])
        scalars = tuple(scalar_from_bytes(data[i:i + SCALAR_SIZE]) for i in range(head, len(data), SCALAR_SIZE))
        return cls(s1, s2, J, LinearRelationTranscript(T_FORM, scalars, commitments=(T,)))


def proof_size(n_undisclosed: int) -> int:
    return 2 * 96 + 2 * 48 + 32 * (1 + n_undisclosed)


def _context(context: ChallengeContext, pk: PsPublicKey, proof_head: bytes, disclosed_idx) -> ChallengeContext:
    return context.with_parts(
        b"PS",
        pk.to_bytes(),
        proof_head,
        b"".join(i.to_bytes(4, "big") for i in disclosed_idx),
    )


def _hidden(pk: PsPublicKey, disclosed) -> tuple[list[int], list[int]]:
    dset = set(disclosed)
    if any(not 1 <= i <= pk.m for i in dset):
        raise InvalidArgument("disclosed index out of range")
    return sorted(dset), [i for i in range(1, pk.m + 1) if i not in dset]


def ps_gen_holder_proof(
    pk: PsPublicKey,
    attributes: list[int],
    sig: PsSignature,
    disclosed: list[int],
    context: ChallengeContext,
    rng=None,
    check: bool = True,
) -> PsHolderProof:
    if len(attributes) != pk.m:
        raise InvalidArgument(f"expected {pk.m} attributes, got {len(attributes)}")
    if check:
        ps_verify(pk, attributes, sig)
    d_idx, hidden = _hidden(pk, disclosed)
    r = random_scalar(rng, nonzero=True)
    t = random_scalar(rng)
    s1 = sig.sigma1 * r
    s2 = (sig.sigma2 + sig.sigma1 * t) * r
    bases = [pk.g, *[pk.Y[i - 1] for i in hidden]]
    witness = [t, *[attributes[i - 1] for i in hidden]]
    J = multi_scalar_mul(bases, witness)
    ctx = _context(context, pk, s1.to_bytes() + s2.to_bytes(), d_idx)
    transcript = prove_linear([(LinearRelation(tuple(bases), J), witness)], ctx, T_FORM, rng, check_witness=False)
    return PsHolderProof(s1, s2, J, transcript)


def ps_ver_present_proof(
    pk: PsPublicKey,
    disclosed: dict[int, int],
    proof: PsHolderProof,
    context: ChallengeContext,
) -> None:
    try:
        d_idx, hidden = _hidden(pk, disclosed)
    except InvalidArgument as exc:
        raise VerificationError("malformed", str(exc)) from exc
    if len(proof.transcript.responses) != 1 + len(hidden):
        raise VerificationError("malformed", "response count mismatch")
    if proof.sigma1.is_identity():
        raise VerificationError("identity-element", "sigma1' is the identity")
    ctx = _context(context, pk, proof.sigma1.to_bytes() + proof.sigma2.to_bytes(), d_idx)
    bases = (pk.g, *[pk.Y[i - 1] for i in hidden])
    verify_linear([LinearRelation(bases, proof.J)], proof.transcript, ctx)
    J_prime = proof.J + pk.X
    if d_idx:
        J_prime = J_prime + multi_scalar_mul([pk.Y[i - 1] for i in d_idx], [disclosed[i] for i in d_idx])
    if pairing_product([_pair(J_prime, proof.sigma1), _pair(pk.g, -proof.sigma2)]) != gt_identity():
        raise VerificationError("pairing-mismatch")
