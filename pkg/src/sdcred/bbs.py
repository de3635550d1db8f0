"""BBS and BBS+ signatures over BLS12-381 with selective-disclosure proofs.

Message generators come from :func:`bbs_setup`, which hashes a public seed to
G1.  Both variants draw from one vector: BBS uses ``h_1..h_m`` and BBS+ adds
``h_0`` in front, so a verifier can rebuild either from the seed alone.

Holder proofs are T-form transcripts serialized in field order:

* BBS: ``Abar || Bbar || T || r^ || e^ || a^_i...``
* BBS+: ``A' || Abar || d || T1 || T2 || e^ || r2^ || r3^ || s'^ || a^_i...``
"""
from __future__ import annotations

from dataclasses import dataclass

from .algebra import (
    G1,
    G2,
    HASH_TO_CURVE_SUITE,
    ORDER,
    POINT_SIZE,
    SCALAR_SIZE,
    GroupElement,
    g1,
    g2,
    gt_identity,
    hash_to_group_vector,
    multi_scalar_mul,
    pairing_product,
    random_scalar,
    scalar_from_bytes,
    scalar_to_bytes,
)
from .errors import DecodeError, InvalidArgument, VerificationError
from .nizkp import T_FORM, ChallengeContext, LinearRelation, LinearRelationTranscript, prove_linear, verify_linear

BBS = "BBS"
BBS_PLUS = "BBS+"
STANDARD = "standard"
ALTERNATIVE = "alternative"

GENERATOR_DST = b"SDCRED-BBS-FAMILY-GENERATORS_" + HASH_TO_CURVE_SUITE.encode()


@dataclass(frozen=True)
class BbsParams:
    """Public parameters: ``generators`` is ``h_1..h_m`` (BBS) or ``h_0..h_m`` (BBS+)."""

    seed: bytes
    m: int
    variant: str
    generators: tuple[GroupElement, ...]
    suite: str = HASH_TO_CURVE_SUITE

    @property
    def h0(self) -> GroupElement:
        if self.variant != BBS_PLUS:
            raise InvalidArgument("h_0 exists only for BBS+")
        return self.generators[0]

    @property
    def h(self) -> tuple[GroupElement, ...]:
        """Message generators ``h_1..h_m``."""
        return self.generators[1:] if self.variant == BBS_PLUS else self.generators


def bbs_setup(seed: bytes, m: int, variant: str = BBS) -> BbsParams:
    if m < 1:
        raise InvalidArgument("at least one attribute is required")
    if variant not in (BBS, BBS_PLUS):
        raise InvalidArgument(f"unknown variant {variant!r}")
    vec = hash_to_group_vector(seed, m + 1, GENERATOR_DST)
    gens = vec if variant == BBS_PLUS else vec[1:]
    return BbsParams(bytes(seed), m, variant, tuple(gens))


@dataclass(frozen=True)
class BbsKeyPair:
    sk: int
    pk: GroupElement


def bbs_keygen(rng=None) -> BbsKeyPair:
    x = random_scalar(rng, nonzero=True)
    return BbsKeyPair(x, g2() * x)


@dataclass(frozen=True)
class BbsSignature:
    A: GroupElement
    e: int
    s: int | None = None

    def to_bytes(self) -> bytes:
        out = self.A.to_bytes() + scalar_to_bytes(self.e)
        if self.s is not None:
            out += scalar_to_bytes(self.s)
        return out

    @classmethod
    def from_bytes(cls, data: bytes) -> BbsSignature:
        if len(data) not in (80, 112):
            raise DecodeError("BBS signature must be 80 or 112 bytes")
        A = GroupElement.from_bytes(G1, data[:48])
        e = scalar_from_bytes(data[48:80])
        s = scalar_from_bytes(data[80:112]) if len(data) == 112 else None
        return cls(A, e, s)


def _commitment(params: BbsParams, attributes: list[int], s: int | None) -> GroupElement:
    # C = g1 + s h_0 + sum a_i h_i
    if params.variant == BBS_PLUS:
        msm = multi_scalar_mul(list(params.generators), [s, *attributes])
    else:
        msm = multi_scalar_mul(list(params.generators), list(attributes))
    return g1() + msm


def _check_arity(params: BbsParams, attributes) -> None:
    if len(attributes) != params.m:
        raise InvalidArgument(f"expected {params.m} attributes, got {len(attributes)}")


def bbs_sign(sk: int, params: BbsParams, attributes: list[int], rng=None) -> BbsSignature:
    _check_arity(params, attributes)
    s = random_scalar(rng) if params.variant == BBS_PLUS else None
    C = _commitment(params, attributes, s)
    while True:
        e = random_scalar(rng)
        if (e + sk) % ORDER:
            break
    return BbsSignature(C * pow(e + sk, -1, ORDER), e, s)


def bbs_verify(pk: GroupElement, params: BbsParams, attributes: list[int], sig: BbsSignature) -> None:
    """Check ``e(A, w + e g2) = e(C, g2)``; raises :class:`VerificationError`."""
    if len(attributes) != params.m:
        raise VerificationError("malformed", "attribute count mismatch")
    if (sig.s is None) != (params.variant == BBS):
        raise VerificationError("malformed", "signature shape does not match variant")
    C = _commitment(params, attributes, sig.s)
    lhs_g2 = pk + g2() * sig.e
    if pairing_product([(sig.A, lhs_g2), (-C, g2())]) != gt_identity():
        raise VerificationError("pairing-mismatch")


def bbsplus_params_as_bbs(params: BbsParams) -> BbsParams:
    """BBS parameters over ``m + 1`` messages using ``h_0..h_m`` unchanged."""
    if params.variant != BBS_PLUS:
        raise InvalidArgument("expected BBS+ parameters")
    return BbsParams(params.seed, params.m + 1, BBS, params.generators, params.suite)


def bbsplus_to_bbs(
    pk: GroupElement, params: BbsParams, sig: BbsSignature, attributes: list[int]
) -> tuple[BbsSignature, list[int], BbsParams]:
    """Turn a BBS+ signature into the BBS signature ``(A, e)`` on ``(s, a_1..a_m)``."""
    try:
        bbs_verify(pk, params, attributes, sig)
    except VerificationError as exc:
        raise InvalidArgument(f"invalid BBS+ signature: {exc}") from exc
    return BbsSignature(sig.A, sig.e), [sig.s, *attributes], bbsplus_params_as_bbs(params)


# ---------------------------------------------------------------------------
# holder proofs


@dataclass(frozen=True)
class BbsHolderProof:
    """Randomized signature elements plus a T-form transcript.

    ``elements`` is ``(Abar, Bbar)`` for BBS and ``(A', Abar, d)`` for BBS+.
    """

    variant: str
    elements: tuple[GroupElement, ...]
    transcript: LinearRelationTranscript

    def to_bytes(self) -> bytes:
        return b"".join(e.to_bytes() for e in self.elements) + self.transcript.body_bytes()

    @classmethod
    def from_bytes(cls, data: bytes, variant: str) -> BbsHolderProof:
        n_elem, n_rel, fixed_scalars = (2, 1, 2) if variant == BBS else (3, 2, 4)
        head = (n_elem + n_rel) * POINT_SIZE[G1]
        rest = len(data) - head
        if rest < fixed_scalars * SCALAR_SIZE or rest % SCALAR_SIZE:
            raise DecodeError("BBS holder proof has the wrong length")
        points = [GroupElement.from_bytes(G1, data[i * 48:(i + 1) * 48]) for i in range(n_elem + n_rel)]
        scalars = [scalar_from_bytes(data[head + i:head + i + SCALAR_SIZE]) for i in range(0, rest, SCALAR_SIZE)]
        transcript = LinearRelationTranscript(T_FORM, tuple(scalars), commitments=tuple(points[n_elem:]))
        return cls(variant, tuple(points[:n_elem]), transcript)

    @property
    def n_undisclosed(self) -> int:
        return len(self.transcript.responses) - (2 if self.variant == BBS else 4)


def proof_size(variant: str, n_undisclosed: int) -> int:
    if variant == BBS:
        return 3 * 48 + 32 * (2 + n_undisclosed)
    return 5 * 48 + 32 * (4 + n_undisclosed)


def _split(params: BbsParams, disclosed) -> tuple[list[int], list[int]]:
    dset = set(disclosed)
    if any(not 1 <= i <= params.m for i in dset):
        raise InvalidArgument("disclosed index out of range")
    return sorted(dset), [i for i in range(1, params.m + 1) if i not in dset]


def _disclosed_commitment(params: BbsParams, disclosed: dict[int, int]) -> GroupElement:
    # C_D = g1 + sum_{i in D} a_i h_i
    idx = sorted(disclosed)
    if not idx:
        return g1()
    return g1() + multi_scalar_mul([params.h[i - 1] for i in idx], [disclosed[i] for i in idx])


def _context(context: ChallengeContext, pk: GroupElement, params: BbsParams, construction: str, disclosed_idx) -> ChallengeContext:
    return context.with_parts(
        params.variant.encode(),
        construction.encode(),
        params.seed,
        params.m.to_bytes(4, "big"),
        pk.to_bytes(),
        b"".join(i.to_bytes(4, "big") for i in disclosed_idx),
    )


def _bbs_relations(params, elements, C_D, hidden, construction):
    Abar, Bbar = elements
    h_u = [params.h[i - 1] for i in hidden]
    if construction == STANDARD:
        # Bbar = r C_D + e (-Abar) + sum (r a_i) h_i
        return [LinearRelation((C_D, -Abar, *h_u), Bbar)]
    # C_D = r^-1 Bbar + (e r^-1) Abar + sum a_i (-h_i)
    return [LinearRelation((Bbar, Abar, *[-h for h in h_u]), C_D)]


def _bbsplus_relations(params, elements, disclosed_stmt, hidden):
    A_prime, Abar, d = elements
    h0 = params.h0
    h_u = [params.h[i - 1] for i in hidden]
    return [
        # Abar - d = e (-A') + r2 h_0
        LinearRelation((-A_prime, h0), Abar - d),
        # g1 + sum_D a_i h_i = r3 d + s' (-h_0) + sum_U a_i (-h_i)
        LinearRelation((d, -h0, *[-h for h in h_u]), disclosed_stmt),
    ]


def bbs_gen_holder_proof(
    pk: GroupElement,
    params: BbsParams,
    attributes: list[int],
    sig: BbsSignature,
    disclosed: list[int],
    context: ChallengeContext,
    construction: str = STANDARD,
    rng=None,
    check: bool = True,
) -> BbsHolderProof:
    """Prove knowledge of ``sig`` and the undisclosed attributes.

    ``disclosed`` holds 1-based indices.  ``construction`` selects the BBS
    relation (ignored for BBS+, whose blinding ``s`` always stays hidden).
    """
    _check_arity(params, attributes)
    if construction not in (STANDARD, ALTERNATIVE):
        raise InvalidArgument(f"unknown construction {construction!r}")
    if check:
        bbs_verify(pk, params, attributes, sig)
    d_idx, hidden = _split(params, disclosed)
    ctx = _context(context, pk, params, construction if params.variant == BBS else STANDARD, d_idx)
    C = _commitment(params, attributes, sig.s)
    a_u = [attributes[i - 1] for i in hidden]

    if params.variant == BBS:
        r = random_scalar(rng, nonzero=True)
        Abar = sig.A * r
        Bbar = C * r - Abar * sig.e
        C_D = _disclosed_commitment(params, {i: attributes[i - 1] for i in d_idx})
        rels = _bbs_relations(params, (Abar, Bbar), C_D, hidden, construction)
        if construction == STANDARD:
            witness = [r, sig.e, *[r * a % ORDER for a in a_u]]
        else:
            r_inv = pow(r, -1, ORDER)
            witness = [r_inv, sig.e * r_inv % ORDER, *a_u]
        transcript = prove_linear([(rels[0], witness)], ctx, T_FORM, rng, check_witness=False)
        return BbsHolderProof(BBS, (Abar, Bbar), transcript)

    r1 = random_scalar(rng, nonzero=True)
    r2 = random_scalar(rng)
    r3 = pow(r1, -1, ORDER)
    s_prime = (sig.s - r2 * r3) % ORDER
    A_prime = sig.A * r1
    C_r1 = C * r1
    Abar = C_r1 - A_prime * sig.e
    d = multi_scalar_mul([C, params.h0], [r1, -r2 % ORDER])
    stmt = _disclosed_commitment(params, {i: attributes[i - 1] for i in d_idx})
    rels = _bbsplus_relations(params, (A_prime, Abar, d), stmt, hidden)
    transcript = prove_linear(
        [(rels[0], [sig.e, r2]), (rels[1], [r3, s_prime, *a_u])], ctx, T_FORM, rng, check_witness=False
    )
    return BbsHolderProof(BBS_PLUS, (A_prime, Abar, d), transcript)


def bbs_ver_present_proof(
    pk: GroupElement,
    params: BbsParams,
    disclosed: dict[int, int],
    proof: BbsHolderProof,
    context: ChallengeContext,
    construction: str = STANDARD,
) -> None:
    """Verify a holder proof against ``{index: attribute}``; raises on reject."""
    if proof.variant != params.variant:
        raise VerificationError("malformed", "proof variant does not match parameters")
    try:
        d_idx, hidden = _split(params, disclosed)
    except InvalidArgument as exc:
        raise VerificationError("malformed", str(exc)) from exc
    if proof.n_undisclosed != len(hidden):
        raise VerificationError("malformed", "response count mismatch")
    ctx = _context(context, pk, params, construction if params.variant == BBS else STANDARD, d_idx)
    stmt = _disclosed_commitment(params, disclosed)

    if params.variant == BBS:
        Abar, Bbar = proof.elements
        if Abar.is_identity():
            raise VerificationError("identity-element", "Abar is the identity")
        rels = _bbs_relations(params, (Abar, Bbar), stmt, hidden, construction)
        verify_linear(rels, proof.transcript, ctx)
        if pairing_product([(Abar, pk), (-Bbar, g2())]) != gt_identity():
            raise VerificationError("pairing-mismatch")
        return

    A_prime, Abar, d = proof.elements
    if A_prime.is_identity():
        raise VerificationError("identity-element", "A' is the identity")
    rels = _bbsplus_relations(params, (A_prime, Abar, d), stmt, hidden)
    verify_linear(rels, proof.transcript, ctx)
    if pairing_product([(A_prime, pk), (-Abar, g2())]) != gt_identity():
        raise VerificationError("pairing-mismatch")
