import itertools
import random

import pytest

from sdcred import bbs
from sdcred.algebra import ORDER, count_ops, g1, g2, pairing, random_scalar
from sdcred.bbs import ALTERNATIVE, BBS, BBS_PLUS, STANDARD
from sdcred.errors import DecodeError, InvalidArgument, VerificationError
from sdcred.nizkp import ChallengeContext

CTX = ChallengeContext.create("BBS", [b"header"], b"")
SEED = b"test-seed"


def setup(m, variant, rng):
    params = bbs.bbs_setup(SEED, m, variant)
    kp = bbs.bbs_keygen(rng)
    attrs = [random_scalar(rng) for _ in range(m)]
    return params, kp, attrs, bbs.bbs_sign(kp.sk, params, attrs, rng)


def pairs(n):
    return sum(v for k, v in n.items() if k[0] == "P")


def test_setup_deterministic():
    assert bbs.bbs_setup(SEED, 4, BBS) == bbs.bbs_setup(SEED, 4, BBS)
    assert bbs.bbs_setup(SEED, 4, BBS) != bbs.bbs_setup(b"other", 4, BBS)


def test_setup_arity():
    p = bbs.bbs_setup(SEED, 4, BBS_PLUS)
    assert len(p.generators) == 5 and len(p.h) == 4
    assert len(bbs.bbs_setup(SEED, 4, BBS).generators) == 4
    with pytest.raises(InvalidArgument):
        bbs.bbs_setup(SEED, 0, BBS)
    with pytest.raises(InvalidArgument):
        bbs.bbs_setup(SEED, 4, "BBS++")
    with pytest.raises(InvalidArgument):
        bbs.bbs_setup(SEED, 4, BBS).h0


def test_variants_differ_only_by_h0():
    plain = bbs.bbs_setup(SEED, 6, BBS)
    plus = bbs.bbs_setup(SEED, 6, BBS_PLUS)
    assert plus.h == plain.generators
    assert plus.h0 not in plain.generators


@pytest.mark.parametrize("variant,size", [(BBS, 80), (BBS_PLUS, 112)])
def test_sign_verify_and_size(rng, variant, size):
    params, kp, attrs, sig = setup(4, variant, rng)
    bbs.bbs_verify(kp.pk, params, attrs, sig)
    data = sig.to_bytes()
    assert len(data) == size
    assert bbs.BbsSignature.from_bytes(data) == sig
    assert kp.pk == g2() * kp.sk and len(kp.pk.to_bytes()) == 96


def test_signature_equation_direct(rng):
    # e(A, w + e g2) = e(g1 + s h0 + sum a_i h_i, g2), evaluated with plain pairings
    params, kp, attrs, sig = setup(3, BBS_PLUS, rng)
    C = g1() + params.h0 * sig.s
    for h, a in zip(params.h, attrs):
        C = C + h * a
    assert pairing(sig.A, kp.pk + g2() * sig.e) == pairing(C, g2())


@pytest.mark.parametrize("variant", [BBS, BBS_PLUS])
def test_verify_rejections(rng, variant):
    params, kp, attrs, sig = setup(4, variant, rng)
    for i in range(4):
        bad = list(attrs)
        bad[i] = (bad[i] + 1) % ORDER
        with pytest.raises(VerificationError) as e:
            bbs.bbs_verify(kp.pk, params, bad, sig)
        assert e.value.reason == "pairing-mismatch"
    shifted = bbs.BbsSignature(sig.A + g1() * random_scalar(rng, nonzero=True), sig.e, sig.s)
    with pytest.raises(VerificationError):
        bbs.bbs_verify(kp.pk, params, attrs, shifted)
    with pytest.raises(VerificationError):
        bbs.bbs_verify(bbs.bbs_keygen(rng).pk, params, attrs, sig)
    with pytest.raises(VerificationError) as e:
        bbs.bbs_verify(kp.pk, params, attrs[:-1], sig)
    assert e.value.reason == "malformed"


def test_signature_decode_length():
    with pytest.raises(DecodeError):
        bbs.BbsSignature.from_bytes(b"\x00" * 81)


@pytest.mark.parametrize("variant,construction", [(BBS, STANDARD), (BBS, ALTERNATIVE), (BBS_PLUS, STANDARD)])
@pytest.mark.parametrize("m", [1, 4, 8, 16, 33])
def test_completeness(variant, construction, m):
    rng = random.Random(m)
    params, kp, attrs, sig = setup(m, variant, rng)
    disclosed = rng.sample(range(1, m + 1), rng.randrange(m + 1))
    proof = bbs.bbs_gen_holder_proof(kp.pk, params, attrs, sig, disclosed, CTX, construction, rng)
    data = proof.to_bytes()
    assert len(data) == bbs.proof_size(variant, m - len(disclosed))
    back = bbs.BbsHolderProof.from_bytes(data, variant)
    bbs.bbs_ver_present_proof(kp.pk, params, {i: attrs[i - 1] for i in disclosed}, back, CTX, construction)


@pytest.mark.parametrize("variant,construction", [(BBS, STANDARD), (BBS, ALTERNATIVE), (BBS_PLUS, STANDARD)])
def test_all_subsets_m4(rng, variant, construction):
    params, kp, attrs, sig = setup(4, variant, rng)
    for k in range(5):
        for subset in itertools.combinations(range(1, 5), k):
            proof = bbs.bbs_gen_holder_proof(kp.pk, params, attrs, sig, list(subset), CTX, construction, rng)
            bbs.bbs_ver_present_proof(kp.pk, params, {i: attrs[i - 1] for i in subset}, proof, CTX, construction)


@pytest.mark.parametrize("variant,size", [(BBS, 944), (BBS_PLUS, 1104)])
def test_proof_size_at_33(rng, variant, size):
    params, kp, attrs, sig = setup(33, variant, rng)
    proof = bbs.bbs_gen_holder_proof(kp.pk, params, attrs, sig, list(range(1, 11)), CTX, rng=rng)
    assert len(proof.to_bytes()) == size


def test_constructions_cross_verify(rng):
    # both constructions on identical inputs; each verifies only under its own relation
    params, kp, attrs, sig = setup(6, BBS, rng)
    disclosed = {2: attrs[1], 5: attrs[4]}
    for c in (STANDARD, ALTERNATIVE):
        proof = bbs.bbs_gen_holder_proof(kp.pk, params, attrs, sig, list(disclosed), CTX, c, rng)
        bbs.bbs_ver_present_proof(kp.pk, params, disclosed, proof, CTX, c)
        other = ALTERNATIVE if c == STANDARD else STANDARD
        with pytest.raises(VerificationError):
            bbs.bbs_ver_present_proof(kp.pk, params, disclosed, proof, CTX, other)


@pytest.mark.parametrize("variant", [BBS, BBS_PLUS])
def test_disclosed_value_substituted(rng, variant):
    params, kp, attrs, sig = setup(4, variant, rng)
    proof = bbs.bbs_gen_holder_proof(kp.pk, params, attrs, sig, [1, 3], CTX, rng=rng)
    with pytest.raises(VerificationError) as e:
        bbs.bbs_ver_present_proof(kp.pk, params, {1: attrs[0], 3: (attrs[2] + 1) % ORDER}, proof, CTX)
    assert e.value.reason == "proof-equation"
    with pytest.raises(VerificationError) as e:
        bbs.bbs_ver_present_proof(kp.pk, params, {1: attrs[0], 3: attrs[2]}, proof, CTX.with_parts(b"x"))
    assert e.value.reason == "proof-equation"


def test_common_power_tamper(rng):
    # (k Abar, k Bbar) keeps e(Abar, w) = e(Bbar, g2) but breaks the SPK
    params, kp, attrs, sig = setup(4, BBS, rng)
    proof = bbs.bbs_gen_holder_proof(kp.pk, params, attrs, sig, [2], CTX, rng=rng)
    k = random_scalar(rng, nonzero=True)
    Abar, Bbar = proof.elements
    assert pairing(Abar * k, kp.pk) == pairing(Bbar * k, g2())
    tampered = bbs.BbsHolderProof(BBS, (Abar * k, Bbar * k), proof.transcript)
    with pytest.raises(VerificationError) as e:
        bbs.bbs_ver_present_proof(kp.pk, params, {2: attrs[1]}, tampered, CTX)
    assert e.value.reason == "proof-equation"


def test_identity_elements_rejected(rng):
    params, kp, attrs, sig = setup(3, BBS_PLUS, rng)
    proof = bbs.bbs_gen_holder_proof(kp.pk, params, attrs, sig, [], CTX, rng=rng)
    A_prime, Abar, d = proof.elements
    zero = A_prime * 0
    bad = bbs.BbsHolderProof(BBS_PLUS, (zero, Abar, d), proof.transcript)
    with pytest.raises(VerificationError) as e:
        bbs.bbs_ver_present_proof(kp.pk, params, {}, bad, CTX)
    assert e.value.reason == "identity-element"

    params, kp, attrs, sig = setup(3, BBS, rng)
    proof = bbs.bbs_gen_holder_proof(kp.pk, params, attrs, sig, [], CTX, rng=rng)
    bad = bbs.BbsHolderProof(BBS, (zero, proof.elements[1]), proof.transcript)
    with pytest.raises(VerificationError) as e:
        bbs.bbs_ver_present_proof(kp.pk, params, {}, bad, CTX)
    assert e.value.reason == "identity-element"


@pytest.mark.parametrize("variant", [BBS, BBS_PLUS])
def test_wrong_issuer_key_pairing_mismatch(rng, variant):
    params, kp, attrs, sig = setup(3, variant, rng)
    proof = bbs.bbs_gen_holder_proof(kp.pk, params, attrs, sig, [1], CTX, rng=rng)
    # the issuer key is bound into the challenge as well as the pairing check
    other = bbs.bbs_keygen(rng)
    with pytest.raises(VerificationError):
        bbs.bbs_ver_present_proof(other.pk, params, {1: attrs[0]}, proof, CTX)


def test_pairing_mismatch_with_valid_spk(rng):
    # a holder who knows a relation but no signature: Abar random, Bbar built to satisfy the SPK
    params, kp, attrs, _ = setup(3, BBS, rng)
    fake = bbs.BbsSignature(g1() * random_scalar(rng, nonzero=True), random_scalar(rng))
    proof = bbs.bbs_gen_holder_proof(kp.pk, params, attrs, fake, [1], CTX, rng=rng, check=False)
    with pytest.raises(VerificationError) as e:
        bbs.bbs_ver_present_proof(kp.pk, params, {1: attrs[0]}, proof, CTX)
    assert e.value.reason == "pairing-mismatch"

    params, kp, attrs, _ = setup(3, BBS_PLUS, rng)
    fake = bbs.BbsSignature(g1() * random_scalar(rng, nonzero=True), random_scalar(rng), random_scalar(rng))
    proof = bbs.bbs_gen_holder_proof(kp.pk, params, attrs, fake, [1], CTX, rng=rng, check=False)
    with pytest.raises(VerificationError) as e:
        bbs.bbs_ver_present_proof(kp.pk, params, {1: attrs[0]}, proof, CTX)
    assert e.value.reason == "pairing-mismatch"


def test_gen_rejects_invalid_signature(rng):
    params, kp, attrs, sig = setup(3, BBS, rng)
    bad = bbs.BbsSignature(sig.A, (sig.e + 1) % ORDER)
    with pytest.raises(VerificationError):
        bbs.bbs_gen_holder_proof(kp.pk, params, attrs, bad, [], CTX, rng=rng)
    with pytest.raises(InvalidArgument):
        bbs.bbs_gen_holder_proof(kp.pk, params, attrs, sig, [4], CTX, rng=rng)
    with pytest.raises(InvalidArgument):
        bbs.bbs_gen_holder_proof(kp.pk, params, attrs, sig, [], CTX, "other", rng)


@pytest.mark.parametrize("variant", [BBS, BBS_PLUS])
def test_proof_freshness(rng, variant):
    params, kp, attrs, sig = setup(4, variant, rng)
    seen = set()
    for _ in range(100):
        proof = bbs.bbs_gen_holder_proof(kp.pk, params, attrs, sig, [1], CTX, rng=rng, check=False)
        for e in (*proof.elements, *proof.transcript.commitments):
            b = e.to_bytes()
            assert b not in seen
            seen.add(b)


def test_conversion_roundtrip(rng):
    params, kp, attrs, sig = setup(5, BBS_PLUS, rng)
    conv, ext, bparams = bbs.bbsplus_to_bbs(kp.pk, params, sig, attrs)
    assert conv.A == sig.A and conv.e == sig.e and conv.s is None
    assert ext == [sig.s, *attrs]
    assert bparams.variant == BBS and bparams.generators == params.generators
    bbs.bbs_verify(kp.pk, bparams, ext, conv)
    with pytest.raises(InvalidArgument):
        bbs.bbsplus_to_bbs(kp.pk, params, sig, [(attrs[0] + 1) % ORDER, *attrs[1:]])
    with pytest.raises(InvalidArgument):
        bbs.bbsplus_params_as_bbs(bbs.bbs_setup(SEED, 3, BBS))


def test_converted_proof_hides_s(rng):
    # BBS proof over (s, a_1..a_m) with s undisclosed
    params, kp, attrs, sig = setup(4, BBS_PLUS, rng)
    conv, ext, bparams = bbs.bbsplus_to_bbs(kp.pk, params, sig, attrs)
    disclosed = [3, 5]  # positions in the extended vector, s is position 1
    for c in (STANDARD, ALTERNATIVE):
        proof = bbs.bbs_gen_holder_proof(kp.pk, bparams, ext, conv, disclosed, CTX, c, rng)
        assert proof.n_undisclosed == 3
        bbs.bbs_ver_present_proof(kp.pk, bparams, {i: ext[i - 1] for i in disclosed}, proof, CTX, c)


@pytest.mark.parametrize("variant", [BBS, BBS_PLUS])
def test_pairing_counts(rng, variant):
    params, kp, attrs, sig = setup(8, variant, rng)
    with count_ops() as c:
        bbs.bbs_verify(kp.pk, params, attrs, sig)
    assert pairs(c) == 2
    with count_ops() as c:
        proof = bbs.bbs_gen_holder_proof(kp.pk, params, attrs, sig, [1, 2], CTX, rng=rng, check=False)
    assert pairs(c) == 0
    with count_ops() as c:
        bbs.bbs_ver_present_proof(kp.pk, params, {1: attrs[0], 2: attrs[1]}, proof, CTX)
    assert pairs(c) == 2


def test_proof_decode_length(rng):
    with pytest.raises(DecodeError):
        bbs.BbsHolderProof.from_bytes(b"\x00" * 150, BBS)
    with pytest.raises(DecodeError):
        bbs.BbsHolderProof.from_bytes(b"\x00" * (5 * 48 + 3 * 32), BBS_PLUS)
