import itertools
import random

import gmpy2
import pytest

from sdcred import cl
from sdcred.errors import DecodeError, InvalidArgument, VerificationError
from sdcred.nizkp import ChallengeContext

CTX = ChallengeContext.create("CL", [b"header"], b"")
P = cl.DEFAULT_PARAMS


@pytest.fixture(scope="module")
def keys33(cl_group):
    return cl.keys_from_group(cl_group, 33)


def attrs(rng, m, bits=256):
    return [rng.getrandbits(bits) for _ in range(m)]


def reason(excinfo):
    return excinfo.value.reason


def test_params_invariants():
    assert P.le > P.la + 2
    assert P.lv == P.ln + P.la + P.l0 == 3408
    assert P.e_hat_bits == 457 and (P.e_hat_bits + 7) // 8 == P.e_hat_bytes == 58
    assert P.a_hat_bits == 593 and (P.a_hat_bits + 7) // 8 == P.a_hat_bytes == 75
    with pytest.raises(InvalidArgument):
        cl.ClParams(le=258)


def test_public_key_size_at_33(keys33):
    _, pk = keys33
    assert len(pk.to_bytes()) == 384 * 36 == 13824
    assert cl.ClPublicKey.from_bytes(pk.to_bytes()) == pk


def test_quadratic_residue_generators(keys33):
    sk, pk = keys33
    for x in (*pk.R, pk.S, pk.Z):
        assert gmpy2.jacobi(x, sk.p) == 1 and gmpy2.jacobi(x, sk.q) == 1


def test_minimal_arity(cl_group):
    sk, pk = cl.keys_from_group(cl_group, 1)
    assert pk.m == 1 and len(pk.to_bytes()) == 384 * 4
    assert pk.n % sk.p == 0


def test_keys_from_group_needs_enough_generators(cl_group):
    with pytest.raises(InvalidArgument):
        cl.keys_from_group(cl_group, 34)
    with pytest.raises(InvalidArgument):
        cl.keys_from_group(cl_group, 0)


def test_sign_small_attributes(cl_group, rng):
    sk, pk = cl.keys_from_group(cl_group, 3)
    sig = cl.cl_sign(sk, pk, [1, 2, 3], rng)
    cl.cl_verify(pk, [1, 2, 3], sig)
    # recompute Z = A^e R_1^a_1 ... S^v mod n directly
    n = pk.n
    z = pow(sig.A, sig.e, n)
    for R, a in zip(pk.R, [1, 2, 3]):
        z = z * pow(R, a, n) % n
    assert z * pow(pk.S, sig.v, n) % n == pk.Z
    assert (1 << (P.le - 1)) + 1 <= sig.e <= (1 << P.le) - 1
    assert gmpy2.is_prime(sig.e, 64)


def test_signing_is_randomized(cl_group, rng):
    sk, pk = cl.keys_from_group(cl_group, 3)
    s1 = cl.cl_sign(sk, pk, [1, 2, 3], rng)
    s2 = cl.cl_sign(sk, pk, [1, 2, 3], rng)
    assert (s1.e, s1.v) != (s2.e, s2.v)
    cl.cl_verify(pk, [1, 2, 3], s1)
    cl.cl_verify(pk, [1, 2, 3], s2)


def test_verify_rejections(cl_group, rng):
    sk, pk = cl.keys_from_group(cl_group, 3)
    a = attrs(rng, 3)
    sig = cl.cl_sign(sk, pk, a, rng)
    with pytest.raises(VerificationError) as e:
        cl.cl_verify(pk, a, cl.ClSignature(sig.A, sig.e + 1, sig.v))
    assert reason(e) == "bad-equation"
    with pytest.raises(VerificationError) as e:
        cl.cl_verify(pk, [a[0], 1 << 256, a[2]], sig)
    assert reason(e) == "attribute-too-large"
    with pytest.raises(VerificationError) as e:
        cl.cl_verify(pk, a, cl.ClSignature(sig.A, 1 << (P.le - 1), sig.v))
    assert reason(e) == "e-out-of-range"
    with pytest.raises(VerificationError) as e:
        cl.cl_verify(pk, [a[0] ^ 1, a[1], a[2]], sig)
    assert reason(e) == "bad-equation"


def test_sign_rejects_oversized_attribute(cl_group, rng):
    sk, pk = cl.keys_from_group(cl_group, 2)
    with pytest.raises(InvalidArgument):
        cl.cl_sign(sk, pk, [1, 1 << 256], rng)
    cl.cl_verify(pk, [1, (1 << 256) - 1], cl.cl_sign(sk, pk, [1, (1 << 256) - 1], rng))


def test_signature_serialization(keys33, rng):
    sk, pk = keys33
    sig = cl.cl_sign(sk, pk, attrs(rng, 33), rng)
    data = sig.to_bytes()
    assert cl.ClSignature.from_bytes(data) == sig
    with pytest.raises(DecodeError):
        cl.ClSignature.from_bytes(data[:-1])


@pytest.mark.parametrize("n_d,size", [(10, 2667), (33, 942)])
def test_proof_size_at_33(keys33, rng, n_d, size):
    sk, pk = keys33
    a = attrs(rng, 33)
    sig = cl.cl_sign(sk, pk, a, rng)
    disclosed = rng.sample(range(1, 34), n_d)
    proof = cl.cl_gen_holder_proof(pk, a, sig, disclosed, CTX, rng)
    data = proof.to_bytes()
    assert len(data) == size == 32 + 384 + 58 + 468 + 75 * (33 - n_d)
    back = cl.ClHolderProof.from_bytes(data)
    assert back == proof
    cl.cl_ver_present_proof(pk, {i: a[i - 1] for i in disclosed}, back, CTX)


def test_roundtrip_all_subsets_m4(cl_group, rng):
    sk, pk = cl.keys_from_group(cl_group, 4)
    a = attrs(rng, 4)
    sig = cl.cl_sign(sk, pk, a, rng)
    for k in range(5):
        for subset in itertools.combinations(range(1, 5), k):
            proof = cl.cl_gen_holder_proof(pk, a, sig, list(subset), CTX, rng)
            assert len(proof.to_bytes()) == P.proof_size(4 - k)
            cl.cl_ver_present_proof(pk, {i: a[i - 1] for i in subset}, proof, CTX)


@pytest.mark.parametrize("m", [1, 8])
def test_roundtrip_random_credentials(cl_group, m):
    rng = random.Random(m)
    sk, pk = cl.keys_from_group(cl_group, m)
    for _ in range(3):
        a = attrs(rng, m)
        sig = cl.cl_sign(sk, pk, a, rng)
        disclosed = rng.sample(range(1, m + 1), rng.randrange(m + 1))
        proof = cl.cl_gen_holder_proof(pk, a, sig, disclosed, CTX, rng)
        cl.cl_ver_present_proof(pk, {i: a[i - 1] for i in disclosed}, proof, CTX)


def test_max_size_witnesses_no_wraparound(cl_group, rng):
    sk, pk = cl.keys_from_group(cl_group, 4)
    a = [(1 << 256) - 1] * 4
    sig = cl.cl_sign(sk, pk, a, rng)
    for _ in range(5):
        proof = cl.cl_gen_holder_proof(pk, a, sig, [], CTX, rng)
        # responses are plain integers that fit their fields without reduction
        assert all(x.bit_length() <= P.a_hat_bits for x in proof.a_hat)
        assert proof.e_hat.bit_length() <= P.e_hat_bits
        assert proof.v_hat.bit_length() <= 8 * P.v_hat_bytes
        cl.cl_ver_present_proof(pk, {}, cl.ClHolderProof.from_bytes(proof.to_bytes()), CTX)


def test_fresh_randomization(cl_group, rng):
    sk, pk = cl.keys_from_group(cl_group, 4)
    a = attrs(rng, 4)
    sig = cl.cl_sign(sk, pk, a, rng)
    p1 = cl.cl_gen_holder_proof(pk, a, sig, [1], CTX, rng)
    p2 = cl.cl_gen_holder_proof(pk, a, sig, [1], CTX, rng)
    assert p1.A_prime != p2.A_prime and p1.A_prime != sig.A


def test_presentation_rejections(cl_group, rng):
    sk, pk = cl.keys_from_group(cl_group, 4)
    a = attrs(rng, 4)
    sig = cl.cl_sign(sk, pk, a, rng)
    proof = cl.cl_gen_holder_proof(pk, a, sig, [1, 2], CTX, rng)
    disclosed = {1: a[0], 2: a[1]}

    inflated = cl.ClHolderProof(proof.A_prime, proof.c, proof.e_hat, proof.v_hat,
                                (proof.a_hat[0] + (1 << P.a_hat_bits), proof.a_hat[1]))
    with pytest.raises(VerificationError) as e:
        cl.cl_ver_present_proof(pk, disclosed, inflated, CTX)
    assert reason(e) == "response-out-of-range"

    big_e = cl.ClHolderProof(proof.A_prime, proof.c, proof.e_hat | (1 << P.e_hat_bits), proof.v_hat, proof.a_hat)
    with pytest.raises(VerificationError) as e:
        cl.cl_ver_present_proof(pk, disclosed, big_e, CTX)
    assert reason(e) == "response-out-of-range"

    with pytest.raises(VerificationError) as e:
        cl.cl_ver_present_proof(pk, {1: a[0] ^ 1, 2: a[1]}, proof, CTX)
    assert reason(e) == "proof-equation"

    with pytest.raises(VerificationError) as e:
        cl.cl_ver_present_proof(pk, disclosed, proof, CTX.with_parts(b"other"))
    assert reason(e) == "proof-equation"

    with pytest.raises(VerificationError) as e:
        cl.cl_ver_present_proof(pk, {1: a[0]}, proof, CTX)
    assert reason(e) == "malformed"


def test_byte_flips_rejected(cl_group, rng):
    sk, pk = cl.keys_from_group(cl_group, 3)
    a = attrs(rng, 3)
    sig = cl.cl_sign(sk, pk, a, rng)
    data = cl.cl_gen_holder_proof(pk, a, sig, [2], CTX, rng).to_bytes()
    for pos in rng.sample(range(len(data)), 25):
        bad = bytearray(data)
        bad[pos] ^= 1 << rng.randrange(8)
        with pytest.raises(VerificationError):
            cl.cl_ver_present_proof(pk, {2: a[1]}, cl.ClHolderProof.from_bytes(bytes(bad)), CTX)


def test_holder_proof_rejects_invalid_signature(cl_group, rng):
    sk, pk = cl.keys_from_group(cl_group, 2)
    a = attrs(rng, 2)
    sig = cl.cl_sign(sk, pk, a, rng)
    with pytest.raises(VerificationError):
        cl.cl_gen_holder_proof(pk, a, cl.ClSignature(sig.A, sig.e, sig.v + 1), [], CTX, rng)
    with pytest.raises(InvalidArgument):
        cl.cl_gen_holder_proof(pk, a, sig, [3], CTX, rng)


def test_proof_decode_length():
    with pytest.raises(DecodeError):
        cl.ClHolderProof.from_bytes(b"\x00" * (P.proof_size(1) - 1))
