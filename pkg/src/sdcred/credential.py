"""Verifiable credentials and presentations over six disclosure mechanisms.

Two families share one lifecycle (keygen, issue, verify, present, verify):

* hiding commitments (``cmtList``, ``merTree``): the issuer signs a salted
  commitment with an ordinary signature, and the holder reveals chosen
  ``(attribute, salt)`` openings;
* selective-disclosure signatures (``CL``, ``BBS``, ``BBS+``, ``PS``): the
  issuer signs the encoded attributes, and the holder sends only a
  zero-knowledge proof of possession.

Containers serialize to canonical JSON ``{header, payloads, proof}`` with
binary fields in unpadded base64url.
"""
from __future__ import annotations

import base64
import hashlib
import json
import secrets
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Any, Iterable, Mapping

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey, Ed25519PublicKey

from . import bbs as _bbs
from . import cl as _cl
from . import commitments as _cmt
from . import ps as _ps
from .algebra import G2, ORDER, SCALAR_SIZE, GroupElement, RsaGroupParams, scalar_from_bytes, scalar_to_bytes
from .errors import DecodeError, InvalidArgument, UnknownMechanism, VerificationError
from .nizkp import ChallengeContext

CMT_LIST = "cmtList"
MER_TREE = "merTree"
CL = "CL"
BBS = _bbs.BBS
BBS_PLUS = _bbs.BBS_PLUS
PS = "PS"
MECHANISMS = (CMT_LIST, MER_TREE, CL, BBS, BBS_PLUS, PS)

COMMITMENT_FAMILY = "commitment"
SDSIG_FAMILY = "sdsig"

VC = "vc"
VP = "vp"


def _random_bytes(n: int, rng=None) -> bytes:
    if rng is None:
        return secrets.token_bytes(n)
    return rng.getrandbits(8 * n).to_bytes(n, "big")


# ---------------------------------------------------------------------------
# ordinary signatures for the commitment family


class Ed25519Backend:
    """Ed25519 via ``cryptography``; secrets are 32-byte seeds."""

    name = "Ed25519"
    signature_size = 64

    def keygen(self, rng=None) -> tuple[bytes, bytes]:
        seed = _random_bytes(32, rng)
        return seed, Ed25519PrivateKey.from_private_bytes(seed).public_key().public_bytes_raw()

    def sign(self, secret: bytes, message: bytes) -> bytes:
        return Ed25519PrivateKey.from_private_bytes(secret).sign(message)

    def verify(self, public: bytes, message: bytes, signature: bytes) -> bool:
        try:
            Ed25519PublicKey.from_public_bytes(public).verify(signature, message)
        except (InvalidSignature, ValueError):
            return False
        return True


# ---------------------------------------------------------------------------
# containers


@dataclass(frozen=True)
class Header:
    """Mechanism tag, issuer key (inline bytes or a reference) and parameters.

    ``seed`` carries the BBS/BBS+ generator seed; ``signature_alg`` names the
    ordinary signature of the commitment family; ``group_swap`` marks PS keys
    that live in G2.
    """

    mechanism: str
    n_attributes: int
    issuer_key: bytes | None = None
    key_ref: str | None = None
    seed: bytes | None = None
    signature_alg: str | None = None
    group_swap: bool = False

    def to_json(self, typ: str) -> dict:
        out: dict[str, Any] = {"typ": typ, "mechanism": self.mechanism, "n_attributes": self.n_attributes}
        if self.issuer_key is not None:
            out["issuer_key"] = b64e(self.issuer_key)
        if self.key_ref is not None:
            out["key_ref"] = self.key_ref
        if self.seed is not None:
            out["seed"] = b64e(self.seed)
        if self.signature_alg is not None:
            out["signature_alg"] = self.signature_alg
        if self.group_swap:
            out["group_swap"] = True
        return out

    @classmethod
    def from_json(cls, obj: Any, typ: str) -> Header:
        _expect_keys(obj, {"typ", "mechanism", "n_attributes"}, {"issuer_key", "key_ref", "seed", "signature_alg", "group_swap"})
        if obj["typ"] != typ:
            raise DecodeError(f"expected typ {typ!r}")
        if obj.get("group_swap", True) is not True:
            raise DecodeError("group_swap is either true or absent")
        return cls(
            mechanism=_str(obj["mechanism"]),
            n_attributes=_int(obj["n_attributes"]),
            issuer_key=b64d(obj["issuer_key"]) if "issuer_key" in obj else None,
            key_ref=_str(obj["key_ref"]) if "key_ref" in obj else None,
            seed=b64d(obj["seed"]) if "seed" in obj else None,
            signature_alg=_str(obj["signature_alg"]) if "signature_alg" in obj else None,
            group_swap="group_swap" in obj,
        )

    def binding_bytes(self) -> bytes:
        return _dumps(self.to_json(""))


@dataclass(frozen=True)
class IssuerKeys:
    mechanism: str
    n_attributes: int
    public_key: bytes
    secret: Any = field(repr=False, default=None)
    seed: bytes | None = None
    signature_alg: str | None = None
    group_swap: bool = False

    def header(self, key_ref: str | None = None) -> Header:
        return Header(
            mechanism=self.mechanism,
            n_attributes=self.n_attributes,
            issuer_key=None if key_ref else self.public_key,
            key_ref=key_ref,
            seed=self.seed,
            signature_alg=self.signature_alg,
            group_swap=self.group_swap,
        )

    def public(self) -> IssuerKeys:
        return replace(self, secret=None)


@dataclass(frozen=True)
class Credential:
    header: Header
    attributes: tuple[bytes, ...]
    salts: tuple[bytes, ...] | None
    commitment: bytes | None
    signature: bytes


@dataclass(frozen=True)
class Presentation:
    """``disclosed`` pairs 1-based indices with attribute bytes, in index order.

    ``salts`` align with ``disclosed``.  ``holder_proof`` is empty for cmtList,
    the concatenated inclusion paths for merTree and the zero-knowledge proof
    for the signature mechanisms.
    """

    header: Header
    disclosed: tuple[tuple[int, bytes], ...]
    salts: tuple[bytes, ...] | None
    commitment: bytes | None
    signature: bytes | None
    holder_proof: bytes

    def disclosed_map(self) -> dict[int, bytes]:
        return dict(self.disclosed)


def proof_bytes(presentation: Presentation) -> int:
    """Size of the material proving the disclosed payload.

    Counts the signed commitment, the holder proof and the disclosed salts; the
    disclosed attribute values themselves are excluded.
    """
    total = len(presentation.holder_proof)
    total += len(presentation.commitment or b"") + len(presentation.signature or b"")
    total += sum(len(s) for s in presentation.salts or ())
    return total


# ---------------------------------------------------------------------------
# attribute encoding


def encode_attribute(mechanism: str, attribute: bytes) -> bytes | int:
    """Map attribute bytes into the message space of ``mechanism``."""
    if mechanism in (CMT_LIST, MER_TREE):
        return bytes(attribute)
    digest = hashlib.sha256(attribute).digest()
    if mechanism == CL:
        return int.from_bytes(digest, "big")
    if mechanism in (BBS, BBS_PLUS, PS):
        return int.from_bytes(digest, "big") % ORDER
    raise UnknownMechanism(f"unknown mechanism {mechanism!r}")


def disclosed_payload_bytes(disclosed: Iterable[tuple[int, bytes]]) -> bytes:
    return b"".join(i.to_bytes(4, "big") + len(v).to_bytes(4, "big") + v for i, v in disclosed)


def _context(header: Header, disclosed) -> ChallengeContext:
    return ChallengeContext.create(header.mechanism, [header.binding_bytes()], disclosed_payload_bytes(disclosed))


# ---------------------------------------------------------------------------
# mechanisms


class Mechanism:
    name: str
    family: str
    formula_is_bound = False

    def keygen(self, m: int, rng=None, **options) -> IssuerKeys:
        raise NotImplementedError

    def sign(self, keys: IssuerKeys, attributes: tuple[bytes, ...], rng=None) -> tuple:
        """Return ``(salts, commitment, signature)``."""
        raise NotImplementedError

    def verify(self, credential: Credential, public_key: bytes) -> None:
        raise NotImplementedError

    def prove(self, credential: Credential, public_key: bytes, indices: list[int], rng=None) -> Presentation:
        raise NotImplementedError

    def verify_proof(self, presentation: Presentation, public_key: bytes) -> None:
        raise NotImplementedError

    def formula_size(self, n_attributes: int, n_disclosed: int) -> int:
        raise NotImplementedError

    def secret_to_bytes(self, secret) -> bytes:
        raise NotImplementedError

    def secret_from_bytes(self, data: bytes, keys: IssuerKeys):
        raise NotImplementedError


class _CommitmentMechanism(Mechanism):
    family = COMMITMENT_FAMILY

    def __init__(self, backend=None):
        self.backend = backend or Ed25519Backend()

    def keygen(self, m: int, rng=None, **options) -> IssuerKeys:
        if m < 1:
            raise InvalidArgument("at least one attribute is required")
        if options:
            raise InvalidArgument(f"unexpected options {sorted(options)}")
        secret, public = self.backend.keygen(rng)
        return IssuerKeys(self.name, m, public, secret, signature_alg=self.backend.name)

    def _commit(self, leaves: list[bytes]) -> bytes:
        raise NotImplementedError

    def _signed_message(self, commitment: bytes, m: int) -> bytes:
        return self.name.encode() + b"\x00" + m.to_bytes(4, "big") + commitment

    def sign(self, keys, attributes, rng=None):
        salts = tuple(_cmt.generate_salts(len(attributes), rng))
        commitment = self._commit([a + s for a, s in zip(attributes, salts)])
        return salts, commitment, self.backend.sign(keys.secret, self._signed_message(commitment, len(attributes)))

    def _check_signature(self, header: Header, commitment: bytes, signature: bytes, public_key: bytes) -> None:
        if header.signature_alg != self.backend.name:
            raise VerificationError("malformed", f"signature algorithm {header.signature_alg!r} not supported")
        if not self.backend.verify(public_key, self._signed_message(commitment, header.n_attributes), signature):
            raise VerificationError("bad-signature")

    def verify(self, credential, public_key):
        if credential.salts is None or credential.commitment is None:
            raise VerificationError("malformed", "commitment credentials carry salts and a commitment")
        if len(credential.salts) != len(credential.attributes):
            raise VerificationError("malformed", "one salt per attribute is required")
        if any(len(s) != _cmt.SALT_SIZE for s in credential.salts):
            raise VerificationError("malformed", "salt has the wrong length")
        self._check_signature(credential.header, credential.commitment, credential.signature, public_key)
        leaves = [a + s for a, s in zip(credential.attributes, credential.salts)]
        if self._commit(leaves) != credential.commitment:
            raise VerificationError("commitment-mismatch")

    def prove(self, credential, public_key, indices, rng=None):
        disclosed = tuple((i, credential.attributes[i - 1]) for i in indices)
        salts = tuple(credential.salts[i - 1] for i in indices)
        return Presentation(
            credential.header, disclosed, salts, credential.commitment, credential.signature,
            self._holder_proof(credential, indices),
        )

    def _holder_proof(self, credential, indices) -> bytes:
        return b""

    def verify_proof(self, presentation, public_key):
        p = presentation
        if p.salts is None or p.commitment is None or p.signature is None:
            raise VerificationError("malformed", "commitment presentations carry salts, commitment and signature")
        if len(p.salts) != len(p.disclosed) or any(len(s) != _cmt.SALT_SIZE for s in p.salts):
            raise VerificationError("malformed", "one 16-byte salt per disclosed attribute is required")
        self._check_signature(p.header, p.commitment, p.signature, public_key)
        self._check_openings(p)


class CmtListMechanism(_CommitmentMechanism):
    name = CMT_LIST

    def _commit(self, leaves):
        return b"".join(_cmt.H(leaf) for leaf in leaves)

    def _check_openings(self, p):
        try:
            cmts = _cmt.CommitmentList.from_bytes(p.commitment)
        except InvalidArgument as exc:
            raise VerificationError("malformed", str(exc)) from exc
        if len(cmts) != p.header.n_attributes:
            raise VerificationError("malformed", "commitment list length differs from attribute count")
        if p.holder_proof:
            raise VerificationError("malformed", "cmtList presentations carry no holder proof")
        for (i, value), salt in zip(p.disclosed, p.salts):
            if not _cmt.verify_list_opening(cmts, i, value, salt):
                raise VerificationError("commitment-mismatch", f"attribute {i}")

    def formula_size(self, n_attributes, n_disclosed):
        return 32 * n_attributes + self.backend.signature_size + _cmt.SALT_SIZE * n_disclosed

    def secret_to_bytes(self, secret):
        return secret

    def secret_from_bytes(self, data, keys):
        return data


class MerTreeMechanism(_CommitmentMechanism):
    name = MER_TREE
    formula_is_bound = True

    def _commit(self, leaves):
        return _cmt.merkle_root(leaves).root

    def _holder_proof(self, credential, indices):
        leaves = [a + s for a, s in zip(credential.attributes, credential.salts)]
        return b"".join(b"".join(_cmt.merkle_path(leaves, i).siblings) for i in indices)

    def _check_openings(self, p):
        m = p.header.n_attributes
        if len(p.commitment) != _cmt.DIGEST_SIZE:
            raise VerificationError("malformed", "Merkle root must be 32 bytes")
        expected = sum(_cmt.path_length(m, i) for i, _ in p.disclosed) * _cmt.DIGEST_SIZE
        if len(p.holder_proof) != expected:
            raise VerificationError("malformed", "inclusion paths have the wrong length")
        pos = 0
        for (i, value), salt in zip(p.disclosed, p.salts):
            k = _cmt.path_length(m, i)
            sib = tuple(p.holder_proof[pos + j * 32:pos + (j + 1) * 32] for j in range(k))
            pos += 32 * k
            if not _cmt.merkle_verify(p.commitment, value + salt, _cmt.InclusionPath(i, sib, m)):
                raise VerificationError("commitment-mismatch", f"attribute {i}")

    def formula_size(self, n_attributes, n_disclosed):
        # upper bound: root, signature, one digest per salt and full-height paths
        return 32 + self.backend.signature_size + 32 * n_disclosed + _cmt.tree_height(n_attributes) * 32 * n_disclosed

    def secret_to_bytes(self, secret):
        return secret

    def secret_from_bytes(self, data, keys):
        return data


class _SdsigMechanism(Mechanism):
    family = SDSIG_FAMILY

    def _encode(self, attributes) -> list[int]:
        return [encode_attribute(self.name, a) for a in attributes]

    def verify(self, credential, public_key):
        if credential.salts is not None or credential.commitment is not None:
            raise VerificationError("malformed", "signature credentials carry no salts or commitment")
        self._verify_signature(credential, public_key)

    def prove(self, credential, public_key, indices, rng=None):
        disclosed = tuple((i, credential.attributes[i - 1]) for i in indices)
        proof = self._holder_proof(credential, public_key, indices, _context(credential.header, disclosed), rng)
        return Presentation(credential.header, disclosed, None, None, None, proof)

    def verify_proof(self, presentation, public_key):
        p = presentation
        if p.salts is not None or p.commitment is not None or p.signature is not None:
            raise VerificationError("malformed", "signature presentations must not carry salts, commitment or signature")
        disclosed = {i: encode_attribute(self.name, v) for i, v in p.disclosed}
        self._verify_holder_proof(p, public_key, disclosed, _context(p.header, p.disclosed))


class BbsMechanism(_SdsigMechanism):
    def __init__(self, variant: str, construction: str = _bbs.STANDARD):
        self.name = variant
        self.construction = construction

    def keygen(self, m, rng=None, seed: bytes | None = None, **options):
        if m < 1:
            raise InvalidArgument("at least one attribute is required")
        if options:
            raise InvalidArgument(f"unexpected options {sorted(options)}")
        seed = _random_bytes(32, rng) if seed is None else bytes(seed)
        kp = _bbs.bbs_keygen(rng)
        return IssuerKeys(self.name, m, kp.pk.to_bytes(), kp.sk, seed=seed)

    def _params(self, header: Header) -> _bbs.BbsParams:
        if header.seed is None:
            raise VerificationError("malformed", "BBS header needs a generator seed")
        return _bbs.bbs_setup(header.seed, header.n_attributes, self.name)

    @staticmethod
    def _pk(public_key: bytes) -> GroupElement:
        try:
            return GroupElement.from_bytes(G2, public_key)
        except DecodeError as exc:
            raise VerificationError("malformed", str(exc)) from exc

    def sign(self, keys, attributes, rng=None):
        params = _bbs.bbs_setup(keys.seed, keys.n_attributes, self.name)
        return None, None, _bbs.bbs_sign(keys.secret, params, self._encode(attributes), rng).to_bytes()

    def _signature(self, credential) -> _bbs.BbsSignature:
        try:
            sig = _bbs.BbsSignature.from_bytes(credential.signature)
        except DecodeError as exc:
            raise VerificationError("malformed", str(exc)) from exc
        if (sig.s is None) != (self.name == BBS):
            raise VerificationError("malformed", "signature shape does not match variant")
        return sig

    def _verify_signature(self, credential, public_key):
        _bbs.bbs_verify(self._pk(public_key), self._params(credential.header), self._encode(credential.attributes), self._signature(credential))

    def _holder_proof(self, credential, public_key, indices, ctx, rng):
        proof = _bbs.bbs_gen_holder_proof(
            self._pk(public_key), self._params(credential.header), self._encode(credential.attributes),
            self._signature(credential), indices, ctx, self.construction, rng, check=False,
        )
        return proof.to_bytes()

    def _verify_holder_proof(self, p, public_key, disclosed, ctx):
        try:
            proof = _bbs.BbsHolderProof.from_bytes(p.holder_proof, self.name)
        except DecodeError as exc:
            raise VerificationError("malformed", str(exc)) from exc
        _bbs.bbs_ver_present_proof(self._pk(public_key), self._params(p.header), disclosed, proof, ctx, self.construction)

    def formula_size(self, n_attributes, n_disclosed):
        n_u = n_attributes - n_disclosed
        return 144 + 32 * (2 + n_u) if self.name == BBS else 240 + 32 * (4 + n_u)

    def secret_to_bytes(self, secret):
        return scalar_to_bytes(secret)

    def secret_from_bytes(self, data, keys):
        return scalar_from_bytes(data)


class PsMechanism(_SdsigMechanism):
    name = PS

    def keygen(self, m, rng=None, swap: bool = False, **options):
        if options:
            raise InvalidArgument(f"unexpected options {sorted(options)}")
        kp = _ps.ps_keygen(m, rng, swap)
        return IssuerKeys(self.name, m, kp.pk.to_bytes(), kp.sk, group_swap=swap)

    @staticmethod
    def _pk(header: Header, public_key: bytes) -> _ps.PsPublicKey:
        try:
            pk = _ps.PsPublicKey.from_bytes(public_key, header.group_swap)
        except DecodeError as exc:
            raise VerificationError("malformed", str(exc)) from exc
        if pk.m != header.n_attributes:
            raise VerificationError("malformed", "key arity differs from attribute count")
        return pk

    def sign(self, keys, attributes, rng=None):
        if len(attributes) != keys.n_attributes:
            raise InvalidArgument(f"expected {keys.n_attributes} attributes, got {len(attributes)}")
        return None, None, _ps.ps_sign(keys.secret, self._encode(attributes), rng, keys.group_swap).to_bytes()

    @staticmethod
    def _signature(credential) -> _ps.PsSignature:
        try:
            return _ps.PsSignature.from_bytes(credential.signature, credential.header.group_swap)
        except DecodeError as exc:
            raise VerificationError("malformed", str(exc)) from exc

    def _verify_signature(self, credential, public_key):
        pk = self._pk(credential.header, public_key)
        _ps.ps_verify(pk, self._encode(credential.attributes), self._signature(credential))

    def _holder_proof(self, credential, public_key, indices, ctx, rng):
        pk = self._pk(credential.header, public_key)
        proof = _ps.ps_gen_holder_proof(
            pk, self._encode(credential.attributes), self._signature(credential), indices, ctx, rng, check=False
        )
        return proof.to_bytes()

    def _verify_holder_proof(self, p, public_key, disclosed, ctx):
        pk = self._pk(p.header, public_key)
        try:
            proof = _ps.PsHolderProof.from_bytes(p.holder_proof, p.header.group_swap)
        except DecodeError as exc:
            raise VerificationError("malformed", str(exc)) from exc
        _ps.ps_ver_present_proof(pk, disclosed, proof, ctx)

    def formula_size(self, n_attributes, n_disclosed):
        return _ps.proof_size(n_attributes - n_disclosed)

    def secret_to_bytes(self, secret):
        return b"".join(scalar_to_bytes(v) for v in (secret.x, *secret.y))

    def secret_from_bytes(self, data, keys):
        if len(data) % SCALAR_SIZE or len(data) < 2 * SCALAR_SIZE:
            raise DecodeError("PS secret key has the wrong length")
        vals = [scalar_from_bytes(data[i:i + SCALAR_SIZE]) for i in range(0, len(data), SCALAR_SIZE)]
        return _ps.PsSecretKey(vals[0], tuple(vals[1:]))


class ClMechanism(_SdsigMechanism):
    name = CL

    def __init__(self, params: _cl.ClParams = _cl.DEFAULT_PARAMS):
        self.params = params

    def keygen(self, m, rng=None, group: RsaGroupParams | None = None, **options):
        """``group`` reuses an existing RSA group with at least ``m + 2`` generators."""
        if options:
            raise InvalidArgument(f"unexpected options {sorted(options)}")
        if group is None:
            sk, pk = _cl.cl_keygen(m, self.params, rng)
        else:
            sk, pk = _cl.keys_from_group(group, m, self.params)
        return IssuerKeys(self.name, m, pk.to_bytes(), (sk, pk))

    def _pk(self, header: Header, public_key: bytes) -> _cl.ClPublicKey:
        try:
            pk = _cl.ClPublicKey.from_bytes(public_key, self.params)
        except DecodeError as exc:
            raise VerificationError("malformed", str(exc)) from exc
        if pk.m != header.n_attributes:
            raise VerificationError("malformed", "key arity differs from attribute count")
        return pk

    def sign(self, keys, attributes, rng=None):
        sk, pk = keys.secret
        return None, None, _cl.cl_sign(sk, pk, self._encode(attributes), rng).to_bytes(self.params)

    def _signature(self, credential) -> _cl.ClSignature:
        try:
            return _cl.ClSignature.from_bytes(credential.signature, self.params)
        except DecodeError as exc:
            raise VerificationError("malformed", str(exc)) from exc

    def _verify_signature(self, credential, public_key):
        pk = self._pk(credential.header, public_key)
        _cl.cl_verify(pk, self._encode(credential.attributes), self._signature(credential))

    def _holder_proof(self, credential, public_key, indices, ctx, rng):
        pk = self._pk(credential.header, public_key)
        proof = _cl.cl_gen_holder_proof(
            pk, self._encode(credential.attributes), self._signature(credential), indices, ctx, rng, check=False
        )
        return proof.to_bytes(self.params)

    def _verify_holder_proof(self, p, public_key, disclosed, ctx):
        pk = self._pk(p.header, public_key)
        try:
            proof = _cl.ClHolderProof.from_bytes(p.holder_proof, self.params)
        except DecodeError as exc:
            raise VerificationError("malformed", str(exc)) from exc
        _cl.cl_ver_present_proof(pk, disclosed, proof, ctx)

    def formula_size(self, n_attributes, n_disclosed):
        return self.params.proof_size(n_attributes - n_disclosed)

    def secret_to_bytes(self, secret):
        sk, _ = secret
        w = self.params.n_bytes // 2
        return sk.p.to_bytes(w, "big") + sk.q.to_bytes(w, "big")

    def secret_from_bytes(self, data, keys):
        w = self.params.n_bytes // 2
        if len(data) != 2 * w:
            raise DecodeError("CL secret key has the wrong length")
        sk = _cl.ClSecretKey(int.from_bytes(data[:w], "big"), int.from_bytes(data[w:], "big"))
        pk = _cl.ClPublicKey.from_bytes(keys.public_key, self.params)
        if sk.p * sk.q != pk.n:
            raise DecodeError("CL secret key does not factor the modulus")
        return sk, pk


class Registry:
    """Immutable mapping from mechanism tag to implementation."""

    def __init__(self, mechanisms: Iterable[Mechanism]):
        self._by_name = MappingProxyType({m.name: m for m in mechanisms})

    def __getitem__(self, name: str) -> Mechanism:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownMechanism(f"unknown mechanism {name!r}") from None

    def __contains__(self, name) -> bool:
        return name in self._by_name

    def names(self) -> tuple[str, ...]:
        return tuple(self._by_name)


DEFAULT_REGISTRY = Registry([
    CmtListMechanism(),
    MerTreeMechanism(),
    ClMechanism(),
    BbsMechanism(BBS),
    BbsMechanism(BBS_PLUS),
    PsMechanism(),
])


def get_mechanism(name: str, registry: Registry = DEFAULT_REGISTRY) -> Mechanism:
    return registry[name]


# ---------------------------------------------------------------------------
# lifecycle


def keygen(mechanism: str, n_attributes: int, rng=None, registry: Registry = DEFAULT_REGISTRY, **options) -> IssuerKeys:
    return registry[mechanism].keygen(n_attributes, rng, **options)


def issue(
    mechanism: str,
    keys: IssuerKeys,
    attributes: Iterable[bytes],
    rng=None,
    key_ref: str | None = None,
    registry: Registry = DEFAULT_REGISTRY,
) -> Credential:
    mech = registry[mechanism]
    if keys.mechanism != mechanism:
        raise InvalidArgument(f"keys belong to {keys.mechanism!r}, not {mechanism!r}")
    if keys.secret is None:
        raise InvalidArgument("issuing needs the secret key")
    attributes = tuple(bytes(a) for a in attributes)
    if len(attributes) != keys.n_attributes:
        raise InvalidArgument(f"expected {keys.n_attributes} attributes, got {len(attributes)}")
    salts, commitment, signature = mech.sign(keys, attributes, rng)
    return Credential(keys.header(key_ref), attributes, salts, commitment, signature)


def _resolve_key(header: Header, issuer_key: bytes | None) -> bytes:
    if issuer_key is not None:
        if header.issuer_key is not None and header.issuer_key != issuer_key:
            raise VerificationError("untrusted-issuer", "embedded key differs from the supplied one")
        return issuer_key
    if header.issuer_key is None:
        raise VerificationError("untrusted-issuer", f"key reference {header.key_ref!r} needs an explicit key")
    return header.issuer_key


def _check_header(header: Header, registry: Registry) -> Mechanism:
    mech = registry[header.mechanism]
    if header.n_attributes < 1:
        raise VerificationError("malformed", "attribute count must be positive")
    if (header.issuer_key is None) == (header.key_ref is None):
        raise VerificationError("malformed", "header carries exactly one of issuer_key and key_ref")
    return mech


def verify_credential(credential: Credential, issuer_key: bytes | None = None, registry: Registry = DEFAULT_REGISTRY) -> None:
    """Raise :class:`VerificationError` unless the credential verifies.

    ``issuer_key`` is required when the header only references the key.
    """
    mech = _check_header(credential.header, registry)
    if len(credential.attributes) != credential.header.n_attributes:
        raise VerificationError("malformed", "attribute count differs from header")
    mech.verify(credential, _resolve_key(credential.header, issuer_key))


def present(
    credential: Credential,
    disclosed: Iterable[int],
    rng=None,
    issuer_key: bytes | None = None,
    registry: Registry = DEFAULT_REGISTRY,
) -> Presentation:
    """Derive a presentation revealing the 1-based ``disclosed`` indices.

    The credential is verified first, so proof generation itself never checks
    the signature again.
    """
    indices = sorted(set(disclosed))
    m = credential.header.n_attributes
    if any(not isinstance(i, int) or not 1 <= i <= m for i in indices):
        raise InvalidArgument(f"disclosed indices must lie in 1..{m}")
    verify_credential(credential, issuer_key, registry)
    key = _resolve_key(credential.header, issuer_key)
    return registry[credential.header.mechanism].prove(credential, key, indices, rng)


def _trusted_key(header: Header, trusted: Mapping[str, bytes] | Iterable[bytes]) -> bytes:
    if isinstance(trusted, Mapping):
        if header.key_ref is not None:
            if header.key_ref not in trusted:
                raise VerificationError("untrusted-issuer", f"unknown key reference {header.key_ref!r}")
            return bytes(trusted[header.key_ref])
        values = set(map(bytes, trusted.values()))
    else:
        if header.key_ref is not None:
            raise VerificationError("untrusted-issuer", "key references need a reference map")
        values = set(map(bytes, trusted))
    if header.issuer_key not in values:
        raise VerificationError("untrusted-issuer")
    return header.issuer_key


def verify_presentation(
    presentation: Presentation,
    trusted_issuer_keys: Mapping[str, bytes] | Iterable[bytes],
    registry: Registry = DEFAULT_REGISTRY,
) -> dict[int, bytes]:
    """Verify and return the disclosed ``{index: attribute}`` map.

    ``trusted_issuer_keys`` is either a set of public key encodings or a map
    from key reference to encoding.
    """
    mech = _check_header(presentation.header, registry)
    idx = [i for i, _ in presentation.disclosed]
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise VerificationError("malformed", "disclosed indices must be strictly increasing")
    if idx and not 1 <= idx[0] <= idx[-1] <= presentation.header.n_attributes:
        raise VerificationError("malformed", "disclosed index out of range")
    key = _trusted_key(presentation.header, trusted_issuer_keys)
    mech.verify_proof(presentation, key)
    return presentation.disclosed_map()


# ---------------------------------------------------------------------------
# canonical JSON


def b64e(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def b64d(text: Any) -> bytes:
    if not isinstance(text, str) or "=" in text:
        raise DecodeError("expected unpadded base64url text")
    try:
        data = base64.urlsafe_b64decode(text + "=" * (-len(text) % 4))
    except (ValueError, TypeError) as exc:
        raise DecodeError("invalid base64url") from exc
    if b64e(data) != text:
        raise DecodeError("non-canonical base64url")
    return data


def _dumps(obj) -> bytes:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=True, allow_nan=False).encode("ascii")


def _expect_keys(obj: Any, required: set[str], optional: set[str] = frozenset()) -> None:
    if not isinstance(obj, dict):
        raise DecodeError("expected a JSON object")
    keys = set(obj)
    if not required <= keys:
        raise DecodeError(f"missing fields {sorted(required - keys)}")
    if keys - required - optional:
        raise DecodeError(f"unknown fields {sorted(keys - required - optional)}")


def _str(v) -> str:
    if not isinstance(v, str):
        raise DecodeError("expected a string")
    return v


def _int(v) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise DecodeError("expected an integer")
    return v


def _list(v) -> list:
    if not isinstance(v, list):
        raise DecodeError("expected a list")
    return v


def encode(obj: Credential | Presentation) -> bytes:
    """Canonical JSON: fixed key order, no whitespace, unpadded base64url."""
    if isinstance(obj, Credential):
        payloads: dict[str, Any] = {"attributes": [b64e(a) for a in obj.attributes]}
        if obj.salts is not None:
            payloads["salts"] = [b64e(s) for s in obj.salts]
        proof: dict[str, Any] = {}
        if obj.commitment is not None:
            proof["commitment"] = b64e(obj.commitment)
        proof["signature"] = b64e(obj.signature)
        doc = {"header": obj.header.to_json(VC), "payloads": payloads, "proof": proof}
    elif isinstance(obj, Presentation):
        payloads = {"disclosed": [{"index": i, "value": b64e(v)} for i, v in obj.disclosed]}
        if obj.salts is not None:
            payloads["salts"] = [b64e(s) for s in obj.salts]
        proof = {}
        if obj.commitment is not None:
            proof["commitment"] = b64e(obj.commitment)
        if obj.signature is not None:
            proof["signature"] = b64e(obj.signature)
        proof["holder_proof"] = b64e(obj.holder_proof)
        doc = {"header": obj.header.to_json(VP), "payloads": payloads, "proof": proof}
    else:
        raise InvalidArgument("expected a Credential or a Presentation")
    return _dumps(doc)


def decode(data: bytes | str) -> Credential | Presentation:
    try:
        doc = json.loads(data)
    except (ValueError, TypeError, RecursionError) as exc:
        raise DecodeError(f"malformed JSON: {exc}") from exc
    _expect_keys(doc, {"header", "payloads", "proof"})
    if not isinstance(doc["header"], dict):
        raise DecodeError("header must be an object")
    typ = doc["header"].get("typ")
    if typ == VC:
        header = Header.from_json(doc["header"], VC)
        _expect_keys(doc["payloads"], {"attributes"}, {"salts"})
        _expect_keys(doc["proof"], {"signature"}, {"commitment"})
        pl, pr = doc["payloads"], doc["proof"]
        return Credential(
            header,
            tuple(b64d(a) for a in _list(pl["attributes"])),
            tuple(b64d(s) for s in _list(pl["salts"])) if "salts" in pl else None,
            b64d(pr["commitment"]) if "commitment" in pr else None,
            b64d(pr["signature"]),
        )
    if typ == VP:
        header = Header.from_json(doc["header"], VP)
        _expect_keys(doc["payloads"], {"disclosed"}, {"salts"})
        _expect_keys(doc["proof"], {"holder_proof"}, {"commitment", "signature"})
        pl, pr = doc["payloads"], doc["proof"]
        disclosed = []
        for item in _list(pl["disclosed"]):
            _expect_keys(item, {"index", "value"})
            disclosed.append((_int(item["index"]), b64d(item["value"])))
        return Presentation(
            header,
            tuple(disclosed),
            tuple(b64d(s) for s in _list(pl["salts"])) if "salts" in pl else None,
            b64d(pr["commitment"]) if "commitment" in pr else None,
            b64d(pr["signature"]) if "signature" in pr else None,
            b64d(pr["holder_proof"]),
        )
    raise DecodeError(f"unknown container type {typ!r}")


# ---------------------------------------------------------------------------
# key files

ISSUER_SECRET = "issuer-secret"
ISSUER_PUBLIC = "issuer-public"


def encode_keys(keys: IssuerKeys, role: str = ISSUER_SECRET, registry: Registry = DEFAULT_REGISTRY) -> bytes:
    """Key file ``{mechanism, role, fields}``; the public role omits the secret."""
    if role not in (ISSUER_SECRET, ISSUER_PUBLIC):
        raise InvalidArgument(f"unknown key role {role!r}")
    fields: dict[str, Any] = {"n_attributes": keys.n_attributes, "public_key": b64e(keys.public_key)}
    if keys.seed is not None:
        fields["seed"] = b64e(keys.seed)
    if keys.signature_alg is not None:
        fields["signature_alg"] = keys.signature_alg
    if keys.group_swap:
        fields["group_swap"] = True
    if role == ISSUER_SECRET:
        if keys.secret is None:
            raise InvalidArgument("no secret key to export")
        fields["secret"] = b64e(registry[keys.mechanism].secret_to_bytes(keys.secret))
    return _dumps({"mechanism": keys.mechanism, "role": role, "fields": fields})


def decode_keys(data: bytes | str, registry: Registry = DEFAULT_REGISTRY) -> tuple[str, IssuerKeys]:
    """Return ``(role, keys)``; ``keys.secret`` is ``None`` for public files."""
    try:
        doc = json.loads(data)
    except (ValueError, TypeError) as exc:
        raise DecodeError(f"malformed JSON: {exc}") from exc
    _expect_keys(doc, {"mechanism", "role", "fields"})
    role = doc["role"]
    if role not in (ISSUER_SECRET, ISSUER_PUBLIC):
        raise DecodeError(f"unknown key role {role!r}")
    mech = registry[_str(doc["mechanism"])]
    f = doc["fields"]
    _expect_keys(
        f, {"n_attributes", "public_key"} | ({"secret"} if role == ISSUER_SECRET else set()),
        {"seed", "signature_alg", "group_swap"},
    )
    keys = IssuerKeys(
        mechanism=mech.name,
        n_attributes=_int(f["n_attributes"]),
        public_key=b64d(f["public_key"]),
        seed=b64d(f["seed"]) if "seed" in f else None,
        signature_alg=_str(f["signature_alg"]) if "signature_alg" in f else None,
        group_swap=f.get("group_swap") is True,
    )
    if role == ISSUER_SECRET:
        keys = replace(keys, secret=mech.secret_from_bytes(b64d(f["secret"]), keys))
    return role, keys
