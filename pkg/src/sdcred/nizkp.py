"""Fiat-Shamir NIZK proofs of knowledge for linear relations in G1 or G2.

A relation states ``y = sum(w_i * g_i)`` for public bases ``g_i`` and a
statement ``y``.  Several relations can be proven together under a single
challenge ``c = H(context || T_1 || ... || T_k)``; relations may share witnesses
by pointing bases at the same witness slot.

Two transcript forms are supported:

* ``T`` form carries the commitments ``T_j`` and lets the verifier check every
  relation individually, localizing failures.
* ``c`` form carries only the challenge; the verifier rebuilds ``T_j`` from the
  responses and recomputes the hash.  It is smaller whenever a group element
  encodes to more bytes than a scalar.
"""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import (
    ORDER,
    POINT_SIZE,
    SCALAR_SIZE,
    GroupElement,
    multi_scalar_mul,
    random_scalar,
    scalar_from_bytes,
    scalar_to_bytes,
)
from .errors import DecodeError, InvalidArgument, InvalidWitness, UnverifiableInput, VerificationError

T_FORM = "T"
C_FORM = "c"
_FORM_TAG = {T_FORM: 0x01, C_FORM: 0x02}


@dataclass(frozen=True)
class LinearRelation:
    """``statement = sum(w[slots[i]] * bases[i])``.

    ``slots`` maps each base to a witness slot shared across relations.  When
    every relation in a proof leaves it ``None``, slots are numbered
    consecutively relation after relation.
    """

    bases: tuple[GroupElement, ...]
    statement: GroupElement
    slots: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "bases", tuple(self.bases))
        if self.slots is not None:
            object.__setattr__(self, "slots", tuple(self.slots))
        if not self.bases:
            raise InvalidArgument("relation needs at least one base")
        group = self.statement.group
        if any(b.group != group for b in self.bases):
            raise InvalidArgument("bases and statement must share a group")
        if self.slots is not None and len(self.slots) != len(self.bases):
            raise InvalidArgument("one slot per base is required")

    @property
    def group(self) -> str:
        return self.statement.group

    @property
    def arity(self) -> int:
        return len(self.bases)

    def encode(self) -> bytes:
        return b"".join(b.to_bytes() for b in self.bases) + self.statement.to_bytes()


@dataclass(frozen=True)
class ChallengeContext:
    """Public data bound into the Fiat-Shamir challenge.

    Serialized as length-prefixed parts: the mechanism tag, caller-supplied
    parts (keys, disclosed indices) and the SHA-256 digest of the disclosed
    payload.  Relation bases and statements are appended by the prover and
    verifier themselves.
    """

    mechanism: str
    parts: tuple[bytes, ...] = ()
    disclosed_digest: bytes = field(default=hashlib.sha256(b"").digest())

    @classmethod
    def create(cls, mechanism: str, parts: Sequence[bytes] = (), disclosed: bytes = b"") -> ChallengeContext:
        return cls(mechanism, tuple(bytes(p) for p in parts), hashlib.sha256(disclosed).digest())

    def with_parts(self, *parts: bytes) -> ChallengeContext:
        return ChallengeContext(self.mechanism, self.parts + tuple(bytes(p) for p in parts), self.disclosed_digest)

    def to_bytes(self) -> bytes:
        chunks = [self.mechanism.encode(), *self.parts, self.disclosed_digest]
        return b"".join(length_prefix(c) for c in chunks)


@dataclass(frozen=True)
class LinearRelationTranscript:
    form: str
    responses: tuple[int, ...]
    commitments: tuple[GroupElement, ...] | None = None
    challenge: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "responses", tuple(self.responses))
        if self.form == T_FORM:
            if self.commitments is None or self.challenge is not None:
                raise InvalidArgument("T-form transcript carries commitments only")
            object.__setattr__(self, "commitments", tuple(self.commitments))
        elif self.form == C_FORM:
            if self.challenge is None or self.commitments is not None:
                raise InvalidArgument("c-form transcript carries the challenge only")
        else:
            raise InvalidArgument(f"unknown transcript form {self.form!r}")

    def body_bytes(self) -> bytes:
        """Commitments (or challenge) followed by responses, no header."""
        if self.form == T_FORM:
            head = b"".join(t.to_bytes() for t in self.commitments)
        else:
            head = scalar_to_bytes(self.challenge)
        return head + b"".join(scalar_to_bytes(r) for r in self.responses)

    def to_bytes(self) -> bytes:
        """Wire encoding: form tag, relation count, response count, body."""
        count = len(self.commitments) if self.form == T_FORM else 0
        return struct.pack(">BHH", _FORM_TAG[self.form], count, len(self.responses)) + self.body_bytes()

    @classmethod
    def from_bytes(cls, data: bytes, relations: Sequence[LinearRelation]) -> LinearRelationTranscript:
        if len(data) < 5:
            raise DecodeError("transcript too short")
        tag, count, n_resp = struct.unpack(">BHH", data[:5])
        body = data[5:]
        forms = {v: k for k, v in _FORM_TAG.items()}
        if tag not in forms:
            raise DecodeError("unknown transcript form tag")
        form = forms[tag]
        commitments = None
        challenge = None
        pos = 0
        if form == T_FORM:
            if count != len(relations):
                raise DecodeError("relation count mismatch")
            commitments = []
            for rel in relations:
                size = POINT_SIZE[rel.group]
                commitments.append(GroupElement.from_bytes(rel.group, body[pos:pos + size]))
                pos += size
        else:
            if count != 0:
                raise DecodeError("c-form transcript declares commitments")
            challenge = scalar_from_bytes(body[pos:pos + SCALAR_SIZE])
            pos += SCALAR_SIZE
        if len(body) - pos != n_resp * SCALAR_SIZE:
            raise DecodeError("response section has the wrong length")
        responses = [
            scalar_from_bytes(body[pos + i * SCALAR_SIZE: pos + (i + 1) * SCALAR_SIZE])
            for i in range(n_resp)
        ]
        return cls(form, tuple(responses), tuple(commitments) if commitments else None, challenge)


def length_prefix(data: bytes) -> bytes:
    return struct.pack(">I", len(data)) + data


def slot_layout(relations: Sequence[LinearRelation]) -> tuple[list[tuple[int, ...]], int]:
    """Return the witness slot of every base and the number of slots."""
    if not relations:
        raise InvalidArgument("at least one relation is required")
    explicit = [r.slots is not None for r in relations]
    if all(explicit):
        layout = [r.slots for r in relations]
        used = sorted({s for slots in layout for s in slots})
        if used != list(range(len(used))):
            raise InvalidArgument("witness slots must be numbered 0..k-1")
        return layout, len(used)
    if any(explicit):
        raise InvalidArgument("either every relation names its slots or none does")
    layout, offset = [], 0
    for r in relations:
        layout.append(tuple(range(offset, offset + r.arity)))
        offset += r.arity
    return layout, offset


def _challenge(context: ChallengeContext, relations: Sequence[LinearRelation], commitments: Sequence[GroupElement]) -> int:
    h = hashlib.sha256()
    h.update(length_prefix(context.to_bytes()))
    for rel in relations:
        h.update(length_prefix(rel.encode()))
    for t in commitments:
        h.update(length_prefix(t.to_bytes()))
    return int.from_bytes(h.digest(), "big") % ORDER


def _reconstruct(rel: LinearRelation, slots: tuple[int, ...], responses: Sequence[int], c: int) -> GroupElement:
    # T = sum(r_i g_i) - c y
    return multi_scalar_mul(
        list(rel.bases) + [rel.statement],
        [responses[s] for s in slots] + [(-c) % ORDER],
    )


def prove_linear(
    relations: Sequence[tuple[LinearRelation, Sequence[int]]],
    context: ChallengeContext,
    form: str = T_FORM,
    rng=None,
    check_witness: bool = True,
) -> LinearRelationTranscript:
    """Prove knowledge of witnesses for every relation under one challenge.

    ``relations`` pairs each relation with its witness vector (one scalar per
    base).  Bases that share a slot must receive equal witness values.
    """
    if form not in _FORM_TAG:
        raise InvalidArgument(f"unknown transcript form {form!r}")
    rels = [r for r, _ in relations]
    layout, k = slot_layout(rels)
    witness: list[int | None] = [None] * k
    for (rel, w), slots in zip(relations, layout):
        if len(w) != rel.arity:
            raise InvalidArgument("witness length differs from relation arity")
        for s, value in zip(slots, w):
            value %= ORDER
            if witness[s] is not None and witness[s] != value:
                raise InvalidWitness("shared witness slot receives different values")
            witness[s] = value
        if check_witness and multi_scalar_mul(list(rel.bases), list(w)) != rel.statement:
            raise InvalidWitness("witness does not satisfy relation")

    blinds = [random_scalar(rng) for _ in range(k)]
    commitments = [
        multi_scalar_mul(list(rel.bases), [blinds[s] for s in slots])
        for rel, slots in zip(rels, layout)
    ]
    c = _challenge(context, rels, commitments)
    responses = tuple((t + c * w) % ORDER for t, w in zip(blinds, witness))
    if form == T_FORM:
        return LinearRelationTranscript(T_FORM, responses, commitments=tuple(commitments))
    return LinearRelationTranscript(C_FORM, responses, challenge=c)


def verify_linear(
    relations: Sequence[LinearRelation],
    transcript: LinearRelationTranscript,
    context: ChallengeContext,
) -> None:
    """Raise :class:`VerificationError` unless the transcript verifies.

    In T form the failing relation index is reported in the error detail; in
    c form a failure cannot be attributed to any single relation.
    """
    if not relations:
        raise VerificationError("malformed", "no relations")
    layout, k = slot_layout(relations)
    if len(transcript.responses) != k:
        raise VerificationError("malformed", "response count mismatch")
    if any(not 0 <= r < ORDER for r in transcript.responses):
        raise VerificationError("malformed", "response out of field")
    if transcript.form == T_FORM:
        if len(transcript.commitments) != len(relations):
            raise VerificationError("malformed", "relation count mismatch")
        for rel, t in zip(relations, transcript.commitments):
            if t.group != rel.group:
                raise VerificationError("malformed", "commitment in the wrong group")
        c = _challenge(context, relations, transcript.commitments)
        for j, (rel, slots, t) in enumerate(zip(relations, layout, transcript.commitments)):
            if _reconstruct(rel, slots, transcript.responses, c) != t:
                raise VerificationError("proof-equation", f"relation {j} fails")
        return
    c = transcript.challenge
    if not 0 <= c < ORDER:
        raise VerificationError("malformed", "challenge out of field")
    rebuilt = [_reconstruct(rel, slots, transcript.responses, c) for rel, slots in zip(relations, layout)]
    if _challenge(context, relations, rebuilt) != c:
        raise VerificationError("proof-equation", "challenge mismatch")


def convert_form(
    transcript: LinearRelationTranscript,
    relations: Sequence[LinearRelation],
    context: ChallengeContext,
    target: str,
) -> LinearRelationTranscript:
    """Re-encode a verifying transcript in ``target`` form."""
    try:
        verify_linear(relations, transcript, context)
    except VerificationError as exc:
        raise UnverifiableInput(str(exc)) from exc
    if target == transcript.form:
        return transcript
    layout, _ = slot_layout(relations)
    if target == C_FORM:
        c = _challenge(context, relations, transcript.commitments)
        return LinearRelationTranscript(C_FORM, transcript.responses, challenge=c)
    if target == T_FORM:
        commitments = tuple(
            _reconstruct(rel, slots, transcript.responses, transcript.challenge)
            for rel, slots in zip(relations, layout)
        )
        return LinearRelationTranscript(T_FORM, transcript.responses, commitments=commitments)
    raise InvalidArgument(f"unknown transcript form {target!r}")
