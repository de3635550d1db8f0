"""Hash-and-salt commitments, commitment lists, Merkle trees and HashWire.

All hashing is SHA-256.  Salts are 16 bytes and are appended to the attribute
bytes without a separator; the fixed salt width keeps ``attribute || salt``
unambiguous.
"""
from __future__ import annotations

import hashlib
import hmac
import math
import secrets
from dataclasses import dataclass

from .errors import InvalidArgument, ThresholdExceedsValue

SALT_SIZE = 16
DIGEST_SIZE = 32
#: Upper bound on HashWire chain length, bounding verification cost.
HASHWIRE_MAX_ITERATIONS = 1 << 16


def H(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def _salt(rng=None) -> bytes:
    if rng is None:
        return secrets.token_bytes(SALT_SIZE)
    return rng.getrandbits(8 * SALT_SIZE).to_bytes(SALT_SIZE, "big")


@dataclass(frozen=True)
class SaltedCommitment:
    digest: bytes
    salt: bytes

    def opens_to(self, attribute: bytes) -> bool:
        return hmac.compare_digest(H(attribute + self.salt), self.digest)


def commit_salted(attribute: bytes, rng=None, salt: bytes | None = None) -> SaltedCommitment:
    salt = _salt(rng) if salt is None else salt
    if len(salt) != SALT_SIZE:
        raise InvalidArgument(f"salt must be {SALT_SIZE} bytes")
    return SaltedCommitment(H(attribute + salt), salt)


def generate_salts(count: int, rng=None) -> list[bytes]:
    return [_salt(rng) for _ in range(count)]


# ---------------------------------------------------------------------------
# commitment list


@dataclass(frozen=True)
class CommitmentList:
    entries: tuple[bytes, ...]

    def to_bytes(self) -> bytes:
        return b"".join(self.entries)

    @classmethod
    def from_bytes(cls, data: bytes) -> CommitmentList:
        if not data or len(data) % DIGEST_SIZE:
            raise InvalidArgument("commitment list must be a non-empty multiple of 32 bytes")
        return cls(tuple(data[i:i + DIGEST_SIZE] for i in range(0, len(data), DIGEST_SIZE)))

    def __len__(self) -> int:
        return len(self.entries)


def build_commitment_list(attributes: list[bytes], salts: list[bytes]) -> CommitmentList:
    if not attributes or len(attributes) != len(salts):
        raise InvalidArgument("attributes and salts must be non-empty and of equal length")
    return CommitmentList(tuple(H(a + s) for a, s in zip(attributes, salts)))


def verify_list_opening(commitments: CommitmentList, index: int, attribute: bytes, salt: bytes) -> bool:
    """Check that ``(attribute, salt)`` opens entry ``index`` (1-based)."""
    if not 1 <= index <= len(commitments):
        raise InvalidArgument(f"index {index} outside 1..{len(commitments)}")
    return hmac.compare_digest(H(attribute + salt), commitments.entries[index - 1])


# ---------------------------------------------------------------------------
# Merkle tree


@dataclass(frozen=True)
class MerkleCommitment:
    root: bytes
    leaf_count: int


@dataclass(frozen=True)
class InclusionPath:
    """Siblings from the leaf level upward; promoted levels contribute none."""

    index: int
    siblings: tuple[bytes, ...]
    leaf_count: int

    def to_bytes(self) -> bytes:
        return self.index.to_bytes(4, "big") + b"".join(self.siblings)


def _levels(leaves: list[bytes]) -> list[list[bytes]]:
    level = [H(leaf) for leaf in leaves]
    levels = [level]
    while len(level) > 1:
        nxt = [H(level[i] + level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
        levels.append(level)
    return levels


def merkle_root(leaves: list[bytes]) -> MerkleCommitment:
    """Root over ``H(leaf)`` digests; an unpaired node moves up unchanged."""
    if not leaves:
        raise InvalidArgument("a Merkle tree needs at least one leaf")
    return MerkleCommitment(_levels(leaves)[-1][0], len(leaves))


def tree_height(leaf_count: int) -> int:
    return math.ceil(math.log2(leaf_count)) if leaf_count > 1 else 0


def path_length(leaf_count: int, index: int) -> int:
    """Number of siblings on the path of the 1-based leaf ``index``."""
    if not 1 <= index <= leaf_count:
        raise InvalidArgument(f"index {index} outside 1..{leaf_count}")
    pos, width, count = index - 1, leaf_count, 0
    while width > 1:
        count += pos ^ 1 < width
        pos //= 2
        width = (width + 1) // 2
    return count


def merkle_path(leaves: list[bytes], index: int) -> InclusionPath:
    """Inclusion path for the 1-based leaf ``index``."""
    if not 1 <= index <= len(leaves):
        raise InvalidArgument(f"index {index} outside 1..{len(leaves)}")
    pos = index - 1
    siblings = []
    for level in _levels(leaves)[:-1]:
        sib = pos ^ 1
        if sib < len(level):
            siblings.append(level[sib])
        pos //= 2
    return InclusionPath(index, tuple(siblings), len(leaves))


def merkle_verify(root: bytes, leaf: bytes, path: InclusionPath) -> bool:
    m = path.leaf_count
    if m < 1 or not 1 <= path.index <= m or len(path.siblings) > tree_height(m):
        return False
    node = H(leaf)
    pos, width = path.index - 1, m
    remaining = list(path.siblings)
    while width > 1:
        if pos ^ 1 < width:
            if not remaining:
                return False
            sib = remaining.pop(0)
            node = H(node + sib) if pos % 2 == 0 else H(sib + node)
        pos //= 2
        width = (width + 1) // 2
    return not remaining and hmac.compare_digest(node, root)


# ---------------------------------------------------------------------------
# HashWire threshold commitments


@dataclass(frozen=True)
class HashWireCommitment:
    commitment: bytes
    max_iterations: int = HASHWIRE_MAX_ITERATIONS


def hash_chain(data: bytes, times: int) -> bytes:
    for _ in range(times):
        data = H(data)
    return data


def _check_count(k: int) -> None:
    if not 0 <= k <= HASHWIRE_MAX_ITERATIONS:
        raise InvalidArgument(f"iteration count must lie in 0..{HASHWIRE_MAX_ITERATIONS}")


def hashwire_commit(k: int, r: bytes) -> HashWireCommitment:
    """Commit to integer ``k`` as ``H^k(r)``."""
    _check_count(k)
    if len(r) != DIGEST_SIZE:
        raise InvalidArgument("seed must be 32 bytes")
    return HashWireCommitment(hash_chain(r, k))


def hashwire_prove(k: int, t: int, r: bytes) -> bytes:
    """Proof that the committed value is at least ``t``: ``H^(k-t)(r)``."""
    _check_count(k)
    if t < 0:
        raise InvalidArgument("threshold must be non-negative")
    if t > k:
        raise ThresholdExceedsValue(f"threshold {t} exceeds committed value")
    return hash_chain(r, k - t)


def hashwire_verify(commitment: HashWireCommitment | bytes, t: int, proof: bytes) -> bool:
    c = commitment.commitment if isinstance(commitment, HashWireCommitment) else commitment
    if not 0 <= t <= HASHWIRE_MAX_ITERATIONS or len(proof) != DIGEST_SIZE:
        return False
    return hmac.compare_digest(hash_chain(proof, t), c)
