"""Proof-size and timing benchmarks emitting CSV rows.

Sizes are exact and reproducible.  Timings are wall-clock medians from a
monotonic clock, single-threaded, with the first five iterations discarded.
"""
from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import astuple, dataclass
from typing import Callable, Iterable

from . import credential as C
from .algebra import DEFAULT_RNG, RsaGroupParams, gen_rsa_group
from .errors import InvalidArgument

DEFAULT_ATTRIBUTE_COUNTS = (4, 8, 16, 33)
WARMUP = 5
MIN_ITERATIONS = 30

KEYGEN = "keyGen"
GEN_SIG = "genSig"
VER_SIG = "verSig"
GEN_HOLDER_PROOF = "genHolderProof"
VER_PRESENT_PROOF = "verPresentProof"
OPERATIONS = (KEYGEN, GEN_SIG, VER_SIG, GEN_HOLDER_PROOF, VER_PRESENT_PROOF)

SIZE_COLUMNS = ("mechanism", "n_attributes", "n_disclosed", "proof_bytes", "formula_bytes", "pk_bytes")
TIMING_COLUMNS = ("mechanism", "op", "n_attributes", "n_disclosed", "median_ns", "iters")


@dataclass(frozen=True)
class SizeReport:
    mechanism: str
    n_attributes: int
    n_disclosed: int
    proof_bytes: int
    formula_bytes: int
    pk_bytes: int

    @property
    def matches(self) -> bool:
        """Equality for exact formulas, at most the bound for merTree."""
        if C.get_mechanism(self.mechanism).formula_is_bound:
            return self.proof_bytes <= self.formula_bytes
        return self.proof_bytes == self.formula_bytes


@dataclass(frozen=True)
class TimingReport:
    mechanism: str
    op: str
    n_attributes: int
    n_disclosed: int
    median_ns: int
    iters: int


def sample_attributes(n: int, rng=None) -> list[bytes]:
    rng = rng or DEFAULT_RNG
    return [f"attribute-{i}-{rng.getrandbits(32):08x}".encode() for i in range(1, n + 1)]


class KeyCache:
    """Issuer keys per (mechanism, n_A); CL keys share one RSA group."""

    def __init__(self, rng=None, cl_group: RsaGroupParams | None = None, max_attributes: int = 33):
        self.rng = rng or DEFAULT_RNG
        self._cl_group = cl_group
        self._max = max_attributes
        self._keys: dict[tuple[str, int], C.IssuerKeys] = {}

    def cl_group(self, m: int) -> RsaGroupParams:
        if self._cl_group is None or len(self._cl_group.generators) < m + 2:
            self._cl_group = gen_rsa_group(3072, max(m, self._max) + 2, self.rng)
        return self._cl_group

    def get(self, mechanism: str, m: int) -> C.IssuerKeys:
        key = (mechanism, m)
        if key not in self._keys:
            options = {"group": self.cl_group(m)} if mechanism == C.CL else {}
            self._keys[key] = C.keygen(mechanism, m, self.rng, **options)
        return self._keys[key]


def bench_size(
    mechanisms: Iterable[str] = C.MECHANISMS,
    attribute_counts: Iterable[int] = DEFAULT_ATTRIBUTE_COUNTS,
    rng=None,
    keys: KeyCache | None = None,
    disclosed_counts: Iterable[int] | None = None,
) -> list[SizeReport]:
    """Issue, present and verify real credentials; report proof sizes.

    ``disclosed_counts`` defaults to every ``n_D`` in ``1..n_A``.  Disclosed
    positions are drawn at random; sizes depend only on their count.
    """
    rng = rng or DEFAULT_RNG
    keys = keys or KeyCache(rng)
    rows = []
    for mech_name in mechanisms:
        mech = C.get_mechanism(mech_name)
        for n_a in attribute_counts:
            k = keys.get(mech_name, n_a)
            cred = C.issue(mech_name, k, sample_attributes(n_a, rng), rng)
            for n_d in disclosed_counts if disclosed_counts is not None else range(1, n_a + 1):
                if not 0 <= n_d <= n_a:
                    continue
                indices = rng.sample(range(1, n_a + 1), n_d)
                pres = C.present(cred, indices, rng)
                C.verify_presentation(C.decode(C.encode(pres)), [k.public_key])
                rows.append(SizeReport(
                    mech_name, n_a, n_d, C.proof_bytes(pres), mech.formula_size(n_a, n_d), len(k.public_key)
                ))
    return rows


def _median_ns(fn: Callable[[int], object], iterations: int) -> int:
    samples = []
    for i in range(WARMUP + iterations):
        start = time.perf_counter_ns()
        fn(i)
        elapsed = time.perf_counter_ns() - start
        if i >= WARMUP:
            samples.append(elapsed)
    return int(statistics.median(samples))


def bench_speed(
    mechanisms: Iterable[str] = C.MECHANISMS,
    attribute_counts: Iterable[int] = DEFAULT_ATTRIBUTE_COUNTS,
    iterations: int = MIN_ITERATIONS,
    rng=None,
    keys: KeyCache | None = None,
    disclosed_counts: Iterable[int] | None = None,
    operations: Iterable[str] = OPERATIONS,
) -> list[TimingReport]:
    """Median wall-clock time per operation.

    ``genHolderProof`` covers proof derivation from an already verified
    credential, serialization included.  ``verPresentProof`` starts from the
    encoded presentation: decoding, key lookup and proof verification.
    ``disclosed_counts`` defaults to ``n_A // 3`` per attribute count.
    """
    if iterations < MIN_ITERATIONS:
        raise InvalidArgument(f"at least {MIN_ITERATIONS} iterations are required")
    operations = tuple(operations)
    if set(operations) - set(OPERATIONS):
        raise InvalidArgument(f"unknown operations {sorted(set(operations) - set(OPERATIONS))}")
    rng = rng or DEFAULT_RNG
    keys = keys or KeyCache(rng)
    rows = []
    for mech_name in mechanisms:
        mech = C.get_mechanism(mech_name)
        for n_a in attribute_counts:
            k = keys.get(mech_name, n_a)
            attrs = sample_attributes(n_a, rng)
            cred = C.issue(mech_name, k, attrs, rng)

            def record(op, n_d, fn):
                rows.append(TimingReport(mech_name, op, n_a, n_d, _median_ns(fn, iterations), iterations))

            if KEYGEN in operations:
                options = {"group": keys.cl_group(n_a)} if mech_name == C.CL else {}
                record(KEYGEN, 0, lambda _: C.keygen(mech_name, n_a, rng, **options))
            if GEN_SIG in operations:
                record(GEN_SIG, 0, lambda _: C.issue(mech_name, k, attrs, rng))
            if VER_SIG in operations:
                record(VER_SIG, 0, lambda _: C.verify_credential(cred))
            counts = disclosed_counts if disclosed_counts is not None else [n_a // 3]
            for n_d in counts:
                if not 0 <= n_d <= n_a:
                    continue
                indices = sorted(rng.sample(range(1, n_a + 1), n_d))
                if GEN_HOLDER_PROOF in operations:
                    record(GEN_HOLDER_PROOF, n_d, lambda _: C.encode(mech.prove(cred, k.public_key, indices, rng)))
                if VER_PRESENT_PROOF in operations:
                    encoded = C.encode(C.present(cred, indices, rng))
                    trusted = [k.public_key]
                    record(VER_PRESENT_PROOF, n_d, lambda _: C.verify_presentation(C.decode(encoded), trusted))
    return rows


def to_csv(rows: Iterable[SizeReport | TimingReport], columns: tuple[str, ...]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(astuple(row))
    return out.getvalue()
