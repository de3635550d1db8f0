"""Command-line front end: ``sdcred keygen|issue|present|verify|bench-size|bench-speed``.

Exit codes: 0 accept, 1 verification reject (reason on stderr), 2 usage,
file or parse errors and unknown mechanisms.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import bench
from . import credential as C
from .errors import SdcredError, VerificationError

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_ERROR = 2


class _UsageError(Exception):
    pass


def _rng(seed):
    # seeded runs are reproducible but not secure
    return random.Random(seed) if seed is not None else None


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str | None, data: bytes | str) -> None:
    if isinstance(data, str):
        data = data.encode()
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise _UsageError(f"cannot write {path}: {exc.strerror}") from exc


def _indices(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise _UsageError(f"bad index list {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise _UsageError(f"bad integer list {text!r}") from exc


def _mechanisms(text: str | None) -> list[str]:
    names = C.MECHANISMS if not text else [t.strip() for t in text.split(",") if t.strip()]
    for n in names:
        C.get_mechanism(n)
    return list(names)


def _load_attributes(path: str) -> list[bytes]:
    """JSON list of strings (UTF-8) or ``{"b64": ...}`` objects."""
    try:
        doc = json.loads(_read(path))
    except ValueError as exc:
        raise _UsageError(f"{path}: malformed JSON") from exc
    if not isinstance(doc, list):
        raise _UsageError(f"{path}: expected a JSON list")
    out = []
    for item in doc:
        if isinstance(item, str):
            out.append(item.encode())
        elif isinstance(item, dict) and set(item) == {"b64"}:
            out.append(C.b64d(item["b64"]))
        else:
            raise _UsageError(f"{path}: attributes are strings or {{\"b64\": ...}} objects")
    return out


def _show(value: bytes) -> str:
    try:
        return json.dumps(value.decode("utf-8"))
    except UnicodeDecodeError:
        return "b64:" + C.b64e(value)


def cmd_keygen(args) -> int:
    options = {"swap": True} if args.swap else {}
    keys = C.keygen(args.mechanism, args.attributes, _rng(args.seed), **options)
    out = Path(args.out)
    _write(str(out), C.encode_keys(keys, C.ISSUER_SECRET))
    pub = out.with_name(out.stem + ".pub" + out.suffix) if args.public_out is None else Path(args.public_out)
    _write(str(pub), C.encode_keys(keys, C.ISSUER_PUBLIC))
    print(f"pk: {len(keys.public_key)} bytes")
    return EXIT_OK


def cmd_issue(args) -> int:
    role, keys = C.decode_keys(_read(args.key))
    if role != C.ISSUER_SECRET:
        raise _UsageError("issuing needs a secret key file")
    if args.mechanism and args.mechanism != keys.mechanism:
        raise _UsageError(f"key file is for {keys.mechanism}, not {args.mechanism}")
    cred = C.issue(keys.mechanism, keys, _load_attributes(args.attributes_file), _rng(args.seed))
    _write(args.out, C.encode(cred))
    return EXIT_OK


def cmd_present(args) -> int:
    cred = C.decode(_read(args.credential))
    if not isinstance(cred, C.Credential):
        raise _UsageError("expected a credential")
    pres = C.present(cred, _indices(args.disclose), _rng(args.seed))
    _write(args.out, C.encode(pres))
    return EXIT_OK


def cmd_verify(args) -> int:
    obj = C.decode(_read(args.input))
    trusted = []
    for path in args.trust or []:
        _, keys = C.decode_keys(_read(path))
        trusted.append(keys.public_key)
    if isinstance(obj, C.Credential):
        key = trusted[0] if trusted else None
        C.verify_credential(obj, key)
        print("credential: accept")
        return EXIT_OK
    if not trusted:
        raise _UsageError("verifying a presentation needs at least one --trust key file")
    disclosed = C.verify_presentation(obj, trusted)
    for i, v in sorted(disclosed.items()):
        print(f"{i}: {_show(v)}")
    return EXIT_OK


def cmd_bench_size(args) -> int:
    rng = _rng(args.seed)
    rows = bench.bench_size(_mechanisms(args.mechanism), _int_list(args.attributes), rng)
    _write(args.out, bench.to_csv(rows, bench.SIZE_COLUMNS))
    return EXIT_OK


def cmd_bench_speed(args) -> int:
    rng = _rng(args.seed)
    counts = _int_list(args.disclose) if args.disclose else None
    ops = args.ops.split(",") if args.ops else bench.OPERATIONS
    rows = bench.bench_speed(
        _mechanisms(args.mechanism), _int_list(args.attributes), args.iterations, rng,
        disclosed_counts=counts, operations=ops,
    )
    _write(args.out, bench.to_csv(rows, bench.TIMING_COLUMNS))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdcred", description="Selective-disclosure credentials")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate issuer keys")
    p.add_argument("--mechanism", required=True, help=", ".join(C.MECHANISMS))
    p.add_argument("--attributes", type=int, required=True, help="number of attributes")
    p.add_argument("--out", required=True, help="secret key file; the public file gets a .pub infix")
    p.add_argument("--public-out", help="public key file path")
    p.add_argument("--swap", action="store_true", help="PS only: keys in G2, signatures in G1")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("issue", help="issue a credential")
    p.add_argument("--key", required=True, help="issuer secret key file")
    p.add_argument("--attributes-file", required=True, help="JSON list of attribute strings")
    p.add_argument("--mechanism")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_issue)

    p = sub.add_parser("present", help="derive a presentation")
    p.add_argument("--credential", required=True)
    p.add_argument("--disclose", default="", help="comma-separated 1-based indices")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_present)

    p = sub.add_parser("verify", help="verify a credential or presentation")
    p.add_argument("input")
    p.add_argument("--trust", action="append", help="trusted issuer key file (repeatable)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench-size", help="proof-size CSV")
    p.add_argument("--mechanism", help="comma-separated mechanisms (default all)")
    p.add_argument("--attributes", default="4,8,16,33")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_bench_size)

    p = sub.add_parser("bench-speed", help="timing CSV")
    p.add_argument("--mechanism", help="comma-separated mechanisms (default all)")
    p.add_argument("--attributes", default="33")
    p.add_argument("--disclose", help="comma-separated disclosed counts (default n_A // 3)")
    p.add_argument("--iterations", type=int, default=bench.MIN_ITERATIONS)
    p.add_argument("--ops", help="comma-separated operations (default all)")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_bench_speed)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args)
    except VerificationError as exc:
        print(f"reject: {exc.reason}" + (f" ({exc.detail})" if exc.detail else ""), file=sys.stderr)
        return EXIT_REJECT
    except (_UsageError, SdcredError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
