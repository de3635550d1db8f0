import csv
import io
import json
import random

import pytest

from sdcred import bench, cli
from sdcred import credential as C
from sdcred.errors import InvalidArgument


def test_size_rows_match_formulas(key_cache):
    rows = bench.bench_size([C.BBS, C.BBS_PLUS, C.PS, C.CMT_LIST, C.MER_TREE], [4, 8], random.Random(3), key_cache)
    assert len(rows) == 5 * (4 + 8)
    assert all(r.matches for r in rows)
    for r in rows:
        if r.mechanism != C.MER_TREE:
            assert r.proof_bytes == r.formula_bytes


def test_size_row_examples(key_cache):
    rows = {(r.mechanism, r.n_disclosed): r for r in bench.bench_size(
        [C.BBS, C.CMT_LIST, C.MER_TREE], [33], random.Random(4), key_cache, disclosed_counts=[10])}
    assert rows[(C.BBS, 10)].proof_bytes == 944 and rows[(C.BBS, 10)].pk_bytes == 96
    assert rows[(C.CMT_LIST, 10)].formula_bytes == 1280 == rows[(C.CMT_LIST, 10)].proof_bytes
    assert rows[(C.MER_TREE, 10)].formula_bytes == 2336
    assert rows[(C.MER_TREE, 10)].proof_bytes <= 2336


def test_size_csv_schema(key_cache):
    rows = bench.bench_size([C.PS], [4], random.Random(5), key_cache, disclosed_counts=[1, 2])
    text = bench.to_csv(rows, bench.SIZE_COLUMNS)
    parsed = list(csv.reader(io.StringIO(text)))
    assert parsed[0] == ["mechanism", "n_attributes", "n_disclosed", "proof_bytes", "formula_bytes", "pk_bytes"]
    assert parsed[1] == ["PS", "4", "1", "416", "416", "288"]


def test_speed_rows(key_cache):
    rows = bench.bench_speed([C.BBS], [4], 30, random.Random(6), key_cache, disclosed_counts=[1],
                             operations=[bench.GEN_SIG, bench.GEN_HOLDER_PROOF])
    assert [(r.op, r.n_disclosed, r.iters) for r in rows] == [("genSig", 0, 30), ("genHolderProof", 1, 30)]
    assert all(r.median_ns > 0 for r in rows)
    header = bench.to_csv(rows, bench.TIMING_COLUMNS).splitlines()[0]
    assert header == "mechanism,op,n_attributes,n_disclosed,median_ns,iters"


def test_speed_needs_thirty_iterations():
    with pytest.raises(InvalidArgument):
        bench.bench_speed([C.BBS], [4], 29)
    with pytest.raises(InvalidArgument):
        bench.bench_speed([C.BBS], [4], 30, operations=["sign"])


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("mech,expected", [("BBS", 96), ("BBS+", 96), ("PS", 1680), ("merTree", 32)])
def test_cli_keygen_prints_pk_size(tmp_path, capsys, mech, expected):
    code, out, _ = run(capsys, "keygen", "--mechanism", mech, "--attributes", 33, "--out", tmp_path / "k.json", "--seed", 1)
    assert code == 0 and out.strip() == f"pk: {expected} bytes"
    assert (tmp_path / "k.pub.json").exists()


def test_cli_flow(tmp_path, capsys):
    (tmp_path / "attrs.json").write_text(json.dumps(["alice", "1990-01-01", "FR", "blue", "42"]))
    k, pub = tmp_path / "k.json", tmp_path / "k.pub.json"
    cred, pres = tmp_path / "cred.json", tmp_path / "pres.json"
    assert run(capsys, "keygen", "--mechanism", "BBS", "--attributes", 5, "--out", k)[0] == 0
    assert run(capsys, "issue", "--key", k, "--attributes-file", tmp_path / "attrs.json", "--out", cred)[0] == 0
    code, out, _ = run(capsys, "verify", cred, "--trust", pub)
    assert code == 0 and out.strip() == "credential: accept"
    assert run(capsys, "present", "--credential", cred, "--disclose", "1,3,5", "--out", pres)[0] == 0
    code, out, _ = run(capsys, "verify", pres, "--trust", pub)
    assert code == 0
    assert out.splitlines() == ['1: "alice"', '3: "FR"', '5: "42"']

    doc = json.loads(pres.read_text())
    doc["payloads"]["disclosed"][1]["value"] = C.b64e(b"DE")
    pres.write_text(json.dumps(doc))
    code, _, err = run(capsys, "verify", pres, "--trust", pub)
    assert code == 1 and err.startswith("reject: proof-equation")


def test_cli_exit_codes(tmp_path, capsys):
    code, _, err = run(capsys, "keygen", "--mechanism", "RSA", "--attributes", 4, "--out", tmp_path / "k.json")
    assert code == 2 and "unknown mechanism" in err
    assert run(capsys, "verify", tmp_path / "missing.json")[0] == 2
    (tmp_path / "junk.json").write_text("{")
    assert run(capsys, "verify", tmp_path / "junk.json")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "bench-speed", "--iterations", 5)[0] == 2


def test_cli_untrusted_issuer(tmp_path, capsys):
    (tmp_path / "a.json").write_text(json.dumps(["x", "y"]))
    for name in ("k1", "k2"):
        run(capsys, "keygen", "--mechanism", "cmtList", "--attributes", 2, "--out", tmp_path / f"{name}.json")
    run(capsys, "issue", "--key", tmp_path / "k1.json", "--attributes-file", tmp_path / "a.json", "--out", tmp_path / "c.json")
    run(capsys, "present", "--credential", tmp_path / "c.json", "--disclose", "2", "--out", tmp_path / "p.json")
    code, _, err = run(capsys, "verify", tmp_path / "p.json", "--trust", tmp_path / "k2.pub.json")
    assert code == 1 and err.startswith("reject: untrusted-issuer")
    code, out, _ = run(capsys, "verify", tmp_path / "p.json", "--trust", tmp_path / "k1.pub.json")
    assert code == 0 and out.strip() == '2: "y"'


def test_cli_bench_size(tmp_path, capsys):
    out = tmp_path / "sizes.csv"
    code, _, _ = run(capsys, "bench-size", "--mechanism", "BBS,PS", "--attributes", "4", "--out", out, "--seed", 9)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 8
    assert all(r["proof_bytes"] == r["formula_bytes"] for r in rows)
