import csv
import io
import json
import subprocess
import sys

import pytest

from expcodes.cli import main, parse_grid


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_optimal_geometric(capsys):
    code, out, _ = run(capsys, "optimal", "--source", '{"kind":"geometric","theta":0.9}', "--a", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["codespec"] == {"kind": "golomb", "k": 13, "prefix": "ones"}
    assert 0 <= doc["summary"]["redundancy"] < 1


def test_optimal_poisson(capsys):
    code, out, _ = run(capsys, "optimal", "--source", '{"kind":"poisson","lambda":1}', "--a", "2")
    doc = json.loads(out)
    assert doc["codespec"]["kind"] == "unary_ended"
    assert [len(c) for c in doc["codespec"]["head"]] == [2, 2, 2]
    assert doc["summary"]["lengths_head"][:6] == [2, 2, 2, 3, 4, 5]


def test_optimal_maxred(capsys):
    code, out, _ = run(capsys, "optimal", "--source", '{"kind":"geometric","theta":0.5}', "--maxred")
    assert json.loads(out)["codespec"]["kind"] == "unary"
    code, out, _ = run(capsys, "optimal", "--source", '{"kind":"geometric","theta":0.9}', "--maxred")
    assert json.loads(out)["codespec"]["k"] == 7


def test_optimal_finite_and_prefix(capsys, tmp_path):
    src = tmp_path / "src.json"
    src.write_text('{"kind":"finite","weights":[4,3,2,1]}')
    code, out, _ = run(capsys, "optimal", "--source", str(src), "--a", "1")
    assert [len(c) for c in json.loads(out)["codespec"]["codewords"]] == [1, 2, 3, 3]
    code, out, _ = run(capsys, "optimal", "--source", '{"kind":"geometric","theta":0.8}', "--a", "1",
                       "--prefix-convention", "zeros")
    assert json.loads(out)["codespec"]["prefix"] == "zeros"


def test_twelve_significant_digits(capsys):
    _, out, _ = run(capsys, "optimal", "--source", '{"kind":"geometric","theta":0.3}', "--a", "1.7")
    pen = json.loads(out)["summary"]["penalty"]
    assert len(repr(pen).replace(".", "").lstrip("0")) <= 12


def test_errors_exit_nonzero(capsys):
    code, _, err = run(capsys, "optimal", "--source", '{"kind":"geometric","theta":1.5}', "--a", "1")
    assert code == 2 and "InvalidParameter" in err
    code, _, err = run(capsys, "eval", "--source", '{"kind":"geometric","theta":0.9}',
                       "--spec", '{"kind":"unary"}', "--a", "1.2")
    assert code == 3 and "DivergentPenalty" in err
    with pytest.raises(SystemExit) as exc:
        main(["verify", "no-such-battery"])
    assert exc.value.code != 0


def test_not_light_tailed_exit(capsys, monkeypatch):
    from expcodes import cli
    from expcodes.model import CustomSource
    heavy = CustomSource(lambda i: 1.0 / ((i + 1) * (i + 2)), ratio=lambda j: 1.0)
    monkeypatch.setattr(cli, "source_from_json", lambda text: heavy)
    code, _, err = run(capsys, "optimal", "--source", "{}", "--maxred")
    assert code == 3 and "NotVerifiablyLightTailed" in err


def test_encode_decode_roundtrip(capsys, tmp_path):
    data = tmp_path / "sym.txt"
    data.write_text("0\n4\n7\n12\n0\n")
    blob = tmp_path / "out.xpc"
    code, _, _ = run(capsys, "encode", "--spec", '{"kind":"golomb","k":3}', "--in", str(data),
                     "--out", str(blob))
    assert code == 0
    raw = blob.read_bytes()
    assert raw[:4] == b"XPC1"
    back = tmp_path / "back.txt"
    code, _, _ = run(capsys, "decode", "--in", str(blob), "--out", str(back))
    assert code == 0 and back.read_text() == data.read_text()


def test_encode_g3_payload(capsys, tmp_path):
    data = tmp_path / "sym.txt"
    data.write_text("0\n4\n7\n")
    blob = tmp_path / "out.xpc"
    run(capsys, "encode", "--spec", '{"kind":"golomb","k":3}', "--in", str(data), "--out", str(blob))
    payload = blob.read_bytes()[-2:]
    assert format(int.from_bytes(payload, "big"), "016b").startswith("0010101101")


def test_decode_truncated(capsys, tmp_path):
    data = tmp_path / "sym.txt"
    data.write_text("\n".join(str(i) for i in range(50)) + "\n")
    blob = tmp_path / "out.xpc"
    run(capsys, "encode", "--spec", '{"kind":"golomb","k":3}', "--in", str(data), "--out", str(blob))
    blob.write_bytes(blob.read_bytes()[:-3])
    code, _, err = run(capsys, "decode", "--in", str(blob))
    assert code == 4 and "TruncatedStream" in err


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", "--source", '{"kind":"geometric","theta":0.5}',
                       "--spec", '{"kind":"unary"}', "--a", "1")
    s = json.loads(out)["summary"]
    assert s["penalty"] == 2.0 and s["redundancy"] == 0.0 and s["max_redundancy"] == 0.0


def test_sweep(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", "--theta-grid", "0.1:0.9:0.1", "--a-grid", "2,1,1.5",
                     "--out", str(out_path))
    assert code == 0
    text = out_path.read_text()
    assert text.splitlines()[0] == "theta,a,k_opt,penalty,entropy,redundancy"
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 27
    keys = [(float(r["a"]), float(r["theta"])) for r in rows]
    assert keys == sorted(keys)
    assert all(0 <= float(r["redundancy"]) < 1 for r in rows)
    code, _, _ = run(capsys, "sweep", "--theta-grid", "0.5", "--a-grid", "0.5")
    assert code == 2


def test_sweep_deterministic(capsys):
    _, a, _ = run(capsys, "sweep", "--theta-grid", "0.05:0.95:0.05", "--a", "1.3")
    _, b, _ = run(capsys, "sweep", "--theta-grid", "0.05:0.95:0.05", "--a", "1.3")
    assert a == b


def test_parse_grid():
    assert parse_grid("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    assert parse_grid("1, 2") == [1.0, 2.0]


@pytest.mark.parametrize("battery", ["poisson-examples", "huffman-oracle", "golomb-sandwich"])
def test_verify_passes(capsys, battery):
    code, out, _ = run(capsys, "verify", battery, "--seed", "3")
    doc = json.loads(out)
    assert code == 0 and doc["passed"] and doc["battery"] == battery


def test_verify_reports_failure(capsys):
    # the |R_64 - R*| < 1e-3 check cannot hold for generic finite sources
    code, out, _ = run(capsys, "verify", "minimax-grid")
    doc = json.loads(out)
    assert code == 1 and not doc["passed"]
    failed = [c["name"] for c in doc["checks"] if not c["passed"]]
    assert failed and all(name.startswith("|R_64 - R*|") for name in failed)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "expcodes.cli", "verify", "poisson-examples"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["passed"]
