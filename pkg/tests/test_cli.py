import subprocess
import sys

import pytest

from amstream.cli import EXIT_FORMAT, EXIT_IO, EXIT_OK, EXIT_REJECT, EXIT_USAGE, main
from amstream.stream import DataStream


def _kv(text):
    return dict(line.split("=", 1) for line in text.strip().splitlines() if "=" in line)


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, _kv(out)


@pytest.fixture
def stream_file(tmp_path, capsys):
    path = tmp_path / "s.txt"
    code, _ = _run(capsys, "gen-stream", "--m", 40, "--n", 16, "--seed", 3, "--out", path)
    assert code == EXIT_OK
    return path


def test_gen_stream_deterministic_and_parses(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for p in (a, b):
        _run(capsys, "gen-stream", "--m", 100, "--n", 10, "--seed", 7, "--out", p)
    assert a.read_bytes() == b.read_bytes()
    assert DataStream.load(a).m == 100


def test_gen_stream_constant_and_zipf(tmp_path, capsys):
    p = tmp_path / "c.txt"
    _run(capsys, "gen-stream", "--m", 4, "--n", 4, "--dist", "constant", "--out", p)
    assert len(set(DataStream.load(p).elements)) == 1
    code, kv = _run(capsys, "f0", "--stream", p)
    assert code == EXIT_OK and kv["f0"] == "1"
    _run(capsys, "gen-stream", "--m", 50, "--n", 20, "--dist", "zipf", "--skew", 2, "--out", p)
    assert DataStream.load(p).m == 50


def test_prove_verify_round_trip(stream_file, tmp_path, capsys):
    proof = tmp_path / "p.bin"
    code, kv = _run(capsys, "prove", "--stream", stream_file, "--proof", proof, "--s", 4, "--w", 4, "--seed", "ab")
    assert code == EXIT_OK and int(kv["proof_bytes"]) == proof.stat().st_size
    _, f0 = _run(capsys, "f0", "--stream", stream_file)
    coins = tmp_path / "coins.bin"
    code, kv = _run(capsys, "verify", "--stream", stream_file, "--proof", proof, "--seed", "ab", "--rand-transcript", coins)
    assert code == EXIT_OK
    assert kv["status"] == "accept" and kv["result"] == f0["f0"]
    assert kv["randomness"] == "fresh" and coins.exists()
    code2, kv2 = _run(capsys, "verify", "--stream", stream_file, "--proof", proof, "--seed", "ab", "--rand-transcript", coins)
    assert kv2["randomness"] == "replayed"
    kv.pop("randomness"), kv2.pop("randomness")
    assert (code2, kv2) == (code, kv)


def test_verify_rejects_flipped_proof(stream_file, tmp_path, capsys):
    proof = tmp_path / "p.bin"
    _run(capsys, "prove", "--stream", stream_file, "--proof", proof, "--s", 4, "--w", 4)
    data = bytearray(proof.read_bytes())
    # flip the lowest bit of the last byte: inside the final section's coefficients
    data[-1] ^= 1
    proof.write_bytes(bytes(data))
    code, kv = _run(capsys, "verify", "--stream", stream_file, "--proof", proof)
    assert code in (EXIT_REJECT, EXIT_FORMAT)
    if code == EXIT_REJECT:
        assert kv["result"] == "bottom"


def test_verify_wrong_seed_rejects(stream_file, tmp_path, capsys):
    proof = tmp_path / "p.bin"
    _run(capsys, "prove", "--stream", stream_file, "--proof", proof, "--s", 4, "--w", 4, "--seed", "01")
    code, kv = _run(capsys, "verify", "--stream", stream_file, "--proof", proof, "--seed", "02")
    assert code == EXIT_REJECT and "header" in kv["reason"]


def test_verify_truncated_is_format_error(stream_file, tmp_path, capsys):
    proof = tmp_path / "p.bin"
    _run(capsys, "prove", "--stream", stream_file, "--proof", proof, "--s", 4, "--w", 4)
    proof.write_bytes(proof.read_bytes()[:-3])
    code, _ = _run(capsys, "verify", "--stream", stream_file, "--proof", proof)
    assert code == EXIT_FORMAT


def test_exit_codes_for_bad_inputs(stream_file, tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("2 3\n1\n9\n")
    assert _run(capsys, "f0", "--stream", bad)[0] == EXIT_FORMAT
    assert _run(capsys, "f0", "--stream", tmp_path / "missing.txt")[0] == EXIT_IO
    assert _run(capsys, "prove", "--stream", stream_file, "--proof", tmp_path / "p", "--s", 2, "--w", 2)[0] == EXIT_USAGE
    assert _run(capsys, "reduce-ghd", "--out-a", "a", "--out-b", "b")[0] == EXIT_USAGE
    assert _run(capsys, "ghd-sim", "--n", 4, "--T", 4, "--W", 4)[0] == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["verify"])
    assert exc.value.code == EXIT_USAGE


def test_params_command(capsys):
    code, kv = _run(capsys, "params", "--m", 10, "--n", 16, "--s", 4, "--w", 4)
    assert code == EXIT_OK and kv["invariants"] == "ok"
    assert "p" in kv and kv["Q"].startswith("2,3")


def test_ghd_sim_output(capsys):
    code, kv = _run(capsys, "ghd-sim", "--n", 16, "--T", 4, "--W", 4, "--trials", 50, "--seed", 1)
    assert code == EXIT_OK
    assert kv["accepted"] == "50" and float(kv["hd_error_rate"]) == 0
    assert int(kv["comm_bits"]) == int(kv["comm_bits_expected"])
    assert int(kv["proof_bits"]) <= int(kv["proof_bits_bound"])
    code, kv = _run(capsys, "ghd-sim", "--n", 16, "--T", 4, "--W", 4, "--trials", 50, "--adversary", "shift")
    assert kv["accepted"] == "0"


def test_reduce_ghd(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    code, kv = _run(capsys, "reduce-ghd", "--x=+-++", "--y=--+-", "--out-a", a, "--out-b", b)
    assert code == EXIT_OK
    assert kv["hd"] == kv["hd_bruteforce"] == "2"
    assert DataStream.load(a).n == 8
    code, kv = _run(capsys, "reduce-ghd", "--x", "1011", "--y", "1011", "--out-a", a, "--out-b", b)
    assert kv["hd"] == "0"


def test_or_stats(capsys):
    code, kv = _run(capsys, "or-stats", "--q", 2, "--m", 8, "--trials", 500)
    assert code == EXIT_OK
    assert kv["L"] == "3" and kv["zero_failures"] == "0"
    assert {"rate", "stderr", "bound", "trials"} <= set(kv)


def test_console_script_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "amstream.cli", "--version"], capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "0.1.0"
