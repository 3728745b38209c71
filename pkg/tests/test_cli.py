import csv
import json
import shutil
import subprocess

import pytest

from catalytic_lab import cli, fixtures


def invoke(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    payload = json.loads(out.out) if out.out.strip() else None
    return code, payload, out.err


def test_measures_partition_example(capsys):
    code, out, _ = invoke(capsys, "measures", "--set", "parity", "--m", "4", "--measure", "partition")
    assert code == 0 and out["value"] == 8 and len(out["witness"]) == 8


def test_verify_tally_example(tmp_path, capsys):
    acc = tmp_path / "acc.json"
    acc.write_text(fixtures.accept_all().to_json())
    xs = tmp_path / "xs.txt"
    xs.write_text("-\n0\n101\n")
    code, out, _ = invoke(capsys, "verify", "--engine", "tally", "--inner", f"@{acc}", "--c", "4",
                          "--inputs", f"@{xs}", "--mode", "exhaustive")
    assert code == 0 and out["overall_pass"] is True
    assert out["summary"]["cases"] == 48


def test_codes_covering_radius_example(capsys):
    code, out, _ = invoke(capsys, "codes", "--code", "hamming:7", "--op", "covering-radius")
    assert code == 0 and out["value"] == 1


def test_codes_ops(capsys):
    _, out, _ = invoke(capsys, "codes", "--code", "rm:1,3", "--op", "encode", "--word", "1000")
    assert out["value"] == "11111111"
    _, out, _ = invoke(capsys, "codes", "--code", "exthamming:8", "--op", "decode", "--word", "00000100")
    assert out["status"] == "Decoded" and out["error_positions"] == [5]
    _, out, _ = invoke(capsys, "codes", "--code", "rep:5", "--op", "sphere-covering")
    assert out["radius"] == 2 and out["value"] is True
    _, out, _ = invoke(capsys, "codes", "--code", "hamming:7", "--op", "codewords")
    assert len(out["value"]) == 16
    code, _, err = invoke(capsys, "codes", "--code", "rm:1,3", "--op", "encode")
    assert code == 2 and "engines:" in err


def test_measures_projection_csv(tmp_path, capsys):
    path = tmp_path / "r.csv"
    code, out, _ = invoke(capsys, "measures", "--set", "codewords:exthamming:8", "--measure", "projection",
                          "--epsilon", "1/256", "--csv", str(path))
    assert code == 0 and out["value"] >= 4
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["ell", "fraction", "float"] and len(rows) == 10


def test_measures_spectrum_and_gl(tmp_path, capsys):
    _, out, _ = invoke(capsys, "measures", "--set", "hamming-balls:000:1", "--measure", "spectrum")
    assert out["value"] == "2" and out["parseval"] is True
    code, out, _ = invoke(capsys, "measures", "--measure", "gl", "--m", "6")
    assert code == 0 and len(out["results"]) == 6
    _, out, _ = invoke(capsys, "measures", "--measure", "gl", "--m", "3", "--k", "1")
    assert out["value"] == "3/4"


def test_measures_hex_mask(tmp_path, capsys):
    f = tmp_path / "mask.hex"
    f.write_text("69\n")  # parity at m=3: 0b01101001
    code, out, _ = invoke(capsys, "measures", "--mask", f"@{f}", "--measure", "partition")
    assert code == 0 and out["m"] == 3 and out["value"] == 4


def test_run_and_trace(capsys):
    code, out, _ = invoke(capsys, "run", "--engine", "full-decode:exthamming:8:1", "--inner", "flip-first",
                          "--w", "00000000", "--trace")
    assert code == 0 and out["restored"] is True
    assert out["steps"] == len(out["trace_digest"]) - 1


def test_run_budget_failure(capsys):
    code, out, _ = invoke(capsys, "run", "--engine", "broken-loop:0110", "--inner", "input-parity",
                          "--w", "0110", "--budget", "30")
    assert code == 1 and out["error"] == "BudgetExceeded"


def test_verify_broken_engine_exit_one(capsys):
    code, out, _ = invoke(capsys, "verify", "--engine", "broken-skip-decode:exthamming:8:1", "--inner",
                          "flip-first", "--mode", "members")
    assert code == 1 and out["summary"]["restoration_failures"] > 0
    assert all(c["failure"] for c in out["cases"])


def test_disjoint(capsys):
    code, out, _ = invoke(capsys, "disjoint", "--engine", "parity-even", "--inner", "input-parity", "--c", "6",
                          "--input", "1")
    assert code == 0 and out["passed"] and out["bound_holds"]
    code, out, _ = invoke(capsys, "disjoint", "--engine", "broken-eraser", "--c", "4")
    assert code == 1 and out["error"] == "HypothesisViolated"
    code, out, _ = invoke(capsys, "disjoint", "--engine", "broken-eraser", "--c", "4", "--no-hypothesis")
    assert code == 1 and out["collisions"]


def test_involution_descriptor(capsys):
    code, out, _ = invoke(capsys, "verify", "--engine", "involution:first-bit:parity-even", "--inner",
                          "input-parity", "--c", "6", "--inputs=-,1")
    assert code == 0 and out["set"] == "first-bit(not:parity)"
    code, _, _ = invoke(capsys, "verify", "--engine", "involution:flip:0,2:parity-even", "--inner",
                        "input-parity", "--c", "6")
    assert code == 0


def test_zpp_default_pair(capsys):
    code, out, _ = invoke(capsys, "zpp", "--inputs=-,1")
    assert code == 0 and len(out["results"]) == 2
    row = out["results"][0]
    assert row["bound_m1_holds"] and row["bound_m2_holds"] and row["accounting_holds"]
    assert sum(row["histogram"].values()) == 256


def test_zpp_looping_flagged(capsys):
    code, out, _ = invoke(capsys, "zpp", "--m1", "broken-loop:000110", "--m2", "parity-odd", "--c", "6",
                          "--inputs", "1", "--budget", "2000")
    assert code == 1 and out["results"][0]["bound_checks_skipped"]


@pytest.mark.parametrize("argv", [
    ["verify", "--engine", "nope"],
    ["verify", "--engine", "tally"],
    ["verify", "--engine", "full-decode:exthamming:8:3"],
    ["measures", "--measure", "partition"],
    ["measures", "--set", "parity"],
    ["verify", "--engine", "tally", "--c", "4", "--mode", "sometimes"],
    ["codes", "--code", "hamming:8"],
    ["run", "--engine", "tally", "--c", "3", "--inner", "no-such-machine"],
])
def test_usage_errors_exit_two(capsys, argv):
    assert cli.main(argv) == 2
    assert "catalytic-lab:" in capsys.readouterr().err


def test_argparse_errors_exit_two():
    with pytest.raises(SystemExit) as info:
        cli.main(["frobnicate"])
    assert info.value.code == 2


def test_out_file_byte_identical(tmp_path, capsys):
    argv = ["verify", "--engine", "full-decode:rm(1,6):15", "--inner", "counter4", "--inputs=-,1111111111",
            "--mode", "sample:40", "--seed", "9", "--all-cases"]
    a, b, c = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "c.json"
    assert cli.main(["--out", str(a)] + argv) == 0
    assert cli.main(["--out", str(b)] + argv) == 0
    assert cli.main(["--out", str(c)] + argv + ["--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()
    json.loads(a.read_text())


def test_projection_monte_carlo_byte_identical(tmp_path):
    argv = ["measures", "--set", "parity", "--m", "22", "--measure", "projection", "--samples", "32",
            "--seed", "4"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cli.main(["--out", str(a)] + argv)
    cli.main(["--out", str(b)] + argv)
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["exact"] is False


def test_report_subset(capsys):
    code, out, err = invoke(capsys, "report", "--only", "2,3")
    assert code == 0 and [c["number"] for c in out["criteria"]] == [2, 3]
    assert "criterion  2 PASS" in err


@pytest.mark.skipif(shutil.which("catalytic-lab") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["catalytic-lab", "codes", "--code", "hamming:7", "--op", "min-distance"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["value"] == 3
