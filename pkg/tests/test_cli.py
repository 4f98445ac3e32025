"""CLI surface: formats, exit codes, determinism."""

import json
import subprocess
import sys

import pytest

from gcdcluster.cli import main

FIRST_IRREGULAR = 111546435


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_greedy_modes_byte_identical(capsys):
    code1, out1, _ = run_cli(capsys, "greedy", "--n", "15", "--mode", "reference")
    code2, out2, _ = run_cli(capsys, "greedy", "--n", "15", "--mode", "accelerated")
    assert code1 == code2 == 0
    assert out1 == out2
    assert out1.startswith("integer,class\n2,1\n")
    assert "15,2" in out1


def test_greedy_base_case(capsys):
    code, out, _ = run_cli(capsys, "greedy", "--n", "2")
    assert code == 0
    assert out == "integer,class\n2,1\n"


def test_greedy_json(capsys):
    code, out, _ = run_cli(capsys, "greedy", "--n", "15", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["classes"]["2"] == [3, 9, 15]
    assert doc["conflicts"] == 10
    assert doc["anomalies"] == []


def test_greedy_reference_guard_exit_2(capsys):
    code, out, err = run_cli(capsys, "greedy", "--n", "200000", "--mode", "reference")
    assert code == 2
    assert "refused" in err


def test_verify_small_range(capsys):
    code, out, _ = run_cli(capsys, "verify", "--from", "2", "--to", "2000")
    assert code == 0
    lines = out.strip().split("\n")
    summary = json.loads(lines[-1])["summary"]
    assert summary["all_pass"] is True
    first = json.loads(lines[0])
    assert first["n"] == 9 and first["status"] == "pass"


def test_verify_at_first_irregular_exit_1(capsys):
    code, out, _ = run_cli(capsys, "verify", "--from", str(FIRST_IRREGULAR),
                           "--to", str(FIRST_IRREGULAR), "--limit", "10000000")
    assert code == 1
    lines = out.strip().split("\n")
    rec = json.loads(lines[0])
    assert rec["status"] == "fail"
    assert rec["chosen_j"] == 1 and rec["expected_j"] == 2
    summary = json.loads(lines[-1])["summary"]
    assert summary["anomalies"] == [[FIRST_IRREGULAR, 2, 1]]


def test_verify_bad_range_exit_64(capsys):
    code, _, err = run_cli(capsys, "verify", "--from", "5", "--to", "4")
    assert code == 64
    assert "bad range" in err


def test_verify_workers_deterministic(capsys, tmp_path):
    code1, out1, _ = run_cli(capsys, "verify", "--from", "2", "--to", "3000")
    out_path = tmp_path / "w2.jsonl"
    code2 = main(["verify", "--from", "2", "--to", "3000", "--workers", "2",
                  "--out", str(out_path)])
    capsys.readouterr()
    assert code1 == code2 == 0
    assert out_path.read_text() == out1


def test_tables_n1_csv(capsys):
    code, out, _ = run_cli(capsys, "tables", "--which", "n1")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "i,p,t,n1,infeasible"
    assert len(lines) == 80
    assert "3,5,1,24,0" in lines
    assert "7,17,5,26186,1" in lines
    assert "19,67,2,97553073,0" in lines


def test_tables_n1_json_single_cell(capsys):
    code, out, _ = run_cli(capsys, "tables", "--which", "n1", "--i", "4",
                           "--j", "3", "--t", "1", "--format", "json")
    assert code == 0
    docs = json.loads(out)
    assert docs == [{"i": 4, "j": 3, "t": 1, "n1": 93, "infeasible": False}]


def test_tables_n1_index_bound(capsys):
    code, _, err = run_cli(capsys, "tables", "--which", "n1", "--i", "21")
    assert code == 64
    code, out, _ = run_cli(capsys, "tables", "--which", "n1", "--i", "21",
                           "--t", "1", "--force")
    assert code == 0 and out.startswith("i,p,t,n1")


def test_tables_census_csv(capsys):
    code, out, _ = run_cli(capsys, "tables", "--which", "census")
    assert code == 0
    assert out == ("p,count\n19,4\n23,18\n29,65\n31,216\n37,513\n41,1302\n43,3097\n")


def test_tables_census_json_residuals(capsys):
    code, out, _ = run_cli(capsys, "tables", "--which", "census",
                           "--format", "json", "--long-run")
    rows = json.loads(out)
    assert rows[-1]["p"] == 67
    assert rows[-1]["residual"] == rows[-1]["count"] - 90338


def test_n0_search(capsys):
    code, out, _ = run_cli(capsys, "n0")
    assert code == 0
    doc = json.loads(out)
    assert doc == {"bound": 200000000, "found": True, "value": FIRST_IRREGULAR}
    code, out, _ = run_cli(capsys, "n0", "--bound", "1000000")
    assert json.loads(out)["found"] is False


def test_conflicts_count(capsys):
    code, out, _ = run_cli(capsys, "conflicts", "--n", "15")
    assert code == 0
    assert json.loads(out)["conflicts"] == 10


def test_conflicts_guard_exit_2(capsys):
    code, _, err = run_cli(capsys, "conflicts", "--n", "200000")
    assert code == 2


def test_conflicts_move_delta_at_scale(capsys):
    code, out, _ = run_cli(capsys, "conflicts", "--n", str(FIRST_IRREGULAR),
                           "--to-class", "1", "--limit", "100000")
    assert code == 0
    doc = json.loads(out)
    assert doc["delta"] == -686785
    assert doc["from_class"] == 2


def test_unknown_flag_exit_64(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["greedy", "--bogus"])
    assert exc.value.code == 64
    capsys.readouterr()


def test_missing_subcommand_exit_64(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 64
    capsys.readouterr()


def test_cache_flag_roundtrip(tmp_path, capsys):
    cache = tmp_path / "primes.bin"
    code1, out1, err1 = run_cli(capsys, "--seed-cache", str(cache),
                                "greedy", "--n", "50")
    assert code1 == 0 and cache.exists()
    code2, out2, err2 = run_cli(capsys, "--seed-cache", str(cache),
                                "greedy", "--n", "50")
    assert out2 == out1
    assert "loaded prime cache" in err2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gcdcluster", "greedy", "--n", "6"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "integer,class\n2,1\n3,2\n4,1\n5,3\n6,1\n"
