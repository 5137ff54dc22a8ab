import json
import subprocess
import sys

import pytest

from ordacc.cli import EXIT_BUDGET, EXIT_HYPOTHESIS, EXIT_OK, EXIT_USAGE, dispatch, main, serialize


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_ordinal_command(capsys):
    code, doc = run_json(capsys, "ordinal", "w^2+w*3", "--plus", "w", "--times", "2", "--fundamental", "3")
    assert code == EXIT_OK
    r = doc["results"]
    assert r["value"] == "w^2+w*3"
    assert r["plus"] == "w^2+w*4"
    assert r["times"] == "w^2*2+w*3"
    assert r["fundamental"] == ["w^2+w*2", "w^2+w*2+1", "w^2+w*2+2"]
    assert r["irreducible"] is False
    assert doc["schema"] == 1 and doc["status"] == "ok"


def test_rank_command(capsys):
    code, doc = run_json(capsys, "rank", "--space", "omega(2,3)", "--point", "o:w^2+w")
    assert code == EXIT_OK
    r = doc["results"]
    assert (r["cb_rank"], r["top_count"], r["rho"]) == ("3", 3, "2")
    assert r["point"]["rank"] == "1"


def test_realize_command(capsys):
    code, doc = run_json(capsys, "realize", "--alpha", "w*2+3")
    assert code == EXIT_OK
    assert doc["results"]["profile"]["alpha0"] == "w*2+3"
    assert doc["results"]["weights"] == ["3/4", "1/4"]
    code, doc = run_json(capsys, "realize", "--alpha", "w", "--plus")
    assert doc["results"]["profile"]["alpha0"] == "w+1"
    assert "weights" not in doc["results"]


def test_utable_tsv(capsys):
    code, out, _ = run(capsys, "utable", "--alpha", "2", "--format", "tsv")
    assert code == EXIT_OK
    assert out == "gamma\tnorm\tat_marked\n0\t0\t0\n1\t1/2\t1/2\n2\t1\t1\n3\t1\t1\n"


def test_utable_oracle_matches_profile(capsys):
    _, a = run_json(capsys, "utable", "--alpha", "2", "--gammas", "0,1,2,3", "--oracle")
    _, b = run_json(capsys, "utable", "--alpha", "2", "--gammas", "0,1,2,3")
    assert a["results"]["rows"] == b["results"]["rows"]


def test_verify_lemmas(capsys):
    for p in ("1", "2", "3"):
        code, doc = run_json(capsys, "verify", "--lemma", "powers", "--p", p)
        assert code == EXIT_OK and doc["results"]["ok"] is True
    code, doc = run_json(capsys, "verify", "--lemma", "disjoint-union", "--max-gamma", "2")
    assert code == EXIT_OK
    assert all(r["ok"] for r in doc["results"]["lemma_rows"])


def test_simplex_commands(capsys):
    code, doc = run_json(capsys, "simplex", "demo-3-28")
    assert code == EXIT_OK
    assert (doc["results"]["alpha0_restricted"], doc["results"]["alpha0_full"]) == ("2", "1")
    code, doc = run_json(capsys, "simplex", "probe", "--space", "omega(2,1)", "--gammas", "0,1,2,3")
    assert [r["realized"] for r in doc["results"]["results"]] == [True, True, True, False]


def test_exit_codes(capsys):
    code, out, err = run(capsys, "ordinal", "w+")
    assert code == EXIT_USAGE and out == "" and "position" in err
    code, out, err = run(capsys, "verify", "--sequence", "prod(base(2),base(1))")
    assert code == EXIT_HYPOTHESIS
    assert json.loads(out)["status"] == "hypothesis-violation" and "product lemma" in err
    code, out, _ = run(capsys, "utable", "--alpha", "w", "--oracle", "--gammas", "3")
    assert code == EXIT_BUDGET and json.loads(out)["results"] is None
    code, _, _ = run(capsys, "no-such-command")
    assert code == EXIT_USAGE


def test_out_file_and_byte_identity(tmp_path, capsys):
    argv = ["realize", "--alpha", "w^2+1", "--tree"]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["--out", str(first)]) == EXIT_OK
    assert main(argv + ["--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert capsys.readouterr().out == ""
    assert [p.name for p in tmp_path.iterdir() if p.name.startswith(".ordacc-")] == []


def test_timing_is_opt_in():
    assert "timing_ms" not in dispatch(["ordinal", "3"])
    assert "timing_ms" in dispatch(["ordinal", "3", "--timing"])


def test_serialize_sorts_keys():
    text = serialize({"b": 1, "a": {"d": 2, "c": 3}})
    assert text.index('"a"') < text.index('"b"') and text.index('"c"') < text.index('"d"')
    assert text.endswith("\n")


def test_console_entry_point_runs_as_module():
    proc = subprocess.run(
        [sys.executable, "-m", "ordacc.cli", "ordinal", "w"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["kind"] == "Limit"


@pytest.mark.parametrize("argv", [["rank"], ["realize"], ["simplex", "bogus"]])
def test_missing_arguments_are_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE
    capsys.readouterr()
