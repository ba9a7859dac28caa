import csv
import io
import json

import pytest

from higgsdt.cli import EXIT_BUDGET, EXIT_OK, EXIT_PRECONDITION, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_omega_csv(capsys):
    code, out, _ = run(capsys, "omega", "--genus", 0, "--l", 0, "--rmax", 2, "--method", "both")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["r", "d_mod_r", "omega"]
    assert rows[1] == ["1", "0", "v^2"]
    assert rows[2][2] == rows[3][2] == "0"


def test_omega_json_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        run(capsys, "omega", "--genus", 1, "--l", 2, "--rmax", 2, "--method", "both", "--json", path)
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["methods_agree"] is True
    assert doc["flavor"] == "generic"
    assert all(x["ok"] for x in doc["pole_audit"])


def test_numeric_backend(capsys):
    code, out, _ = run(capsys, "omega", "--genus", 2, "--q", 3, "--points", 4, 10, "--l", 2, "--rmax", 1)
    assert code == EXIT_OK
    # q P(1) with P(T) = 1 + 9 T^4
    assert out.splitlines()[1] == "1,0,30"


@pytest.mark.parametrize("argv", [
    ("omega", "--genus", 2, "--l", 1),
    ("omega", "--genus", 0),
    ("omega", "--q", 6, "--l", 0),
    ("oracle", "--q", 2, "--l", 1),
    ("selfcheck", "--suite", "nope"),
])
def test_precondition_exit(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_PRECONDITION
    assert err.startswith("error:")


def test_budget_exit(capsys):
    code, _, _ = run(capsys, "oracle", "--q", 2, "--l", 0, "--rmax", 2, "--dmax", 1, "--budget", 5)
    assert code == EXIT_BUDGET


def test_oracle_jobs_identical(capsys, tmp_path):
    outs = []
    for jobs in (1, 2):
        path = tmp_path / f"o{jobs}.csv"
        code, _, _ = run(capsys, "oracle", "--q", 2, 3, "--l", 0, -1, "--rmax", 2, "--dmax", 2,
                         "--jobs", jobs, "--csv", path)
        assert code == EXIT_OK
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    rows = list(csv.DictReader(io.StringIO(outs[0].decode())))
    assert len(rows) == 2 * 2 * 2 * 3
    assert all(r["match"] == "True" for r in rows)


@pytest.mark.parametrize("kind", ["nil-vec", "nil-full", "positive-vec", "positive-full"])
def test_series_kinds(capsys, kind):
    l = 0 if kind.startswith("positive") else -1
    code, out, _ = run(capsys, "series", "--genus", 0, "--l", l, "--kind", kind, "--rmax", 1, "--dmax", 2)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["kind"] == kind
    assert {"r": 0, "d": 0, "value": "1"} in doc["coefficients"]


def test_hn_round_trip(capsys, tmp_path):
    src = tmp_path / "series.json"
    src.write_text(json.dumps({
        "n": 1, "genus": 0, "l": 0, "bounds": [1, 1],
        "entries": [{"gamma": [[0, 0]], "value": "1"}, {"gamma": [[1, 0]], "value": "2"},
                    {"gamma": [[0, 1]], "value": "3"}, {"gamma": [[1, 1]], "value": "v^2 + 7"}],
    }))
    factors, back = tmp_path / "f.json", tmp_path / "b.json"
    assert run(capsys, "hn-factor", "--input", src, "--output", factors)[0] == EXIT_OK
    doc = json.loads(factors.read_text())
    by_key = {tuple(map(tuple, e["gamma"])): e["value"] for e in doc["entries"]}
    assert by_key[((1, 1),)] == "v^2 + 1"
    assert run(capsys, "hn-expand", "--input", factors, "--output", back)[0] == EXIT_OK
    again = json.loads(back.read_text())
    key = lambda e: e["gamma"]
    assert again["entries"] == sorted(json.loads(src.read_text())["entries"], key=key)


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"genus": 1, "l": 2, "rmax": 1}))
    code, out, _ = run(capsys, "omega", "--config", cfg)
    assert code == EXIT_OK and len(out.splitlines()) == 2
    code, out, _ = run(capsys, "omega", "--config", cfg, "--rmax", 2)
    assert code == EXIT_OK and len(out.splitlines()) == 4


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": 3}))
    assert run(capsys, "omega", "--config", cfg)[0] == EXIT_PRECONDITION


def test_kac_and_selfcheck(capsys):
    code, out, _ = run(capsys, "kac", "--genus", 0, "--rmax", 1, "--dmax", 2)
    assert code == EXIT_OK
    assert "0,1,v^2 + 1" in out.splitlines()
    code, out, _ = run(capsys, "selfcheck", "--suite", "kac")
    assert code == EXIT_OK
    assert all(line.startswith("PASS") for line in out.splitlines())
