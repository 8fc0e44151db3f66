import csv
import json
from pathlib import Path
import subprocess
import sys

import pytest

from nslp.cli import main

DEMOS = Path(__file__).resolve().parent.parent / "demos"
BOX = {"A": [[1, 0], [0, 1]], "b": [1, 1], "c": [1, 1]}


def _write(tmp_path, doc, name="scn.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_quest_interior_start(tmp_path):
    scn = _write(tmp_path, {"kind": "static", "base": BOX, "L": 5, "z0": [0.5, 0.5]})
    out = tmp_path / "t.csv"
    assert main(["quest", "--scenario", scn, "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == ["phase", "k", "t", "dist_est", "dist_exact", "objective", "g0_0", "g0_1"]
    assert len(rows) == 2 and rows[1][:3] == ["quest", "1", "5"]


def test_unparseable_file(tmp_path, capsys):
    scn = _write(tmp_path, "{not json")
    assert main(["quest", "--scenario", scn]) == 1
    assert main(["quest", "--scenario", str(tmp_path / "missing.json")]) == 1


def test_parse_error_names_field(tmp_path, capsys):
    scn = _write(tmp_path, {"kind": "static", "base": {"A": [[1, 0]], "c": [1, 1]}})
    assert main(["quest", "--scenario", scn]) == 1
    assert "base.b" in capsys.readouterr().err


def test_bad_lambda_is_parse_failure(tmp_path):
    scn = _write(tmp_path, {"kind": "static", "base": BOX})
    assert main(["quest", "--scenario", scn, "--lambda", "2.5"]) == 1


def test_runaway_polytope_exhausts_budget(tmp_path):
    strip = {"A": [[1, 0], [-1, 0], [0, 1]], "b": [2, -1, 1], "c": [1, 1]}
    scn = _write(tmp_path, {"kind": "translation", "base": strip, "d": [0.05, 0], "L": 10, "z0": [0, 0.5]})
    out = tmp_path / "t.csv"
    assert main(["quest", "--scenario", scn, "--out", str(out), "--max-updates", "40"]) == 2
    assert len(_rows(out)) == 41


def test_solve_demo(tmp_path):
    out = tmp_path / "t.csv"
    code = main(["solve", "--scenario", str(DEMOS / "translating_box.json"), "--out", str(out),
                 "--s", "0.05", "--steps", "50"])
    assert code == 0
    phases = [r[0] for r in _rows(out)[1:]]
    assert phases[0] == "quest" and phases.count("target") == 50


def test_solve_zero_steps_is_quest_only(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["solve", "--scenario", str(DEMOS / "static_box.json"), "--out", str(out), "--steps", "0"]) == 0
    assert {r[0] for r in _rows(out)[1:]} == {"quest"}


def test_target_command_emits_target_rows_only(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["target", "--scenario", str(DEMOS / "static_box.json"), "--out", str(out),
                 "--steps", "7"]) == 0
    assert [r[0] for r in _rows(out)[1:]] == ["target"] * 7


def test_jump_scenario_logs_reacquisition(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["solve", "--scenario", str(DEMOS / "jumping_box.json"), "--out", str(out),
                 "--s", "0.05", "--steps", "60"]) == 0
    rows = _rows(out)
    assert any(r[0] == "reacquire" for r in rows[1:])
    by_phase = {}
    for r in rows[1:]:
        by_phase.setdefault(r[0], []).append(int(r[1]))
    for ks in by_phase.values():
        assert all(b > a for a, b in zip(ks, ks[1:]))
    # whole file is in time order too
    ks = [int(r[1]) for r in rows[1:]]
    assert ks == sorted(ks)


def test_trace_rows_schema(tmp_path):
    out = tmp_path / "t.csv"
    main(["solve", "--scenario", str(DEMOS / "translating_box.json"), "--out", str(out), "--steps", "20"])
    rows = _rows(out)
    width = len(rows[0])
    for r in rows[1:]:
        assert len(r) == width
        assert r[0] in {"quest", "target", "reacquire"}
        int(r[1]), int(r[2])
        for v in r[3:]:
            if v:
                float(v)
    assert out.read_bytes().count(b"\r") == 0


def test_general_polytope_leaves_dist_exact_empty(tmp_path):
    n = 4
    A = [[1.0] * n] + [[1.0 if j == i else 0.5 for j in range(n)] for i in range(n)]
    scn = _write(tmp_path, {"kind": "static", "base": {"A": A, "b": [3] + [2] * n, "c": [1] * n},
                            "z0": [2] * n})
    out = tmp_path / "t.csv"
    assert main(["quest", "--scenario", scn, "--out", str(out)]) == 0
    assert all(r[4] == "" for r in _rows(out)[1:])


@pytest.mark.parametrize("workers", ["2", "8"])
def test_solve_byte_identical_across_workers(tmp_path, workers):
    args = ["solve", "--scenario", str(DEMOS / "jumping_box.json"), "--s", "0.05", "--steps", "60"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(args + ["--out", str(a), "--workers", "1"])
    main(args + ["--out", str(b), "--workers", workers])
    assert a.read_bytes() == b.read_bytes()


def test_seeded_start_is_reproducible(tmp_path):
    scn = _write(tmp_path, {"kind": "static", "base": BOX, "L": 5})
    outs = []
    for seed in ("3", "3", "4"):
        out = tmp_path / f"t{len(outs)}.csv"
        main(["solve", "--scenario", scn, "--out", str(out), "--seed", seed, "--steps", "5"])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] != outs[2]


def test_oracle_check_static_box(tmp_path, capsys):
    assert main(["oracle-check", "--scenario", str(DEMOS / "static_box.json"), "--s", "0.05"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("k,oracle_opt,objective,gap,threshold,checked")
    assert len(lines) == 101


def test_oracle_check_unsupported_dimension(tmp_path):
    base = {"A": [[1, 1, 1, 1]], "b": [1], "c": [1, 1, 1, 1]}
    scn = _write(tmp_path, {"kind": "static", "base": base})
    assert main(["oracle-check", "--scenario", scn]) == 3


def test_oracle_check_empty_region(tmp_path, capsys):
    scn = _write(tmp_path, {"kind": "static", "base": {"A": [[1, 0], [0, 1]], "b": [-1, 1], "c": [1, 1]}})
    assert main(["oracle-check", "--scenario", scn]) == 4
    assert "infeasible" in capsys.readouterr().out


def test_oracle_check_reports_gap_failure(tmp_path):
    # a tiny spacing cannot reach the vertex within the warm-up
    assert main(["oracle-check", "--scenario", str(DEMOS / "static_box.json"), "--s", "0.001",
                 "--steps", "30", "--warmup", "5"]) == 5


def test_help_lists_flags(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    text = capsys.readouterr().out
    for flag in ("--scenario", "--out", "--L", "--lambda", "--epsilon", "--K", "--s", "--steps",
                 "--feas-tol", "--seed", "--workers"):
        assert flag in text


def test_module_entry_point(tmp_path):
    out = tmp_path / "t.csv"
    proc = subprocess.run([sys.executable, "-m", "nslp", "quest", "--scenario",
                           str(DEMOS / "static_box.json"), "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
