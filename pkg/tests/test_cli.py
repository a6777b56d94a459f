import csv
import json
import math

import pytest

from pathphase.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_frontier_pure(tmp_path, capsys):
    out = tmp_path / "f.csv"
    assert main(["frontier", "--dww", "0.65", "--dwp", "0.6", "--grid", "51", "-o", str(out)]) == 0
    header = out.read_text().splitlines()[0]
    assert header == "mu,z0,y0,P_ww,P_wp,lhs"
    rows = read_csv(out)
    assert len(rows) == 51
    for r in rows:
        assert abs(float(r["lhs"]) - 1) <= 1e-12
        z0 = float(r["z0"])
        assert float(r["P_ww"]) == pytest.approx(0.5 * (1 + z0 * 0.65), abs=1e-12)


def test_frontier_degenerate(tmp_path):
    out = tmp_path / "f.csv"
    assert main(["frontier", "--dww", "1", "--dwp", "0", "-o", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 1
    assert float(rows[0]["z0"]) == 1 and float(rows[0]["P_ww"]) == 1


def test_frontier_unrealizable_mixed(tmp_path, capsys):
    out = tmp_path / "f.csv"
    code = main(["frontier", "--dww", "0.65", "--dwp", "0.6", "--dwm", "0.5", "--grid", "21",
                 "-o", str(out)])
    assert code == 0
    assert "warning" in capsys.readouterr().err
    assert out.read_text().splitlines()[0] == "mu,z0,y0,P_ww,P_wp,P_wm,lhs"
    rows = read_csv(out)
    assert len(rows) == 21 * 21
    assert all(abs(float(r["lhs"]) - 1) <= 1e-12 for r in rows)


def test_frontier_mixed_realizable_uses_table(tmp_path, capsys):
    out = tmp_path / "f.csv"
    assert main(["frontier", "--dwm", "0.3", "--grid", "5", "-o", str(out)]) == 0
    assert capsys.readouterr().err == ""
    assert all(abs(float(r["lhs"]) - 1) <= 1e-12 for r in read_csv(out))


def test_frontier_rejects_out_of_range(capsys):
    code, _, err = run(["frontier", "--dwm", "1.5"], capsys)
    assert code == 2 and "dwm" in err


def test_tradeoff(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["tradeoff", "--dww", ".65", "--dwp", ".6", "--grid", "11", "-o", str(a)]) == 0
    assert main(["tradeoff", "--dww", ".65", "--dwp", ".6", "--grid", "11", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == "E,I_ww,I_wp,I_cross,I_in_out,holevo"
    rows = [{k: float(v) for k, v in r.items()} for r in read_csv(a)]
    for r in rows:
        assert abs(r["I_ww"] + r["I_wp"] + r["I_cross"] - r["I_in_out"]) <= 1e-12
    first, last = rows[0], rows[-1]
    assert first["E"] == 0 and first["I_ww"] == 0 and abs(first["I_cross"]) <= 1e-12
    p = 0.5 * 1.6
    assert first["I_wp"] == pytest.approx(1 + p * math.log2(p) + (1 - p) * math.log2(1 - p), abs=1e-12)
    assert last["E"] == 1 and abs(last["I_wp"]) <= 1e-12 and abs(last["I_cross"]) <= 1e-12


def test_tradeoff_needs_pure(capsys):
    code, _, err = run(["tradeoff", "--dwm", "0.3"], capsys)
    assert code == 2


def test_holevo_gap(tmp_path):
    out = tmp_path / "h.csv"
    assert main(["holevo-gap", "--grid", "21", "-o", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "z0,I_ww,I_wp_max_exact,I_wp_bound"
    rows = [{k: float(v) for k, v in r.items()} for r in read_csv(out)]
    for r in rows:
        assert r["I_wp_bound"] > r["I_wp_max_exact"]
    assert rows[0]["z0"] == 0 and rows[0]["I_ww"] == 0
    assert rows[-1]["z0"] == 1 and abs(rows[-1]["I_wp_max_exact"]) <= 1e-12


def test_simulate(tmp_path):
    out = tmp_path / "s.json"
    argv = ["simulate", "--scheme", "ww", "--E", "0.6", "--rounds", "1000000", "--seed", "7",
            "-o", str(out)]
    assert main(argv) == 0
    res = json.loads(out.read_text())
    assert abs(res["empirical"]["P_WW"] - 0.695) <= 4 * res["stderr"]["P_WW"]
    first = out.read_bytes()
    assert main(argv) == 0
    assert out.read_bytes() == first


def test_simulate_env_seed(tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    monkeypatch.setenv("PATHPHASE_SEED", "5")
    main(["simulate", "--scheme", "family", "--rounds", "1000", "-o", str(a)])
    main(["simulate", "--scheme", "family", "--rounds", "1000", "--seed", "5", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["seed"] == 5


def test_simulate_rejects_zero_rounds(capsys):
    code, _, err = run(["simulate", "--scheme", "ww", "--rounds", "0"], capsys)
    assert code == 2 and "rounds" in err


def test_simulate_povm_file(tmp_path, capsys):
    fixture = tmp_path / "p.json"
    fixture.write_text(json.dumps({"elements": [{"mu": 1, "R": [0, 0, 1]},
                                                {"mu": 1, "R": [0, 0, -1]}]}))
    code, out, _ = run(["simulate", "--povm", str(fixture), "--rounds", "1000"], capsys)
    assert code == 0
    assert json.loads(out)["analytic"]["P_WW"] == pytest.approx(0.825)


def test_simulate_two_detector_needs_mixed(capsys):
    code, _, _ = run(["simulate", "--scheme", "two", "--rounds", "10"], capsys)
    assert code == 2
    code, out, _ = run(["simulate", "--scheme", "two", "--dwm", "0.3", "--rounds", "1000"], capsys)
    assert code == 0 and "P_WM" in json.loads(out)["empirical"]


def test_unwritable_output(capsys):
    code, _, err = run(["tradeoff", "-o", "/nonexistent/dir/x.csv"], capsys)
    assert code == 2 and "/nonexistent/dir/x.csv" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frontier", "--grid", "lots"])
    assert exc.value.code == 2


def test_verify_small_budget(tmp_path):
    out = tmp_path / "v.json"
    code = main(["verify", "--samples", "100", "--rounds", "20000", "--mc-seeds", "3",
                 "-o", str(out)])
    report = json.loads(out.read_text())
    assert code == 0 and report["passed"]
    sweep = {c["name"]: c for c in report["checks"]}["frontier_sweep_pure"]
    assert sweep["violations"] == 0


def test_verify_corrupted_fixture(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"elements": [{"mu": 1, "R": [0, 0, 1]}, {"mu": 1, "R": [0, 0, 1]}]}))
    out = tmp_path / "v.json"
    code = main(["verify", "--samples", "100", "--rounds", "10000", "--mc-seeds", "2",
                 "--povm", str(bad), "-o", str(out)])
    assert code == 1
    assert "povm_fixture" in capsys.readouterr().err
    check = {c["name"]: c for c in json.loads(out.read_text())["checks"]}["povm_fixture"]
    assert not check["passed"] and check["constraint"] == "centroid"
