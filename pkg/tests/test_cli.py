import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from dirichlet_yang import cli
from dirichlet_yang.network import HostNetwork
from dirichlet_yang.randomnet import random_network


def run(args, capsys):
    code = cli.main(args)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_spectrum_tree(capsys):
    code, out, _ = run(["spectrum", "--group", "tree:3", "--radius", "1"], capsys)
    assert code == 0
    lam = [float(r["lambda_k"]) for r in rows(out)]
    assert lam == pytest.approx([1 - 1 / math.sqrt(3), 1, 1, 1 + 1 / math.sqrt(3)], abs=1e-12)


def test_spectrum_interval(capsys):
    code, out, _ = run(["spectrum", "--group", "zn:1", "--radius", "2"], capsys)
    lam = [float(r["lambda_k"]) for r in rows(out)]
    assert lam == pytest.approx([1 - math.cos(k * math.pi / 6) for k in range(1, 6)], abs=1e-12)
    assert all(float(r["residual"]) < 1e-12 for r in rows(out))


def test_spectrum_network_file(tmp_path, capsys):
    path = tmp_path / "path.json"
    # two interior vertices of the simple walk on Z plus their two outer neighbours
    path.write_text(json.dumps({"vertices": 4, "pi": [1, 1, 1, 1],
                                "edges": [[0, 1, 0.5], [1, 2, 0.5], [2, 3, 0.5]], "interior": [1, 2]}))
    code, out, _ = run(["spectrum", "--network", str(path)], capsys)
    assert code == 0
    assert [float(r["lambda_k"]) for r in rows(out)] == pytest.approx([0.5, 1.5], abs=1e-14)


def test_verify_yang_type_tree(capsys):
    code, out, err = run(["verify", "yang-type", "--group", "tree:3", "--radius", "3"], capsys)
    assert code == 0 and err.startswith("PASS 21/21")
    first = rows(out)[0]
    assert json.loads(first["constants"])["C_YT"] == 8 * math.sqrt(2) / 3
    assert list(first) == ["instance_id", "inequality", "k", "lhs", "rhs", "slack",
                           "hypothesis_ok", "constants", "passed"]


def test_verify_main_bound_random(capsys):
    code, out, err = run(["verify", "main-bound", "--random", "--vertices", "8", "--seed", "7",
                          "--alpha", "random:3"], capsys)
    assert code == 0 and err.startswith("PASS")
    assert all(r["inequality"] == "main-bound" for r in rows(out))


def test_verify_ppw_flags_gated_rows(capsys):
    code, out, err = run(["verify", "ppw", "--group", "zn:2", "--radius", "3"], capsys)
    assert code == 0 and err.startswith("PASS")
    flags = {r["hypothesis_ok"] for r in rows(out)}
    assert flags <= {"true", "false"} and "true" in flags


def test_verify_reports_failure(capsys):
    code, _, err = run(["verify", "yang-type", "--group", "zn:1", "--radius", "4",
                        "--constant", "C_YT=0.01"], capsys)
    assert code == 1
    assert err.startswith("FAIL") and "min slack" in err and "k=" in err


def test_verify_all_and_k_selection(capsys):
    code, out, _ = run(["verify", "--group", "heisenberg", "--radius", "1", "--k", "1-2,4"], capsys)
    assert code == 0
    got = rows(out)
    assert {r["inequality"] for r in got} >= {"main-bound", "yang", "yang-type", "abelian-quotient", "trace"}
    assert {int(r["k"]) for r in got if r["inequality"] == "yang"} == {1, 2, 4}


def test_unknown_inequality_rejected_at_parse_time(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "cheeger", "--group", "zn:1", "--radius", "2"])
    assert exc.value.code == 2
    assert "unknown inequality" in capsys.readouterr().err


@pytest.mark.parametrize("args", [
    ["spectrum"],
    ["spectrum", "--group", "tree:2", "--radius", "1"],
    ["spectrum", "--group", "zn:1", "--radius", "40", "--interior", "box:3x"],
    ["spectrum", "--network", "/nonexistent.json"],
    ["verify", "yang", "--group", "tree:3", "--radius", "2"],
    ["audit", "--network", "NET"],
])
def test_errors_exit_2(args, capsys, tmp_path):
    if "NET" in args:
        path = tmp_path / "n.json"
        random_network(6, 1).dump(path)
        args = [str(path) if a == "NET" else a for a in args]
    code, _, err = run(args, capsys)
    assert code == 2 and err.startswith("error:")


def test_bounds_interval(capsys):
    code, out, _ = run(["bounds", "--group", "zn:1", "--interior", "interval:10"], capsys)
    assert code == 0
    table = rows(out)
    assert len(table) == 9
    for r in table:
        lam = float(r["lambda_next"])
        for col in ("lambda2_bound", "yang_second_bound", "ppw_bound", "ratio_bound"):
            if r[col]:
                assert float(r[col]) >= lam - 1e-9


def test_bounds_warns_on_empty_ratio_gate(capsys):
    code, out, err = run(["bounds", "--group", "tree:3", "--radius", "2", "--constant", "delta=0.99"], capsys)
    assert code == 0 and "warning" in err
    assert all(r["ratio_bound"] == "" for r in rows(out))


def test_bounds_heisenberg_abelian_slack(capsys):
    code, out, _ = run(["bounds", "--group", "heisenberg", "--radius", "3"], capsys)
    assert code == 0
    assert all(float(r["abelian_quotient_slack"]) >= -1e-9 for r in rows(out))


def test_audit(capsys):
    code, out, err = run(["audit", "--group", "tree:3", "--radius", "2", "--k", "1-4"], capsys)
    assert code == 0 and "PASS 4/4" in err
    assert all(r["passed"] == "true" for r in rows(out))


def test_json_output_and_out_file(tmp_path, capsys):
    out_path = tmp_path / "r.json"
    code, out, _ = run(["verify", "yang", "--group", "zn:1", "--radius", "2", "--format", "json",
                        "--out", str(out_path)], capsys)
    assert code == 0 and out == ""
    data = json.loads(out_path.read_text())
    assert data[0]["inequality"] == "yang" and data[0]["constants"]["C_Y"] == 12.0


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "group": {"family": "zn", "n": 1, "measure": [["s1", 0.25], ["s1^-1", 0.25], ["s1^2", 0.25], ["s1^-2", 0.25]]},
        "interior": [[0], [1], [2], [3], [4]],
        "inequalities": ["yang"],
        "k_range": [1, 3],
        "output": {"format": "csv"},
    }))
    code, out, _ = run(["verify", "--config", str(cfg)], capsys)
    assert code == 0
    got = rows(out)
    assert [int(r["k"]) for r in got] == [1, 3]
    assert json.loads(got[0]["constants"])["C_Y"] == 24.0


def test_config_inline_network_and_flag_precedence(tmp_path, capsys):
    net = random_network(8, 3)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"group": net.to_json_dict(), "inequalities": ["trace"], "format": "json"}))
    code, out, _ = run(["verify", "--config", str(cfg), "--format", "csv"], capsys)
    assert code == 0 and out.startswith("instance_id,")


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"group": "zn:1", "radius": 2, "colour": "red"}))
    code, _, err = run(["spectrum", "--config", str(cfg)], capsys)
    assert code == 2 and "colour" in err


def test_network_round_trip_gives_identical_reports(tmp_path, capsys):
    net = random_network(9, 21)
    first, second = tmp_path / "exported.json", tmp_path / "reimported.json"
    net.dump(first)
    HostNetwork.load(first).dump(second)
    outs = []
    for path in (first, second):
        code, out, _ = run(["verify", "main-bound", "trace", "--network", str(path), "--alpha", "random:2",
                            "--seed", "4"], capsys)
        assert code == 0
        outs.append(out.replace(path.stem, "NET"))
    assert outs[0] == outs[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dirichlet_yang", "spectrum", "--group", "tree:3", "--radius", "0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines() == ["k,lambda_k,residual", "1,1.0,0.0"]


def test_parse_k():
    assert cli.parse_k("all") is None
    assert cli.parse_k("3") == [3]
    assert cli.parse_k("1-3,7") == [1, 2, 3, 7]
    assert cli.parse_k([2, 5]) == [2, 5]
    assert np.array_equal(cli.parse_k("2-2"), [2])
