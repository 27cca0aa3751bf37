import json

import pytest

from nodalci.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_macaulay_growth(capsys):
    code, out, _ = run(capsys, "macaulay", "growth", "--c", "5", "--d", "3")
    data = json.loads(out)
    assert code == 0
    assert data["growth_up"] == 6 and data["epsilons"] == [1, 0, -1]
    assert data["shrink"] == 1 and data["down"] == 4


def test_macaulay_bound(capsys):
    code, out, _ = run(capsys, "macaulay", "bound", "--c", "10", "--d", "7", "--k", "4")
    assert code == 0 and json.loads(out)["low_degree_bound"] == 7
    code, _, err = run(capsys, "macaulay", "bound", "--c", "16", "--d", "7", "--k", "4")
    assert code == 2 and "exceeds" in err


def test_missing_file_is_input_error(capsys):
    code, _, err = run(capsys, "defect", "--ci", "missing.json")
    assert code == 2 and "missing.json" in err


def test_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"config": [1,\n 2')
    code, _, err = run(capsys, "defect", "--ci", str(bad))
    assert code == 2 and "line 2" in err and "column" in err


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 2


def test_verify_bound_plane_22(capsys):
    code, out, _ = run(capsys, "verify-bound", "--family", "plane", "--degrees", "2,2", "--seed", "1")
    data = json.loads(out)
    assert code == 0
    assert (data["nodes"], data["defect"], data["bound"]) == (3, 1, 3)
    assert data["passed"] is True
    assert "wall_clock" not in data["manifest"]


def test_verify_bound_csv(capsys):
    code, out, _ = run(capsys, "verify-bound", "--degrees", "2,2", "--seed", "1", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "label,k,h"
    assert "W,0,2" in lines


def test_determinism(capsys):
    argv = ("verify-bound", "--degrees", "2,3", "--seed", "7")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_generate_defect_find_nodes(capsys, tmp_path):
    paths = [str(tmp_path / n) for n in ("ci.json", "nodes.json", "prov.json")]
    code, _, _ = run(capsys, "generate", "--family", "plane", "--degrees", "2,3", "--seed", "7", "--out", *paths)
    assert code == 0
    code, out, _ = run(capsys, "defect", "--ci", paths[0], "--nodes", paths[1], "--full-report")
    data = json.loads(out)
    assert code == 0 and data["nodes"] == 7 and data["defect"] == 1
    assert data["checks"]["cynk_sandwich"] is True
    assert data["v_family"]["gorenstein_symmetry"] is True

    plane = tmp_path / "plane.json"
    plane.write_text(json.dumps([[1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]]))
    code, out, _ = run(capsys, "find-nodes", "--input", paths[0], "--field", "fp:5", "--ext", "2", "--on-plane", str(plane))
    data = json.loads(out)
    assert code == 0 and len(data["nodes"]) == 7
    assert all(nd["certified"] for nd in data["nodes"])
    assert [s["singular_points"] for s in data["scans"]] == [7, 7]


def test_find_nodes_budget(capsys, tmp_path):
    ci = tmp_path / "ci.json"
    run(capsys, "generate", "--family", "smooth", "--degrees", "2,2", "--seed", "1", "--out", str(ci), str(tmp_path / "n"), str(tmp_path / "p"))
    code, _, err = run(capsys, "find-nodes", "--input", str(ci), "--ext", "2", "--budget", "5000")
    assert code == 2 and str((25 ** 6 - 1) // 24) in err
    code, out, _ = run(capsys, "find-nodes", "--input", str(ci), "--jobs", "2")
    assert code == 0 and json.loads(out)["nodes"] == []


def test_defect_rejects_non_node(capsys, tmp_path):
    ci = tmp_path / "ci.json"
    run(capsys, "generate", "--family", "plane", "--degrees", "2,2", "--seed", "1", "--out", str(ci), str(tmp_path / "n"), str(tmp_path / "p"))
    bogus = tmp_path / "bogus.json"
    bogus.write_text(json.dumps([{"p": [[1, 1], [0, 1], [0, 1], [0, 1], [0, 1], [1, 1]]}]))
    code, _, err = run(capsys, "defect", "--ci", str(ci), "--nodes", str(bogus))
    assert code == 2 and "node 0" in err


def test_hilbert_command(capsys, tmp_path, monkeypatch):
    pts = tmp_path / "pts.json"
    pts.write_text(json.dumps({"points": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]}))
    code, out, _ = run(capsys, "hilbert", "--points", str(pts), "--degrees", "0..3")
    assert code == 0 and json.loads(out)["hilbert"]["values"] == {"0": 1, "1": 3, "2": 4, "3": 4}
    monkeypatch.setenv("NODALCI_FIELD", "fp:2")
    code, out, _ = run(capsys, "hilbert", "--points", str(pts), "--degrees", "0..2")
    data = json.loads(out)
    assert data["field"] == "fp:2" and data["manifest"]["config"]["field"] is None


def test_primes_env_override(capsys, monkeypatch):
    monkeypatch.setenv("NODALCI_PRIMES", "101,103")
    code, out, _ = run(capsys, "verify-bound", "--degrees", "2,2", "--seed", "1")
    assert code == 0 and set(json.loads(out)["ranks_by_field"]) == {"fp:101", "fp:103"}


def test_timing_flag(capsys):
    code, out, _ = run(capsys, "macaulay", "expand", "--c", "13", "--d", "6", "--timing")
    assert code == 0 and "wall_clock" in json.loads(out)["manifest"]


def test_failed_check_exit_code(capsys, monkeypatch):
    import nodalci.cli as cli

    def fake(args):
        return {"checks": {"made_up": False}}, [], None

    monkeypatch.setitem(cli.COMMANDS, "macaulay", fake)
    code, _, err = run(capsys, "macaulay", "growth", "--c", "1", "--d", "1")
    assert code == 1 and "made_up" in err


@pytest.mark.slow
def test_report_quick(capsys):
    code, out, _ = run(capsys, "report", "--seed", "1", "--quick")
    data = json.loads(out)
    assert code == 0 and data["passed"] is True
    assert len(data["examples"]) == 7
