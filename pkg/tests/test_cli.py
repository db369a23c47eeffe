from __future__ import annotations

import json

import pytest

from syzkit import cli, serialize as se


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_euler_line(capsys):
    assert run(capsys, "euler") == (0, "chi=-200 (sites II=250 III=50)\n", "")
    code, out, _ = run(capsys, "euler", "--side", "mirror", "--format", "json")
    assert code == 0 and json.loads(out) == {"sites": {"II": 50, "III": 250}, "chi": 200}


def test_monodromy_prints_worked_matrix(capsys):
    code, out, _ = run(capsys, "monodromy")
    assert code == 0
    assert [list(map(int, r.split())) for r in out.splitlines()] == [[1, -1, 1], [0, 1, 0], [0, 0, 1]]
    code, out, _ = run(capsys, "monodromy", "--format", "json", "--m", "0,0,4,1,0", "--m2", "0,0,5,0,0")
    assert json.loads(out)["matrix"] == [[1, 1, -1], [0, 1, 0], [0, 0, 1]]
    code, _, err = run(capsys, "monodromy", "--m", "5,0,0,0,0")
    assert code == 1 and "invalid path" in err


def test_points_and_subdivide(capsys, tmp_path):
    code, out, _ = run(capsys, "points")
    d = json.loads(out)
    assert code == 0 and len(d["delta"]) == 126 and len(d["skeleton"]) == 105
    target = tmp_path / "sub.json"
    assert run(capsys, "subdivide", "--out", str(target))[0] == 0
    d = json.loads(target.read_text())
    assert len(d["faces"]) == 10 and all(len(f["cells"]) == 25 for f in d["faces"].values())
    code, out, _ = run(capsys, "subdivide", "--format", "svg", "--face", "3,4")
    assert code == 0 and out.startswith("<svg")


def test_subdivide_nonconvex_exit_1(capsys, tmp_path, std_weight):
    bad = std_weight.map_values(lambda p, v: v + 40 * (p == (0, 0, 1, 2, 2)))
    f = tmp_path / "w.json"
    f.write_text(json.dumps(se.weights_to_json(bad)))
    code, _, err = run(capsys, "subdivide", "--weights", str(f))
    assert code == 1 and "not convex" in err


def test_io_errors_exit_2(capsys, tmp_path):
    f = tmp_path / "w.json"
    f.write_text('{"points": [[1, 2]')
    code, _, err = run(capsys, "euler", "--weights", str(f))
    assert code == 2 and "line" in err
    code, _, _ = run(capsys, "euler", "--weights", str(tmp_path / "missing.json"))
    assert code == 2


def test_bad_arguments_exit_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["amoeba", "--grid", "10x10"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["amoeba", "--t", "-1"])
    assert exc.value.code == 2


def test_amoeba_command(capsys):
    code, out, _ = run(capsys, "amoeba", "--grid", "30x20x5", "--t", "0.1")
    d = json.loads(out)
    assert code == 0 and d["points"] == 3000 and d["segments"] == 75
    code, out, _ = run(capsys, "amoeba", "--grid", "4x4x5", "--format", "csv")
    rows = out.splitlines()
    assert rows[0] == "x,y" and len(rows) == 81
    code, _, err = run(capsys, "amoeba", "--grid", "4x4x3")
    assert code == 1 and "degree 5" in err


def test_slice_command(capsys, tmp_path):
    code, out, _ = run(capsys, "slice", "--psi", "100", "--seed", "2")
    d = json.loads(out)
    assert code == 0 and d["history"][-1] < 1e-12
    code, _, err = run(capsys, "slice", "--psi", "0.1")
    assert code == 1 and "diverged" in err


def test_mirrormap_command(capsys):
    code, out, _ = run(capsys, "mirrormap")
    assert code == 0 and json.loads(out)["same_chamber"] is True


def test_locus_command(capsys):
    code, out, _ = run(capsys, "locus")
    assert code == 0 and json.loads(out)["counts"] == {"II": 250, "III": 50, "edges": 450}


def test_w0_sets_vertex_weight(capsys):
    code, out, _ = run(capsys, "locus", "--side", "mirror", "--w0", "60")
    assert code == 0 and json.loads(out)["counts"] == {"II": 50, "III": 250, "edges": 450}
    code, _, err = run(capsys, "locus", "--side", "mirror", "--w0", "1")
    assert code == 1 and "not convex" in err
