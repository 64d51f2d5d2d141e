import json
import subprocess
import sys

import pytest

from cheegerkit.cli import main, run_to_string
from cheegerkit.verify import CHECKS


def _json(argv):
    return json.loads(run_to_string(argv))


def test_deterministic_output():
    out = CHECKS["cli.deterministic_output"][1]()
    assert out.ok, out.detail


def test_exit_codes():
    out = CHECKS["cli.exit_codes"][1]()
    assert out.ok, out.detail


def test_generate_hypercube(tmp_path):
    data = _json(["generate", "--hypercube", "4", "--skeleton", "2"])
    assert data["schema_version"] == 1
    assert sum(len(c) for c in data["cells"]) == 72
    path = tmp_path / "cube.json"
    path.write_text(json.dumps(data))
    h = _json(["homology", "--input", str(path)])
    assert h["groups"]["2"]["betti"] == 7


def test_analyze_tetrahedron_boundary():
    data = _json(["analyze", "--simplex-boundary", "3"])
    assert data["counts"] == [4, 6, 4]
    assert data["homology"]["2"]["group"] == "Z"
    ch = data["cheeger"]
    assert ch["0"]["value"] == "2" and ch["1"]["value"] == "2" and ch["2"]["value"] == "0"
    assert ch["1"]["witness_verified"]


def test_analyze_l2_matches_spectral():
    data = _json(["analyze", "--simplex-boundary", "3", "--p", "2"])
    for i in ("0", "1"):
        assert float(data["cheeger"][i]["value"]) == pytest.approx(float(data["cheeger"][i]["spectral_value"]))


def test_cheeger_sup_norm_coexact():
    data = _json(["cheeger", "--named", "rp2-6", "--dim", "1", "--coboundary", "--variant", "coexact",
                  "--p", "inf", "--method", "lp-enum", "--cap", "40"])
    assert data["value"]["value"] == "2" and data["value"]["witness_verified"]


def test_cover_doubles_cells():
    data = _json(["cover", "--named", "rp2-6"])
    assert data["cover_counts"] == [2 * n for n in data["base_counts"]]
    assert all(data["checks"].values())


def test_surgery_csv():
    text = run_to_string(["surgery", "--link", "hopf", "--q-range", "2:4", "--format", "csv"])
    assert text.splitlines() == [
        "q,order,group,rational_homology_sphere",
        "2,3,Z/3,True",
        "3,8,Z/8,True",
        "4,15,Z/15,True",
    ]


def test_homology_csv():
    text = run_to_string(["homology", "--named", "rp2-6", "--format", "csv"])
    assert text.splitlines()[2] == "1,0,2,Z/2"


def test_fill_and_infeasible_fill(capsys):
    assert main(["fill", "--named", "rp2-6", "--dim", "1", "--cells", "0:1"]) == 1
    capsys.readouterr()
    X = ["fill", "--simplex-boundary", "2", "--dim", "0", "--cells", "0:1,1:-1"]
    assert main(X) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["filling"]["feasible"] and data["filling"]["value"] == "1"


def test_input_errors(tmp_path, capsys):
    empty = tmp_path / "empty.json"
    empty.write_text("")
    assert main(["analyze", "--input", str(empty)]) == 3
    assert main(["homology", "--named", "no-such-space"]) == 3
    assert main(["cover", "--named", "torus-7"]) == 3
    assert main(["surgery", "--link", "unknot", "--contract", "1", "--q", "0"]) == 3
    assert main(["frobnicate"]) == 2
    err = capsys.readouterr().err
    assert "error" in err


def test_output_file(tmp_path):
    out = tmp_path / "o.json"
    assert main(["homology", "--named", "rp2-6", "--output", str(out)]) == 0
    assert json.loads(out.read_text())["command"] == "homology"


def test_hypercube_subcommands():
    c = _json(["hypercube", "contract", "--deg", "3", "--word", "0,1,0,1"])
    assert c["squares"] == 1 and c["verified"]
    d = _json(["hypercube", "decompose", "--deg", "4", "--cell", "0", "--tol", "1e-6"])
    assert d["verified"]


def test_fibration_subcommand():
    data = _json(["fibration", "prism"])
    assert data["ok"]


def test_verify_suites(capsys):
    assert main(["verify", "--suite", "surgery"]) == 0
    assert main(["verify", "--suite", "transport"]) == 0
    capsys.readouterr()


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "cheegerkit", "homology", "--named", "rp2-6", "--format", "csv"],
                         capture_output=True, text=True, check=True)
    assert "Z/2" in res.stdout


def test_surgery_inline_matrix_and_file(tmp_path, capsys):
    data = _json(["surgery", "--matrix", "[[0,1],[1,0]]", "--contract", "1,0", "--q", "4"])
    assert data["contraction"]["factor_bound"] == "1/4" and data["contraction"]["converged"]
    f = tmp_path / "lk.csv"
    f.write_text("0,1\n1,0\n")
    text = run_to_string(["surgery", "--matrix", str(f), "--q-range", "3:3", "--format", "csv"])
    assert text.splitlines()[1] == "3,8,Z/8,True"
    assert main(["surgery", "--matrix", "[[0,1],[2,0]]"]) == 3
    capsys.readouterr()
