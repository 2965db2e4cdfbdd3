from __future__ import annotations

import csv
import io
import math
import shutil
from pathlib import Path

import pytest

from quadgraph.cli import run_command
from quadgraph.io import parse_graph

DATA = Path(__file__).resolve().parents[1] / "data"


def run(*argv):
    buf = io.StringIO()
    code = run_command([str(a) for a in argv], out=buf)
    return code, buf.getvalue()


def lines(text):
    return dict(line.split(": ", 1) for line in text.splitlines() if ": " in line)


def test_verify_hexagon_passes():
    code, text = run("verify", DATA / "hexagon.graph")
    assert code == 0
    report = lines(text)
    assert report["status"] == "pass"
    assert report["isostate"] == "yes (gamma = 10/9)"


def test_verify_failure_exits_one(tmp_path):
    bad = (DATA / "hexagon.graph").read_text().replace("gamma 10/9", "gamma 1")
    path = tmp_path / "bad.graph"
    path.write_text(bad)
    code, text = run("verify", path)
    assert code == 1
    assert lines(text)["status"] == "fail"


def test_spectrum_of_k33():
    code, text = run("spectrum", DATA / "k33.graph", "--membership")
    assert code == 0
    report = lines(text)
    assert "p(g) = 9g^3 - 35g^2 + 43g - 17" in text.splitlines()
    # 17/9 carries the real witness (0, 1, 0; -1/6, 5/6, 5/6), so it is reported as a member
    assert report["roots"] == "1 (member), 17/9 (member)"


def test_spectrum_budget_is_enforced():
    code, _ = run("spectrum", DATA / "k33.graph", "--budget", "0")
    assert code == 1


def test_lift_of_an_outer_vertex():
    code, text = run("lift", DATA / "lift.graph", "--vertex", "p")
    assert code == 0
    report = lines(text)
    row = [float(x) for x in report["row 3"].split()]
    expected = [2 / math.sqrt(3), -1 / math.sqrt(3), -1 / math.sqrt(3)]
    assert row == pytest.approx(expected) or row == pytest.approx([-x for x in expected])
    assert float(report["residual"]) <= 1e-9


def test_lift_in_four_dimensions():
    code, text = run("lift", DATA / "lift.graph", "--vertex", "c", "--dim", "4")
    assert code == 0
    row = [abs(float(x)) for x in lines(text)["row 4"].split()]
    assert row == pytest.approx([1 / math.sqrt(2)] * 4)


def test_lift_unknown_vertex_fails():
    code, _ = run("lift", DATA / "lift.graph", "--vertex", "zz")
    assert code in (1, 2)


def test_distance_and_energy():
    code, text = run("distance", DATA / "lift.graph", "--from", "p", "--to", "r")
    assert code == 0
    expected = math.sqrt(7) / 2 + math.sqrt(7 / 3)
    assert float(lines(text)["distance"]) == pytest.approx(expected, abs=1e-10)
    code, text = run("energy", DATA / "lift.graph")
    assert code == 0
    assert "total" in lines(text)


def test_curvature_reports_undefined_vertices():
    code, text = run("curvature", DATA / "hexagon.graph", "--dim", "2")
    assert code == 1
    assert lines(text)["total"] == "undefined"


def test_curvature_of_a_generated_tetrahedron(tmp_path):
    path = tmp_path / "tet.graph"
    assert run("generate", "schlafli", 3, 3, "--out", path)[0] == 0
    doc = parse_graph(path.read_text())
    assert len(doc.vertices) == 4
    code, text = run("curvature", path, "--dim", "3")
    assert code == 0
    assert float(lines(text)["total"]) == pytest.approx(2)


def test_flow_descends_to_the_star_pentagon(tmp_path):
    out = tmp_path / "flow.csv"
    code, _ = run("flow", "--order", 5, "--angles", "2.6,2.6", "--steps", 1000, "--rate", 0.01,
                  "--direction", "down", "--out", out)
    assert code == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == ["iter", "E", "sigma_1", "sigma_2"]
    body = [r for r in rows[1:] if not r[0].startswith("#")]
    energies = [float(r[1]) for r in body]
    assert all(b < a for a, b in zip(energies, energies[1:]))
    last = [float(x) for x in body[-1][2:]]
    assert last == pytest.approx([4 * math.pi / 5] * 2, abs=1e-6)


def test_flow_usage_errors():
    assert run("flow", "--order", 5, "--angles", "2.6")[0] == 2
    assert run("flow", "--order", 5, "--angles", "a,b")[0] == 2


def test_generate_is_deterministic_for_a_seed():
    a = run("--seed", 3, "generate", "double-cone", 5)[1]
    b = run("--seed", 3, "generate", "double-cone", 5)[1]
    c = run("--seed", 4, "generate", "double-cone", 5)[1]
    assert a == b and a != c
    code, text = run("generate", "real-cyclic", 1, 2)
    assert code == 0 and "gamma 10/9" in text


def test_generate_unknown_kind_is_a_usage_error():
    assert run("generate", "dodecagon")[0] == 2


def test_cyclic_spectrum_of_the_hexagon():
    code, text = run("cyclic", "--order", 6)
    assert code == 0
    gammas = [line.split()[1] for line in text.splitlines() if line.startswith("gamma:")]
    assert gammas == ["-2", "2/3", "1", "10/9", "2"]
    assert run("cyclic", "--order", 2)[0] == 2


def test_universe_script_replays(tmp_path):
    for name in ("evolution.txt", "kite.graph", "braced-kite.graph"):
        shutil.copy(DATA / name, tmp_path / name)
    code, text = run("universe", tmp_path / "evolution.txt")
    assert code == 0
    assert text.splitlines()[-1] == "status: pass"
    assert "16 edges" not in text and "12 edges" in text


def test_universe_script_errors(tmp_path):
    script = tmp_path / "bad.txt"
    script.write_text("mutate Q add a-b\n")
    code, _ = run("universe", script)
    assert code in (1, 2)


def test_usage_errors_exit_two():
    assert run()[0] == 2
    assert run("nonsense")[0] == 2
    assert run("verify", "/nonexistent/file.graph")[0] == 2


def test_outputs_are_identical_across_runs():
    for argv in (("verify", DATA / "hexagon.graph"), ("energy", DATA / "lift.graph"),
                 ("lift", DATA / "lift.graph", "--vertex", "c")):
        assert run(*argv) == run(*argv)
