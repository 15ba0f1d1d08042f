import io
import json
import math
import subprocess
import sys

import pytest

from wkspin.cli import dumps, main

SQ5 = math.sqrt(5.0)


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), stdout=buf)
    return code, buf.getvalue()


def run_json(*argv):
    code, out = run(*argv, "--json")
    return code, json.loads(out), out


@pytest.mark.parametrize(
    "argv, code",
    [
        (("analyze", "1", "0.809017", "1"), 0),
        (("verify", "1", "-0.3090170", "1"), 0),
        (("verify", "1", "-1", "1"), 1),
        (("verify", "1", "0", "0"), 1),
        (("verify", "0", "0", "0"), 2),
        (("verify", "1", "nan", "1"), 2),
        (("verify", "1", "x", "1"), 2),
        (("solve", "--k", "1", "--m", "1"), 0),
        (("solve", "--k", "0", "--m", "0"), 2),
        (("sasaki", "--k", "1"), 0),
        (("sasaki", "--k", "0"), 2),
        (("verify", "1", "1"), 2),
        (("bogus",), 2),
        (("verify", "1", "-0.3090170", "1", "--tol-defect", "-1"), 2),
    ],
)
def test_exit_codes(argv, code):
    assert run(*argv)[0] == code


def test_analyze_outputs():
    _, r, _ = run_json("analyze", "1", "0.809017", "1")
    assert r["result"]["S"] == pytest.approx(1 - SQ5, abs=1e-5)
    assert run_json("analyze", "1", "0", "0")[1]["result"]["class"] == "Flat"
    r = run_json("analyze", "1", "-1", "1")[1]["result"]
    assert r["class"] == "Einstein" and r["ricci"] == [2, 2, 2]


def test_verify_outputs():
    _, r, _ = run_json("verify", "1", "-0.3090170", "1")
    res = r["result"]
    assert res["verdict"] == "Pass"
    assert res["lambda_theorem"] == pytest.approx(0.8614533, abs=1e-7)
    assert res["snapped_from"] == [1, -0.309017, 1]
    assert r["conventions"] == {"clifford_sign": 1, "spin_sign": 1, "orientation": 1}
    assert "duration_s" not in r
    code, r, _ = run_json("verify", "1", "-0.3090170", "1", "--no-snap")
    assert code == 1
    code, r, _ = run_json("verify", "1", "-1", "1")
    assert r["result"]["variety_residual"] == pytest.approx(5, abs=1e-12)


def test_solve_outputs():
    _, r, _ = run_json("solve", "--k", "1", "--m", "1")
    assert [x["L"] for x in r["result"]["roots"]] == pytest.approx([(1 - SQ5) / 4, (1 + SQ5) / 4], abs=1e-10)
    _, r, _ = run_json("solve", "--k", "1", "--m", "2")
    assert len(r["result"]["roots"]) == 3


def test_sasaki_doubling():
    l1 = [x["lambda_used"] for x in run_json("sasaki", "--k", "1")[1]["result"]["reports"]]
    l2 = [x["lambda_used"] for x in run_json("sasaki", "--k", "2")[1]["result"]["reports"]]
    assert l2 == pytest.approx([2 * x for x in l1], abs=1e-9)
    reps = run_json("sasaki", "--k", "1")[1]["result"]["reports"]
    assert [x["scalar_curvature"] for x in reps] == pytest.approx([1 + SQ5, 1 - SQ5])


def test_timing_flag():
    _, r, _ = run_json("analyze", "1", "0", "0", "--timing")
    assert r["duration_s"] >= 0


def test_flags_before_subcommand():
    code, out = run("--json", "--tol-defect", "1e-9", "solve", "--k", "1", "--m", "1")
    r = json.loads(out)
    assert code == 0 and r["tolerances"]["defect_tol"] == 1e-9


def test_show_conventions():
    code, out = run("--show-conventions")
    assert code == 0 and json.loads(out) == {"clifford_sign": 1, "spin_sign": 1, "orientation": 1}


@pytest.mark.parametrize(
    "argv",
    [
        ("analyze", "1", "0.809017", "1"),
        ("verify", "1", "-0.3090170", "1"),
        ("verify", "1", "-1", "1"),
        ("solve", "--k", "1", "--m", "2"),
        ("sasaki", "--k", "1"),
    ],
)
def test_json_round_trip(argv):
    _, obj, text = run_json(*argv)
    assert dumps(obj) == text


def test_dumps_float_precision():
    x = 0.1 + 0.2
    assert json.loads(dumps({"x": x}))["x"] == x
    assert dumps({"a": [1.0, None, True, "s"]}) == dumps({"a": [1.0, None, True, "s"]})


def test_trace_files_deterministic(tmp_path):
    csv_path, svg_path = tmp_path / "m.csv", tmp_path / "m.svg"
    outs = []
    for _ in range(2):
        code, text = run("trace", "--resolution", "128", "--csv", str(csv_path),
                         "--svg", str(svg_path), "--json")
        assert code == 0
        outs.append((text, csv_path.read_bytes(), svg_path.read_bytes()))
    assert outs[0] == outs[1]
    assert json.loads(outs[0][0])["result"]["summary"] == "6 branches, 3 junctions"


def test_trace_bad_resolution():
    assert run("trace", "--resolution", "7")[0] == 2


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "wkspin", "solve", "--k", "1", "--m", "1"],
                       capture_output=True, text=True)
    assert p.returncode == 0
    assert "-0.309016994" in p.stdout
