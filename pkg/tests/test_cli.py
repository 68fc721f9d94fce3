import json

import pytest

from revolute.bessel_ref import bessel_zero
from revolute.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_disc_spectrum(capsys):
    code, out, _ = run(capsys, "disc-spectrum", "--radius", "1", "--num", "5")
    assert code == 0
    rows = json.loads(out)["rows"]
    # one row per eigenvalue counted with multiplicity
    assert [(r["k"], r["n"]) for r in rows] == [(0, 1), (1, 1), (1, 1), (2, 1), (2, 1)]
    # [DERIVED] lambda = j_{k,n}^2
    assert rows[1]["lambda"] == pytest.approx(bessel_zero(1, 1) ** 2, rel=1e-14)
    assert rows[1]["multiplicity"] == 2


def test_disc_spectrum_csv(capsys):
    code, out, _ = run(capsys, "disc-spectrum", "--num", "2", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "j,lambda,k,n,multiplicity"


@pytest.mark.parametrize("argv", [
    ("disc-spectrum", "--num", "0"),
    ("disc-spectrum", "--radius", "-1", "--num", "2"),
    ("spectrum", "--num", "3"),
    ("pipeline", "--family", "disc", "--K", "1"),
    ("trace", "--family", "disc", "--K", "0", "--N", "1"),
    ("spectrum", "--family", "cone", "--seed", "3", "--num", "2"),
    ("spectrum", "--family", "cone", "--param", "L=0.5", "--num", "2"),
    ("verify", "--suite", "nope"),
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_bad_curve_file(capsys, tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"t": [0, 1],\n "F": [1, 0]\n "G": [0, 0]}')
    code, _, err = run(capsys, "spectrum", "--curve", str(p), "--num", "2")
    assert code == 2 and "line 3" in err


def test_curve_file_without_type(capsys, tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"t": [0, 1], "F": [1, 0], "G": [0, 0]}')
    assert run(capsys, "spectrum", "--curve", str(p), "--num", "2")[0] == 2


def test_missing_curve_file(capsys, tmp_path):
    assert run(capsys, "spectrum", "--curve", str(tmp_path / "none.json"), "--num", "2")[0] == 1


def test_curve_file_round_trip(capsys, tmp_path):
    p = tmp_path / "disc.json"
    p.write_text(json.dumps({"type": "sampled", "t": [0.0, 0.25, 0.5, 0.75, 1.0], "F": [1.0, 0.75, 0.5, 0.25, 0.0],
                             "G": [0.0] * 5}))
    code, out, _ = run(capsys, "spectrum", "--curve", str(p), "--num", "1")
    assert code == 0 and json.loads(out)["rows"][0]["k"] == 0


def test_compare_hemisphere(capsys):
    code, out, _ = run(capsys, "compare", "--family", "spherical_cap", "--param", "radius=1",
                       "--param", "angle=1.5707963267948966", "--num", "6", "--grid", "1024")
    assert code == 0
    assert json.loads(out)["verdict"] == "THEOREM_CONSISTENT"


def test_compare_disc(capsys):
    code, out, _ = run(capsys, "compare", "--family", "disc", "--num", "4", "--grid", "512")
    assert code == 0 and json.loads(out)["verdict"] == "DISC"


def test_pipeline_deterministic(capsys, tmp_path):
    args = ("pipeline", "--family", "bumped_disc", "--seed", "7", "--K", "1", "--N", "2",
            "--grid", "1024", "--s-samples", "8")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    obj = json.loads(a.read_text())
    assert obj["K"] == 1 and obj["N"] == 2 and len(obj["trace"]["s"]) == 8


def test_trace_csv(capsys):
    code, out, _ = run(capsys, "trace", "--family", "spherical_cap", "--K", "1", "--N", "1",
                       "--grid", "512", "--s-samples", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "s,L_star,lambda,dini" and len(lines) == 5


def test_verify_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "mu-lambda")
    assert code == 0 and json.loads(out)["passed"] is True


def test_version(capsys):
    assert run(capsys, "--version")[0] == 0
