import json
import subprocess
import sys

import pytest

from cse_kit import __version__
from cse_kit.cli import main
from cse_kit.exponents import SingularityReport

EXAMPLE = "z1^4 + z1^2*z2 + z1*z2^2 + z2^4"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_example_json(capsys):
    code, out, err = run(capsys, "analyze", "--poly", EXAMPLE)
    assert code == 0
    blob = json.loads(out)
    assert blob["schema"] == "cse-kit/1" and blob["version"] == __version__
    assert blob["config"]["command"] == "analyze" and blob["config"]["n"] == 2
    rep = blob["report"]
    assert (rep["c0"], rep["d0"], rep["m0"]) == ("2/3", "3/2", 1)
    assert rep["coordinates"][0]["classification"] == "TendsToTwo"


def test_report_round_trip(capsys):
    _, out, _ = run(capsys, "analyze", "--poly", EXAMPLE)
    rep = json.loads(out)["report"]
    assert SingularityReport.from_dict(rep).to_dict() == rep


def test_text_format(capsys):
    code, out, err = run(capsys, "analyze", "--poly", EXAMPLE, "--format", "text")
    assert code == 0
    assert "K ≍ r^(-8/3) · |log r|^0" in out
    assert "23/12" in out
    assert "warning" not in out


def test_warnings_go_to_stderr(capsys):
    code, out, err = run(capsys, "analyze", "--poly", "z1^2 z2^2")
    assert code == 0 and "warning:" in err
    json.loads(out)


def test_siegel(capsys):
    code, out, _ = run(capsys, "analyze", "--poly", "z1", "-n", "1")
    rep = json.loads(out)["report"]
    assert rep["kernel_law"]["power"] == "-3/1"


def test_exit_codes(capsys):
    code, out, err = run(capsys, "analyze", "--poly", "z1 + * z2")
    assert code == 1 and out == "" and "^" in err
    code, out, err = run(capsys, "analyze", "--poly", "(z1 + z2)^2")
    assert code == 2 and out == "" and "charts" in err
    code, _, _ = run(capsys, "analyze", "--poly", "z1", "--format", "csv")
    assert code == 1
    code, _, _ = run(capsys, "verify", "--poly", "z1", "--samples", "10")
    assert code == 1


def test_degenerate_with_charts(capsys, tmp_path):
    p = tmp_path / "c.json"
    p.write_text("[[[2,0,0],[1,1,0]]]")
    code, out, _ = run(capsys, "analyze", "--poly", "(z1 + z2)^2", "--charts", str(p))
    assert code == 0 and json.loads(out)["report"]["method"] == "charts"


def test_newton_command(capsys):
    code, out, _ = run(capsys, "newton", "--poly", EXAMPLE)
    data = json.loads(out)["polyhedron"]
    assert len(data["vertices"]) == 4
    assert sum(f["compact"] for f in data["facets"]) == 3
    code, out, _ = run(capsys, "newton", "--poly", "z1^2 z2^3")
    assert len(json.loads(out)["polyhedron"]["vertices"]) == 1


def test_newton_real(capsys):
    code, out, _ = run(capsys, "newton", "--real", "--series", "x^8+x^4y^2+x^2y^6+y^10")
    real = json.loads(out)["real"]
    assert (real["d0"], real["delta"], real["d0_differs_from_delta"]) == ("10/3", "3/1", True)


def test_charts_command(capsys, tmp_path):
    ident = tmp_path / "id.json"
    ident.write_text("[[[1,0,0],[1,0,0]]]")
    code, out, _ = run(capsys, "charts", "--tau", "0", str(ident))
    res = json.loads(out)["charts"]["results"][0]
    assert code == 0 and (res["beta"], res["alpha"]) == ("1/1", 2)
    two = tmp_path / "two.json"
    two.write_text('{"charts": [[[1,0,0]], [[2,1,0]]]}')
    code, out, _ = run(capsys, "charts", "--tau", "0", str(two))
    res = json.loads(out)["charts"]["results"][0]
    assert (res["beta"], res["alpha"]) == ("1/1", 1)
    assert res["law_r"]["power"] == "2/1"
    bad = tmp_path / "bad.json"
    bad.write_text("[[[0,1,0],[0,0,0]]]")
    code, _, err = run(capsys, "charts", str(bad))
    assert code == 1 and "a_j = 0" in err


def test_recenter_command(capsys):
    code, out, _ = run(capsys, "recenter", "--poly", "z1^2", "-n", "1", "--at", "1", "--format", "text")
    assert out.strip() == "z1^2 + 2*z1"


def test_verify_pass_and_negative_control(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--poly", "z1", "-n", "1", "--samples", "200000")
    assert code == 0 and json.loads(out)["verify"]["passed"]
    _, out, _ = run(capsys, "analyze", "--poly", "z1", "-n", "1")
    blob = json.loads(out)
    blob["report"]["c0"] = "3/2"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(blob))
    code, out, err = run(capsys, "verify", "--report", str(path), "--samples", "200000")
    assert code == 3 and "failed" in err
    rows = {r["quantity"]: r["pass"] for r in json.loads(out)["verify"]["rows"]}
    assert rows == {"volume_power": False, "volume_logpow": True, "report_consistent": False}


def test_verify_csv(capsys):
    code, out, _ = run(capsys, "verify", "--poly", "z1", "-n", "1", "--samples", "100000",
                       "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "r,volume,stderr,hits"
    assert len(out.splitlines()) == 12


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "cse_kit.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
