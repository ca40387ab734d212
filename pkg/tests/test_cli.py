import csv
import json

import numpy as np
import pytest

from cmc.cli import main
from cmc.curve import DiscreteCurve, perturbed_circle, save_curve


@pytest.fixture
def curves(tmp_path):
    paths = {}
    for name, curve in (("circle", DiscreteCurve.circle(0.4, 32)), ("perturbed", perturbed_circle(0.4, 0.02, 2, 32)),
                        ("wobbly", perturbed_circle(0.6, 0.3, 2, 32))):
        paths[name] = tmp_path / f"{name}.json"
        save_curve(curve, paths[name])
    return paths


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_family_csv(tmp_path):
    out = tmp_path / "profile.csv"
    assert main(["family", "--h", "0.25", "--alpha", "0.5", "--points", "9", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["rho", "u", "H", "H_minus_asymptote"]
    assert rows[1][0] == "0" and rows[1][2] == "0"
    assert abs(float(rows[-1][3])) < 1e-5


def test_family_singular_slope_is_inf(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["family", "--h", "0.25", "--alpha", "0.1", "--points", "3", "--out", str(out)]) == 0
    assert read_csv(out)[1][1] == "inf"


def test_monotonicity(tmp_path):
    out = tmp_path / "k.csv"
    assert main(["monotonicity", "--h", "0.25", "--alpha-grid", "8", "--out", str(out)]) == 0
    rows = np.array(read_csv(out)[1:], dtype=float)
    assert rows.shape == (8, 3)
    assert np.all(np.diff(rows[:, 1]) < 0) and np.all(rows[:, 2] < 0)


def test_flow(tmp_path, curves):
    out, report = tmp_path / "evolved.json", tmp_path / "k.csv"
    assert main(["flow", "--curve", str(curves["circle"]), "--t", "0.5", "--out", str(out), "--report", str(report)]) == 0
    np.testing.assert_allclose(json.loads(out.read_text())["g"], 0.9, rtol=1e-14)
    rows = read_csv(report)
    assert rows[0] == ["theta", "k_before", "k_after_closed_form", "k_after_discrete"]
    assert len(rows) == 33


def test_admissible_circle(tmp_path, curves):
    out = tmp_path / "report.json"
    assert main(["admissible", "--curve", str(curves["circle"]), "--h", "0.25", "--report", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["verdict"] is True
    assert {"alpha", "beta", "beta_bar", "xi", "annulus", "margins", "reasons"} <= set(data)


def test_admissible_failure_exit_code(tmp_path, curves):
    out = tmp_path / "report.json"
    code = main(["admissible", "--curve", str(curves["wobbly"]), "--h", "0.25", "--report", str(out)])
    assert code == 1
    assert json.loads(out.read_text())["verdict"] is False


def test_usage_errors(capsys, tmp_path):
    assert main(["family", "--h", "0.25", "--alpha", "0.1", "--bogus"]) == 2
    assert main(["nope"]) == 2
    assert main(["family", "--h", "0.7", "--alpha", "0.1"]) == 2
    assert main(["end", "--curve", "x.json", "--h", "0.25", "--schedule", "4,a"]) == 2
    assert main(["flow", "--curve", str(tmp_path / "missing.json"), "--t", "1"]) == 2
    assert "unrecognized arguments" in capsys.readouterr().err


def test_malformed_curve_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 4,\n"g": [1, 2 3]}')
    assert main(["admissible", "--curve", str(bad), "--h", "0.25"]) == 2
    assert "line 2" in capsys.readouterr().err


def test_config_file(tmp_path, curves, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha_fraction": 0.5}))
    out = tmp_path / "r.json"
    assert main(["--config", str(cfg), "admissible", "--curve", str(curves["circle"]), "--h", "0.25",
                 "--report", str(out)]) == 0
    default = tmp_path / "d.json"
    main(["admissible", "--curve", str(curves["circle"]), "--h", "0.25", "--report", str(default)])
    assert json.loads(out.read_text())["alpha"] != json.loads(default.read_text())["alpha"]
    cfg.write_text(json.dumps({"no_such_key": 1}))
    assert main(["--config", str(cfg), "family", "--h", "0.25", "--alpha", "0.1"]) == 2
    cfg.write_text('{"n_s": 16,\n "slack": }')
    assert main(["--config", str(cfg), "family", "--h", "0.25", "--alpha", "0.1"]) == 2
    assert "line 2" in capsys.readouterr().err


def test_solve_outputs(tmp_path, curves):
    out, bar = tmp_path / "sol.csv", tmp_path / "bar.json"
    code = main(["solve", "--curve", str(curves["perturbed"]), "--h", "0.25", "--rho2", "5", "--ns", "16",
                 "--ntheta", "32", "--out", str(out), "--barriers", str(bar)])
    rows = read_csv(out)
    assert rows[0] == ["s", "theta", "rho", "u", "|grad u|"]
    assert len(rows) == 1 + 17 * 32
    data = json.loads(bar.read_text())
    assert data["residual_norm"] <= 1e-8
    # exit status mirrors the barrier verdict
    assert code == (0 if data["barriers"]["passed"] else 1)


def test_end_report(tmp_path, curves):
    out = tmp_path / "end.json"
    code = main(["end", "--curve", str(curves["perturbed"]), "--h", "0.25", "--schedule", "4,5", "--ns", "16",
                 "--ntheta", "32", "--out", str(out)])
    data = json.loads(out.read_text())
    assert code == (0 if data["cauchy"] and data["cone_condition"] else 1)
    assert len(data["sup_differences"]) == 1 and len(data["cone_table"]) == 2


def test_identical_runs_are_byte_identical(tmp_path, curves):
    outputs = []
    for run in range(2):
        out = tmp_path / f"sol{run}.csv"
        main(["solve", "--curve", str(curves["perturbed"]), "--h", "0.25", "--rho2", "5", "--ns", "12",
              "--ntheta", "32", "--out", str(out)])
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
