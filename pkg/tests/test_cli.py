import json
import math

import numpy as np
import pytest

from systolic import fields
from systolic.cli import main, metric_from_config


def write_config(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


TRIG_CFG = {"lattice": {"basis": [[1, 0], [0, 1]]},
            "grid": {"nu": 32, "nv": 32},
            "factor": {"family": "trig", "eps": 0.3, "k": 0, "l": 1}}


def test_metric_from_config_tau_and_basis(tmp_path):
    m = metric_from_config({"lattice": {"tau": [0.5, math.sqrt(3) / 2]},
                            "grid": {"nu": 16, "nv": 16},
                            "factor": {"family": "constant", "c": 1.0}})
    assert m.lattice.coarea == pytest.approx(1.0)
    m = metric_from_config({"lattice": {"basis": [[2, 0], [0, 2]]},
                            "grid": {"nu": 16, "nv": 16},
                            "factor": {"family": "constant", "c": 1.0}})
    # bases are normalized to unit coarea
    assert m.lattice.coarea == pytest.approx(1.0)


def test_metric_from_grid_file(tmp_path, trig_v_64):
    gpath = tmp_path / "f.grid"
    fields.write_grid(gpath, trig_v_64.f)
    m = metric_from_config({"factor": {"grid_file": str(gpath)}})
    assert np.array_equal(m.values, trig_v_64.values)


def test_verify_exit_codes(tmp_path, capsys):
    cfg = write_config(tmp_path, TRIG_CFG)
    assert main(["verify", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "sys" in out and "var(f)" in out


def test_systole_emit_path(tmp_path, capsys):
    cfg = write_config(tmp_path, TRIG_CFG)
    out_csv = tmp_path / "path.csv"
    assert main(["systole", "--config", cfg, "--emit-path", str(out_csv)]) == 0
    rows = out_csv.read_text().strip().splitlines()
    pts = np.array([[float(x) for x in r.split(",")] for r in rows])
    assert pts.shape[1] == 2
    # path connects a point to its translate by the witness class (1, 0)
    assert np.allclose(pts[-1] - pts[0], (1.0, 0.0), atol=1e-9)
    assert "sys = 0.7" in capsys.readouterr().out


def test_corpus_csv(tmp_path, capsys):
    out_csv = tmp_path / "corpus.csv"
    code = main(["corpus", "--count", "3", "--seed", "11",
                 "--nu", "32", "--nv", "32", "--out", str(out_csv)])
    assert code == 0
    lines = out_csv.read_text().strip().splitlines()
    assert lines[0].startswith("index,tau_re,tau_im,area,sys")
    assert len(lines) == 4


def test_curvature_grid_output(tmp_path):
    cfg = write_config(tmp_path, TRIG_CFG)
    out = tmp_path / "K.grid"
    assert main(["curvature", "--config", cfg, "--out", str(out)]) == 0
    K = fields.read_grid(out)
    assert K.nu == 32 and K.nv == 32


def test_sweep_csv_deterministic(tmp_path):
    out1 = tmp_path / "s1.csv"
    out2 = tmp_path / "s2.csv"
    main(["sweep", "--alpha", "4", "--rho", "0.8", "--samples", "5",
          "--seed", "42", "--out", str(out1)])
    main(["sweep", "--alpha", "4", "--rho", "0.8", "--samples", "5",
          "--seed", "42", "--out", str(out2)])
    assert out1.read_text() == out2.read_text()
    lines = out1.read_text().strip().splitlines()
    assert lines[0] == "id,degree,l2norm,variance"
    assert lines[1].startswith("riemann,")
    assert len(lines) == 7


def test_average_check_builtin(capsys):
    assert main(["average-check", "--field", "riemann", "--radius", "0.8",
                 "--alpha", "4", "--nr", "96", "--ntheta", "32"]) == 0
    out = capsys.readouterr().out
    assert "Jensen" in out and "idempotent : ok" in out


def test_average_check_grid_file(tmp_path, flat_z2_64, capsys):
    # a flat factor keeps the resampled curvature at interpolation-noise
    # level, so the hypothesis check is robust on the grid-file path
    gpath = tmp_path / "f.grid"
    fields.write_grid(gpath, flat_z2_64.f)
    code = main(["average-check", "--grid", str(gpath),
                 "--center", "0.5", "0.5", "--radius", "0.2",
                 "--alpha", "-1", "--nr", "64", "--ntheta", "32"])
    assert code == 0
    assert "hypothesis" in capsys.readouterr().out
