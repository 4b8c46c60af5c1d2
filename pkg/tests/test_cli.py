import json
import math

import numpy as np
import pytest

from kramers_moments import solve_kramers
from kramers_moments.cli import main

KN = 1.0 / math.sqrt(2.0)


def read_csv(path):
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def test_solve_emits_coefficient_block(tmp_path):
    out = tmp_path / "sol.json"
    code = main(["solve", "--order", "5", "--chi", "1.0", "--output", str(out)])
    assert code == 0
    block = json.loads(out.read_text())
    assert set(block) == {"order", "chi", "kn", "sigma12", "c0", "modes"}
    assert block["order"] == 5
    assert block["modes"][0]["lambda_hat"] == pytest.approx(math.sqrt(7), rel=1e-14)
    sol = solve_kramers(5, 1.0, block["kn"])
    assert block["c0"] == sol.c0
    assert block["modes"][0]["c_hat"] == sol.c_hat[0]


def test_profile_columns_and_identity(tmp_path):
    out = tmp_path / "profile.csv"
    code = main(
        ["profile", "--order", "8", "--chi", "0.6", "--y-max", "6.0", "--n-points", "25", "--output", str(out)]
    )
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["y", "u_tilde", "u_defect", "mu_eff_ratio"]
    assert len(rows) == 25
    meta = json.loads((tmp_path / "profile.csv.meta.json").read_text())
    block = meta["coefficients"]
    # emitted observables are reproducible from the emitted coefficient block
    zeta = -block["kn"] * block["c0"] / block["sigma12"]
    for row in rows:
        y, u_tilde, u_defect, mu = (float(v) for v in row)
        assert u_tilde - (y + zeta - u_defect) == pytest.approx(0.0, abs=1e-13)
        defect = -2.0 * block["kn"] / block["sigma12"] * sum(
            m["c_hat"] * math.exp(-y / (block["kn"] * m["lambda_hat"])) for m in block["modes"]
        )
        assert u_defect == pytest.approx(defect, rel=1e-13, abs=1e-300)


def test_profile_order3_has_zero_defect(tmp_path):
    out = tmp_path / "p3.csv"
    assert main(["profile", "--order", "3", "--output", str(out)]) == 0
    _, rows = read_csv(out)
    assert all(float(r[2]) == 0.0 for r in rows)
    assert all(float(r[3]) == 1.0 for r in rows)


def test_profile_chi_ordering(tmp_path):
    # smaller accommodation -> larger normalized velocity, pointwise
    profiles = {}
    for chi in (0.2, 0.4, 0.6, 0.8, 1.0):
        out = tmp_path / f"p{chi}.csv"
        assert main(
            ["profile", "--order", "8", "--chi", str(chi), "--y-max", "8.0", "--n-points", "30", "--output", str(out)]
        ) == 0
        _, rows = read_csv(out)
        profiles[chi] = np.array([float(r[1]) for r in rows])
    chis = sorted(profiles)
    for lo, hi in zip(chis, chis[1:]):
        assert np.all(profiles[lo] > profiles[hi])


def test_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["profile", "--order", "9", "--chi", "0.37", "--n-points", "40", "--y-max", "11.0"]
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_slip_sweep(tmp_path):
    out = tmp_path / "slip.csv"
    code = main(
        ["slip-sweep", "--orders", "4,5,8", "--chis", "1.0,0.5", "--output", str(out)]
    )
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["M", "chi", "kn", "zeta", "status"]
    # deterministic order: M outer, chi inner
    assert [(r[0], r[1]) for r in rows] == [
        ("4", "1.0"), ("4", "0.5"), ("5", "1.0"), ("5", "0.5"),
        ("8", "1.0"), ("8", "0.5"),
    ]
    assert all(r[4] == "ok" for r in rows)
    z4 = float(rows[0][3])
    assert z4 == pytest.approx(solve_kramers(4, 1.0, KN).slip_coefficient(), rel=1e-15)
    meta = json.loads((tmp_path / "slip.csv.meta.json").read_text())
    assert len(meta["coefficients"]) == 6


def test_slip_monotone_in_chi(tmp_path):
    out = tmp_path / "mono.csv"
    chis = [f"{c:.2f}" for c in np.linspace(0.2, 1.0, 9)]
    assert main(["slip-sweep", "--orders", "8,20", "--chis", ",".join(chis), "--output", str(out)]) == 0
    _, rows = read_csv(out)
    for order in ("8", "20"):
        zetas = [float(r[3]) for r in rows if r[0] == order]
        assert all(a > b for a, b in zip(zetas, zetas[1:]))


def test_spectrum(tmp_path):
    out = tmp_path / "spec.csv"
    assert main(["spectrum", "--orders", "4,5,6", "--output", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["M", "index", "lambda_hat", "w_M", "narrower_than_odd_neighbors"]
    by_m = {}
    for r in rows:
        by_m.setdefault(r[0], []).append(r)
    assert float(by_m["4"][0][2]) == pytest.approx(math.sqrt(3), rel=1e-15)
    assert float(by_m["5"][0][2]) == pytest.approx(math.sqrt(7), rel=1e-15)
    assert len(by_m["6"]) == 2  # floor(M/2) - 1 positive rates
    assert by_m["4"][0][4] == "true"


def test_viscosity_table(tmp_path):
    out = tmp_path / "visc.csv"
    assert main(
        [
            "viscosity", "--order", "8", "--chi", "1.0",
            "--y-min", "0.0", "--y-max", "60.0", "--n-points", "31",
            "--reference-order", "20", "--output", str(out),
        ]
    ) == 0
    header, rows = read_csv(out)
    assert header == ["y", "hme_M", "gu", "lockerby", "reference", "err_hme", "err_gu", "err_lockerby"]
    assert rows[0][3] == "nan"  # wall singularity sentinel
    last = [float(v) for v in rows[-1]]
    for col in (1, 2, 3, 4):
        assert last[col] == pytest.approx(1.0, abs=1e-6)
    # near the wall the published comparison: one model overshoots, the other undershoots
    near = [float(v) for v in rows[1]]
    assert near[6] < 0 < near[7]


def test_det_scan(tmp_path):
    out = tmp_path / "det.csv"
    assert main(["det-scan", "--order-max", "12", "--chi-grid-points", "24", "--output", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["M", "chi", "det_A", "log_abs_det_A", "cond_A", "flagged"]
    assert all(r[5] == "false" for r in rows)
    assert len(rows) == 10 * 24
    m3 = [r for r in rows if r[0] == "3"]
    for r in m3:
        assert float(r[2]) == pytest.approx(1.0 / math.sqrt(2 * math.pi), rel=1e-13)
    # continuity witness along the chi grid: no sign change, no blowup
    for order in ("8", "12"):
        dets = np.array([float(r[2]) for r in rows if r[0] == order])
        assert np.all(np.sign(dets) == np.sign(dets[0]))
        jumps = np.abs(np.diff(dets)) / np.abs(dets[:-1])
        assert np.max(jumps) < 1.5


def test_convergence_table(tmp_path):
    out = tmp_path / "conv.csv"
    assert main(["convergence", "--order-max", "14", "--y-max", "12.0", "--output", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["M", "zeta", "slip_increment", "defect_increment_maxnorm"]
    incs = [float(r[2]) for r in rows[1:]]
    assert all(a > b for a, b in zip(incs, incs[1:]))


def test_oracle_command(tmp_path):
    out = tmp_path / "oracle.json"
    code = main(
        ["oracle", "--order", "6", "--chi", "1.0", "--n-cells", "600", "--output", str(out)]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["passed"] is True
    assert payload["max_profile_error"] <= 1e-4
    assert payload["wall_condition_residual"] <= 1e-10


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"order": 6, "chi": 0.5, "n_points": 11, "y_max": 4.0, "output": "ignored.csv"}))
    out = tmp_path / "over.csv"
    assert main(["profile", "--config", str(cfg), "--chi", "0.8", "--output", str(out)]) == 0
    meta = json.loads((tmp_path / "over.csv.meta.json").read_text())
    assert meta["config"]["chi"] == 0.8  # flag wins
    assert meta["config"]["order"] == 6  # file value kept
    _, rows = read_csv(out)
    assert len(rows) == 11


def test_validation_exit_codes(tmp_path):
    out = tmp_path / "x.csv"
    assert main(["profile", "--order", "2", "--output", str(out)]) == 2
    assert main(["profile", "--chi", "0.0", "--output", str(out)]) == 2
    assert main(["profile", "--chi", "1.5", "--output", str(out)]) == 2
    assert main(["profile", "--order", "8"]) == 2  # missing output
    assert main(["profile", "--y-max", "-1.0", "--output", str(out)]) == 2
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"not_a_key": 1}))
    assert main(["profile", "--config", str(cfg), "--output", str(out)]) == 2


def test_json_format_table(tmp_path):
    out = tmp_path / "prof.json"
    assert main(["profile", "--order", "4", "--format", "json", "--n-points", "5", "--y-max", "2.0", "--output", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["columns"] == ["y", "u_tilde", "u_defect", "mu_eff_ratio"]
    assert len(payload["rows"]) == 5
    assert payload["meta"]["coefficients"]["order"] == 4
