from __future__ import annotations

import json

import pytest

from bic_lab import __version__
from bic_lab.cli import SWEEP_HEADER, main
from bic_lab.recipes import fig3_params, fig4_params


def write_cfg(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def gaussian_model_cfg():
    return {
        "microscopic": {
            "lambda1": {"shape": "gaussian", "amplitude": 0.16, "center": 1.25, "width": 0.45},
            "lambda2": {"shape": "gaussian", "amplitude": 0.12, "center": 0.85, "width": 0.55},
            "v3": {"shape": "gaussian", "amplitude": 0.20, "center": 1.05, "width": 0.60},
            "v1f": 0.05, "v2f": 0.04,
            "omega13": 0.05, "omega23": -0.03,
            "e3": 1.0, "dipole_overlap": 0.8,
        },
    }


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_dress_json_and_csv(tmp_path):
    cfg = write_cfg(tmp_path, "dress.json", {
        "dressing": {"omega_m": 50.0, "delta_m": 10.0,
                     "gamma1_bare": 6.0, "gamma2_bare": 4.0}})
    out = tmp_path / "dress.json.out"
    assert main(["dress", "--config", cfg, "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["theta"] == pytest.approx(0.686700383472508)
    assert rec["splitting"] == pytest.approx(50.99019513592785)
    assert rec["feasibility"] == pytest.approx(10.206207261596576)

    out_csv = tmp_path / "dress.csv"
    assert main(["dress", "--config", cfg, "--format", "csv",
                 "--out", str(out_csv)]) == 0
    header, row = out_csv.read_text().splitlines()
    assert header.split(",")[0] == "theta"
    assert float(row.split(",")[0]) == pytest.approx(0.686700383472508)


def test_solve_frozen_example(tmp_path):
    cfg = write_cfg(tmp_path, "solve.json", {
        "params": {"g1": 3.0, "g2": 2.0, "q1": -0.8, "q2": 0.54,
                   "delta": 0.1, "gamma1": 1.0, "gamma2": 1.0}})
    out = tmp_path / "solve.out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["lambda"] == pytest.approx(6.762316255329463, rel=1e-14)
    assert rec["delta1"] == pytest.approx(6.421908049556006, rel=1e-14)
    assert rec["delta2"] == pytest.approx(6.6195917942265465, rel=1e-14)
    assert rec["residual_a"] < 1e-13
    assert rec["residual_b"] < 1e-13


def test_solve_degenerate_exit_code(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "bad.json", {
        "params": {"g1": 2.0, "g2": 2.0, "q1": 0.1, "q2": 0.2,
                   "delta": 0.0, "gamma1": 4.0, "gamma2": 1.0, "g12": 1.0}})
    assert main(["solve", "--config", cfg]) == 4
    assert "error:" in capsys.readouterr().err


def test_certify_deviated_reference(tmp_path):
    cfg = write_cfg(tmp_path, "cert.json",
                    {"params": fig3_params().as_dict()})
    out = tmp_path / "cert.out"
    assert main(["certify", "--config", cfg, "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["is_bic"] is False
    assert rec["min_abs_im"] == pytest.approx(1.1427791e-4, rel=1e-5)
    assert rec["lambda_est"] == pytest.approx(1.2944198519681624, rel=1e-10)


def test_certify_validation_mode_rejects(tmp_path):
    bad = fig3_params(gamma=0.01, eta=0.02).as_dict()  # eta above bound
    cfg = write_cfg(tmp_path, "cert2.json",
                    {"params": bad, "validation_mode": "physical"})
    assert main(["certify", "--config", cfg]) == 2


def test_spectrum_csv_deterministic(tmp_path):
    cfg = write_cfg(tmp_path, "spec.json", {
        "params": fig3_params().as_dict(),
        "grid": {"e_min": 0.5, "e_max": 2.5, "n_points": 51}})
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["spectrum", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["spectrum", "--config", cfg, "--out", str(out2)]) == 0
    text = out1.read_text()
    assert text == out2.read_text()
    lines = text.splitlines()
    assert lines[0] == "E_tilde,S_n"
    assert len(lines) >= 52
    for row in lines[1:]:
        e, s = row.split(",")
        assert float(s) >= 0.0


def test_spectrum_stdout_default(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "spec.json", {
        "params": fig4_params().as_dict(),
        "grid": {"e_min": 6.0, "e_max": 7.5, "n_points": 11}})
    assert main(["spectrum", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert out.startswith("E_tilde,S_n\n")


def test_sweep_eta_csv(tmp_path):
    cfg = write_cfg(tmp_path, "sweep.json", {
        "params": fig4_params().as_dict(),
        "sweep": {"eta_list": [1.0, 0.9]}})
    out = tmp_path / "sweep.csv"
    assert main(["sweep-eta", "--config", cfg, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(SWEEP_HEADER)
    assert len(lines) == 3
    first = lines[1].split(",")
    assert float(first[0]) == 1.0
    assert float(lines[2].split(",")[0]) == 0.9
    # widths positive, least-damped mode recorded
    assert float(first[3]) > 0.0
    assert float(first[5]) < 0.0


def test_sweep_eta_json_format(tmp_path):
    cfg = write_cfg(tmp_path, "sweep.json", {
        "params": fig4_params().as_dict(),
        "sweep": {"eta_list": [0.9]}})
    out = tmp_path / "sweep.json.out"
    assert main(["sweep-eta", "--config", cfg, "--format", "json",
                 "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert set(rec["rows"][0]) == set(SWEEP_HEADER)


def test_width_curve_eta_range(tmp_path):
    cfg = write_cfg(tmp_path, "curve.json", {
        "params": fig4_params().as_dict(),
        "sweep": {"eta_range": {"start": 0.9, "stop": 1.0, "n": 3}}})
    out = tmp_path / "curve.csv"
    assert main(["width-curve", "--config", cfg, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 4
    widths = [float(r.split(",")[3]) for r in lines[1:]]
    assert widths[0] > widths[1] > widths[2]


def test_sweep_requires_eta_spec(tmp_path):
    cfg = write_cfg(tmp_path, "sweep.json", {
        "params": fig4_params().as_dict(), "sweep": {}})
    assert main(["sweep-eta", "--config", cfg]) == 2


def test_derive_reference_model(tmp_path):
    cfg = write_cfg(tmp_path, "derive.json", gaussian_model_cfg())
    out = tmp_path / "derive.out"
    assert main(["derive", "--config", cfg, "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["microscopic"]["Gamma_F"] == pytest.approx(0.249588129202350, rel=1e-9)
    assert rec["microscopic"]["vic_convention"] == "as_written"
    assert rec["params"]["g1"] == pytest.approx(0.473319504421516, rel=1e-9)
    assert rec["params"]["inv_kca"] == pytest.approx(-7.916933607665830, rel=1e-9)


def test_derive_divergent_tail_exit_code(tmp_path):
    cfg = gaussian_model_cfg()
    cfg["microscopic"]["v3"] = {"shape": "flat", "amplitude": 0.1}
    # flat coupling with no e_max: the PV tail never converges
    path = write_cfg(tmp_path, "flat.json", cfg)
    assert main(["derive", "--config", path]) == 3


def test_validate_resolvent(tmp_path):
    cfg = gaussian_model_cfg()
    cfg["oracle"] = {"e_min": 0.0, "e_max": 4.5, "n_e": 60,
                     "k_min": 0.0, "k_max": 3.0, "n_k": 30}
    path = write_cfg(tmp_path, "val.json", cfg)
    out = tmp_path / "val.csv"
    assert main(["validate", "--config", path, "--quiet",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "z_re,z_im,max_dev"
    assert len(lines) == 9
    assert all(float(r.split(",")[2]) < 1e-10 for r in lines[1:])


def test_validate_grid_coverage_exit_code(tmp_path):
    cfg = gaussian_model_cfg()
    cfg["oracle"] = {"e_min": 0.0, "e_max": 2.0, "n_e": 40}
    path = write_cfg(tmp_path, "val2.json", cfg)
    assert main(["validate", "--config", path]) == 2


def test_missing_config_exit_code(capsys):
    assert main(["certify"]) == 2
    assert "config" in capsys.readouterr().err


def test_config_not_found_exit_code(tmp_path):
    assert main(["certify", "--config", str(tmp_path / "nope.json")]) == 2


def test_config_invalid_json_exit_code(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["certify", "--config", str(path)]) == 2


def test_dress_degenerate_exit_code(tmp_path):
    cfg = write_cfg(tmp_path, "deg.json", {
        "dressing": {"omega_m": 0.0, "delta_m": 0.0}})
    assert main(["dress", "--config", cfg]) == 4


def test_unknown_reproduce_target_rejected():
    with pytest.raises(SystemExit) as exc:
        main(["reproduce", "fig9"])
    assert exc.value.code == 2
