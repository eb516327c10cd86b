import json
import math

import numpy as np
import pytest

from ionmotion import io, params
from ionmotion.cli import main, reproduce
from ionmotion.presets import FIG3, FIG4, NU_Z, TRAP
from ionmotion.spectroscopy import sideband_spectrum, simulate_shots, two_ion_spectrum

TWO_PI = 2 * math.pi


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_params_matches_library(capsys):
    code, out, _ = run(capsys, "params")
    assert code == 0
    rep = json.loads(out)
    d = params.two_ion_separation(params.YB171, NU_Z)
    assert rep["eta_eff"] == params.effective_lamb_dicke(params.YB171, TRAP)
    assert rep["ion_separation_um"] == d * 1e6
    assert rep["eta_laser"] == params.laser_lamb_dicke(params.YB171, TRAP, 369.5e-9)
    split = params.splitting_from_gradient(params.YB171, 23.3, d)
    assert rep["splitting_hz"] == split / TWO_PI
    assert rep["crosstalk_bound"] == params.crosstalk_bound(TWO_PI * 40e3, split)


def test_params_csv_and_config(tmp_path, capsys):
    cfg = tmp_path / "trap.cfg"
    cfg.write_text("nu_z_hz = 500e3\ngradient_t_per_m = 0\n")
    code, out, _ = run(capsys, "params", "--config", str(cfg), "--format", "csv")
    assert code == 0
    rows = dict(line.split(",", 1) for line in out.strip().split("\n")[1:])
    assert float(rows["eta_eff"]) == 0.0
    assert float(rows["ion_separation_um"]) == params.two_ion_separation(params.YB171, TWO_PI * 500e3) * 1e6
    assert rows["crosstalk_bound"] == ""


def test_species_file(tmp_path, capsys):
    sp = tmp_path / "species.cfg"
    sp.write_text(params.format_species_cfg(params.IonSpecies(40.0, params.YB171.zeeman_slope, "X+")))
    cfg = tmp_path / "c.cfg"
    cfg.write_text(f"species = {sp}\n")
    code, out, _ = run(capsys, "params", "--config", str(cfg))
    assert code == 0 and json.loads(out)["species"] == "X+"


def test_reproduce_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(capsys, "reproduce", "fig4", "--shots", "200", "--seed", "7", "--out", str(d))[0] == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == ["fig4_data.csv", "fig4_theory.csv"]
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_reproduce_figures():
    f5 = reproduce("fig5")
    header, (delta, p) = io.parse_csv(f5["fig5_theory.csv"], io.DETUNING_HEADER)
    assert delta.size == 1001 and np.all((p >= 0) & (p <= 1))
    f3 = reproduce("fig3", shots=200, seed=1)
    assert set(f3) == {"fig3_theory.csv", "fig3_data.csv"}
    data = io.scan_from_csv(f3["fig3_data.csv"])
    assert np.all(data.sigma > 0)


def test_reproduce_unknown_figure(capsys):
    code, _, err = run(capsys, "reproduce", "fig9")
    assert code == 1 and "fig9" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["nope"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["params", "--format", "xml"])
    assert info.value.code == 1


def test_missing_config_is_usage_error(tmp_path, capsys):
    assert run(capsys, "params", "--config", str(tmp_path / "missing.cfg"))[0] == 1


def test_bad_config_value(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("nu_z_hz = fast\n")
    assert run(capsys, "params", "--config", str(cfg))[0] == 1
    cfg.write_text("colour = red\n")
    assert run(capsys, "params", "--config", str(cfg))[0] == 1
    cfg.write_text("nu_z_hz 5\n")
    code, _, err = run(capsys, "params", "--config", str(cfg))
    assert code == 3 and "c.cfg:1:" in err


def test_fit_empty_file_is_parse_error(tmp_path, capsys):
    f = tmp_path / "empty.csv"
    f.write_text("")
    assert run(capsys, "fit", str(f))[0] == 3
    f.write_text("x,p,sigma\n1,0.5,0.1\n2,oops,0.1\n")
    code, _, err = run(capsys, "fit", str(f))
    assert code == 3 and "empty.csv:3:" in err


def test_fit_noiseless_sideband(tmp_path, capsys):
    s = sideband_spectrum(FIG4.model(), FIG4.data_grid())
    s = s.replace(sigma=np.full(len(s), 0.01))
    f = tmp_path / "d.csv"
    io.write_scan(f, s)
    code, out, _ = run(capsys, "fit", str(f))
    assert code == 0
    rep = json.loads(out)
    assert rep["params"]["nbar"] == pytest.approx(290, rel=1e-4)
    assert rep["weighting"] == "data"


def test_fit_two_ion_reports_gradient(tmp_path, capsys):
    curve = two_ion_spectrum(0.0, FIG3.splitting, FIG3.rabi, FIG3.pulse_time, FIG3.grid())
    f = tmp_path / "d.csv"
    io.write_scan(f, simulate_shots(curve, 200, seed=2))
    code, out, _ = run(capsys, "fit", str(f), "--model", "two-ion", "--shots", "200")
    assert code == 0
    rep = json.loads(out)
    assert rep["weighting"] == "model"
    assert rep["splitting_hz"] == pytest.approx(FIG3.splitting / TWO_PI, rel=0.01)
    assert rep["gradient_t_per_m"] == pytest.approx(23.3, rel=0.02)


def test_fit_bad_bounds(tmp_path, capsys):
    f = tmp_path / "d.csv"
    io.write_scan(f, sideband_spectrum(FIG4.model(), FIG4.data_grid()).replace(sigma=np.full(81, 0.01)))
    assert run(capsys, "fit", str(f), "--bounds", "nbar=1-2")[0] == 1
    assert run(capsys, "fit", str(f), "--bounds", "nbar=5:5")[0] == 2


@pytest.mark.parametrize("kind,header", [
    ("frequency", "x,p,sigma"),
    ("detuning", "delta_rad_s,p_f1"),
    ("time", "t_s,p_f1"),
    ("trajectory", "t_s,re_alpha,im_alpha"),
])
def test_scan_kinds(tmp_path, capsys, kind, header):
    cfg = tmp_path / "c.cfg"
    stop = "400" if kind == "time" else "20e3"
    start = "0" if kind == "time" else "-20e3"
    cfg.write_text(f"scan_kind = {kind}\nscan_start = {start}\nscan_stop = {stop}\nscan_points = 11\nnbar = 5\n")
    code, out, _ = run(capsys, "scan", "--config", str(cfg))
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == header and len(lines) == 12


def test_scan_with_shots_is_seeded(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("scan_kind = detuning\nscan_start = -20e3\nscan_stop = 20e3\nnbar = 110\n")
    outs = [run(capsys, "scan", "--config", str(cfg), "--shots", "50", "--seed", "3")[1] for _ in range(2)]
    assert outs[0] == outs[1] and outs[0].startswith("x,p,sigma\n")


def test_scan_bad_kind(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("scan_kind = sideways\n")
    assert run(capsys, "scan", "--config", str(cfg))[0] == 1


def test_oracle_check_default_passes(capsys):
    code, out, _ = run(capsys, "oracle-check")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and rep["failed"] == []


def test_oracle_check_strict_fails(capsys):
    code, out, err = run(capsys, "oracle-check", "--profile", "strict")
    assert code == 2
    assert "integrator_vs_analytic" in json.loads(out)["failed"]
    assert "integrator_vs_analytic" in err


def test_oracle_check_tolerance_override(capsys):
    assert run(capsys, "oracle-check", "--integrator-tol", "1e-12")[0] == 2


def test_oracle_check_undersized_fails(capsys):
    code, out, _ = run(capsys, "oracle-check", "--profile", "undersized")
    rep = json.loads(out)
    assert code == 2
    assert "TruncationError" in rep["checks"]["integrator_vs_analytic"]["error"]


def test_module_entry_point():
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "ionmotion", "params"], capture_output=True, text=True)
    assert r.returncode == 0 and "eta_eff" in r.stdout
