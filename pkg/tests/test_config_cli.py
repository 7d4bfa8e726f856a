import filecmp
import json
import os

import numpy as np
import pytest
import yaml

from mblcavity.calibrate import synthetic_circuit_data, synthetic_dispersion_data
from mblcavity.cli import main
from mblcavity.config import ProbeSpec, RunConfig, SweepSpec, load_config
from mblcavity.errors import InputError
from mblcavity.line import mode_spacing
from mblcavity.pipeline import default_quality, single_particle
from mblcavity.response import dressed_quality, frequency_grid, s11_dressed


def _write_cfg(path, data):
    path.write_text(yaml.safe_dump(data))
    return str(path)


def _tree_equal(a, b):
    cmp = filecmp.dircmp(a, b)
    assert not cmp.left_only and not cmp.right_only
    _, mismatch, errors = filecmp.cmpfiles(a, b, cmp.common_files, shallow=False)
    assert not mismatch and not errors
    for sub in cmp.common_dirs:
        _tree_equal(os.path.join(a, sub), os.path.join(b, sub))


def test_config_round_trip(tmp_path):
    cfg = RunConfig().replace(sweep=SweepSpec(phi=(0.3, 0.356)), probe=ProbeSpec(modes=(35, 37)),
                              workers=3)
    p = tmp_path / "c.yaml"
    p.write_text(cfg.dump())
    assert load_config(p) == cfg
    assert RunConfig.from_dict(cfg.to_dict()) == cfg


def test_config_defaults_are_reference_device():
    cfg = load_config(None).validate()
    c = cfg.circuit
    assert (c.E_J, c.E_C, c.E_L, c.Gamma, c.j0, c.N) == (8.9, 8.0, 1.39, 1.0, 20, 200)


def test_sweep_points():
    assert SweepSpec(start=0.3, stop=0.32, step=0.01).points() == (0.3, 0.31, 0.32)
    assert SweepSpec(phi=(0.1,)).points() == (0.1,)


@pytest.mark.parametrize("data", [
    {"probe": {"modes": []}},
    {"probe": {"modes": [20]}},
    {"probe": {"max_particles": 4}},
    {"sweep": {"step": 0.0, "start": 0.1, "stop": 0.2}},
    {"bogus": {}},
    {"probe": {"nope": 1}},
])
def test_config_validation(data):
    with pytest.raises(InputError):
        RunConfig.from_dict(data).validate()


def test_validation_error_writes_nothing(tmp_path):
    out = tmp_path / "out"
    assert main(["spectrum", "--out", str(out), "--mode", "20"]) == 2
    assert main(["tree", "--out", str(out), "--mode", "5"]) == 2
    cfg = _write_cfg(tmp_path / "c.yaml", {"probe": {"modes": []}})
    assert main(["spectrum", "--config", cfg, "--out", str(out)]) == 2
    assert not out.exists()


def test_missing_input_file(tmp_path):
    out = tmp_path / "out"
    assert main(["fit", "--out", str(out), str(tmp_path / "nope.csv")]) == 2
    assert not out.exists()


def test_spectrum_command(tmp_path):
    out = tmp_path / "out"
    assert main(["spectrum", "--out", str(out), "--phi", "0.356", "--mode", "37"]) == 0
    d = out / "spectrum"
    echo = yaml.safe_load((d / "config.yaml").read_text())
    assert echo["probe"]["modes"] == [37] and echo["sweep"]["phi"] == [0.356]
    doc = json.loads((d / "mode37_phi0.356000.json").read_text())
    w = max(e["sp_weight"] for e in doc["eigenstates"])
    assert abs(w - 0.34) <= 0.15
    assert doc["n_resonances"] >= 8
    head = (d / "mode37_phi0.356000.csv").read_text().splitlines()[:2]
    assert head[0] == "f_GHz,s11_mag,s11_db" and len(head[1].split(",")) == 3


def test_spectrum_at_zero_flux_is_dressed_mode(tmp_path, params):
    out = tmp_path / "out"
    assert main(["spectrum", "--out", str(out), "--phi", "0", "--mode", "37"]) == 0
    rows = np.loadtxt(out / "spectrum" / "mode37_phi0.000000.csv", delimiter=",", skiprows=1)
    st = single_particle(params, 0.0)
    dq = dressed_quality(st.sp, default_quality(params))
    grid = frequency_grid(st.sp.f(37), 0.5 * mode_spacing(st.sp.f(37), params.line()))
    assert np.abs(grid - rows[:, 0]).max() < 1e-9
    ref = s11_dressed(grid, st.sp, dq, modes=[37])
    assert np.abs(rows[:, 1] - ref.s11_mag).max() < 1e-11


def test_fluxmap_deterministic_across_workers(tmp_path):
    args = ["fluxmap", "--phi", "0.30", "--phi", "0.356", "--phi", "0.33", "--mode", "33", "--mode", "35"]
    assert main(args + ["--out", str(tmp_path / "a"), "--workers", "1"]) == 0
    assert main(args + ["--out", str(tmp_path / "b"), "--workers", "2"]) == 0
    _tree_equal(tmp_path / "a", tmp_path / "b")
    lines = (tmp_path / "a" / "fluxmap" / "fluxmap.csv").read_text().splitlines()
    assert lines[0] == "phi_over_2pi,f_GHz,s11_db"
    phis = [float(l.split(",")[0]) for l in lines[1:]]
    assert phis == sorted(phis)


def test_tree_and_bare_commands(tmp_path):
    out = tmp_path / "out"
    assert main(["tree", "--out", str(out), "--phi", "0", "--mode", "41"]) == 0
    doc = json.loads((out / "tree" / "tree_mode41_phi0.000000.json").read_text())
    assert doc["edges"] == [] and doc["dominant_child"] is None
    assert (out / "tree" / "tree_mode41_phi0.000000.txt").read_text().startswith("|41>")
    assert main(["bare", "--out", str(out), "--phi", "0.5", "--phi", "0.25"]) == 0
    modes = (out / "bare" / "modes.csv").read_text().splitlines()
    assert modes[0] == "phi_over_2pi,mode_k,f_bare_GHz,f_dressed_GHz,qubit_weight"
    assert len(modes) == 1 + 2 * 201
    qubit = (out / "bare" / "qubit.csv").read_text().splitlines()
    assert [l.split(",")[0] for l in qubit[1:]] == ["0.250000", "0.500000"]


def test_fit_round_trip(tmp_path, params):
    synthetic_dispersion_data(params, np.arange(21, 61)).write_csv(tmp_path / "zero.csv")
    synthetic_circuit_data(params, [0.25, 0.35, 0.45], np.arange(25, 45)).write_csv(tmp_path / "flux.csv")
    cfg = _write_cfg(tmp_path / "c.yaml", {"fit": {"circuit_start": [9.3, 7.7, 1.43]}})
    out = tmp_path / "out"
    assert main(["fit", "--config", cfg, "--out", str(out), str(tmp_path / "zero.csv"),
                 str(tmp_path / "flux.csv")]) == 0
    disp = json.loads((out / "fit" / "dispersion.json").read_text())["parameters"]
    assert abs(disp["v"]["value"] / params.v - 1) < 1e-4
    circ = json.loads((out / "fit" / "circuit.json").read_text())["parameters"]
    for name in ("E_J", "E_C", "E_L"):
        assert abs(circ[name]["value"] / getattr(params, name) - 1) < 0.01
    summary = (out / "fit" / "summary.txt").read_text()
    assert "circuit fit" in summary and "60 rows at nonzero flux" in summary


def test_fit_malformed_csv_names_line(tmp_path, caplog):
    p = tmp_path / "bad.csv"
    p.write_text("phi_over_2pi,mode_k,f_GHz\n0,21,4.1\n0,22,oops\n")
    out = tmp_path / "out"
    assert main(["fit", "--out", str(out), str(p)]) == 2
    assert "bad.csv:3:" in caplog.text
    assert not out.exists()


def test_fit_missing_sigma_noted(tmp_path, params):
    d = synthetic_dispersion_data(params, np.arange(21, 61))
    lines = ["phi_over_2pi,mode_k,f_GHz"] + [f"0,{k},{float(f)!r}" for k, f in zip(d.k, d.f)]
    d2 = synthetic_circuit_data(params, [0.3, 0.4], np.arange(30, 40))
    lines += [f"{float(p)},{k},{float(f)!r}" for p, k, f in zip(d2.phi, d2.k, d2.f)]
    (tmp_path / "d.csv").write_text("\n".join(lines) + "\n")
    out = tmp_path / "out"
    main(["fit", "--out", str(out), str(tmp_path / "d.csv")])
    assert "sigma" in (out / "fit" / "summary.txt").read_text()
