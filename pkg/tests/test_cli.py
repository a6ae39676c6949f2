import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from geoscatter.cli import PRESETS, main, parse_angle


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, cfg, name="run.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


BASE = {
    "command": "sweep",
    "surface": {"type": "gaussian", "eta": 0.1, "sigma": 1.0},
    "couplings": "thin-layer",
    "kinematics": {"k_min": 0.5, "k_max": 2.0, "k_steps": 4, "theta": [0, "pi/2"]},
}


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_angle():
    assert parse_angle("pi/6") == pytest.approx(math.pi / 6)
    assert parse_angle("2*pi/3") == pytest.approx(2 * math.pi / 3)
    assert parse_angle("pi") == math.pi
    assert parse_angle(0.25) == 0.25


def test_sweep_columns_and_integrity(tmp_path, capsys):
    out = tmp_path / "o.csv"
    code, _, _ = run(["sweep", "--config", write(tmp_path, BASE), "--out", str(out)], capsys)
    assert code == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    data = rows(raw.decode())
    assert list(data[0]) == ["sigma_k", "theta", "re_f", "im_f", "dcs_over_sigma"]
    assert len(data) == 8
    for r in data:
        re_f, im_f = float(r["re_f"]), float(r["im_f"])
        assert float(r["dcs_over_sigma"]) == pytest.approx(re_f**2 + im_f**2, rel=1e-15, abs=0)


def test_seventeen_digits_round_trip(tmp_path, capsys):
    code, text, _ = run(["sweep", "--config", write(tmp_path, BASE)], capsys)
    assert code == 0
    from geoscatter import GaussianBump, ScatteringKinematics, THIN_LAYER, gaussian_amplitude_first_order

    b = GaussianBump.from_eta(0.1, 1.0)
    r = rows(text)[5]
    f = gaussian_amplitude_first_order(b, ScatteringKinematics(float(r["sigma_k"]), float(r["theta"])), THIN_LAYER)
    assert float(r["re_f"]) == f.real and float(r["im_f"]) == f.imag


def test_amplitude_command_uses_quadrature(tmp_path, capsys):
    cfg = dict(BASE, command="amplitude")
    code, text, _ = run(["amplitude", "--config", write(tmp_path, cfg)], capsys)
    assert code == 0
    first = dict(BASE, command="sweep")
    _, text2, _ = run(["sweep", "--config", write(tmp_path, first, "b.json")], capsys)
    a = rows(text)
    s = rows(text2)
    for x, y in zip(a, s):
        fa = complex(float(x["re_f"]), float(x["im_f"]))
        fs = complex(float(y["re_f"]), float(y["im_f"]))
        assert abs(fa - fs) <= 0.2 * abs(fs)  # eta = 0.1: O(eta) vs exact
        assert fa != fs


def test_tabulated_surface(tmp_path, capsys):
    r = np.linspace(0, 12, 3001)
    np.savetxt(tmp_path / "bump.csv", np.column_stack([r, 0.1 * np.exp(-r * r / 2)]), delimiter=",")
    cfg = dict(BASE, command="amplitude", surface={"type": "tabulated", "path": "bump.csv", "sigma": 1.0})
    code, text, err = run(["amplitude", "--config", write(tmp_path, cfg)], capsys)
    assert code == 0, err
    cfg2 = dict(BASE, command="amplitude", surface={"type": "gaussian", "delta": 0.1, "sigma": 1.0})
    _, text2, _ = run(["amplitude", "--config", write(tmp_path, cfg2, "g.json")], capsys)
    for x, y in zip(rows(text), rows(text2)):
        assert float(x["dcs_over_sigma"]) == pytest.approx(float(y["dcs_over_sigma"]), rel=1e-4)


def test_total_xsec_preset(capsys):
    code, text, _ = run(["total-xsec", "--preset", "fig2"], capsys)
    assert code == 0
    data = rows(text)
    assert list(data[0]) == ["sigma_k", "lambda1", "lambda2", "sigma_tot_over_sigma"]
    assert len(data) == 4 * 400
    pairs = {(float(r["lambda1"]), float(r["lambda2"])) for r in data}
    assert pairs == {(0.5, -0.5), (0.5, 0.5), (0.5, 0.0), (0.0, -0.5)}


def test_perturb_preset(capsys):
    code, text, _ = run(["perturb", "--preset", "fig3"], capsys)
    assert code == 0
    data = rows(text)
    assert list(data[0])[-3:] == ["z1", "z2", "perturbed_dcs_over_sigma"]
    for r in data[:50]:
        assert float(r["z2"]) == 0.0  # theta = 0 block comes first


def test_lattice_preset(capsys):
    code, text, _ = run(["lattice", "--preset", "fig5"], capsys)
    assert code == 0
    data = rows(text)
    assert list(data[0])[-1] == "c_abs2"
    assert float(data[0]["c_abs2"]) == pytest.approx(81.0)
    for r in data[::37]:
        assert float(r["c_abs2"]) <= 81.0 + 1e-9


def test_fig1_preset_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["sweep", "--preset", "fig1", "--out", str(a)], capsys)[0] == 0
    assert run(["sweep", "--preset", "fig1", "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(rows(a.read_text())) == 1600


@pytest.mark.parametrize("mutate,key", [
    (lambda c: c.update(bogus=1), "bogus"),
    (lambda c: c["surface"].update(width=1), "surface.width"),
    (lambda c: c["kinematics"].update(k_min=0), "kinematics.k_min"),
    (lambda c: c["kinematics"].update(k_steps=0), "kinematics.k_steps"),
    (lambda c: c["kinematics"].update(theta=["tau"]), "kinematics.theta"),
    (lambda c: c.update(couplings={"lambda1": 0.5}), "couplings.lambda2"),
    (lambda c: c.update(couplings="thick-layer"), "couplings"),
    (lambda c: c["surface"].update(sigma=-1), "surface.sigma"),
    (lambda c: c.update(quadrature={"abs_tol": 0}), "quadrature"),
])
def test_config_errors_name_the_key(tmp_path, capsys, mutate, key):
    cfg = json.loads(json.dumps(BASE))
    mutate(cfg)
    code, _, err = run(["sweep", "--config", write(tmp_path, cfg)], capsys)
    assert code == 2
    assert key in err


def test_command_mismatch_and_missing_blocks(tmp_path, capsys):
    code, _, err = run(["lattice", "--config", write(tmp_path, BASE)], capsys)
    assert code == 2 and "command" in err
    cfg = dict(BASE, command="perturb")
    code, _, err = run(["perturb", "--config", write(tmp_path, cfg)], capsys)
    assert code == 2 and "perturbation" in err


def test_unreadable_config(tmp_path, capsys):
    code, _, err = run(["validate", "--config", str(tmp_path / "missing.json")], capsys)
    assert code == 2
    (tmp_path / "bad.json").write_text("{not json")
    code, _, err = run(["validate", "--config", str(tmp_path / "bad.json")], capsys)
    assert code == 2


def test_numerical_failure_exit_code(tmp_path, capsys):
    cfg = dict(BASE, command="amplitude", quadrature={"max_panels": 8},
               kinematics={"k_min": 3.0, "k_max": 3.0, "k_steps": 1, "theta": ["pi"]})
    code, _, err = run(["amplitude", "--config", write(tmp_path, cfg)], capsys)
    assert code == 3
    assert "k = 3.0" in err and "theta = 3.14159" in err


def test_validate_ok_and_guard(tmp_path, capsys):
    code, out, _ = run(["validate", "--preset", "fig1"], capsys)
    assert code == 0 and out.strip() == "ok"
    cfg = dict(BASE, command="lattice", surface={"type": "gaussian", "eta": 0.5, "sigma": 1.0},
               lattice={"a": 10.0, "basis": "triangular", "m_range": [-1, 1], "n_range": [-1, 1]})
    code, out, _ = run(["validate", "--config", write(tmp_path, cfg)], capsys)
    assert code == 0
    assert "(m2-m1)(n2-n1)*eta = 2 >= 0.1" in out


def test_validate_rejects_zero_k_min(tmp_path, capsys):
    cfg = json.loads(json.dumps(BASE))
    cfg["kinematics"]["k_min"] = 0
    code, _, err = run(["validate", "--config", write(tmp_path, cfg)], capsys)
    assert code == 2 and "k_min" in err


def test_validate_reports_separation_and_smallness(tmp_path, capsys):
    cfg = dict(BASE, command="lattice", lattice={"a": 2.0, "m_range": [0, 1], "n_range": [0, 0]})
    code, out, _ = run(["validate", "--config", write(tmp_path, cfg)], capsys)
    assert "well separated" in out
    cfg = dict(BASE, command="perturb", perturbation={"epsilon": 0.5, "alpha1": 1.0, "alpha2": 1.0})
    code, out, _ = run(["validate", "--config", write(tmp_path, cfg)], capsys)
    assert "not small" in out


def test_presets_are_complete():
    assert set(PRESETS) == {"fig1", "fig2", "fig3", "fig5"}


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "geoscatter", "validate", "--preset", "fig1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "ok"
