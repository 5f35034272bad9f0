import filecmp
import json
import os

import pytest

from lgtlab.cli import ConfigError, load_config, main, run

BASE = {
    "scenario": "spectrum",
    "lattice": {"spatial_dim": 2, "sizes": [2, 2], "boundary": "open"},
    "hamiltonian": {"model": "ks_u1", "truncation": 1, "g2": 10.0},
    "params": {"k": 3, "charges": [0, 0, 0, 0]},
}


def write_cfg(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read_manifest(outdir):
    with open(os.path.join(outdir, "manifest.json")) as fh:
        return json.load(fh)


def test_spectrum_run(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    rc = main(["spectrum", "--config", cfg, "--out", str(tmp_path / "out")])
    assert rc == 0
    m = read_manifest(tmp_path / "out")
    assert m["results"]["sector_dim"] == 3    # loop flux -1, 0, +1
    assert all(c["pass"] for c in m["checks"])
    lines = (tmp_path / "out" / "spectrum.csv").read_text().splitlines()
    assert lines[0] == "index,energy"
    assert len(lines) == 4


def test_unknown_key_rejected(tmp_path):
    bad = dict(BASE)
    bad["extra"] = 1
    cfg = write_cfg(tmp_path, bad)
    rc = main(["spectrum", "--config", cfg, "--out", str(tmp_path / "out")])
    assert rc == 2


def test_unknown_hamiltonian_key_rejected(tmp_path):
    bad = json.loads(json.dumps(BASE))
    bad["hamiltonian"]["coupling"] = 2.0
    cfg = write_cfg(tmp_path, bad)
    rc = main(["spectrum", "--config", cfg, "--out", str(tmp_path / "out")])
    assert rc == 2
    m = read_manifest(tmp_path / "out")
    assert "coupling" in m["error"]


def test_spatial_dim_3_rejected_with_message(tmp_path):
    bad = json.loads(json.dumps(BASE))
    bad["lattice"]["spatial_dim"] = 3
    bad["lattice"]["sizes"] = [2, 2, 2]
    cfg = write_cfg(tmp_path, bad)
    rc = main(["spectrum", "--config", cfg, "--out", str(tmp_path / "out")])
    assert rc == 2
    m = read_manifest(tmp_path / "out")
    assert "spatial_dim" in m["error"]


def test_empty_sector_is_numerical_failure(tmp_path):
    bad = json.loads(json.dumps(BASE))
    bad["params"]["charges"] = [9, -9, 0, 0]
    cfg = write_cfg(tmp_path, bad)
    rc = main(["spectrum", "--config", cfg, "--out", str(tmp_path / "out")])
    assert rc == 3


def test_scenario_subcommand_mismatch(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    rc = main(["potential", "--config", cfg, "--out", str(tmp_path / "out")])
    assert rc == 2


def test_potential_row_count(tmp_path):
    cfg = {
        "scenario": "potential",
        "lattice": {"spatial_dim": 1, "sizes": [6]},
        "hamiltonian": {"model": "ks_u1", "truncation": 1, "g2": 2.0,
                        "terms": ["electric"]},
        "params": {"separations": [0, 1, 2, 3]},
    }
    path = write_cfg(tmp_path, cfg)
    rc = main(["potential", "--config", path, "--out", str(tmp_path / "out")])
    assert rc == 0
    lines = (tmp_path / "out" / "potential.csv").read_text().splitlines()
    assert lines[0] == "R,E,dim"
    assert len(lines) == 1 + 4               # exactly len(R_list) data rows
    m = read_manifest(tmp_path / "out")
    assert m["results"]["sigma"] == pytest.approx(1.0)
    assert any(c["name"] == "string_tension_electric_only" and c["pass"]
               for c in m["checks"])


def test_verify_all_passes(tmp_path):
    rc = main(["verify", "--all", "--out", str(tmp_path / "out")])
    assert rc == 0
    m = read_manifest(tmp_path / "out")
    assert all(c["pass"] for c in m["checks"])
    assert m["results"]["trace_identity_defect_f"] == pytest.approx(1.5)


def test_verify_single_config(tmp_path):
    cfg = {
        "scenario": "verify",
        "lattice": {"spatial_dim": 2, "sizes": [2, 2]},
        "hamiltonian": {"model": "zn", "truncation": 5, "lam_zn": 0.8},
    }
    path = write_cfg(tmp_path, cfg)
    rc = main(["verify", "--config", path, "--out", str(tmp_path / "out")])
    assert rc == 0
    m = read_manifest(tmp_path / "out")
    names = [c["name"] for c in m["checks"]]
    assert any("gauge_invariance" in n for n in names)
    assert all(c["pass"] for c in m["checks"])


def test_channels_csv(tmp_path):
    cfg = {"scenario": "channels", "params": {"omega1": 1.0, "omega2": 2.2}}
    path = write_cfg(tmp_path, cfg)
    rc = main(["channels", "--config", path, "--out", str(tmp_path / "out")])
    assert rc == 0
    lines = (tmp_path / "out" / "channels.csv").read_text().splitlines()
    assert lines[0] == ("m_b,m_f,m_b_prime,m_f_prime,amplitude_re,"
                        "amplitude_im,allowed_by_homega")
    allowed = [ln for ln in lines[1:] if ln.endswith(",1")]
    assert len(allowed) == 16                # 8 per parity


def test_dynamics_and_reproducibility(tmp_path):
    cfg = {
        "scenario": "dynamics",
        "lattice": {"spatial_dim": 1, "sizes": [6]},
        "hamiltonian": {"model": "ks_u1", "truncation": 1, "g2": 1.0,
                        "eps": 0.8, "mass": 0.1, "matter": "staggered"},
        "params": {"separation": 3, "t_final": 1.0, "steps": 5},
    }
    path = write_cfg(tmp_path, cfg)
    rc1 = main(["dynamics", "--config", path, "--out", str(tmp_path / "a")])
    rc2 = main(["dynamics", "--config", path, "--out", str(tmp_path / "b")])
    assert rc1 == 0 and rc2 == 0
    # result files are byte-identical between identical runs
    for name in ("dynamics.csv", "dynamics_charge.csv"):
        assert filecmp.cmp(tmp_path / "a" / name, tmp_path / "b" / name,
                           shallow=False)
    # manifests agree except for the wall-time record
    ma = read_manifest(tmp_path / "a")
    mb = read_manifest(tmp_path / "b")
    ma.pop("timing"), mb.pop("timing")
    assert ma == mb


def test_plaquette_convergence_zn_family(tmp_path):
    cfg = {"scenario": "plaquette_convergence",
           "params": {"family": "zn", "n_list": [3, 5, 7], "cutoff_ref": 6}}
    path = write_cfg(tmp_path, cfg)
    rc = main(["plaquette_convergence", "--config", path,
               "--out", str(tmp_path / "out")])
    assert rc == 0
    lines = (tmp_path / "out" / "convergence.csv").read_text().splitlines()
    assert lines[0] == "N,E_calibrated,gap_to_ref"
    assert len(lines) == 4


def test_effective_check_scenario(tmp_path):
    cfg = {"scenario": "effective_check",
           "params": {"lam": 40.0, "eta": 0.1, "ell": 1, "g2": 1.0}}
    path = write_cfg(tmp_path, cfg)
    rc = main(["effective_check", "--config", path,
               "--out", str(tmp_path / "out")])
    assert rc == 0
    m = read_manifest(tmp_path / "out")
    assert m["results"]["coefficient_ratio_lam_2lam"] == pytest.approx(
        2.0, rel=1e-3)
    assert m["results"]["mismatch_shrink_lam_4lam"] >= 8.0


def test_load_config_requires_scenario(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"lattice": {}}))
    with pytest.raises(ConfigError):
        load_config(str(path))
