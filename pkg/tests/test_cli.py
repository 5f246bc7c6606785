import json

import numpy as np
import pytest

from rydpump.cli import ConfigError, main, validate_config


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_validate_rejects_unknown_keys():
    with pytest.raises(ConfigError) as err:
        validate_config({"bogus": 1}, "spectrum")
    assert err.value.errors[0]["field"] == "bogus"


def test_validate_rejects_bad_lattice():
    with pytest.raises(ConfigError) as err:
        validate_config({"lattice": {"n_sites": 4, "a0": 0.3, "xi": 2.5}}, "steady")
    assert err.value.errors[0]["field"] == "lattice"


def test_validate_names_missing_omega():
    with pytest.raises(ConfigError) as err:
        validate_config({"drive": {"gamma_r": 1e-4}}, "steady")
    assert any(e["field"] == "drive.omega" for e in err.value.errors)


def test_normalized_echo_resolves_defaults():
    cfg = validate_config(
        {"lattice": {"n_sites": 4, "a0": 0.26, "xi": 1.2}, "drive": {"omega": 1000.0}},
        "fig3",
    )
    doc = cfg.normalized()
    assert doc["dynamics"]["tier"] == "effective"
    assert doc["lattice"]["p"] == 6
    assert doc["drive"]["reservoir"] == [0, 3]
    # the detuning resolves to half the nearest-neighbour shift
    w_d = np.sqrt(1e-8 / 4.0 + 2.0 * 1000.0**2)
    assert doc["drive"]["delta"] == pytest.approx(0.5 * w_d / 0.26**6, rel=1e-12)


def test_spectrum_scenario_passthrough(tmp_path):
    out = tmp_path / "spec_out"
    code = main([
        "spectrum", "--config",
        write_config(tmp_path, {"lattice": {"n_sites": 2, "a0": 0.26, "xi": 1.2}}),
        "--out", str(out),
    ])
    assert code == 0
    lines = (out / "spectrum.csv").read_text().strip().splitlines()
    assert lines[0] == "n,v_n"
    v = [float(row.split(",")[1]) for row in lines[1:]]
    w_d = np.sqrt(1e-8 / 4.0 + 2.0 * 1000.0**2)
    assert v[0] == 0.0 and v[1] == 0.0
    assert v[2] == pytest.approx(w_d / 0.26**6, rel=1e-12)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["scenario"] == "spectrum"
    assert "config_sha256" in manifest


def test_invalid_config_exits_2(tmp_path, capsys):
    code = main([
        "steady", "--config",
        write_config(tmp_path, {"lattice": {"n_sites": 4, "a0": 0.3, "xi": 9.0}}),
        "--out", str(tmp_path / "x"),
    ])
    assert code == 2
    doc = json.loads(capsys.readouterr().out)
    assert doc["errors"]


def test_missing_config_file_exits_2(tmp_path, capsys):
    code = main(["steady", "--config", str(tmp_path / "nope.json")])
    assert code == 2


def test_effective_scenario_round_trip(tmp_path):
    out = tmp_path / "eff"
    code = main([
        "effective", "--config",
        write_config(tmp_path, {"lattice": {"n_sites": 4, "a0": 0.26, "xi": 1.2}}),
        "--out", str(out),
    ])
    assert code == 0
    from rydpump.hamiltonians import EffectiveModel

    model = EffectiveModel.from_json((out / "effective_model.json").read_text())
    assert model.n_sites == 4
    assert model.j.shape == (4, 4)


def test_steady_scenario_outputs(tmp_path):
    out = tmp_path / "steady"
    code = main([
        "steady", "--config",
        write_config(tmp_path, {"lattice": {"n_sites": 4, "a0": 0.26,
                                            "xi": 3.0 ** (1 / 6)}}),
        "--out", str(out),
    ])
    assert code == 0
    doc = json.loads((out / "steady.json").read_text())
    assert doc["fidelity"] > 0.99
    assert doc["concurrence"] > 0.99
    assert doc["witness"]["k_min"] == 2


def test_repeat_runs_are_byte_identical(tmp_path):
    cfgfile = write_config(
        tmp_path,
        {"lattice": {"n_sites": 4, "a0": 0.26, "xi": 3.0 ** (1 / 6)},
         "dynamics": {"t_final": 5.0, "samples": 6, "n_traj": 8}},
    )
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["trajectory", "--config", cfgfile, "--out", str(out_a),
                 "--seed", "42"]) == 0
    assert main(["trajectory", "--config", cfgfile, "--out", str(out_b),
                 "--seed", "42"]) == 0
    assert (out_a / "trajectory.csv").read_bytes() == (out_b / "trajectory.csv").read_bytes()
    out_c = tmp_path / "c"
    assert main(["trajectory", "--config", cfgfile, "--out", str(out_c),
                 "--seed", "43"]) == 0
    assert (out_a / "trajectory.csv").read_bytes() != (out_c / "trajectory.csv").read_bytes()


def test_bloch_scenario(tmp_path):
    out = tmp_path / "bloch"
    code = main([
        "bloch", "--config",
        write_config(tmp_path, {"dressing": {"omega_d": 1000.0, "delta_d": 0.0,
                                             "gamma_e": 1e4}}),
        "--out", str(out),
    ])
    assert code == 0
    fit = json.loads((out / "bloch_fit.json").read_text())
    assert fit["ratio"] == pytest.approx(1.0, abs=0.1)
    header = (out / "bloch.csv").read_text().splitlines()[0]
    assert header == "t,re_sigma_ge,im_sigma_ge,re_sigma_gr,im_sigma_gr,population"


def test_darkscan_scenario(tmp_path):
    out = tmp_path / "dark"
    code = main([
        "darkscan", "--config",
        write_config(tmp_path, {"lattice": {"n_sites": 16, "a0": 0.26,
                                            "xi": 3.0 ** (1 / 6)}}),
        "--out", str(out),
    ])
    assert code == 0
    doc = json.loads((out / "darkstates.json").read_text())
    assert len(doc["dark_indices"]) == 2  # 16 sits in both families
    assert doc["pattern_match"] == {"1": True, "2": True}


def test_scaling_scenario_with_pumping_fit(tmp_path):
    out = tmp_path / "scal"
    code = main([
        "scaling", "--config",
        write_config(tmp_path, {"scan": {"n_max": 10, "include": [],
                                         "rules": ["edges"],
                                         "pumping_fit": True,
                                         "pumping_sizes": [4, 6]}}),
        "--out", str(out),
    ])
    assert code == 0
    fit = json.loads((out / "scaling_pumping.json").read_text())
    assert fit["sizes"] == [4, 6]
    assert fit["exponent"] > 0


def test_steady_reduced_state_round_trips(tmp_path):
    out = tmp_path / "steady_json"
    assert main([
        "steady", "--config",
        write_config(tmp_path, {"lattice": {"n_sites": 4, "a0": 0.26,
                                            "xi": 3.0 ** (1 / 6)}}),
        "--out", str(out),
    ]) == 0
    from rydpump.states import state_from_json

    doc = json.loads((out / "steady.json").read_text())
    state = state_from_json(doc["reduced_state"])
    state.validate()
    assert state.n_sites == 2


def test_fig2a_ridge_sits_at_the_resonant_ratio(tmp_path):
    out = tmp_path / "ridge"
    assert main([
        "fig2a", "--config",
        write_config(tmp_path, {"grid": {"xi_min": 1.1, "xi_max": 1.3,
                                         "xi_points": 5, "a0_min": 0.26,
                                         "a0_max": 0.3, "a0_points": 2}}),
        "--out", str(out),
    ]) == 0
    rows = [line.split(",") for line in
            (out / "fig2a.csv").read_text().strip().splitlines()[1:]]
    best = max(rows, key=lambda r: float(r[2]))
    assert abs(float(best[0]) - 3.0 ** (1 / 6)) < 0.051  # one grid step
    assert float(best[2]) >= 0.99
