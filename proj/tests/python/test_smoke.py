"""Smoke tests for the python bindings: plumbing, shapes, and a few cheap
physics sanity checks. The heavy validation lives in the C++ suites."""

import json

import numpy as np
import pytest

import chiralmm as cm

SMALL = json.dumps(
    {
        "mesh": {"nx": 8, "ny": 8},
        "material": {"demag": "none"},
    }
)


def uniform_state(cfg, mz=1.0):
    m = np.zeros((cfg.mesh.ny, cfg.mesh.nx, 3))
    m[:, :, 2] = mz
    return m


def test_defaults():
    cfg = cm.parse_config("{}")
    assert cfg.mesh.nx == 20 and cfg.mesh.ny == 20 and cfg.mesh.nz == 1
    assert cfg.mesh.dx == pytest.approx(1e-9)
    resolved = json.loads(cfg.to_json())
    assert resolved["material"]["Ms"] == pytest.approx(1.1e6)
    assert resolved["material"]["Aex"] == pytest.approx(1.6e-11)
    assert resolved["material"]["Ku0"] == pytest.approx(8e5)
    assert resolved["material"]["D"] == pytest.approx(1e-3)
    assert resolved["material"]["alpha"] == pytest.approx(0.1)
    assert resolved["material"]["pol"] == pytest.approx(0.15)
    assert resolved["material"]["sot_xi"] == pytest.approx(-2.0)


def test_unknown_key_rejected():
    with pytest.raises(cm.ConfigError):
        cm.parse_config('{"material": {"MS": 1.0}}')


def test_validation_names_field():
    with pytest.raises(cm.ConfigError, match="Ms"):
        cm.parse_config('{"material": {"Ms": 0.0}}')


def test_anisotropy_map_gradient():
    cfg = cm.parse_config("{}")
    flat = cm.anisotropy_map(cfg, 0.0)
    assert flat["k"].shape == (20, 20)
    assert flat["mean_gradient"] == pytest.approx(0.0)
    gated = cm.anisotropy_map(cfg, 0.165)
    assert gated["mean_gradient"] > 0.0
    # positive voltage only lowers the anisotropy
    assert np.all(gated["k"] <= flat["k"] + 1e-9)


def test_effective_field_and_energy():
    cfg = cm.parse_config(SMALL)
    m = uniform_state(cfg)
    terms = cm.effective_field(cfg, m)
    for name in ("exchange", "dmi", "anisotropy", "demag", "total"):
        assert terms[name].shape == (8, 8, 3)
    # uniform state: no exchange field, anisotropy field 2K/Ms along +z
    assert np.allclose(terms["exchange"], 0.0)
    assert terms["anisotropy"][4, 4, 2] == pytest.approx(2 * 8e5 / 1.1e6)
    e = cm.total_energy(cfg, m)
    assert e["exchange"] == pytest.approx(0.0)
    assert e["anisotropy"] == pytest.approx(0.0)


def test_classify_and_skyrmion_number():
    cfg = cm.parse_config(SMALL)
    m = uniform_state(cfg)
    cls = cm.classify(cfg, m)
    assert cls["kind"] == "UniformUp"
    assert cls["polarity"] == 1
    assert cls["uniformity"] == pytest.approx(1.0)
    assert cm.skyrmion_number(cfg, m) == pytest.approx(0.0)


def test_relax_smoke():
    cfg = cm.parse_config(SMALL)
    out = cm.relax(cfg, polarity=1, tilt_deg=5.0)
    assert out["converged"]
    assert out["class"]["kind"] == "UniformUp"
    assert out["m"].shape == (8, 8, 3)
    assert np.mean(out["m"][:, :, 2]) > 0.99


def test_ovf_round_trip(tmp_path):
    cfg = cm.parse_config(SMALL)
    rng = np.random.default_rng(7)
    m = rng.normal(size=(8, 8, 3))
    m /= np.linalg.norm(m, axis=2, keepdims=True)
    path = str(tmp_path / "state.ovf")
    cm.write_ovf(cfg, m, path, t=1e-9, Ms=1.1e6)
    back = cm.read_ovf(path)
    assert back["nx"] == 8 and back["ny"] == 8
    assert back["t"] == pytest.approx(1e-9)
    np.testing.assert_array_equal(back["m"], m)


def test_phase_diagram_smoke():
    cfg = cm.parse_config(SMALL)
    rows = cm.phase_diagram(cfg, [2e5, 1.0e6], [0.0, 3e-3])
    assert len(rows) == 4
    by_point = {(r["Ku0"], r["D"]): r["class"]["kind"] for r in rows}
    assert by_point[(1.0e6, 0.0)] in ("UniformUp", "UniformDown")
    assert by_point[(2e5, 3e-3)] not in ("UniformUp", "UniformDown")


def test_write_short_protocol():
    # shrunk timings: exercises the three-segment plumbing, not the physics
    cfg = cm.parse_config(
        json.dumps(
            {
                "mesh": {"nx": 8, "ny": 8},
                "material": {"demag": "none"},
                "protocol": {"t1": 2e-12, "t2": 2e-12, "t3": 4e-12},
            }
        )
    )
    out = cm.write(cfg, voltage_sign=1, start_polarity=-1)
    assert out["m"].shape == (8, 8, 3)
    assert out["t_release"] == pytest.approx(4e-12)
    assert len(out["trace"]) >= 4
    assert out["trace"][0]["J"] != 0.0
    assert out["trace"][-1]["J"] == 0.0
