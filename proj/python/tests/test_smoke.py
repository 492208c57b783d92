import json
import math
from pathlib import Path

import numpy as np
import pytest

import davydov

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


def aggregate(**run):
    cfg = json.loads((CONFIGS / "fig3_aggregate.json").read_text())
    cfg["run"].update({"trajectories": 4, "t_total_ps": 0.1, "master_seed": 5})
    cfg["run"].update(run)
    return cfg


def test_validate_reports_recursion_warning():
    resolved, warnings = davydov.validate(CONFIGS / "fig3_sparse.json")
    assert resolved["bath"]["Q"] == 15
    assert any("0.667" in w for w in warnings)
    _, warnings = davydov.validate(CONFIGS / "fig3_dense.json")
    assert warnings == []


def test_invalid_config_raises():
    cfg = aggregate()
    cfg["bath"]["bogus"] = 1
    with pytest.raises(davydov.DavydovError, match="bath.bogus"):
        davydov.validate(cfg)
    with pytest.raises(ValueError):
        davydov.validate(aggregate(), ["run.dt_fs=-1"])


def test_run_shapes_and_determinism(tmp_path):
    a = davydov.run(aggregate(), threads=2, out_dir=tmp_path / "a")
    b = davydov.run(aggregate(), threads=1)
    n = len(a["times"])
    assert n == 11
    assert a["populations"].shape == (n, 3)
    assert a["temperature"].shape == (n, 3)
    assert a["trajectories"] == 4 and a["failures"] == 0
    np.testing.assert_allclose(a["populations"][0], [0.0, 0.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(a["populations"].sum(axis=1), 1.0, atol=1e-6)
    np.testing.assert_allclose(a["populations"], b["populations"], rtol=1e-12, atol=1e-15)
    assert (tmp_path / "a" / "populations.csv").exists()
    manifest = json.loads((tmp_path / "a" / "run_manifest.json").read_text())
    assert manifest["config"] == a["config"]


def test_overrides_apply():
    out = davydov.run(aggregate(), ["run.trajectories=2"], threads=1)
    assert out["trajectories"] == 2


def test_helpers():
    assert davydov.recursion_time(50.0) == pytest.approx(0.6671281903963041, rel=1e-14)
    assert davydov.occupancy(100.0, 300.0) == pytest.approx(1.6249180497061027, rel=1e-13)
    kinetic = 100.0 * davydov.occupancy(100.0, 250.0) / 2
    assert davydov.mode_temperature(100.0, kinetic) == pytest.approx(250.0, rel=1e-12)
    assert davydov.spectral_density(100.0, 2.0, 100.0) == pytest.approx(10000 / math.e, rel=1e-14)
    assert davydov.trajectory_seed(1, 2) != davydov.trajectory_seed(1, 3)

    energies, vectors = davydov.exciton_basis([0.0, 0.0], [[0.0, 100.0], [100.0, 0.0]])
    np.testing.assert_allclose(energies, [-100.0, 100.0])
    np.testing.assert_allclose(vectors @ vectors.T, np.eye(2), atol=1e-14)

    omega, g = davydov.bath_modes(CONFIGS / "fig3_aggregate.json")
    assert len(omega) == 15
    assert omega[0] == pytest.approx(0.01)
    assert float(np.sum(omega * g**2)) == pytest.approx(100.0, rel=1e-12)
