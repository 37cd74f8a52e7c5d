import json

import numpy as np
import pytest

from rfexposure.scenario import (ConfigError, SweepError, build_config, compare_systems,
                                 load_config, local_minima, preset_names, provenance_log,
                                 run_metadata, run_sweep, serving_switches)

UMI = {"system": "FiveG", "environment": {"profile": "UMi"}}


def write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return path


def test_presets_load():
    names = preset_names()
    assert len(names) == 9
    for name in names:
        assert load_config(name).name == name


def test_minimal_config_fills_defaults(tmp_path):
    cfg = load_config(write(tmp_path, UMI))
    assert cfg.values["site_plan.isd_m"] == 200.0
    assert cfg.provenance["environment.profile"] == "published"
    assert cfg.provenance["steering"] == "default"


def test_user_override_tagged(tmp_path):
    cfg = load_config(write(tmp_path, dict(UMI, site_plan={"isd_m": 150.0})))
    assert cfg.provenance["site_plan.isd_m"] == "user"
    assert any("site_plan.isd_m = 150.0 [user]" == line for line in provenance_log(cfg))


def test_empty_file_names_missing_field(tmp_path):
    with pytest.raises(ConfigError, match="system"):
        load_config(write(tmp_path, ""))


@pytest.mark.parametrize("doc,field", [
    (dict(UMI, sweep={"step_m": 0}), "sweep.step_m"),
    (dict(UMI, sweep={"start_m": 10, "end_m": 5}), "sweep.end_m"),
    (dict(UMI, site_plan={"site_height_m": 1.0}), "site_plan.site_height_m"),
    (dict(UMI, bogus=1), "bogus"),
    (dict(UMI, array={"element_power_dbm": 20, "total_power_dbm": 40}), "total_power_dbm"),
    ({"system": "LTE", "environment": {"profile": "UMi"}}, "system"),
    ({"system": "FiveG", "environment": {"profile": "SMa"}}, "profile"),
    (dict(UMI, tissue_file="nowhere.json"), "tissue"),
])
def test_invalid_configs(tmp_path, doc, field):
    with pytest.raises(ConfigError, match=field):
        load_config(write(tmp_path, doc))


def test_invalid_json(tmp_path):
    with pytest.raises(ConfigError, match="JSON"):
        load_config(write(tmp_path, "{not json"))


def test_with_overrides_keeps_given(tmp_path):
    cfg = load_config(write(tmp_path, dict(UMI, site_plan={"isd_m": 150.0})))
    new = cfg.with_overrides({"seed": 9})
    assert new.values["seed"] == 9 and new.values["site_plan.isd_m"] == 150.0
    assert new.config_hash() != cfg.config_hash()


def test_line_sweep_shape(preset):
    rows = run_sweep(preset("5g_umi_8x8"))
    assert len(rows) == 1001
    assert rows[0].x_m == 0.0 and rows[-1].x_m == 1000.0
    assert all(r.rate_bps > 0 and r.s_i_w_m2 > 0 for r in rows)


def test_serving_switches(preset):
    assert serving_switches(run_sweep(preset("5g_umi_8x8"))) == [100.0, 300.0, 500.0, 700.0, 900.0]
    assert serving_switches(run_sweep(preset("r9_umi"))) == [500.0]


def test_sawtooth_minima_at_edges(preset):
    rows = run_sweep(preset("5g_uma_8x8"))
    minima = [rows[i].x_m for i in local_minima([r.p_r_dbm for r in rows])]
    assert minima == [100.0, 300.0, 500.0, 700.0, 900.0]


def test_zero_length_sweep(tmp_path):
    cfg = load_config(write(tmp_path, dict(UMI, sweep={"start_m": 250.0, "end_m": 250.0})))
    rows = run_sweep(cfg)
    assert len(rows) == 1 and rows[0].x_m == 250.0


def test_drop_mode_deterministic(preset):
    cfg = preset("5g_umi_8x8").with_overrides({"sweep.mode": "drop", "seed": 3})
    a, b = run_sweep(cfg), run_sweep(cfg)
    assert len(a) == 19 * 3 * 30
    assert a == b
    c = run_sweep(cfg.with_overrides({"seed": 4}))
    assert [r.x_m for r in a] != [r.x_m for r in c]


def test_backends_agree(preset):
    from rfexposure.kernels import get_backend
    cfg = preset("5g_rma_16x16")
    a = run_sweep(cfg, get_backend("numpy"))
    b = run_sweep(cfg, get_backend("numba"))
    np.testing.assert_allclose([r.p_r_dbm for r in a], [r.p_r_dbm for r in b], rtol=1e-12)


def test_monte_carlo_los_mode(preset):
    cfg = preset("5g_umi_8x8").with_overrides({"los_mode": "monte_carlo", "seed": 1})
    rows = run_sweep(cfg)
    assert rows == run_sweep(cfg)
    assert len(rows) == 1001


def test_compare_identical_is_unity(preset):
    rows = run_sweep(preset("r9_sma"))
    report = compare_systems(rows, rows)
    assert report.median_rate_ratio == 1.0 and report.median_pd_ratio == 1.0
    assert report.edge_rate_ratio == [1.0]


def test_compare_requires_shared_grid(tmp_path, preset):
    rows = run_sweep(preset("r9_sma"))
    with pytest.raises(ValueError, match="grid"):
        compare_systems(rows, rows[:-1])


def test_metadata_carries_versions(preset):
    cfg = preset("5g_umi_8x8")
    meta = run_metadata(cfg)
    assert meta["config_hash"] == cfg.config_hash()
    assert meta["model_file_version"]
    assert meta["param.site_plan.isd_m"].endswith("[published]")


def test_sweep_error_names_position(preset, monkeypatch):
    import rfexposure.scenario as sc
    real = sc._evaluate

    def flaky(config, sites, ues, *args):
        if np.any(np.isclose(ues[:, 0], 42.0)):
            raise ValueError("boom")
        return real(config, sites, ues, *args)
    monkeypatch.setattr(sc, "_evaluate", flaky)
    with pytest.raises(SweepError, match="x=42.000"):
        run_sweep(preset("5g_umi_8x8"))


def test_build_config_rejects_non_object():
    with pytest.raises(ConfigError):
        build_config([1, 2])


def test_aggregate_exposure_exceeds_serving(preset):
    cfg = preset("5g_umi_8x8")
    serving = run_sweep(cfg)
    total = run_sweep(cfg.with_overrides({"exposure.mode": "aggregate"}))
    assert all(t.s_i_w_m2 >= s.s_i_w_m2 for t, s in zip(total, serving))
    assert any(t.s_i_w_m2 > s.s_i_w_m2 for t, s in zip(total, serving))
