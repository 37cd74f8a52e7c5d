import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rfexposure.propagation import (DistanceClampWarning, Environment, ModelError,
                                    PathLossQuery, default_models, expected_path_loss_db,
                                    free_space_path_loss, los_probability, mix_path_loss,
                                    parse_models, path_loss_db, sample_path_loss_db)

ENVS = [Environment("FiveG", p, 28.0) for p in ("RMa", "UMa", "UMi")] + [
    Environment("Release9", p, 1.9) for p in ("SMa", "UMa", "UMi")]
HEIGHTS = {"FiveG": 10.0, "Release9": 32.0}


def query(env, d2d, los="Expected", h_ue=1.5):
    h = HEIGHTS[env.system]
    return PathLossQuery(math.hypot(d2d, h - h_ue), d2d, h, h_ue, los)


# scalar re-transcriptions of the published formulas, used as oracles
def umi_los_ref(d3, fc):
    return 32.4 + 21 * math.log10(d3) + 20 * math.log10(fc)


def umi_nlos_ref(d3, fc, hut=1.5):
    return max(umi_los_ref(d3, fc), 35.3 * math.log10(d3) + 22.4 + 21.3 * math.log10(fc)
               - 0.3 * (hut - 1.5))


def uma_los_ref(d3, fc):
    return 28.0 + 22 * math.log10(d3) + 20 * math.log10(fc)


def hata_ref(d, f_mhz, hb, hm, c):
    return ((44.9 - 6.55 * math.log10(hb)) * math.log10(d / 1000) + 45.5
            + (35.46 - 1.1 * hm) * math.log10(f_mhz) - 13.82 * math.log10(hb) + 0.7 * hm + c)


def rma_los_ref(d3, fc, h=5.0):
    return (20 * math.log10(40 * math.pi * d3 * fc / 3) + min(0.03 * h ** 1.72, 10) * math.log10(d3)
            - min(0.044 * h ** 1.72, 14.77) + 0.002 * math.log10(h) * d3)


def test_umi_formulas_match_reference():
    env = ENVS[2]
    for d in (20.0, 100.0, 500.0):
        d3 = math.hypot(d, 8.5)
        assert path_loss_db(env, query(env, d, "LOS")) == pytest.approx(umi_los_ref(d3, 28), abs=1e-9)
        assert path_loss_db(env, query(env, d, "NLOS")) == pytest.approx(umi_nlos_ref(d3, 28), abs=1e-9)


def test_uma_and_rma_los_match_reference():
    d3 = math.hypot(100.0, 8.5)
    assert path_loss_db(ENVS[1], query(ENVS[1], 100.0, "LOS")) == pytest.approx(
        uma_los_ref(d3, 28), abs=1e-9)
    assert path_loss_db(ENVS[0], query(ENVS[0], 100.0, "LOS")) == pytest.approx(
        rma_los_ref(d3, 28), abs=1e-9)


def test_release9_macro_matches_hata():
    for env, c in ((ENVS[3], 0.0), (ENVS[4], 3.0)):
        d3 = math.hypot(500.0, 30.5)
        assert path_loss_db(env, query(env, 500.0)) == pytest.approx(
            hata_ref(d3, 1900.0, 32.0, 1.5, c), abs=1e-9)


def test_release9_umi_cost_wi():
    env = ENVS[5]
    d3 = math.hypot(200.0, 30.5)
    assert path_loss_db(env, query(env, 200.0, "LOS")) == pytest.approx(
        -35.4 + 26 * math.log10(d3) + 20 * math.log10(1900), abs=1e-9)
    assert path_loss_db(env, query(env, 200.0, "NLOS")) == pytest.approx(
        -55.9 + 38 * math.log10(d3) + (24.5 + 1.5 * 1900 / 925) * math.log10(1900), abs=1e-9)


@pytest.mark.parametrize("env", ENVS, ids=lambda e: e.key)
def test_los_probability_limits(env):
    assert los_probability(env, 0.0) == 1.0
    assert los_probability(env, 10_000.0) < 0.05
    d = np.arange(0.0, 10_000.0, 1.0)
    p = los_probability(env, d)
    assert np.all((p >= 0) & (p <= 1))
    assert np.all(np.diff(p) <= 1e-15)


def test_umi_all_los_threshold():
    env = ENVS[2]
    assert los_probability(env, 18.0) == 1.0
    assert los_probability(env, 18.0 + 1e-6) < 1.0
    # 18/d + exp(-d/36)(1 - 18/d) at d = 100
    assert los_probability(env, 100.0) == pytest.approx(
        0.18 + math.exp(-100 / 36) * 0.82, rel=1e-12)


@pytest.mark.parametrize("env", [e for e in ENVS if not default_models()[e].single_branch],
                         ids=lambda e: e.key)
def test_los_branch_near_free_space(env):
    h = HEIGHTS[env.system]
    d2d = math.sqrt(50.0 ** 2 - (h - 1.5) ** 2)
    pl = path_loss_db(env, PathLossQuery(50.0, d2d, h, 1.5, "LOS"))
    assert abs(pl - free_space_path_loss(env.carrier_ghz, 50.0)) <= 15.0


@pytest.mark.parametrize("env", ENVS, ids=lambda e: e.key)
@pytest.mark.parametrize("state", ["LOS", "NLOS", "Expected"])
def test_farther_is_lossier(env, state):
    assert path_loss_db(env, query(env, 200.0, state)) > path_loss_db(env, query(env, 100.0, state))


@pytest.mark.parametrize("env", ENVS, ids=lambda e: e.key)
def test_branches_monotone_on_validity_grid(env, backend):
    prof = default_models()[env]
    h = HEIGHTS[env.system]
    d2d = np.arange(prof.d2d_min, prof.d2d_max + 1.0, 1.0)
    d3d = np.hypot(d2d, h - 1.5)
    los, nlos, clamped = prof.branches(d2d, d3d, env.carrier_ghz, h, 1.5, backend=backend)
    assert not clamped.any()
    assert np.all(np.diff(los) >= -1e-9)
    assert np.all(np.diff(nlos) >= -1e-9)
    assert np.all(nlos >= los)
    exp, _ = prof.expected(d2d, d3d, env.carrier_ghz, h, 1.5, backend=backend)
    assert np.all(exp >= los - 1e-9) and np.all(exp <= nlos + 1e-9)
    p = prof.los_probability(d2d, 1.5)
    db_average = p * los + (1 - p) * nlos
    # Jensen: linear-domain mixture never exceeds the dB-domain average
    assert np.all(exp <= db_average + 1e-9)


def test_expected_equals_los_where_all_los():
    env = ENVS[2]
    q = query(env, 15.0)
    assert expected_path_loss_db(env, q) == path_loss_db(env, query(env, 15.0, "LOS"))


def test_mixture_examples():
    assert mix_path_loss(100.0, 120.0, 1.0) == 100.0
    assert mix_path_loss(100.0, 120.0, 0.0) == 120.0
    # -10 log10(0.5e-10 + 0.5e-12)
    assert mix_path_loss(100.0, 120.0, 0.5) == pytest.approx(102.96708621881338, abs=1e-9)
    assert mix_path_loss(100.0, 120.0, 0.5) == pytest.approx(102.9, abs=0.1)


@pytest.mark.parametrize("env", [ENVS[0], ENVS[1], ENVS[2], ENVS[5]], ids=lambda e: e.key)
@pytest.mark.parametrize("d2d", [60.0, 150.0])
def test_bernoulli_sampling_agrees_with_mixture(env, d2d):
    q = query(env, d2d)
    draws = sample_path_loss_db(env, q, 100_000, seed=2024)
    mc = -10 * np.log10(np.mean(10 ** (-draws / 10)))
    assert abs(mc - expected_path_loss_db(env, q)) <= 0.5


def test_free_space_examples():
    assert free_space_path_loss(28.0, 100.0) == pytest.approx(101.4, abs=0.05)
    assert free_space_path_loss(1.9, 1000.0) == pytest.approx(98.0, abs=0.05)
    f = 3.5
    d_unit = 299792458.0 / (4 * math.pi * f * 1e9)
    assert free_space_path_loss(f, d_unit) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ModelError):
        free_space_path_loss(28.0, 0.0)


def test_clamp_warns_and_holds_range_edge():
    env = ENVS[2]
    with pytest.warns(DistanceClampWarning):
        near = path_loss_db(env, query(env, 2.0, "LOS"))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        edge = path_loss_db(env, query(env, 10.0, "LOS"))
    assert near == edge


def test_invalid_geometry_rejected():
    with pytest.raises(ModelError):
        PathLossQuery(d3d=10.0, d2d=20.0, h_ap=10.0, h_ue=1.5)
    with pytest.raises(ModelError):
        PathLossQuery(d3d=5.0, d2d=0.0, h_ap=10.0, h_ue=1.5)


def test_unknown_environment():
    with pytest.raises(ModelError):
        Environment("FiveG", "SMa", 28.0)
    with pytest.raises(ModelError):
        Environment("LTE", "UMa", 2.0)


def test_carrier_outside_model_range():
    env = Environment("FiveG", "RMa", 60.0)
    with pytest.raises(ModelError):
        los_probability(env, 10.0)


def test_model_file_errors():
    with pytest.raises(ModelError):
        parse_models({"nope": 1})
    doc = json.loads((default_models().path and open(default_models().path).read()) or "{}")
    doc["profiles"]["FiveG/UMi"]["los_pl"]["coefficients"].pop("b_near")
    with pytest.raises(ModelError, match="b_near"):
        parse_models(doc)
    doc["profiles"]["FiveG/UMi"]["los_pl"]["form"] = "mystery"
    with pytest.raises(ModelError, match="mystery"):
        parse_models(doc)


def test_shipped_model_file_is_versioned():
    models = default_models()
    assert models.version
    assert set(models.keys()) == {e.key for e in ENVS}


@given(st.floats(0.0, 1.0), st.floats(40.0, 160.0), st.floats(0.0, 60.0))
def test_mixture_between_branches(p, los, gap):
    m = mix_path_loss(los, los + gap, p)
    assert los - 1e-9 <= m <= los + gap + 1e-9
