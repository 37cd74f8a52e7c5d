import os
import subprocess
import sys

import numpy as np
import pytest

from rfexposure.kernels import get_backend
from rfexposure.propagation import Environment, default_models

NP, NB = get_backend("numpy"), get_backend("numba")
ENVS = [Environment("FiveG", p, 28.0) for p in ("RMa", "UMa", "UMi")] + [
    Environment("Release9", p, 1.9) for p in ("SMa", "UMa", "UMi")]


@pytest.mark.parametrize("env", ENVS, ids=lambda e: e.key)
def test_pathloss_and_los_parity(env):
    prof = default_models()[env]
    h = 10.0 if env.system == "FiveG" else 32.0
    d2d = np.linspace(0.0, 6000.0, 3001)
    d3d = np.hypot(d2d, h - 1.5)
    a = prof.branches(d2d, d3d, env.carrier_ghz, h, 1.5, backend=NP)
    b = prof.branches(d2d, d3d, env.carrier_ghz, h, 1.5, backend=NB)
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(prof.los_probability(d2d, 1.5, backend=NP),
                               prof.los_probability(d2d, 1.5, backend=NB), rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(prof.expected(d2d, d3d, env.carrier_ghz, h, 1.5, backend=NP)[0],
                               prof.expected(d2d, d3d, env.carrier_ghz, h, 1.5, backend=NB)[0],
                               rtol=1e-12)


def test_mix_and_mean_parity():
    rng = np.random.default_rng(3)
    los = rng.uniform(60, 120, 1000)
    nlos = los + rng.uniform(0, 40, 1000)
    p = rng.uniform(0, 1, 1000)
    p[:10], p[10:20] = 1.0, 0.0
    np.testing.assert_allclose(NP.mix_linear(los, nlos, p), NB.mix_linear(los, nlos, p), rtol=1e-13)
    assert np.array_equal(NB.mix_linear(los, nlos, p)[:10], los[:10])
    assert NP.mean_linear_db(los) == pytest.approx(NB.mean_linear_db(los), rel=1e-13)


def test_nearest_site_parity_and_ties():
    rng = np.random.default_rng(4)
    sites = rng.uniform(-500, 500, (19, 3))
    ues = rng.uniform(-600, 600, (5000, 3))
    assert np.array_equal(NP.nearest_site(ues, sites), NB.nearest_site(ues, sites))
    tie_sites = np.array([[0.0, 0, 10], [200.0, 0, 10]])
    tie = np.array([[100.0, 0, 1.5]])
    assert NP.nearest_site(tie, tie_sites)[0] == NB.nearest_site(tie, tie_sites)[0] == 0


def test_unknown_backend():
    with pytest.raises(ValueError):
        get_backend("cuda")


def test_env_flag_selects_numpy():
    code = "from rfexposure.kernels import BACKEND; print(BACKEND.name)"
    env = dict(os.environ, RFEXPOSURE_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    assert out.stdout.strip() == "numpy"
