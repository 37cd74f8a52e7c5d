"""Path loss and LOS probability driven by the JSON model-definition file.

The engine knows only the functional forms in :mod:`rfexposure.kernels`;
every coefficient, breakpoint constant and validity range comes from the
model file (``data/pathloss_models.json`` by default).
"""
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
import json
import math
from pathlib import Path
import warnings

import numpy as np

from .kernels import BACKEND, FORM_PARAMETERS, LOS_FORM_PARAMETERS, SPEED_OF_LIGHT

SYSTEM_PROFILES = {
    "FiveG": ("RMa", "UMa", "UMi"),
    "Release9": ("SMa", "UMa", "UMi"),
}
LOS_STATES = ("LOS", "NLOS", "Expected")


class ModelError(ValueError):
    """Invalid model definition or a query the model cannot evaluate."""


class DistanceClampWarning(UserWarning):
    """A distance fell outside a model's validity range and was clamped."""


@dataclass(frozen=True)
class Environment:
    system: str
    profile: str
    carrier_ghz: float

    def __post_init__(self):
        if self.system not in SYSTEM_PROFILES:
            raise ModelError(f"unknown system {self.system!r}")
        if self.profile not in SYSTEM_PROFILES[self.system]:
            raise ModelError(f"profile {self.profile!r} is not defined for {self.system}; "
                             f"expected one of {SYSTEM_PROFILES[self.system]}")
        if not self.carrier_ghz > 0:
            raise ModelError("carrier_ghz must be > 0")

    @property
    def key(self):
        return f"{self.system}/{self.profile}"


@dataclass(frozen=True)
class PathLossQuery:
    d3d: float
    d2d: float
    h_ap: float
    h_ue: float
    los: str = "Expected"

    def __post_init__(self):
        if self.los not in LOS_STATES:
            raise ModelError(f"los must be one of {LOS_STATES}, got {self.los!r}")
        tol = 1e-9 * max(1.0, self.d3d)
        if self.d2d < 0 or self.d2d > self.d3d + tol:
            raise ModelError(f"invalid geometry: d2d={self.d2d} must lie in [0, d3d={self.d3d}]")
        if self.d3d + tol < abs(self.h_ap - self.h_ue):
            raise ModelError(f"invalid geometry: d3d={self.d3d} is shorter than the height "
                             f"difference {abs(self.h_ap - self.h_ue)}")


@dataclass(frozen=True)
class Branch:
    form: str
    params: tuple

    @classmethod
    def parse(cls, spec, table, where):
        form = spec.get("form")
        if form not in table:
            raise ModelError(f"{where}: unknown form {form!r}")
        coeffs = spec.get("coefficients", {})
        names = table[form]
        missing = [n for n in names if n not in coeffs]
        if missing:
            raise ModelError(f"{where}: form {form!r} is missing coefficients {missing}")
        return cls(form, tuple(float(coeffs[n]) for n in names))


@dataclass(frozen=True)
class PathLossProfile:
    key: str
    source: str
    carrier_range: tuple
    d2d_min: float
    d2d_max: float
    los_pl: Branch
    nlos_pl: Branch
    p_los: Branch
    nlos_floor_los: bool
    single_branch: bool
    sigma_los: float
    sigma_nlos: float

    def clamp(self, d2d, d3d, h_ap, h_ue):
        """Clamp ``d2d`` to the validity range and rebuild ``d3d`` from it.

        Returns ``(d2d, d3d, clamped_mask)``.
        """
        d2d = np.asarray(d2d, dtype=float)
        d3d = np.asarray(d3d, dtype=float)
        lo, hi = self.d2d_min, self.d2d_max
        clamped = (d2d < lo) | (d2d > hi)
        d2c = np.clip(d2d, lo, hi)
        d3c = np.where(clamped, np.hypot(d2c, h_ap - h_ue), d3d)
        return d2c, d3c, clamped

    def los_probability(self, d2d, h_ue=1.5, backend=None):
        kern = backend or BACKEND
        d = np.ascontiguousarray(np.atleast_1d(np.asarray(d2d, dtype=float)).ravel())
        if np.any(d < 0):
            raise ModelError("d2d must be >= 0")
        out = kern.los[self.p_los.form](d, float(h_ue), np.array(self.p_los.params))
        return np.clip(out, 0.0, 1.0).reshape(np.shape(d2d))

    def branches(self, d2d, d3d, carrier_ghz, h_ap, h_ue, backend=None):
        """``(pl_los, pl_nlos, clamped)`` on the clamped geometry."""
        kern = backend or BACKEND
        shape = np.broadcast(np.asarray(d2d), np.asarray(d3d)).shape
        d2c, d3c, clamped = self.clamp(*np.broadcast_arrays(np.asarray(d2d, dtype=float),
                                                           np.asarray(d3d, dtype=float)),
                                       h_ap, h_ue)
        a = np.ascontiguousarray(d2c.ravel())
        b = np.ascontiguousarray(d3c.ravel())
        args = (float(carrier_ghz), float(h_ap), float(h_ue))
        los = kern.pathloss[self.los_pl.form](a, b, *args, np.array(self.los_pl.params))
        if self.single_branch:
            nlos = los.copy()
        else:
            nlos = kern.pathloss[self.nlos_pl.form](a, b, *args, np.array(self.nlos_pl.params))
            if self.nlos_floor_los:
                nlos = np.maximum(nlos, los)
        return los.reshape(shape), nlos.reshape(shape), clamped.reshape(shape)

    def expected(self, d2d, d3d, carrier_ghz, h_ap, h_ue, backend=None):
        """Linear-domain LOS/NLOS mixture; returns ``(pl, clamped)``."""
        kern = backend or BACKEND
        los, nlos, clamped = self.branches(d2d, d3d, carrier_ghz, h_ap, h_ue, backend=kern)
        p = self.los_probability(np.asarray(d2d, dtype=float), h_ue, backend=kern)
        p = np.broadcast_to(p, los.shape)
        mixed = kern.mix_linear(np.ascontiguousarray(los.ravel()),
                                np.ascontiguousarray(nlos.ravel()),
                                np.ascontiguousarray(p.ravel(), dtype=float))
        return mixed.reshape(los.shape), clamped

    def shadow_sigma(self, p_los):
        return p_los * self.sigma_los + (1.0 - p_los) * self.sigma_nlos


class ModelSet:
    """Immutable collection of path-loss profiles loaded from one model file."""

    def __init__(self, profiles, version, path=None):
        self._profiles = dict(profiles)
        self.version = version
        self.path = path

    def __getitem__(self, key):
        if isinstance(key, Environment):
            key = key.key
        try:
            return self._profiles[key]
        except KeyError:
            raise ModelError(f"unknown environment {key!r}") from None

    def __contains__(self, key):
        return key in self._profiles

    def keys(self):
        return self._profiles.keys()

    def for_environment(self, env):
        prof = self[env]
        lo, hi = prof.carrier_range
        if not lo <= env.carrier_ghz <= hi:
            raise ModelError(f"{env.key}: carrier {env.carrier_ghz} GHz outside the model "
                             f"range [{lo}, {hi}] GHz")
        return prof


def parse_models(doc, path=None):
    if not isinstance(doc, dict) or "profiles" not in doc:
        raise ModelError("model file must be an object with a 'profiles' map")
    profiles = {}
    for key, spec in doc["profiles"].items():
        where = f"profiles[{key!r}]"
        try:
            val = spec["validity"]
            sf = spec.get("shadow_fading_db", {})
            profiles[key] = PathLossProfile(
                key=key,
                source=spec.get("source", ""),
                carrier_range=tuple(float(v) for v in spec["carrier_ghz_range"]),
                d2d_min=float(val["d2d_min_m"]),
                d2d_max=float(val["d2d_max_m"]),
                los_pl=Branch.parse(spec["los_pl"], FORM_PARAMETERS, where + ".los_pl"),
                nlos_pl=Branch.parse(spec["nlos_pl"], FORM_PARAMETERS, where + ".nlos_pl"),
                p_los=Branch.parse(spec["p_los"], LOS_FORM_PARAMETERS, where + ".p_los"),
                nlos_floor_los=bool(spec.get("nlos_floor_los", True)),
                single_branch=bool(spec.get("single_branch", False)),
                sigma_los=float(sf.get("los", 0.0)),
                sigma_nlos=float(sf.get("nlos", 0.0)),
            )
        except KeyError as exc:
            raise ModelError(f"{where}: missing field {exc.args[0]!r}") from None
    return ModelSet(profiles, str(doc.get("model_version", "unversioned")), path)


def load_models(path=None):
    """Load a model-definition file; ``None`` loads the shipped definitions."""
    if path is None:
        return default_models()
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        return parse_models(json.load(fh), path)


@lru_cache(maxsize=1)
def default_models():
    ref = resources.files("rfexposure") / "data" / "pathloss_models.json"
    return parse_models(json.loads(ref.read_text(encoding="utf-8")), str(ref))


def _profile(env, models):
    return (models or default_models()).for_environment(env)


def los_probability(env, d2d, models=None):
    """LOS probability at plan-view distance ``d2d`` (metres)."""
    out = _profile(env, models).los_probability(d2d)
    return float(out) if np.ndim(out) == 0 else out


def _warn_clamped(env, clamped):
    if np.any(clamped):
        warnings.warn(f"{env.key}: {int(np.sum(clamped))} distance(s) outside the validity "
                      "range were clamped to the range edge", DistanceClampWarning,
                      stacklevel=3)


def path_loss_db(env, query, models=None):
    """Path loss in dB for the query's LOS state (``Expected`` mixes both)."""
    prof = _profile(env, models)
    if query.los == "Expected":
        pl, clamped = prof.expected(query.d2d, query.d3d, env.carrier_ghz,
                                    query.h_ap, query.h_ue)
    else:
        los, nlos, clamped = prof.branches(query.d2d, query.d3d, env.carrier_ghz,
                                           query.h_ap, query.h_ue)
        pl = los if query.los == "LOS" else nlos
    _warn_clamped(env, clamped)
    return float(pl)


def expected_path_loss_db(env, query, models=None):
    return path_loss_db(env, PathLossQuery(query.d3d, query.d2d, query.h_ap, query.h_ue,
                                           "Expected"), models)


def mix_path_loss(pl_los, pl_nlos, p_los):
    """``-10 log10(p 10^(-L/10) + (1-p) 10^(-N/10))`` on scalars or arrays."""
    shape = np.broadcast(np.asarray(pl_los), np.asarray(pl_nlos), np.asarray(p_los)).shape
    a, b, p = (np.ascontiguousarray(np.broadcast_to(np.asarray(v, dtype=float), shape).ravel())
               for v in (pl_los, pl_nlos, p_los))
    out = BACKEND.mix_linear(a, b, p).reshape(shape)
    return float(out) if out.ndim == 0 else out


def sample_path_loss_db(env, query, n, seed, models=None):
    """``n`` Bernoulli draws of the LOS state; returns the per-draw path loss."""
    prof = _profile(env, models)
    los, nlos, _ = prof.branches(query.d2d, query.d3d, env.carrier_ghz, query.h_ap, query.h_ue)
    p = float(prof.los_probability(query.d2d, query.h_ue))
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    is_los = rng.random(n) < p
    return np.where(is_los, float(los), float(nlos))


def free_space_path_loss(carrier_ghz, d):
    """Friis free-space loss ``20 log10(4 pi d f / c)`` in dB."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr <= 0):
        raise ModelError("distance must be > 0")
    out = 20.0 * np.log10(4.0 * math.pi * d_arr * carrier_ghz * 1e9 / SPEED_OF_LIGHT)
    return float(out) if out.ndim == 0 else out
