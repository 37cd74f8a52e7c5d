"""Scenario configuration, preset loading, sweeps and system comparison."""
from dataclasses import dataclass, field, fields
from importlib import resources
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .antenna import ArrayConfig, ElementPattern, fraunhofer_distance
from .exposure import ExposureLimits, dbm_to_w, load_tissue, sar_far_field
from .geometry import (SitePlan, collinear_sites, drop_ues, generate_hex_layout,
                       nearest_sites, positions_array, sector_index, sectorize)
from .kernels import BACKEND
from .link import LinkModel, NoiseModel, STEERING_MODES, noise_power_dbm, received_power_dbm
from .propagation import Environment, ModelError, default_models, load_models


class ConfigError(ValueError):
    """Schema or validation failure in a scenario configuration."""


class SweepError(RuntimeError):
    """Runtime failure while evaluating a sweep, annotated with the position."""


# Parameter values stated for each system in the source parameter table.
# Sets hold the alternatives the table lists.
PUBLISHED_VALUES = {
    "FiveG": {
        "environment.profile": {"RMa", "UMa", "UMi"},
        "environment.carrier_ghz": {28.0},
        "site_plan.isd_m": {200.0},
        "site_plan.rings": {2},
        "site_plan.sectors_per_site": {3},
        "site_plan.site_height_m": {10.0},
        "array.rows": {8, 16},
        "array.cols": {8, 16},
        "array.spacing_wavelengths": {0.5},
        "array.element_power_dbm": {21.0},
        "array.element_gain_dbi": {5.0},
        "element_pattern.a_m_db": {30.0},
        "noise.bandwidth_hz": {850e6},
        "noise.noise_figure_db": {7.0},
        "noise.temperature_k": {290.0},
        "sweep.start_m": {0.0},
        "sweep.end_m": {1000.0},
        "sweep.ues_per_sector": {30},
        "exposure.sar_limit_w_kg": {2.0, 4.0},
    },
    "Release9": {
        "environment.profile": {"SMa", "UMa", "UMi"},
        "environment.carrier_ghz": {1.9},
        "site_plan.isd_m": {1000.0},
        "site_plan.sectors_per_site": {6},
        "site_plan.site_height_m": {32.0},
        "array.rows": {4},
        "array.cols": {4},
        "array.spacing_wavelengths": {0.5},
        "array.total_power_dbm": {43.0},
        "array.panel_gain_dbi": {17.0},
        "element_pattern.theta_3db_deg": {35.0},
        "element_pattern.a_m_db": {23.0},
        "noise.bandwidth_hz": {20e6},
        "noise.noise_figure_db": {7.0},
        "noise.temperature_k": {290.0},
        "sweep.start_m": {0.0},
        "sweep.end_m": {1000.0},
        "exposure.sar_limit_w_kg": {2.0, 4.0},
    },
}

_COMMON_DEFAULTS = {
    "site_plan.rings": 2,
    "ue_height_m": 1.5,
    "ue_gain_dbi": 0.0,
    "array.spacing_wavelengths": 0.5,
    "noise.noise_figure_db": 7.0,
    "noise.temperature_k": 290.0,
    "steering": "ideal",
    "los_mode": "expected",
    "shadow_fading": False,
    "exposure.mode": "serving",
    "exposure.incidence_deg": 0.0,
    "exposure.pd_limit_w_m2": 10.0,
    "exposure.sar_limit_w_kg": 2.0,
    "sweep.mode": "line",
    "sweep.start_m": 0.0,
    "sweep.end_m": 1000.0,
    "sweep.step_m": 1.0,
    "sweep.ues_per_sector": 30,
    "seed": 0,
    "model_file": None,
}

SYSTEM_DEFAULTS = {
    "FiveG": {
        **_COMMON_DEFAULTS,
        "environment.carrier_ghz": 28.0,
        "site_plan.isd_m": 200.0,
        "site_plan.sectors_per_site": 3,
        "site_plan.site_height_m": 10.0,
        "array.rows": 8,
        "array.cols": 8,
        "array.element_power_dbm": 21.0,
        "array.element_gain_dbi": 5.0,
        "element_pattern.phi_3db_deg": 65.0,
        "element_pattern.theta_3db_deg": 65.0,
        "element_pattern.a_m_db": 30.0,
        "noise.bandwidth_hz": 850e6,
        "tissue_file": "skin_dry_28ghz",
    },
    "Release9": {
        **_COMMON_DEFAULTS,
        "environment.carrier_ghz": 1.9,
        "site_plan.isd_m": 1000.0,
        "site_plan.sectors_per_site": 6,
        "site_plan.site_height_m": 32.0,
        "array.rows": 4,
        "array.cols": 4,
        "array.total_power_dbm": 43.0,
        "array.panel_gain_dbi": 17.0,
        "element_pattern.phi_3db_deg": 70.0,
        "element_pattern.theta_3db_deg": 35.0,
        "element_pattern.a_m_db": 23.0,
        "noise.bandwidth_hz": 20e6,
        "tissue_file": "skin_dry_1p9ghz",
    },
}

REQUIRED = ("system", "environment.profile")
KNOWN_SECTIONS = {"environment", "site_plan", "array", "element_pattern", "noise", "exposure",
                  "sweep"}
KNOWN_TOP = {"name", "label", "system", "ue_height_m", "ue_gain_dbi", "steering", "los_mode",
             "shadow_fading", "seed", "tissue_file", "model_file", "output", *KNOWN_SECTIONS}
POWER_KEYS = (("array.element_power_dbm", "array.total_power_dbm"),
              ("array.element_gain_dbi", "array.panel_gain_dbi"))


def _flatten(doc, prefix=""):
    out = {}
    for key, value in doc.items():
        path = f"{prefix}{key}"
        if isinstance(value, dict) and key in KNOWN_SECTIONS:
            out.update(_flatten(value, path + "."))
        else:
            out[path] = value
    return out


def _unflatten(flat):
    out = {}
    for path, value in flat.items():
        node = out
        parts = path.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return out


def _is_published(system, path, value):
    allowed = PUBLISHED_VALUES.get(system, {}).get(path)
    if allowed is None or isinstance(value, bool):
        return False
    return value in allowed


@dataclass
class ScenarioConfig:
    name: str
    label: str
    environment: Environment
    site_plan: SitePlan
    pattern: ElementPattern
    array: ArrayConfig
    noise: NoiseModel
    ue_height: float
    ue_gain_dbi: float
    steering: str
    los_mode: str
    shadow_fading: bool
    exposure_mode: str
    incidence_deg: float
    limits: ExposureLimits
    sweep_mode: str
    start_m: float
    end_m: float
    step_m: float
    ues_per_sector: int
    seed: int
    tissue_file: str
    model_file: str
    output: str
    values: dict = field(repr=False)
    provenance: dict = field(repr=False)
    given: dict = field(repr=False, default_factory=dict)
    base_dir: str = None

    @property
    def system(self):
        return self.environment.system

    def link_model(self, models=None):
        return LinkModel(self.environment, self.pattern, self.array, self.noise,
                         ap_height=self.site_plan.site_height, ue_height=self.ue_height,
                         ue_gain_dbi=self.ue_gain_dbi, steering=self.steering,
                         models=models or self.models())

    def models(self):
        return load_models(self.model_file) if self.model_file else default_models()

    def tissue(self):
        return load_tissue(self.tissue_file)

    def canonical_json(self):
        return json.dumps(_unflatten(self.values), sort_keys=True, separators=(",", ":"))

    def config_hash(self):
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()[:16]

    def with_overrides(self, overrides):
        """Re-validate with ``{"dotted.path": value}`` overrides applied."""
        merged = dict(self.given)
        merged.update(overrides)
        return build_config(_unflatten(merged), base_dir=self.base_dir, name=self.name)


def _coerce(path, value, kind):
    try:
        if kind is bool:
            if not isinstance(value, bool):
                raise TypeError
            return value
        if kind is int:
            if isinstance(value, bool) or float(value) != int(value):
                raise TypeError
            return int(value)
        if kind is float:
            if isinstance(value, bool):
                raise TypeError
            out = float(value)
            if not math.isfinite(out):
                raise TypeError
            return out
        if kind is str:
            if not isinstance(value, str):
                raise TypeError
            return value
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: expected {kind.__name__}, got {value!r}") from None
    return value


_KINDS = {
    "environment.carrier_ghz": float, "site_plan.isd_m": float, "site_plan.rings": int,
    "site_plan.sectors_per_site": int, "site_plan.site_height_m": float,
    "array.rows": int, "array.cols": int, "array.spacing_wavelengths": float,
    "array.element_power_dbm": float, "array.total_power_dbm": float,
    "array.element_gain_dbi": float, "array.panel_gain_dbi": float,
    "element_pattern.phi_3db_deg": float, "element_pattern.theta_3db_deg": float,
    "element_pattern.a_m_db": float, "noise.bandwidth_hz": float,
    "noise.noise_figure_db": float, "noise.temperature_k": float, "ue_height_m": float,
    "ue_gain_dbi": float, "exposure.incidence_deg": float, "exposure.pd_limit_w_m2": float,
    "exposure.sar_limit_w_kg": float, "sweep.start_m": float, "sweep.end_m": float,
    "sweep.step_m": float, "sweep.ues_per_sector": int, "seed": int, "shadow_fading": bool,
    "steering": str, "los_mode": str, "exposure.mode": str, "sweep.mode": str,
    "environment.profile": str, "system": str, "name": str, "label": str,
}


def build_config(doc, base_dir=None, name=None):
    """Validate a parsed config document and apply system defaults."""
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(doc) - KNOWN_TOP)
    if unknown:
        raise ConfigError(f"unknown field {unknown[0]!r}")
    given = _flatten(doc)
    for section in KNOWN_SECTIONS & set(doc):
        if not isinstance(doc[section], dict):
            raise ConfigError(f"{section}: expected an object")
    for path in REQUIRED:
        if path not in given or given[path] in (None, ""):
            raise ConfigError(f"missing required field {path!r}")
    system = given["system"]
    if system not in SYSTEM_DEFAULTS:
        raise ConfigError(f"system: expected one of {sorted(SYSTEM_DEFAULTS)}, got {system!r}")
    defaults = SYSTEM_DEFAULTS[system]
    for path in given:
        if path not in defaults and path not in _KINDS and path not in ("tissue_file",
                                                                        "output"):
            raise ConfigError(f"unknown field {path!r}")

    values, provenance = {}, {}
    # explicit power/gain style wins over the system default style
    skip = set()
    for per_element, total in POWER_KEYS:
        if per_element in given and total in given:
            raise ConfigError(f"give only one of {per_element!r} and {total!r}")
        if per_element in given:
            skip.add(total)
        elif total in given:
            skip.add(per_element)
    for path in sorted(set(defaults) | set(given)):
        if path in skip:
            continue
        if path in given:
            value = given[path]
            tag = "user"
        else:
            value = defaults[path]
            tag = "default"
        if path in _KINDS and value is not None:
            value = _coerce(path, value, _KINDS[path])
        if _is_published(system, path, value):
            tag = "published"
        values[path] = value
        provenance[path] = tag

    values.setdefault("name", name or "scenario")
    values.setdefault("label", values["name"])
    provenance.setdefault("name", "user")
    provenance.setdefault("label", "user")
    config = _materialize(values, provenance, base_dir)
    config.given = given
    config.base_dir = None if base_dir is None else str(base_dir)
    return config


def _resolve(path_value, base_dir):
    if path_value is None:
        return None
    p = Path(path_value)
    if not p.is_absolute() and base_dir is not None and (Path(base_dir) / p).exists():
        return str(Path(base_dir) / p)
    return str(p)


def _materialize(v, provenance, base_dir):
    def err(path, exc):
        return ConfigError(f"{path}: {exc}")

    try:
        env = Environment(v["system"], v["environment.profile"], v["environment.carrier_ghz"])
    except ModelError as exc:
        raise err("environment", exc) from None
    try:
        plan = SitePlan(v["site_plan.isd_m"], v["site_plan.rings"],
                        v["site_plan.sectors_per_site"], v["site_plan.site_height_m"],
                        v["ue_height_m"])
    except ValueError as exc:
        raise err("site_plan", exc) from None
    try:
        if "array.total_power_dbm" in v or "array.panel_gain_dbi" in v:
            n_db = 10.0 * math.log10(v["array.rows"] * v["array.cols"])
            p_el = v.get("array.element_power_dbm", v.get("array.total_power_dbm", 0.0) - n_db)
            g_el = v.get("array.element_gain_dbi", v.get("array.panel_gain_dbi", 0.0) - n_db)
        else:
            p_el, g_el = v["array.element_power_dbm"], v["array.element_gain_dbi"]
        array = ArrayConfig(v["array.rows"], v["array.cols"], p_el, g_el,
                            v["array.spacing_wavelengths"])
    except (ValueError, KeyError) as exc:
        raise err("array", exc) from None
    try:
        pattern = ElementPattern(v["element_pattern.phi_3db_deg"],
                                 v["element_pattern.theta_3db_deg"],
                                 v["element_pattern.a_m_db"], array.element_gain_dbi)
    except ValueError as exc:
        raise err("element_pattern", exc) from None
    try:
        noise = NoiseModel(v["noise.bandwidth_hz"], v["noise.noise_figure_db"],
                           v["noise.temperature_k"])
    except ValueError as exc:
        raise err("noise", exc) from None
    try:
        limits = ExposureLimits(v["exposure.pd_limit_w_m2"], v["exposure.sar_limit_w_kg"])
    except ValueError as exc:
        raise err("exposure", exc) from None

    if v["steering"] not in STEERING_MODES:
        raise ConfigError(f"steering: expected one of {STEERING_MODES}, got {v['steering']!r}")
    if v["los_mode"] not in ("expected", "monte_carlo"):
        raise ConfigError(f"los_mode: expected 'expected' or 'monte_carlo', got {v['los_mode']!r}")
    if v["exposure.mode"] not in ("serving", "aggregate"):
        raise ConfigError("exposure.mode: expected 'serving' or 'aggregate'")
    if v["sweep.mode"] not in ("line", "drop"):
        raise ConfigError(f"sweep.mode: expected 'line' or 'drop', got {v['sweep.mode']!r}")
    if not v["sweep.step_m"] > 0:
        raise ConfigError("sweep.step_m: must be > 0")
    if v["sweep.end_m"] < v["sweep.start_m"]:
        raise ConfigError("sweep.end_m: must be >= sweep.start_m")
    if v["sweep.ues_per_sector"] < 0:
        raise ConfigError("sweep.ues_per_sector: must be >= 0")
    if v["seed"] < 0:
        raise ConfigError("seed: must be a non-negative integer")
    if v["ue_height_m"] < 1.0:
        raise ConfigError("ue_height_m: must be >= the 1 m effective environment height")
    if v["site_plan.site_height_m"] <= 1.0:
        raise ConfigError("site_plan.site_height_m: must exceed the 1 m effective "
                          "environment height")

    tissue_file = _resolve(v["tissue_file"], base_dir)
    model_file = _resolve(v["model_file"], base_dir)
    try:
        load_tissue(tissue_file)
    except ValueError as exc:
        raise err("tissue_file", exc) from None
    if model_file is not None:
        try:
            models = load_models(model_file)
        except FileNotFoundError:
            raise ConfigError(f"model_file: not found: {model_file}") from None
        except ValueError as exc:
            raise err("model_file", exc) from None
    else:
        models = default_models()
    try:
        models.for_environment(env)
    except ModelError as exc:
        raise err("environment", exc) from None

    return ScenarioConfig(
        name=v["name"], label=v["label"], environment=env, site_plan=plan, pattern=pattern,
        array=array, noise=noise, ue_height=v["ue_height_m"], ue_gain_dbi=v["ue_gain_dbi"],
        steering=v["steering"], los_mode=v["los_mode"], shadow_fading=v["shadow_fading"],
        exposure_mode=v["exposure.mode"], incidence_deg=v["exposure.incidence_deg"],
        limits=limits, sweep_mode=v["sweep.mode"], start_m=v["sweep.start_m"],
        end_m=v["sweep.end_m"], step_m=v["sweep.step_m"],
        ues_per_sector=v["sweep.ues_per_sector"], seed=v["seed"], tissue_file=tissue_file,
        model_file=model_file, output=v.get("output") or f"out/{v['name']}",
        values=v, provenance=provenance,
    )


def preset_names():
    root = resources.files("rfexposure") / "data" / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_config(path):
    """Load and validate a config file; a bare preset name loads the shipped preset."""
    key = str(path)
    if key in preset_names():
        ref = resources.files("rfexposure") / "data" / "presets" / f"{key}.json"
        text, base_dir, stem = ref.read_text(encoding="utf-8"), None, key
    else:
        p = Path(key)
        if not p.is_file():
            raise ConfigError(f"config file not found: {key}")
        text, base_dir, stem = p.read_text(encoding="utf-8"), p.parent, p.stem
    if not text.strip():
        doc = {}
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
    return build_config(doc, base_dir=base_dir, name=stem)


def provenance_log(config):
    """Lines describing where each parameter value came from."""
    lines = []
    for path in sorted(config.provenance):
        lines.append(f"{path} = {config.values.get(path)!r} [{config.provenance[path]}]")
    return lines


# ------------------------------------------------------------------ sweep --

@dataclass(frozen=True)
class SweepRow:
    x_m: float
    y_m: float
    serving_site: int
    d3d_m: float
    path_loss_db: float
    eirp_dbm: float
    p_r_dbm: float
    snr_db: float
    rate_bps: float
    s_i_w_m2: float
    sar_w_kg: float
    compliant_pd: bool
    compliant_sar: bool
    far_field_valid: bool


SWEEP_COLUMNS = tuple(f.name for f in fields(SweepRow))


def line_positions(start_m, end_m, step_m):
    n = int(math.floor((end_m - start_m) / step_m + 1e-9))
    return start_m + step_m * np.arange(n + 1)


def sweep_layout(config):
    """``(sites (m,3), ues (n,3))`` arrays for the configured sweep mode."""
    plan = config.site_plan
    if config.sweep_mode == "line":
        sites = positions_array(collinear_sites(config.start_m, config.end_m, plan.isd,
                                                plan.site_height))
        x = line_positions(config.start_m, config.end_m, config.step_m)
        ues = np.column_stack([x, np.zeros_like(x), np.full_like(x, config.ue_height)])
        return sites, ues
    site_list = generate_hex_layout(plan)
    ue_list = []
    for s_idx, site in enumerate(site_list):
        for k, sector in enumerate(sectorize(site, plan.sectors_per_site, plan.sector_radius)):
            seed = np.random.SeedSequence([config.seed, s_idx, k]).generate_state(1)[0]
            ue_list.extend(drop_ues(sector, config.ues_per_sector, int(seed), config.ue_height))
    return positions_array(site_list), positions_array(ue_list).reshape(-1, 3)


def _boresights(config, dx, dy):
    spp = config.site_plan.sectors_per_site
    width = 360.0 / spp
    k = sector_index(np.degrees(np.arctan2(dy, dx)), spp)
    return width / 2.0 + k * width


def _evaluate(config, sites, ues, link, tissue, backend):
    n = ues.shape[0]
    idx, d3d = nearest_sites(ues, sites, backend=backend)
    serving = sites[idx]
    dx = ues[:, 0] - serving[:, 0]
    dy = ues[:, 1] - serving[:, 1]
    d2d = np.hypot(dx, dy)
    boresight = _boresights(config, dx, dy)
    h_ap, h_ue = config.site_plan.site_height, config.ue_height
    prof = link.profile
    fc = config.environment.carrier_ghz
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0x5EED]))
    p_los = prof.los_probability(d2d, h_ue, backend=backend)
    if config.los_mode == "expected":
        pl, _ = prof.expected(d2d, d3d, fc, h_ap, h_ue, backend=backend)
        sigma = prof.shadow_sigma(p_los)
    else:
        los, nlos, _ = prof.branches(d2d, d3d, fc, h_ap, h_ue, backend=backend)
        is_los = rng.random(n) < p_los
        pl = np.where(is_los, los, nlos)
        sigma = np.where(is_los, prof.sigma_los, prof.sigma_nlos)
    if config.shadow_fading:
        pl = pl + sigma * rng.standard_normal(n)

    eirp = link.eirp_towards(dx, dy, boresight)
    p_r = received_power_dbm(eirp, config.ue_gain_dbi, pl)
    snr = p_r - noise_power_dbm(config.noise)
    rate = link.rate_bps(snr)

    if config.exposure_mode == "serving":
        s_i = dbm_to_w(eirp) / (4.0 * math.pi * d3d ** 2)
        d_near = d3d
    else:
        ddx = ues[:, None, 0] - sites[None, :, 0]
        ddy = ues[:, None, 1] - sites[None, :, 1]
        dd3 = np.sqrt(ddx ** 2 + ddy ** 2 + (ues[:, None, 2] - sites[None, :, 2]) ** 2)
        e_all = link.eirp_towards(ddx, ddy, _boresights(config, ddx, ddy))
        s_i = np.sum(dbm_to_w(e_all) / (4.0 * math.pi * dd3 ** 2), axis=1)
        d_near = d3d
    sar = sar_far_field(s_i, config.incidence_deg, tissue)
    sar = np.broadcast_to(np.asarray(sar, dtype=float), (n,))
    d_ff = fraunhofer_distance(config.array, fc)
    return {
        "x_m": ues[:, 0], "y_m": ues[:, 1], "serving_site": idx, "d3d_m": d3d,
        "path_loss_db": pl, "eirp_dbm": eirp, "p_r_dbm": p_r, "snr_db": snr,
        "rate_bps": np.asarray(rate, dtype=float).reshape(n), "s_i_w_m2": s_i,
        "sar_w_kg": sar, "compliant_pd": s_i <= config.limits.pd_w_m2,
        "compliant_sar": sar <= config.limits.sar_w_kg, "far_field_valid": d_near >= d_ff,
    }


def _spot_check(cols, config):
    # every 100th row: module-level invariants
    h = abs(config.site_plan.site_height - config.ue_height)
    for i in range(0, len(cols["x_m"]), 100):
        pr = cols["eirp_dbm"][i] + config.ue_gain_dbi - cols["path_loss_db"][i]
        ok = (abs(pr - cols["p_r_dbm"][i]) <= 1e-9 * max(1.0, abs(pr))
              and cols["rate_bps"][i] >= 0 and cols["s_i_w_m2"][i] >= 0
              and cols["sar_w_kg"][i] >= 0 and cols["d3d_m"][i] + 1e-9 >= h)
        if not ok:
            raise SweepError(f"row invariant violated at x={cols['x_m'][i]:.3f} m, "
                             f"y={cols['y_m'][i]:.3f} m")


def _rows_from_columns(cols):
    n = len(cols["x_m"])
    casts = {"serving_site": int, "compliant_pd": bool, "compliant_sar": bool,
             "far_field_valid": bool}
    lists = {name: [casts.get(name, float)(v) for v in np.asarray(cols[name]).tolist()]
             for name in SWEEP_COLUMNS}
    return [SweepRow(**{name: lists[name][i] for name in SWEEP_COLUMNS}) for i in range(n)]


def run_sweep(config, backend=None):
    """Evaluate every sweep position; returns one :class:`SweepRow` per UE."""
    kern = backend or BACKEND
    sites, ues = sweep_layout(config)
    if ues.shape[0] == 0:
        return []
    link = config.link_model()
    tissue = config.tissue()
    try:
        cols = _evaluate(config, sites, ues, link, tissue, kern)
    except (ValueError, ArithmeticError) as exc:
        # locate the first failing position for the error message
        for k in range(ues.shape[0]):
            try:
                _evaluate(config, sites, ues[k:k + 1], link, tissue, kern)
            except (ValueError, ArithmeticError) as inner:
                raise SweepError(f"at x={ues[k, 0]:.3f} m, y={ues[k, 1]:.3f} m: "
                                 f"{inner}") from inner
        raise SweepError(str(exc)) from exc
    _spot_check(cols, config)
    return _rows_from_columns(cols)


def serving_switches(rows):
    """x positions of the last row served by a site before the serving site changes."""
    return [rows[i].x_m for i in range(len(rows) - 1)
            if rows[i + 1].serving_site != rows[i].serving_site]


def local_minima(values):
    """Indices of strict interior local minima, with flat bottoms counted once."""
    v = np.asarray(values, dtype=float)
    out = []
    i = 1
    while i < len(v) - 1:
        j = i
        while j + 1 < len(v) - 1 and v[j + 1] == v[i]:
            j += 1
        if v[i - 1] > v[i] and v[j + 1] > v[j]:
            out.append(i)
        i = j + 1
    return out


# ------------------------------------------------------------- compare ----

@dataclass
class ComparisonReport:
    label_a: str
    label_b: str
    x_m: np.ndarray
    rate_ratio: np.ndarray
    pd_ratio: np.ndarray
    sar_ratio: np.ndarray
    edges_m: list
    edge_rate_a_bps: list
    edge_rate_b_bps: list

    @property
    def median_rate_ratio(self):
        return float(np.median(self.rate_ratio))

    @property
    def median_pd_ratio(self):
        return float(np.median(self.pd_ratio))

    @property
    def median_sar_ratio(self):
        return float(np.median(self.sar_ratio))

    @property
    def edge_rate_ratio(self):
        return [a / b for a, b in zip(self.edge_rate_a_bps, self.edge_rate_b_bps)]

    def to_dict(self):
        return {
            "a": self.label_a,
            "b": self.label_b,
            "positions": len(self.x_m),
            "median_rate_ratio": self.median_rate_ratio,
            "median_pd_ratio": self.median_pd_ratio,
            "median_sar_ratio": self.median_sar_ratio,
            "cell_edges_m": list(self.edges_m),
            "edge_rate_a_bps": list(self.edge_rate_a_bps),
            "edge_rate_b_bps": list(self.edge_rate_b_bps),
            "edge_rate_ratio": self.edge_rate_ratio,
            "min_edge_rate_a_bps": min(self.edge_rate_a_bps) if self.edges_m else None,
        }

    def to_text(self):
        d = self.to_dict()
        lines = [f"{self.label_a} vs {self.label_b} over {d['positions']} positions",
                 f"  median rate ratio: {d['median_rate_ratio']:.2f}",
                 f"  median PD ratio:   {d['median_pd_ratio']:.3g}",
                 f"  median SAR ratio:  {d['median_sar_ratio']:.3g}"]
        for x, ra, rb in zip(self.edges_m, self.edge_rate_a_bps, self.edge_rate_b_bps):
            lines.append(f"  edge x={x:g} m: {ra / 1e9:.3f} Gbit/s vs {rb / 1e9:.4f} Gbit/s "
                         f"(x{ra / rb:.1f})")
        return "\n".join(lines)


def _ratio(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(a == b, 1.0, a / b)
    return out


def compare_systems(rows_a, rows_b, edges=None, label_a="A", label_b="B"):
    """Per-position ratios of ``rows_a`` over ``rows_b`` on a shared x grid.

    Cell edges default to the serving-site switch points of ``rows_a``.
    """
    xa = np.array([r.x_m for r in rows_a])
    xb = np.array([r.x_m for r in rows_b])
    if xa.shape != xb.shape or not np.allclose(xa, xb, rtol=0, atol=1e-9):
        raise ValueError("sweeps do not share the same x grid")
    get = lambda rows, name: np.array([getattr(r, name) for r in rows], dtype=float)
    if edges is None:
        edges = serving_switches(rows_a)
    pos = {round(x, 9): i for i, x in enumerate(xa)}
    missing = [e for e in edges if round(e, 9) not in pos]
    if missing:
        raise ValueError(f"edge positions {missing} are not on the sweep grid")
    ra, rb = get(rows_a, "rate_bps"), get(rows_b, "rate_bps")
    ei = [pos[round(e, 9)] for e in edges]
    return ComparisonReport(
        label_a, label_b, xa, _ratio(ra, rb),
        _ratio(get(rows_a, "s_i_w_m2"), get(rows_b, "s_i_w_m2")),
        _ratio(get(rows_a, "sar_w_kg"), get(rows_b, "sar_w_kg")),
        list(edges), [float(ra[i]) for i in ei], [float(rb[i]) for i in ei])


def run_metadata(config, rows=None):
    """Ordered metadata for CSV comments/SVG: hashes, versions, tagged parameters."""
    models = config.models()
    tissue = config.tissue()
    meta = {
        "scenario": config.name,
        "label": config.label,
        "config_hash": config.config_hash(),
        "model_file_version": models.version,
        "tissue_file": tissue.name,
        "tissue_file_version": tissue.version,
    }
    if rows is not None:
        meta["rows"] = str(len(rows))
    for path in sorted(config.values):
        value = config.values[path]
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            meta[f"param.{path}"] = f"{value!r} [{config.provenance[path]}]"
    return meta
