"""Incident power density, field strength, SAR and exposure-limit checks."""
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
import json
import math
from pathlib import Path

import numpy as np

from .constants import CONSTANTS

# FCC 47 CFR 1.1310 general-population MPE, 1.5-100 GHz: 1.0 mW/cm^2.
DEFAULT_PD_LIMIT_W_M2 = 10.0
# ICNIRP (1998) general-public localized SAR, head and trunk / limbs.
SAR_LIMIT_HEAD_TRUNK_W_KG = 2.0
SAR_LIMIT_LIMBS_W_KG = 4.0

SHIPPED_TISSUE = {
    "skin_dry_28ghz": "skin_dry_28ghz.json",
    "skin_dry_1p9ghz": "skin_dry_1p9ghz.json",
}


class TissueError(ValueError):
    pass


@dataclass(frozen=True)
class TissueProperties:
    rho: float
    sigma: float
    delta: float
    epsilon: complex
    transmission: tuple      # ((angle_deg, T), ...)
    m_factor: tuple          # ((angle_deg, m), ...)
    frequency_ghz: float = float("nan")
    name: str = ""
    version: str = ""

    def __post_init__(self):
        if not self.rho > 0:
            raise TissueError("rho must be > 0")
        if self.sigma < 0:
            raise TissueError("sigma must be >= 0")
        if not self.delta > 0:
            raise TissueError("delta must be > 0")
        for label, table in (("transmission", self.transmission), ("m_factor", self.m_factor)):
            if len(table) == 0:
                raise TissueError(f"{label} table is empty")
            angles = [a for a, _ in table]
            if any(b <= a for a, b in zip(angles, angles[1:])):
                raise TissueError(f"{label} angles must be strictly increasing")
        if any(not 0.0 <= t <= 1.0 for _, t in self.transmission):
            raise TissueError("transmission coefficients must lie in [0, 1]")
        if any(m < 0 for _, m in self.m_factor):
            raise TissueError("m_factor values must be >= 0")

    @staticmethod
    def _lookup(table, angle, label):
        angles = np.array([a for a, _ in table], dtype=float)
        values = np.array([v for _, v in table], dtype=float)
        angle = np.asarray(angle, dtype=float)
        if np.any(angle < angles[0]) or np.any(angle > angles[-1]):
            raise TissueError(f"incidence angle outside the {label} table domain "
                              f"[{angles[0]}, {angles[-1]}] deg")
        return np.interp(angle, angles, values)

    def transmission_at(self, angle):
        return self._lookup(self.transmission, angle, "transmission")

    def m_at(self, angle):
        return self._lookup(self.m_factor, angle, "m_factor")


@dataclass(frozen=True)
class ExposureRecord:
    d: float
    s_i: float
    e_rms: float
    sar: float
    pd_limit_w_m2: float = DEFAULT_PD_LIMIT_W_M2
    sar_limit_w_kg: float = SAR_LIMIT_HEAD_TRUNK_W_KG
    compliant_pd: bool = None
    compliant_sar: bool = None


@dataclass(frozen=True)
class ExposureLimits:
    pd_w_m2: float = DEFAULT_PD_LIMIT_W_M2
    sar_w_kg: float = SAR_LIMIT_HEAD_TRUNK_W_KG

    def __post_init__(self):
        if not (self.pd_w_m2 > 0 and self.sar_w_kg > 0):
            raise ValueError("exposure limits must be positive")


def parse_tissue(doc, name=""):
    try:
        return TissueProperties(
            rho=float(doc["rho"]),
            sigma=float(doc["sigma"]),
            delta=float(doc["delta"]),
            epsilon=complex(float(doc["epsilon_re"]), -float(doc["epsilon_im"])),
            transmission=tuple((float(a), float(t)) for a, t in doc["transmission"]),
            m_factor=tuple((float(a), float(m)) for a, m in doc["m_factor"]),
            frequency_ghz=float(doc["frequency_ghz"]),
            name=doc.get("name", name),
            version=str(doc.get("version", "unversioned")),
        )
    except KeyError as exc:
        raise TissueError(f"tissue file is missing field {exc.args[0]!r}") from None


def load_tissue(path_or_name):
    """Load a tissue file by path or by shipped name (e.g. ``skin_dry_28ghz``)."""
    key = str(path_or_name)
    if key in SHIPPED_TISSUE:
        return _shipped_tissue(key)
    path = Path(key)
    if not path.is_file():
        raise TissueError(f"tissue file not found: {key}")
    with open(path, encoding="utf-8") as fh:
        return parse_tissue(json.load(fh), path.stem)


@lru_cache(maxsize=None)
def _shipped_tissue(name):
    ref = resources.files("rfexposure") / "data" / "tissue" / SHIPPED_TISSUE[name]
    return parse_tissue(json.loads(ref.read_text(encoding="utf-8")), name)


def incident_power_density(eirp_w, d):
    """Far-field incident power density ``P_T G_T / (4 pi d^2)`` in W/m^2."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be > 0")
    out = np.asarray(eirp_w, dtype=float) / (4.0 * math.pi * d * d)
    return float(out) if out.ndim == 0 else out


def field_strength_from_pd(s, eta=CONSTANTS.eta_free_space):
    """RMS electric field (V/m) of a plane wave carrying power density ``s``."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("power density must be >= 0")
    out = np.sqrt(s * eta)
    return float(out) if out.ndim == 0 else out


def pd_from_field_strength(e_rms, eta=CONSTANTS.eta_free_space):
    out = np.asarray(e_rms, dtype=float) ** 2 / eta
    return float(out) if out.ndim == 0 else out


def sar_from_fields(e_rms, tissue):
    e = np.asarray(e_rms, dtype=float)
    if np.any(e < 0):
        raise ValueError("field strength must be >= 0")
    out = tissue.sigma * e * e / tissue.rho
    return float(out) if out.ndim == 0 else out


def sar_far_field(s_i, incidence_deg, tissue):
    """Surface SAR from incident power density via the skin coupling terms."""
    s = np.asarray(s_i, dtype=float)
    if np.any(s < 0):
        raise ValueError("power density must be >= 0")
    coupling = tissue.transmission_at(incidence_deg) * tissue.m_at(incidence_deg)
    out = 2.0 * s * coupling / (tissue.delta * tissue.rho)
    return float(out) if out.ndim == 0 else out


def compliance(record, limits=None):
    """Fill the verdicts; both limits are inclusive (``value <= limit`` passes)."""
    limits = limits or ExposureLimits(record.pd_limit_w_m2, record.sar_limit_w_kg)
    return replace(record,
                   pd_limit_w_m2=limits.pd_w_m2,
                   sar_limit_w_kg=limits.sar_w_kg,
                   compliant_pd=bool(record.s_i <= limits.pd_w_m2),
                   compliant_sar=bool(record.sar <= limits.sar_w_kg))


def exposure_record(eirp_w, d, tissue, incidence_deg=0.0, limits=None):
    s_i = incident_power_density(eirp_w, d)
    rec = ExposureRecord(d=d, s_i=s_i, e_rms=field_strength_from_pd(s_i),
                         sar=sar_far_field(s_i, incidence_deg, tissue))
    return compliance(rec, limits or ExposureLimits())


def dbm_to_w(p_dbm):
    return 10.0 ** ((np.asarray(p_dbm, dtype=float) - 30.0) / 10.0)
