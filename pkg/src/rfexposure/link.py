"""Received power, thermal noise, SNR and Shannon rate for the downlink."""
from dataclasses import dataclass, field
import math

import numpy as np

from .antenna import ArrayConfig, ElementPattern, eirp_dbm
from .constants import CONSTANTS
from .geometry import SectorRegion, azimuth_offset, sample_sector_xy
from .kernels import BACKEND
from .propagation import Environment, ModelSet, default_models

STEERING_MODES = ("ideal", "fixed")


@dataclass(frozen=True)
class NoiseModel:
    bandwidth_hz: float
    noise_figure_db: float = 7.0
    temperature_k: float = 290.0
    boltzmann: float = CONSTANTS.boltzmann

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth_hz must be > 0")
        if not self.temperature_k > 0:
            raise ValueError("temperature_k must be > 0")


@dataclass(frozen=True)
class LinkSample:
    ue_position: object
    serving_site: int
    d3d: float
    path_loss_db: float
    eirp_dbm: float
    rx_gain_dbi: float
    p_r_dbm: float
    snr_db: float
    rate_bps: float


def received_power_dbm(eirp_dbm, rx_gain_dbi, path_loss_db):
    return eirp_dbm + rx_gain_dbi - path_loss_db


def noise_power_dbm(noise):
    """Thermal noise ``k T B`` in dBm plus the receiver noise figure."""
    ktb_w = noise.boltzmann * noise.temperature_k * noise.bandwidth_hz
    return 10.0 * math.log10(ktb_w * 1000.0) + noise.noise_figure_db


def shannon_rate_bps(bandwidth_hz, snr_linear):
    snr = np.asarray(snr_linear, dtype=float)
    if np.any(snr < 0):
        raise ValueError("SNR must be >= 0 (linear)")
    out = bandwidth_hz * np.log2(1.0 + snr)
    return float(out) if out.ndim == 0 else out


def interference_dbm(*_args, **_kwargs):
    """Interference is not modelled; the hook returns no contribution."""
    return -math.inf


@dataclass(frozen=True)
class LinkModel:
    """Everything needed to evaluate one AP-to-UE downlink.

    ``steering="ideal"`` points the panel at the UE so the element pattern is
    read at its peak; ``"fixed"`` reads it at the geometric azimuth offset
    from the sector boresight and the zenith angle.
    """
    environment: Environment
    pattern: ElementPattern
    array: ArrayConfig
    noise: NoiseModel
    ap_height: float
    ue_height: float = 1.5
    ue_gain_dbi: float = 0.0
    steering: str = "ideal"
    models: ModelSet = field(default=None, compare=False)

    def __post_init__(self):
        if self.steering not in STEERING_MODES:
            raise ValueError(f"steering must be one of {STEERING_MODES}")

    @property
    def profile(self):
        return (self.models or default_models()).for_environment(self.environment)

    def pattern_angles(self, dx, dy, boresight):
        """Azimuth offset and zenith angle of UEs at plan offsets ``(dx, dy)``."""
        d2d = np.hypot(dx, dy)
        if self.steering == "ideal":
            return np.zeros_like(d2d), np.full_like(d2d, 90.0)
        phi = azimuth_offset(np.degrees(np.arctan2(dy, dx)), boresight)
        theta = 90.0 + np.degrees(np.arctan2(self.ap_height - self.ue_height, d2d))
        return phi, theta

    def eirp_towards(self, dx, dy, boresight=0.0):
        phi, theta = self.pattern_angles(np.asarray(dx, float), np.asarray(dy, float), boresight)
        return eirp_dbm(self.array, self.pattern, phi, theta)

    def path_loss(self, d2d, backend=None):
        """Expected path loss on plan distances; returns ``(pl, d3d, clamped)``."""
        d2d = np.asarray(d2d, dtype=float)
        d3d = np.hypot(d2d, self.ap_height - self.ue_height)
        pl, clamped = self.profile.expected(d2d, d3d, self.environment.carrier_ghz,
                                            self.ap_height, self.ue_height, backend=backend)
        return pl, d3d, clamped

    def received_power(self, dx, dy, boresight=0.0, backend=None):
        dx = np.asarray(dx, dtype=float)
        dy = np.asarray(dy, dtype=float)
        pl, _, _ = self.path_loss(np.hypot(dx, dy), backend=backend)
        return received_power_dbm(self.eirp_towards(dx, dy, boresight), self.ue_gain_dbi, pl)

    def snr_db(self, p_r_dbm):
        return np.asarray(p_r_dbm) - noise_power_dbm(self.noise)

    def rate_bps(self, snr_db):
        return shannon_rate_bps(self.noise.bandwidth_hz, 10.0 ** (np.asarray(snr_db) / 10.0))


def polar_grid(sector, resolution=(64, 64)):
    """Equal-area polar grid (cell centres) over the sector wedge.

    Returns plan offsets ``(dx, dy)`` relative to the site.
    """
    n_r, n_a = resolution
    if n_r * n_a < 100:
        raise ValueError("resolution must yield at least 100 sample points")
    if not (sector.max_radius > 0 and math.isfinite(sector.max_radius)
            and sector.angular_width > 0):
        raise ValueError("empty or unbounded sector region")
    r = sector.max_radius * np.sqrt((np.arange(n_r) + 0.5) / n_r)
    az = sector.start_azimuth + sector.angular_width * (np.arange(n_a) + 0.5) / n_a
    rr, aa = np.meshgrid(r, np.radians(az), indexing="ij")
    return (rr * np.cos(aa)).ravel(), (rr * np.sin(aa)).ravel()


def sector_average_received_power(sector: SectorRegion, link: LinkModel, resolution=(64, 64),
                                  backend=None):
    """Area average of the linear received power over the sector, in dBm."""
    kern = backend or BACKEND
    dx, dy = polar_grid(sector, resolution)
    p_r = link.received_power(dx, dy, sector.boresight_azimuth, backend=kern)
    return float(kern.mean_linear_db(np.ascontiguousarray(p_r, dtype=float)))


def sector_average_monte_carlo(sector, link, n=100_000, seed=0):
    """Monte Carlo estimate of :func:`sector_average_received_power`."""
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    xy = sample_sector_xy(sector, n, rng)
    dx = xy[:, 0] - sector.site_position.x
    dy = xy[:, 1] - sector.site_position.y
    p_r = link.received_power(dx, dy, sector.boresight_azimuth)
    return float(10.0 * np.log10(np.mean(10.0 ** (p_r / 10.0))))
