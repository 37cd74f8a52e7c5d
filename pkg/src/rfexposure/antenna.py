"""Element attenuation patterns and phased-array gain/EIRP.

Angles are in degrees: ``phi`` is the azimuth offset from the panel
boresight, ``theta`` the zenith angle (90 deg is the horizon).  All
functions broadcast over numpy arrays.
"""
from dataclasses import dataclass
import math

import numpy as np


@dataclass(frozen=True)
class ElementPattern:
    phi_3db: float
    theta_3db: float
    a_m: float
    g_max: float

    def __post_init__(self):
        if not (self.phi_3db > 0 and self.theta_3db > 0):
            raise ValueError("3 dB beamwidths must be > 0")
        if not self.a_m > 0:
            raise ValueError("front-to-back ratio a_m must be > 0")


@dataclass(frozen=True)
class ArrayConfig:
    rows: int = 1
    cols: int = 1
    element_power_dbm: float = 0.0
    element_gain_dbi: float = 0.0
    spacing: float = 0.5  # wavelengths

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be >= 1")
        if not self.spacing > 0:
            raise ValueError("element spacing must be > 0")

    @property
    def n_elements(self):
        return self.rows * self.cols

    @classmethod
    def from_panel(cls, rows, cols, total_power_dbm, panel_gain_dbi, spacing=0.5):
        """Array whose transmit power and boresight gain are quoted for the
        whole panel; per-element values are backed out of the totals."""
        n_db = 10.0 * math.log10(rows * cols)
        return cls(rows, cols, total_power_dbm - n_db, panel_gain_dbi - n_db, spacing)

    def aperture_m(self, carrier_ghz):
        """Largest linear dimension (panel diagonal) of the aperture."""
        wavelength = 299792458.0 / (carrier_ghz * 1e9)
        return self.spacing * wavelength * math.hypot(self.rows, self.cols)


def azimuth_attenuation(pattern, phi):
    return np.minimum(12.0 * (np.asarray(phi, dtype=float) / pattern.phi_3db) ** 2, pattern.a_m)


def elevation_attenuation(pattern, theta):
    offset = np.asarray(theta, dtype=float) - 90.0
    return np.minimum(12.0 * (offset / pattern.theta_3db) ** 2, pattern.a_m)


def combined_attenuation(pattern, phi, theta):
    return np.minimum(azimuth_attenuation(pattern, phi) + elevation_attenuation(pattern, theta),
                      pattern.a_m)


def element_gain(pattern, phi, theta):
    return pattern.g_max - combined_attenuation(pattern, phi, theta)


def array_gain(array, pattern, phi, theta):
    """Element gain plus the coherent factor ``10*log10(N)``, beam steered at the
    evaluated direction."""
    return element_gain(pattern, phi, theta) + 10.0 * math.log10(array.n_elements)


def eirp_dbm(array, pattern, phi, theta):
    return array.element_power_dbm + 10.0 * math.log10(array.n_elements) + array_gain(
        array, pattern, phi, theta)


def fraunhofer_distance(array, carrier_ghz):
    """Far-field boundary ``2 D^2 / lambda`` for the array aperture."""
    wavelength = 299792458.0 / (carrier_ghz * 1e9)
    return 2.0 * array.aperture_m(carrier_ghz) ** 2 / wavelength
