"""Physical constants (SI, CODATA exact or recommended values)."""
from dataclasses import dataclass

from .kernels import SPEED_OF_LIGHT


@dataclass(frozen=True)
class PhysicalConstants:
    eta_free_space: float = 376.730313412   # ohm, mu0*c
    speed_of_light: float = SPEED_OF_LIGHT  # m/s
    boltzmann: float = 1.380649e-23         # J/K


CONSTANTS = PhysicalConstants()
