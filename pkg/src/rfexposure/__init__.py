"""Downlink RF exposure and link-budget simulation for cellular layouts."""
from .kernels import BACKEND
from .scenario import compare_systems, load_config, preset_names, run_sweep

__version__ = "0.1.0"

__all__ = ["BACKEND", "compare_systems", "load_config", "preset_names", "run_sweep"]
