"""
Shared utility helpers.
"""

import math

import numpy as np
import numpy.typing as npt

from app.schemas.experiment_schema import StateDump


def spawn_generators(seed: int, n: int) -> list[np.random.Generator]:
    """
    ``n`` independent PCG64 streams derived from one seed.

    Cell ``i`` always gets the same stream, whatever the number of workers.
    """
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(n)]


def angle_grid(step_deg: float, stop_deg: float = 90.0) -> list[float]:
    """step, 2·step, ... up to and including ``stop_deg``."""
    count = int(math.floor(stop_deg / step_deg + 1e-9))
    return [round(step_deg * k, 10) for k in range(1, count + 1)]


def format_float(value: float | int) -> str:
    """Stable CSV representation: integers as-is, floats with 12 significant digits."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if math.isnan(value):
        return "nan"
    return format(value, ".12g")


def state_dump(label: str, role: str, rho: npt.ArrayLike) -> StateDump:
    m = np.asarray(rho, dtype=np.complex128)
    return StateDump(label=label, role=role, real=m.real.tolist(), imag=m.imag.tolist())
