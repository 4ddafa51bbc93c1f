"""Closed-form plate forces in the ideal-mirror, static-medium limit."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import CASIMIR_PREFACTOR
from .minkowski import Engine


@dataclass(frozen=True)
class StaticMedium:
    eps: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if not (self.eps >= 1 and math.isfinite(self.eps)):
            raise ValueError(f"eps must be >= 1, got {self.eps!r}")
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ValueError(f"mu must be > 0, got {self.mu!r}")


def lorentz_factor(m: StaticMedium) -> float:
    return math.sqrt(m.mu / m.eps) * (2.0 / 3.0 + 1.0 / (3.0 * m.eps * m.mu))


def minkowski_factor(m: StaticMedium) -> float:
    return math.sqrt(m.mu / m.eps)


def casimir_ideal(d: float) -> float:
    """hbar c pi^2 / (240 d^4): vacuum attraction between ideal mirrors."""
    return CASIMIR_PREFACTOR / d**4


def plate_force_closed(m: StaticMedium, d1: float, d3: float, which: Engine) -> float:
    """Force per unit area on the plate, positive toward wall3; gaps may be inf."""
    if math.isinf(d1) and math.isinf(d3):
        raise ValueError("at least one gap must be finite")
    if not (d1 > 0 and d3 > 0):
        raise ValueError("gap widths must be > 0")
    factor = lorentz_factor(m) if Engine(which) is Engine.LORENTZ else minkowski_factor(m)
    inv4 = lambda d: 0.0 if math.isinf(d) else 1.0 / d**4
    return CASIMIR_PREFACTOR * factor * (inv4(d3) - inv4(d1))
