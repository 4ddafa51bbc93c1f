"""Physical constants (SI) shared by all engines."""

import math

HBAR = 1.054571817e-34  # J s
C = 2.99792458e8  # m / s

# Prefactor of the ideal-mirror vacuum pressure: F = CASIMIR_PREFACTOR / d**4.
CASIMIR_PREFACTOR = HBAR * C * math.pi**2 / 240.0
