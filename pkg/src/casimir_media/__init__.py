"""Casimir forces on plates in magnetodielectric media.

Two stress prescriptions are implemented side by side: the Minkowski
(medium-weighted) stress behind the textbook Lifshitz formula in media, and
the stress that follows from the Lorentz force on the medium's internal
charges and currents.
"""

from .closed_forms import StaticMedium, lorentz_factor, minkowski_factor, plate_force_closed
from .geometry import CavitySetup, Gap, GapConfig, Layer, LayerStack, gap_of
from .lorentz import plate_force_L, stress_at_L, stress_profile
from .materials import (PERFECT_MIRROR, VACUUM, Constant, DrudeLorentz, OscillatorTerm,
                        PerfectMirror, Vacuum, drude, eps_at, mu_at)
from .minkowski import Engine, StressResult, gap_attraction_M, plate_force_M
from .quadrature import IntegralResult, Mapping, NonConvergence, QuadratureSpec, integrate2d

__version__ = "0.1.0"
