"""Lifshitz attraction across medium-filled gaps from the Minkowski stress.

This is the comparison baseline: the medium-weighted stress gives a
position-independent gap pressure, and the force on the plate is the
difference of the two gap pressures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .constants import HBAR
from .geometry import CavitySetup, Gap, GapConfig, gap_of
from .quadrature import QuadratureSpec, integrate2d
from .scattering import _Optics, _compose, TE, TM

PREFACTOR = HBAR / (2.0 * math.pi**2)


class Engine(Enum):
    MINKOWSKI = "minkowski"
    LORENTZ = "lorentz"


@dataclass(frozen=True)
class StressResult:
    """Signed stress or force per unit area in Pa.

    For plate forces, positive points toward wall3. For gap pressures,
    positive means the two reflectors attract.
    """

    value: float
    err_estimate: float
    engine: Engine
    position: Optional[float] = None


@dataclass
class GapChannel:
    """Per-polarization reflection data of a gap at a batch of (xi, k)."""

    kappa: np.ndarray
    r_left: dict
    r_right: dict
    g: dict  # x/(1-x), x = r_L r_R exp(-2 kappa d)
    inv_n: dict  # 1/(1-x)
    damp: np.ndarray  # exp(-2 kappa d)
    eps: np.ndarray
    mu: np.ndarray


def gap_channel(gap: GapConfig, xi, k) -> GapChannel:
    optics = _Optics(xi, k)
    eps, mu, kap = optics(gap.medium)
    r_left, r_right, g, inv_n = {}, {}, {}, {}
    finite = math.isfinite(gap.width)
    if finite:
        arg = -2.0 * kap * gap.width
        damp = np.exp(arg)
        em1 = np.expm1(arg)
    else:
        damp = np.zeros_like(kap)
        em1 = np.full_like(kap, -1.0)
    for pol in (TE, TM):
        rl = _compose(optics, gap.medium, gap.left, pol)
        rr = _compose(optics, gap.medium, gap.right, pol)
        prod = rl * rr
        # 1 - prod*exp(-2 kappa d) without cancellation when prod -> 1, kappa -> 0
        n = (1.0 - prod) - prod * em1
        r_left[pol] = rl
        r_right[pol] = rr
        inv_n[pol] = 1.0 / n
        g[pol] = prod * damp / n
    return GapChannel(kap, r_left, r_right, g, inv_n, damp, eps, mu)


def lifshitz_kernel(gap: GapConfig):
    """Integrand of the gap pressure (without hbar/2pi^2) as a function of (xi, k)."""
    def kernel(xi, k):
        ch = gap_channel(gap, xi, k)
        return k * ch.kappa * (ch.g[TE] + ch.g[TM])
    return kernel


def gap_attraction_M(gap: GapConfig, spec: QuadratureSpec = QuadratureSpec()) -> StressResult:
    """Attraction per unit area between the two reflectors of ``gap``."""
    if math.isinf(gap.width):
        return StressResult(0.0, 0.0, Engine.MINKOWSKI)
    res = integrate2d(lifshitz_kernel(gap), gap.width, gap.medium, spec)
    return StressResult(PREFACTOR * res.value, PREFACTOR * res.err_estimate, Engine.MINKOWSKI)


def plate_force_M(cavity: CavitySetup, spec: QuadratureSpec = QuadratureSpec()) -> StressResult:
    """Net force per unit area on the plate, positive toward wall3."""
    s3 = gap_attraction_M(gap_of(cavity, Gap.GAP3), spec)
    s1 = gap_attraction_M(gap_of(cavity, Gap.GAP1), spec)
    return StressResult(s3.value - s1.value, s3.err_estimate + s1.err_estimate,
                        Engine.MINKOWSKI)
