"""Zero-point mode-sum oracle for ideal mirrors in a constant medium.

Modes of a perfect-mirror cavity of width d filled with (eps, mu) are
built explicitly (standing waves with E_parallel = 0 on the walls), each
normalized to zero-point energy hbar*omega/2, and the time-averaged zz
stress is evaluated on a wall with either prescription:

* Minkowski: eps*eps0*E and B/(mu*mu0) weighting,
* Lorentz: vacuum weighting eps0*E and B/mu0 of the same fields.

The sum over discrete k_z = n*pi/d, damped by exp(-Lambda*d*K) with
K = n_medium*omega/c, minus the same integrand with continuous k_z (the
wall backed by unbounded medium), is extrapolated to Lambda -> 0. The
transverse integral uses Gauss-Laguerre nodes, exact here because every
per-mode stress times the regulator is polynomial-times-exponential in K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .closed_forms import StaticMedium, casimir_ideal, lorentz_factor, minkowski_factor
from .constants import C, HBAR
from .minkowski import Engine

EPS0 = 8.8541878128e-12
MU0 = 1.0 / (EPS0 * C**2)

# Trailing extrapolants must agree to this relative level.
UNSTABLE_SPREAD = 0.01
TAIL_FRACTION = 1e-9


class ExtrapolationUnstable(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleSpec:
    medium: StaticMedium
    d: float
    cutoff_scales: tuple = (0.4, 0.2, 0.1, 0.05)
    n_max: int | None = None
    k_grid: int = 8

    def __post_init__(self):
        object.__setattr__(self, "cutoff_scales", tuple(self.cutoff_scales))
        if len(self.cutoff_scales) < 3:
            raise ValueError("need at least 3 cutoff scales to extrapolate")
        if any(s <= 0 for s in self.cutoff_scales):
            raise ValueError("cutoff scales must be > 0")
        if not (self.d > 0):
            raise ValueError("d must be > 0")
        if self.k_grid < 3:
            raise ValueError("k_grid must be >= 3")

    def modes_needed(self, scale: float) -> int:
        # exp(-scale*pi*n) * n^3 below TAIL_FRACTION of the sum
        n = 1
        while math.exp(-scale * math.pi * n) * n**3 > TAIL_FRACTION * 1e-3:
            n *= 2
        return n


def _wall_stress(kz, K, medium: StaticMedium, which: Engine, d: float, n_zero: np.ndarray):
    """Time-averaged outward zz stress on the wall at z = 0, per mode, TE + TM."""
    eps, mu = medium.eps, medium.mu
    n_idx = math.sqrt(eps * mu)
    omega = C * K / n_idx
    k = np.sqrt(np.maximum(K * K - kz * kz, 0.0))
    lorentz = Engine(which) is Engine.LORENTZ
    w_e = 1.0 if lorentz else eps
    w_b = 1.0 if lorentz else 1.0 / mu
    # TE: E_y = E0 sin(kz z); energy eps*eps0*E0^2*d/4 = hbar*omega/2
    e0_sq = 2.0 * HBAR * omega / (eps * EPS0 * d)
    bx_wall_sq = e0_sq * (kz / omega) ** 2
    te = 0.5 * (w_b / MU0) * 0.5 * bx_wall_sq
    # TM: B_y = B0 cos(kz z); the uniform n = 0 mode carries half the wall
    # amplitude, which is exactly the half weight the sum-minus-integral needs
    b0_sq = np.where(n_zero, 1.0, 2.0) * HBAR * omega * mu * MU0 / d
    ez_wall_sq = b0_sq * (k * C**2 / (omega * n_idx**2)) ** 2
    tm = 0.5 * ((w_b / MU0) * 0.5 * b0_sq - w_e * EPS0 * 0.5 * ez_wall_sq)
    return te + tm


def _regulated_difference(spec: OracleSpec, which: Engine, scale: float) -> float:
    d = spec.d
    lam = scale * d
    u, w = np.polynomial.laguerre.laggauss(spec.k_grid)
    n_max = spec.n_max if spec.n_max is not None else spec.modes_needed(scale)
    if math.exp(-scale * math.pi * n_max) * max(n_max, 1) ** 3 > TAIL_FRACTION:
        raise ValueError(f"n_max = {n_max} leaves a regulated tail above {TAIL_FRACTION}")

    def transverse(kz, n_zero):
        # exp(lam kz) * int_{kz}^inf K dK/(2 pi) stress(K) exp(-lam K), K = kz + u/lam
        K = kz[:, None] + u[None, :] / lam
        s = _wall_stress(kz[:, None], K, spec.medium, which, d, n_zero[:, None])
        return ((K / (2.0 * math.pi) * s) @ w) / lam

    n = np.arange(n_max + 1)
    kz = n * math.pi / d
    terms = np.exp(-lam * kz) * transverse(kz, n == 0)
    discrete = math.fsum(terms)
    # continuous kz: the same factor exp(-lam kz) is the Laguerre weight in kz
    kz_c = u / lam
    cont_terms = (d / math.pi) * w / lam * transverse(kz_c, np.zeros_like(kz_c, dtype=bool))
    continuum = math.fsum(cont_terms)
    # outward pressure inside minus outside; attraction is its negative
    return continuum - discrete


def _neville_at_zero(xs, ys):
    p = list(ys)
    m = len(xs)
    for level in range(1, m):
        for i in range(m - level):
            x_lo, x_hi = xs[i], xs[i + level]
            p[i] = (x_lo * p[i + 1] - x_hi * p[i]) / (x_lo - x_hi)
    return p[0]


def oracle_force(spec: OracleSpec, which: Engine) -> float:
    """Regularized attraction per unit area (Pa) on an ideal mirror, cutoff removed."""
    scales = sorted(spec.cutoff_scales, reverse=True)
    values = [_regulated_difference(spec, which, s) for s in scales]
    # the regulated difference is even in the cutoff: extrapolate in Lambda^2
    x = [s * s for s in scales]
    extrapolants = [_neville_at_zero(x[:m], values[:m]) for m in range(2, len(x) + 1)]
    last, prev = extrapolants[-1], extrapolants[-2]
    if abs(last - prev) > UNSTABLE_SPREAD * abs(last):
        raise ExtrapolationUnstable(
            f"extrapolants {prev:.6e} and {last:.6e} differ by more than {UNSTABLE_SPREAD:.0%}")
    return last


@dataclass(frozen=True)
class FactorRow:
    eps: float
    mu: float
    measured_lorentz: float
    display_lorentz: float
    measured_minkowski: float
    display_minkowski: float


def factor_scan(media, template: OracleSpec) -> list[FactorRow]:
    """Measured oracle factors (force / ideal vacuum force) against the closed forms."""
    rows = []
    ideal = casimir_ideal(template.d)
    for m in media:
        spec = OracleSpec(m, template.d, template.cutoff_scales, template.n_max, template.k_grid)
        rows.append(FactorRow(
            m.eps, m.mu,
            oracle_force(spec, Engine.LORENTZ) / ideal, lorentz_factor(m),
            oracle_force(spec, Engine.MINKOWSKI) / ideal, minkowski_factor(m),
        ))
    return rows
