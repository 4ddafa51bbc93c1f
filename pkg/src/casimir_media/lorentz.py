"""Casimir stress from the Lorentz force on the medium's internal sources.

Inside a gap the scattering part of the field correlators is written per
polarization through two factors,

    g = r_L r_R e^{-2 kappa d} / N                     (both walls)
    h = [r_L e^{-2 kappa z} + r_R e^{-2 kappa (d-z)}] / N   (one wall)

with N = 1 - r_L r_R e^{-2 kappa d}. The Minkowski stress weights the
electric and magnetic contributions with the medium response and the h
terms cancel; the Lorentz stress is the vacuum-form stress of the same
fields, i.e. the electric part is reweighted by 1/eps and the magnetic part
by mu. Whenever eps*mu != 1 the h terms survive and the stress varies
across the gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import CavitySetup, Gap, GapConfig, gap_of
from .minkowski import PREFACTOR, Engine, StressResult, gap_channel
from .quadrature import QuadratureSpec, integrate2d
from .scattering import TE, TM, _compose, _Optics, _slab


class Face(Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass
class CorrelatorSplit:
    """Electric and magnetic parts of the zz stress integrand (summed over TE/TM).

    Both include the k measure but not the hbar/(2 pi^2) prefactor, so
    ``t_electric + t_magnetic`` is the Lifshitz integrand of the gap.
    """

    t_electric: np.ndarray
    t_magnetic: np.ndarray


@dataclass
class StressProfile:
    positions: list
    values: list
    errors: list
    gap: Gap | None = None


def _check_z(gap, z):
    if not (0 < z < gap.width):
        raise ValueError(f"z = {z!r} is outside the open gap (0, {gap.width!r})")


def _one_wall_inside(ch, gap, z):
    e_l = np.exp(-2.0 * ch.kappa * z)
    e_r = np.exp(-2.0 * ch.kappa * (gap.width - z))
    return {p: (ch.r_left[p] * e_l + ch.r_right[p] * e_r) * ch.inv_n[p] for p in (TE, TM)}


def _plate_side(cavity: CavitySetup, which: Gap):
    """(plate layers as seen from the gap, far gap width, far wall, opaque)."""
    if which is Gap.GAP3:
        layers, far_width, far_wall = tuple(reversed(cavity.plate)), cavity.d1, cavity.wall1
    else:
        layers, far_width, far_wall = tuple(cavity.plate), cavity.d3, cavity.wall3
    for i, layer in enumerate(layers):
        if layer.is_mirror:
            return layers[:i], far_width, far_wall, True
    return layers, far_width, far_wall, False


def _face_excess(cavity, which, xi, k):
    """Plate reflection minus that of the same plate alone in the medium.

    Written as t t' R e / (1 - r' R e) through the far gap, so it decays
    with the plate transmission instead of being a difference of two
    near-unit numbers.
    """
    layers, far_width, far_wall, opaque = _plate_side(cavity, which)
    zero = np.zeros(np.broadcast(xi, k).shape)
    if opaque or math.isinf(far_width):
        return {p: zero for p in (TE, TM)}
    optics = _Optics(xi, k)
    kap = optics(cavity.medium)[2]
    em1 = np.expm1(-2.0 * kap * far_width)
    out = {}
    for p in (TE, TM):
        _, r_back, tt = _slab(optics, cavity.medium, layers, p)
        r_wall = _compose(optics, cavity.medium, far_wall, p)
        x = r_back * r_wall
        out[p] = tt * r_wall * (1.0 + em1) / ((1.0 - x) - x * em1)
    return out


def _one_wall_face(ch, excess, face):
    # the plate's own reflection is dropped: an isolated plate pushes on
    # both of its faces alike, and that self-stress diverges at the surface
    near = ch.r_left if face is Face.LEFT else ch.r_right
    far = ch.r_right if face is Face.LEFT else ch.r_left
    return {p: excess[p] + near[p] * ch.g[p] + far[p] * ch.damp * ch.inv_n[p] for p in (TE, TM)}


def correlators(gap: GapConfig, xi, k, z: float) -> dict:
    """Imaginary-axis field correlators at offset z, per polarization and component.

    Returns ``{(pol, name): (bulk, scattered)}`` for name in E_par, E_norm,
    B_par, B_norm, normalized so that the zz stress integrand is
    ``k/2 * sum(w * scattered)`` with w = 1 (Minkowski) or 1/eps, mu (Lorentz).
    """
    _check_z(gap, z)
    xi = np.asarray(xi, dtype=float)
    k = np.asarray(k, dtype=float)
    ch = gap_channel(gap, xi, k)
    h = _one_wall_inside(ch, gap, z)
    return _correlator_table(ch, h, k)


def _correlator_table(ch, h, k):
    kap = ch.kappa
    q2 = kap * kap - k * k  # eps mu xi^2 / c^2
    zero = np.zeros_like(kap)
    bulk_g = 1.0 / (2.0 * kap)
    bulk_d = 0.5 * kap
    out = {}
    for p in (TE, TM):
        g_sc = (2.0 * ch.g[p] + h[p]) / (2.0 * kap)
        d_sc = 0.5 * kap * (2.0 * ch.g[p] - h[p])
        # TE carries E_y (parallel); TM carries H_y, the dual assignment
        swing = {"par_q": (q2 * bulk_g, q2 * g_sc), "par_d": (bulk_d, d_sc),
                 "norm": (k * k * bulk_g, k * k * g_sc)}
        if p is TE:
            out[p, "E_par"] = swing["par_q"]
            out[p, "E_norm"] = (zero, zero)
            out[p, "B_par"] = swing["par_d"]
            out[p, "B_norm"] = swing["norm"]
        else:
            out[p, "B_par"] = swing["par_q"]
            out[p, "B_norm"] = (zero, zero)
            out[p, "E_par"] = swing["par_d"]
            out[p, "E_norm"] = swing["norm"]
    return out


def _split(table, k):
    t_e = 0.0
    t_b = 0.0
    for p in (TE, TM):
        t_e = t_e + table[p, "E_par"][1] + table[p, "E_norm"][1]
        t_b = t_b + table[p, "B_par"][1] + table[p, "B_norm"][1]
    return CorrelatorSplit(0.5 * k * t_e, 0.5 * k * t_b)


def correlator_split(gap: GapConfig, xi, k, z: float) -> CorrelatorSplit:
    """Electric/magnetic split of the scattering stress integrand at offset z."""
    xi = np.asarray(xi, dtype=float)
    k = np.asarray(k, dtype=float)
    return _split(correlators(gap, xi, k, z), k)


def _face_of(which: Gap) -> Face:
    return Face.LEFT if which is Gap.GAP3 else Face.RIGHT


def face_split(cavity: CavitySetup, which: Gap, xi, k) -> CorrelatorSplit:
    """Split on the plate face bounding gap ``which``, plate self-stress removed."""
    xi = np.asarray(xi, dtype=float)
    k = np.asarray(k, dtype=float)
    gap = gap_of(cavity, which)
    ch = gap_channel(gap, xi, k)
    h = _one_wall_face(ch, _face_excess(cavity, which, xi, k), _face_of(which))
    return _split(_correlator_table(ch, h, k), k)


def _stress_kernel(gap, split_fn):
    def kernel(xi, k):
        xi = np.asarray(xi, dtype=float)
        k = np.asarray(k, dtype=float)
        ch = gap_channel(gap, xi, k)
        s = _split(_correlator_table(ch, split_fn(ch, xi, k), k), k)
        return s.t_electric / ch.eps + ch.mu * s.t_magnetic
    return kernel


def stress_at_L(gap: GapConfig, z: float, spec: QuadratureSpec = QuadratureSpec()) -> StressResult:
    """Lorentz zz stress at offset z inside the gap (positive = attraction)."""
    _check_z(gap, z)
    kernel = _stress_kernel(gap, lambda ch, xi, k: _one_wall_inside(ch, gap, z))
    res = integrate2d(kernel, gap.width, gap.medium, spec)
    return StressResult(PREFACTOR * res.value, PREFACTOR * res.err_estimate, Engine.LORENTZ,
                        position=z)


def face_stress_L(cavity: CavitySetup, which: Gap,
                  spec: QuadratureSpec = QuadratureSpec()) -> StressResult:
    """Lorentz stress on the plate face bounding gap ``which`` (positive = pulled into the gap).

    The plate's own self-stress, equal on both faces, is subtracted. An
    infinite gap uses the plate thickness as quadrature scale.
    """
    gap = gap_of(cavity, which)
    face = _face_of(which)
    width = gap.width if math.isfinite(gap.width) else cavity.plate_thickness
    kernel = _stress_kernel(
        gap, lambda ch, xi, k: _one_wall_face(ch, _face_excess(cavity, which, xi, k), face))
    res = integrate2d(kernel, width, gap.medium, spec)
    pos = 0.0 if face is Face.LEFT else gap.width
    return StressResult(PREFACTOR * res.value, PREFACTOR * res.err_estimate, Engine.LORENTZ,
                        position=pos)


def plate_force_L(cavity: CavitySetup, spec: QuadratureSpec = QuadratureSpec()) -> StressResult:
    """Net Lorentz force per unit area on the plate, positive toward wall3.

    Stress on the gap-3 face pulls toward wall3, stress on the gap-1 face
    toward wall1.
    """
    t3 = face_stress_L(cavity, Gap.GAP3, spec)
    t1 = face_stress_L(cavity, Gap.GAP1, spec)
    return StressResult(t3.value - t1.value, t3.err_estimate + t1.err_estimate, Engine.LORENTZ)


def stress_profile(gap: GapConfig, n_points: int, spec: QuadratureSpec = QuadratureSpec(),
                   which: Gap | None = None) -> StressProfile:
    """Lorentz stress on the open uniform grid z_i = d*i/(n+1), i = 1..n."""
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    if math.isinf(gap.width):
        raise ValueError("a profile needs a finite gap")
    zs = [gap.width * (i + 1) / (n_points + 1) for i in range(n_points)]
    results = [stress_at_L(gap, z, spec) for z in zs]
    return StressProfile(zs, [r.value for r in results], [r.err_estimate for r in results], which)
