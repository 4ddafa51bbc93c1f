"""TE/TM reflection coefficients of planar stacks at imaginary frequency.

Conventions: the scalar field is E_y for TE and H_y for TM. A wave decaying
into the stack is reflected with amplitude r; a perfect mirror gives
r_TM = +1 and r_TE = -1. Everything is vectorized over (xi, k).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import C
from .geometry import LayerStack
from .materials import MaterialModel, PerfectMirror, UnsupportedModelError, eps_at, mu_at


class Polarization(Enum):
    TE = "TE"
    TM = "TM"


TE = Polarization.TE
TM = Polarization.TM
POLARIZATIONS = (TE, TM)


@dataclass(frozen=True)
class TransverseChannel:
    """An (xi, k) sample: imaginary angular frequency and transverse wavenumber."""

    xi: float
    k: float

    def __post_init__(self):
        _check_channel(self.xi, self.k)


def _check_channel(xi, k):
    xi = np.asarray(xi, dtype=float)
    k = np.asarray(k, dtype=float)
    if np.any(xi < 0) or np.any(k < 0):
        raise ValueError("xi and k must be >= 0")
    if np.any((xi == 0) & (k == 0)):
        raise ValueError("the corner xi = k = 0 is not a valid channel")
    return xi, k


def kappa(material: MaterialModel, xi, k):
    """Decay constant sqrt(eps*mu*xi**2/c**2 + k**2) of the channel in ``material``."""
    if isinstance(material, PerfectMirror):
        raise UnsupportedModelError("kappa is undefined inside a perfect mirror")
    xi = np.asarray(xi, dtype=float)
    k = np.asarray(k, dtype=float)
    return _kappa(eps_at(material, xi), mu_at(material, xi), xi, k)


def _kappa(eps, mu, xi, k):
    q = xi / C
    with np.errstate(invalid="ignore"):
        # a conductor at xi = 0 has eps = inf; the product tends to 0, not nan
        emq = np.where(q == 0, 0.0, eps * mu * q * q)
    return np.sqrt(emq + k * k)


class _Optics:
    """Per-call cache of eps, mu and kappa so each material is evaluated once."""

    def __init__(self, xi, k):
        self.xi, self.k = _check_channel(xi, k)
        self._cache = {}

    def __call__(self, material):
        try:
            return self._cache[material]
        except KeyError:
            eps = eps_at(material, self.xi)
            mu = mu_at(material, self.xi)
            kap = _kappa(eps, mu, self.xi, self.k)
            self._cache[material] = (eps, mu, kap)
            return eps, mu, kap


def _split(optics, frm, to, pol):
    """Interface weights (a, b) with r = a - b, 1 + r = 2a and 1 - r = 2b."""
    eps_f, mu_f, kap_f = optics(frm)
    if to == frm:
        half = np.full_like(kap_f, 0.5)
        return half, half.copy()
    if isinstance(to, PerfectMirror):
        one, zero = np.ones_like(kap_f), np.zeros_like(kap_f)
        return (one, zero) if pol is TM else (zero, one)
    eps_t, mu_t, kap_t = optics(to)
    w_f, w_t = (eps_f, eps_t) if pol is TM else (mu_f, mu_t)
    big_a = w_t * kap_f
    big_b = w_f * kap_t
    with np.errstate(invalid="ignore"):
        a = big_a / (big_a + big_b)
        b = big_b / (big_a + big_b)
    # conductors have eps = inf at xi = 0; the limit of r is then +1 (TM)
    bad = np.isnan(a) | np.isnan(b)
    if np.any(bad):
        a = np.where(bad, np.where(np.isinf(w_t), 1.0, 0.0), a)
        b = np.where(bad, 1.0 - a, b)
    return np.broadcast_to(a, kap_f.shape).astype(float), np.broadcast_to(b, kap_f.shape).astype(float)


def _interface(optics, frm, to, pol):
    a, b = _split(optics, frm, to, pol)
    return a - b


def fresnel(frm: MaterialModel, to: MaterialModel, xi, k, pol: Polarization):
    """Single-interface coefficient for a wave in ``frm`` hitting half-space ``to``."""
    if isinstance(frm, PerfectMirror):
        raise UnsupportedModelError("cannot illuminate from inside a perfect mirror")
    return _interface(_Optics(xi, k), frm, to, pol)


def _compose(optics, gap_medium, stack, pol):
    # carry (1 + r, 1 - r) alongside r so that near-unit reflections keep their digits
    materials = [gap_medium] + [layer.material for layer in stack.layers]
    a, b = _split(optics, materials[-1], stack.termination, pol)
    r, p, m = a - b, 2.0 * a, 2.0 * b
    for j in range(len(stack.layers) - 1, -1, -1):
        layer = stack.layers[j]
        fa, fb = _split(optics, materials[j], layer.material, pol)
        # exp underflows to 0 for thick layers, which is the right limit
        em1 = np.expm1(-2.0 * optics(layer.material)[2] * layer.thickness)
        p_b = p + r * em1
        m_b = m - r * em1
        num_p = fa * p_b
        num_m = fb * m_b
        den = num_p + num_m
        r = (num_p - num_m) / den
        p = 2.0 * num_p / den
        m = 2.0 * num_m / den
    return r


def _slab(optics, medium, layers, pol):
    """(r_front, r_back, t*t') of ``layers`` with ``medium`` on both sides.

    Built interface by interface with the star product, so every piece that
    depends on the far side carries its own decay factor.
    """
    kap = optics(medium)[2]
    r = np.zeros_like(kap)
    tt = np.ones_like(kap)
    # the back reflection is carried as (r', 1 + r', 1 - r') like in _compose
    rb, pb, mb = np.zeros_like(kap), np.ones_like(kap), np.ones_like(kap)
    em1 = np.zeros_like(kap)
    prev = medium
    for mat, thickness in [(l.material, l.thickness) for l in layers] + [(medium, 0.0)]:
        a, b = _split(optics, prev, mat, pol)
        pb_p = pb + rb * em1
        mb_p = mb - rb * em1
        d = pb_p * b + mb_p * a  # 1 - r' r_i after propagation
        r = r + tt * (a - b) * (1.0 + em1) / d
        tt = tt * 4.0 * a * b * (1.0 + em1) / (d * d)
        pb, mb = 2.0 * b * pb_p / d, 2.0 * a * mb_p / d
        rb = 0.5 * (pb - mb)
        em1 = np.expm1(-2.0 * optics(mat)[2] * thickness)
        prev = mat
    return r, rb, tt


def stack_reflection(gap_medium: MaterialModel, stack: LayerStack, xi, k, pol: Polarization):
    """Reflection coefficient of ``stack`` seen from ``gap_medium`` (Airy recursion)."""
    if isinstance(gap_medium, PerfectMirror):
        raise UnsupportedModelError("a perfect mirror cannot be the incidence medium")
    return _compose(_Optics(xi, k), gap_medium, stack, pol)


def stack_reflections(gap_medium, stack, xi, k):
    """(r_TE, r_TM) sharing one material evaluation."""
    optics = _Optics(xi, k)
    return _compose(optics, gap_medium, stack, TE), _compose(optics, gap_medium, stack, TM)


def transfer_matrix_reflection(gap_medium: MaterialModel, stack: LayerStack, xi: float, k: float,
                               pol: Polarization) -> float:
    """Reference coefficient from 2x2 transfer matrices of (psi, psi'/w).

    Independent of the recursion: psi and psi'/w (w = mu for TE, eps for TM)
    are propagated through each layer with cosh/sinh matrices and the
    termination condition is solved for r. Meant for cross-checks on a few
    thin-to-moderate layers, where the growing exponentials stay harmless.
    """
    xi = float(xi)
    k = float(k)
    optics = _Optics(xi, k)

    def wk(material):
        eps, mu, kap = optics(material)
        return float(eps if pol is TM else mu), float(kap)

    w0, k0 = wk(gap_medium)
    # psi(0) = 1 + r, phi(0) = -(k0/w0)(1 - r); write state = a + r*b
    a = np.array([1.0, -k0 / w0])
    b = np.array([1.0, k0 / w0])
    for layer in stack.layers:
        w, kap = wk(layer.material)
        x = kap * layer.thickness
        m = np.array([[np.cosh(x), w * np.sinh(x) / kap],
                      [kap * np.sinh(x) / w, np.cosh(x)]])
        a = m @ a
        b = m @ b
    term = stack.termination
    if isinstance(term, PerfectMirror):
        # TE: E_y = 0 on the conductor; TM: dH_y/dz = 0
        row = np.array([1.0, 0.0]) if pol is TE else np.array([0.0, 1.0])
    else:
        wn, kn = wk(term)
        # only the decaying wave exists beyond: phi = -(kn/wn) psi
        row = np.array([kn / wn, 1.0])
    return float(-(row @ a) / (row @ b))
