"""Linear, causal, isotropic material response on the imaginary frequency axis.

All models are evaluated at ``omega = i*xi`` with ``xi >= 0``, where causal
response functions are real. Evaluation accepts scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np


class UnsupportedModelError(ValueError):
    """Raised when a model cannot provide bulk response (perfect mirror)."""


@dataclass(frozen=True)
class OscillatorTerm:
    """One Drude-Lorentz pole: strength / (resonance**2 + xi**2 + damping*xi).

    plasma_strength is in rad^2/s^2, resonance and damping in rad/s. A zero
    resonance describes a conductor (Drude) term and needs damping > 0.
    """

    plasma_strength: float
    resonance: float = 0.0
    damping: float = 0.0

    def __post_init__(self):
        for name in ("plasma_strength", "resonance", "damping"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
        if self.resonance == 0 and self.damping <= 0:
            raise ValueError("a term with zero resonance needs damping > 0")


@dataclass(frozen=True)
class Vacuum:
    pass


@dataclass(frozen=True)
class Constant:
    """Frequency-independent medium with static permittivity and permeability."""

    eps_static: float
    mu_static: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.eps_static) or self.eps_static < 1:
            raise ValueError(f"eps_static must be >= 1, got {self.eps_static!r}")
        # mu < 1 (diamagnetic) is rejected: the closed forms presume passive statics
        if not np.isfinite(self.mu_static) or self.mu_static < 1:
            raise ValueError(f"mu_static must be >= 1, got {self.mu_static!r}")


@dataclass(frozen=True)
class DrudeLorentz:
    electric_terms: tuple[OscillatorTerm, ...] = ()
    magnetic_terms: tuple[OscillatorTerm, ...] = ()

    def __post_init__(self):
        # accept lists from callers but store tuples so the model stays hashable
        object.__setattr__(self, "electric_terms", tuple(self.electric_terms))
        object.__setattr__(self, "magnetic_terms", tuple(self.magnetic_terms))


@dataclass(frozen=True)
class PerfectMirror:
    """Reflector-only marker: r_TM = +1, r_TE = -1. Never fills a gap."""


MaterialModel = Union[Vacuum, Constant, DrudeLorentz, PerfectMirror]

VACUUM = Vacuum()
PERFECT_MIRROR = PerfectMirror()


def drude(plasma_frequency: float, damping: float) -> DrudeLorentz:
    """Drude conductor with plasma frequency and damping in rad/s."""
    return DrudeLorentz((OscillatorTerm(plasma_frequency**2, 0.0, damping),))


def _check_xi(xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0) or np.any(np.isnan(xi)):
        raise ValueError("imaginary frequency xi must be >= 0")
    return xi


def _oscillator_sum(terms: Sequence[OscillatorTerm], xi):
    out = np.ones_like(xi)
    for term in terms:
        out = out + term.plasma_strength / (term.resonance**2 + xi * xi + term.damping * xi)
    return out


def _response(model, xi, which):
    xi = _check_xi(xi)
    if isinstance(model, PerfectMirror):
        raise UnsupportedModelError("a perfect mirror has no bulk response")
    if isinstance(model, Vacuum):
        out = np.ones_like(xi)
    elif isinstance(model, Constant):
        out = np.full_like(xi, model.eps_static if which == "eps" else model.mu_static)
    elif isinstance(model, DrudeLorentz):
        terms = model.electric_terms if which == "eps" else model.magnetic_terms
        with np.errstate(divide="ignore"):
            out = _oscillator_sum(terms, xi)
    else:
        raise TypeError(f"not a material model: {model!r}")
    return out[()] if out.ndim == 0 else out


def eps_at(model: MaterialModel, xi):
    """Relative permittivity eps(i*xi)."""
    return _response(model, xi, "eps")


def mu_at(model: MaterialModel, xi):
    """Relative permeability mu(i*xi)."""
    return _response(model, xi, "mu")


def static_values(model: MaterialModel) -> tuple[float, float]:
    """(eps, mu) at xi = 0; conductors give inf."""
    return float(eps_at(model, 0.0)), float(mu_at(model, 0.0))


def static_index(model: MaterialModel) -> float:
    """Static refractive index sqrt(eps*mu), falling back to 1 for conductors."""
    eps, mu = static_values(model)
    n = float(np.sqrt(eps * mu))
    return n if np.isfinite(n) else 1.0
