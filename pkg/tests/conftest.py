import math

import numpy as np
import pytest

from casimir_media.constants import C
from casimir_media.geometry import CavitySetup, Layer, LayerStack
from casimir_media.materials import PERFECT_MIRROR, drude, static_index
from casimir_media.quadrature import QuadratureSpec
from casimir_media.scattering import TE, TM, fresnel


@pytest.fixture
def spec():
    return QuadratureSpec(rel_tol=1e-8)


@pytest.fixture
def mirror():
    return LayerStack.halfspace(PERFECT_MIRROR)


def ideal_cavity(medium, d1, d3, plate_thickness=100e-9):
    mirror = LayerStack.halfspace(PERFECT_MIRROR)
    return CavitySetup(mirror, d1, (Layer(plate_thickness, PERFECT_MIRROR),), d3, mirror, medium)


def dominant_channels(medium, d, n=12):
    """Log grid over the (xi, k) region that carries the gap integral."""
    s = np.geomspace(0.05, 20.0, n)
    xi = s * C / (2 * static_index(medium) * d)
    k = s / (2 * d)
    XI, K = np.meshgrid(xi, k)
    return XI.ravel(), K.ravel()


def near_mirror_drude(medium, d, threshold=0.999, damping=1e12):
    """Drude metal whose plasma frequency is raised by decades until |r| >= threshold."""
    xi, k = dominant_channels(medium, d)
    wp = 1e15
    while True:
        metal = drude(wp, damping)
        worst = min(np.min(np.abs(fresnel(medium, metal, xi, k, p))) for p in (TE, TM))
        if worst >= threshold:
            return metal, wp
        wp *= 10.0
        if wp > 1e22:
            raise RuntimeError("could not reach the requested reflectivity")


def drude_cavity(medium, d1, d3, threshold=0.999, plate_thickness=200e-9):
    metal, _ = near_mirror_drude(medium, d3 if math.isfinite(d3) else d1, threshold)
    wall = LayerStack.halfspace(metal)
    return CavitySetup(wall, d1, (Layer(plate_thickness, metal),), d3, wall, medium)


_ACCEPTANCE = {}


def report(criterion, ok, detail):
    """Record one acceptance line; printed in the terminal summary."""
    _ACCEPTANCE[criterion] = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[key])
