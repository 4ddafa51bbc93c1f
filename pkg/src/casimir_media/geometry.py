"""Planar layer stacks and the plate-in-cavity configuration.

The z axis runs from ``wall1`` to ``wall3``. Gap widths may be ``math.inf``,
which stands for "no far wall": the medium then extends to infinity on that
side and the gap contributes nothing of its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .materials import MaterialModel, PerfectMirror

INFINITE = math.inf


class Gap(Enum):
    GAP1 = "gap1"
    GAP3 = "gap3"


def _check_width(name, value):
    if not (value > 0):
        raise ValueError(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class Layer:
    thickness: float
    material: MaterialModel

    def __post_init__(self):
        if not (0 < self.thickness < math.inf):
            raise ValueError(f"layer thickness must be finite and > 0, got {self.thickness!r}")

    @property
    def is_mirror(self) -> bool:
        return isinstance(self.material, PerfectMirror)


@dataclass(frozen=True)
class LayerStack:
    """Layers ordered nearest-to-gap first, backed by a semi-infinite termination."""

    layers: tuple[Layer, ...]
    termination: MaterialModel

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if any(layer.is_mirror for layer in self.layers):
            raise ValueError("a perfect mirror can only terminate a stack")

    @classmethod
    def halfspace(cls, material: MaterialModel) -> "LayerStack":
        return cls((), material)


@dataclass(frozen=True)
class GapConfig:
    """A medium-filled gap; ``left`` sits at z = 0, ``right`` at z = width."""

    width: float
    medium: MaterialModel
    left: LayerStack
    right: LayerStack

    def __post_init__(self):
        _check_width("gap width", self.width)
        if isinstance(self.medium, PerfectMirror):
            raise ValueError("a perfect mirror cannot fill a gap")

    def mirrored(self) -> "GapConfig":
        return GapConfig(self.width, self.medium, self.right, self.left)


@dataclass(frozen=True)
class CavitySetup:
    """wall1 | d1 | plate | d3 | wall3, both gaps filled with ``medium``.

    ``plate`` lists the plate's layers along +z (wall1 side first). A plate
    layer may be a perfect mirror (ideal conductor slab); nothing behind it
    is then visible from either gap.
    """

    wall1: LayerStack
    d1: float
    plate: tuple[Layer, ...]
    d3: float
    wall3: LayerStack
    medium: MaterialModel

    def __post_init__(self):
        object.__setattr__(self, "plate", tuple(self.plate))
        _check_width("d1", self.d1)
        _check_width("d3", self.d3)
        if not self.plate:
            raise ValueError("the plate needs at least one layer")
        if isinstance(self.medium, PerfectMirror):
            raise ValueError("a perfect mirror cannot fill a gap")

    @property
    def plate_thickness(self) -> float:
        return sum(layer.thickness for layer in self.plate)

    def mirrored(self) -> "CavitySetup":
        return CavitySetup(self.wall3, self.d3, tuple(reversed(self.plate)), self.d1,
                           self.wall1, self.medium)


def _behind_plate(plate_layers, far_gap, far_wall, medium) -> LayerStack:
    plate_layers = tuple(plate_layers)
    for i, layer in enumerate(plate_layers):
        if layer.is_mirror:
            return LayerStack(plate_layers[:i], layer.material)
    # the far gap becomes an ordinary layer of the medium
    if math.isinf(far_gap):
        return LayerStack(tuple(plate_layers), medium)
    return LayerStack(tuple(plate_layers) + (Layer(far_gap, medium),) + far_wall.layers,
                      far_wall.termination)


def gap_of(cavity: CavitySetup, which: Gap) -> GapConfig:
    """The gap ``which`` with the plate, far gap and far wall folded into one reflector."""
    if which is Gap.GAP1:
        right = _behind_plate(cavity.plate, cavity.d3, cavity.wall3, cavity.medium)
        return GapConfig(cavity.d1, cavity.medium, cavity.wall1, right)
    if which is Gap.GAP3:
        left = _behind_plate(reversed(cavity.plate), cavity.d1, cavity.wall1, cavity.medium)
        return GapConfig(cavity.d3, cavity.medium, left, cavity.wall3)
    raise ValueError(f"unknown gap {which!r}")
