"""Adaptive double integrals over the (xi, k) quadrant.

The quadrant is mapped onto the unit square with
``xi = a*x/(1-x)``, ``k = b*y/(1-y)``, where ``a = c/(2*n0*d)`` and
``b = 1/(2*d)`` follow the natural decay scale of a gap of width ``d``
filled with a medium of static index ``n0``. Two rules are available:

* ``EXP_SCALED``: globally adaptive tensor Gauss-Kronrod (7/15) cubature
  on rectangles, error from the nested Gauss/Kronrod difference.
* ``TANH_SINH``: double-exponential trapezoidal rule in each variable
  (``xi = a*exp(pi*sinh(t))``) with step halving, error from the
  difference of successive levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .constants import C
from .materials import MaterialModel, static_index

Kernel = Callable[[np.ndarray, np.ndarray], np.ndarray]


class Mapping(Enum):
    EXP_SCALED = "exp_scaled"
    TANH_SINH = "tanh_sinh"


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 0.0
    max_nodes_per_axis: int = 2048
    mapping: Mapping = Mapping.EXP_SCALED

    def __post_init__(self):
        if not (self.rel_tol > 0):
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol!r}")
        if not (self.abs_tol >= 0):
            raise ValueError(f"abs_tol must be >= 0, got {self.abs_tol!r}")
        if int(self.max_nodes_per_axis) < 16:
            raise ValueError("max_nodes_per_axis must be >= 16")
        object.__setattr__(self, "mapping", Mapping(self.mapping))

    @property
    def node_budget(self) -> int:
        """Total kernel evaluations allowed for one double integral."""
        return int(self.max_nodes_per_axis) ** 2


@dataclass(frozen=True)
class IntegralResult:
    value: float
    err_estimate: float
    nodes_used: int


class NonConvergence(RuntimeError):
    """The node budget ran out before the tolerance was met."""

    def __init__(self, message, partial: IntegralResult):
        super().__init__(message)
        self.partial = partial


# QUADPACK qk15 abscissae/weights on [-1, 1]; Gauss-7 nodes are the odd entries.
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # 15 nodes, ascending
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG15 = np.zeros(15)
_WG15[[1, 3, 5]] = _WG[:3]
_WG15[[9, 11, 13]] = _WG[2::-1]
_WG15[7] = _WG[3]
_RULE_SIZE = 225


def scales(gap_width: float, medium: MaterialModel) -> tuple[float, float]:
    """(xi scale, k scale) of the mapping for a gap of this width and medium."""
    if not (0 < gap_width < math.inf):
        raise ValueError(f"mapping scale needs a finite width, got {gap_width!r}")
    return C / (2.0 * static_index(medium) * gap_width), 1.0 / (2.0 * gap_width)


def integrate2d(kernel: Kernel, gap_width: float, medium: MaterialModel,
                spec: QuadratureSpec = QuadratureSpec()) -> IntegralResult:
    """Integral of ``kernel(xi, k)`` over xi, k in [0, inf).

    ``kernel`` receives flat float arrays and must return an array of the
    same shape. Raises NonConvergence (carrying the partial result) when the
    node budget is spent before ``max(rel_tol*|I|, abs_tol)`` is reached.
    """
    a, b = scales(gap_width, medium)
    if spec.mapping is Mapping.TANH_SINH:
        return _tanh_sinh(kernel, a, b, spec)
    return _gauss_kronrod(kernel, a, b, spec)


def _mapped(kernel, a, b):
    def f(x, y):
        ox = 1.0 - x
        oy = 1.0 - y
        xi = a * x / ox
        k = b * y / oy
        jac = (a / (ox * ox)) * (b / (oy * oy))
        return np.asarray(kernel(xi, k), dtype=float) * jac
    return f


def _apply_rule(f, rects):
    """Kronrod value, nested error and per-axis error indicators for each rect."""
    x0, x1, y0, y1 = rects.T
    hx = 0.5 * (x1 - x0)
    hy = 0.5 * (y1 - y0)
    cx = 0.5 * (x1 + x0)
    cy = 0.5 * (y1 + y0)
    xs = cx[:, None, None] + hx[:, None, None] * _NODES[None, :, None]
    ys = cy[:, None, None] + hy[:, None, None] * _NODES[None, None, :]
    xs, ys = np.broadcast_arrays(xs, ys)
    vals = f(xs.ravel(), ys.ravel()).reshape(xs.shape)
    area = (hx * hy)
    kk = np.einsum("nij,i,j->n", vals, _WK, _WK) * area
    gg = np.einsum("nij,i,j->n", vals, _WG15, _WG15) * area
    gk = np.einsum("nij,i,j->n", vals, _WG15, _WK) * area
    kg = np.einsum("nij,i,j->n", vals, _WK, _WG15) * area
    err = np.abs(kk - gg)
    return kk, err, np.abs(kk - gk), np.abs(kk - kg)


def _gauss_kronrod(kernel, a, b, spec):
    f = _mapped(kernel, a, b)
    # start from a 4x4 grid when the budget allows it (a 16-node axis only fits one rule)
    m = next(m for m in (4, 2, 1) if m * m * _RULE_SIZE <= spec.node_budget)
    edges = np.linspace(0.0, 1.0, m + 1)
    rects = np.array([[edges[i], edges[i + 1], edges[j], edges[j + 1]]
                      for i in range(m) for j in range(m)])
    vals, errs, ex, ey = _apply_rule(f, rects)
    nodes = _RULE_SIZE * len(rects)
    while True:
        value = math.fsum(vals)
        err = math.fsum(errs)
        target = max(spec.rel_tol * abs(value), spec.abs_tol)
        if err <= target or not np.isfinite(err):
            break
        order = np.argsort(-errs, kind="stable")
        cum = np.cumsum(errs[order])
        n_split = int(np.searchsorted(cum, 0.5 * (err - target))) + 1
        n_split = min(n_split, len(order), 512)
        if nodes + 2 * _RULE_SIZE * n_split > spec.node_budget:
            raise NonConvergence(
                f"node budget {spec.node_budget} exhausted at error {err:.3e} "
                f"(target {target:.3e})", IntegralResult(value, err, nodes))
        pick = np.sort(order[:n_split])
        keep = np.ones(len(rects), dtype=bool)
        keep[pick] = False
        parents = rects[pick]
        along_x = ex[pick] >= ey[pick]
        mx = 0.5 * (parents[:, 0] + parents[:, 1])
        my = 0.5 * (parents[:, 2] + parents[:, 3])
        lo = parents.copy()
        hi = parents.copy()
        lo[along_x, 1] = mx[along_x]
        hi[along_x, 0] = mx[along_x]
        lo[~along_x, 3] = my[~along_x]
        hi[~along_x, 2] = my[~along_x]
        children = np.concatenate([lo, hi])
        cv, ce, cx, cy = _apply_rule(f, children)
        nodes += _RULE_SIZE * len(children)
        rects = np.concatenate([rects[keep], children])
        vals = np.concatenate([vals[keep], cv])
        errs = np.concatenate([errs[keep], ce])
        ex = np.concatenate([ex[keep], cx])
        ey = np.concatenate([ey[keep], cy])
    if not np.isfinite(value):
        raise NonConvergence("integrand produced non-finite values",
                             IntegralResult(value, err, nodes))
    return IntegralResult(value, err, nodes)


_T_MAX = 4.0


def _de_nodes(scale, h):
    t = np.arange(-_T_MAX, _T_MAX + 0.5 * h, h)
    s = np.pi * np.sinh(t)
    x = scale * np.exp(s)
    w = h * x * np.pi * np.cosh(t)
    return x, w


def _tanh_sinh(kernel, a, b, spec):
    h = 1.0
    previous = None
    nodes = 0
    while True:
        xi, wx = _de_nodes(a, h)
        k, wk = _de_nodes(b, h)
        if len(xi) > spec.max_nodes_per_axis:
            partial = previous or IntegralResult(math.nan, math.inf, nodes)
            raise NonConvergence(
                f"tanh-sinh needs more than {spec.max_nodes_per_axis} nodes per axis", partial)
        XI, K = np.meshgrid(xi, k, indexing="ij")
        vals = np.asarray(kernel(XI.ravel(), K.ravel()), dtype=float).reshape(XI.shape)
        nodes += vals.size
        value = math.fsum((vals * wx[:, None] * wk[None, :]).ravel())
        if previous is not None:
            err = abs(value - previous.value)
            target = max(spec.rel_tol * abs(value), spec.abs_tol)
            if err <= target:
                return IntegralResult(value, err, nodes)
            previous = IntegralResult(value, err, nodes)
        else:
            previous = IntegralResult(value, abs(value), nodes)
            if value == 0.0 and not np.any(vals):
                return IntegralResult(0.0, 0.0, nodes)
        h *= 0.5
