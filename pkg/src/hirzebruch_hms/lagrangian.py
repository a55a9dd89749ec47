"""Lagrangian sections L(a,b), the potentials f_I and their gradient fields.

Potentials are written in two ways.  In base coordinates,

    f_raw = a/2 log(1+s) + b/2 log(1+s^k+t) - i1 x1 - i2 x2,

and in the (p, r) chart of :mod:`geometry`, where it extends to all of P:

    f_raw = -1/2 [ A log(1-p) + i1 log p + B log(1-r) + i2 log r
                   - B log(p^k + (1-p)^k) ],

with A = a - i1 + k(b - i2) and B = b - i2.  The chart form shows that f_raw
is bounded below on P exactly when i1, i2, A, B >= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import xlogy

from .errors import NotInPolytope, UnboundedPotential
from .geometry import (
    BasePoint,
    HirzebruchModel,
    _fractions,
    _h,
    _lse3,
    chart_coordinates,
    moment_from_chart,
)

TWO_PI = 2.0 * math.pi


class LagrangianLabel(NamedTuple):
    a: int
    b: int

    def __sub__(self, other):
        return LagrangianLabel(self.a - other.a, self.b - other.b)

    def __add__(self, other):
        return LagrangianLabel(self.a + other.a, self.b + other.b)

    def __neg__(self):
        return LagrangianLabel(-self.a, -self.b)


# the sheaf side uses the same pair to name O(a,b)
BundleLabel = LagrangianLabel


class MorphismIndex(NamedTuple):
    i1: int
    i2: int

    def __add__(self, other):
        return MorphismIndex(self.i1 + other.i1, self.i2 + other.i2)

    def __neg__(self):
        return MorphismIndex(-self.i1, -self.i2)


def section_map(model: HirzebruchModel, label, pt: BasePoint) -> tuple[float, float]:
    """Fibre coordinates (y1, y2) of L(a,b) over a base point."""
    a, b = label
    p, q, r = _fractions(model, pt)
    return (TWO_PI * (a * p + b * model.k * q), TWO_PI * b * r)


def potential(model: HirzebruchModel, label, pt: BasePoint) -> float:
    """pi a log(1+s) + pi b log(1+s^k+t)."""
    a, b = label
    u = 2.0 * pt.x1
    log1ps = u + math.log1p(math.exp(-u)) if u > 0 else math.log1p(math.exp(u))
    return math.pi * (a * log1ps + b * _lse3(2.0 * model.k * pt.x1, 2.0 * pt.x2))


def f_raw(model: HirzebruchModel, label, index, pt: BasePoint) -> float:
    a, b = label
    i1, i2 = index
    u = 2.0 * pt.x1
    log1ps = u + math.log1p(math.exp(-u)) if u > 0 else math.log1p(math.exp(u))
    L = _lse3(2.0 * model.k * pt.x1, 2.0 * pt.x2)
    return 0.5 * a * log1ps + 0.5 * b * L - i1 * pt.x1 - i2 * pt.x2


def _coefficients(k, label, index):
    a, b = label
    i1, i2 = index
    return a - i1 + k * (b - i2), i1, b - i2, i2


def is_bounded_below(k: int, label, index) -> bool:
    return all(c >= 0 for c in _coefficients(k, label, index))


def f_chart(k: int, label, index, p, r):
    """f_raw as a function of the chart (p, r); vectorized, +-inf on edges."""
    A, i1, B, i2 = _coefficients(k, label, index)
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    D = p**k + (1.0 - p) ** k
    with np.errstate(invalid="ignore"):
        out = -0.5 * (
            xlogy(A, 1.0 - p) + xlogy(i1, p) + xlogy(B, 1.0 - r) + xlogy(i2, r) - B * np.log(D)
        )
    return out if out.ndim else float(out)


def f_on_polytope(model: HirzebruchModel, label, index, X) -> float:
    p, r = chart_coordinates(model, X)
    return f_chart(model.k, label, index, p, r)


def _safe_ratio(c, y):
    return 0.0 if c == 0 else c / y


def f_moment_gradient(model: HirzebruchModel, label, index, X) -> np.ndarray:
    """Derivative of f_raw with respect to moment coordinates (X1, X2)."""
    k = model.k
    A, i1, B, i2 = _coefficients(k, label, index)
    p, r = chart_coordinates(model, X)
    D = p**k + (1.0 - p) ** k
    dD = k * (p ** (k - 1) - (1.0 - p) ** (k - 1))
    df_dp = -0.5 * (-_safe_ratio(A, 1.0 - p) + _safe_ratio(i1, p) - B * dD / D)
    df_dr = -0.5 * (-_safe_ratio(B, 1.0 - r) + _safe_ratio(i2, r))
    dX = _chart_jacobian(model, p, r)
    return np.linalg.solve(dX.T, np.array([df_dp, df_dr]))


def _chart_jacobian(model, p, r) -> np.ndarray:
    # d(X1, X2) / d(p, r)
    k = model.k
    hp, dh = _h(p, k)
    return np.array(
        [
            [2.0 * model.C1 + 2.0 * k * model.C2 * (1.0 - r) * dh, -2.0 * k * model.C2 * hp],
            [0.0, 2.0 * model.C2],
        ]
    )


# --- gradient field -----------------------------------------------------------


def _field(model: HirzebruchModel, label, index, X) -> tuple[float, float]:
    """Gradient field at clip(X); no containment check."""
    a, b = label
    i1, i2 = index
    p, r = chart_coordinates(model, X)
    hp, _ = _h(p, model.k)
    return (
        TWO_PI * (a * p + b * model.k * (1.0 - r) * hp - i1),
        TWO_PI * (b * r - i2),
    )


def gradient_field(model: HirzebruchModel, label, index, X) -> tuple[float, float]:
    """The field 2 pi (y - 2 pi I)/(2 pi) in the moment directions d/dX1, d/dX2.

    It is +2 pi grad f_I, so f_I increases along its flow.
    """
    if not model.polytope.contains(X):
        raise NotInPolytope(X, -min(model.polytope.slacks(X)))
    return _field(model, label, index, X)


def field_jacobian_analytic(model: HirzebruchModel, label, index, X) -> np.ndarray:
    """Closed-form Jacobian of the field via the chart (cross-check oracle)."""
    a, b = label
    k = model.k
    p, r = chart_coordinates(model, X)
    hp, dh = _h(p, k)
    dF = TWO_PI * np.array([[a + b * k * (1.0 - r) * dh, -b * k * hp], [0.0, b]])
    return dF @ np.linalg.inv(_chart_jacobian(model, p, r))


def _inside(model, X) -> bool:
    return min(model.polytope.slacks(X)) >= -1e-13


def _directional_derivative(model, label, index, X, d, h):
    """Second-order accurate derivative of the field along d, or None."""
    X = np.asarray(X, dtype=float)
    d = np.asarray(d, dtype=float)
    plus, minus = X + h * d, X - h * d
    f = lambda Y: np.asarray(_field(model, label, index, Y))  # noqa: E731
    if _inside(model, plus) and _inside(model, minus):
        return (f(plus) - f(minus)) / (2.0 * h)
    if _inside(model, plus) and _inside(model, X + 2 * h * d):
        return (-3.0 * f(X) + 4.0 * f(plus) - f(X + 2 * h * d)) / (2.0 * h)
    if _inside(model, minus) and _inside(model, X - 2 * h * d):
        return (3.0 * f(X) - 4.0 * f(minus) + f(X - 2 * h * d)) / (2.0 * h)
    return None


def field_jacobian(model: HirzebruchModel, label, index, X, h: float = 1e-6) -> np.ndarray:
    """Finite-difference Jacobian of the gradient field in moment coordinates.

    Central differences in the interior, second-order one-sided stencils at
    the boundary.  Where a coordinate direction leaves P on both sides (the
    vertex V2 in the X2 direction) the E3 edge tangent is used instead.
    """
    if not model.polytope.contains(X):
        raise NotInPolytope(X, -min(model.polytope.slacks(X)))
    k = model.k
    n3 = math.hypot(1.0, k)
    fallbacks = [(-k / n3, 1.0 / n3), (k / n3, -1.0 / n3)]
    dirs, derivs = [], []
    for d in ((1.0, 0.0), (0.0, 1.0)):
        D = _directional_derivative(model, label, index, X, d, h)
        if D is None:
            for alt in fallbacks:
                D = _directional_derivative(model, label, index, X, alt, h)
                if D is not None:
                    d = alt
                    break
        if D is None:
            raise NotInPolytope(X, 0.0)
        dirs.append(d)
        derivs.append(D)
    M = np.array(dirs).T  # columns are directions
    return np.array(derivs).T @ np.linalg.inv(M)


# --- normalization -------------------------------------------------------------


@dataclass(frozen=True)
class PotentialData:
    """f_I = f_raw - const, with min over P of f_I equal to 0.

    For indices where f_raw is unbounded below on P the data is kept
    un-normalized (``normalized`` is False, ``const`` is 0); only differences
    of such potentials are meaningful.
    """

    label: LagrangianLabel
    index: MorphismIndex
    k: int
    const: float
    normalized: bool = True
    minimum_locus: tuple = field(default=(), compare=False)
    argmin: tuple[float, float] | None = None

    def chart_value(self, p, r):
        return f_chart(self.k, self.label, self.index, p, r) - self.const

    def __call__(self, model: HirzebruchModel, X) -> float:
        p, r = chart_coordinates(model, X)
        return self.chart_value(p, r)


def minimize_on_square(fun, n: int = 201, levels: int = 9, m: int = 21):
    """Global minimum of a vectorized fun(p, r) over [0, 1]^2.

    A coarse grid seed followed by zooming local grids (each level shrinks
    the box by 5) and a bounded 1-d refinement along each edge of the square.
    Returns (value, p, r).
    """
    g = np.linspace(0.0, 1.0, n)
    P, R = np.meshgrid(g, g, indexing="ij")
    vals = np.asarray(fun(P, R), dtype=float)
    vals = np.where(np.isnan(vals), np.inf, vals)
    i = int(np.argmin(vals))
    best = (float(vals.flat[i]), float(P.flat[i]), float(R.flat[i]))
    h = 1.0 / (n - 1)
    for _ in range(levels):
        _, p0, r0 = best
        gp = np.clip(np.linspace(p0 - 2 * h, p0 + 2 * h, m), 0.0, 1.0)
        gr = np.clip(np.linspace(r0 - 2 * h, r0 + 2 * h, m), 0.0, 1.0)
        P, R = np.meshgrid(gp, gr, indexing="ij")
        vals = np.asarray(fun(P, R), dtype=float)
        vals = np.where(np.isnan(vals), np.inf, vals)
        i = int(np.argmin(vals))
        if vals.flat[i] <= best[0]:
            best = (float(vals.flat[i]), float(P.flat[i]), float(R.flat[i]))
        h *= 4.0 / (m - 1)

    edges = (
        lambda u: (0.0, u),
        lambda u: (1.0, u),
        lambda u: (u, 0.0),
        lambda u: (u, 1.0),
    )
    for edge in edges:
        scalar = lambda u, e=edge: float(fun(*map(np.asarray, e(u))))  # noqa: E731
        if not math.isfinite(scalar(0.5)):
            continue
        res = minimize_scalar(scalar, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
        if res.fun < best[0]:
            best = (float(res.fun), *edge(float(res.x)))
    return best


def normalize(model: HirzebruchModel, label, index, components=None) -> PotentialData:
    """Normalize f_I so that its minimum over P is 0.

    ``components`` are the intersection components for (label, index); they
    are exactly the critical set of f_I on P and are used as exact candidate
    minimizers alongside the numerical search.  They are computed if omitted.
    """
    label = LagrangianLabel(*label)
    index = MorphismIndex(*index)
    k = model.k
    if not is_bounded_below(k, label, index):
        raise UnboundedPotential(
            f"f for label {tuple(label)}, index {tuple(index)} is unbounded below on P"
        )
    if components is None:
        from .morse import solve_components

        components = solve_components(model, label, index)

    fun = lambda p, r: f_chart(k, label, index, p, r)  # noqa: E731
    best, bp, br = minimize_on_square(fun)
    argmin = (bp, br)
    for comp in components:
        for pr in comp.sample_chart(5):
            v = float(fun(*pr))
            if v < best:
                best, argmin = v, pr
    locus = []
    for comp in components:
        vals = [float(fun(*pr)) for pr in comp.sample_chart(5)]
        if max(vals) - best <= 1e-9:
            locus.append(comp)
    return PotentialData(
        label, index, k, best, True, tuple(locus), moment_from_chart(model, *argmin)
    )


def potential_data(model: HirzebruchModel, label, index, components=None) -> PotentialData:
    """:func:`normalize`, falling back to raw data for unbounded potentials."""
    try:
        return normalize(model, label, index, components)
    except UnboundedPotential:
        return PotentialData(LagrangianLabel(*label), MorphismIndex(*index), model.k, 0.0, False)


__all__ = [
    "BundleLabel",
    "LagrangianLabel",
    "MorphismIndex",
    "PotentialData",
    "f_chart",
    "f_moment_gradient",
    "f_on_polytope",
    "f_raw",
    "field_jacobian",
    "field_jacobian_analytic",
    "gradient_field",
    "is_bounded_below",
    "minimize_on_square",
    "normalize",
    "potential",
    "potential_data",
    "section_map",
]
