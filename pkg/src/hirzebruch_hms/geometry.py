"""Moment polytope, moment map and Kähler data of the Hirzebruch surface F_k.

Two coordinate systems are used on the base:

* base coordinates ``(x1, x2)`` with ``s = exp(2 x1)``, ``t = exp(2 x2)``;
  they only cover the interior of the polytope;
* moment coordinates ``(X1, X2)``, the image of the moment map, which cover
  the whole closed trapezoid P.

Internally most computations go through the *chart* ``(p, r)`` with

    p = s / (1 + s),        r = t / (1 + s^k + t).

The map ``(p, r) -> (X1, X2)`` is a homeomorphism of the unit square onto P
(p = 0, 1 are the edges E1, E3 and r = 0, 1 are E2, E4), so boundary limits
of every quantity in s, t become ordinary values at the edges of the square.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NotInPolytope

BOUNDARY_TOL = 1e-9

STRATA = ("interior", "E1", "E2", "E3", "E4", "V1", "V2", "V3", "V4")
# vertex label -> the two edges meeting there
VERTEX_EDGES = {
    "V1": ("E1", "E2"),
    "V2": ("E2", "E3"),
    "V3": ("E3", "E4"),
    "V4": ("E1", "E4"),
}


@dataclass(frozen=True)
class HirzebruchModel:
    """The surface F_k with Kähler constants C1, C2."""

    k: int
    C1: float = 1.0
    C2: float = 1.0

    def __post_init__(self):
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        if not (self.C1 > 0 and self.C2 > 0):
            raise ValueError(f"C1 and C2 must be positive, got {self.C1!r}, {self.C2!r}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "C1", float(self.C1))
        object.__setattr__(self, "C2", float(self.C2))

    @cached_property
    def polytope(self) -> "MomentPolytope":
        return MomentPolytope.of(self)


@dataclass(frozen=True)
class Edge:
    name: str
    normal: tuple[float, float]  # inward, unit length
    offset: float  # normal . X >= offset on P

    def slack(self, X) -> float:
        return self.normal[0] * X[0] + self.normal[1] * X[1] - self.offset


@dataclass(frozen=True)
class MomentPolytope:
    k: int
    C1: float
    C2: float
    vertices: tuple[tuple[float, float], ...]
    edges: tuple[Edge, ...]

    @classmethod
    def of(cls, model: HirzebruchModel) -> "MomentPolytope":
        k, C1, C2 = model.k, model.C1, model.C2
        width = 2.0 * (C1 + k * C2)
        vertices = ((0.0, 0.0), (width, 0.0), (2.0 * C1, 2.0 * C2), (0.0, 2.0 * C2))
        n3 = math.hypot(1.0, k)
        edges = (
            Edge("E1", (1.0, 0.0), 0.0),
            Edge("E2", (0.0, 1.0), 0.0),
            Edge("E3", (-1.0 / n3, -k / n3), -width / n3),
            Edge("E4", (0.0, -1.0), -2.0 * C2),
        )
        return cls(k, C1, C2, vertices, edges)

    @property
    def width(self) -> float:
        return 2.0 * (self.C1 + self.k * self.C2)

    @property
    def height(self) -> float:
        return 2.0 * self.C2

    def slacks(self, X) -> list[float]:
        return [e.slack(X) for e in self.edges]

    def contains(self, X, tol: float = BOUNDARY_TOL) -> bool:
        return min(self.slacks(X)) >= -tol

    def active_edges(self, X, tol: float = BOUNDARY_TOL) -> tuple[str, ...]:
        sl = self.slacks(X)
        worst = min(sl)
        if worst < -tol:
            raise NotInPolytope(X, -worst)
        return tuple(e.name for e, v in zip(self.edges, sl) if v <= tol)

    def clip(self, X) -> tuple[float, float]:
        """Push a point that is slightly outside back onto P."""
        x2 = min(max(float(X[1]), 0.0), self.height)
        x1 = min(max(float(X[0]), 0.0), self.width - self.k * x2)
        return (x1, x2)

    def vertex(self, label: str) -> tuple[float, float]:
        return self.vertices[int(label[1]) - 1]


def boundary_stratum(polytope: MomentPolytope, X, tol: float = BOUNDARY_TOL) -> str:
    """Classify X as 'interior', an edge 'E1'..'E4' or a vertex 'V1'..'V4'."""
    active = polytope.active_edges(X, tol)
    if not active:
        return "interior"
    if len(active) == 1:
        return active[0]
    for label, pair in VERTEX_EDGES.items():
        if set(pair) <= set(active):
            return label
    # only reachable for degenerate tolerances
    return active[0]


@dataclass(frozen=True)
class BasePoint:
    x1: float
    x2: float

    @property
    def s(self) -> float:
        return math.exp(2.0 * self.x1)

    @property
    def t(self) -> float:
        return math.exp(2.0 * self.x2)

    @classmethod
    def from_st(cls, s: float, t: float) -> "BasePoint":
        """Build from s, t >= 0; s = 0 or t = 0 give the limiting x = -inf."""
        x1 = 0.5 * math.log(s) if s > 0 else -math.inf
        x2 = 0.5 * math.log(t) if t > 0 else -math.inf
        return cls(x1, x2)


@dataclass(frozen=True)
class BoundaryPoint:
    """Preimage of a boundary point of P, described by its surviving limits.

    ``s`` is finite on E2 and E4, ``t`` is finite on E1 and ``ratio = t/s^k``
    is finite on E3; the remaining fields are ``None``.
    """

    stratum: str
    s: float | None = None
    t: float | None = None
    ratio: float | None = None


def _lse3(a: float, b: float) -> float:
    # log(1 + e^a + e^b) without overflow
    m = max(0.0, a, b)
    return m + math.log(math.exp(-m) + math.exp(a - m) + math.exp(b - m))


def _fractions(model: HirzebruchModel, pt: BasePoint) -> tuple[float, float, float]:
    """(p, q, r) = (s/(1+s), s^k/(1+s^k+t), t/(1+s^k+t)) evaluated stably."""
    a = 2.0 * model.k * pt.x1
    b = 2.0 * pt.x2
    L = _lse3(a, b)
    u = 2.0 * pt.x1
    if u >= 0:
        p = 1.0 / (1.0 + math.exp(-u))
    else:
        eu = math.exp(u)
        p = eu / (1.0 + eu)
    return p, math.exp(a - L), math.exp(b - L)


def moment_map(model: HirzebruchModel, pt: BasePoint) -> tuple[float, float]:
    p, q, r = _fractions(model, pt)
    return (2.0 * model.C1 * p + 2.0 * model.k * model.C2 * q, 2.0 * model.C2 * r)


def kaehler_potential(model: HirzebruchModel, pt: BasePoint) -> float:
    u = 2.0 * pt.x1
    log1ps = u + math.log1p(math.exp(-u)) if u > 0 else math.log1p(math.exp(u))
    return model.C2 * _lse3(2.0 * model.k * pt.x1, 2.0 * pt.x2) + model.C1 * log1ps


def metric_inverse(model: HirzebruchModel, pt: BasePoint) -> np.ndarray:
    """The matrix g^{ij}, which is also the Hessian of the Kähler potential."""
    p, q, r = _fractions(model, pt)
    k, C1, C2 = model.k, model.C1, model.C2
    g11 = 4.0 * C1 * p * (1.0 - p) + 4.0 * C2 * k * k * q * (1.0 - q)
    g12 = -4.0 * C2 * k * q * r
    g22 = 4.0 * C2 * r * (1.0 - r)
    return np.array([[g11, g12], [g12, g22]])


# --- the (p, r) chart -------------------------------------------------------


def _h(p: float, k: int) -> tuple[float, float]:
    """h(p) = p^k / (p^k + (1-p)^k) and its derivative."""
    a = p**k
    b = (1.0 - p) ** k
    D = a + b
    dh = k * p ** (k - 1) * (1.0 - p) ** (k - 1) / (D * D)
    return a / D, dh


def _solve_p(x1m: float, r: float, model: HirzebruchModel) -> float:
    A = 2.0 * model.C1
    B = 2.0 * model.k * model.C2 * (1.0 - r)
    if x1m <= 0.0:
        return 0.0
    if x1m >= A + B:
        return 1.0
    lo, hi = 0.0, 1.0
    p = x1m / (A + B)
    for _ in range(200):
        hp, dh = _h(p, model.k)
        g = A * p + B * hp - x1m
        if g == 0.0:
            return p
        if g > 0.0:
            hi = p
        else:
            lo = p
        pn = p - g / (A + B * dh)
        if not (lo < pn < hi):
            pn = 0.5 * (lo + hi)
        if abs(pn - p) <= 1e-16 * max(p, 1e-300) or hi - lo <= 1e-17:
            return pn
        p = pn
    return p


def chart_coordinates(model: HirzebruchModel, X) -> tuple[float, float]:
    """(p, r) of a point of P; points slightly outside are clipped first."""
    x1m, x2m = model.polytope.clip(X)
    r = x2m / (2.0 * model.C2)
    return _solve_p(x1m, r, model), r


def chart_coordinates_array(model: HirzebruchModel, X1, X2):
    """Vectorized :func:`chart_coordinates` for arrays of moment points."""
    X1 = np.asarray(X1, dtype=float)
    X2 = np.asarray(X2, dtype=float)
    k = model.k
    r = np.clip(X2 / (2.0 * model.C2), 0.0, 1.0)
    A = 2.0 * model.C1
    B = 2.0 * k * model.C2 * (1.0 - r)
    x1m = np.clip(X1, 0.0, A + B)
    lo = np.zeros_like(x1m)
    hi = np.ones_like(x1m)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(A + B > 0, x1m / (A + B), 0.0)
        for _ in range(80):
            a = p**k
            b = (1.0 - p) ** k
            D = a + b
            g = A * p + B * a / D - x1m
            dg = A + B * k * p ** (k - 1) * (1.0 - p) ** (k - 1) / (D * D)
            hi = np.where(g > 0, p, hi)
            lo = np.where(g <= 0, p, lo)
            pn = p - g / dg
            bad = ~((pn > lo) & (pn < hi))
            pn = np.where(bad, 0.5 * (lo + hi), pn)
            pn = np.where(g == 0, p, pn)
            done = np.all(np.abs(pn - p) <= 1e-16)
            p = pn
            if done:
                break
    return p, r


def moment_from_chart(model: HirzebruchModel, p, r):
    """Inverse of the chart: (p, r) in [0,1]^2 -> moment coordinates."""
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    k = model.k
    a = p**k
    hp = a / (a + (1.0 - p) ** k)
    X1 = 2.0 * model.C1 * p + 2.0 * k * model.C2 * (1.0 - r) * hp
    X2 = 2.0 * model.C2 * r
    if X1.ndim == 0:
        return float(X1), float(X2)
    return X1, X2


def invert_moment(model: HirzebruchModel, X) -> BasePoint | BoundaryPoint:
    """Base point with the given moment image, or the boundary limits.

    Interior points are found through the monotone 1-d reduction in the chart
    and then polished by damped Newton steps on the moment map (whose
    Jacobian is g^{ij}).
    """
    stratum = boundary_stratum(model.polytope, X)
    p, r = chart_coordinates(model, X)
    k = model.k
    if stratum != "interior":
        if stratum in ("E2", "E4"):
            return BoundaryPoint(stratum, s=p / (1.0 - p))
        if stratum == "E1":
            return BoundaryPoint(stratum, t=r / (1.0 - r))
        if stratum == "E3":
            return BoundaryPoint(stratum, ratio=r / (1.0 - r))
        return BoundaryPoint(stratum)

    log_s = math.log(p) - math.log1p(-p)
    log_t = math.log(r) - math.log1p(-r) + np.logaddexp(0.0, k * log_s)
    x = np.array([0.5 * log_s, 0.5 * log_t])
    target = np.asarray(X, dtype=float)

    def residual(v):
        return np.asarray(moment_map(model, BasePoint(v[0], v[1]))) - target

    res = residual(x)
    for _ in range(20):
        norm = float(np.hypot(*res))
        if norm < 1e-14:
            break
        step = np.linalg.solve(metric_inverse(model, BasePoint(*x)), res)
        lam = 1.0
        while lam > 1e-6:
            trial = x - lam * step
            tres = residual(trial)
            if np.hypot(*tres) < norm:
                x, res = trial, tres
                break
            lam *= 0.5
        else:
            break
    return BasePoint(float(x[0]), float(x[1]))
