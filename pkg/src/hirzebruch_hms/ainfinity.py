"""Gradient trees, the differential m1 and the composition m2.

Areas follow two conventions.  The differential uses A = 2 pi (f(v') - f(v))
along an ascending trajectory from v to v'; the composition uses
A = f_I(z) + f_J(z) with normalized potentials.  Both scale factors are
arguments so either convention can be used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BudgetExceeded, CompositionTypeError, MissingTarget, NonAdjacentDegrees
from .geometry import HirzebruchModel, chart_coordinates
from .lagrangian import (
    LagrangianLabel,
    _field,
    f_chart,
    f_moment_gradient,
)
from .morse import (
    ComponentGeometry,
    HomSpace,
    MorphismGenerator,
    hom_space,
    linear_analysis,
    solve_components,
)

TWO_PI = 2.0 * math.pi
SHOOT_EPS = 1e-4
CONVERGED = 1e-9
ARRIVAL_TOL = 1e-6
EXIT_TOL = 1e-7

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(6)


@dataclass(frozen=True)
class GradientTree:
    """A traced trajectory (one leg) or a tree (several legs meeting at ``end``).

    ``area`` comes from the potential difference; ``integrated_area`` is the
    same quantity from a quadrature of grad f along the legs, when computed.
    """

    starts: tuple[tuple[float, float], ...]
    end: tuple[float, float]
    legs: tuple[np.ndarray, ...] = field(compare=False, repr=False)
    status: str = "converged"  # converged | exited | reached
    arrival: ComponentGeometry | None = None
    signature: tuple = ()
    area: float = float("nan")
    integrated_area: float = float("nan")

    @property
    def path(self) -> np.ndarray:
        return self.legs[0]


def _pt(X) -> tuple[float, float]:
    return (float(X[0]), float(X[1]))


def _cell_signature(model, label, index, path) -> tuple:
    cells = []
    for X in path[1:]:
        F = _field(model, label, index, X)
        cell = tuple(int(np.sign(round(c, 12))) for c in F)
        if not cells or cells[-1] != cell:
            cells.append(cell)
    return tuple(cells)


def trace_trajectory(
    model: HirzebruchModel,
    label,
    index,
    start,
    direction=None,
    *,
    eps: float = SHOOT_EPS,
    targets=None,
    stop_x1: float | None = None,
    t_max: float = 1e3,
) -> GradientTree:
    """Integrate the ascending flow dX/dt = F(X) from start + eps * direction.

    Stops on convergence (|F| < 1e-9), on leaving P, or on crossing the
    vertical line x1 = stop_x1.  ``targets`` are the components a converged
    trajectory is matched against; by default every component of the index.
    """
    label = LagrangianLabel(*label)
    start = np.asarray(start, dtype=float)
    X0 = start if direction is None else start + eps * np.asarray(direction, dtype=float)
    if targets is None:
        targets = solve_components(model, label, index)
    poly = model.polytope

    def rhs(_t, y):
        return _field(model, label, index, y)

    def converged(_t, y):
        return math.hypot(*_field(model, label, index, y)) - CONVERGED

    def exited(_t, y):
        return min(poly.slacks(y)) + EXIT_TOL

    converged.terminal = True
    converged.direction = -1
    exited.terminal = True
    exited.direction = -1
    events = [converged, exited]
    if stop_x1 is not None:

        def crossed(_t, y):
            return y[0] - stop_x1

        crossed.terminal = True
        events.append(crossed)

    sol = solve_ivp(rhs, (0.0, t_max), X0, method="RK45", rtol=1e-10, atol=1e-12, events=events)
    path = np.vstack([start[None, :], sol.y.T])
    hit = [len(ev) > 0 for ev in sol.t_events]
    if hit[0]:
        status = "converged"
    elif hit[1]:
        status = "exited"
    elif len(hit) > 2 and hit[2]:
        status = "reached"
    else:
        tree = GradientTree((_pt(start),), _pt(path[-1]), (path,), "budget")
        raise BudgetExceeded(f"trajectory from {tuple(start)} did not terminate by t={t_max}", tree)

    arrival = None
    if status == "converged":
        dists = [(c.distance(path[-1]), n) for n, c in enumerate(targets)]
        if dists:
            d, n = min(dists)
            if d < ARRIVAL_TOL:
                arrival = targets[n]
                if arrival.kind == "point":
                    path = np.vstack([path, np.asarray(arrival.points[0])[None, :]])
    return GradientTree(
        (_pt(start),),
        _pt(path[-1]),
        (path,),
        status,
        arrival,
        _cell_signature(model, label, index, path),
    )


def line_integral(model: HirzebruchModel, label, index, path) -> float:
    """Integral of grad f_raw . dX along a polyline (Gauss-Legendre per piece)."""
    total = 0.0
    path = np.asarray(path, dtype=float)
    for P0, P1 in zip(path[:-1], path[1:]):
        d = P1 - P0
        if not d.any():
            continue
        for x, w in zip(_GL_NODES, _GL_WEIGHTS):
            X = P0 + 0.5 * (x + 1.0) * d
            total += 0.5 * w * float(np.dot(f_moment_gradient(model, label, index, X), d))
    return total


def _f_at(model, label, index, X) -> float:
    return float(f_chart(model.k, label, index, *chart_coordinates(model, X)))


def _seed_directions(unstable, model, v, eps):
    dirs = []
    vecs = [np.asarray(u) for u in unstable]
    for u in vecs:
        dirs += [u, -u]
    if len(vecs) == 2:
        for s1 in (1.0, -1.0):
            for s2 in (1.0, -1.0):
                b = s1 * vecs[0] + s2 * vecs[1]
                dirs.append(b / np.hypot(*b))
    return [d for d in dirs if model.polytope.contains(np.asarray(v) + eps * d, 0.0)]


@dataclass(frozen=True)
class M1Result:
    hom: HomSpace
    coefficients: dict = field(default_factory=dict)  # (source key, target key) -> float
    trees: tuple[GradientTree, ...] = ()

    def matrix(self) -> np.ndarray:
        keys = [g.key for g in self.hom.generators]
        pos = {key: n for n, key in enumerate(keys)}
        M = np.zeros((len(keys), len(keys)))
        for (src, tgt), value in self.coefficients.items():
            M[pos[tgt], pos[src]] = value
        return M

    @property
    def is_zero(self) -> bool:
        return not any(self.coefficients.values())


def _trajectories(model, V: MorphismGenerator, targets, eps, area_scale):
    label, index = V.label, V.index
    v = np.asarray(V.geometry.point)
    known = list(solve_components(model, label, index))
    la = linear_analysis(model, label, index, v, V.geometry.tangent)
    found = {}
    for d in _seed_directions(la.unstable, model, v, eps):
        tree = trace_trajectory(model, label, index, v, d, eps=eps, targets=known)
        if tree.arrival is None or tree.arrival not in targets:
            continue
        check = trace_trajectory(model, label, index, v, d, eps=eps / 2, targets=known)
        if check.arrival != tree.arrival:
            continue
        W = targets[tree.arrival]
        key = (W.key, tree.signature)
        if key in found:
            continue
        end = np.asarray(tree.end)
        area = area_scale * (_f_at(model, label, index, end) - _f_at(model, label, index, v))
        integrated = area_scale * line_integral(model, label, index, tree.path)
        found[key] = (
            W,
            GradientTree(
                tree.starts, tree.end, tree.legs, tree.status, tree.arrival,
                tree.signature, area, integrated,
            ),
        )
    return list(found.values())


def m1_pair(
    model: HirzebruchModel,
    V: MorphismGenerator,
    W: MorphismGenerator,
    *,
    eps: float = SHOOT_EPS,
    area_scale: float = TWO_PI,
) -> tuple[float, list[GradientTree]]:
    """Coefficient of W in m1(V) and the trajectories contributing to it."""
    if W.degree != V.degree + 1:
        raise NonAdjacentDegrees(f"|V|={V.degree}, |W|={W.degree}: expected |W| = |V| + 1")
    if W.index != V.index:
        return 0.0, []
    found = _trajectories(model, V, {W.geometry: W}, eps, area_scale)
    trees = [t for _, t in found]
    return float(sum(math.exp(-t.area) for t in trees)), trees


def m1(
    model: HirzebruchModel,
    L1,
    L2,
    *,
    eps: float = SHOOT_EPS,
    area_scale: float = TWO_PI,
) -> M1Result:
    """The differential on Mo(P)(L1, L2) with coefficients e^{-A}.

    Trajectories only join components carrying the same index, since the
    flow is that of a single f_I.
    """
    hom = hom_space(model, L1, L2)
    coefficients: dict = {}
    trees: list[GradientTree] = []
    for V in hom.generators:
        targets = {
            W.geometry: W for W in hom.generators if W.degree == V.degree + 1 and W.index == V.index
        }
        if not targets:
            continue
        for W, tree in _trajectories(model, V, targets, eps, area_scale):
            key = (V.key, W.key)
            coefficients[key] = coefficients.get(key, 0.0) + math.exp(-tree.area)
            trees.append(tree)
    return M1Result(hom, coefficients, tuple(trees))


# --- composition ------------------------------------------------------------------


@dataclass(frozen=True)
class Composition:
    coefficient: float
    target: MorphismGenerator
    z: tuple[float, float]
    tree: GradientTree | None = None


def _horizontal_point(model, comp: ComponentGeometry, height: float) -> np.ndarray:
    """Point of a (type-0) component on the line x2 = height."""
    if comp.kind == "point":
        return np.asarray(comp.points[0])
    A, B = (np.asarray(q) for q in comp.points)
    if abs(B[1] - A[1]) < 1e-15:
        return A.copy()
    u = (height - A[1]) / (B[1] - A[1])
    return A + u * (B - A)


def m2(
    model: HirzebruchModel,
    L1,
    L2,
    L3,
    V12: MorphismGenerator,
    V23: MorphismGenerator,
    *,
    area_scale: float = 1.0,
) -> Composition:
    """Composition V23 o V12 in Mo(P)(L1, L3) for type-{0,1} morphisms.

    The tree is horizontal: one leg from the type-0 factor and one from the
    type-1 factor meet at the point z of the target generator Z_{I+J}.
    """
    L1, L2, L3 = (LagrangianLabel(*L) for L in (L1, L2, L3))
    b12, b23 = L2.b - L1.b, L3.b - L2.b
    if b12 not in (0, 1) or b23 not in (0, 1) or b12 + b23 > 1:
        raise CompositionTypeError(
            f"composition of type {b12} and type {b23} morphisms is outside the type-0/1 range"
        )
    for V in (V12, V23):
        if V.degree != 0:
            raise CompositionTypeError("m2 is only defined here on degree-0 generators")
    hom13 = hom_space(model, L1, L3)
    total = V12.index + V23.index
    candidates = [g for g in hom13.find(total) if g.degree == 0]
    if not candidates:
        raise MissingTarget(f"no generator with index {tuple(total)} in hom({tuple(L1)}, {tuple(L3)})")
    Z = candidates[0]
    if V12.is_identity or V23.is_identity:
        return Composition(1.0, Z, Z.geometry.point)

    if b12 == 0:
        flat, other = V12, V23
    else:
        flat, other = V23, V12
    if Z.geometry.kind == "point":
        z = np.asarray(Z.geometry.points[0])
    else:
        height = Z.geometry.points[0][1]
        z = _horizontal_point(model, flat.geometry, height)
        if Z.geometry.distance(z) > ARRIVAL_TOL:
            raise MissingTarget("horizontal tree does not reach the target component")
    v = _horizontal_point(model, flat.geometry, float(z[1]))
    w = _horizontal_point(model, other.geometry, float(z[1]))
    value = V12.potential(model, z) + V23.potential(model, z)
    legs = (np.vstack([v, z]), np.vstack([w, z]))
    tree = GradientTree((_pt(v), _pt(w)), _pt(z), legs, "reached", Z.geometry, (), area_scale * value)
    return Composition(math.exp(-area_scale * value), Z, _pt(z), tree)


__all__ = [
    "Composition",
    "GradientTree",
    "M1Result",
    "line_integral",
    "m1",
    "m1_pair",
    "m2",
    "trace_trajectory",
]
