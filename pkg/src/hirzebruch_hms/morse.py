"""Intersection components, their degrees and admissibility, morphism spaces.

For a label (a, b) and index I = (i1, i2) the intersection equations read,
in the chart (p, r),

    b r = i2,        a p + k (b - i2) h(p) = i1,       h(p) = p^k/(p^k + (1-p)^k),

so every component lies on a horizontal line r = i2/b (b != 0) or on the
straight line p = i1/a (b = 0).  On a horizontal line the second equation is
solved for all roots in p in [0, 1], endpoints (the edges E1, E3) included.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import M1Violation
from .geometry import (
    BOUNDARY_TOL,
    HirzebruchModel,
    boundary_stratum,
    moment_from_chart,
)
from .lagrangian import (
    LagrangianLabel,
    MorphismIndex,
    PotentialData,
    _field,
    field_jacobian,
    potential_data,
)

SCAN_NODES = 2048
ROOT_CLUSTER = 1e-8
M2_STEP = 1e-5
SEGMENT_SAMPLES = (0.5, 0.1, 0.3, 0.7, 0.9)


@dataclass(frozen=True)
class ComponentGeometry:
    """A connected component of the projected intersection, in moment coordinates.

    ``chart`` is ``(p, r)`` for points, ``("p", value)`` or ``("r", value)``
    for segments (the other chart coordinate runs over [0, 1]) and ``None``
    for the whole polytope.
    """

    kind: str  # "point" | "segment" | "whole"
    points: tuple[tuple[float, float], ...]
    stratum: str
    chart: tuple | None = None

    @property
    def point(self) -> tuple[float, float]:
        """The point itself, or the chart midpoint of a segment."""
        if self.kind == "point":
            return self.points[0]
        return self.generic_points()[0]

    def chart_samples(self, fractions=SEGMENT_SAMPLES):
        if self.kind == "point":
            return [self.chart]
        if self.kind == "whole":
            return [(u, v) for u in (0.25, 0.5, 0.75) for v in (0.25, 0.5, 0.75)]
        which, value = self.chart
        if which == "p":
            return [(value, u) for u in fractions]
        return [(u, value) for u in fractions]

    def sample_chart(self, n: int = 5):
        if self.kind != "segment":
            return self.chart_samples()
        fr = tuple(np.linspace(0.0, 1.0, n)) if n > 1 else (0.5,)
        return self.chart_samples(fr)

    def generic_points(self):
        return [tuple(pt) for pt in self._moment_samples]

    @property
    def tangent(self) -> np.ndarray | None:
        if self.kind != "segment":
            return None
        d = np.subtract(self.points[1], self.points[0])
        return d / np.hypot(*d)

    def distance(self, X) -> float:
        X = np.asarray(X, dtype=float)
        if self.kind == "whole":
            return 0.0
        if self.kind == "point":
            return float(np.hypot(*(X - self.points[0])))
        A, B = (np.asarray(q) for q in self.points)
        d = B - A
        u = np.clip(np.dot(X - A, d) / np.dot(d, d), 0.0, 1.0)
        return float(np.hypot(*(X - A - u * d)))

    _moment_samples: tuple = field(default=(), compare=False, repr=False)


def _point(model, p, r) -> ComponentGeometry:
    X = moment_from_chart(model, p, r)
    return ComponentGeometry("point", (X,), boundary_stratum(model.polytope, X), (p, r))


def _segment(model, which, value) -> ComponentGeometry:
    if which == "p":
        ends = (moment_from_chart(model, value, 0.0), moment_from_chart(model, value, 1.0))
        samples = [moment_from_chart(model, value, u) for u in SEGMENT_SAMPLES]
    else:
        ends = (moment_from_chart(model, 0.0, value), moment_from_chart(model, 1.0, value))
        samples = [moment_from_chart(model, u, value) for u in SEGMENT_SAMPLES]
    mid = moment_from_chart(model, *((value, 0.5) if which == "p" else (0.5, value)))
    return ComponentGeometry(
        "segment",
        ends,
        boundary_stratum(model.polytope, mid),
        (which, value),
        tuple(samples),
    )


def _whole(model) -> ComponentGeometry:
    return ComponentGeometry(
        "whole",
        model.polytope.vertices,
        "interior",
        None,
        (moment_from_chart(model, 0.5, 0.5),),
    )


def _g(p, a, K, i1, k):
    pk = p**k
    return a * p + K * pk / (pk + (1.0 - p) ** k) - i1


def _dg(p, a, K, k):
    D = p**k + (1.0 - p) ** k
    return a + K * k * p ** (k - 1) * (1.0 - p) ** (k - 1) / (D * D)


def roots_on_unit_interval(a: float, K: float, i1: float, k: int) -> list[float]:
    """All roots p in [0, 1] of a p + K h(p) - i1, h(p) = p^k/(p^k+(1-p)^k).

    Sign-change scan on nodes p = s/(1+s) with s log-spaced over [1e-9, 1e9]
    plus the exact endpoints, bisection (Brent) inside each bracket, Newton
    polish, and a scan of g' for tangential roots missed by the sign test.
    """
    s = np.logspace(-9.0, 9.0, SCAN_NODES)
    nodes = np.concatenate(([0.0], s / (1.0 + s), [1.0]))
    vals = _g(nodes, a, K, i1, k)
    vals[np.abs(vals) <= 8e-15 * (abs(a) + abs(K) + abs(i1) + 1.0)] = 0.0
    f = lambda p: float(_g(p, a, K, i1, k))  # noqa: E731
    # a run of consecutive exact zeros is one flat root in floating point;
    # keep the endpoint if the run touches one, its middle otherwise
    found = []
    zero = np.concatenate(([False], vals == 0.0, [False])).astype(int)
    starts = np.nonzero(np.diff(zero) == 1)[0]
    stops = np.nonzero(np.diff(zero) == -1)[0]
    for lo, hi in zip(starts, stops):
        if lo == 0:
            found.append(0.0)
        elif hi == len(nodes):
            found.append(1.0)
        else:
            found.append(float(nodes[(lo + hi - 1) // 2]))
    sign = np.sign(vals)
    for j in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        found.append(brentq(f, nodes[j], nodes[j + 1], xtol=1e-16, rtol=1e-15))
    dvals = _dg(nodes, a, K, k)
    dsign = np.sign(dvals)
    for j in np.nonzero(dsign[:-1] * dsign[1:] < 0)[0]:
        df = lambda p: float(_dg(p, a, K, k))  # noqa: E731
        x = brentq(df, nodes[j], nodes[j + 1], xtol=1e-16, rtol=1e-15)
        if abs(f(x)) < 1e-12:
            found.append(x)
    polished = []
    for x in found:
        for _ in range(3):
            d = float(_dg(x, a, K, k))
            if d == 0.0 or f(x) == 0.0:
                break
            xn = x - f(x) / d
            if not (0.0 <= xn <= 1.0) or abs(f(xn)) >= abs(f(x)):
                break
            x = xn
        polished.append(x)
    polished.sort()
    out: list[float] = []
    for x in polished:
        if out and x - out[-1] < ROOT_CLUSTER:
            continue
        out.append(x)
    return out


def solve_components(model: HirzebruchModel, label, index) -> list[ComponentGeometry]:
    """Connected components of pi(L(0,0) ∩ L(a,b)) at index I inside P."""
    a, b = label
    i1, i2 = index
    k = model.k
    if b == 0:
        if i2 != 0:
            return []
        if a == 0:
            return [_whole(model)] if i1 == 0 else []
        p0 = i1 / a + 0.0
        if not 0.0 <= p0 <= 1.0:
            return []
        return [_segment(model, "p", p0)]
    r0 = i2 / b + 0.0
    if not 0.0 <= r0 <= 1.0:
        return []
    K = k * (b - i2)
    flat = (a + K == 0) if k == 1 else (a == 0 and K == 0)
    if flat:
        return [_segment(model, "r", r0)] if i1 == 0 else []
    return [_point(model, p, r0) for p in roots_on_unit_interval(a, K, i1, k)]


# --- degree and admissibility ----------------------------------------------------


@dataclass(frozen=True)
class LinearAnalysis:
    degree: int
    stable: tuple[tuple[float, float], ...]
    unstable: tuple[tuple[float, float], ...]
    eigenvalues: tuple[float, ...]


def _probe_stable(model, label, index, X, u) -> bool:
    """Nonlinear test along a direction whose eigenvalue is numerically zero.

    The direction is stable when the field points back towards X on every
    side of X that lies in P.
    """
    X = np.asarray(X, dtype=float)
    u = np.asarray(u, dtype=float)
    for delta in (1e-3, 1e-2, 5e-2):
        dots = []
        for sgn in (1.0, -1.0):
            Y = X + sgn * delta * u
            if min(model.polytope.slacks(Y)) < -1e-13:
                continue
            dots.append(float(np.dot(_field(model, label, index, Y), sgn * u)))
        if not dots:
            return False
        if all(abs(d) > 1e-13 for d in dots):
            return all(d < 0 for d in dots)
    return False


def linear_analysis(model, label, index, X, tangent=None) -> LinearAnalysis:
    """Count stable directions of the field at a zero X.

    With a segment ``tangent`` the eigenvalue along the segment must vanish
    and only the transverse direction is counted.
    """
    J = field_jacobian(model, label, index, X)
    w, V = np.linalg.eig(J)
    w = np.real(w)
    V = np.real(V)
    eps = 1e-7 * (float(np.max(np.abs(w))) + 1.0)
    order = [0, 1]
    if tangent is not None:
        cos = [abs(float(np.dot(V[:, j], tangent))) / float(np.hypot(*V[:, j])) for j in order]
        jt = int(np.argmax(cos))
        if abs(w[jt]) > eps:
            raise M1Violation(
                f"eigenvalue {w[jt]:.3e} along the component at {tuple(X)} is not zero",
                label,
                index,
            )
        order = [1 - jt]
    stable, unstable = [], []
    for j in order:
        u = V[:, j] / np.hypot(*V[:, j])
        if w[j] < -eps:
            is_stable = True
        elif w[j] > eps:
            is_stable = False
        else:
            is_stable = _probe_stable(model, label, index, X, u)
        (stable if is_stable else unstable).append((float(u[0]), float(u[1])))
    return LinearAnalysis(len(stable), tuple(stable), tuple(unstable), tuple(float(x) for x in w))


def degree_of(model: HirzebruchModel, label, index, component: ComponentGeometry) -> int:
    """Dimension of the stable manifold at a generic point of the component."""
    if component.kind == "whole":
        return 0
    if component.kind == "point":
        return linear_analysis(model, label, index, component.points[0]).degree
    degrees = {
        linear_analysis(model, label, index, X, component.tangent).degree
        for X in component.generic_points()
    }
    if len(degrees) != 1:
        raise M1Violation(f"degree is not constant along the segment: {sorted(degrees)}", label, index)
    return degrees.pop()


def m2_failure(model, label, index, component, degree) -> str | None:
    """None if (M2) holds, otherwise 'vertex' or 'M2' naming the failure."""
    if component.kind == "whole" or degree == 0:
        return None
    X = component.point
    stratum = boundary_stratum(model.polytope, X)
    if stratum == "interior":
        return None
    reason = "vertex" if stratum.startswith("V") else "M2"
    if degree >= 2:
        return reason
    la = linear_analysis(model, label, index, X, component.tangent)
    u = np.asarray(la.stable[0])
    for sgn in (1.0, -1.0):
        if not model.polytope.contains(np.asarray(X) + sgn * M2_STEP * u, BOUNDARY_TOL):
            return reason
    return None


def check_M2(model: HirzebruchModel, label, index, component, degree) -> bool:
    return m2_failure(model, label, index, component, degree) is None


# --- morphism spaces ------------------------------------------------------------


@dataclass(frozen=True)
class MorphismGenerator:
    source: LagrangianLabel
    target: LagrangianLabel
    index: MorphismIndex
    geometry: ComponentGeometry
    degree: int
    potential: PotentialData
    ordinal: int = 0  # position among components with the same index

    @property
    def label(self) -> LagrangianLabel:
        return self.target - self.source

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.index.i1, self.index.i2, self.ordinal)

    @property
    def is_identity(self) -> bool:
        return self.geometry.kind == "whole"


@dataclass(frozen=True)
class RejectedComponent:
    index: MorphismIndex
    geometry: ComponentGeometry
    degree: int | None
    reason: str  # "M1" | "M2" | "vertex"
    detail: str = ""


@dataclass(frozen=True)
class HomSpace:
    source: LagrangianLabel
    target: LagrangianLabel
    generators: tuple[MorphismGenerator, ...]
    rejected: tuple[RejectedComponent, ...] = ()

    @property
    def label(self) -> LagrangianLabel:
        return self.target - self.source

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def of_degree(self, d: int) -> list[MorphismGenerator]:
        return [g for g in self.generators if g.degree == d]

    def degree_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for g in self.generators:
            counts[g.degree] = counts.get(g.degree, 0) + 1
        return dict(sorted(counts.items()))

    def find(self, index) -> list[MorphismGenerator]:
        index = MorphismIndex(*index)
        return [g for g in self.generators if g.index == index]


def candidate_indices(k: int, label) -> list[MorphismIndex]:
    """Integer points that can solve the intersection equations for (a, b)."""
    a, b = label
    lo1 = min(0, a) + min(0, k * b)
    hi1 = max(0, a) + max(0, k * b)
    return [
        MorphismIndex(i1, i2)
        for i2 in range(min(0, b), max(0, b) + 1)
        for i1 in range(lo1, hi1 + 1)
    ]


@lru_cache(maxsize=4096)
def _classified(model: HirzebruchModel, a: int, b: int):
    label = LagrangianLabel(a, b)
    accepted, rejected = [], []
    for index in candidate_indices(model.k, label):
        comps = solve_components(model, label, index)
        if not comps:
            continue
        comps = sorted(comps, key=lambda c: (c.point[0], c.point[1]))
        pdata = None
        for n, comp in enumerate(comps):
            try:
                deg = degree_of(model, label, index, comp)
            except M1Violation as exc:
                rejected.append(RejectedComponent(index, comp, None, "M1", str(exc)))
                continue
            reason = m2_failure(model, label, index, comp, deg)
            if reason is not None:
                rejected.append(RejectedComponent(index, comp, deg, reason))
                continue
            if pdata is None:
                pdata = potential_data(model, label, index, comps)
            accepted.append((index, comp, deg, pdata, n))
    return tuple(accepted), tuple(rejected)


def hom_space(model: HirzebruchModel, L1, L2, strict: bool = True) -> HomSpace:
    """Graded generators of Mo(P)(L1, L2), computed through L2 - L1.

    With ``strict`` an M1 violation is raised; otherwise it is listed among
    the rejected components.
    """
    L1 = LagrangianLabel(*L1)
    L2 = LagrangianLabel(*L2)
    label = L2 - L1
    accepted, rejected = _classified(model, label.a, label.b)
    if strict:
        for rej in rejected:
            if rej.reason == "M1":
                raise M1Violation(rej.detail or "M1 violation", label, rej.index)
    gens = tuple(
        MorphismGenerator(L1, L2, index, comp, deg, pdata, n)
        for index, comp, deg, pdata, n in accepted
    )
    return HomSpace(L1, L2, gens, rejected)


__all__ = [
    "ComponentGeometry",
    "HomSpace",
    "LinearAnalysis",
    "MorphismGenerator",
    "RejectedComponent",
    "candidate_indices",
    "check_M2",
    "degree_of",
    "hom_space",
    "linear_analysis",
    "m2_failure",
    "roots_on_unit_interval",
    "solve_components",
]
