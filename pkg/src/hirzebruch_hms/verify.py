"""Sheaf-side oracle and the end-to-end comparison with the Morse side."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

from .ainfinity import m1, m2
from .errors import HMSError
from .geometry import HirzebruchModel
from .lagrangian import (
    LagrangianLabel,
    MorphismIndex,
    f_chart,
    minimize_on_square,
    normalize,
)
from .morse import hom_space, solve_components

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class ExceptionalCollection:
    c: int

    def __post_init__(self):
        if self.c < 0:
            raise ValueError(f"c must be nonnegative, got {self.c}")

    @property
    def members(self) -> tuple[LagrangianLabel, ...]:
        c = self.c
        return (
            LagrangianLabel(0, 0),
            LagrangianLabel(1, 0),
            LagrangianLabel(c, 1),
            LagrangianLabel(c + 1, 1),
        )

    def composable_triples(self):
        return list(combinations(range(4), 3))


def sheaf_basis(model: HirzebruchModel, a: int, b: int) -> list[MorphismIndex]:
    """Exponents (i1, i2) of the monomial sections u^i1 v^i2 of O(a, b).

    0 <= i2 <= b and 0 <= i1 <= a + k (b - i2); for (a, b) = (-1, 1) this gives
    the k indices (i1, 0), 0 <= i1 <= k - 1.
    """
    return [
        MorphismIndex(i1, i2)
        for i2 in range(0, b + 1)
        for i1 in range(0, a + model.k * (b - i2) + 1)
    ]


def _as_pair(item):
    if len(item) == 3:
        a, b, index = item
        return LagrangianLabel(a, b), MorphismIndex(*index)
    label, index = item
    return LagrangianLabel(*label), MorphismIndex(*index)


def product_coefficient(model: HirzebruchModel, first, second) -> float:
    """e^{-(f_I(v) + f_J(v))} at the minimizer v of f_I + f_J over P.

    ``first`` and ``second`` are (a, b, I) or (label, I); both potentials are
    normalized.  The minimizer is searched independently of any intersection
    data.
    """
    l1, i1 = _as_pair(first)
    l2, i2 = _as_pair(second)
    d1 = normalize(model, l1, i1)
    d2 = normalize(model, l2, i2)
    k = model.k

    def total(p, r):
        return f_chart(k, l1, i1, p, r) - d1.const + f_chart(k, l2, i2, p, r) - d2.const

    value, _, _ = minimize_on_square(total)
    return math.exp(-value)


@dataclass(frozen=True)
class DimensionRow:
    source: LagrangianLabel
    target: LagrangianLabel
    morse: int
    sheaf: int
    degree_counts: dict

    @property
    def ok(self) -> bool:
        return self.morse == self.sheaf and sum(self.degree_counts.values()) == self.morse


@dataclass(frozen=True)
class CoefficientRow:
    triple: tuple[int, int, int]
    first: MorphismIndex
    second: MorphismIndex
    target: MorphismIndex
    morse: float
    sheaf: float

    @property
    def residual(self) -> float:
        return abs(self.morse - self.sheaf)


@dataclass(frozen=True)
class VerificationReport:
    k: int
    c: int
    tol: float
    dimensions: tuple[DimensionRow, ...]
    coefficients: tuple[CoefficientRow, ...]
    m1_zero: dict = field(default_factory=dict)
    errors: tuple[str, ...] = ()

    @property
    def worst_residual(self) -> float:
        return max((row.residual for row in self.coefficients), default=0.0)

    @property
    def passed(self) -> bool:
        return (
            not self.errors
            and all(row.ok for row in self.dimensions)
            and all(row.residual < self.tol for row in self.coefficients)
            and all(self.m1_zero.values())
        )

    def failures(self) -> list[str]:
        out = list(self.errors)
        for row in self.dimensions:
            if not row.ok:
                out.append(
                    f"dimension {tuple(row.source)} -> {tuple(row.target)}: "
                    f"morse {row.morse} ({row.degree_counts}) vs sheaf {row.sheaf}"
                )
        for row in self.coefficients:
            if not row.residual < self.tol:
                out.append(
                    f"coefficient {row.triple} {tuple(row.first)}+{tuple(row.second)}: "
                    f"residual {row.residual:.3e}"
                )
        for pair, zero in self.m1_zero.items():
            if not zero:
                out.append(f"m1 is not zero on {pair}")
        return out


def verify_hms(model: HirzebruchModel, c: int, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Compare Mo(P) on the exceptional collection with the sheaf side.

    Mismatches are collected in the report, never raised.
    """
    E = ExceptionalCollection(c).members
    dims, coeffs, m1_flags, errors = [], [], {}, []
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            L1, L2 = E[i], E[j]
            diff = L2 - L1
            try:
                hom = hom_space(model, L1, L2)
            except HMSError as exc:
                errors.append(f"hom {tuple(L1)} -> {tuple(L2)}: {exc}")
                continue
            counts = hom.degree_counts()
            dims.append(
                DimensionRow(L1, L2, counts.get(0, 0), len(sheaf_basis(model, *diff)), counts)
            )
            try:
                m1_flags[(tuple(L1), tuple(L2))] = m1(model, L1, L2).is_zero
            except HMSError as exc:
                errors.append(f"m1 {tuple(L1)} -> {tuple(L2)}: {exc}")

    for t in ExceptionalCollection(c).composable_triples():
        L1, L2, L3 = (E[n] for n in t)
        for V in hom_space(model, L1, L2).of_degree(0):
            for W in hom_space(model, L2, L3).of_degree(0):
                try:
                    comp = m2(model, L1, L2, L3, V, W)
                    sheaf = product_coefficient(model, (V.label, V.index), (W.label, W.index))
                except HMSError as exc:
                    errors.append(f"m2 {t} {tuple(V.index)}+{tuple(W.index)}: {exc}")
                    continue
                coeffs.append(
                    CoefficientRow(t, V.index, W.index, comp.target.index, comp.coefficient, sheaf)
                )
    return VerificationReport(model.k, c, tol, tuple(dims), tuple(coeffs), m1_flags, tuple(errors))


@dataclass(frozen=True)
class NonMinimalityReport:
    components: tuple[tuple[float, float], ...]
    expected_x1: tuple[float, ...]
    verdicts: tuple[str, ...]  # per component: "0", "1" or the failing condition
    coefficient: float
    expected_coefficient: float
    area: float
    integrated_area: float

    @property
    def relative_error(self) -> float:
        return abs(self.coefficient - self.expected_coefficient) / self.expected_coefficient

    @property
    def passed(self) -> bool:
        pos_ok = all(
            abs(X[0] - e) < 1e-9 and abs(X[1]) < 1e-9
            for X, e in zip(self.components, self.expected_x1)
        )
        return (
            pos_ok
            and len(self.components) == len(self.expected_x1)
            and self.verdicts == ("vertex", "0", "1")
            and self.relative_error < 1e-9
            and abs(self.area - self.integrated_area) < 1e-7
        )


def closed_form_area() -> float:
    s = math.sqrt(2.0)
    return 3 * math.pi * math.log((12 + 6 * s) / (12 - 6 * s)) - 7 * math.pi * math.log(
        (4 + s) / (4 - s)
    )


def nonminimality_demo(model: HirzebruchModel | None = None) -> NonMinimalityReport:
    """The k = 2 space Mo(P)(L(0,0), L(-7,3)) at I = (0,0), whose m1 is nonzero."""
    model = model or HirzebruchModel(2)
    if model.k != 2:
        raise ValueError("the non-minimality example lives on k = 2")
    label, index = LagrangianLabel(-7, 3), MorphismIndex(0, 0)
    comps = sorted(solve_components(model, label, index), key=lambda g: g.point[0])
    hom = hom_space(model, (0, 0), label)
    verdicts = []
    for comp in comps:
        gen = [g for g in hom.find(index) if g.geometry == comp]
        if gen:
            verdicts.append(str(gen[0].degree))
        else:
            rej = [r for r in hom.rejected if r.index == index and r.geometry == comp]
            verdicts.append(rej[0].reason if rej else "missing")
    result = m1(model, (0, 0), label)
    trees = [t for t in result.trees if t.arrival is not None and t.starts[0][0] > 1e-9]
    trees = [t for t in trees if any(abs(t.starts[0][0] - c.point[0]) < 1e-12 for c in comps)]
    coefficient = sum(math.exp(-t.area) for t in trees)
    area = trees[0].area if trees else float("nan")
    integrated = trees[0].integrated_area if trees else float("nan")
    s = math.sqrt(2.0)
    expected = (0.0, (100 - 10 * s) / 21, (100 + 10 * s) / 21)
    return NonMinimalityReport(
        tuple(c.point for c in comps),
        expected,
        tuple(verdicts),
        coefficient,
        math.exp(-closed_form_area()),
        area,
        integrated,
    )


__all__ = [
    "CoefficientRow",
    "DimensionRow",
    "ExceptionalCollection",
    "NonMinimalityReport",
    "VerificationReport",
    "closed_form_area",
    "nonminimality_demo",
    "product_coefficient",
    "sheaf_basis",
    "verify_hms",
]
