import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hirzebruch_hms import (
    BasePoint,
    HirzebruchModel,
    LagrangianLabel,
    MorphismIndex,
    NotInPolytope,
    UnboundedPotential,
    f_raw,
    gradient_field,
    moment_map,
    normalize,
    potential,
    section_map,
)
from hirzebruch_hms.geometry import moment_from_chart
from hirzebruch_hms.lagrangian import (
    f_chart,
    f_moment_gradient,
    f_on_polytope,
    field_jacobian,
    field_jacobian_analytic,
    is_bounded_below,
    minimize_on_square,
    potential_data,
)

from conftest import FROZEN

ks = st.integers(1, 4)
labels = st.tuples(st.integers(-6, 6), st.integers(-3, 3))
indices = st.tuples(st.integers(-6, 6), st.integers(-3, 3))
base = st.floats(-3.0, 3.0)
unit = st.floats(0.0, 1.0)


def test_label_arithmetic():
    L = LagrangianLabel(2, 1) - LagrangianLabel(3, 1)
    assert L == (-1, 0) and -L == (1, 0)
    assert MorphismIndex(1, 0) + MorphismIndex(2, 1) == (3, 1)


@settings(max_examples=80, deadline=None)
@given(ks, labels, indices, base, base)
def test_df_identity(k, label, index, x1, x2):
    # df_I/dx_j = (y_j - 2 pi i_j) / (2 pi)
    model = HirzebruchModel(k)
    y = section_map(model, label, BasePoint(x1, x2))
    h = 1e-6
    d1 = (f_raw(model, label, index, BasePoint(x1 + h, x2)) - f_raw(model, label, index, BasePoint(x1 - h, x2))) / (2 * h)
    d2 = (f_raw(model, label, index, BasePoint(x1, x2 + h)) - f_raw(model, label, index, BasePoint(x1, x2 - h))) / (2 * h)
    expect = ((y[0] - 2 * math.pi * index[0]) / (2 * math.pi), (y[1] - 2 * math.pi * index[1]) / (2 * math.pi))
    assert (d1, d2) == pytest.approx(expect, abs=1e-6)


@settings(max_examples=80, deadline=None)
@given(ks, labels, base, base)
def test_section_is_differential_of_potential(k, label, x1, x2):
    model = HirzebruchModel(k)
    h = 1e-6
    d1 = (potential(model, label, BasePoint(x1 + h, x2)) - potential(model, label, BasePoint(x1 - h, x2))) / (2 * h)
    assert d1 == pytest.approx(section_map(model, label, BasePoint(x1, x2))[0], abs=1e-5)


@settings(max_examples=80, deadline=None)
@given(ks, labels, indices, base, base)
def test_chart_form_matches_base_form(k, label, index, x1, x2):
    model = HirzebruchModel(k)
    pt = BasePoint(x1, x2)
    X = moment_map(model, pt)
    diff = f_raw(model, label, index, pt) - f_on_polytope(model, label, index, X)
    # the two forms differ by a constant only: compare with the origin
    ref = f_raw(model, label, index, BasePoint(0.0, 0.0)) - f_on_polytope(
        model, label, index, moment_map(model, BasePoint(0.0, 0.0))
    )
    assert diff == pytest.approx(ref, abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(ks, labels, indices, unit, unit)
def test_flow_increases_potential(k, label, index, p, r):
    model = HirzebruchModel(k)
    p, r = 0.02 + 0.96 * p, 0.02 + 0.96 * r
    X = moment_from_chart(model, p, r)
    F = np.asarray(gradient_field(model, label, index, X))
    assert float(np.dot(f_moment_gradient(model, label, index, X), F)) >= -1e-9


@settings(max_examples=60, deadline=None)
@given(ks, labels, indices, unit, unit)
def test_jacobian_matches_closed_form(k, label, index, p, r):
    model = HirzebruchModel(k)
    X = moment_from_chart(model, 0.05 + 0.9 * p, 0.05 + 0.9 * r)
    J = field_jacobian(model, label, index, X)
    Ja = field_jacobian_analytic(model, label, index, X)
    assert np.allclose(J, Ja, rtol=1e-5, atol=1e-5 * (1 + np.max(np.abs(Ja))))


def test_jacobian_at_vertices_is_finite(model):
    for v in model.polytope.vertices:
        J = field_jacobian(model, (-1, 1), (0, 0), v)
        assert np.all(np.isfinite(J))


def test_field_outside_polytope_raises():
    with pytest.raises(NotInPolytope):
        gradient_field(HirzebruchModel(1), (1, 1), (0, 0), (5.0, 5.0))


def test_bounded_below_criterion():
    assert is_bounded_below(2, (1, 1), (0, 0))
    assert not is_bounded_below(2, (-7, 3), (0, 0))
    with pytest.raises(UnboundedPotential):
        normalize(HirzebruchModel(2), (-7, 3), (0, 0))
    data = potential_data(HirzebruchModel(2), (-7, 3), (0, 0))
    assert not data.normalized and data.const == 0.0


@pytest.mark.parametrize("case", FROZEN["normalization"], ids=lambda c: f"k{c['k']}-{c['label']}-{c['index']}")
def test_normalization_constant(case):
    model = HirzebruchModel(case["k"])
    data = normalize(model, case["label"], case["index"])
    assert data.const == pytest.approx(case["min"], abs=1e-9)
    assert data(model, data.argmin) == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(ks, st.integers(0, 4), st.integers(0, 2), st.data())
def test_normalized_potential_is_nonnegative(k, a, b, data):
    i2 = data.draw(st.integers(0, b))
    i1 = data.draw(st.integers(0, a + k * (b - i2)))
    model = HirzebruchModel(k)
    pd = normalize(model, (a, b), (i1, i2))
    g = np.linspace(0.0, 1.0, 41)
    P, R = np.meshgrid(g, g)
    assert np.min(pd.chart_value(P, R)) >= -1e-9


def test_minimize_on_square_finds_corner_and_interior():
    val, p, r = minimize_on_square(lambda p, r: (p - 0.3) ** 2 + (r - 0.7) ** 2)
    assert (p, r) == pytest.approx((0.3, 0.7), abs=1e-7) and val < 1e-12
    val, p, r = minimize_on_square(lambda p, r: p + r)
    assert (val, p, r) == (0.0, 0.0, 0.0)


def test_chart_potential_is_vectorized():
    out = f_chart(2, (1, 1), (0, 0), np.array([0.1, 0.5]), np.array([0.2, 0.3]))
    assert out.shape == (2,)
