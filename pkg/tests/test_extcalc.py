import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcontact_lab.extcalc import (
    FormField,
    IllConditionedCoframe,
    Patch,
    alternate,
    assemble_2form,
    constant_form,
    coordinate_form,
    d,
    expand_2form,
    function_form,
    pullback,
    wedge,
)

D = 4
seeds = st.integers(0, 2**32 - 1)


def _poly_coeffs(rng, shape):
    return [rng.normal(size=shape + (D,) * k) for k in range(4)]


def _eval_poly(c, x):
    """Cubic polynomial in x with array-valued coefficients; HD2-safe."""
    out = c[0].astype(object)
    for i in range(D):
        out = out + c[1][..., i] * x[i]
        for j in range(D):
            out = out + c[2][..., i, j] * (x[i] * x[j])
            for k in range(D):
                out = out + c[3][..., i, j, k] * (x[i] * x[j] * x[k])
    return out


def random_form(rng, degree, vshape=()):
    c = _poly_coeffs(rng, vshape + (D,) * degree)
    vdim = len(vshape)
    return FormField(degree, D, lambda x: alternate(_eval_poly(c, np.asarray(x, dtype=object)), vdim, degree)
                     if degree else _eval_poly(c, np.asarray(x, dtype=object)), vshape)


def point(rng):
    return rng.uniform(-0.7, 0.7, size=D)


def test_patch_validation():
    P = Patch(("x", "y"), [[0, 1], [-1, 1]])
    assert P.dim == 2
    with pytest.raises(ValueError):
        Patch(("x", "x"), [[0, 1], [0, 1]])
    with pytest.raises(ValueError):
        Patch(("x",), [[1, 0]])


def test_d_of_x0_dx1():
    x0 = function_form(lambda x: x[0], 2)
    F = d(x0 * coordinate_form(2, 1)).at([0.3, -0.2])
    np.testing.assert_array_equal(F, [[0, 1], [-1, 0]])


def test_wedge_small_cases():
    dx0, dx1 = coordinate_form(3, 0), coordinate_form(3, 1)
    assert not wedge(dx0, dx0).at(np.zeros(3)).any()
    np.testing.assert_array_equal(wedge(dx0 + dx1, dx1).at(np.zeros(3)), wedge(dx0, dx1).at(np.zeros(3)))
    W = wedge(dx0, dx1).at(np.zeros(3))
    assert (W[0, 1], W[1, 0]) == (1.0, -1.0)


def test_wedge_rejects_bad_inputs():
    with pytest.raises(ValueError):
        wedge(coordinate_form(2, 0), coordinate_form(3, 0))
    with pytest.raises(ValueError):
        coordinate_form(2, 0) + function_form(lambda x: x[0], 2)


def test_contact_form_on_flat_tangent_patch():
    # theta = delta_ij y^i dx^j on (x, y): d theta = delta_ij dy^i ^ dx^j
    n = 3
    theta = FormField(1, 2 * n, lambda X: np.concatenate([np.asarray(X)[n:], np.zeros(n, dtype=object)]))
    F = d(theta).at(np.arange(2 * n) * 0.1)
    expect = np.zeros((2 * n, 2 * n))
    for i in range(n):
        expect[n + i, i], expect[i, n + i] = 1.0, -1.0
    np.testing.assert_array_equal(F, expect)


@settings(max_examples=10)
@given(seeds)
def test_d_squared_of_function_vanishes(seed):
    rng = np.random.default_rng(seed)
    f = random_form(rng, 0)
    dd = d(d(f))
    assert max(np.max(np.abs(dd.at(point(rng)))) for _ in range(5)) <= 1e-12


@settings(max_examples=10)
@given(seeds, st.integers(1, 2))
def test_d_squared_of_forms_vanishes(seed, k):
    rng = np.random.default_rng(seed)
    a = random_form(rng, k, vshape=(2,))
    assert np.max(np.abs(d(d(a)).at(point(rng)))) <= 1e-11


@settings(max_examples=10)
@given(seeds, st.sampled_from([(0, 1), (1, 1), (0, 2), (1, 2)]))
def test_leibniz_rule(seed, degrees):
    rng = np.random.default_rng(seed)
    k, l = degrees
    a, b = random_form(rng, k), random_form(rng, l)
    x = point(rng)
    lhs = d(wedge(a, b)).at(x)
    rhs = wedge(d(a), b).at(x) + (-1) ** k * wedge(a, d(b)).at(x)
    assert np.max(np.abs(lhs - rhs)) <= 1e-11 * max(1.0, np.max(np.abs(lhs)))


@settings(max_examples=10)
@given(seeds)
def test_wedge_graded_commutativity_and_associativity(seed):
    rng = np.random.default_rng(seed)
    a, b, c = random_form(rng, 1), random_form(rng, 2), random_form(rng, 1)
    x = point(rng)
    np.testing.assert_allclose(wedge(a, b).at(x), wedge(b, a).at(x), atol=1e-10)
    np.testing.assert_allclose(wedge(a, c).at(x), -wedge(c, a).at(x), atol=1e-10)
    np.testing.assert_allclose(wedge(c, c).at(x), 0.0, atol=1e-12)
    np.testing.assert_allclose(wedge(wedge(a, c), b).at(x), wedge(a, wedge(c, b)).at(x), atol=1e-10)


def test_matrix_valued_wedge_spec(rng):
    A = random_form(rng, 1, vshape=(2, 2))
    v = random_form(rng, 1, vshape=(2,))
    x = point(rng)
    W = wedge(A, v, "ij,j->i").at(x)
    Aa, va = A.at(x), v.at(x)
    expect = np.einsum("ijm,jn->imn", Aa, va)
    np.testing.assert_allclose(W, expect - np.swapaxes(expect, -1, -2), atol=1e-12)


@settings(max_examples=10)
@given(seeds)
def test_pullback_commutes_with_d_and_wedge(seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(D, 3)) * 0.3
    q = rng.normal(size=D) * 0.2

    def phi(y):
        y = np.asarray(y, dtype=object)
        lin = M @ y
        return np.array([lin[i] + q[i] * y[i % 3] * y[(i + 1) % 3] for i in range(D)], dtype=object)

    a, b = random_form(rng, 1), random_form(rng, 1)
    y = rng.uniform(-0.5, 0.5, size=3)
    np.testing.assert_allclose(d(pullback(phi, 3, a)).at(y), pullback(phi, 3, d(a)).at(y), atol=1e-11)
    np.testing.assert_allclose(pullback(phi, 3, wedge(a, b)).at(y),
                               wedge(pullback(phi, 3, a), pullback(phi, 3, b)).at(y), atol=1e-11)


def test_expand_coframe_wedge():
    rng = np.random.default_rng(3)
    Th = rng.normal(size=(D, D))
    t0, t1 = constant_form(Th[0], 1, D), constant_form(Th[1], 1, D)
    c = expand_2form(wedge(t0, t1).at(np.zeros(D)), Th)
    expect = np.zeros((D, D))
    expect[0, 1], expect[1, 0] = 1.0, -1.0
    np.testing.assert_allclose(c, expect, atol=1e-12)


@given(seeds)
def test_assemble_expand_round_trip(seed):
    rng = np.random.default_rng(seed)
    Th = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D)) + 3 * np.eye(D)
    c = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
    c = c - c.T
    back = expand_2form(assemble_2form(c, Th), Th)
    assert np.max(np.abs(back - c)) <= 1e-12 * max(1.0, np.linalg.cond(Th))


def test_ill_conditioned_coframe_raises():
    Th = np.eye(3)
    Th[2] = Th[1] * (1 + 1e-12)
    Th[2, 2] = 1e-13
    with pytest.raises(IllConditionedCoframe):
        expand_2form(np.zeros((3, 3)), Th)


def test_top_degree_derivative_is_zero():
    top = constant_form(np.array([[0.0, 1.0], [-1.0, 0.0]]), 2, 2)
    assert d(top).degree == 2
    assert not d(top).at([0.1, 0.2]).any()
