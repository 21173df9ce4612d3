import time

import numpy as np
import pytest

from lcontact_lab import liemodel
from lcontact_lab.liemodel import QuatParams, SplitParams, so_split_element, so_star_element
from lcontact_lab.quatalg import symmetry_check

FAMILIES = [("split", 1, 0), ("split", 2, 1), ("split", 3, 2), ("quat", 1, None), ("quat", 2, None)]


def _zero_split(n):
    return SplitParams(0.0, 0.0, 0j, 0j, np.zeros(n), np.zeros(n), np.zeros((n, n)))


def _zero_quat(p):
    return QuatParams(0.0, 0.0, 0j, 0j, np.zeros(2 * p), np.zeros(2 * p), np.zeros((2 * p, 2 * p)))


def test_zero_params_give_zero_matrix():
    assert not so_split_element(_zero_split(2), 1, 1).any()
    assert not so_star_element(_zero_quat(1), 1).any()


def test_eta0_placement():
    P = _zero_split(1)
    P.eta0 = 1.0
    X = so_split_element(P, 1, 0)
    d = X.shape[0]
    expect = np.zeros((d, d), dtype=complex)
    expect[d - 2, 0] = 1j   # row nu', col nu
    expect[d - 1, 1] = -1j  # row K nu', col K nu
    np.testing.assert_array_equal(X, expect)


def test_kappa_placement_quaternionic():
    P = _zero_quat(1)
    P.kappa = 1.0 + 0j
    X = so_star_element(P, 1)
    d = X.shape[0]
    expect = np.zeros((d, d), dtype=complex)
    expect[1, 0] = 1           # row K nu, col nu
    expect[0, 1] = -1          # row nu, col K nu: -conj(kappa)
    expect[d - 2, d - 1] = 1   # conj(kappa)
    expect[d - 1, d - 2] = -1  # -kappa
    np.testing.assert_array_equal(X, expect)


def test_constraints_are_enforced():
    P = _zero_split(2)
    P.gamma = np.array([[0.0, 1.0], [1.0, 0.0]])  # not eps-skew for eps = (1, 1)
    with pytest.raises(liemodel.ConstraintError):
        so_split_element(P, 2, 0)
    Q = _zero_quat(1)
    Q.xi = np.array([[1.0, 0.0], [0.0, 0.0]])  # real diagonal is not anti-Hermitian
    with pytest.raises(liemodel.ConstraintError):
        so_star_element(Q, 1)


@pytest.mark.parametrize("family,p,q", FAMILIES)
def test_dimension_count(family, p, q):
    m = liemodel.make_model(family, p, q)
    N = m.n + 4
    assert m.dim == N * (N - 1) // 2
    assert np.linalg.matrix_rank(m.realized()) == m.dim


@pytest.mark.parametrize("family,p,q", FAMILIES)
def test_membership_of_random_elements(family, p, q, rng):
    m = liemodel.make_model(family, p, q)
    P = m.forms[1]
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        X = m.matrix(rng.normal(size=m.dim))
        worst = max(worst, *symmetry_check(X, P))
    assert worst <= 1e-12
    assert time.perf_counter() - t0 < 2.0


@pytest.mark.parametrize("family,p,q", FAMILIES[:2] + FAMILIES[3:])
def test_bracket_closure(family, p, q, rng):
    m = liemodel.make_model(family, p, q)
    for _ in range(200):
        X, Y = m.matrix(rng.normal(size=m.dim)), m.matrix(rng.normal(size=m.dim))
        Z = X @ Y - Y @ X
        v = m.decompose(Z)
        assert np.max(np.abs(m.matrix(v) - Z)) <= 1e-12 * max(1.0, np.max(np.abs(Z)))


def test_matrix_outside_span_is_rejected():
    m = liemodel.make_model("split", 1, 0)
    with pytest.raises(liemodel.DecompositionError):
        m.decompose(np.eye(5))


@pytest.mark.parametrize("family,p,q", FAMILIES)
def test_structure_constants(family, p, q):
    sc = liemodel.structure_constants(family, p, q)
    assert np.array_equal(sc.c, -np.swapaxes(sc.c, 1, 2))
    assert liemodel.jacobi_residual(sc) <= 1e-10


def test_eta0_line_from_brackets():
    res = liemodel.mc_equation_residuals("split", 1, 0)
    assert res["d eta0"] <= 1e-12


@pytest.mark.parametrize("family,p,q", FAMILIES)
def test_completed_equations_reproduce(family, p, q):
    assert liemodel.mc_residual(family, p, q, completed=True) <= 1e-12


def test_quaternionic_equations_as_printed():
    assert liemodel.mc_residual("quat", 2) <= 1e-12


@pytest.mark.parametrize("p,q", [(1, 0), (2, 1), (3, 2)])
def test_printed_split_discrepancy_is_confined(p, q):
    res = liemodel.mc_equation_residuals("split", p, q)
    bad = {k for k, v in res.items() if v > 1e-12}
    expect = {"d zeta0"} | ({"d gamma"} if p + q >= 2 else set())
    assert bad == expect
    assert res["d zeta0"] == pytest.approx(4.0)
    if p + q >= 2:
        assert res["d gamma"] == pytest.approx(2.0)


@pytest.mark.parametrize("family,p,q,eps", [("split", 2, 0, 1), ("split", 1, 1, 1), ("quat", 1, None, -1), ("quat", 2, None, -1)])
def test_kappa_conj_eta_block(family, p, q, eps):
    A = liemodel.adk_block(family, p, q)
    n = A.shape[0]
    if family == "split":
        # d eta^i contains kappa ^ conj eta^i
        np.testing.assert_allclose(A, np.eye(n), atol=1e-12)
    else:
        # d eta^i contains -kappa ^ conj eta^(p+i), d eta^(p+i) contains kappa ^ conj eta^i
        k = n // 2
        J = np.block([[np.zeros((k, k)), -np.eye(k)], [np.eye(k), np.zeros((k, k))]])
        np.testing.assert_allclose(A, J, atol=1e-12)
    np.testing.assert_allclose(A @ A.conj(), eps * np.eye(n), atol=1e-12)
