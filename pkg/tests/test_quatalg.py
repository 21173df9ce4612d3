import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lcontact_lab import liemodel
from lcontact_lab.quatalg import (
    AlgebraElement,
    DegenerateLineError,
    EpsQuatStructure,
    in_line,
    pauli,
    quat_forms,
    quaternionic_line,
    split_forms,
    symmetry_check,
)

coef = st.floats(-2, 2, allow_nan=False)
cplx = st.builds(complex, coef, coef)
eps_s = st.sampled_from([1, -1])


def test_pauli_matrices():
    np.testing.assert_array_equal(pauli(1), [[0, 1], [1, 0]])
    np.testing.assert_array_equal(pauli(0), np.eye(2))
    np.testing.assert_array_equal(pauli(2) @ pauli(2), np.eye(2))
    with pytest.raises(IndexError):
        pauli(4)


@given(cplx, cplx, eps_s)
def test_identity_element(w, z, eps):
    x = AlgebraElement(w, z, eps)
    assert (AlgebraElement(1, 0, eps) * x) == x


def test_unit_squares():
    assert AlgebraElement(0, 1, 1) * AlgebraElement(0, 1, 1) == AlgebraElement(1, 0, 1)
    assert AlgebraElement(0, 1, -1) * AlgebraElement(0, 1, -1) == AlgebraElement(-1, 0, -1)


@given(cplx, cplx, cplx, cplx, eps_s)
def test_product_closes_in_algebra(w1, z1, w2, z2, eps):
    a, b = AlgebraElement(w1, z1, eps), AlgebraElement(w2, z2, eps)
    c = a * b
    np.testing.assert_allclose(c.matrix(), a.matrix() @ b.matrix(), atol=1e-12)


def test_mixed_algebras_rejected():
    with pytest.raises(ValueError):
        AlgebraElement(1, 0, 1) * AlgebraElement(1, 0, -1)
    with pytest.raises(ValueError):
        AlgebraElement(1, 0, 2)


def test_split_line_of_first_basis_vector():
    S, _ = split_forms(1, 0)
    v = np.eye(S.dim)[0]
    B = quaternionic_line(v, S)
    np.testing.assert_array_equal(B[:, 0], np.eye(S.dim)[0])
    np.testing.assert_array_equal(B[:, 1], np.eye(S.dim)[1])


def test_fixed_vector_of_split_structure_is_degenerate():
    S, _ = split_forms(1, 0)
    v = np.eye(S.dim)[0] + np.eye(S.dim)[1]  # K v = v
    with pytest.raises(DegenerateLineError):
        quaternionic_line(v, S)


def test_quaternionic_line_membership(rng):
    S, _ = quat_forms(1)
    assert S.dim == 6
    v = rng.normal(size=6) + 1j * rng.normal(size=6)
    B = quaternionic_line(v, S)
    for _ in range(20):
        w, z = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        # right multiplication by w + z j acts as w v + z (K v) on the span
        assert in_line(w * v + z * S.apply(v), B)
        assert in_line(w * B[:, 0] + z * B[:, 1], B)
    assert not in_line(rng.normal(size=6) + 1j * rng.normal(size=6), B)


@pytest.mark.parametrize("eps", [1, -1])
def test_structure_squares_to_eps(eps):
    S, _ = split_forms(2, 1) if eps == 1 else quat_forms(2)
    np.testing.assert_array_equal(S.K @ S.K, eps * np.eye(S.dim))
    with pytest.raises(ValueError):
        EpsQuatStructure(np.eye(3), -1)


@pytest.mark.parametrize("forms", [split_forms(1, 0), split_forms(2, 1), quat_forms(1), quat_forms(2)])
def test_hermitian_identity(forms, rng):
    S, P = forms
    for _ in range(20):
        v1 = rng.normal(size=S.dim) + 1j * rng.normal(size=S.dim)
        v2 = rng.normal(size=S.dim) + 1j * rng.normal(size=S.dim)
        lhs = P.hform(S.apply(v1), S.apply(v2))
        assert abs(lhs - S.eps * np.conj(P.hform(v1, v2))) <= 1e-12 * max(1, abs(lhs))


def test_symmetry_check_trivial_cases():
    _, P = split_forms(1, 0)
    d = P.b.shape[0]
    assert symmetry_check(np.zeros((d, d)), P) == (0.0, 0.0)
    rb, rh = symmetry_check(np.eye(d), P)
    assert rb == pytest.approx(2 * np.linalg.norm(P.b))
    assert rh == pytest.approx(2 * np.linalg.norm(P.h))


def test_split_element_satisfies_both_forms(rng):
    model = liemodel.split_model(2, 1)
    for _ in range(10):
        X = model.matrix(rng.normal(size=model.dim))
        rb, rh = symmetry_check(X, model.forms[1])
        assert rb <= 1e-12 and rh <= 1e-12
