import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lcontact_lab import futuretube as ft

ms = st.integers(2, 5)
seeds = st.integers(0, 2**31)
params = st.builds(complex, st.floats(0.2, 3.0), st.floats(-2.0, 2.0))


def test_rho_direct_values():
    z = np.array([1, 5j])
    assert ft.rho(z) == 2.0
    assert not ft.is_future(z)
    assert ft.rho([1, 1]) == 0.0
    assert ft.is_future([1, 1])


def test_ambient_levi():
    np.testing.assert_array_equal(ft.ambient_levi(2), np.diag([1.0, 1.0, -1.0]))
    ev = np.linalg.eigvalsh(ft.ambient_levi(4))
    assert (np.sum(ev > 0), np.sum(ev < 0)) == (4, 1)


def test_leaf_inclusion_basepoint():
    z = ft.leaf_inclusion(ft.LeafCoord(np.zeros(2), np.array([1.0, 0.0])))
    np.testing.assert_array_equal(z, [1, 0, 1])
    assert ft.rho(z) == 0.0


def test_leaf_inclusion_lands_on_surface(rng):
    for _ in range(1000):
        z = ft.leaf_inclusion(ft.sample_leaf_coord(rng, 3))
        assert abs(ft.rho(z)) <= 1e-12 and ft.is_future(z)


@given(ms, seeds)
def test_null_field_is_tangent_and_levi_null(m, seed):
    z, _ = ft.sample_surface(np.random.default_rng(seed), m)
    X = ft.null_field(z)
    assert abs(ft.d_rho(z) @ X) <= 1e-12
    assert abs(X @ ft.ambient_levi(m) @ X.conj()) <= 1e-12


def test_action_identity_and_doubling(rng):
    z, _ = ft.sample_surface(rng, 3)
    np.testing.assert_array_equal(ft.leaf_action(z, 1), z)
    z2 = ft.leaf_action(z, 2)
    np.testing.assert_array_equal(z2.real, 2 * z.real)
    np.testing.assert_array_equal(z2.imag, z.imag)
    assert abs(ft.rho(z2)) <= 1e-12


@given(ms, seeds, params, params)
def test_action_group_law(m, seed, c1, c2):
    z, _ = ft.sample_surface(np.random.default_rng(seed), m)
    lhs = ft.leaf_action(ft.leaf_action(z, c2), c1)
    rhs = ft.leaf_action(z, ft.compose_parameters(c1, c2))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12
    assert abs(ft.rho(lhs)) <= 1e-11


def test_leaf_coordinates_basepoint():
    lc = ft.leaf_coordinates([1, 0, 1])
    np.testing.assert_array_equal(lc.t, [0, 0])
    np.testing.assert_array_equal(lc.u, [1, 0])
    assert lc.c == 1


def test_leaf_coordinates_recover_parameter(rng):
    lc = ft.sample_leaf_coord(rng, 3)
    out = ft.leaf_coordinates(ft.leaf_action(ft.leaf_inclusion(lc), 3 + 2j))
    assert out.c == pytest.approx(3 + 2j, abs=1e-12)
    np.testing.assert_allclose(out.t, lc.t, atol=1e-12)
    np.testing.assert_allclose(out.u, lc.u, atol=1e-12)


@given(ms, seeds)
def test_round_trip(m, seed):
    z, lc = ft.sample_surface(np.random.default_rng(seed), m)
    out = ft.leaf_coordinates(z)
    assert np.max(np.abs(ft.leaf_action(ft.leaf_inclusion(ft.LeafCoord(out.t, out.u)), out.c) - z)) <= 1e-12
    assert abs(out.c - lc.c) <= 1e-12


def test_distinct_leaves_stay_distinct(rng):
    a, b = ft.sample_leaf_coord(rng, 3), ft.sample_leaf_coord(rng, 3)
    za = ft.leaf_action(ft.leaf_inclusion(a), 1.7 - 0.4j)
    la, lb = ft.leaf_coordinates(za), ft.leaf_coordinates(ft.leaf_inclusion(b))
    assert max(np.max(np.abs(la.t - lb.t)), np.max(np.abs(la.u - lb.u))) > 1e-3


@given(ms, seeds)
def test_transverse_levi_signature(m, seed):
    z, _ = ft.sample_surface(np.random.default_rng(seed), m)
    assert ft.transverse_levi_signature(z) == (m - 1, 0)


def test_flow_matches_action_to_first_order(rng):
    z, _ = ft.sample_surface(rng, 3)
    r3, r4 = ft.flow_residual(z, 1e-3), ft.flow_residual(z, 1e-4)
    assert r3 <= 1e-5
    assert r4 / r3 == pytest.approx(0.01, rel=0.05)


def test_errors():
    with pytest.raises(ft.TubeError):
        ft.leaf_action([1, 1], -1.0)
    with pytest.raises(ft.TubeError):
        ft.leaf_action([1, 1], 0j)
    with pytest.raises(ft.TubeError):
        ft.leaf_coordinates([2, 1])
    with pytest.raises(ft.TubeError):
        ft.leaf_coordinates([1, -1])
    with pytest.raises(ft.TubeError):
        ft.transverse_levi_signature([1, 1])
    with pytest.raises(ft.TubeError):
        ft.LeafCoord(np.zeros(2), np.array([1.0, 1.0]))
    with pytest.raises(ft.TubeError):
        ft.LeafCoord(np.zeros(2), np.array([1.0, 0.0]), -1 + 0j)
