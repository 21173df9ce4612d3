"""Tube over the future light cone in C^{m+1} and its leaf-space identification.

rho(z) = 1/2 [(z_1 + conj z_1)^2 + .. + (z_m + conj z_m)^2 - (z_{m+1} + conj z_{m+1})^2];
the hypersurface is rho = 0 with Re z_{m+1} > 0.  The complex half rays
z -> (c x + i y), Re c > 0, are the Levi leaves, and the leaf space is the unit
tangent bundle of Euclidean R^m through (t, u) -> (u + i t, 1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np



__all__ = [
    "TubeError",
    "LeafCoord",
    "rho",
    "is_future",
    "ambient_levi",
    "d_rho",
    "null_field",
    "leaf_inclusion",
    "leaf_action",
    "leaf_coordinates",
    "compose_parameters",
    "transverse_levi_signature",
    "flow_residual",
    "sample_leaf_coord",
    "sample_surface",
]

UNIT_TOL = 1e-12


class TubeError(ValueError):
    pass


@dataclass(frozen=True)
class LeafCoord:
    t: np.ndarray
    u: np.ndarray
    c: complex = 1.0 + 0j

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        u = np.asarray(self.u, dtype=float)
        if t.shape != u.shape or t.ndim != 1:
            raise TubeError("t and u must be vectors of equal length")
        if abs(float(u @ u) - 1.0) > 1e-9:
            raise TubeError(f"u is not a unit vector: |u|^2 = {float(u @ u)}")
        if complex(self.c).real <= 0:
            raise TubeError("leaf parameter needs Re c > 0")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "c", complex(self.c))

    @property
    def m(self) -> int:
        return len(self.t)


def _signs(m1: int) -> np.ndarray:
    return np.array([1.0] * (m1 - 1) + [-1.0])


def rho(z) -> float:
    z = np.asarray(z, dtype=complex)
    w = (z + z.conj()).real
    return 0.5 * float(_signs(len(z)) @ (w * w))


def is_future(z) -> bool:
    return bool(np.asarray(z, dtype=complex)[-1].real > 0)


def ambient_levi(m: int) -> np.ndarray:
    """Hermitian matrix of L = d dbar rho: diag(1, .., 1, -1)."""
    return np.diag(_signs(m + 1))


def d_rho(z) -> np.ndarray:
    """Holomorphic differential: components d rho / d z_k = s_k (z_k + conj z_k)."""
    z = np.asarray(z, dtype=complex)
    return _signs(len(z)) * (z + z.conj())


def null_field(z) -> np.ndarray:
    """Components of X = sum (z_k + conj z_k) d/dz_k."""
    z = np.asarray(z, dtype=complex)
    return z + z.conj()


def leaf_inclusion(lc: LeafCoord) -> np.ndarray:
    return np.concatenate([lc.u + 1j * lc.t, [1.0 + 0j]])


def leaf_action(z, c: complex) -> np.ndarray:
    """z = x + i y  ->  c x + i y (real parts scale by Re c, imaginary parts shift by Im c x)."""
    c = complex(c)
    if c.real <= 0:
        raise TubeError("leaf action needs Re c > 0")
    z = np.asarray(z, dtype=complex)
    return c * z.real + 1j * z.imag


def compose_parameters(c1: complex, c2: complex) -> complex:
    """Parameter of action(c1) o action(c2): scales multiply, shifts compose."""
    c1, c2 = complex(c1), complex(c2)
    return complex(c1.real * c2.real, c1.imag * c2.real + c2.imag)


def leaf_coordinates(z) -> LeafCoord:
    z = np.asarray(z, dtype=complex)
    r, s = z[-1].real, z[-1].imag
    if r <= 0:
        raise TubeError("point violates futurity (Re z_{m+1} <= 0)")
    u = z[:-1].real / r
    t = z[:-1].imag - s * u
    nu = float(u @ u)
    if abs(nu - 1.0) > 1e-9:
        raise TubeError(f"point is off the surface: |u|^2 = {nu}")
    return LeafCoord(t, u, complex(r, s))


def transverse_levi_signature(z, tol: float = 1e-10):
    """Signature of L on the standard-orthogonal complement of X inside ker d rho."""
    z = np.asarray(z, dtype=complex)
    m1 = len(z)
    if m1 < 3:
        raise TubeError("m >= 2 required; the transverse Levi form is empty for m = 1")
    dr = d_rho(z)
    X = null_field(z)
    # ker d rho as a complex subspace: v with sum dr_k v_k = 0
    A = np.vstack([dr, X.conj()])
    _, sv, vh = np.linalg.svd(A)
    rank = int(np.sum(sv > tol * max(1.0, sv[0])))
    B = vh[rank:].conj().T  # columns span {v: dr.v = 0, <X, v> = 0}
    H = B.conj().T @ ambient_levi(m1 - 1) @ B
    ev = np.linalg.eigvalsh(0.5 * (H + H.conj().T))
    return int(np.sum(ev > tol)), int(np.sum(ev < -tol))


def flow_residual(z, eps: float) -> float:
    """|leaf_action(z, 1 + eps) - exp(eps Re X)(z)|, with Re X = x d/dx generating x -> e^eps x."""
    z = np.asarray(z, dtype=complex)
    flowed = np.exp(eps) * z.real + 1j * z.imag
    return float(np.max(np.abs(leaf_action(z, 1 + eps) - flowed)))


def sample_leaf_coord(rng: np.random.Generator, m: int, t_scale: float = 1.0) -> LeafCoord:
    u = rng.standard_normal(m)
    u = u / np.linalg.norm(u)
    t = rng.uniform(-t_scale, t_scale, size=m)
    return LeafCoord(np.atleast_1d(t), u)


def sample_surface(rng: np.random.Generator, m: int):
    """(z, leaf coordinate) pairs with z = leaf_action(leaf_inclusion(t, u), c)."""
    lc = sample_leaf_coord(rng, m)
    c = complex(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0))
    z = leaf_action(leaf_inclusion(lc), c)
    return z, LeafCoord(lc.t, lc.u, c)
