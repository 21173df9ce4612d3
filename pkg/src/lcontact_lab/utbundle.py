"""Tangent-bundle patch over a coordinate chart: Sasaki metric, (J, K), contact form, Levi form.

Points of TM are (x, y) with y in T_xM.  Vectors on TM are stored in coordinate
components (dx, dy) of length 2d.  The lift frame has columns
``H_1..H_d, V_1..V_d`` with ``H_i = d_{x^i} - Gamma^k_{ji} y^j d_{y^k}`` and
``V_i = d_{y^i}``; in that frame the Sasaki metric is diag(g, g).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import extcalc
from .metric import MetricError, MetricField, adapt_frame, christoffel, riemann

__all__ = [
    "TangentPatch",
    "UMPoint",
    "j_block",
    "k_block",
    "lift_matrix",
    "horizontal_lift",
    "vertical_lift",
    "sasaki_metric",
    "structure_maps",
    "contact_form",
    "levi_form",
    "levi_matrices",
    "lagrangian_splitting",
    "levi_lemma_check",
    "ricci_shift",
    "sample_um",
]


def j_block(d: int) -> np.ndarray:
    I, Z = np.eye(d), np.zeros((d, d))
    return np.block([[Z, -I], [I, Z]])


def k_block(d: int) -> np.ndarray:
    I, Z = np.eye(d), np.zeros((d, d))
    return np.block([[Z, I], [I, Z]])


@dataclass(frozen=True)
class TangentPatch:
    metric: MetricField

    @property
    def dim(self) -> int:
        return self.metric.dim

    @property
    def patch_dim(self) -> int:
        return 2 * self.metric.dim


@dataclass(frozen=True)
class UMPoint:
    x: np.ndarray
    u: np.ndarray


def lift_matrix(T: TangentPatch, x, y) -> np.ndarray:
    """Columns are the horizontal and vertical lifts of the coordinate vectors."""
    d = T.dim
    Gam = christoffel(T.metric, x)
    Gy = np.einsum("kji,j->ki", Gam, np.asarray(y, dtype=float))
    L = np.eye(2 * d)
    L[d:, :d] = -Gy
    return L


def horizontal_lift(T: TangentPatch, x, y, Y) -> np.ndarray:
    d = T.dim
    return lift_matrix(T, x, y)[:, :d] @ np.asarray(Y)


def vertical_lift(T: TangentPatch, Y) -> np.ndarray:
    Y = np.asarray(Y)
    return np.concatenate([np.zeros_like(Y), Y])


def sasaki_metric(T: TangentPatch, x, y, frame: str = "lift") -> np.ndarray:
    g = np.asarray(T.metric(np.asarray(x, dtype=float)), dtype=float)
    d = T.dim
    G = np.zeros((2 * d, 2 * d))
    G[:d, :d] = g
    G[d:, d:] = g
    if frame == "lift":
        return G
    if frame != "coordinate":
        raise ValueError("frame must be 'lift' or 'coordinate'")
    Linv = np.linalg.inv(lift_matrix(T, x, y))
    return Linv.T @ G @ Linv


def structure_maps(T: TangentPatch, x, y):
    """(J, K) as matrices acting on coordinate components of vectors on TM."""
    L = lift_matrix(T, x, y)
    Linv = np.linalg.inv(L)
    d = T.dim
    return L @ j_block(d) @ Linv, L @ k_block(d) @ Linv


def contact_form(T: TangentPatch) -> extcalc.FormField:
    """theta = g_ij(x) y^i dx^j on the 2d-dimensional (x, y) patch."""
    d = T.dim
    M = T.metric

    def coeff(X):
        X = np.asarray(X)
        x, y = X[:d], X[d:]
        gy = M(x) @ y
        return np.concatenate([gy, np.zeros(d, dtype=gy.dtype)])

    return extcalc.FormField(1, 2 * d, coeff)


def levi_form(T: TangentPatch, x, y, scale: float = 1.0) -> np.ndarray:
    """Matrix of L = -i d(scale * theta) in coordinate components at (x, y)."""
    theta = contact_form(T)
    dth = extcalc.d(theta).at(np.concatenate([np.asarray(x, float), np.asarray(y, float)]))
    return -1j * scale * np.asarray(dth, dtype=complex)


def lagrangian_splitting(T: TangentPatch, x, u):
    """Bases (columns) of Lambda and its conjugate inside C Delta_u, plus the frame used."""
    fr = adapt_frame(T.metric, np.asarray(x, float), np.asarray(u, float))
    e = np.asarray(fr.e, dtype=float)
    L = lift_matrix(T, x, u)
    d = T.dim
    Y = e[:, 1:]
    hor = L[:, :d] @ Y
    ver = L[:, d:] @ Y
    lam = hor - 1j * ver
    return lam, lam.conj(), fr


def levi_matrices(T: TangentPatch, x, u, scale: float = 1.0):
    """(L, 1/2 ghat(., J .)) on the basis Lambda (+) conj Lambda of C Delta_u."""
    lam, lamb, _ = lagrangian_splitting(T, x, u)
    B = np.hstack([lam, lamb])
    Lv = B.T @ levi_form(T, x, u, scale) @ B
    G = sasaki_metric(T, x, u, frame="coordinate")
    Jm, _ = structure_maps(T, x, u)
    rhs = 0.5 * B.T @ G @ Jm @ B
    return Lv, rhs


def levi_lemma_check(T: TangentPatch, x, u, scale: float = 1.0) -> float:
    """max |L(Y1, Y2) - 1/2 ghat(Y1, J Y2)| over a basis of C Delta_u, with L = -i d theta."""
    Lv, rhs = levi_matrices(T, x, u, scale)
    return float(np.max(np.abs(Lv - rhs)))


def ricci_shift(T: TangentPatch, x, u, index: int):
    """Shifted (horizontal, vertical) lifts of the frame vector Y_index of u-perp.

    Returns the pair and the coefficient Ric(u, Y) (standard Ricci tensor).
    """
    x = np.asarray(x, float)
    fr = adapt_frame(T.metric, x, np.asarray(u, float))
    n = T.dim - 1
    if not 1 <= index <= n:
        raise IndexError(f"basis index must lie in 1..{n}")
    curv = riemann(T.metric, x, fr)
    c = float(curv.Ric[0, index])
    e = np.asarray(fr.e, dtype=float)
    L = lift_matrix(T, x, u)
    d = T.dim
    h = L[:, :d] @ e[:, index]
    v = L[:, d:] @ e[:, index]
    return h + c * v, v + c * h, c


def sample_um(T: TangentPatch, rng: np.random.Generator, min_norm: float = 1e-2, max_tries: int = 1000) -> UMPoint:
    """Base point from the chart, direction uniform on the coordinate sphere rescaled to g(y, y) = 1."""
    M = T.metric
    x = M.sample_point(rng)
    g = np.asarray(M(x), dtype=float)
    for _ in range(max_tries):
        y = rng.standard_normal(M.dim)
        y = y / np.linalg.norm(y)
        q = float(y @ g @ y)
        if q > min_norm:
            return UMPoint(x, y / np.sqrt(q))
    raise MetricError("no positive direction found; the metric has no spacelike-positive vectors here")
