"""Quaternions, split-quaternions and eps-quaternionic structures on C^d."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "pauli",
    "AlgebraElement",
    "algebra_mul",
    "EpsQuatStructure",
    "FormPair",
    "DegenerateLineError",
    "quaternionic_line",
    "in_line",
    "symmetry_check",
    "split_forms",
    "quat_forms",
]

_PAULI = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

RANK_TOL = 1e-9


class DegenerateLineError(ValueError):
    """v and Kv are numerically parallel, so they span no 2-plane."""


def pauli(k: int) -> np.ndarray:
    if k not in (0, 1, 2, 3):
        raise IndexError(f"Pauli index must be 0..3, got {k}")
    return _PAULI[k].copy()


def _check_eps(eps):
    if eps not in (1, -1):
        raise ValueError(f"eps must be +1 or -1, got {eps}")


@dataclass(frozen=True)
class AlgebraElement:
    """The 2x2 matrix [[w, eps*conj(z)], [z, conj(w)]]."""

    w: complex
    z: complex
    eps: int = 1

    def __post_init__(self):
        _check_eps(self.eps)

    def matrix(self) -> np.ndarray:
        w, z = complex(self.w), complex(self.z)
        return np.array([[w, self.eps * z.conjugate()], [z, w.conjugate()]])

    @classmethod
    def from_matrix(cls, m: np.ndarray, eps: int, tol: float = 1e-12) -> "AlgebraElement":
        m = np.asarray(m, dtype=complex)
        w, z = m[0, 0], m[1, 0]
        el = cls(w, z, eps)
        if np.max(np.abs(el.matrix() - m)) > tol * max(1.0, np.max(np.abs(m))):
            raise ValueError("matrix is not of the eps-quaternionic form")
        return el

    def __mul__(self, other):
        return algebra_mul(self, other)


def algebra_mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    if a.eps != b.eps:
        raise ValueError("cannot multiply elements of different algebras")
    return AlgebraElement.from_matrix(a.matrix() @ b.matrix(), a.eps)


@dataclass(frozen=True)
class EpsQuatStructure:
    """Real matrix K on R^d with K@K = eps*I, extended conjugate-linearly."""

    K: np.ndarray
    eps: int

    def __post_init__(self):
        _check_eps(self.eps)
        K = np.asarray(self.K, dtype=float)
        if K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise ValueError("K must be square")
        if self.eps == -1 and K.shape[0] % 2:
            raise ValueError("a quaternionic structure needs even dimension")
        if not np.allclose(K @ K, self.eps * np.eye(K.shape[0]), atol=1e-12):
            raise ValueError("K @ K must equal eps * identity")
        object.__setattr__(self, "K", K)

    @property
    def dim(self) -> int:
        return self.K.shape[0]

    def apply(self, v):
        """K(c v) = conj(c) K(v)."""
        return self.K @ np.conj(np.asarray(v, dtype=complex))


@dataclass(frozen=True)
class FormPair:
    b: np.ndarray
    h: np.ndarray

    @classmethod
    def from_structure(cls, b, S: EpsQuatStructure) -> "FormPair":
        b = np.asarray(b, dtype=complex)
        if not np.allclose(b, b.T):
            raise ValueError("b must be symmetric")
        h = S.K.T @ b
        if not np.allclose(h, h.conj().T):
            raise ValueError("K^t b is not Hermitian")
        return cls(b, h)

    def bform(self, v1, v2):
        return np.asarray(v1) @ self.b @ np.asarray(v2)

    def hform(self, v1, v2):
        return np.conj(np.asarray(v1)) @ self.h @ np.asarray(v2)


def quaternionic_line(v, S: EpsQuatStructure) -> np.ndarray:
    """Basis {v, Kv} of the A-span of v, as the columns of a d x 2 matrix."""
    v = np.asarray(v, dtype=complex)
    kv = S.apply(v)
    basis = np.column_stack([v, kv])
    s = np.linalg.svd(basis, compute_uv=False)
    if s[0] == 0 or s[1] / s[0] < RANK_TOL:
        raise DegenerateLineError("v and Kv are linearly dependent")
    return basis


def in_line(w, basis: np.ndarray, tol: float = 1e-10) -> bool:
    """Complex least-squares membership of w in the column span of basis."""
    w = np.asarray(w, dtype=complex)
    coef, *_ = np.linalg.lstsq(basis, w, rcond=None)
    return np.linalg.norm(basis @ coef - w) <= tol * max(1.0, np.linalg.norm(w))


def symmetry_check(X, P: FormPair):
    X = np.asarray(X, dtype=complex)
    if X.shape != P.b.shape:
        raise ValueError(f"shape mismatch {X.shape} vs {P.b.shape}")
    rb = np.linalg.norm(X.T @ P.b + P.b @ X)
    rh = np.linalg.norm(X.conj().T @ P.h + P.h @ X)
    return float(rb), float(rh)


def _eps_diag(p: int, q: int) -> np.ndarray:
    return np.diag([1.0] * p + [-1.0] * q)


def split_forms(p: int, q: int):
    """K and (b, h) on the basis (nu, K nu, upsilon_i, nu', K nu')."""
    n = p + q
    d = n + 4
    s1 = pauli(1).real
    K = np.zeros((d, d))
    K[:2, :2] = s1
    K[2:2 + n, 2:2 + n] = np.eye(n)
    K[-2:, -2:] = s1
    b = np.zeros((d, d), dtype=complex)
    b[:2, -2:] = s1
    b[-2:, :2] = s1
    b[2:2 + n, 2:2 + n] = _eps_diag(p, q)
    S = EpsQuatStructure(K, 1)
    return S, FormPair.from_structure(b, S)


def quat_forms(p: int):
    """K and (b, h) for the quaternionic model on C^(2p+4)."""
    d = 2 * p + 4
    m = (-1j * pauli(2)).real
    K = np.zeros((d, d))
    K[:2, :2] = m
    K[2:2 + p, 2 + p:2 + 2 * p] = -np.eye(p)
    K[2 + p:2 + 2 * p, 2:2 + p] = np.eye(p)
    K[-2:, -2:] = m
    b = np.zeros((d, d), dtype=complex)
    b[:2, -2:] = pauli(1)
    b[-2:, :2] = pauli(1)
    b[2:2 + p, 2 + p:2 + 2 * p] = np.eye(p)
    b[2 + p:2 + 2 * p, 2:2 + p] = np.eye(p)
    S = EpsQuatStructure(K, -1)
    return S, FormPair.from_structure(b, S)
