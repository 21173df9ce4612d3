"""Numerical exterior calculus on a coordinate patch.

A :class:`FormField` of degree k stores a closure returning the full
antisymmetric component array ``F[..., m1, .., mk] = F(d_m1, .., d_mk)``
(with ``dx^0 ^ dx^1 (d_0, d_1) = 1``).  Leading axes carry values for vector or
matrix valued forms.  Closures accept float points or HD2-lifted points, so
``d`` is implemented by one extra lift per coordinate direction.
"""
from __future__ import annotations

import itertools
import math
import string
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import hyperdual as hd
from ._generic import finish
from .hyperdual import lift_coordinate, slot

__all__ = [
    "Patch",
    "FormField",
    "IllConditionedCoframe",
    "d",
    "wedge",
    "pullback",
    "expand_2form",
    "assemble_2form",
    "coordinate_form",
    "function_form",
    "constant_form",
    "alternate",
]


class IllConditionedCoframe(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class Patch:
    names: tuple
    box: np.ndarray

    def __post_init__(self):
        box = np.asarray(self.box, dtype=float)
        if len(set(self.names)) != len(self.names):
            raise ValueError("coordinate names must be unique")
        if box.shape != (len(self.names), 2) or np.any(box[:, 0] >= box[:, 1]):
            raise ValueError("box must be nonempty with one [lo, hi] row per coordinate")
        object.__setattr__(self, "box", box)

    @property
    def dim(self) -> int:
        return len(self.names)


def _perm_sign(perm) -> int:
    sign, seen = 1, list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def alternate(T, vdim: int, k: int):
    """Sum over permutations of the last k axes, weighted by sign (no normalization)."""
    if k <= 1:
        return T
    out = None
    for perm in itertools.permutations(range(k)):
        axes = list(range(vdim)) + [vdim + p for p in perm]
        term = _perm_sign(perm) * np.transpose(T, axes)
        out = term if out is None else out + term
    return out


class FormField:
    def __init__(self, degree: int, dim: int, coeff: Callable, vshape: tuple = ()):
        if not 0 <= degree <= dim:
            raise ValueError(f"degree {degree} out of range for dimension {dim}")
        self.degree = degree
        self.dim = dim
        self.coeff = coeff
        self.vshape = tuple(vshape)

    def __call__(self, x):
        return self.coeff(x)

    def at(self, x) -> np.ndarray:
        """Numeric component array at a float point."""
        return finish(np.asarray(self.coeff(np.asarray(x, dtype=float))))

    # linear structure
    def _same(self, other):
        if not isinstance(other, FormField):
            raise TypeError("expected a FormField")
        if other.degree != self.degree or other.dim != self.dim or other.vshape != self.vshape:
            raise ValueError("forms must agree in degree, dimension and value shape")

    def __add__(self, other):
        self._same(other)
        return FormField(self.degree, self.dim, lambda x: self.coeff(x) + other.coeff(x), self.vshape)

    def __sub__(self, other):
        self._same(other)
        return FormField(self.degree, self.dim, lambda x: self.coeff(x) - other.coeff(x), self.vshape)

    def __neg__(self):
        return FormField(self.degree, self.dim, lambda x: -self.coeff(x), self.vshape)

    def __mul__(self, c):
        """Multiply by a constant or by a scalar 0-form (FormField of degree 0)."""
        if isinstance(c, FormField):
            if self.degree == 0 and not self.vshape and (c.degree or c.vshape):
                return c * self
            if c.degree != 0 or c.vshape:
                raise ValueError("use wedge for products with forms of positive degree")
            return FormField(self.degree, self.dim, lambda x: c.coeff(x) * self.coeff(x), self.vshape)
        return FormField(self.degree, self.dim, lambda x: c * self.coeff(x), self.vshape)

    __rmul__ = __mul__

    def conj(self):
        return FormField(self.degree, self.dim, lambda x: hd.conj(np.asarray(self.coeff(x))), self.vshape)

    def real(self):
        return FormField(self.degree, self.dim, lambda x: hd.real(np.asarray(self.coeff(x))), self.vshape)

    def imag(self):
        return FormField(self.degree, self.dim, lambda x: hd.imag(np.asarray(self.coeff(x))), self.vshape)

    def __getitem__(self, idx):
        if not self.vshape:
            raise TypeError("scalar form has no value components")
        probe = np.empty(self.vshape)[idx]
        return FormField(self.degree, self.dim, lambda x: np.asarray(self.coeff(x))[idx], probe.shape)


def constant_form(value, degree: int, dim: int) -> FormField:
    value = np.asarray(value)
    vdim = value.ndim - degree
    return FormField(degree, dim, lambda x: value, value.shape[:vdim])


def function_form(f: Callable, dim: int, vshape: tuple = ()) -> FormField:
    """0-form from a (possibly array valued) function of the point."""
    return FormField(0, dim, f, vshape)


def coordinate_form(dim: int, mu: int) -> FormField:
    e = np.zeros(dim)
    e[mu] = 1.0
    return FormField(1, dim, lambda x: e, ())


def d(a: FormField) -> FormField:
    if a.degree >= a.dim:
        return FormField(a.dim, a.dim, lambda x: np.zeros(a.vshape + (a.dim,) * a.dim), a.vshape)
    k, D, vdim = a.degree, a.dim, len(a.vshape)

    def coeff(x):
        x = np.asarray(x, dtype=object)
        parts = [np.asarray(slot(np.asarray(a.coeff(lift_coordinate(x, mu, mu)), dtype=object), "d1"))
                 for mu in range(D)]
        full_shape = a.vshape + (D,) * k
        parts = [np.broadcast_to(p, full_shape) if p.shape != full_shape else p for p in parts]
        P = np.stack(parts, axis=vdim)  # vshape + (mu, nu1..nuk)
        out = None
        for j in range(k + 1):
            term = np.moveaxis(P, vdim, vdim + j)
            term = term if j % 2 == 0 else -term
            out = term if out is None else out + term
        return out

    return FormField(k + 1, D, coeff, a.vshape)


_LETTERS = string.ascii_letters


def wedge(a: FormField, b: FormField, spec: str | None = None) -> FormField:
    """a ^ b, contracting value indices with an einsum spec such as 'ij,j->i'."""
    if a.dim != b.dim:
        raise ValueError("forms live on different patches")
    k, l, D = a.degree, b.degree, a.dim
    if k + l > D:
        raise ValueError("degree overflow")
    if spec is None:
        if a.vshape and b.vshape:
            raise ValueError("value-valued wedge needs an einsum spec")
        va = _LETTERS[:len(a.vshape)]
        vb = _LETTERS[len(a.vshape):len(a.vshape) + len(b.vshape)]
        spec = f"{va},{vb}->{va}{vb}"
    lhs, out = spec.split("->")
    sa, sb = lhs.split(",")
    used = set(spec)
    free = [c for c in _LETTERS if c not in used][:k + l]
    fa, fb = "".join(free[:k]), "".join(free[k:])
    full = f"{sa}{fa},{sb}{fb}->{out}{fa}{fb}"
    vshape_out = None
    norm = 1.0 / (math.factorial(k) * math.factorial(l))

    def coeff(x):
        A = np.asarray(a.coeff(x))
        B = np.asarray(b.coeff(x))
        if A.dtype == object or B.dtype == object:
            A, B = A.astype(object), B.astype(object)
        T = np.einsum(full, A, B)
        vd = T.ndim - (k + l)
        res = alternate(T, vd, k + l)
        return res * norm if norm != 1.0 else res

    # value shape from a probe of the einsum on dummy shapes
    dims = {}
    for s, shp in ((sa, a.vshape), (sb, b.vshape)):
        for c, n in zip(s, shp):
            dims[c] = n
    vshape_out = tuple(dims[c] for c in out)
    return FormField(k + l, D, coeff, vshape_out)


def pullback(phi: Callable, source_dim: int, a: FormField) -> FormField:
    """phi*(a) for a map phi from a source patch of dimension source_dim into a's patch."""
    k, vdim = a.degree, len(a.vshape)

    def coeff(x):
        x = np.asarray(x, dtype=object)
        y = np.asarray(phi(x), dtype=object)
        A = np.asarray(a.coeff(y))
        if k == 0:
            return A
        J = np.stack([np.asarray(slot(np.asarray(phi(lift_coordinate(x, nu, nu)), dtype=object), "d1"), dtype=object)
                      for nu in range(source_dim)], axis=1)  # J[mu, nu]
        out = A.astype(object) if A.dtype != object else A
        for j in range(k):
            axis = vdim + j
            out = np.moveaxis(np.tensordot(out, J, axes=([axis], [0])), -1, axis)
        return out

    return FormField(k, source_dim, coeff, a.vshape)


def expand_2form(F, coframe, max_cond: float = 1e8) -> np.ndarray:
    """Coefficients c[a, b] = F(e_a, e_b) for the frame dual to the coframe rows.

    ``F`` is a (D, D) component array at a point; ``coframe`` is a (D, D) array
    whose row a holds the components of theta^a.  Then F = sum_{a<b} c_ab theta^a ^ theta^b.
    """
    Th = np.asarray(coframe, dtype=complex)
    c = np.linalg.cond(Th)
    if not np.isfinite(c) or c > max_cond:
        raise IllConditionedCoframe(f"coframe condition number {c:.3e} exceeds {max_cond:.1e}")
    E = np.linalg.inv(Th)
    return E.T @ np.asarray(F, dtype=complex) @ E


def assemble_2form(c, coframe) -> np.ndarray:
    """Inverse of expand_2form: components of sum_{a<b} c_ab theta^a ^ theta^b."""
    c = np.asarray(c, dtype=complex)
    Th = np.asarray(coframe, dtype=complex)
    cu = np.triu(c, 1)
    return Th.T @ (cu - cu.T) @ Th
