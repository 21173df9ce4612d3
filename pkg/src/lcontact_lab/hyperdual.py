"""Truncated second-order dual arithmetic.

An :class:`HD2` carries ``value + d1*e1 + d2*e2 + d12*e1*e2`` with
``e1**2 = e2**2 = 0``.  Slots may themselves be :class:`HD2` numbers, so the
type nests: lifting an already-lifted point one more level gives derivatives
of derivatives, which is how the exterior-calculus layer differentiates
coefficients that are defined through derivatives.
"""
from __future__ import annotations

import cmath
import math
from numbers import Number

import numpy as np

__all__ = [
    "HD2",
    "NumericDomainError",
    "lift_coordinate",
    "exp",
    "sin",
    "cos",
    "sqrt",
    "power",
    "conj",
    "real",
    "imag",
    "base_value",
    "slot",
    "partial",
    "second_partials",
]


class NumericDomainError(ArithmeticError):
    """Raised when an elementary function is evaluated outside its domain."""


class HD2:
    __slots__ = ("value", "d1", "d2", "d12")

    def __init__(self, value, d1=0.0, d2=0.0, d12=0.0):
        self.value = value
        self.d1 = d1
        self.d2 = d2
        self.d12 = d12

    def __repr__(self):
        return f"HD2({self.value!r}, {self.d1!r}, {self.d2!r}, {self.d12!r})"

    def slots(self):
        return (self.value, self.d1, self.d2, self.d12)

    # arithmetic
    def __add__(self, other):
        if isinstance(other, HD2):
            return HD2(self.value + other.value, self.d1 + other.d1,
                       self.d2 + other.d2, self.d12 + other.d12)
        if isinstance(other, np.ndarray):
            return NotImplemented
        return HD2(self.value + other, self.d1, self.d2, self.d12)

    __radd__ = __add__

    def __neg__(self):
        return HD2(-self.value, -self.d1, -self.d2, -self.d12)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, HD2):
            a, b = self, other
            return HD2(a.value * b.value,
                       a.value * b.d1 + a.d1 * b.value,
                       a.value * b.d2 + a.d2 * b.value,
                       a.value * b.d12 + a.d1 * b.d2 + a.d2 * b.d1 + a.d12 * b.value)
        if isinstance(other, np.ndarray):
            return NotImplemented
        return HD2(self.value * other, self.d1 * other, self.d2 * other, self.d12 * other)

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.value
        if base_value(v) == 0:
            raise NumericDomainError("division by an HD2 with zero value")
        inv = 1.0 / v
        return _chain(self, inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        if isinstance(other, HD2):
            return self * other.reciprocal()
        if isinstance(other, np.ndarray):
            return NotImplemented
        if base_value(other) == 0:
            raise NumericDomainError("division by zero")
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k):
        return power(self, k)

    def __rpow__(self, base):
        return exp(self * _log(base))

    # elementary functions, used by numpy ufuncs on object arrays
    def exp(self):
        return exp(self)

    def sin(self):
        return sin(self)

    def cos(self):
        return cos(self)

    def sqrt(self):
        return sqrt(self)

    def conjugate(self):
        return conj(self)

    @property
    def real(self):
        return real(self)

    @property
    def imag(self):
        return imag(self)

    # ordering by the underlying base value
    def __lt__(self, other):
        return base_value(self) < base_value(other)

    def __gt__(self, other):
        return base_value(self) > base_value(other)

    def __le__(self, other):
        return base_value(self) <= base_value(other)

    def __ge__(self, other):
        return base_value(self) >= base_value(other)

    def __float__(self):
        return float(base_value(self))

    def __complex__(self):
        return complex(base_value(self))


def _chain(x: HD2, f, fp, fpp):
    """Push f, f', f'' (already evaluated at x.value) through the seeds."""
    return HD2(f, fp * x.d1, fp * x.d2, fp * x.d12 + fpp * x.d1 * x.d2)


def base_value(x):
    """Innermost scalar value, stripping every HD2 level."""
    while isinstance(x, HD2):
        x = x.value
    return x


def _is_complex(x):
    return isinstance(base_value(x), complex) or np.iscomplexobj(base_value(x))


def _log(x):
    if isinstance(x, HD2):
        v = x.value
        if base_value(v) == 0:
            raise NumericDomainError("log of zero")
        inv = 1.0 / v
        return _chain(x, _log(v), inv, -inv * inv)
    if isinstance(x, complex):
        return cmath.log(x)
    if x <= 0:
        raise NumericDomainError("log of a non-positive value")
    return math.log(x)


def exp(x):
    if isinstance(x, HD2):
        e = exp(x.value)
        return _chain(x, e, e, e)
    if isinstance(x, np.ndarray):
        return np.array([exp(v) for v in x.ravel()], dtype=object).reshape(x.shape)
    if isinstance(x, complex):
        return cmath.exp(x)
    return math.exp(x)


def sin(x):
    if isinstance(x, HD2):
        s, c = sin(x.value), cos(x.value)
        return _chain(x, s, c, -s)
    if isinstance(x, np.ndarray):
        return np.array([sin(v) for v in x.ravel()], dtype=object).reshape(x.shape)
    if isinstance(x, complex):
        return cmath.sin(x)
    return math.sin(x)


def cos(x):
    if isinstance(x, HD2):
        s, c = sin(x.value), cos(x.value)
        return _chain(x, c, -s, -c)
    if isinstance(x, np.ndarray):
        return np.array([cos(v) for v in x.ravel()], dtype=object).reshape(x.shape)
    if isinstance(x, complex):
        return cmath.cos(x)
    return math.cos(x)


def sqrt(x):
    if isinstance(x, HD2):
        b = base_value(x)
        if isinstance(b, complex) or b <= 0:
            raise NumericDomainError("sqrt of a non-positive HD2 value")
        s = sqrt(x.value)
        inv = 1.0 / s
        return _chain(x, s, 0.5 * inv, -0.25 * inv * inv * inv)
    if isinstance(x, np.ndarray):
        return np.array([sqrt(v) for v in x.ravel()], dtype=object).reshape(x.shape)
    if isinstance(x, complex):
        return cmath.sqrt(x)
    if x < 0:
        raise NumericDomainError("sqrt of a negative value")
    return math.sqrt(x)


def power(x, k):
    """x**k.  Integer k uses repeated products; real k needs a positive base."""
    if isinstance(k, HD2):
        return exp(k * _log(x))
    if isinstance(k, (int, np.integer)):
        k = int(k)
        if k < 0:
            return power(1.0 / x if not isinstance(x, HD2) else x.reciprocal(), -k)
        out = 1.0
        base = x
        while k:
            if k & 1:
                out = base * out
            k >>= 1
            if k:
                base = base * base
        return out
    if isinstance(x, HD2):
        b = base_value(x)
        if isinstance(b, complex) or b <= 0:
            raise NumericDomainError("non-integer power of a non-positive HD2 value")
        v = x.value
        f = power(v, k)
        fp = k * power(v, k - 1)
        fpp = k * (k - 1) * power(v, k - 2)
        return _chain(x, f, fp, fpp)
    if not isinstance(x, complex) and x < 0:
        raise NumericDomainError("non-integer power of a negative value")
    return x ** k


def conj(x):
    if isinstance(x, HD2):
        return HD2(conj(x.value), conj(x.d1), conj(x.d2), conj(x.d12))
    if isinstance(x, np.ndarray):
        if x.dtype == object:
            return np.array([conj(v) for v in x.ravel()], dtype=object).reshape(x.shape)
        return np.conj(x)
    if isinstance(x, Number):
        return x.conjugate()
    return np.conj(x)


def real(x):
    if isinstance(x, HD2):
        return HD2(real(x.value), real(x.d1), real(x.d2), real(x.d12))
    if isinstance(x, np.ndarray):
        if x.dtype == object:
            return np.array([real(v) for v in x.ravel()], dtype=object).reshape(x.shape)
        return x.real
    return x.real if isinstance(x, Number) else np.real(x)


def imag(x):
    if isinstance(x, HD2):
        return HD2(imag(x.value), imag(x.d1), imag(x.d2), imag(x.d12))
    if isinstance(x, np.ndarray):
        if x.dtype == object:
            return np.array([imag(v) for v in x.ravel()], dtype=object).reshape(x.shape)
        return x.imag
    return x.imag if isinstance(x, Number) else np.imag(x)


def lift_coordinate(x, i: int, j: int) -> np.ndarray:
    """Seed coordinate i along e1 and coordinate j along e2.

    Components of ``x`` may be plain numbers or HD2 numbers (nesting).  The
    mixed slot is never seeded; it fills in through products.
    """
    x = np.asarray(x, dtype=object)
    if x.ndim != 1:
        raise ValueError("lift_coordinate expects a vector")
    d = x.shape[0]
    if not (0 <= i < d and 0 <= j < d):
        raise IndexError(f"seed indices ({i}, {j}) out of range for dimension {d}")
    out = np.empty(d, dtype=object)
    for k in range(d):
        out[k] = HD2(x[k], 1.0 if k == i else 0.0, 1.0 if k == j else 0.0, 0.0)
    return out


_SLOT_INDEX = {"value": 0, "d1": 1, "d2": 2, "d12": 3}


def slot(y, name: str):
    """Extract one slot from an HD2, a constant, or an object array of them.

    Constants (which did not depend on the seeded point) have zero derivative
    slots.  Plain float/complex arrays come back with a numeric dtype when
    every entry is a plain number.
    """
    k = _SLOT_INDEX[name]

    def one(v):
        if isinstance(v, HD2):
            return v.slots()[k]
        return v if k == 0 else 0.0 * v

    if isinstance(y, np.ndarray):
        flat = [one(v) for v in y.ravel()]
        return _pack(flat, y.shape)
    return one(y)


def _pack(flat, shape):
    if any(isinstance(v, HD2) for v in flat):
        out = np.empty(len(flat), dtype=object)
        out[:] = flat
        return out.reshape(shape)
    return np.array(flat, dtype=complex if any(isinstance(v, complex) or np.iscomplexobj(v) for v in flat)
                    else float).reshape(shape)


def partial(f, x, i: int):
    """First partial derivative of f (scalar or array valued) along x_i."""
    return slot(f(lift_coordinate(x, i, i)), "d1")


def second_partials(f, x, i: int, j: int):
    """Return (f, d_i f, d_j f, d_i d_j f) from one lifted evaluation."""
    y = f(lift_coordinate(x, i, j))
    return slot(y, "value"), slot(y, "d1"), slot(y, "d2"), slot(y, "d12")
