"""Small dense linear algebra that works on float, complex or HD2 object arrays."""
from __future__ import annotations

import numpy as np

from .hyperdual import HD2, base_value


def has_hd2(a) -> bool:
    if isinstance(a, HD2):
        return True
    if isinstance(a, np.ndarray) and a.dtype == object:
        return any(isinstance(v, HD2) for v in a.ravel())
    return False


def finish(a):
    """Object array without HD2 entries -> numeric array."""
    if isinstance(a, np.ndarray) and a.dtype == object and not has_hd2(a):
        flat = list(a.ravel())
        kind = complex if any(np.iscomplexobj(v) for v in flat) else float
        return np.array(flat, dtype=kind).reshape(a.shape)
    return a


def inv(a):
    if not has_hd2(a):
        return np.linalg.inv(np.asarray(a))
    return solve(a, np.eye(a.shape[0]))


def solve(a, b):
    """Gauss-Jordan with partial pivoting on the base value."""
    if not has_hd2(a) and not has_hd2(b):
        return np.linalg.solve(np.asarray(a), np.asarray(b))
    a = np.array(a, dtype=object)
    b = np.array(b, dtype=object)
    vec = b.ndim == 1
    if vec:
        b = b[:, None]
    n = a.shape[0]
    m = np.concatenate([a, b], axis=1)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(base_value(m[r, col])))
        if abs(base_value(m[piv, col])) == 0:
            raise np.linalg.LinAlgError("singular matrix")
        if piv != col:
            m[[col, piv]] = m[[piv, col]]
        m[col] = m[col] / m[col, col]
        for r in range(n):
            if r != col:
                f = m[r, col]
                if not (isinstance(f, (int, float, complex)) and f == 0):
                    m[r] = m[r] - f * m[col]
    out = m[:, n:]
    return out[:, 0] if vec else out
