"""Matrix models of so(p+2,q+2) and so*(2p+4) and their Maurer-Cartan equations.

Every check here is mechanical: brackets of real basis elements are decomposed
back into parameters, which gives structure constants c^k_ij, and the printed
Maurer-Cartan right-hand sides are evaluated on the same basis pairs using
d(omega^c)(X_a, X_b) = -c^c_ab.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quatalg import quat_forms, split_forms

__all__ = [
    "ConstraintError",
    "DecompositionError",
    "SplitParams",
    "QuatParams",
    "so_split_element",
    "so_star_element",
    "Model",
    "split_model",
    "quat_model",
    "make_model",
    "StructureConstants",
    "structure_constants",
    "jacobi_residual",
    "mc_residual",
    "mc_equation_residuals",
    "adk_block",
]

DECOMP_TOL = 1e-10


class ConstraintError(ValueError):
    pass


class DecompositionError(RuntimeError):
    """A bracket left the span of the parametrized model."""


def _eps(p, q):
    return np.array([1.0] * p + [-1.0] * q)


@dataclass
class SplitParams:
    eta0: float
    zeta0: float
    varsigma: complex
    kappa: complex
    eta: np.ndarray
    zeta: np.ndarray
    gamma: np.ndarray


@dataclass
class QuatParams:
    eta0: float
    zeta0: float
    varsigma: complex
    kappa: complex
    eta: np.ndarray
    zeta: np.ndarray
    xi: np.ndarray


def _check_gamma(gamma, eps, tol=1e-12):
    g = np.asarray(gamma)
    if np.iscomplexobj(g) and np.max(np.abs(g.imag), initial=0.0) > tol:
        raise ConstraintError("gamma must be real")
    g = np.real(g)
    # eps_ij gamma^i_k + eps_ik gamma^i_j = 0  <=>  diag(eps) @ gamma is skew
    s = np.diag(eps) @ g
    if np.max(np.abs(s + s.T), initial=0.0) > tol * max(1.0, np.max(np.abs(g), initial=0.0)):
        raise ConstraintError("gamma violates eps_ij gamma^i_k + eps_ik gamma^i_j = 0")
    return g


def _check_xi(xi, p, tol=1e-12):
    xi = np.asarray(xi, dtype=complex)
    a, b = xi[:p, :p], xi[:p, p:]
    c, d = xi[p:, :p], xi[p:, p:]
    scale = max(1.0, np.max(np.abs(xi), initial=0.0))
    bad = max(
        np.max(np.abs(a + a.conj().T), initial=0.0),
        np.max(np.abs(d - a.conj()), initial=0.0),
        np.max(np.abs(c + c.T), initial=0.0),
        np.max(np.abs(b + c.conj()), initial=0.0),
    )
    if bad > tol * scale:
        raise ConstraintError("xi violates the so*(2p+4) block relations")
    return xi


def so_split_element(P: SplitParams, p: int, q: int) -> np.ndarray:
    n = p + q
    if p < 0 or q < 0 or n < 1:
        raise ValueError("need p, q >= 0 with p + q >= 1")
    eps = _eps(p, q)
    g = _check_gamma(P.gamma, eps)
    eta = np.asarray(P.eta, dtype=complex)
    zeta = np.asarray(P.zeta, dtype=complex)
    vs, ka = complex(P.varsigma), complex(P.kappa)
    e0, z0 = float(np.real(P.eta0)), float(np.real(P.zeta0))
    d = n + 4
    X = np.zeros((d, d), dtype=complex)
    m = slice(2, 2 + n)
    X[0, 0], X[0, 1] = vs, ka.conjugate()
    X[0, m] = 1j * eps * zeta.conj()
    X[0, d - 2] = 1j * z0
    X[1, 0], X[1, 1] = ka, vs.conjugate()
    X[1, m] = -1j * eps * zeta
    X[1, d - 1] = -1j * z0
    X[m, 0], X[m, 1] = eta, eta.conj()
    X[m, m] = g
    X[m, d - 2], X[m, d - 1] = 1j * zeta, -1j * zeta.conj()
    X[d - 2, 0] = 1j * e0
    X[d - 2, m] = -eps * eta.conj()
    X[d - 2, d - 2], X[d - 2, d - 1] = -vs.conjugate(), -ka.conjugate()
    X[d - 1, 1] = -1j * e0
    X[d - 1, m] = -eps * eta
    X[d - 1, d - 2], X[d - 1, d - 1] = -ka, -vs
    return X


def so_star_element(P: QuatParams, p: int) -> np.ndarray:
    if p < 1:
        raise ValueError("need p >= 1")
    xi = _check_xi(P.xi, p)
    eta = np.asarray(P.eta, dtype=complex)
    zeta = np.asarray(P.zeta, dtype=complex)
    vs, ka = complex(P.varsigma), complex(P.kappa)
    e0, z0 = float(np.real(P.eta0)), float(np.real(P.zeta0))
    d = 2 * p + 4
    X = np.zeros((d, d), dtype=complex)
    lo, hi = slice(2, 2 + p), slice(2 + p, 2 + 2 * p)
    ei, ep = eta[:p], eta[p:]
    zi, zp = zeta[:p], zeta[p:]
    X[0, 0], X[0, 1] = vs, -ka.conjugate()
    X[0, lo], X[0, hi] = 1j * zi.conj(), -1j * zp.conj()
    X[0, d - 2] = 1j * z0
    X[1, 0], X[1, 1] = ka, vs.conjugate()
    X[1, lo], X[1, hi] = -1j * zp, -1j * zi
    X[1, d - 1] = -1j * z0
    X[lo, 0], X[lo, 1] = ei, -ep.conj()
    X[hi, 0], X[hi, 1] = ep, ei.conj()
    X[2:2 + 2 * p, 2:2 + 2 * p] = xi
    X[lo, d - 2], X[lo, d - 1] = 1j * zi, 1j * zp.conj()
    X[hi, d - 2], X[hi, d - 1] = 1j * zp, -1j * zi.conj()
    X[d - 2, 0] = 1j * e0
    X[d - 2, lo], X[d - 2, hi] = -ei.conj(), ep.conj()
    X[d - 2, d - 2], X[d - 2, d - 1] = -vs.conjugate(), ka.conjugate()
    X[d - 1, 1] = -1j * e0
    X[d - 1, lo], X[d - 1, hi] = -ep, -ei
    X[d - 1, d - 2], X[d - 1, d - 1] = -ka, -vs
    return X


# ---------------------------------------------------------------------------
# real coordinates on the parameter space


@dataclass
class Model:
    """A family with its real parameter chart.

    ``to_params`` maps a real vector to the family's params dataclass;
    ``values`` maps it to a dict of complex form values keyed by name.
    """

    family: str
    p: int
    q: int
    labels: list[str]
    to_params: Callable
    element: Callable
    values: Callable
    forms: object = None
    _realized: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return self.p + self.q

    def matrix(self, v) -> np.ndarray:
        return self.element(self.to_params(np.asarray(v, dtype=float)))

    def basis(self) -> list[np.ndarray]:
        return [self.matrix(e) for e in np.eye(self.dim)]

    def realized(self) -> np.ndarray:
        """Real (2 d^2) x dim matrix whose columns are the basis elements."""
        if self._realized is None:
            cols = [np.concatenate([B.real.ravel(), B.imag.ravel()]) for B in self.basis()]
            self._realized = np.column_stack(cols)
        return self._realized

    def decompose(self, X, tol: float = DECOMP_TOL) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        A = self.realized()
        rhs = np.concatenate([X.real.ravel(), X.imag.ravel()])
        v, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        resid = np.linalg.norm(A @ v - rhs)
        if resid > tol * max(1.0, np.linalg.norm(rhs)):
            raise DecompositionError(f"matrix not in the model span (residual {resid:.3e})")
        return v


def split_model(p: int, q: int) -> Model:
    n = p + q
    if p < 0 or q < 0 or n < 1:
        raise ValueError("need p, q >= 0 with p + q >= 1")
    eps = _eps(p, q)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    labels = (["eta0"] + [f"Re eta{i + 1}" for i in range(n)] + [f"Im eta{i + 1}" for i in range(n)]
              + ["Re kappa", "Im kappa"] + [f"gamma{i + 1}_{j + 1}" for i, j in pairs]
              + ["Re varsigma", "Im varsigma"] + [f"Re zeta{i + 1}" for i in range(n)]
              + [f"Im zeta{i + 1}" for i in range(n)] + ["zeta0"])

    def to_params(v):
        k = 0
        eta0 = v[k]; k += 1
        eta = v[k:k + n] + 1j * v[k + n:k + 2 * n]; k += 2 * n
        kappa = v[k] + 1j * v[k + 1]; k += 2
        gamma = np.zeros((n, n))
        for (i, j) in pairs:
            gamma[i, j] = v[k]
            gamma[j, i] = -eps[i] * eps[j] * v[k]
            k += 1
        vs = v[k] + 1j * v[k + 1]; k += 2
        zeta = v[k:k + n] + 1j * v[k + n:k + 2 * n]; k += 2 * n
        zeta0 = v[k]
        return SplitParams(eta0, zeta0, vs, kappa, eta, zeta, gamma)

    def values(v):
        P = to_params(v)
        F = {"eta0": P.eta0, "zeta0": P.zeta0, "vs": P.varsigma, "vsb": np.conj(P.varsigma),
             "ka": P.kappa, "kab": np.conj(P.kappa)}
        for i in range(n):
            F["eta", i] = P.eta[i]
            F["etab", i] = np.conj(P.eta[i])
            F["zeta", i] = P.zeta[i]
            F["zetab", i] = np.conj(P.zeta[i])
            for j in range(n):
                F["gam", i, j] = P.gamma[i, j]
        return F

    return Model("split", p, q, labels, to_params, lambda P: so_split_element(P, p, q), values,
                 forms=split_forms(p, q))


def quat_model(p: int) -> Model:
    if p < 1:
        raise ValueError("need p >= 1")
    n = 2 * p
    upper = [(i, j) for i in range(p) for j in range(i + 1, p)]
    labels = (["eta0"] + [f"Re eta{i + 1}" for i in range(n)] + [f"Im eta{i + 1}" for i in range(n)]
              + ["Re kappa", "Im kappa"]
              + [f"Im xi{i + 1}_{i + 1}" for i in range(p)]
              + [f"{part} xi{i + 1}_{j + 1}" for i, j in upper for part in ("Re", "Im")]
              + [f"{part} xi{p + i + 1}_{j + 1}" for i, j in upper for part in ("Re", "Im")]
              + ["Re varsigma", "Im varsigma"] + [f"Re zeta{i + 1}" for i in range(n)]
              + [f"Im zeta{i + 1}" for i in range(n)] + ["zeta0"])

    def to_params(v):
        k = 0
        eta0 = v[k]; k += 1
        eta = v[k:k + n] + 1j * v[k + n:k + 2 * n]; k += 2 * n
        kappa = v[k] + 1j * v[k + 1]; k += 2
        a = np.zeros((p, p), dtype=complex)
        c = np.zeros((p, p), dtype=complex)
        for i in range(p):
            a[i, i] = 1j * v[k]; k += 1
        for i, j in upper:
            a[i, j] = v[k] + 1j * v[k + 1]; k += 2
            a[j, i] = -np.conj(a[i, j])
        for i, j in upper:
            c[i, j] = v[k] + 1j * v[k + 1]; k += 2
            c[j, i] = -c[i, j]
        xi = np.block([[a, -c.conj()], [c, a.conj()]])
        vs = v[k] + 1j * v[k + 1]; k += 2
        zeta = v[k:k + n] + 1j * v[k + n:k + 2 * n]; k += 2 * n
        zeta0 = v[k]
        return QuatParams(eta0, zeta0, vs, kappa, eta, zeta, xi)

    def values(v):
        P = to_params(v)
        F = {"eta0": P.eta0, "zeta0": P.zeta0, "vs": P.varsigma, "vsb": np.conj(P.varsigma),
             "ka": P.kappa, "kab": np.conj(P.kappa)}
        for i in range(n):
            F["eta", i] = P.eta[i]
            F["etab", i] = np.conj(P.eta[i])
            F["zeta", i] = P.zeta[i]
            F["zetab", i] = np.conj(P.zeta[i])
            for j in range(n):
                F["xi", i, j] = P.xi[i, j]
        return F

    return Model("quat", p, p, labels, to_params, lambda P: so_star_element(P, p), values,
                 forms=quat_forms(p))


def make_model(family: str, p: int, q: int | None = None) -> Model:
    if family == "split":
        return split_model(p, 0 if q is None else q)
    if family == "quat":
        if q is not None and q != p:
            raise ValueError("the quaternionic family requires q == p")
        return quat_model(p)
    raise ValueError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# structure constants


@dataclass
class StructureConstants:
    labels: list[str]
    c: np.ndarray  # c[k, i, j]: [X_i, X_j] = c[k, i, j] X_k


def structure_constants(family: str, p: int, q: int | None = None) -> StructureConstants:
    model = make_model(family, p, q)
    B = model.basis()
    m = model.dim
    c = np.zeros((m, m, m))
    for i in range(m):
        for j in range(i + 1, m):
            v = model.decompose(B[i] @ B[j] - B[j] @ B[i])
            c[:, i, j] = v
            c[:, j, i] = -v
    return StructureConstants(model.labels, c)


def jacobi_residual(sc: StructureConstants) -> float:
    c = sc.c
    # sum_cyc [X_i, [X_j, X_k]] components
    t = np.einsum("lim,mjk->lijk", c, c)
    jac = t + np.einsum("lijk->ljki", t) + np.einsum("lijk->lkij", t)
    return float(np.max(np.abs(jac)))


# ---------------------------------------------------------------------------
# printed Maurer-Cartan right-hand sides


def _split_equations(n, eps, completed=False):
    """(name, lhs key, rhs(W)) triples; W(f, g) evaluates f ^ g on the current pair.

    ``completed=False`` gives the equations exactly as printed.  ``completed=True``
    flips the sign of the zeta ^ conj(zeta) term in d(zeta0) and adds the
    eta/zeta cross terms to d(gamma); both are what the bracket of the matrix
    model actually produces.
    """
    zeta0_sign = 1 if completed else -1
    R = range(n)
    eqs = []
    eqs.append(("d eta0", "eta0", lambda W: W(lambda F: F["vs"] + F["vsb"], "eta0")
                + sum(1j * eps[i] * W(("eta", i), ("etab", i)) for i in R)))
    for i in R:
        eqs.append(("d eta^i", ("eta", i), lambda W, i=i: W(("zeta", i), "eta0") + W("vs", ("eta", i))
                    - sum(W(("gam", i, j), ("eta", j)) for j in R) + W("ka", ("etab", i))))
    eqs.append(("d kappa", "ka", lambda W: W(lambda F: F["vs"] - F["vsb"], "ka")
                + sum(1j * eps[i] * W(("zeta", i), ("eta", i)) for i in R)))
    for i in R:
        for j in R:
            eqs.append(("d gamma", ("gam", i, j),
                        lambda W, i=i, j=j: -sum(W(("gam", i, k), ("gam", k, j)) for k in R)
                        - (_gamma_cross(W, i, j, eps) if completed else 0.0)))
    eqs.append(("d varsigma", "vs", lambda W: W("zeta0", "eta0")
                + sum(1j * eps[i] * W(("eta", i), ("zetab", i)) for i in R) + W("ka", "kab")))
    for i in R:
        eqs.append(("d zeta^i", ("zeta", i), lambda W, i=i: W("zeta0", ("eta", i))
                    - sum(W(("gam", i, j), ("zeta", j)) for j in R)
                    - W("vsb", ("zeta", i)) + W("ka", ("zetab", i))))
    eqs.append(("d zeta0", "zeta0", lambda W: -W(lambda F: F["vs"] + F["vsb"], "zeta0")
                + zeta0_sign * sum(1j * eps[i] * W(("zeta", i), ("zetab", i)) for i in R)))
    return eqs


def _gamma_cross(W, i, j, eps):
    e = eps[j]
    return 1j * e * (W(("eta", i), ("zetab", j)) - W(("etab", i), ("zeta", j))
                     - W(("zeta", i), ("etab", j)) + W(("zetab", i), ("eta", j)))


def _quat_equations(p):
    n = 2 * p
    R, N = range(p), range(n)
    eqs = []
    eqs.append(("d eta0", "eta0", lambda W: W(lambda F: F["vs"] + F["vsb"], "eta0")
                + sum(1j * W(("eta", i), ("etab", i)) for i in R)
                - sum(1j * W(("eta", p + i), ("etab", p + i)) for i in R)))
    for i in R:
        eqs.append(("d eta^i", ("eta", i), lambda W, i=i: W(("zeta", i), "eta0") + W("vs", ("eta", i))
                    - sum(W(("xi", i, J), ("eta", J)) for J in N) - W("ka", ("etab", p + i))))
        eqs.append(("d eta^(p+i)", ("eta", p + i), lambda W, i=i: W(("zeta", p + i), "eta0")
                    + W("vs", ("eta", p + i))
                    - sum(W(("xi", p + i, J), ("eta", J)) for J in N) + W("ka", ("etab", i))))
    return eqs


def _form_value(F, key):
    if callable(key):
        return key(F)
    return F[key]


def mc_equation_residuals(family: str, p: int, q: int | None = None,
                          sc: StructureConstants | None = None, completed: bool = False) -> dict[str, float]:
    """Per-equation max deviation between d(omega) from structure constants and the right-hand sides."""
    model = make_model(family, p, q)
    if sc is None:
        sc = structure_constants(family, p, q)
    m = model.dim
    basis_vals = [model.values(e) for e in np.eye(m)]
    if family == "split":
        eqs = _split_equations(model.n, _eps(model.p, model.q), completed)
    else:
        eqs = _quat_equations(p)
    worst = {name: 0.0 for name, _, _ in eqs}
    for a in range(m):
        Fa = basis_vals[a]
        for b in range(a + 1, m):
            Fb = basis_vals[b]
            bracket_vals = model.values(sc.c[:, a, b])

            def W(f, g):
                return (_form_value(Fa, f) * _form_value(Fb, g) - _form_value(Fb, f) * _form_value(Fa, g))

            for name, key, rhs in eqs:
                r = abs(-bracket_vals[key] - rhs(W))
                if r > worst[name]:
                    worst[name] = float(r)
    return worst


def mc_residual(family: str, p: int, q: int | None = None, sc: StructureConstants | None = None,
                completed: bool = False) -> float:
    return max(mc_equation_residuals(family, p, q, sc, completed).values())


def adk_block(family: str, p: int, q: int | None = None, sc: StructureConstants | None = None) -> np.ndarray:
    """Matrix A with d(eta^I) = A^I_J kappa ^ conj(eta^J) mod {eta0, eta}.

    Evaluated on complexified basis vectors: X with kappa(X)=1, conj(kappa)(X)=0,
    and Z_J with conj(eta^J)(Z_J)=1 and every eta(Z_J)=0.
    """
    model = make_model(family, p, q)
    if sc is None:
        sc = structure_constants(family, p, q)
    n = model.n
    idx = {lab: k for k, lab in enumerate(model.labels)}
    m = model.dim
    X = np.zeros(m, dtype=complex)
    X[idx["Re kappa"]], X[idx["Im kappa"]] = 0.5, -0.5j
    A = np.zeros((n, n), dtype=complex)
    for J in range(n):
        Z = np.zeros(m, dtype=complex)
        Z[idx[f"Re eta{J + 1}"]], Z[idx[f"Im eta{J + 1}"]] = 0.5, 0.5j
        # bracket components, complex-bilinear in the real basis
        comp = -np.einsum("kij,i,j->k", sc.c, X, Z)
        vals_re = model.values(comp.real)
        vals_im = model.values(comp.imag)
        for I in range(n):
            A[I, J] = vals_re["eta", I] + 1j * vals_im["eta", I]
    return A
