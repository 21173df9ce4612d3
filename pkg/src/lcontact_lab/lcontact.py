"""Orthonormal frame-bundle patches, adapted coframes, pseudoconnections and torsion.

A patch of the frame bundle has coordinates (x, t): x in the metric chart and t
parametrizing the structure group through a product of one-parameter
eps-orthogonal exponentials.  The frame is phi(x, t) = E(x) O(t) with E the
adapted frame field built from the first coordinate direction.

Adding a complex fiber coordinate a (as Re a, Im a) gives the patch carrying
eta^0, eta^i.  Torsion is read off by expanding the residual 2-form of the
structure equation for d eta^i in the coframe
{eta^0, eta^i, conj eta^i, gamma^i_j (i < j), da, conj da}.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import hyperdual as hd
from ._generic import finish
from .extcalc import FormField, IllConditionedCoframe, d, expand_2form, function_form
from .hyperdual import lift_coordinate, slot
from .metric import AdaptedFrame, CurvatureData, MetricError, MetricField, adapt_frame, christoffel, riemann, weyl


__all__ = [
    "FIBER_EXCLUSION",
    "FiberCoord",
    "FrameBundlePatch",
    "EtaForms",
    "Pseudoconnection",
    "TorsionReport",
    "group_element",
    "lambda_forms",
    "lambda_residuals",
    "eta_forms",
    "pseudoconnection",
    "torsion_oracle",
    "torsion_formula",
    "torsion_formula_general",
    "antisym",
    "sample_fiber",
    "conformal_flatness_report",
    "quaternionic_skeleton",
]

FIBER_EXCLUSION = 0.05
T_RANGE = 0.3


@dataclass(frozen=True)
class FiberCoord:
    a: complex

    @property
    def r(self) -> float:
        return abs(self.a)

    @property
    def z_plus(self) -> complex:
        return 1 - 1j * self.r + self.a

    @property
    def z_minus(self) -> complex:
        return 1 - 1j * self.r - self.a


def _pairs(d: int):
    return list(itertools.combinations(range(d), 2))


def group_element(t, eps) -> np.ndarray:
    """Product over index pairs (a < b) of exp(t_ab G_ab), G_ab eps-skew.

    G_ab has entries G[a, b] = eps_a, G[b, a] = -eps_b; it squares to -1 on the
    (a, b) block when eps_a = eps_b (rotation) and to +1 otherwise (boost).
    """
    eps = np.asarray(eps, dtype=float)
    dim = len(eps)
    pairs = _pairs(dim)
    if len(t) != len(pairs):
        raise ValueError(f"expected {len(pairs)} group parameters, got {len(t)}")
    O = np.eye(dim, dtype=object)
    for (a, b), s in zip(pairs, t):
        if eps[a] == eps[b]:
            c, sn = hd.cos(s), hd.sin(s)
        else:
            ep, em = hd.exp(s), hd.exp(-s)
            c, sn = 0.5 * (ep + em), 0.5 * (ep - em)
        B = np.eye(dim, dtype=object)
        B[a, a] = c
        B[b, b] = c
        B[a, b] = sn * eps[a]
        B[b, a] = -sn * eps[b]
        O = O @ B
    return finish(O)


class FrameBundlePatch:
    """Coordinates (x, t); omega and gamma as FormFields."""

    def __init__(self, metric: MetricField):
        self.metric = metric
        self.d = metric.dim
        self.n = self.d - 1
        self.eps = metric.sig.eps
        self.pairs = _pairs(self.d)
        self.dim = self.d + len(self.pairs)
        self.omega = FormField(1, self.dim, self._omega_coeff, (self.d,))
        self.gamma = FormField(1, self.dim, self._gamma_coeff, (self.d, self.d))

    # frame
    def frame(self, X) -> np.ndarray:
        X = np.asarray(X)
        x, t = X[:self.d], X[self.d:self.dim]
        return adapt_frame(self.metric, x).e @ group_element(t, self.eps)

    def frame_inverse(self, X, phi=None) -> np.ndarray:
        if phi is None:
            phi = self.frame(X)
        return np.diag(self.eps) @ phi.T @ self.metric(np.asarray(X)[:self.d])

    def _omega_coeff(self, X):
        pinv = self.frame_inverse(X)
        pad = np.zeros((self.d, self.dim - self.d))
        return np.concatenate([pinv, pad], axis=1)

    def _gamma_coeff(self, X):
        X = np.asarray(X)
        phi = self.frame(X)
        pinv = self.frame_inverse(X, phi)
        Gam = christoffel(self.metric, X[:self.d])
        cols = []
        for nu in range(self.dim):
            dphi = slot(np.asarray(self.frame(lift_coordinate(X, nu, nu)), dtype=object), "d1")
            if nu < self.d:
                dphi = dphi + Gam[:, nu, :] @ phi
            cols.append(pinv @ dphi)
        out = np.empty((self.d, self.d, self.dim), dtype=object)
        for nu, c in enumerate(cols):
            out[:, :, nu] = c
        return finish(out)

    # sampling and curvature
    def sample(self, rng: np.random.Generator) -> np.ndarray:
        x = self.metric.sample_point(rng)
        t = rng.uniform(-T_RANGE, T_RANGE, size=len(self.pairs))
        return np.concatenate([x, np.atleast_1d(t)])

    def curvature(self, X) -> CurvatureData:
        """Frame components of curvature in the frame phi(X)."""
        X = np.asarray(X, dtype=float)
        phi = np.asarray(self.frame(X), dtype=float)
        return riemann(self.metric, X[:self.d], AdaptedFrame(phi, X[:self.d], self.eps))

    def calibration_residuals(self, X) -> dict:
        """Residuals of d omega + gamma ^ omega, d gamma + gamma ^ gamma - 1/2 R omega ^ omega, eps-skewness."""
        X = np.asarray(X, dtype=float)
        om = self.omega.at(X)
        ga = self.gamma.at(X)
        dom = d(self.omega).at(X)
        dga = d(self.gamma).at(X)
        gw = np.einsum("ijm,jn->imn", ga, om)
        r1 = dom + gw - np.swapaxes(gw, -1, -2)
        gg = np.einsum("ikm,kjn->ijmn", ga, ga)
        Rf = self.curvature(X).Riem
        Rww = np.einsum("ijkl,km,ln->ijmn", Rf, om, om)  # 1/2 R_kl w^k ^ w^l, antisymmetric in (k, l)
        r2 = dga + gg - np.swapaxes(gg, -1, -2) - Rww
        E = np.diag(self.eps)
        skew = E @ np.moveaxis(ga, -1, 0) + np.swapaxes(E @ np.moveaxis(ga, -1, 0), -1, -2)
        return {
            "d omega": float(np.max(np.abs(r1))),
            "d gamma": float(np.max(np.abs(r2))),
            "gamma skew": float(np.max(np.abs(skew))),
        }


def _wedge1(a, b):
    """Components of a ^ b for 1-form component arrays (last axis is the form index)."""
    A = np.asarray(a)[..., :, None] * np.asarray(b)[..., None, :]
    return A - np.swapaxes(A, -1, -2)


def antisym(T) -> np.ndarray:
    T = np.asarray(T)
    return 0.5 * (T - np.swapaxes(T, -1, -2))


# ---------------------------------------------------------------------------
# lambda forms


def lambda_forms(fbp: FrameBundlePatch):
    """lambda^0 = omega^0 / 2 and lambda^i = (omega^i - i gamma^i_0) / 2, i = 1..n."""
    om, ga, n = fbp.omega, fbp.gamma, fbp.n
    lam0 = FormField(1, fbp.dim, lambda X: 0.5 * np.asarray(om.coeff(X))[0], ())

    def lam_coeff(X):
        w = np.asarray(om.coeff(X))
        g = np.asarray(ga.coeff(X))
        return 0.5 * (w[1:] - 1j * g[1:, 0])

    return lam0, FormField(1, fbp.dim, lam_coeff, (n,))


def lambda_residuals(fbp: FrameBundlePatch, X, curvature_terms: bool = True) -> dict:
    """Residuals of the structure equations for d lambda^0 and d lambda^i at X.

    d lambda^0 = i eps_ij lambda^i ^ conj lambda^j
    d lambda^i = -(gamma^i_0 + i R^i_{0k0} omega^k) ^ lambda^0 - gamma^i_j ^ lambda^j
                 - (i/4) R^i_{0kl} (lambda + conj lambda)^k ^ (lambda + conj lambda)^l
    """
    X = np.asarray(X, dtype=float)
    lam0, lam = lambda_forms(fbp)
    l0, l = lam0.at(X), lam.at(X)
    lb = l.conj()
    epsn = fbp.eps[1:]
    dl0 = d(lam0).at(X)
    r0 = dl0 - 1j * np.einsum("i,imn->mn", epsn, _wedge1(l, lb))
    om, ga = fbp.omega.at(X), fbp.gamma.at(X)
    if curvature_terms:
        Rf = fbp.curvature(X).Riem
        R0k0 = Rf[1:, 0, 1:, 0]
        R0kl = Rf[1:, 0, 1:, 1:]
    else:
        n = fbp.n
        R0k0 = np.zeros((n, n))
        R0kl = np.zeros((n, n, n))
    xi = ga[1:, 0] + 1j * R0k0 @ om[1:]
    s = l + lb
    rhs = (-_wedge1(xi, l0[None, :])
           - np.einsum("ijmn->imn", _wedge1(ga[1:, 1:], l[None, :, :]))
           - 0.25j * np.einsum("ikl,klmn->imn", R0kl, _wedge_outer(s, s)))
    dl = d(lam).at(X)
    r1 = dl - rhs
    return {"d lambda0": float(np.max(np.abs(r0))), "d lambda": float(np.max(np.abs(r1)))}


def _wedge_outer(a, b):
    """W[k, l, m, n] = (a^k ^ b^l)(d_m, d_n)."""
    A = np.einsum("km,ln->klmn", a, b)
    return A - np.swapaxes(A, -1, -2)


# ---------------------------------------------------------------------------
# eta forms on the fiber-extended patch


def _extend(F: FormField, dim: int) -> FormField:
    """Pull a 0- or 1-form back along the projection dropping trailing coordinates."""
    base = F.dim

    def coeff(X):
        A = np.asarray(F.coeff(np.asarray(X)[:base]))
        if F.degree == 0:
            return A
        pad = np.zeros(A.shape[:-1] + (dim - base,))
        return np.concatenate([A, pad], axis=-1)

    return FormField(F.degree, dim, coeff, F.vshape)


@dataclass
class EtaForms:
    fbp: FrameBundlePatch
    dim: int
    fixed: complex | None
    a: callable
    r: callable
    omega: FormField
    gamma: FormField
    lam0: FormField
    lam: FormField
    eta0: FormField
    eta: FormField
    dr: FormField
    da: FormField

    @property
    def extended(self) -> bool:
        return self.fixed is None

    def point(self, X_base, a: complex) -> np.ndarray:
        X_base = np.asarray(X_base, dtype=float)
        if self.extended:
            return np.concatenate([X_base, [a.real, a.imag]])
        if a != self.fixed:
            raise ValueError("fiber value differs from the fixed slice value")
        return X_base


def eta_forms(fbp: FrameBundlePatch, fixed: complex | None = None) -> EtaForms:
    """eta^0 = lambda^0, eta^i = (1 - i r) lambda^i - a conj lambda^i with r = |a|.

    With ``fixed=None`` a is a coordinate (two extra real coordinates).  With a
    fixed value the forms live on the (x, t) patch (the slice through that a);
    this is the route at a = 0 where r is not differentiable.
    """
    D = fbp.dim
    if fixed is None:
        dim = D + 2

        def a_fn(X):
            X = np.asarray(X)
            return X[D] + 1j * X[D + 1]

        def r_fn(X):
            X = np.asarray(X)
            return hd.sqrt(X[D] * X[D] + X[D + 1] * X[D + 1])
    else:
        dim = D
        fixed = complex(fixed)

        def a_fn(X):
            return fixed

        def r_fn(X):
            return abs(fixed)

    lam0_b, lam_b = lambda_forms(fbp)
    lam0, lam = _extend(lam0_b, dim), _extend(lam_b, dim)
    omega, gamma = _extend(fbp.omega, dim), _extend(fbp.gamma, dim)

    def eta_coeff(X):
        L = np.asarray(lam.coeff(X))
        return (1 - 1j * r_fn(X)) * L - a_fn(X) * hd.conj(L)

    eta = FormField(1, dim, eta_coeff, (fbp.n,))
    if fixed is None:
        dr = d(function_form(r_fn, dim))
        da = d(function_form(a_fn, dim))
    else:
        zero = FormField(1, dim, lambda X: np.zeros(dim), ())
        dr, da = zero, zero
    return EtaForms(fbp, dim, fixed, a_fn, r_fn, omega, gamma, lam0, lam, lam0, eta, dr, da)


# ---------------------------------------------------------------------------
# pseudoconnection


@dataclass
class Pseudoconnection:
    varsigma: FormField
    kappa: FormField
    zeta: FormField
    ricci_shift: bool


def _base_float(X):
    return np.array([float(np.real(hd.base_value(v))) for v in np.ravel(X)])


def pseudoconnection(ef: EtaForms, ricci_shift: bool = True) -> Pseudoconnection:
    """varsigma, kappa, zeta^i with the displayed choices; curvature taken at the base point.

    These forms enter the structure equations undifferentiated, so their
    coefficients are evaluated at plain float points only.
    """
    fbp, n = ef.fbp, ef.fbp.n

    def fiber(X):
        a, r = ef.a(X), ef.r(X)
        return a, r, 1 - 1j * r + a, 1 - 1j * r - a

    def curv(X):
        return fbp.curvature(_base_float(X)[:fbp.dim])

    def vs_coeff(X):
        a, r, zp, zm = fiber(X)
        da = np.asarray(ef.da.coeff(X))
        return (-1j * np.asarray(ef.dr.coeff(X)) + 0.5 * (a * hd.conj(da) - hd.conj(a) * da)
                + 0.5j * (zm * hd.conj(zm)) * np.asarray(ef.eta0.coeff(X)))

    def ka_coeff(X):
        a, r, zp, zm = fiber(X)
        out = (-1j * a * np.asarray(ef.dr.coeff(X)) - (1 - 1j * r) * np.asarray(ef.da.coeff(X))
               - 0.5j * zm ** 2 * np.asarray(ef.eta0.coeff(X)))
        if ricci_shift:
            R0k = curv(X).RicPaper[0, 1:]
            out = out - 0.25j * zp ** 3 * (R0k @ hd.conj(np.asarray(ef.eta.coeff(X))))
        return out

    def ze_coeff(X):
        a, r, zp, zm = fiber(X)
        et = np.asarray(ef.eta.coeff(X))
        g = np.asarray(ef.gamma.coeff(X))
        w = np.asarray(ef.omega.coeff(X))
        R0k0 = curv(X).Riem[1:, 0, 1:, 0]
        return (0.5j * (zm * hd.conj(zm)) * et - 0.5j * zm ** 2 * hd.conj(et) - zm * g[1:, 0]
                - 1j * zp * (R0k0 @ w[1:]))

    dim = ef.dim
    return Pseudoconnection(FormField(1, dim, vs_coeff), FormField(1, dim, ka_coeff),
                            FormField(1, dim, ze_coeff, (n,)), ricci_shift)


# ---------------------------------------------------------------------------
# torsion


def torsion_formula(curv: CurvatureData, a: complex, ricci_shift: bool = True, q_tensor: str = "C"):
    """Closed-form O, P, Q (indices i, k, l = 1..n) at fiber value a.

    O = -(i/4) z+ conj(z+)^2 R^i_0kl, P = -(i/2) z+^2 conj(z+) R^i_0kl,
    Q = -(i/4) z+^3 C^i_0kl with C^i_jkl = R^i_jkl - eps^i_k R_jl (normalized Ricci).
    Without the Ricci shift Q carries R^i_0kl instead of C.

    ``q_tensor="shift"`` uses R^i_0kl - delta^i_l R_0k instead of C: the tensor
    produced by moving the kappa Ricci term into the conj eta ^ conj eta block.
    Its antisymmetric part differs from that of C by the sign of the Ricci term.
    """
    fc = FiberCoord(complex(a))
    zp = fc.z_plus
    R0 = curv.Riem[1:, 0, 1:, 1:]
    O = -0.25j * zp * np.conj(zp) ** 2 * R0
    P = -0.5j * zp ** 2 * np.conj(zp) * R0
    if not ricci_shift:
        Qt = R0
    elif q_tensor == "C":
        Qt = curv.CPaper[1:, 0, 1:, 1:]
    elif q_tensor == "shift":
        n = R0.shape[0]
        Qt = R0 - np.einsum("il,k->ikl", np.eye(n), curv.RicPaper[0, 1:])
    else:
        raise ValueError("q_tensor must be 'C' or 'shift'")
    Q = -0.25j * zp ** 3 * Qt
    return O, P, Q


@dataclass
class TorsionReport:
    point: np.ndarray
    fiber: complex
    ricci_shift: bool
    O_num: np.ndarray          # antisymmetric part
    P_num: np.ndarray
    Q_num: np.ndarray          # antisymmetric part
    O_formula: np.ndarray      # antisymmetric part
    P_formula: np.ndarray
    Q_formula: np.ndarray      # antisymmetric part
    eta0_leakage: float
    other_leakage: float
    deta0_residual: float
    deltas: dict = field(default_factory=dict)

    def max_delta(self) -> float:
        return max(self.deltas.values())

    def summary(self) -> dict:
        return {
            "fiber": [self.fiber.real, self.fiber.imag],
            "ricci_shift": self.ricci_shift,
            "O_num": float(np.max(np.abs(self.O_num))),
            "P_num": float(np.max(np.abs(self.P_num))),
            "Q_num": float(np.max(np.abs(self.Q_num))),
            "O_formula": float(np.max(np.abs(self.O_formula))),
            "P_formula": float(np.max(np.abs(self.P_formula))),
            "Q_formula": float(np.max(np.abs(self.Q_formula))),
            "eta0_leakage": self.eta0_leakage,
            "other_leakage": self.other_leakage,
            "deta0_residual": self.deta0_residual,
            **{f"delta {k}": v for k, v in self.deltas.items()},
        }


def torsion_oracle(fbp: FrameBundlePatch, a: complex, X_base, ricci_shift: bool = True,
                   slice_below: float = FIBER_EXCLUSION, ef: EtaForms | None = None) -> TorsionReport:
    """Numeric O, P, Q by expanding the d eta^i residual 2-form in the adapted coframe.

    For |a| < slice_below the slice through fixed a is used (r = |a| is not
    differentiable at 0); otherwise a is a coordinate of the patch.
    """
    a = complex(a)
    if ef is None:
        ef = eta_forms(fbp, fixed=a if abs(a) < slice_below else None)
    X = ef.point(X_base, a)
    pc = pseudoconnection(ef, ricci_shift)
    n = fbp.n

    e0 = ef.eta0.at(X)
    et = ef.eta.at(X)
    etb = et.conj()
    vs = pc.varsigma.at(X)
    ka = pc.kappa.at(X)
    ze = pc.zeta.at(X)
    ga = ef.gamma.at(X)[1:, 1:]

    deta = d(ef.eta).at(X)
    expected = (_wedge1(ze, e0[None, :]) + _wedge1(vs[None, :], et)
                - np.einsum("ijmn->imn", _wedge1(ga, et[None, :, :]))
                + _wedge1(ka[None, :], etb))
    rho = deta - expected

    deta0 = d(ef.eta0).at(X)
    epsn = fbp.eps[1:]
    r0 = deta0 - _wedge1(vs + vs.conj(), e0) - 1j * np.einsum("i,imn->mn", epsn, _wedge1(et, etb))

    rows = [e0] + list(et) + list(etb) + [ga[i, j] for i, j in itertools.combinations(range(n), 2)]
    if ef.extended:
        da = ef.da.at(X)
        rows += [da, da.conj()]
    Theta = np.array(rows, dtype=complex)
    E = slice(1, n + 1)
    Eb = slice(n + 1, 2 * n + 1)
    O = np.empty((n, n, n), dtype=complex)
    P = np.empty_like(O)
    Q = np.empty_like(O)
    leak0, leak = 0.0, 0.0
    for i in range(n):
        c = expand_2form(rho[i], Theta)
        O[i] = 0.5 * c[E, E]
        P[i] = c[E, Eb]
        Q[i] = 0.5 * c[Eb, Eb]
        leak0 = max(leak0, float(np.max(np.abs(c[0, :]))))
        rest = c[2 * n + 1:, :]
        leak = max(leak, float(np.max(np.abs(rest))) if rest.size else 0.0)

    curv = fbp.curvature(np.asarray(X_base, dtype=float))
    Of, Pf, Qf = torsion_formula(curv, a, ricci_shift)
    Of, Qf = antisym(Of), antisym(Qf)
    deltas = {
        "O": float(np.max(np.abs(O - Of))),
        "P": float(np.max(np.abs(P - Pf))),
        "Q": float(np.max(np.abs(Q - Qf))),
    }
    return TorsionReport(np.asarray(X_base, dtype=float), a, ricci_shift, O, P, Q, Of, Pf, Qf,
                         leak0, leak, float(np.max(np.abs(r0))), deltas)


def torsion_formula_general(M_t, N_t, R_t, a, variant: str = "SE2", tol: float = 1e-10):
    """Torsion coefficients as polynomials in a_0 = 1 + i r, the fiber coordinates and M, N, R.

    ``variant="SE2"``: a is a complex scalar, r = |a|, R enters.
    ``variant="SLGSE"``: a is an n x n matrix with A^H A = r^2 1 (definite eps);
    the R inputs are not used by this variant.
    """
    M_t = np.asarray(M_t, dtype=complex)
    N_t = np.asarray(N_t, dtype=complex)
    R_t = np.asarray(R_t, dtype=complex)
    Mb, Nb, Rb = M_t.conj(), N_t.conj(), R_t.conj()
    sw = lambda T: np.swapaxes(T, -1, -2)  # noqa: E731
    if variant == "SE2":
        a = complex(a)
        ab = a.conjugate()
        r = abs(a)
        a0 = 1 + 1j * r
        a0b = a0.conjugate()
        A2 = abs(a0) ** 2
        half = -0.5j * (1 + 2 * r * r)
        O = (half * (a0 * R_t + ab * Rb) + ab * A2 * M_t + a0b * ab ** 2 * N_t
             - a0 * r * r * Mb - a * a0 ** 2 * Nb)
        P = (half * (a0b * Rb + a * R_t) + a0b * A2 * M_t - a0b * r * r * sw(M_t) + 2 * ab * a0b ** 2 * N_t
             + a * A2 * sw(Mb) - a * r * r * Mb + 2 * a0 * a ** 2 * sw(Nb) - 1j * a * (a0 * R_t + ab * Rb))
        Q = (a * a0b ** 2 * M_t + a0b ** 3 * N_t - a0b * a ** 2 * Mb - a ** 3 * Nb
             - 1j * a * (a0b * Rb + a * R_t))
        return O, P, Q
    if variant != "SLGSE":
        raise ValueError("variant must be 'SE2' or 'SLGSE'")
    A = np.asarray(a, dtype=complex)
    n = A.shape[0]
    G = A.conj().T @ A
    r2 = float(np.real(np.trace(G))) / n
    if np.max(np.abs(G - r2 * np.eye(n))) > tol:
        raise ValueError("fiber matrix violates the normalization A^H A = r^2 1")
    r = np.sqrt(r2)
    Ab = A.conj()
    a0 = 1 + 1j * r
    a0b = a0.conjugate()
    A2 = abs(a0) ** 2
    O = (A2 * np.einsum("ikn,nl->ikl", M_t, Ab) + a0b * np.einsum("imn,mk,nl->ikl", N_t, Ab, Ab)
         - a0 * np.einsum("ij,jkl->ikl", A, np.einsum("jml,mk->jkl", Mb, Ab) + a0 * Nb))
    P = (a0b * (A2 * M_t - np.einsum("imn,ml,nk->ikl", M_t, A, Ab) + 2 * a0b * np.einsum("iml,mk->ikl", N_t, Ab))
         + np.einsum("ij,jkl->ikl", A, A2 * sw(Mb) - np.einsum("jmn,mk,nl->jkl", Mb, Ab, A)
                     + 2 * a0 * np.einsum("jmk,ml->jkl", Nb, A)))
    Q = (a0b ** 2 * (np.einsum("iml,mk->ikl", M_t, A) + a0b * N_t)
         - np.einsum("ij,nl,jkn->ikl", A, A, a0b * Mb + np.einsum("jmn,mk->jkn", Nb, A)))
    return O, P, Q


def sample_fiber(rng: np.random.Generator, radius: float = 0.8, exclusion: float = FIBER_EXCLUSION) -> complex:
    while True:
        re, im = rng.uniform(-radius, radius, size=2)
        a = complex(re, im)
        if exclusion <= abs(a) <= radius:
            return a


# ---------------------------------------------------------------------------
# reports


def conformal_flatness_report(metric: MetricField, samples: int = 3, fibers=(0.3 + 0.1j,), seed: int = 0,
                              ricci_shift: bool = True) -> dict:
    """Per-sample norms of antisymmetrized Q (numeric and formula), the C-tensor and the standard Weyl tensor."""
    fbp = FrameBundlePatch(metric)
    rng = np.random.default_rng(seed)
    rows = []
    cache = {}
    for s in range(samples):
        X = fbp.sample(rng)
        curv = fbp.curvature(X)
        W = weyl(curv.Riem, curv.eps)
        for a in fibers:
            a = complex(a)
            key = abs(a) < FIBER_EXCLUSION
            if key not in cache or not key:
                cache[key] = eta_forms(fbp, fixed=a if key else None)
            rep = torsion_oracle(fbp, a, X, ricci_shift, ef=cache[key])
            rows.append({
                "sample": s,
                "fiber": [a.real, a.imag],
                "Q_num": float(np.max(np.abs(rep.Q_num))),
                "Q_formula": float(np.max(np.abs(rep.Q_formula))),
                "C_tensor": float(np.max(np.abs(curv.CPaper))),
                "weyl": float(np.max(np.abs(W))),
                "riemann": float(np.max(np.abs(curv.Riem))),
            })
    keys = ("Q_num", "Q_formula", "C_tensor", "weyl", "riemann")
    return {"metric": metric.name, "rows": rows,
            "max": {k: max(r[k] for r in rows) for k in keys},
            "min": {k: min(r[k] for r in rows) for k in keys}}


def quaternionic_skeleton(metric: MetricField, X=None, seed: int = 0, fiber: complex = 0.3 + 0.2j) -> dict:
    """Delta, J, K on the frame bundle of a signature (p+1, p) metric and the normalized d lambda^0."""
    sig = metric.sig
    p = sig.q
    if sig.p_plus_1 != p + 1 or p < 1:
        raise MetricError(f"quaternionic skeleton needs signature (p+1, p) with p >= 1, got ({sig.p_plus_1}, {sig.q})")
    fbp = FrameBundlePatch(metric)
    n = fbp.n
    if X is None:
        X = fbp.sample(np.random.default_rng(seed))
    X = np.asarray(X, dtype=float)

    # Delta coordinates: (d_omega^1..n, d_gamma^0_1..n)
    I, Z = np.eye(p), np.zeros((p, p))
    Kw = np.block([[Z, -I], [I, Z]])
    K = np.block([[Kw, np.zeros((n, n))], [np.zeros((n, n)), -Kw]])
    J = np.block([[np.zeros((n, n)), -np.eye(n)], [np.eye(n), np.zeros((n, n))]])
    out = {
        "K^2 + 1": float(np.max(np.abs(K @ K + np.eye(2 * n)))),
        "JK + KJ": float(np.max(np.abs(J @ K + K @ J))),
        "J^2 + 1": float(np.max(np.abs(J @ J + np.eye(2 * n)))),
    }

    # dual frame of the coframe {omega, gamma^a_b (a < b)}
    om, ga = fbp.omega.at(X), fbp.gamma.at(X)
    Theta = np.array(list(om) + [ga[a, b] for a, b in fbp.pairs])
    Edual = np.linalg.inv(Theta)
    idx = {pr: fbp.d + k for k, pr in enumerate(fbp.pairs)}
    dw = Edual[:, 1:fbp.d]
    dg0 = Edual[:, [idx[(0, i)] for i in range(1, fbp.d)]]
    Lam = dw - 1j * dg0
    dom0 = d(fbp.omega[0]).at(X)
    out["Lagrangian"] = float(np.max(np.abs(Lam.T @ dom0 @ Lam)))
    # K restricted to Delta preserves Delta = ker omega^0
    Kvec = np.hstack([dw, dg0]) @ K
    out["K preserves Delta"] = float(np.max(np.abs(om[0] @ Kvec)))

    lam0, lam = lambda_forms(fbp)
    l = lam.at(X)
    lb = l.conj()
    W = _wedge1(l, lb)
    expected = 1j * (np.einsum("imn->mn", W[:p]) - np.einsum("imn->mn", W[p:]))
    out["d lambda0"] = float(np.max(np.abs(d(lam0).at(X) - expected)))

    # quaternionic eta with A = a 1
    ef = eta_forms(fbp, fixed=None)
    D = ef.dim

    def q_eta_coeff(X_):
        L = np.asarray(ef.lam.coeff(X_))
        a_, r_ = ef.a(X_), ef.r(X_)
        s = 1.0 / (1 + r_ * r_)
        Lb = hd.conj(L)
        top = L[:p] + a_ * Lb[p:]
        bot = L[p:] - a_ * Lb[:p]
        return s * np.concatenate([top, bot], axis=0)

    eta0 = FormField(1, D, lambda X_: np.asarray(ef.lam0.coeff(X_)) / (1 + ef.r(X_) * ef.r(X_)), ())
    eta = FormField(1, D, q_eta_coeff, (n,))
    fiber = complex(fiber)
    Xe = ef.point(X, fiber)
    r = abs(fiber)
    e0 = eta0.at(Xe)
    le = ef.lam.at(Xe)
    We = _wedge1(le, le.conj())
    dl0 = 1j * (np.einsum("imn->mn", We[:p]) - np.einsum("imn->mn", We[p:]))
    pred = -2 * r / (1 + r * r) * _wedge1(ef.dr.at(Xe), e0) + dl0 / (1 + r * r)
    out["d eta0"] = float(np.max(np.abs(d(eta0).at(Xe) - pred)))
    X0 = np.concatenate([X, [0.0, 0.0]])
    out["eta = lambda at a = 0"] = float(np.max(np.abs(eta.at(X0) - ef.lam.at(X0))))
    return out
