"""Coordinate-chart semi-Riemannian metrics and their curvature.

Riemann convention: R(X,Y)Z = [nabla_X, nabla_Y]Z - nabla_[X,Y] Z with
R^a_bcd = dx^a(R(d_c, d_d) d_b).  In an orthonormal frame this is the
convention for which d(gamma) + gamma^gamma = 1/2 R omega^omega on the frame
bundle; the calibration test in the lcontact suite pins it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import hyperdual as hd
from ._generic import finish, has_hd2, inv
from .hyperdual import base_value, lift_coordinate, slot


__all__ = [
    "Signature",
    "MetricField",
    "MetricError",
    "FrameBreakdown",
    "CurvatureData",
    "AdaptedFrame",
    "CATALOG",
    "catalog",
    "metric_from_config",
    "metric_derivatives",
    "christoffel",
    "coordinate_riemann",
    "riemann_identities",
    "riemann",
    "adapt_frame",
    "weyl",
    "frame_tensors",
]


class MetricError(ValueError):
    pass


class FrameBreakdown(ArithmeticError):
    pass


@dataclass(frozen=True)
class Signature:
    p_plus_1: int
    q: int

    def __post_init__(self):
        if self.p_plus_1 < 1 or self.q < 0:
            raise MetricError("signature needs at least one positive direction")

    @property
    def dim(self) -> int:
        return self.p_plus_1 + self.q

    @property
    def eps(self) -> np.ndarray:
        return np.array([1.0] * self.p_plus_1 + [-1.0] * self.q)


@dataclass
class MetricField:
    name: str
    sig: Signature
    components: Callable
    chart: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.sig.dim

    def __call__(self, x):
        return self.components(np.asarray(x) if not isinstance(x, np.ndarray) else x)

    def in_chart(self, x) -> bool:
        xb = np.array([float(base_value(v)) for v in np.ravel(x)])
        return bool(np.all(xb > self.chart[:, 0]) and np.all(xb < self.chart[:, 1]))

    def sample_point(self, rng: np.random.Generator, margin: float = 0.05) -> np.ndarray:
        lo, hi = self.chart[:, 0], self.chart[:, 1]
        w = hi - lo
        return np.array([rng.uniform(l + margin * s, h - margin * s) for l, h, s in zip(lo, hi, w)])


def _dot(x, y):
    out = 0.0
    for a, b in zip(x, y):
        out = out + a * b
    return out


def _scaled_identity(factor, d):
    out = np.empty((d, d), dtype=object)
    for i in range(d):
        for j in range(d):
            out[i, j] = factor if i == j else 0.0
    return finish(out)


def _poly(terms, x):
    """terms: list of (coef, exponents)."""
    out = 0.0
    for coef, expo in terms:
        t = coef
        for xi, k in zip(x, expo):
            if k:
                t = t * hd.power(xi, int(k))
        out = out + t
    return out


def _default_conformal_terms(d):
    terms = [(0.3, _unit(d, 0)), (0.2, _unit(d, 1, 2)), (-0.15, _unit2(d, 0, d - 1))]
    if d > 2:
        terms.append((0.1, _unit(d, 2, 2)))
    return terms


def _unit(d, i, k=1):
    e = [0] * d
    e[i] = k
    return e


def _unit2(d, i, j):
    e = [0] * d
    e[i] += 1
    e[j] += 1
    return e


def _flat(sig, params):
    eps = sig.eps
    g = np.diag(eps)
    return lambda x: g.copy()


def _conformal(sig, params):
    d = sig.dim
    terms = params.get("terms")
    if terms is None:
        terms = _default_conformal_terms(d)
    terms = [(float(c), list(e)) for c, e in terms]
    eps = sig.eps

    def g(x):
        f = _poly(terms, x)
        factor = hd.exp(2.0 * f)
        out = np.empty((d, d), dtype=object)
        for i in range(d):
            for j in range(d):
                out[i, j] = factor * eps[i] if i == j else 0.0
        return finish(out)

    return g


def _stereo(sign, radius):
    R2 = radius * radius

    def factor(x):
        s = _dot(x, x)
        return 4.0 * R2 * R2 / ((R2 + sign * s) * (R2 + sign * s))

    return factor


def _sphere_like(sign):
    def build(sig, params):
        if sig.q:
            raise MetricError("sphere/hyperbolic metrics are Riemannian")
        fac = _stereo(sign, float(params.get("radius", 1.0)))
        d = sig.dim
        return lambda x: _scaled_identity(fac(x), d)
    return build


def _product_spheres(sig, params):
    if sig.q:
        raise MetricError("product_spheres is Riemannian")
    d = sig.dim
    d1 = int(params.get("split", d // 2))
    if not 1 <= d1 < d:
        raise MetricError("split must leave two nonempty factors")
    f1 = _stereo(1.0, float(params.get("radius1", 1.0)))
    f2 = _stereo(1.0, float(params.get("radius2", 1.0)))

    def g(x):
        a, b = f1(x[:d1]), f2(x[d1:])
        out = np.empty((d, d), dtype=object)
        for i in range(d):
            for j in range(d):
                out[i, j] = (a if i < d1 else b) if i == j else 0.0
        return finish(out)

    return g


def _random_poly_coeffs(d, seed, scale, box):
    """Symmetric perturbation h_ij = c0 + c1.x + x.C2.x with sup-norm bound scale/d on the box."""
    rng = np.random.default_rng(seed)
    c0 = np.zeros((d, d))
    c1 = np.zeros((d, d, d))
    c2 = np.zeros((d, d, d, d))
    for i in range(d):
        for j in range(i, d):
            a = rng.uniform(-1, 1)
            b = rng.uniform(-1, 1, size=d)
            c = rng.uniform(-1, 1, size=(d, d))
            c = 0.5 * (c + c.T)
            c0[i, j] = c0[j, i] = a
            c1[i, j] = c1[j, i] = b
            c2[i, j] = c2[j, i] = c
    bound = np.abs(c0) + box * np.abs(c1).sum(-1) + box * box * np.abs(c2).sum((-1, -2))
    k = scale / (d * bound.max())
    return c0 * k, c1 * k, c2 * k


def _random_poly(sig, params):
    d = sig.dim
    seed = int(params.get("seed", 42))
    scale = float(params.get("scale", 0.1))
    if not 0 < scale <= 0.1:
        raise MetricError("random_poly perturbation scale must be in (0, 0.1]")
    box = float(params.get("box", 0.8))
    c0, c1, c2 = _random_poly_coeffs(d, seed, scale, box)
    eps = sig.eps

    def g(x):
        out = np.empty((d, d), dtype=object)
        for i in range(d):
            for j in range(i, d):
                v = c0[i, j] + _dot(c1[i, j], x)
                for k in range(d):
                    v = v + x[k] * _dot(c2[i, j, k], x)
                if i == j:
                    v = v + eps[i]
                out[i, j] = out[j, i] = v
        return finish(out)

    return g


CATALOG = {
    "flat": _flat,
    "conformal": _conformal,
    "sphere": _sphere_like(1.0),
    "hyperbolic": _sphere_like(-1.0),
    "product_spheres": _product_spheres,
    "random_poly": _random_poly,
}

DEFAULT_SIGNATURE = {
    "flat": (2, 1),
    "conformal": (3, 1),
    "sphere": (3, 0),
    "hyperbolic": (3, 0),
    "product_spheres": (4, 0),
    "random_poly": (3, 1),
}


def default_chart(name, d):
    if name == "hyperbolic":
        # stay well inside the unit ball: |x|^2 <= 0.64
        h = 0.8 / np.sqrt(d)
    else:
        h = 0.8
    return np.array([[-h, h]] * d)


def catalog(name: str, params: dict | None = None, signature=None, chart=None, check: bool = True) -> MetricField:
    if name not in CATALOG:
        raise MetricError(f"unknown metric {name!r}; choose from {sorted(CATALOG)}")
    params = dict(params or {})
    if signature is None:
        signature = DEFAULT_SIGNATURE[name]
    sig = signature if isinstance(signature, Signature) else Signature(*signature)
    if sig.dim < 2:
        raise MetricError("need dim >= 2")
    chart = default_chart(name, sig.dim) if chart is None else np.asarray(chart, dtype=float)
    if chart.shape != (sig.dim, 2) or np.any(chart[:, 0] >= chart[:, 1]):
        raise MetricError("chart must be a nonempty box [[lo, hi], ...] of the metric dimension")
    M = MetricField(name, sig, CATALOG[name](sig, params), chart, params)
    if check:
        check_metric(M)
    return M


def check_metric(M: MetricField, samples: int = 16, seed: int = 7, min_eig: float = 1e-6):
    rng = np.random.default_rng(seed)
    pts = [M.chart.mean(axis=1)] + [M.sample_point(rng, margin=0.0) for _ in range(samples)]
    for x in pts:
        g = np.asarray(M(x), dtype=float)
        if not np.allclose(g, g.T, atol=1e-14):
            raise MetricError("metric is not symmetric")
        w = np.linalg.eigvalsh(g)
        if np.min(np.abs(w)) < min_eig:
            raise MetricError(f"metric degenerate at {x}")
        if int(np.sum(w > 0)) != M.sig.p_plus_1:
            raise MetricError(f"metric signature changes at {x}")


def metric_from_config(cfg: dict) -> MetricField:
    try:
        name = cfg["name"]
    except (KeyError, TypeError):
        raise MetricError("metric config needs a 'name'")
    sig = cfg.get("signature")
    if sig is not None:
        sig = Signature(int(sig[0]), int(sig[1]))
        if "dim" in cfg and int(cfg["dim"]) != sig.dim:
            raise MetricError("dim does not match signature")
    elif "dim" in cfg:
        d = int(cfg["dim"])
        base = DEFAULT_SIGNATURE[name] if name in DEFAULT_SIGNATURE else (d, 0)
        sig = Signature(d - base[1], base[1]) if d - base[1] >= 1 else Signature(d, 0)
    return catalog(name, cfg.get("params"), sig, cfg.get("chart"))


# ---------------------------------------------------------------------------
# Levi-Civita data


def metric_derivatives(M: MetricField, x):
    """g, dg[k] = d_k g, ddg[k, l] = d_k d_l g at x (x may itself be HD2)."""
    d = M.dim
    x = np.asarray(x, dtype=object) if has_hd2(np.asarray(x, dtype=object)) else np.asarray(x, dtype=float)
    g = None
    dg = [None] * d
    ddg = [[None] * d for _ in range(d)]
    for k in range(d):
        for l in range(k, d):
            y = M(lift_coordinate(x, k, l))
            if g is None:
                g = slot(y, "value")
            if l == k:
                dg[k] = slot(y, "d1")
            ddg[k][l] = ddg[l][k] = slot(y, "d12")
    return g, dg, ddg


def _first_derivatives(M: MetricField, x):
    d = M.dim
    g, dg = None, []
    for k in range(d):
        y = M(lift_coordinate(x, k, k))
        if g is None:
            g = slot(y, "value")
        dg.append(slot(y, "d1"))
    return g, dg


def _stack(mats):
    d = len(mats)
    obj = any(has_hd2(m) for m in mats)
    out = np.empty((d,) + np.shape(mats[0]), dtype=object if obj else np.result_type(*[np.asarray(m).dtype for m in mats]))
    for k, m in enumerate(mats):
        out[k] = m
    return out


def christoffel(M: MetricField, x) -> np.ndarray:
    """Gamma[k, i, j] = Gamma^k_ij."""
    g, dg = _first_derivatives(M, np.asarray(x, dtype=object))
    return _christoffel_from(g, _stack(dg))


def _christoffel_from(g, dg):
    # dg[k, i, j] = d_k g_ij ; first kind G[l, i, j] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    first = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    ginv = inv(g)
    return finish(np.einsum("kl,lij->kij", ginv, first))


def coordinate_riemann(M: MetricField, x):
    """Gamma and R[a, b, c, d] = R^a_bcd from one pass of second partials."""
    g, dg, ddg = metric_derivatives(M, x)
    d = M.dim
    dg = _stack(dg)
    ddg = _stack([_stack(row) for row in ddg])  # ddg[c, k, i, j] = d_c d_k g_ij
    ginv = inv(g)
    first = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    Gam = np.einsum("kl,lij->kij", ginv, first)
    # d_c of first-kind symbols: dfirst[c, l, i, j]
    dfirst = 0.5 * (np.einsum("cijl->clij", ddg) + np.einsum("cjil->clij", ddg) - ddg)
    # d_c Gamma^a_ij = -g^{af} d_c g_fh Gamma^h_ij + g^{af} d_c first_{f,ij}
    dGam = (-np.einsum("af,cfh,hij->caij", ginv, dg, Gam) + np.einsum("af,cfij->caij", ginv, dfirst))
    # R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb
    R = (np.einsum("cadb->abcd", dGam) - np.einsum("dacb->abcd", dGam)
         + np.einsum("ace,edb->abcd", Gam, Gam) - np.einsum("ade,ecb->abcd", Gam, Gam))
    del d
    return finish(Gam), finish(R)


@dataclass
class AdaptedFrame:
    e: np.ndarray
    x: np.ndarray
    eps: np.ndarray


def adapt_frame(M: MetricField, x, u=None, tol: float = 1e-10) -> AdaptedFrame:
    """Orthonormal frame with e_0 = u, the rest from coordinate vectors.

    With u=None the first coordinate direction, normalized, is used.  Seeds are
    tried in coordinate order; a near-null intermediate vector is skipped and
    the next seed taken.  Columns 1..n are then ordered positive first.
    """
    g = M(x)
    d = M.dim
    if u is None:
        if base_value(g[0, 0]) <= 0:
            raise FrameBreakdown("first coordinate direction is not spacelike-positive")
        u = np.array([1.0 / hd.sqrt(g[0, 0])] + [0.0] * (d - 1), dtype=object)
    u = np.asarray(u, dtype=object)
    guu = _dot(u, g @ u)
    if abs(base_value(guu) - 1.0) > tol:
        raise MetricError(f"u is not unit: g(u,u) = {base_value(guu)}")
    cols = [u]
    signs = [1.0]
    seeds = list(range(d))
    for s in seeds:
        if len(cols) == d:
            break
        v = np.array([1.0 if k == s else 0.0 for k in range(d)], dtype=object)
        for c, sg in zip(cols, signs):
            v = v - (sg * _dot(c, g @ v)) * c
        n2 = _dot(v, g @ v)
        if abs(base_value(n2)) < 1e-9:
            continue
        sg = 1.0 if base_value(n2) > 0 else -1.0
        cols.append(v / hd.sqrt(sg * n2))
        signs.append(sg)
    if len(cols) < d:
        raise FrameBreakdown("Gram-Schmidt broke down for every seed order")
    order = [0] + sorted(range(1, d), key=lambda k: -signs[k])
    e = np.empty((d, d), dtype=object)
    for j, k in enumerate(order):
        e[:, j] = cols[k]
    eps = np.array([signs[k] for k in order])
    if not np.array_equal(eps, M.sig.eps):
        raise MetricError("frame signature does not match the metric signature")
    return AdaptedFrame(finish(e), np.asarray(x), eps)


@dataclass
class CurvatureData:
    point: np.ndarray
    Gamma: np.ndarray
    Riem: np.ndarray       # frame components R^i_jkl
    RicPaper: np.ndarray   # (1/(n+1)) eps^m_n R^n_jmk
    CPaper: np.ndarray     # R^i_jkl - eps^i_k RicPaper_jl
    Ric: np.ndarray        # standard Ricci R^m_jmk (frame)
    eps: np.ndarray


def frame_tensors(Rframe, eps):
    """Paper-normalized Ricci, paper C-tensor and standard Ricci from frame Riemann."""
    d = len(eps)
    ric_paper = np.einsum("m,mjmk->jk", eps, Rframe) / d
    C = Rframe - np.einsum("ik,jl->ijkl", np.diag(eps), ric_paper)
    ric = np.einsum("mjmk->jk", Rframe)
    return ric_paper, C, ric


def riemann(M: MetricField, x, frame: AdaptedFrame | None = None) -> CurvatureData:
    if frame is None:
        frame = adapt_frame(M, x)
    Gam, R = coordinate_riemann(M, x)
    e = frame.e
    einv = np.diag(frame.eps) @ e.T @ M(x)  # orthonormal: e^{-1} = eps e^t g
    Rf = np.einsum("ia,abcd,bj,ck,dl->ijkl", einv, R, e, e, e)
    ric_paper, C, ric = frame_tensors(Rf, frame.eps)
    return CurvatureData(np.asarray(x), Gam, Rf, ric_paper, C, ric, frame.eps)


def weyl(Rframe, eps) -> np.ndarray:
    """Standard Weyl tensor, lowered, in an orthonormal frame (zero for dim <= 3)."""
    N = len(eps)
    G = np.diag(eps)
    Rl = np.einsum("im,mjkl->ijkl", G, Rframe)
    if N <= 3:
        return np.zeros_like(Rl)
    ric = np.einsum("mjmk->jk", Rframe)
    S = float(np.einsum("jk,jk->", np.diag(1.0 / eps), ric))
    gg = np.einsum("ik,jl->ijkl", G, G) - np.einsum("il,jk->ijkl", G, G)
    P = (np.einsum("ik,jl->ijkl", ric, G) - np.einsum("il,jk->ijkl", ric, G)
         + np.einsum("jl,ik->ijkl", ric, G) - np.einsum("jk,il->ijkl", ric, G))
    return Rl - P / (N - 2) + S / ((N - 1) * (N - 2)) * gg


def riemann_identities(Rframe, eps) -> dict:
    """Residuals of the algebraic symmetries of frame Riemann components."""
    Rl = np.einsum("im,mjkl->ijkl", np.diag(eps), Rframe)
    bianchi = Rframe + np.einsum("ijkl->iklj", Rframe) + np.einsum("ijkl->iljk", Rframe)
    return {
        "antisym (k,l)": float(np.max(np.abs(Rl + np.swapaxes(Rl, 2, 3)))),
        "antisym (i,j) lowered": float(np.max(np.abs(Rl + np.swapaxes(Rl, 0, 1)))),
        "pair symmetry": float(np.max(np.abs(Rl - np.einsum("ijkl->klij", Rl)))),
        "first Bianchi": float(np.max(np.abs(bianchi))),
    }
