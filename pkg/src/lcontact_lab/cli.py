"""Command-line front end: run a check suite and emit a JSON report.

Every subcommand produces rows ``{name, status, residual, tolerance}``.  A row
with a tolerance passes iff residual <= tolerance * LCONTACT_TOL_SCALE; rows
without a tolerance are recorded values (status "info") and do not affect the
aggregate.  Exit status: 0 all asserted rows pass, 1 some row fails, 2 bad
configuration or I/O.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import futuretube as ft
from . import lcontact as lc
from . import liemodel, utbundle
from .metric import MetricError, catalog, metric_from_config, riemann, riemann_identities, weyl


TOOL = "lcontact-lab"
TOL_ENV = "LCONTACT_TOL_SCALE"

# catalog entries whose standard Weyl tensor vanishes identically
CONFORMALLY_FLAT = {"flat", "sphere", "hyperbolic", "conformal"}
CONSTANT_CURVATURE = {"flat", "sphere", "hyperbolic"}


class ConfigError(ValueError):
    pass


def tol_scale() -> float:
    raw = os.environ.get(TOL_ENV, "1")
    try:
        s = float(raw)
    except ValueError:
        raise ConfigError(f"{TOL_ENV} must be a real number, got {raw!r}")
    if not np.isfinite(s) or s <= 0:
        raise ConfigError(f"{TOL_ENV} must be positive")
    return s


@dataclass
class Report:
    config: dict
    rows: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    scale: float = 1.0

    def add(self, name: str, residual: float, tolerance: float | None):
        residual = float(residual)
        if tolerance is None:
            status = "info"
        else:
            tol = tolerance * self.scale
            status = "pass" if residual <= tol else "fail"
            tolerance = tol
        self.rows.append({"name": name, "status": status, "residual": residual, "tolerance": tolerance})

    @property
    def passed(self) -> bool:
        return all(r["status"] != "fail" for r in self.rows)

    def pass_vector(self) -> list:
        return [r["status"] for r in self.rows]

    def to_dict(self) -> dict:
        return {
            "tool": TOOL,
            "version": __version__,
            "config": self.config,
            "rows": self.rows,
            "aggregate": "pass" if self.passed else "fail",
            "extras": self.extras,
            "error": None,
        }


def parse_fiber(text: str) -> complex:
    """Parse 'a+bi' (also 'a', 'bi', 'a-bi', with i or j)."""
    s = text.replace(" ", "")
    if not s:
        raise ConfigError("empty fiber value")
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise ConfigError(f"cannot parse fiber value {text!r}; expected a+bi")


def load_metric(spec: str, dim: int | None = None):
    """Catalog name or path to a JSON metric config."""
    try:
        if spec.endswith(".json") or os.path.sep in spec:
            with open(spec, encoding="utf-8") as fh:
                cfg = json.load(fh)
            return metric_from_config(cfg)
        if dim is not None:
            return metric_from_config({"name": spec, "dim": dim})
        return catalog(spec)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read metric config {spec!r}: {exc}")
    except MetricError as exc:
        raise ConfigError(str(exc))


def _positive(n: int, what: str) -> int:
    if n < 1:
        raise ConfigError(f"{what} must be >= 1")
    return n


# ---------------------------------------------------------------------------
# suites


def run_mc_check(rep: Report, family: str, p: int, q: int | None, printed: bool = False):
    try:
        sc = liemodel.structure_constants(family, p, q)
    except (ValueError, liemodel.ConstraintError) as exc:
        raise ConfigError(str(exc))
    res = liemodel.mc_equation_residuals(family, p, q, sc=sc, completed=not printed)
    for name, v in res.items():
        rep.add(f"MC {name}", v, 1e-12)
    rep.add("Jacobi", liemodel.jacobi_residual(sc), 1e-10)
    rep.extras["equations"] = "printed" if printed else "completed"


def run_curvature(rep: Report, M, point):
    x = np.asarray(point, dtype=float) if point is not None else M.chart.mean(axis=1)
    if x.shape != (M.dim,):
        raise ConfigError(f"point must have {M.dim} coordinates")
    if not M.in_chart(x):
        raise ConfigError("point lies outside the metric chart")
    curv = riemann(M, x)
    for k, v in riemann_identities(curv.Riem, curv.eps).items():
        rep.add(f"Riemann {k}", v, 1e-9)
    fbp = lc.FrameBundlePatch(M)
    X = np.concatenate([x, np.zeros(len(fbp.pairs))])
    for k, v in fbp.calibration_residuals(X).items():
        rep.add(f"calibration {k}", v, 1e-8)
    rep.add("Riemann norm", np.max(np.abs(curv.Riem)), None)
    rep.add("standard Weyl norm", np.max(np.abs(weyl(curv.Riem, curv.eps))), None)
    rep.extras["ric_paper"] = curv.RicPaper.tolist()
    rep.extras["ric"] = curv.Ric.tolist()


def run_lemma_check(rep: Report, M, samples: int, seed: int):
    T = utbundle.TangentPatch(M)
    rng = np.random.default_rng(seed)
    worst = {}

    def bump(name, v):
        worst[name] = max(worst.get(name, 0.0), float(v))

    d = M.dim
    for _ in range(samples):
        pt = utbundle.sample_um(T, rng)
        Lv, rhs = utbundle.levi_matrices(T, pt.x, pt.u)
        bump("Levi = 1/2 ghat(., J.)", np.max(np.abs(Lv - rhs)))
        bump("Levi = -i ghat(., J.)", np.max(np.abs(Lv + 2j * rhs)))
        lam, lamb, _ = utbundle.lagrangian_splitting(T, pt.x, pt.u)
        Lf = utbundle.levi_form(T, pt.x, pt.u)
        bump("Levi null on Lambda", np.max(np.abs(lam.T @ Lf @ lam)))
        Jm, Km = utbundle.structure_maps(T, pt.x, pt.u)
        G = utbundle.sasaki_metric(T, pt.x, pt.u, frame="coordinate")
        I = np.eye(2 * d)
        bump("J^2 = -1", np.max(np.abs(Jm @ Jm + I)))
        bump("K^2 = 1", np.max(np.abs(Km @ Km - I)))
        bump("JK + KJ = 0", np.max(np.abs(Jm @ Km + Km @ Jm)))
        bump("ghat(J., J.) = ghat", np.max(np.abs(Jm.T @ G @ Jm - G)))
        bump("ghat(K., .) = ghat(., K.)", np.max(np.abs(Km.T @ G - G @ Km)))
        B = np.hstack([lam, lamb])
        Y = B @ rng.standard_normal(2 * (d - 1)) + 1j * (B @ rng.standard_normal(2 * (d - 1)))
        Y2 = B @ rng.standard_normal(2 * (d - 1)) + 1j * (B @ rng.standard_normal(2 * (d - 1)))
        herm = (Km @ Y.conj()) @ Lf @ (Km @ Y2.conj()) - np.conj(Y @ Lf @ Y2)
        bump("L(K conj Y1, K conj Y2) = conj L(Y1, Y2)", abs(herm))
        Ls = utbundle.levi_form(T, pt.x, pt.u, scale=2.0)
        bump("scaling theta by 2 doubles L", np.max(np.abs(Ls - 2 * Lf)))
    tolerances = {
        "Levi = 1/2 ghat(., J.)": 1e-9,
        "Levi = -i ghat(., J.)": 1e-9,
        "Levi null on Lambda": 1e-10,
        "J^2 = -1": 1e-12,
        "K^2 = 1": 1e-12,
        "JK + KJ = 0": 1e-12,
        "ghat(J., J.) = ghat": 1e-10,
        "ghat(K., .) = ghat(., K.)": 1e-10,
        "L(K conj Y1, K conj Y2) = conj L(Y1, Y2)": 1e-10,
        "scaling theta by 2 doubles L": 1e-12,
    }
    for name, v in worst.items():
        rep.add(name, v, tolerances[name])


def run_torsion(rep: Report, M, fiber: complex, samples: int, seed: int, ricci_shift: bool):
    fbp = lc.FrameBundlePatch(M)
    rng = np.random.default_rng(seed)
    ef = lc.eta_forms(fbp, fixed=fiber if abs(fiber) < lc.FIBER_EXCLUSION else None)
    worst = {}
    for _ in range(samples):
        X = fbp.sample(rng)
        r = lc.torsion_oracle(fbp, fiber, X, ricci_shift, ef=ef)
        vals = {
            "O numeric vs formula": r.deltas["O"],
            "P numeric vs formula": r.deltas["P"],
            "Q numeric vs formula": r.deltas["Q"],
            "eta0 leakage": r.eta0_leakage,
            "other leakage": r.other_leakage,
            "d eta0 structure equation": r.deta0_residual,
            "O numeric": float(np.max(np.abs(r.O_num))),
            "P numeric": float(np.max(np.abs(r.P_num))),
            "Q numeric": float(np.max(np.abs(r.Q_num))),
        }
        if ricci_shift:
            curv = fbp.curvature(X)
            Qs = lc.antisym(lc.torsion_formula(curv, fiber, True, q_tensor="shift")[2])
            vals["Q numeric vs shift tensor"] = float(np.max(np.abs(r.Q_num - Qs)))
        for k, v in vals.items():
            worst[k] = max(worst.get(k, 0.0), v)
    flat = M.name == "flat"
    for k, v in worst.items():
        if k in ("O numeric", "P numeric", "Q numeric"):
            tol = 1e-9 if flat else None
            if k == "Q numeric" and ricci_shift and M.name in CONSTANT_CURVATURE:
                tol = 1e-7
        elif k == "Q numeric vs formula" and ricci_shift and M.name not in CONSTANT_CURVATURE:
            tol = None  # recorded: the C-tensor form is not asserted for generic metrics
        else:
            tol = 1e-7
        rep.add(k, v, tol)


def run_conformal_report(rep: Report, M, samples: int, seed: int):
    out = lc.conformal_flatness_report(M, samples=samples, seed=seed)
    m = out["max"]
    if M.name in CONFORMALLY_FLAT:
        rep.add("standard Weyl norm", m["weyl"], 1e-8)
    else:
        rep.add("standard Weyl norm", m["weyl"], None)
        rep.add("standard Weyl min over samples", out["min"]["weyl"], None)
        rep.add("standard Weyl shortfall below 1e-3", max(0.0, 1e-3 - out["min"]["weyl"]), 0.0)
    if M.name in CONSTANT_CURVATURE:
        rep.add("Q numeric (antisymmetrized)", m["Q_num"], 1e-7)
        rep.add("Q formula (antisymmetrized)", m["Q_formula"], 1e-7)
    else:
        rep.add("Q numeric (antisymmetrized)", m["Q_num"], None)
        rep.add("Q formula (antisymmetrized)", m["Q_formula"], None)
    rep.add("C tensor norm", m["C_tensor"], None)
    rep.extras["samples"] = out["rows"]


def run_futuretube(rep: Report, m: int, samples: int, seed: int):
    if m < 2:
        raise ConfigError("futuretube needs m >= 2")
    rng = np.random.default_rng(seed)
    w = {"rho": 0.0, "round trip": 0.0, "|u| = 1": 0.0, "d rho(X)": 0.0, "L(X, conj X)": 0.0,
         "signature mismatches": 0.0, "leaf action group law": 0.0}
    L = ft.ambient_levi(m)
    for _ in range(samples):
        z, lcd = ft.sample_surface(rng, m)
        w["rho"] = max(w["rho"], abs(ft.rho(z)))
        back = ft.leaf_coordinates(z)
        w["round trip"] = max(w["round trip"], float(np.max(np.abs(back.t - lcd.t))),
                              float(np.max(np.abs(back.u - lcd.u))), abs(back.c - lcd.c))
        w["|u| = 1"] = max(w["|u| = 1"], abs(float(back.u @ back.u) - 1))
        X = ft.null_field(z)
        w["d rho(X)"] = max(w["d rho(X)"], abs(ft.d_rho(z) @ X))
        w["L(X, conj X)"] = max(w["L(X, conj X)"], abs(X.conj() @ L @ X))
        if ft.transverse_levi_signature(z) != (m - 1, 0):
            w["signature mismatches"] += 1
        c1 = complex(rng.uniform(0.5, 2), rng.uniform(-1, 1))
        c2 = complex(rng.uniform(0.5, 2), rng.uniform(-1, 1))
        lhs = ft.leaf_action(ft.leaf_action(z, c2), c1)
        rhs = ft.leaf_action(z, ft.compose_parameters(c1, c2))
        w["leaf action group law"] = max(w["leaf action group law"], float(np.max(np.abs(lhs - rhs))))
    for k in ("rho", "round trip", "|u| = 1", "d rho(X)", "L(X, conj X)", "leaf action group law"):
        rep.add(k, w[k], 1e-12)
    rep.add("signature mismatches", w["signature mismatches"], 0.0)
    z, _ = ft.sample_surface(rng, m)
    r3, r4 = ft.flow_residual(z, 1e-3), ft.flow_residual(z, 1e-4)
    rep.add("flow residual at eps=1e-3", r3, 1e-5)
    rep.add("flow residual quadratic decay", abs(r3 / r4 / 100.0 - 1.0), 0.05)


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog=TOOL, description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", "-o", help="write the JSON report here (default: stdout)")
        return p

    p = common(sub.add_parser("mc-check", help="Maurer-Cartan equations from structure constants"))
    p.add_argument("--family", choices=["split", "quat"], required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--printed", action="store_true", help="check the equations as printed instead of the completed set")

    p = common(sub.add_parser("curvature", help="curvature identities and frame-bundle calibration at a point"))
    p.add_argument("--metric", required=True, help="catalog name or JSON config path")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--point", default=None, help="comma-separated coordinates (default: chart center)")

    p = common(sub.add_parser("lemma-check", help="Levi form, Sasaki metric and (J, K) identities"))
    p.add_argument("--metric", required=True)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--samples", type=int, default=100)

    p = common(sub.add_parser("torsion", help="numeric torsion against closed forms"))
    p.add_argument("--metric", required=True)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--fiber", default="0.3+0.1i")
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--no-ricci-shift", action="store_true")

    p = common(sub.add_parser("conformal-report", help="Weyl and Q norms across samples"))
    p.add_argument("--metric", required=True)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--samples", type=int, default=3)

    p = common(sub.add_parser("futuretube", help="tube over the future light cone"))
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--samples", type=int, default=100)
    return ap


def run(args: argparse.Namespace) -> Report:
    config = {k: v for k, v in vars(args).items() if k != "output"}
    rep = Report(config, scale=tol_scale())
    cmd = args.command
    if cmd == "mc-check":
        run_mc_check(rep, args.family, args.p, args.q, args.printed)
    elif cmd == "curvature":
        M = load_metric(args.metric, args.dim)
        point = None
        if args.point:
            try:
                point = [float(v) for v in args.point.split(",")]
            except ValueError:
                raise ConfigError(f"cannot parse point {args.point!r}")
        run_curvature(rep, M, point)
    elif cmd == "lemma-check":
        run_lemma_check(rep, load_metric(args.metric, args.dim), _positive(args.samples, "samples"), args.seed)
    elif cmd == "torsion":
        run_torsion(rep, load_metric(args.metric, args.dim), parse_fiber(args.fiber),
                    _positive(args.samples, "samples"), args.seed, not args.no_ricci_shift)
    elif cmd == "conformal-report":
        run_conformal_report(rep, load_metric(args.metric, args.dim), _positive(args.samples, "samples"), args.seed)
    elif cmd == "futuretube":
        run_futuretube(rep, args.m, _positive(args.samples, "samples"), args.seed)
    return rep


def write_atomic(path: str, text: str):
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(payload: dict, output: str | None):
    text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if output:
        write_atomic(output, text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    output = getattr(args, "output", None)
    try:
        rep = run(args)
    except ConfigError as exc:
        payload = {"tool": TOOL, "version": __version__, "config": {k: v for k, v in vars(args).items() if k != "output"},
                   "rows": [], "aggregate": "error", "extras": {},
                   "error": {"type": "config", "message": str(exc)}}
        try:
            _emit(payload, output)
        except OSError:
            pass
        return 2
    try:
        _emit(rep.to_dict(), output)
    except OSError as exc:
        sys.stderr.write(f"{TOOL}: cannot write report: {exc}\n")
        return 2
    return 0 if rep.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
