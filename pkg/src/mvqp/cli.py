"""Command-line front end: verification suites, reports, and figure data.

Subcommands: verify (run the invariant suite for a state, exit 0 iff all
checks pass), report (emit the quantum-potential and covariance reports as
JSON), figure1/figure2 (sech-well bound-family data as CSV), and sweep
(mvqp and bounds as a function of hbar).  Exit codes: 0 success, 1 check
failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import bounds, covariance, gaussian, mixed, numerics, qpotential, specfun, states
from .errors import MvqpError, OutOfRange
from .numerics import Grid

FLOAT_FMT = "{:.17g}"


def _fmt(x) -> str:
    return FLOAT_FMT.format(float(x))


# --- configuration ------------------------------------------------------------

@dataclass
class RunConfig:
    command: str
    state: str = "ho"
    n: str = ""
    lam: int = 1
    mu: int = 1
    beta_hnu: float = 1.0
    k: int | None = None
    dim: int = 1
    vdiag: str = ""
    a: str = ""
    t: float = 0.0
    mass: float = 1.0
    nu: float = 1.0
    hbar: float = 1.0
    grid_points: int | None = None
    grid_box: str = ""
    out: str | None = None
    fmt: str = "csv"
    seed: int = 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvqp",
        description="Mean-quantum-potential and uncertainty-bound toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("verify", "run the invariant suite for a state"),
        ("report", "emit quantum-potential and covariance reports"),
        ("figure1", "sech-well tanh^n bound family data"),
        ("figure2", "sech-well mvqp vs linear bound data"),
        ("sweep", "mvqp and bounds as a function of hbar"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--state", default="ho",
                       help="ho | pt | gaussian | coherent | squeezed | "
                            "thermal | inverted | path to a state CSV | "
                            "path to a mixture JSON")
        p.add_argument("--n", default="", help="quantum number (or list for figure1)")
        p.add_argument("--lambda", dest="lam", type=int, default=0,
                       help="sech-well depth parameter")
        p.add_argument("--mu", type=int, default=0, help="sech-well level (or max for figures)")
        p.add_argument("--beta-hnu", dest="beta_hnu", type=float, default=1.0,
                       help="thermal dimensionless inverse temperature")
        p.add_argument("--K", dest="k", type=int, default=None,
                       help="thermal truncation order (adaptive when omitted)")
        p.add_argument("--dim", type=int, default=1, help="degrees of freedom")
        p.add_argument("--vdiag", default="", help="comma list of position variances")
        p.add_argument("--a", default="", help="comma list of squeeze factors")
        p.add_argument("--t", type=float, default=0.0, help="evolution time")
        p.add_argument("--mass", type=float, default=1.0)
        p.add_argument("--nu", type=float, default=1.0)
        p.add_argument("--hbar", type=float, default=1.0)
        p.add_argument("--grid-points", dest="grid_points", type=int, default=None)
        p.add_argument("--grid-box", dest="grid_box", default="",
                       help="per-axis lo:hi[,lo:hi...] grid override")
        p.add_argument("--out", default=None, help="output path (stdout when omitted)")
        p.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv")
        p.add_argument("--seed", type=int, default=0)
    return parser


def _parse_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _parse_ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _grid_override(cfg: RunConfig, default: Grid) -> Grid:
    if not cfg.grid_box and cfg.grid_points is None:
        return default
    specs = []
    if cfg.grid_box:
        ranges = [tuple(float(v) for v in part.split(":")) for part in cfg.grid_box.split(",")]
    else:
        ranges = [(ax.lo, ax.hi) for ax in default.axes]
    for i, (lo, hi) in enumerate(ranges):
        count = cfg.grid_points if cfg.grid_points else default.axes[min(i, default.dim - 1)].count
        specs.append((lo, hi, count))
    return Grid.box(specs)


# --- state construction -------------------------------------------------------

@dataclass
class StateBundle:
    name: str
    hbar: float
    mass: float
    polar: states.PolarState | None = None
    gauss: gaussian.GaussianPureState | None = None
    mixture: mixed.MixedState | None = None
    extras: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        if self.polar is not None:
            return self.polar.grid.dim
        if self.gauss is not None:
            return self.gauss.dim
        return self.mixture.grid.dim

    def kinetic(self) -> np.ndarray:
        return np.eye(self.dim) / self.mass


def build_state(cfg: RunConfig) -> StateBundle:
    name = cfg.state
    hbar, mass, nu = cfg.hbar, cfg.mass, cfg.nu
    dq0 = math.sqrt(hbar / (2.0 * mass * nu))
    if name == "ho":
        n = _parse_ints(cfg.n)[0] if cfg.n else 0
        grid = _grid_override(cfg, states.ho_recommended_grid(n, dq0))
        return StateBundle(name, hbar, mass,
                           polar=states.ho_eigenstate(n, dq0, grid, hbar),
                           extras={"n": n, "dq0": dq0, "nu": nu})
    if name == "pt":
        lam = cfg.lam if cfg.lam else max(cfg.mu, 1)
        mu = cfg.mu if cfg.mu else lam
        grid = _grid_override(cfg, states.pt_recommended_grid())
        return StateBundle(name, hbar, mass,
                           polar=states.poschl_teller_state(lam, mu, grid, hbar),
                           extras={"lam": lam, "mu": mu})
    if name == "gaussian":
        vdiag = _parse_floats(cfg.vdiag) if cfg.vdiag else [dq0 * dq0] * cfg.dim
        v = np.diag(vdiag)
        blocks = np.sqrt(2.0 * v / hbar)
        s = gaussian.SymplecticMatrix(blocks, np.zeros_like(v),
                                      np.zeros_like(v), np.linalg.inv(blocks))
        g = gaussian.GaussianPureState(s, np.zeros(len(vdiag)), np.zeros(len(vdiag)), hbar)
        grid = _grid_override(
            cfg, states.gaussian_recommended_grid(v, np.zeros(len(vdiag)),
                                                  _gauss_counts(len(vdiag))))
        return StateBundle(name, hbar, mass, polar=gaussian.to_polar(g, grid),
                           gauss=g, extras={"v": v})
    if name == "coherent":
        g = gaussian.GaussianPureState.coherent(cfg.dim, hbar=hbar)
        return StateBundle(name, hbar, mass, gauss=g)
    if name == "squeezed":
        factors = _parse_floats(cfg.a) if cfg.a else [2.0] * cfg.dim
        ndim = len(factors)
        a = np.diag(factors)
        s = gaussian.SymplecticMatrix(a, np.zeros((ndim, ndim)),
                                      np.zeros((ndim, ndim)), np.linalg.inv(a))
        g = gaussian.GaussianPureState(s, np.zeros(ndim), np.zeros(ndim), hbar)
        if cfg.t != 0.0:
            h = gaussian.QuadraticHamiltonian(m=nu * np.eye(ndim), l=nu * np.eye(ndim))
            g = gaussian.evolve(g, h, cfg.t)
        return StateBundle(name, hbar, mass, gauss=g,
                           extras={"a": factors, "t": cfg.t, "nu": nu})
    if name == "inverted":
        g = gaussian.GaussianPureState(
            gaussian.SymplecticMatrix(
                np.array([[math.sqrt(2.0 * dq0 * dq0 / hbar)]]),
                np.zeros((1, 1)), np.zeros((1, 1)),
                np.array([[math.sqrt(hbar / (2.0 * dq0 * dq0))]]),
            ),
            np.zeros(1), np.zeros(1), hbar)
        h = gaussian.QuadraticHamiltonian(m=np.array([[1.0 / mass]]),
                                          l=np.array([[-mass * nu * nu]]))
        g = gaussian.evolve(g, h, cfg.t)
        return StateBundle(name, hbar, mass, gauss=g,
                           extras={"t": cfg.t, "nu": nu, "dq0": dq0})
    if name == "thermal":
        beta = cfg.beta_hnu / (hbar * nu)
        ms = mixed.thermal_state(beta, nu, dq0, cfg.k, hbar=hbar)
        return StateBundle(name, hbar, mass, mixture=ms,
                           extras={"beta": beta, "nu": nu, "dq0": dq0,
                                   "beta_hnu": cfg.beta_hnu})
    if name.endswith(".json"):
        ms = mixed.load_mixture(name)
        return StateBundle("mixture", ms.hbar, mass, mixture=ms)
    if name.endswith(".csv"):
        return StateBundle("csv", hbar, mass, polar=states.load_state_csv(name))
    raise ValueError(f"unknown state {name!r}")


def _gauss_counts(ndim: int) -> int:
    return {1: 513, 2: 221, 3: 81}.get(ndim, 81)


# --- verify -------------------------------------------------------------------

@dataclass
class Check:
    name: str
    margin: float
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "margin": self.margin, "passed": bool(self.passed)}


def _polar_checks(b: StateBundle, seed: int) -> list[Check]:
    s = b.polar
    mm = b.kinetic()
    out = []
    rep = qpotential.qp_report(s, mm)
    out.append(Check("mvqp_positive", rep.mvqp, rep.mvqp > 0.0))
    trace = 0.5 * float(np.tensordot(rep.vnc, mm))
    out.append(Check("trace_identity",
                     abs(rep.mvqp - trace) / max(rep.mvqp, 1e-300),
                     abs(rep.mvqp - trace) <= 1e-6 * max(rep.mvqp, 1e-300)))
    lhs = s.hbar**2 / 4.0 * rep.q_matrix
    rhs = rep.vnc @ mm
    mat_err = float(np.abs(lhs - rhs).max()) / max(float(np.abs(rhs).max()), 1e-300)
    out.append(Check("matrix_identity", mat_err, mat_err <= 1e-6))
    t2 = bounds.theorem2_bound(s, mm)
    out.append(Check("eigenvalue_bound", rep.mvqp - t2,
                     rep.mvqp - t2 >= -1e-5 * rep.mvqp))
    _, _, lin = bounds.linear_bound(s, mm)
    out.append(Check("linear_bound", rep.mvqp - lin,
                     rep.mvqp - lin >= -1e-6 * rep.mvqp))
    worst = math.inf
    for t0 in bounds.random_test_functions(s, 20, seed):
        try:
            ev = bounds.bound_functional(s, mm, t0)
        except MvqpError:
            continue
        worst = min(worst, ev.slack)
    out.append(Check("random_test_functions", worst,
                     worst >= -1e-6 * rep.mvqp))
    total = float(np.trace(bounds.auxiliary_covariance(s, mm))) * s.hbar**2 / 8.0
    out.append(Check("auxiliary_sum_identity",
                     abs(total - rep.mvqp) / max(rep.mvqp, 1e-300),
                     abs(total - rep.mvqp) <= 1e-4 * max(rep.mvqp, 1e-300)))
    cov = covariance.covariance_report(s)
    rs = covariance.rsur_check(cov)
    out.append(Check("rsur", rs.min_eigenvalue, rs.passed))
    mc = covariance.min_quantum_correlation(cov, mm)
    out.append(Check("min_quantum_correlation", mc.trace - mc.lambda_max, mc.passed))
    if s.grid.dim == 1:
        t4 = covariance.theorem4_check(cov, rep.mvqp, b.mass)
        out.append(Check("theorem4", min(t4.lhs31, t4.lhs32, t4.delta), t4.passed))
        sat = bounds.theorem2_bound(s, mm)
        out.append(Check("one_df_saturation",
                         abs(sat - rep.mvqp) / max(rep.mvqp, 1e-300),
                         abs(sat - rep.mvqp) <= 1e-5 * max(rep.mvqp, 1e-300)))
    vc_norm = float(np.abs(cov.vc).max())
    if vc_norm < 1e-6 * max(float(np.abs(cov.vt).max()), 1e-300):
        out.append(Check("nonclassical_relation", vc_norm,
                         covariance.no_classical_corr_check(cov, mm)))
    return out


def _gaussian_checks(b: StateBundle) -> list[Check]:
    g = b.gauss
    mm = b.kinetic()
    out = []
    v = gaussian.position_cov(g)
    vnc = gaussian.nonclassical_cov(g)
    err = float(np.abs(v @ vnc - g.hbar**2 / 4.0 * np.eye(g.dim)).max())
    out.append(Check("gaussian_equality", err, err <= 1e-8 * g.hbar**2 / 4.0 + 1e-14))
    mv = gaussian.gaussian_mvqp(g, mm)
    _, _, lin = bounds.linear_bound(g, mm)
    if g.dim == 1:
        out.append(Check("linear_bound_saturation", abs(mv - lin),
                         abs(mv - lin) <= 1e-8 * max(mv, 1e-300)))
    else:
        out.append(Check("linear_bound_holds", mv - lin,
                         mv - lin >= -1e-8 * max(mv, 1e-300)))
    rep = covariance.gaussian_covariance_report(g)
    rs = covariance.rsur_check(rep)
    out.append(Check("rsur", rs.min_eigenvalue, rs.passed))
    qc = gaussian.gaussian_qp(g, mm, g.eta_q)
    out.append(Check("peak_value_identity", abs(qc - 2.0 * mv),
                     abs(qc - 2.0 * mv) <= 1e-10 * max(qc, 1e-300)))
    if b.name == "inverted":
        dq2 = float(v[0, 0])
        target = g.hbar**2 / (8.0 * b.mass)
        out.append(Check("qp_variance_product", abs(mv * dq2 - target),
                         abs(mv * dq2 - target) <= 1e-8 * target))
        if b.extras.get("t", 0.0) > 0.0:
            dp2 = float(gaussian.momentum_cov(g)[0, 0])
            out.append(Check("strict_heisenberg", dq2 * dp2 - g.hbar**2 / 4.0,
                             dq2 * dp2 > g.hbar**2 / 4.0))
    return out


def _mixture_checks(b: StateBundle) -> list[Check]:
    ms = b.mixture
    mm = b.kinetic()
    out = []
    d = mixed.assemble_density(ms)
    mv = mixed.mixed_mvqp(d, 1.0 / b.mass)
    out.append(Check("mixed_mvqp_positive", mv, mv > 0.0))
    t3 = mixed.theorem3_bound(ms, mm)
    out.append(Check("component_eigenvalue_bound", mv - t3, mv >= t3 - 1e-6 * mv))
    conv = sum(
        w * qpotential.mvqp(c, mm) for w, c in zip(ms.weights, ms.components)
    )
    out.append(Check("convex_chain", mv - conv, mv >= conv - 1e-3 * mv))
    out.append(Check("min_correlation_chain", 0.0, mixed.mixed_min_correlation(ms, mm)))
    dv = mixed.delta_vnc(ms)
    w, _ = numerics.sym_eig(0.5 * (dv + dv.T))
    out.append(Check("delta_vnc_psd", float(w[0]),
                     float(w[0]) >= -1e-8 * max(float(np.trace(dv)), 1e-300)))
    lhs, rhs = mixed.diagonal_derivative_identity(d)
    scale = max(float(np.abs(rhs).max()), 1e-300)
    err = float(np.abs(lhs - rhs).max()) / scale
    out.append(Check("diagonal_derivative_identity", err, err <= 1e-5))
    if b.name == "thermal":
        exact = mixed.thermal_mvqp_exact(b.extras["beta"], b.extras["nu"],
                                         b.extras["dq0"], b.hbar)
        rel = abs(mv - exact) / exact
        out.append(Check("thermal_closed_form", rel, rel <= 1e-3))
    return out


def cmd_verify(cfg: RunConfig) -> int:
    b = build_state(cfg)
    checks = []
    if b.polar is not None:
        checks += _polar_checks(b, cfg.seed)
    if b.gauss is not None:
        checks += _gaussian_checks(b)
    if b.mixture is not None:
        checks += _mixture_checks(b)
    payload = {
        "state": b.name,
        "checks": [c.to_dict() for c in checks],
        "all_passed": all(c.passed for c in checks),
    }
    _emit(cfg, json.dumps(payload, indent=2, sort_keys=True))
    return 0 if payload["all_passed"] else 1


# --- report -------------------------------------------------------------------

def cmd_report(cfg: RunConfig) -> int:
    b = build_state(cfg)
    payload: dict = {"state": b.name, "hbar": b.hbar, "mass": b.mass}
    mm = b.kinetic()
    if b.polar is not None:
        rep = qpotential.qp_report(b.polar, mm)
        cov = covariance.covariance_report(b.polar)
        lower, upper, _ = bounds.linear_bound(b.polar, mm)
        payload["qp"] = rep.to_dict()
        payload["covariance"] = cov.to_dict()
        payload["bounds"] = {
            "linear_lower": lower,
            "linear_upper": upper,
            "theorem2": bounds.theorem2_bound(b.polar, mm),
        }
    if b.gauss is not None:
        g = b.gauss
        cov = covariance.gaussian_covariance_report(g)
        mv = gaussian.gaussian_mvqp(g, mm)
        payload["gaussian"] = {
            "mvqp": mv,
            "covariance": cov.to_dict(),
            "per_df_mvqp": [
                g.hbar**2 / 8.0 * float(np.linalg.inv(gaussian.position_cov(g))[i, i] * mm[i, i])
                for i in range(g.dim)
            ],
        }
        if b.name == "inverted":
            dq2 = float(gaussian.position_cov(g)[0, 0])
            target = g.hbar**2 / (8.0 * b.mass)
            payload["gaussian"]["qp_variance_product"] = mv * dq2
            payload["gaussian"]["saturates_product_bound"] = bool(
                abs(mv * dq2 - target) <= 1e-8 * target
            )
    if b.mixture is not None:
        ms = b.mixture
        d = mixed.assemble_density(ms)
        sum_k, delta, total = mixed.vnc_convex_decomposition(ms)
        payload["mixed"] = {
            "weights": ms.weights.tolist(),
            "mvqp": mixed.mixed_mvqp(d, 1.0 / b.mass),
            "theorem3_bound": mixed.theorem3_bound(ms, mm),
            "vnc_convex_sum": sum_k.tolist(),
            "delta_vnc": delta.tolist(),
            "vnc_total": total.tolist(),
        }
    _emit(cfg, json.dumps(payload, indent=2, sort_keys=True))
    return 0


# --- figures ------------------------------------------------------------------

def figure1_rows(mu_max: int, n_values: list[int], mass: float, hbar: float):
    """Rows (mu, n, bound value in units hbar^2/2m = 1)."""
    if mu_max < 1 or mu_max > specfun.MAX_PT_ORDER:
        raise OutOfRange(f"mu range must lie in [1, {specfun.MAX_PT_ORDER}]")
    unit = hbar * hbar / (2.0 * mass)
    for mu in range(1, mu_max + 1):
        for n in n_values:
            yield mu, n, bounds.pt_bound_tanh_n(mu, n, mass, hbar) / unit


def figure2_rows(mu_max: int, mass: float, hbar: float):
    """Rows (mu, mvqp, linear bound, difference) in units hbar^2/2m = 1."""
    if mu_max < 1 or mu_max > specfun.MAX_PT_ORDER:
        raise OutOfRange(f"mu range must lie in [1, {specfun.MAX_PT_ORDER}]")
    unit = hbar * hbar / (2.0 * mass)
    for mu in range(1, mu_max + 1):
        mv = bounds.pt_bound_tanh_n(mu, 1, mass, hbar) / unit
        dq2 = specfun.pt_position_variance(mu)
        lin = hbar * hbar / (8.0 * mass * dq2) / unit
        yield mu, mv, lin, mv - lin


def cmd_figure1(cfg: RunConfig) -> int:
    n_values = _parse_ints(cfg.n) if cfg.n else [1, 3, 5, 7]
    mu_max = cfg.mu if cfg.mu else 40
    rows = list(figure1_rows(mu_max, n_values, cfg.mass, cfg.hbar))
    even = sorted({n for n in n_values if n % 2 == 0})
    header = ["mu", "n", "bound"]
    lines = []
    if even:
        lines.append(f"# warning: even n {even} give an identically zero bound")
    _emit_table(cfg, header, rows, lines)
    return 0


def cmd_figure2(cfg: RunConfig) -> int:
    mu_max = cfg.mu if cfg.mu else 40
    rows = list(figure2_rows(mu_max, cfg.mass, cfg.hbar))
    _emit_table(cfg, ["mu", "mvqp", "linear_bound", "difference"], rows)
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    count = cfg.grid_points if cfg.grid_points else 17
    hbars = np.geomspace(0.1, 10.0, count)
    rows = []
    for h in hbars:
        sub = RunConfig(**{**cfg.__dict__, "hbar": float(h), "grid_points": None})
        b = build_state(sub)
        mm = b.kinetic()
        if b.gauss is not None:
            mv = gaussian.gaussian_mvqp(b.gauss, mm)
            _, _, lin = bounds.linear_bound(b.gauss, mm)
        elif b.polar is not None:
            mv = qpotential.mvqp(b.polar, mm)
            _, _, lin = bounds.linear_bound(b.polar, mm)
        else:
            d = mixed.assemble_density(b.mixture)
            mv = mixed.mixed_mvqp(d, 1.0 / b.mass)
            lin = mixed.theorem3_bound(b.mixture, mm)
        rows.append((float(h), mv, lin, mv - lin))
    _emit_table(cfg, ["hbar", "mvqp", "linear_bound", "difference"], rows)
    return 0


# --- output -------------------------------------------------------------------

def _emit_table(cfg: RunConfig, header: list[str], rows, comments: list[str] | None = None):
    if cfg.fmt == "json":
        payload = {
            "columns": header,
            "rows": [[float(x) for x in r] for r in rows],
        }
        if comments:
            payload["comments"] = comments
        _emit(cfg, json.dumps(payload, indent=2, sort_keys=True))
        return
    lines = list(comments or [])
    lines.append(",".join(header))
    for r in rows:
        lines.append(",".join(_fmt(x) for x in r))
    _emit(cfg, "\n".join(lines))


def _emit(cfg: RunConfig, text: str):
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


COMMANDS = {
    "verify": cmd_verify,
    "report": cmd_report,
    "figure1": cmd_figure1,
    "figure2": cmd_figure2,
    "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    cfg = RunConfig(
        command=ns.command, state=ns.state, n=ns.n, lam=ns.lam, mu=ns.mu,
        beta_hnu=ns.beta_hnu, k=ns.k, dim=ns.dim, vdiag=ns.vdiag, a=ns.a,
        t=ns.t, mass=ns.mass, nu=ns.nu, hbar=ns.hbar,
        grid_points=ns.grid_points, grid_box=ns.grid_box, out=ns.out,
        fmt=ns.fmt, seed=ns.seed,
    )
    try:
        return COMMANDS[cfg.command](cfg)
    except (MvqpError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
