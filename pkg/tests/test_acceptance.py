"""End-to-end acceptance checks, one per numbered criterion.

Each test prints a single PASS/FAIL verdict line before asserting, so the
suite output doubles as an acceptance report.
"""

import math

import numpy as np

from mvqp import bounds, cli, covariance, gaussian, mixed, numerics, qpotential, specfun, states
from mvqp.numerics import Grid


def _verdict(num: int, name: str, ok: bool) -> None:
    print(f"ACCEPTANCE {num:02d} {name}: {'PASS' if ok else 'FAIL'}")
    assert ok


def _ho_state(n: int, dq0: float, hbar: float = 1.0) -> states.PolarState:
    half = (8.0 + 2.0 * math.sqrt(n)) * dq0
    return states.ho_eigenstate(n, dq0, Grid.line(-half, half, 513), hbar)


def _random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n))
    return a @ a.T + 0.3 * np.eye(n)


def _random_gaussian_mixture(rng: np.random.Generator, grid: Grid) -> mixed.MixedState:
    k = int(rng.integers(2, 5))
    raw = rng.uniform(0.2, 1.0, k)
    weights = raw / raw.sum()
    comps = []
    q = grid.mesh[0]
    for _ in range(k):
        var = float(rng.uniform(0.5, 2.0))
        eta = float(rng.uniform(-1.0, 1.0))
        base = states.gaussian_polar(np.array([[var]]), [eta], grid)
        kappa = float(rng.uniform(-0.5, 0.5))
        p0 = float(rng.uniform(-1.0, 1.0))
        comps.append(states.with_phase(base, 0.5 * kappa * q * q + p0 * q))
    return mixed.MixedState(weights, tuple(comps))


def test_criterion_01_ho_mvqp_ladder():
    # mass = 1/nu convention, so the ladder reads (2n+1) hbar^2 nu / (8 dq0^2)
    nu, mass, hbar = 1.0, 1.0, 1.0
    dq0 = math.sqrt(hbar / (2.0 * mass * nu))
    worst = 0.0
    for n in [0, 1, 2, 5, 10]:
        s = _ho_state(n, dq0)
        expect = (2 * n + 1) * hbar * hbar * nu / (8.0 * dq0 * dq0)
        rel = abs(qpotential.mvqp(s, 1.0 / mass) - expect) / expect
        worst = max(worst, rel)
    _verdict(1, f"ho-mvqp-ladder (worst rel {worst:.2e})", worst <= 1e-6)


def test_criterion_02_ho_linear_bound():
    nu, mass = 1.0, 1.0
    dq0 = math.sqrt(1.0 / (2.0 * mass * nu))
    ok = True
    for n in [0, 1, 2, 5]:
        s = _ho_state(n, dq0)
        expect = nu / (8.0 * (2 * n + 1) * dq0 * dq0)
        for zeta, zeta0 in [(1.0, 0.0), (-2.3, 1.7), (0.4, -0.9)]:
            ev = bounds.bound_functional(
                s, 1.0 / mass, zeta * s.grid.mesh[0] + zeta0
            )
            ok &= abs(ev.value - expect) <= 1e-6 * expect
            if n == 0:
                ok &= abs(ev.slack) <= 1e-6 * ev.mvqp
            else:
                ok &= ev.slack > 0.0
    _verdict(2, "ho-linear-bound", ok)


def test_criterion_03_gaussian_equality_random_spd():
    rng = np.random.default_rng(2026)
    # 3-D count above the CLI default: ill-conditioned covariances need the
    # extra resolution to hold the grid route at 1e-5
    counts = {1: 513, 2: 221, 3: 141}
    worst_analytic = 0.0
    worst_grid = 0.0
    for trial in range(50):
        n = trial % 3 + 1
        v = _random_spd(rng, n)
        blocks = np.linalg.cholesky(2.0 * v)
        s = gaussian.SymplecticMatrix(
            blocks, np.zeros((n, n)), np.zeros((n, n)), np.linalg.inv(blocks).T
        )
        g = gaussian.GaussianPureState(s, np.zeros(n), np.zeros(n))
        vnc = gaussian.nonclassical_cov(g)
        worst_analytic = max(
            worst_analytic, float(np.abs(v @ vnc - 0.25 * np.eye(n)).max())
        )
        grid = states.gaussian_recommended_grid(v, np.zeros(n), counts[n])
        vnc_grid = qpotential.vnc(states.gaussian_polar(v, np.zeros(n), grid))
        worst_grid = max(
            worst_grid, float(np.abs(v @ vnc_grid - 0.25 * np.eye(n)).max())
        )
    ok = worst_analytic <= 1e-8 and worst_grid <= 1e-5
    _verdict(
        3,
        f"gaussian-equality (analytic {worst_analytic:.2e}, grid {worst_grid:.2e})",
        ok,
    )


def test_criterion_04_random_test_function_suite():
    builtins = {
        "ho0": states.ho_eigenstate(0, 1.0, states.ho_recommended_grid(0, 1.0)),
        "ho1": states.ho_eigenstate(1, 1.0, states.ho_recommended_grid(1, 1.0)),
        "ho5": states.ho_eigenstate(5, 1.0, states.ho_recommended_grid(5, 1.0)),
        "pt32": states.poschl_teller_state(3, 2, states.pt_recommended_grid()),
        "gauss2": states.gaussian_polar(
            np.array([[1.0, 0.3], [0.3, 2.0]]),
            [0.0, 0.0],
            states.gaussian_recommended_grid(
                np.array([[1.0, 0.3], [0.3, 2.0]]), [0.0, 0.0], 221
            ),
        ),
    }
    violations = 0
    worst = math.inf
    for name, s in builtins.items():
        mm = np.eye(s.grid.dim)
        mv = qpotential.mvqp(s, mm)
        for t0 in bounds.random_test_functions(s, 200, seed=11):
            try:
                ev = bounds.bound_functional(s, mm, t0)
            except Exception:
                continue
            worst = min(worst, ev.slack / mv)
            if ev.slack < -1e-6 * mv:
                violations += 1
    ok = violations == 0
    _verdict(4, f"random-test-functions (min slack/mvqp {worst:.2e})", ok)


def test_criterion_05_theorem2_one_df_saturation():
    worst = 0.0
    for n in range(6):
        s = states.ho_eigenstate(n, 1.0, states.ho_recommended_grid(n, 1.0))
        mv = qpotential.mvqp(s, 1.0)
        worst = max(worst, abs(bounds.theorem2_bound(s, 1.0) - mv) / mv)
    grid = states.pt_recommended_grid()
    for mu in range(1, 11):
        s = states.poschl_teller_state(mu, mu, grid)
        mv = qpotential.mvqp(s, 1.0)
        worst = max(worst, abs(bounds.theorem2_bound(s, 1.0) - mv) / mv)
    _verdict(5, f"theorem2-1df-saturation (worst rel {worst:.2e})", worst <= 1e-5)


def test_criterion_06_thermal_closed_form():
    nu, dq0, hbar = 1.0, 1.0, 1.0
    ok = True
    worst = 0.0
    for beta_hnu in [0.5, 1.0, 2.0, 8.0]:
        beta = beta_hnu / (hbar * nu)
        ms = mixed.thermal_state(beta, nu, dq0)
        d = mixed.assemble_density(ms)
        exact = mixed.thermal_mvqp_exact(beta, nu, dq0)
        rel = abs(mixed.mixed_mvqp(d, 1.0) - exact) / exact
        worst = max(worst, rel)
        ok &= rel <= 1e-3
        # all components are real eigenstates: no classical covariance and
        # no mixture-induced correction
        vc = sum(
            w * covariance.covariance_report(c).vc
            for w, c in zip(ms.weights, ms.components)
        )
        ok &= float(np.abs(vc).max()) == 0.0
        ok &= float(np.abs(mixed.delta_vnc(ms)).max()) <= 1e-8
    _verdict(6, f"thermal-closed-form (worst rel {worst:.2e})", ok)


def test_criterion_07_inverted_oscillator():
    nu, mass, hbar = 1.0, 1.0, 1.0
    dq0 = math.sqrt(hbar / (2.0 * mass * nu))
    a0 = math.sqrt(2.0 * dq0 * dq0 / hbar)
    g0 = gaussian.GaussianPureState(
        gaussian.SymplecticMatrix(
            np.array([[a0]]), np.zeros((1, 1)), np.zeros((1, 1)), np.array([[1.0 / a0]])
        ),
        np.zeros(1),
        np.zeros(1),
        hbar,
    )
    h = gaussian.QuadraticHamiltonian(
        m=np.array([[1.0 / mass]]), l=np.array([[-mass * nu * nu]])
    )
    target = hbar * hbar / (8.0 * mass)
    ok = True
    for t in [0.0, 0.25, 0.5, 1.0]:
        gt = gaussian.evolve(g0, h, t)
        dq2 = float(gaussian.position_cov(gt)[0, 0])
        mv = gaussian.gaussian_mvqp(gt, 1.0 / mass)
        ok &= abs(mv * dq2 - target) <= 1e-8 * target
        dp2 = float(gaussian.momentum_cov(gt)[0, 0])
        if t > 0.0:
            ok &= dq2 * dp2 > hbar * hbar / 4.0
    _verdict(7, "inverted-oscillator-product", ok)


def test_criterion_08_sech_well_figures():
    ok = True
    # n = 1 column is exactly the top-state mean QP (units hbar^2/2m = 1)
    grid = states.pt_recommended_grid()
    for mu in range(1, 11):
        s = states.poschl_teller_state(mu, mu, grid)
        mv = 2.0 * qpotential.mvqp(s, 1.0)
        closed = bounds.pt_bound_tanh_n(mu, 1) * 2.0
        ok &= abs(closed - mv) <= 1e-6 * mv
    rows = list(cli.figure1_rows(40, [1, 2, 3, 5, 7], 1.0, 1.0))
    by_mu: dict[int, dict[int, float]] = {}
    for mu, n, val in rows:
        by_mu.setdefault(mu, {})[n] = val
    for mu, vals in by_mu.items():
        ok &= vals[2] == 0.0
        ok &= vals[1] > vals[3] > vals[5] > vals[7] > 0.0
    # closed form vs quadrature for a representative well
    s4 = states.poschl_teller_state(4, 4, grid)
    q = grid.mesh[0]
    for n in [1, 3, 5, 7]:
        quad = bounds.bound_functional(s4, 1.0, np.tanh(q) ** n).value
        ok &= abs(bounds.pt_bound_tanh_n(4, n) - quad) <= 1e-5 * quad
    for mu_max in [40, 200]:
        diffs = [row[3] for row in cli.figure2_rows(mu_max, 1.0, 1.0)]
        ok &= all(d > 0 for d in diffs)
        ok &= all(a > b for a, b in zip(diffs, diffs[1:]))
    _verdict(8, "sech-well-figures", ok)


def test_criterion_09_theorem4_chain_and_implication():
    grid = states.pt_recommended_grid()
    suite = [
        states.ho_eigenstate(n, 1.0, states.ho_recommended_grid(n, 1.0))
        for n in range(4)
    ]
    suite += [states.poschl_teller_state(lam, mu, grid) for lam, mu in [(1, 1), (3, 2), (5, 5)]]
    v = np.array([[1.3]])
    ggrid = states.gaussian_recommended_grid(v, [0.0], 513)
    base = states.gaussian_polar(v, [0.0], ggrid)
    suite.append(base)
    suite.append(states.with_phase(base, 0.4 * ggrid.mesh[0] ** 2))
    counterexamples = 0
    ok = True
    for s in suite:
        rep = covariance.covariance_report(s)
        mv = qpotential.mvqp(s, 1.0)
        t4 = covariance.theorem4_check(rep, mv, 1.0)
        scale = max(float(rep.vt[0, 0] * rep.v[0, 0]), 0.25)
        ok &= t4.lhs32 >= -1e-8 * scale
        ok &= t4.delta >= -1e-8 * scale
        rsur_ok = covariance.rsur_check(rep).passed
        if t4.passed and not rsur_ok:
            counterexamples += 1
    ok &= counterexamples == 0
    _verdict(9, f"theorem4-chain ({counterexamples} counterexamples)", ok)


def test_criterion_10_mixture_identities():
    rng = np.random.default_rng(99)
    # box reaches 8 sigma past the worst-case component mean
    grid = Grid.line(-14.0, 14.0, 301)
    ok = True
    worst_psd = 0.0
    worst_total = 0.0
    for trial in range(100):
        ms = _random_gaussian_mixture(rng, grid)
        dv = mixed.delta_vnc(ms)
        w, _ = numerics.sym_eig(0.5 * (dv + dv.T))
        scale = max(float(np.trace(dv)), 1e-12)
        worst_psd = min(worst_psd, float(w[0]) / scale)
        ok &= float(w[0]) >= -1e-8 * scale
        d = mixed.assemble_density(ms)
        total = mixed.vnc_convex_decomposition(ms)[2][0, 0]
        dens = mixed.density_vnc(d)[0, 0]
        rel = abs(total - dens) / abs(dens)
        worst_total = max(worst_total, rel)
        ok &= rel <= 1e-4
        if trial < 10:
            lhs, rhs = mixed.diagonal_derivative_identity(d)
            sc = float(np.abs(rhs).max())
            ok &= float(np.abs(lhs - rhs).max()) <= 1e-5 * sc
    _verdict(
        10,
        f"mixture-identities (psd {worst_psd:.2e}, total rel {worst_total:.2e})",
        ok,
    )


def test_criterion_11_symplectic_suite():
    rng = np.random.default_rng(7)
    ok = True
    worst = 0.0
    for trial in range(100):
        n = trial % 3 + 1
        h = gaussian.QuadraticHamiltonian(
            m=_random_spd(rng, n),
            l=0.5 * (lambda x: x + x.T)(rng.normal(size=(n, n))),
            c=rng.normal(size=(n, n)),
        )
        t1, t2 = rng.uniform(0.05, 0.6, 2)
        s1 = gaussian.symplectic_propagator(h, float(t1))
        s2 = gaussian.symplectic_propagator(h, float(t2))
        s12 = gaussian.symplectic_propagator(h, float(t1 + t2))
        res = max(
            s1.constraint_residual(),
            s12.constraint_residual(),
            float(np.abs(s12.matrix() - (s1 @ s2).matrix()).max()),
        )
        worst = max(worst, res)
        ok &= res <= 1e-9
    # inverted-oscillator closed forms: spreading variance and its mean QP
    nu, mass, hbar = 1.0, 1.0, 1.0
    dq0_sq = hbar / (2.0 * mass * nu)
    a0 = math.sqrt(2.0 * dq0_sq / hbar)
    g0 = gaussian.GaussianPureState(
        gaussian.SymplecticMatrix(
            np.array([[a0]]), np.zeros((1, 1)), np.zeros((1, 1)), np.array([[1.0 / a0]])
        ),
        np.zeros(1),
        np.zeros(1),
        hbar,
    )
    h = gaussian.QuadraticHamiltonian(
        m=np.array([[1.0 / mass]]), l=np.array([[-mass * nu * nu]])
    )
    for t in [0.0, 0.3, 0.8]:
        gt = gaussian.evolve(g0, h, t)
        var_expect = dq0_sq * math.cosh(2.0 * nu * t)
        qp_expect = hbar * hbar / (8.0 * mass * var_expect)
        ok &= abs(gaussian.position_cov(gt)[0, 0] - var_expect) <= 1e-8 * var_expect
        ok &= abs(gaussian.gaussian_mvqp(gt, 1.0 / mass) - qp_expect) <= 1e-8 * qp_expect
    _verdict(11, f"symplectic-suite (worst residual {worst:.2e})", ok)


def test_criterion_12_powerlaw_bounds():
    eta, var = 0.4, 1.0
    sigma = math.sqrt(var)
    grid = Grid.line(eta - 12.0 * sigma, eta + 12.0 * sigma, 1025)
    s = states.gaussian_polar(np.array([[var]]), [eta], grid)
    q = grid.mesh[0]
    base = bounds.bound_functional(s, 1.0, q - eta).value
    ok = bounds.powerlaw_coefficients(1) == 1.0
    worst = 0.0
    for k in [1, 3, 5, 7, 9]:
        val = bounds.bound_functional(s, 1.0, (q - eta) ** k).value
        expect = bounds.powerlaw_coefficients(k) * base
        rel = abs(val - expect) / expect
        worst = max(worst, rel)
        ok &= rel <= 1e-5
    seq = [bounds.powerlaw_coefficients(k) for k in (1, 3, 5, 7, 9)]
    ok &= all(a > b for a, b in zip(seq, seq[1:]))
    _verdict(12, f"powerlaw-bounds (worst rel {worst:.2e})", ok)
