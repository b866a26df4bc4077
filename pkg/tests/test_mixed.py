import json
import math

import numpy as np
import pytest

from mvqp import mixed, numerics, qpotential, states
from mvqp.errors import (
    DimensionUnsupported,
    GridMismatch,
    TruncationInsufficient,
)
from mvqp.numerics import Grid


def ho(n, dq0=1.0, grid=None):
    if grid is None:
        grid = states.ho_recommended_grid(n, dq0)
    return states.ho_eigenstate(n, dq0, grid)


def chirped_pair(p0=1.0):
    v = np.array([[1.0]])
    grid = states.gaussian_recommended_grid(v, [0.0], 513)
    base = states.gaussian_polar(v, [0.0], grid)
    q = grid.mesh[0]
    plus = states.with_phase(base, p0 * q)
    minus = states.with_phase(base, -p0 * q)
    return mixed.MixedState(np.array([0.5, 0.5]), (plus, minus))


def test_mixed_state_validation():
    g = states.ho_recommended_grid(1, 1.0)
    s0, s1 = ho(0, grid=g), ho(1, grid=g)
    with pytest.raises(ValueError):
        mixed.MixedState(np.array([0.6, 0.6]), (s0, s1))
    with pytest.raises(ValueError):
        mixed.MixedState(np.array([1.5, -0.5]), (s0, s1))
    with pytest.raises(GridMismatch):
        mixed.MixedState(np.array([0.5, 0.5]), (s0, ho(5)))
    ms = mixed.MixedState(np.array([0.25, 0.75]), (s0, s1))
    assert numerics.integrate_values(g, ms.diagonal_density()) == pytest.approx(
        1.0, abs=1e-8
    )


def test_density_grid_validation():
    g = states.ho_recommended_grid(0, 1.0)
    s = ho(0, grid=g)
    d = mixed.assemble_density(mixed.MixedState(np.array([1.0]), (s,)))
    assert d.values.shape == (g.shape[0], g.shape[0])
    bad = d.values.copy()
    bad[0, 1] += 1.0
    with pytest.raises(ValueError):
        mixed.DensityGrid(g, bad)
    with pytest.raises(DimensionUnsupported):
        mixed.DensityGrid(Grid.box([[-1, 1, 17], [-1, 1, 17]]), np.eye(17))


def test_pure_state_density_reduces_to_pure_mvqp():
    for s in [ho(0), ho(2)]:
        d = mixed.assemble_density(mixed.MixedState(np.array([1.0]), (s,)))
        assert mixed.mixed_mvqp(d, 1.0) == pytest.approx(
            qpotential.mvqp(s, 1.0), rel=1e-4
        )


def test_diagonal_derivative_identity():
    g = states.ho_recommended_grid(2, 1.0)
    ms = mixed.MixedState(np.array([0.5, 0.5]), (ho(0, grid=g), ho(2, grid=g)))
    d = mixed.assemble_density(ms)
    lhs, rhs = mixed.diagonal_derivative_identity(d)
    core = np.abs(g.mesh[0]) < 5.0
    assert np.abs(lhs[core] - rhs[core]).max() < 1e-5 * np.abs(rhs).max()


def test_delta_vnc_zero_for_real_components():
    g = states.ho_recommended_grid(2, 1.0)
    ms = mixed.MixedState(np.array([0.3, 0.7]), (ho(0, grid=g), ho(2, grid=g)))
    assert np.abs(mixed.delta_vnc(ms)).max() == 0.0


def test_delta_vnc_zero_for_single_component():
    v = np.array([[1.0]])
    grid = states.gaussian_recommended_grid(v, [0.0], 257)
    base = states.gaussian_polar(v, [0.0], grid)
    s = states.with_phase(base, 0.4 * grid.mesh[0])
    ms = mixed.MixedState(np.array([1.0]), (s,))
    # masked division in the mean phase gradient leaves quadrature residue
    assert np.abs(mixed.delta_vnc(ms)).max() < 1e-8


def test_delta_vnc_opposite_drifts():
    # equal-weight Gaussians with phase gradients +-p0 around a zero mean:
    # the phase-gradient variance is p0^2
    p0 = 1.0
    ms = chirped_pair(p0)
    delta = mixed.delta_vnc(ms)
    assert delta[0, 0] == pytest.approx(p0 * p0, rel=1e-8)
    sum_k, d2, total = mixed.vnc_convex_decomposition(ms)
    assert np.allclose(d2, delta)
    assert total[0, 0] == pytest.approx(sum_k[0, 0] + p0 * p0, rel=1e-8)


def test_convex_total_matches_density_route():
    ms = chirped_pair(0.8)
    d = mixed.assemble_density(ms)
    assert mixed.density_vnc(d)[0, 0] == pytest.approx(
        mixed.vnc_convex_decomposition(ms)[2][0, 0], rel=1e-4
    )
    assert mixed.mixed_mvqp(d, 1.0) == pytest.approx(
        mixed.mixed_mvqp_components(ms, 1.0), rel=1e-4
    )


def test_thermal_closed_form():
    # variance ratio and mean QP against the coth closed forms
    beta, nu, dq0 = 1.0, 1.0, 1.0
    ms = mixed.thermal_state(beta, nu, dq0)
    diag = ms.diagonal_density()
    q = ms.grid.mesh[0]
    var = numerics.integrate_values(ms.grid, diag * q * q)
    coth = 1.0 / math.tanh(0.5 * beta * nu)
    assert coth == pytest.approx(2.163953413738653, rel=1e-12)
    assert var == pytest.approx(dq0 * dq0 * coth, rel=1e-6)
    d = mixed.assemble_density(ms)
    exact = mixed.thermal_mvqp_exact(beta, nu, dq0)
    assert exact == pytest.approx(nu / (8.0 * dq0 * dq0) * coth, rel=1e-12)
    assert mixed.mixed_mvqp(d, 1.0) == pytest.approx(exact, rel=1e-4)


def test_thermal_truncation_guard():
    with pytest.raises(TruncationInsufficient):
        mixed.thermal_state(0.5, 1.0, 1.0, k=3)
    ms = mixed.thermal_state(2.0, 1.0, 1.0)
    assert ms.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert ms.weights[0] > ms.weights[-1]


def test_theorem3_bound_thermal():
    ms = mixed.thermal_state(1.0, 1.0, 1.0)
    bound = mixed.theorem3_bound(ms, 1.0)
    # every component shares M = 1, V_k = (2k+1) dq0^2
    expect = sum(
        w / (8.0 * (2 * k + 1)) for k, w in enumerate(ms.weights)
    )
    assert bound == pytest.approx(expect, rel=1e-6)
    assert bound <= mixed.mixed_mvqp_components(ms, 1.0) + 1e-12


def test_mixed_min_correlation_chain():
    for ms in [chirped_pair(0.6), mixed.thermal_state(1.0, 1.0, 1.0)]:
        assert mixed.mixed_min_correlation(ms, 1.0)


def test_mixed_mvqp_rejects_bad_mass():
    d = mixed.assemble_density(mixed.MixedState(np.array([1.0]), (ho(0),)))
    with pytest.raises(ValueError):
        mixed.mixed_mvqp(d, -1.0)


def test_load_mixture(tmp_path):
    grid = [-12.0, 12.0, 257]
    payload = {
        "hbar": 1.0,
        "grid": grid,
        "components": [
            {"weight": 0.5, "type": "ho", "n": 0, "dq0": 1.0},
            {"weight": 0.5, "type": "gaussian", "v": [[1.2]], "eta_q": [0.0]},
        ],
    }
    path = tmp_path / "mix.json"
    path.write_text(json.dumps(payload))
    ms = mixed.load_mixture(path)
    assert ms.size == 2
    assert ms.grid.shape == (257,)
    assert mixed.mixed_mvqp_components(ms, 1.0) > 0.0


def test_load_mixture_error_paths(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"components": [{"weight": 1.0, "type": "ho"}]}))
    with pytest.raises(ValueError):
        mixed.load_mixture(path)
    path.write_text(
        json.dumps(
            {"grid": [-10.0, 10.0, 129], "components": [{"type": "ho", "n": 0}]}
        )
    )
    with pytest.raises(ValueError):
        mixed.load_mixture(path)
    path.write_text(
        json.dumps(
            {
                "grid": [-10.0, 10.0, 257],
                "components": [{"weight": 1.0, "type": "nope"}],
            }
        )
    )
    with pytest.raises(ValueError):
        mixed.load_mixture(path)
