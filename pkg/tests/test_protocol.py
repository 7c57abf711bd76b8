import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nanoteleport import circuit
from nanoteleport import gaussian as g
from nanoteleport import protocol as pr

TAU = 50e-9
QUOTED_NOISE = pr.NoiseAmplitudes.from_deltas(0.32, 0.07, TAU)
QUOTED_C = (QUOTED_NOISE.c_x, QUOTED_NOISE.c_p)
DERIVED = circuit.derive(circuit.DeviceParams())


def test_theta_of_examples():
    assert pr.theta_of(1e9, 0.0) == 1.0
    assert pr.theta_of(28e9, 50e-3) < 1 + 1e-11
    assert pr.theta_of(1e9, 50e-3) == pytest.approx(2.24, abs=5e-3)
    # independent route: 1 + 2 n_BE
    x = 6.62607015e-34 * 1e9 / (1.380649e-23 * 50e-3)
    assert pr.theta_of(1e9, 50e-3) == pytest.approx(1 + 2 / math.expm1(x), rel=1e-12)


def test_theta_of_rejects_bad_frequency():
    with pytest.raises(ValueError):
        pr.theta_of(0.0, 1.0)


def test_eta_operating_point():
    env = pr.EnvSpec.at_temperature(50e-3, 1e9, 1.5, TAU)
    assert env.eta == pytest.approx(0.08, abs=5e-3)
    assert env.theta_a1 == 1.0
    assert pr.EnvSpec.at_temperature(50e-3, 1e9, 1.5, TAU, coherent_input=False).theta_a1 == env.theta_a2


def test_env_rejects_sub_vacuum():
    with pytest.raises(ValueError):
        pr.EnvSpec(0.0, 0.9, 1.0, 1.0, TAU)


def test_noise_amplitudes():
    n = pr.NoiseAmplitudes.from_constants(1e-5, 2e-5, 1e-8)
    assert n.delta_x == pytest.approx(0.1) and n.delta_p == pytest.approx(0.2)
    assert n.at(4e-8).delta_x == pytest.approx(0.05)
    with pytest.raises(ValueError):
        pr.NoiseAmplitudes(-0.1, 0, 0, 0)


def test_channel_mu_examples():
    ch = pr.channel_mu(1.5, 2.24, QUOTED_NOISE)
    assert ch.mu_x == pytest.approx(0.490, abs=1e-3)
    assert ch.mu_p == pytest.approx(0.100, abs=1e-3)
    zero = pr.NoiseAmplitudes(0, 0, 0, 0)
    big = pr.channel_mu(20, 100, zero)
    assert big.mu_x < 1e-15 and big.mu_p < 1e-15
    assert pr.channel_mu(0, 1, zero) == pr.Channel(1.0, 1.0)
    assert np.allclose(pr.Channel(0.4, 0.2).added_covariance, np.diag([0.2, 0.1]))
    with pytest.raises(ValueError):
        pr.Channel(-0.1, 0)


def test_fidelity_examples():
    assert pr.fidelity_closed_form(pr.Channel(0, 0)) == pytest.approx(1.0, abs=1e-12)
    assert pr.fidelity_closed_form(pr.Channel(0.4903, 0.1003)) == pytest.approx(0.78, abs=5e-3)
    assert pr.fidelity_closed_form(pr.Channel(1, 1)) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(ValueError):
        pr.fidelity_closed_form(pr.Channel(0, 0), 0.5)


@pytest.mark.parametrize("theta, mu", [(1.0, (0.3, 0.2)), (2.24, (0.49, 0.10)), (4.0, (1.2, 0.05))])
def test_fidelity_matches_gaussian_overlap(theta, mu):
    inp = g.displace(g.thermal_state(theta), 0, 0.7, -0.2)
    out = g.GaussianState(inp.mean, inp.cov + np.diag(mu) / 2)
    assert pr.fidelity_closed_form(pr.Channel(*mu), theta) == pytest.approx(g.gaussian_fidelity(inp, out), rel=1e-12)


def test_coherent_reduction_random_grid():
    rng = np.random.default_rng(7)
    for mx, mp in rng.uniform(0, 5, size=(100, 2)):
        expected = 1 / math.sqrt((1 + mx) * (1 + mp))
        assert abs(pr.fidelity_closed_form(pr.Channel(mx, mp)) - expected) < 1e-12


@given(st.floats(0, 5), st.floats(0, 5), st.floats(1, 5), st.floats(1e-3, 1))
def test_fidelity_nonincreasing_in_mu(mx, mp, theta, h):
    f = pr.fidelity_closed_form(pr.Channel(mx, mp), theta)
    assert pr.fidelity_closed_form(pr.Channel(mx + h, mp), theta) <= f + 1e-14
    assert pr.fidelity_closed_form(pr.Channel(mx, mp + h), theta) <= f + 1e-14
    assert 0 < f <= 1 + 1e-12


def test_eta_critical_zero_noise():
    assert pr.eta_critical(TAU, (0.0, 0.0)) == pytest.approx(1.0, abs=1e-9)


def test_eta_critical_operating_point():
    eta_c = pr.eta_critical(TAU, QUOTED_C)
    assert eta_c > 0.08
    assert eta_c == pytest.approx(0.7949, abs=1e-3)


def test_eta_critical_root_straddles_half():
    eta_c = pr.eta_critical(TAU, QUOTED_C)
    nx, np_ = 4 * 0.32**2, 4 * 0.07**2
    assert pr.fidelity_closed_form(pr.Channel(nx + eta_c - 1e-9, np_ + eta_c - 1e-9)) > 0.5
    assert pr.fidelity_closed_form(pr.Channel(nx + eta_c + 1e-9, np_ + eta_c + 1e-9)) < 0.5


def test_eta_critical_below_tau_c_is_zero():
    tau_c = pr.tau_critical(QUOTED_C)
    assert pr.eta_critical(0.9 * tau_c, QUOTED_C) == 0.0
    with pytest.raises(ValueError):
        pr.eta_critical(0.0, QUOTED_C)


def test_tau_critical_single_quadrature():
    c = 1e-4
    assert pr.tau_critical((c, 0.0)) == pytest.approx(4 * c**2 / 3, rel=1e-11)
    assert pr.tau_critical((0.0, 0.0)) == 0.0


def _tau_c_scan(cx, cp):
    """Brute-force oracle: log-grid scan of the product expression, then linear refinement."""
    a, b = 4 * cx**2, 4 * cp**2
    taus = np.logspace(-12, -3, 200_001)
    vals = (1 + a / taus) * (1 + b / taus) - 4
    k = int(np.flatnonzero(vals < 0)[0])
    t0, t1, v0, v1 = taus[k - 1], taus[k], vals[k - 1], vals[k]
    return t0 + (t1 - t0) * v0 / (v0 - v1)


def test_tau_critical_matches_scan():
    tau_c = pr.tau_critical(QUOTED_C)
    assert 7e-9 <= tau_c <= 8.5e-9
    assert tau_c == pytest.approx(_tau_c_scan(*QUOTED_C), rel=1e-6)
    assert tau_c == pytest.approx(7.9906e-9, rel=1e-4)


def test_tau_critical_root_straddles():
    tau_c = pr.tau_critical(QUOTED_C)
    lo = pr.NoiseAmplitudes.from_constants(*QUOTED_C, tau_c * (1 - 1e-9))
    hi = pr.NoiseAmplitudes.from_constants(*QUOTED_C, tau_c * (1 + 1e-9))
    assert pr.fidelity_closed_form(pr.channel_mu(50, 1, lo)) < 0.5
    assert pr.fidelity_closed_form(pr.channel_mu(50, 1, hi)) > 0.5


@given(st.floats(1e-6, 1e-3), st.floats(0, 1e-3))
def test_tau_critical_quadratic_scaling(cx, cp):
    assert pr.tau_critical((2 * cx, 2 * cp)) == pytest.approx(4 * pr.tau_critical((cx, cp)), rel=1e-10)


def test_sweep_fig2_properties():
    grid = np.logspace(-9, -5, 41)
    main, inset = pr.sweep_fig2(QUOTED_C, grid)
    eta = np.array([e for _, e in main])
    assert np.all(np.diff(eta) >= 0)
    assert eta[-1] == pytest.approx(1.0, abs=0.01)
    f = np.array([row[1:] for row in inset])
    assert np.all(f[:, 0] > f[:, 1]) and np.all(f[:, 1] > f[:, 2])
    assert np.all(f[:, 2] < 0.5)
    with pytest.raises(ValueError):
        pr.sweep_fig2(QUOTED_C, [])


def test_sweep_fig2_zero_noise_limit():
    main, _ = pr.sweep_fig2((0.0, 0.0), [1e-3])
    assert main[0][1] == pytest.approx(1.0, abs=1e-6)


def test_sweep_fig3_properties():
    thetas = np.linspace(1, 5, 41)
    rows = np.array(pr.sweep_fig3(TAU, (2.0, 0.5, 0.0), thetas, QUOTED_C))
    f = rows[:, 1:]
    assert np.all(np.diff(f, axis=0) > 0)
    assert np.all(f[:, 0] > f[:, 1]) and np.all(f[:, 1] > f[:, 2])
    for col, r in enumerate((2.0, 0.5, 0.0)):
        coherent = pr.fidelity_closed_form(pr.channel_mu(r, 1.0, QUOTED_NOISE))
        assert f[0, col] == pytest.approx(coherent, rel=1e-12)
    with pytest.raises(ValueError):
        pr.sweep_fig3(TAU, (), thetas, QUOTED_C)


# --- pipeline -----------------------------------------------------------------

def _env(theta_a2=1.0, r_2=1.5, theta_a1=1.0):
    return pr.EnvSpec(0.0, theta_a1, theta_a2, r_2, TAU)


def test_pipeline_ideal_limit():
    zero = pr.NoiseAmplitudes(0, 0, 0, 0)
    res = pr.run_pipeline(DERIVED, _env(r_2=8.0), zero, input_mean=(1.3, -0.7), n_samples=10_000)
    assert np.allclose(res.output.mean, [1.3, -0.7], atol=1e-12)
    assert res.fidelity_analytic >= 0.999
    assert res.fidelity_mc >= 0.999
    assert np.allclose(res.output_mc.mean, [1.3, -0.7], atol=1e-3)


def test_pipeline_operating_point():
    env = pr.EnvSpec.at_temperature(50e-3, 1e9, 1.5, TAU)
    res = pr.run_pipeline(DERIVED, env, QUOTED_NOISE, seed=1, n_samples=20_000)
    assert res.fidelity_closed == pytest.approx(0.78, abs=5e-3)
    assert res.fidelity_analytic == pytest.approx(res.fidelity_closed, abs=1e-12)
    assert abs(res.fidelity_mc - res.fidelity_closed) < 3 * res.fidelity_mc_sigma


def test_pipeline_classical_limit():
    zero = pr.NoiseAmplitudes(0, 0, 0, 0)
    with pytest.warns(RuntimeWarning, match="schedule invalid"):
        res = pr.run_pipeline(DERIVED, _env(r_2=0.0), zero, seed=2)
    assert res.fidelity_analytic == pytest.approx(0.5, abs=1e-12)
    assert abs(res.fidelity_mc - 0.5) < 3 * res.fidelity_mc_sigma


def test_pipeline_displacement_independent():
    a = pr.run_pipeline(DERIVED, _env(2.0), QUOTED_NOISE, input_mean=(0, 0), seed=3)
    b = pr.run_pipeline(DERIVED, _env(2.0), QUOTED_NOISE, input_mean=(5, -3), seed=4)
    assert a.fidelity_analytic == pytest.approx(b.fidelity_analytic, abs=1e-12)
    sigma = math.hypot(a.fidelity_mc_sigma, b.fidelity_mc_sigma)
    assert abs(a.fidelity_mc - b.fidelity_mc) < 3 * sigma


@given(st.floats(1, 4), st.floats(1, 4), st.floats(0, 3), st.floats(0, 0.5), st.floats(0, 0.5),
       st.floats(-3, 3), st.floats(-3, 3))
def test_pipeline_channel_additivity(theta_a1, theta_a2, r_2, dx, dp, x0, p0):
    env = _env(theta_a2, r_2, theta_a1)
    noise = pr.NoiseAmplitudes.from_deltas(dx, dp, TAU)
    reg = pr.prepare_register(env, (x0, p0))
    out = pr.averaged_output(pr.entangle_and_mix(reg, r_2), noise)
    inp = g.partial_trace(reg, [pr.A1])
    ch = pr.channel_mu(r_2, theta_a2, noise)
    assert np.max(np.abs(out.cov - inp.cov - ch.added_covariance)) < 1e-9
    assert np.allclose(out.mean, inp.mean, atol=1e-9)


def test_pipeline_monte_carlo_covariance():
    env = pr.EnvSpec.at_temperature(50e-3, 1e9, 1.5, TAU)
    n = 100_000
    res = pr.run_pipeline(DERIVED, env, QUOTED_NOISE, seed=5, n_samples=n)
    expected = res.input.cov + res.channel.added_covariance
    for i in range(2):
        var = expected[i, i]
        assert abs(res.output_mc.cov[i, i] - var) < 3 * var * math.sqrt(2 / n)
        assert abs(res.output_mc.mean[i]) < 3 * math.sqrt(var / n)
    off = math.sqrt(expected[0, 0] * expected[1, 1] / n)
    assert abs(res.output_mc.cov[0, 1]) < 3 * off


def test_pipeline_seed_reproducible():
    a = pr.run_pipeline(DERIVED, _env(), QUOTED_NOISE, seed=11, n_samples=2000)
    b = pr.run_pipeline(DERIVED, _env(), QUOTED_NOISE, seed=11, n_samples=2000)
    assert a.fidelity_mc == b.fidelity_mc
