import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nanoteleport import gaussian as g
from nanoteleport import oracle as o
from nanoteleport.protocol import Channel, NoiseAmplitudes, channel_mu

FINE = o.uniform_axis(-8, 8, 161)


def _grid(state, axis=FINE):
    return o.gaussian_to_grid(state, (axis, axis))


def test_vacuum_grid_peak_and_norm():
    w = _grid(g.vacuum())
    assert w.values.max() == pytest.approx(1 / (2 * math.pi * 0.25), rel=1e-3)
    assert w.total() == pytest.approx(1.0, abs=1e-4)
    assert w.pure


def test_grid_marginal_is_gaussian():
    s = g.GaussianState([0.3, -0.2], [[0.5, 0.1], [0.1, 0.3]])
    w = _grid(s)
    expected = np.exp(-0.5 * (FINE - 0.3) ** 2 / 0.5) / math.sqrt(2 * math.pi * 0.5)
    assert np.max(np.abs(w.marginal(0) - expected)) < 1e-6
    mean, cov = w.moments()
    assert np.allclose(mean, s.mean, atol=1e-8)
    assert np.allclose(cov, s.cov, atol=1e-8)
    assert not w.pure


def test_grid_errors():
    with pytest.raises(o.GridError):
        _grid(g.thermal_state(5.0), o.uniform_axis(-3, 3, 61))
    with pytest.raises(ValueError):
        o.gaussian_to_grid(g.vacuum(), (FINE,))
    with pytest.raises(ValueError):
        o.gaussian_to_grid(g.vacuum(3), [FINE] * 6)


def test_two_mode_grid_normalized():
    axis = o.uniform_axis(-4, 4, 25)
    w = o.gaussian_to_grid(g.two_mode_squeeze(g.vacuum(2), 0, 1, 0.3), [axis] * 4)
    assert w.total() == pytest.approx(1.0, abs=1e-4)
    assert w.pure


def test_convolution_identity():
    w = _grid(g.coherent_state(0.4, 0.1))
    assert np.array_equal(o.convolve_with_G_mu(w, Channel(0, 0)).values, w.values)


def test_convolution_classical_channel_variance():
    w = o.convolve_with_G_mu(_grid(g.coherent_state(0.5, -0.5)), Channel(1, 1))
    mean, cov = w.moments()
    assert cov[0, 0] == pytest.approx(0.75, abs=1e-3)
    assert cov[1, 1] == pytest.approx(0.75, abs=1e-3)
    assert np.allclose(mean, [0.5, -0.5], atol=1e-3)
    assert w.total() == pytest.approx(1.0, abs=1e-3)


def test_convolution_resolution_error():
    coarse = _grid(g.vacuum(), o.uniform_axis(-8, 8, 41))
    with pytest.raises(o.GridError):
        o.convolve_with_G_mu(coarse, Channel(0.1, 1.0))
    with pytest.raises(ValueError):
        o.convolve_with_G_mu(o.gaussian_to_grid(g.vacuum(2), [o.uniform_axis(-3, 3, 9)] * 4), Channel(1, 1))


@given(st.floats(0.2, 1.5), st.floats(0.2, 1.5), st.floats(1, 2))
def test_convolution_closure(mx, mp, theta):
    s = g.thermal_state(theta)
    w = o.convolve_with_G_mu(_grid(s), Channel(mx, mp))
    _, cov = w.moments()
    assert cov[0, 0] == pytest.approx(s.cov[0, 0] + mx / 2, abs=2e-3)
    assert cov[1, 1] == pytest.approx(s.cov[1, 1] + mp / 2, abs=2e-3)
    direct = _grid(g.GaussianState([0, 0], s.cov + np.diag([mx, mp]) / 2))
    assert o.l1_distance(w, direct) < 5e-3


def test_convolution_commutes():
    w = _grid(g.coherent_state(0.2, 0.0))
    a = o.convolve_with_G_mu(o.convolve_with_G_mu(w, Channel(0.3, 0.5)), Channel(0.4, 0.2))
    b = o.convolve_with_G_mu(w, Channel(0.7, 0.7))
    assert o.l1_distance(a, b) < 1e-3


def test_overlap_vacuum_is_one():
    w = _grid(g.vacuum())
    assert o.overlap_fidelity(w, w) == pytest.approx(1.0, abs=1e-3)


def test_overlap_displaced_vacuum():
    v, d = g.vacuum(), g.coherent_state(1.0, 0.0)
    f = o.overlap_fidelity(_grid(v), _grid(d))
    assert f == pytest.approx(math.exp(-1.0), abs=1e-3)
    assert f == pytest.approx(g.gaussian_fidelity(v, d), abs=1e-3)


def test_overlap_classical_channel():
    coh = _grid(g.coherent_state(0.3, 0.3))
    out = o.convolve_with_G_mu(coh, Channel(1, 1))
    assert o.overlap_fidelity(coh, out) == pytest.approx(0.5, abs=1e-2)


def test_overlap_errors():
    mixed = _grid(g.thermal_state(2.0))
    with pytest.raises(ValueError):
        o.overlap_fidelity(mixed, mixed)
    with pytest.raises(ValueError):
        o.overlap_fidelity(_grid(g.vacuum()), _grid(g.vacuum(), o.uniform_axis(-9, 9, 161)))


def test_teleport_ideal_limit():
    inp = g.coherent_state(0.4, -0.3)
    out = o.teleport_integral(inp, 6.0, 1.0, (0.0, 0.0))
    ref = o.gaussian_to_grid(inp, out.axes)
    assert o.l1_distance(out, ref) < 0.02


def test_teleport_operating_point():
    inp = g.vacuum()
    theta = 2.241233
    out = o.teleport_integral(inp, 1.5, theta, (0.32, 0.07))
    _, cov = out.moments()
    ch = channel_mu(1.5, theta, NoiseAmplitudes.from_deltas(0.32, 0.07, 50e-9))
    assert cov[0, 0] == pytest.approx(0.25 + ch.mu_x / 2, rel=0.02)
    assert cov[1, 1] == pytest.approx(0.25 + ch.mu_p / 2, rel=0.02)


def test_teleport_classical_limit():
    inp = g.coherent_state(1.0, 0.5)
    out = o.teleport_integral(inp, 0.0, 1.0, (0.0, 0.0))
    mean, cov = out.moments()
    assert cov[0, 0] - 0.25 == pytest.approx(0.5, rel=0.02)
    assert cov[1, 1] - 0.25 == pytest.approx(0.5, rel=0.02)
    assert np.allclose(mean, [1.0, 0.5], atol=1e-6)


def test_teleport_thermal_input():
    inp = g.thermal_state(2.0)
    out = o.teleport_integral(inp, 1.0, 1.5, (0.1, 0.2))
    _, cov = out.moments()
    ch = channel_mu(1.0, 1.5, NoiseAmplitudes(0.1, 0.2, 0, 0))
    assert np.allclose(np.diag(cov), np.diag(inp.cov + ch.added_covariance), rtol=1e-3)


def test_teleport_errors():
    with pytest.raises(ValueError):
        o.teleport_integral(g.vacuum(2), 1.0, 1.0, (0.1, 0.1))
    with pytest.raises(ValueError):
        o.teleport_integral(g.vacuum(), 1.0, 1.0, (0.1, 0.1), n_points=61)
    with pytest.raises(o.GridError):
        o.teleport_integral(g.vacuum(), 0.0, 4.0, (0.5, 0.5), out_range=1.0)


def test_resource_state_marginal():
    res = o.resource_state(1.0, 2.0)
    assert res.is_physical()
    assert res.block(1)[0, 0] == pytest.approx(0.25 * (math.cosh(1.0) ** 2 + 2 * math.sinh(1.0) ** 2))
