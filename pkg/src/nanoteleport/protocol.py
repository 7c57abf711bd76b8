"""Teleportation channel: closed forms, critical-curve analysis, sweeps and the pipeline."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import gaussian as g
from . import units
from .circuit import DerivedCircuit, schedule


@dataclass(frozen=True)
class NoiseAmplitudes:
    """Dimensionless POVM widths and their constants, delta = c / sqrt(tau_m)."""

    delta_x: float
    delta_p: float
    c_x: float
    c_p: float

    def __post_init__(self):
        if min(self.delta_x, self.delta_p, self.c_x, self.c_p) < 0:
            raise ValueError("noise amplitudes must be nonnegative")

    @classmethod
    def from_deltas(cls, delta_x: float, delta_p: float, tau_m: float) -> "NoiseAmplitudes":
        root = math.sqrt(tau_m)
        return cls(delta_x, delta_p, delta_x * root, delta_p * root)

    @classmethod
    def from_constants(cls, c_x: float, c_p: float, tau_m: float) -> "NoiseAmplitudes":
        root = math.sqrt(tau_m)
        return cls(c_x / root, c_p / root, c_x, c_p)

    def at(self, tau_m: float) -> "NoiseAmplitudes":
        return NoiseAmplitudes.from_constants(self.c_x, self.c_p, tau_m)


@dataclass(frozen=True)
class Channel:
    mu_x: float
    mu_p: float

    def __post_init__(self):
        if self.mu_x < 0 or self.mu_p < 0:
            raise ValueError("channel noise must be nonnegative")

    @property
    def added_covariance(self) -> np.ndarray:
        return np.diag([self.mu_x, self.mu_p]) / 2.0


def theta_of(omega: float, T: float) -> float:
    """Thermal index coth(h nu / 2 k_B T) for ordinary frequency `omega` in Hz."""
    if omega <= 0:
        raise ValueError("frequency must be positive")
    if T <= 0:
        return 1.0
    return 1.0 / math.tanh(units.h * omega / (2 * units.k_B * T))


def eta_index(theta_a2: float, r_2: float) -> float:
    return 0.5 * (1.0 + theta_a2) * math.exp(-2.0 * r_2)


@dataclass(frozen=True)
class EnvSpec:
    T: float
    theta_a1: float
    theta_a2: float
    r_2: float
    tau_m: float

    def __post_init__(self):
        if self.theta_a1 < 1 or self.theta_a2 < 1:
            raise ValueError("thermal indices must be >= 1")

    @property
    def eta(self) -> float:
        return eta_index(self.theta_a2, self.r_2)

    @classmethod
    def at_temperature(cls, T: float, omega_nr: float, r_2: float, tau_m: float,
                       coherent_input: bool = True) -> "EnvSpec":
        theta = theta_of(omega_nr, T)
        return cls(T, 1.0 if coherent_input else theta, theta, r_2, tau_m)


def channel_mu(r_2: float, theta_a2: float, noise: NoiseAmplitudes) -> Channel:
    eta = eta_index(theta_a2, r_2)
    return Channel(4 * noise.delta_x**2 + eta, 4 * noise.delta_p**2 + eta)


def fidelity_closed_form(ch: Channel, theta_a1: float = 1.0) -> float:
    """Fidelity of a displaced thermal input (index theta_a1) through the channel."""
    if theta_a1 < 1:
        raise ValueError("theta_a1 must be >= 1")
    sx = ch.mu_x + theta_a1 / 2
    sp = ch.mu_p + theta_a1 / 2
    disc = (4 * sx * sp - 1) * (theta_a1**2 - 1)
    assert disc >= 0, disc
    return 2.0 / (math.sqrt((1 + 2 * theta_a1 * sx) * (1 + 2 * theta_a1 * sp)) - math.sqrt(disc))


def _bisect(f, lo: float, hi: float, xtol: float, rtol: float = 0.0) -> float:
    """Root of a function with f(lo) > 0 > f(hi)."""
    while hi - lo > max(xtol, rtol * abs(hi)):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _noise_mu(noise_constants, tau_m: float):
    c_x, c_p = noise_constants
    return 4 * c_x**2 / tau_m, 4 * c_p**2 / tau_m


def eta_critical(tau_m: float, noise_constants, theta_a1: float = 1.0, tol: float = 1e-10) -> float:
    """Largest eta keeping the fidelity above 1/2 at measurement time tau_m (0 if none does)."""
    if tau_m <= 0:
        raise ValueError("tau_m must be positive")
    nx, np_ = _noise_mu(noise_constants, tau_m)

    def excess(eta):
        return fidelity_closed_form(Channel(nx + eta, np_ + eta), theta_a1) - 0.5

    if excess(0.0) <= 0:
        return 0.0
    hi = max(10.0, 2 * (1 + theta_a1))
    while excess(hi) > 0:
        hi *= 2
    return _bisect(excess, 0.0, hi, tol)


def tau_critical(noise_constants, rtol: float = 1e-12) -> float:
    """Measurement time below which even eta = 0 cannot beat the classical limit."""
    c_x, c_p = noise_constants
    a, b = 4 * c_x**2, 4 * c_p**2
    if a + b == 0:
        return 0.0

    def excess(tau):
        return (1 + a / tau) * (1 + b / tau) - 4

    # (1 + (a+b)/tau) <= product <= (1 + (a+b)/tau)^2 brackets the root
    return _bisect(excess, (a + b) / 3, a + b, xtol=0.0, rtol=rtol)


def sweep_fig2(noise_constants, tau_grid, etas=(0.0, 1.0, 5.0)):
    """Critical curve eta_c(tau_m) and the inset fidelity-vs-tau_m curves."""
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.size == 0:
        raise ValueError("empty tau grid")
    main = [(t, eta_critical(t, noise_constants)) for t in tau_grid]
    inset = []
    for t in tau_grid:
        nx, np_ = _noise_mu(noise_constants, t)
        inset.append((t, *(fidelity_closed_form(Channel(nx + eta, np_ + eta)) for eta in etas)))
    return main, inset


def sweep_fig3(tau_m: float, r2_list, theta_grid, noise_constants):
    """Fidelity vs thermal index with theta_a1 = theta_a2 = theta, one column per r_2."""
    theta_grid = np.asarray(theta_grid, dtype=float)
    if theta_grid.size == 0 or len(r2_list) == 0:
        raise ValueError("empty sweep grid")
    noise = NoiseAmplitudes.from_constants(*noise_constants, tau_m)
    rows = []
    for theta in theta_grid:
        rows.append((theta, *(fidelity_closed_form(channel_mu(r, theta, noise), theta) for r in r2_list)))
    return rows


# mode order of the five-mode register
A1, B1, B2, CR, A2 = range(5)
FEEDFORWARD_GAIN = np.array([math.sqrt(2), -math.sqrt(2)])


@dataclass
class PipelineResult:
    input: g.GaussianState
    output: g.GaussianState
    output_mc: g.GaussianState
    fidelity_closed: float
    fidelity_analytic: float
    fidelity_mc: float
    fidelity_mc_sigma: float
    channel: Channel
    n_samples: int


def prepare_register(env: EnvSpec, input_mean) -> g.GaussianState:
    a1 = g.displace(g.thermal_state(env.theta_a1), 0, *input_mean)
    state = a1
    for part in (g.vacuum(), g.vacuum(), g.vacuum(), g.thermal_state(env.theta_a2)):
        state = g.tensor(state, part)
    return state


def entangle_and_mix(state: g.GaussianState, r_2: float) -> g.GaussianState:
    """Squeeze (a2, b2), route b2 -> c_r -> b1, then mix (a1, b1) on a 50-50 splitter."""
    state = g.two_mode_squeeze(state, A2, B2, r_2)
    state = g.swap(state, B2, CR)
    state = g.swap(state, CR, B1)
    return g.beam_splitter(state, A1, B1, math.pi / 4)


def _measured_indices():
    return np.array([2 * A1, 2 * B1 + 1])


def averaged_output(state: g.GaussianState, noise: NoiseAmplitudes) -> g.GaussianState:
    """Record-averaged state of a2 after Bell readout and feedforward, without sampling.

    With feedforward gains G, conditioning on record m and displacing by G*m, the
    averaged output covariance is Sigma_c + (K + G) V (K + G)^T, where Sigma_c is
    the record-independent conditional covariance, V the record covariance and K
    the regression of a2 on the record.
    """
    q = _measured_indices()
    t = np.array([2 * A2, 2 * A2 + 1])
    V = state.cov[np.ix_(q, q)] + np.diag([noise.delta_x**2, noise.delta_p**2])
    B = state.cov[np.ix_(t, q)]
    K = B @ np.linalg.inv(V)
    sigma_c = state.cov[np.ix_(t, t)] - K @ B.T
    G = np.diag(FEEDFORWARD_GAIN)
    cov = sigma_c + (K + G) @ V @ (K + G).T
    mean = state.mean[t] + G @ state.mean[q]
    return g.GaussianState(mean, cov)


def sample_feedforward(state: g.GaussianState, noise: NoiseAmplitudes, n: int, rng: np.random.Generator):
    """Sequential noisy homodyne (x on a1, then p on b1) and feedforward, vectorized over n records.

    Returns (output means of a2 for each record, conditional covariance of a2).
    """
    ix = 2 * A1
    rec_x = rng.normal(state.mean[ix], math.sqrt(state.cov[ix, ix] + noise.delta_x**2), size=n)
    means, cov, rest = g.condition_on(state, ix, noise.delta_x**2, rec_x)
    ip = int(np.flatnonzero(rest == 2 * B1 + 1)[0])
    rec_p = rng.normal(means[:, ip], math.sqrt(cov[ip, ip] + noise.delta_p**2))
    v = cov[ip, ip] + noise.delta_p**2
    b = cov[:, ip]
    means = means + ((rec_p - means[:, ip]) / v)[:, None] * b[None, :]
    cov = cov - np.outer(b, b) / v
    t = np.array([int(np.flatnonzero(rest == k)[0]) for k in (2 * A2, 2 * A2 + 1)])
    out = means[:, t] + np.column_stack([rec_x, rec_p]) * FEEDFORWARD_GAIN
    return out, cov[np.ix_(t, t)]


def run_pipeline(d: DerivedCircuit, env: EnvSpec, noise: NoiseAmplitudes, input_mean=(0.0, 0.0),
                 seed: int = 0, n_samples: int = 10_000, n_batches: int = 20) -> PipelineResult:
    """Run the five-mode protocol on Gaussian states and compare with the closed form."""
    try:
        schedule(d, env.r_2, env.tau_m)
    except ValueError as exc:
        warnings.warn(f"schedule invalid: {exc}", RuntimeWarning, stacklevel=2)

    register = prepare_register(env, input_mean)
    inp = g.partial_trace(register, [A1])
    mixed = entangle_and_mix(register, env.r_2)
    out = averaged_output(mixed, noise)

    rng = np.random.default_rng(seed)
    means, cov_c = sample_feedforward(mixed, noise, n_samples, rng)
    out_mc = g.GaussianState(means.mean(axis=0), cov_c + np.cov(means.T))
    batch_f = []
    for chunk in np.array_split(means, n_batches):
        batch = g.GaussianState(chunk.mean(axis=0), cov_c + np.cov(chunk.T))
        batch_f.append(g.gaussian_fidelity(inp, batch, check=False))
    sigma = float(np.std(batch_f, ddof=1) / math.sqrt(n_batches))

    ch = channel_mu(env.r_2, env.theta_a2, noise)
    return PipelineResult(
        input=inp,
        output=out,
        output_mc=out_mc,
        fidelity_closed=fidelity_closed_form(ch, env.theta_a1),
        fidelity_analytic=g.gaussian_fidelity(inp, out),
        fidelity_mc=g.gaussian_fidelity(inp, out_mc, check=False),
        fidelity_mc_sigma=sigma,
        channel=ch,
        n_samples=n_samples,
    )
