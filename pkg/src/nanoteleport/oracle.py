"""Brute-force Wigner-grid checks for the closed-form channel and fidelity.

Everything here works on sampled densities; nothing uses the channel formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from . import gaussian as g
from .protocol import Channel

# Tr(rho1 rho2) = OVERLAP_CONSTANT**N * integral W1 W2 with vacuum variance 1/4
OVERLAP_CONSTANT = math.pi
COVERAGE_SIGMAS = 6.0


class GridError(ValueError):
    """Grid too coarse or too narrow for the requested operation."""


@dataclass(frozen=True)
class WignerGrid:
    axes: tuple
    values: np.ndarray
    pure: bool = False

    @property
    def steps(self) -> np.ndarray:
        return np.array([a[1] - a[0] for a in self.axes])

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.steps))

    def total(self) -> float:
        return float(self.values.sum() * self.cell_volume)

    def normalized(self) -> "WignerGrid":
        return WignerGrid(self.axes, self.values / self.total(), self.pure)

    def moments(self):
        """Mean vector and covariance matrix of the sampled density."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        w = self.values * self.cell_volume / self.total()
        mean = np.array([np.sum(w * m) for m in mesh])
        d = [m - mu for m, mu in zip(mesh, mean)]
        cov = np.array([[np.sum(w * a * b) for b in d] for a in d])
        return mean, cov

    def marginal(self, axis: int) -> np.ndarray:
        other = tuple(k for k in range(len(self.axes)) if k != axis)
        return self.values.sum(axis=other) * np.prod(self.steps[list(other)])


def uniform_axis(lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(lo, hi, n)


def _gauss(x, mean, var):
    return np.exp(-0.5 * (x - mean) ** 2 / var) / np.sqrt(2 * np.pi * var)


def _gauss2(x, y, cov):
    det = cov[0, 0] * cov[1, 1] - cov[0, 1] ** 2
    q = (cov[1, 1] * x**2 - 2 * cov[0, 1] * x * y + cov[0, 0] * y**2) / det
    return np.exp(-0.5 * q) / (2 * np.pi * np.sqrt(det))


def gaussian_to_grid(state: g.GaussianState, axes) -> WignerGrid:
    """Sample the Wigner function of a (<= 2 mode) state on a product grid.

    `axes` is a sequence of 1-D uniform node arrays, one per quadrature.
    """
    if state.n_modes > 2:
        raise ValueError("grids support at most two modes")
    axes = tuple(np.asarray(a, dtype=float) for a in axes)
    if len(axes) != 2 * state.n_modes:
        raise ValueError("need one axis per quadrature")
    for k, a in enumerate(axes):
        sig = math.sqrt(state.cov[k, k])
        if a[0] > state.mean[k] - COVERAGE_SIGMAS * sig or a[-1] < state.mean[k] + COVERAGE_SIGMAS * sig:
            raise GridError(f"axis {k} does not cover {COVERAGE_SIGMAS:g} sigma")
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    d = mesh - state.mean
    inv = np.linalg.inv(state.cov)
    n = state.mean.size
    norm = (2 * np.pi) ** (n / 2) * math.sqrt(np.linalg.det(state.cov))
    values = np.exp(-0.5 * np.einsum("...i,ij,...j->...", d, inv, d)) / norm
    pure = bool(np.allclose(state.symplectic_eigenvalues(), g.VACUUM_VARIANCE, atol=1e-8))
    return WignerGrid(axes, values, pure).normalized()


def convolve_with_G_mu(w: WignerGrid, mu: Channel) -> WignerGrid:
    """Discrete convolution of a single-mode grid with the channel Gaussian (variance mu/2 per axis)."""
    if len(w.axes) != 2:
        raise ValueError("convolution is single-mode only")
    values = w.values
    for axis, m in enumerate((mu.mu_x, mu.mu_p)):
        if m == 0:
            continue
        step = w.steps[axis]
        if step > math.sqrt(m) / 4:
            raise GridError(f"axis {axis}: step {step:.3g} exceeds sqrt(mu)/4 = {math.sqrt(m) / 4:.3g}")
        sig = math.sqrt(m / 2)
        half = int(math.ceil(COVERAGE_SIGMAS * sig / step))
        offsets = step * np.arange(-half, half + 1)
        kernel = np.exp(-0.5 * offsets**2 / sig**2)
        kernel /= kernel.sum()
        shape = [1, 1]
        shape[axis] = kernel.size
        values = fftconvolve(values, kernel.reshape(shape), mode="same")
    values = np.clip(values, 0.0, None)
    return WignerGrid(w.axes, values, False).normalized()


def overlap_fidelity(w1: WignerGrid, w2: WignerGrid) -> float:
    """Fidelity as a phase-space overlap; exact only when one state is pure."""
    if not (w1.pure or w2.pure):
        raise ValueError("overlap fidelity needs at least one pure state")
    if len(w1.axes) != len(w2.axes) or any(not np.allclose(a, b) for a, b in zip(w1.axes, w2.axes)):
        raise ValueError("grids must share axes")
    n_modes = len(w1.axes) // 2
    return float(OVERLAP_CONSTANT**n_modes * np.sum(w1.values * w2.values) * w1.cell_volume)


def _nodes(center, width, n: int):
    """n uniform nodes spanning center +/- COVERAGE_SIGMAS*width; returns (nodes, step)."""
    t = np.linspace(-COVERAGE_SIGMAS, COVERAGE_SIGMAS, n)
    center = np.asarray(center, dtype=float)
    width = np.asarray(width, dtype=float)
    return center[..., None] + width[..., None] * t, width * (t[1] - t[0])


def _product_gaussian(c1, v1, c2, v2):
    """Center and width of the product of two Gaussian factors (node placement only)."""
    v = v1 * v2 / (v1 + v2)
    return (c1 * v2 + c2 * v1) / (v1 + v2), np.sqrt(v)


def _chain_density(out, in_mean, in_var, res_cov, sign, delta, n):
    """One quadrature of the teleported density at output points `out`.

    Integrates  sqrt(2) dz db du  W_in(out - sqrt2 z) W_res(sqrt2 u - sign*b, b) K_delta(z - u)
    where (a, b) is the resource pair (target a2, routed partner) and u the EPR
    combination (a + sign*b)/sqrt2 that feedforward cancels. The variables are a
    shear of the record/partner/input coordinates, so the integral is the
    averaged-over-records output marginal itself.
    """
    sq2 = math.sqrt(2.0)
    va, vb, cab = res_cov[0, 0], res_cov[1, 1], res_cov[0, 1]
    var_u = (va + vb + 2 * sign * cab) / 2
    cov_ub = (cab + sign * vb) / sq2
    var_b_u = vb - cov_ub**2 / var_u
    var_h = var_u + delta**2

    def res(u, b):
        return _gauss2(sq2 * u - sign * b, b, res_cov)

    def w_u(u):
        # integrate the partner quadrature out at fixed u
        b, db = _nodes(cov_ub / var_u * u, math.sqrt(var_b_u), n)
        return np.sum(res(u[..., None], b), axis=-1) * db

    # z nodes per output point around the product of W_in(out - sqrt2 z) and h(z)
    zc, zw = _product_gaussian((out - in_mean) / sq2, in_var / 2, 0.0, var_h)
    z, dz = _nodes(zc, zw, n)
    if delta == 0:
        h = w_u(z)
    else:
        uc, uw = _product_gaussian(z, delta**2, 0.0, var_u)
        u, du = _nodes(uc, uw, n)
        h = np.sum(w_u(u) * _gauss(z[..., None], u, delta**2), axis=-1) * du
    w_in = _gauss(out[:, None] - sq2 * z, in_mean, in_var)
    return sq2 * np.sum(w_in * h, axis=-1) * dz


def resource_state(r_2: float, theta_a2: float) -> g.GaussianState:
    """Two-mode squeezed (thermal a2, vacuum b2) resource, modes ordered (a2, b2)."""
    return g.two_mode_squeeze(g.tensor(g.thermal_state(theta_a2), g.vacuum()), 0, 1, r_2)


def teleport_integral(input_state: g.GaussianState, r_2: float, theta_a2: float, deltas,
                      n_points: int = 41, out_range: float | None = None, n_out: int = 41,
                      max_defect: float = 1e-4) -> WignerGrid:
    """Output Wigner function of the protocol by direct quadrature over records, partner and input.

    The integrand splits into an x-chain and a p-chain, each a 3-D quadrature
    with `n_points` nodes per axis. The output grid spans mean +/- `out_range`
    (default 8, widened until the normalization defect is below `max_defect`).
    """
    if input_state.n_modes != 1 or abs(input_state.cov[0, 1]) > 1e-12:
        raise ValueError("input must be a single mode with uncorrelated x and p")
    if n_points > 41:
        raise ValueError("at most 41 nodes per axis")
    delta_x, delta_p = deltas
    res = resource_state(r_2, theta_a2)
    x_block = res.cov[np.ix_([0, 2], [0, 2])]
    p_block = res.cov[np.ix_([1, 3], [1, 3])]
    # x: a2 + sqrt2*x_m cancels +b;  p: a2 - sqrt2*p_m cancels -b (feedforward sign convention)
    chains = [
        (input_state.mean[0], input_state.cov[0, 0], x_block, +1, delta_x),
        (input_state.mean[1], input_state.cov[1, 1], p_block, -1, delta_p),
    ]
    span = 8.0 if out_range is None else out_range
    for _ in range(8):
        axes, marginals = [], []
        for mean, var, block, sign, delta in chains:
            out = uniform_axis(mean - span, mean + span, n_out)
            axes.append(out)
            marginals.append(_chain_density(out, mean, var, block, sign, delta, n_points))
        defects = [abs(1 - m.sum() * (a[1] - a[0])) for m, a in zip(marginals, axes)]
        if max(defects) < max_defect or out_range is not None:
            break
        span *= 1.5
    if max(defects) >= max_defect:
        raise GridError(f"normalization defect {max(defects):.3g} exceeds {max_defect:g}")
    values = np.outer(marginals[0], marginals[1])
    return WignerGrid(tuple(axes), values, False).normalized()


def l1_distance(w1: WignerGrid, w2: WignerGrid) -> float:
    return float(np.sum(np.abs(w1.values - w2.values)) * w1.cell_volume)
