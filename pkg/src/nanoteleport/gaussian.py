"""Multimode Gaussian states and the exact Gaussian operations used by the protocol.

Quadratures are ordered (x1, p1, ..., xN, pN) and scaled so that the vacuum
covariance is I/4, i.e. x = (a + a^dag)/2 and p = (a - a^dag)/2i.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

VACUUM_VARIANCE = 0.25


def omega(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form, one [[0, 1], [-1, 0]] block per mode."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if cov.shape != (mean.size, mean.size) or mean.size % 2:
            raise ValueError(f"inconsistent shapes: mean {mean.shape}, cov {cov.shape}")
        cov = 0.5 * (cov + cov.T)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def block(self, mode: int) -> np.ndarray:
        """2x2 covariance block of one mode."""
        s = slice(2 * mode, 2 * mode + 2)
        return self.cov[s, s]

    def symplectic_eigenvalues(self) -> np.ndarray:
        # eigenvalues of i*Omega*cov come in +/- pairs
        ev = np.linalg.eigvals(1j * omega(self.n_modes) @ self.cov)
        return np.sort(np.abs(ev.real))[::2]

    def is_physical(self, tol: float = 1e-10) -> bool:
        return bool(np.all(self.symplectic_eigenvalues() >= VACUUM_VARIANCE - tol))

    def purity(self) -> float:
        return float(1.0 / np.sqrt(np.linalg.det(4.0 * self.cov)))


@dataclass(frozen=True)
class SymplecticOp:
    """Affine phase-space map r -> matrix @ r + displacement."""

    matrix: np.ndarray
    displacement: np.ndarray = field(default=None)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        d = np.zeros(m.shape[0]) if self.displacement is None else np.array(self.displacement, dtype=float)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "displacement", d)

    def symplectic_defect(self) -> float:
        n = self.matrix.shape[0] // 2
        w = omega(n)
        return float(np.max(np.abs(self.matrix @ w @ self.matrix.T - w)))

    def apply(self, state: GaussianState) -> GaussianState:
        s = self.matrix
        return GaussianState(s @ state.mean + self.displacement, s @ state.cov @ s.T)


def _check_modes(state: GaussianState, *modes: int) -> None:
    for m in modes:
        if not 0 <= m < state.n_modes:
            raise IndexError(f"mode {m} out of range for {state.n_modes}-mode state")
    if len(set(modes)) != len(modes):
        raise ValueError(f"modes must be distinct, got {modes}")


def vacuum(n_modes: int = 1) -> GaussianState:
    return GaussianState(np.zeros(2 * n_modes), VACUUM_VARIANCE * np.eye(2 * n_modes))


def thermal_state(theta: float) -> GaussianState:
    """Single-mode thermal state with index theta = coth(h nu / 2 kT)."""
    if theta < 1.0:
        raise ValueError(f"thermal index must be >= 1, got {theta}")
    return GaussianState(np.zeros(2), theta * VACUUM_VARIANCE * np.eye(2))


def coherent_state(x: float, p: float) -> GaussianState:
    return GaussianState([x, p], VACUUM_VARIANCE * np.eye(2))


def tensor(a: GaussianState, b: GaussianState) -> GaussianState:
    na, nb = a.mean.size, b.mean.size
    cov = np.zeros((na + nb, na + nb))
    cov[:na, :na] = a.cov
    cov[na:, na:] = b.cov
    return GaussianState(np.concatenate([a.mean, b.mean]), cov)


def two_mode_squeeze_op(n_modes: int, i: int, j: int, r: float) -> SymplecticOp:
    # x_i -> x_i ch - x_j sh, p_i -> p_i ch + p_j sh (and i <-> j); x_i + x_j and p_i - p_j squeezed
    ch, sh = np.cosh(r), np.sinh(r)
    s = np.eye(2 * n_modes)
    xi, pi, xj, pj = 2 * i, 2 * i + 1, 2 * j, 2 * j + 1
    s[xi, xi] = s[pi, pi] = s[xj, xj] = s[pj, pj] = ch
    s[xi, xj] = s[xj, xi] = -sh
    s[pi, pj] = s[pj, pi] = sh
    return SymplecticOp(s)


def beam_splitter_op(n_modes: int, i: int, j: int, angle: float) -> SymplecticOp:
    c, s_ = np.cos(angle), np.sin(angle)
    s = np.eye(2 * n_modes)
    for q in (0, 1):
        a, b = 2 * i + q, 2 * j + q
        s[a, a] = c
        s[a, b] = s_
        s[b, a] = -s_
        s[b, b] = c
    return SymplecticOp(s)


def two_mode_squeeze(state: GaussianState, i: int, j: int, r: float) -> GaussianState:
    """Propagator of i*lambda*(ab - a^dag b^dag) for squeezing parameter r = lambda*t."""
    _check_modes(state, i, j)
    return two_mode_squeeze_op(state.n_modes, i, j, r).apply(state)


def beam_splitter(state: GaussianState, i: int, j: int, angle: float) -> GaussianState:
    """Rotation by `angle` in the (i, j) planes; pi/4 is 50-50, pi/2 swaps the modes."""
    _check_modes(state, i, j)
    return beam_splitter_op(state.n_modes, i, j, angle).apply(state)


def swap(state: GaussianState, i: int, j: int) -> GaussianState:
    return beam_splitter(state, i, j, np.pi / 2)


def displace(state: GaussianState, i: int, dx: float, dp: float) -> GaussianState:
    _check_modes(state, i)
    d = np.zeros(2 * state.n_modes)
    d[2 * i : 2 * i + 2] = dx, dp
    return GaussianState(state.mean + d, state.cov)


def partial_trace(state: GaussianState, keep) -> GaussianState:
    keep = list(keep)
    if not keep:
        raise ValueError("keep must name at least one mode")
    _check_modes(state, *keep)
    idx = np.array([[2 * m, 2 * m + 1] for m in keep]).reshape(-1)
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])


def condition_on(state: GaussianState, index: int, noise_var: float, records):
    """Gaussian conditioning of all other quadratures on a noisy readout of `index`.

    `records` may be a scalar or an array. Returns (conditioned means with shape
    records.shape + (2N-1,), conditioned covariance). The measured mode's partner
    quadrature is kept; callers drop the mode afterwards.
    """
    rest = np.array([k for k in range(state.mean.size) if k != index])
    v = state.cov[index, index] + noise_var
    b = state.cov[rest, index]
    cov = state.cov[np.ix_(rest, rest)] - np.outer(b, b) / v
    shift = (np.asarray(records, dtype=float) - state.mean[index])[..., None]
    means = state.mean[rest] + shift * (b / v)
    return means, cov, rest


_QUAD = {"x": 0, "p": 1}


def homodyne_measure(state: GaussianState, mode: int, quadrature: str, noise_delta: float,
                     record: float | None = None, rng: np.random.Generator | None = None):
    """Noisy homodyne readout with Gaussian POVM width `noise_delta`.

    Returns (record, state of the remaining modes conditioned on it). Without
    `record`, one is drawn from N(<q>, Var(q) + delta^2).
    """
    _check_modes(state, mode)
    if noise_delta < 0:
        raise ValueError(f"noise_delta must be >= 0, got {noise_delta}")
    if state.n_modes < 2:
        raise ValueError("need at least one unmeasured mode to condition")
    index = 2 * mode + _QUAD[quadrature]
    noise_var = noise_delta**2
    if record is None:
        rng = np.random.default_rng() if rng is None else rng
        record = rng.normal(state.mean[index], np.sqrt(state.cov[index, index] + noise_var))
    means, cov, rest = condition_on(state, index, noise_var, record)
    keep = np.array([k for k, full in enumerate(rest) if full // 2 != mode])
    return float(record), GaussianState(means[keep], cov[np.ix_(keep, keep)])


def gaussian_fidelity(a: GaussianState, b: GaussianState, check: bool = True) -> float:
    """Uhlmann fidelity between two single-mode Gaussian states.

    `check=False` skips the physicality test, for sampled covariances that may
    dip just below the uncertainty bound.
    """
    if a.n_modes != 1 or b.n_modes != 1:
        raise ValueError("gaussian_fidelity is single-mode only")
    if check and not (a.is_physical() and b.is_physical()):
        raise ValueError("unphysical covariance")
    # standard convention (vacuum covariance I/2): V = 2 cov
    va, vb = 2.0 * a.cov, 2.0 * b.cov
    big = np.linalg.det(va + vb)
    lam = 4.0 * (np.linalg.det(va) - 0.25) * (np.linalg.det(vb) - 0.25)
    lam = max(lam, 0.0)
    d = a.mean - b.mean
    expo = -0.5 * d @ np.linalg.solve(a.cov + b.cov, d)
    return float(np.exp(expo) / (np.sqrt(big + lam) - np.sqrt(lam)))


def wigner_density(state: GaussianState, point) -> float:
    point = np.asarray(point, dtype=float)
    d = point - state.mean
    n = state.mean.size
    norm = (2 * np.pi) ** (n / 2) * np.sqrt(np.linalg.det(state.cov))
    return float(np.exp(-0.5 * d @ np.linalg.solve(state.cov, d)) / norm)
