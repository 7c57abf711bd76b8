"""Truncated Fock-space density matrices, used only as an independent fidelity oracle."""

import numpy as np
from scipy.linalg import expm, sqrtm

CUTOFF = 70


def annihilation(n=CUTOFF):
    return np.diag(np.sqrt(np.arange(1, n)), 1)


def gaussian_rho(mean, var_x, var_p, n=CUTOFF):
    """Displaced squeezed thermal state with diagonal quadrature variances (vacuum = 1/4)."""
    a = annihilation(n)
    ad = a.T
    nbar = 2 * np.sqrt(var_x * var_p) - 0.5
    s = 0.25 * np.log(var_p / var_x)
    k = np.arange(n)
    pk = nbar**k / (nbar + 1) ** (k + 1) if nbar > 0 else (k == 0).astype(float)
    rho = np.diag(pk)
    sq = expm(0.5 * s * (a @ a - ad @ ad))
    alpha = mean[0] + 1j * mean[1]
    disp = expm(alpha * ad - np.conj(alpha) * a)
    u = disp @ sq
    rho = u @ rho @ u.conj().T
    return rho / np.trace(rho)


def uhlmann(r1, r2):
    s = sqrtm(r1)
    return float(np.real(np.trace(sqrtm(s @ r2 @ s))) ** 2)


def quadrature_moments(rho):
    a = annihilation(rho.shape[0])
    x = (a + a.T) / 2
    p = (a - a.T) / 2j
    mx = np.real(np.trace(rho @ x))
    mp = np.real(np.trace(rho @ p))
    vx = np.real(np.trace(rho @ x @ x)) - mx**2
    vp = np.real(np.trace(rho @ p @ p)) - mp**2
    return np.array([mx, mp]), vx, vp
