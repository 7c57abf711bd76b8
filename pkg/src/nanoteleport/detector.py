"""SET radio-frequency mixer readout: demodulated current, sensitivities, POVM widths."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import units
from .circuit import DerivedCircuit
from .protocol import NoiseAmplitudes

LINEAR_REGIME_FRACTION = 0.1


def bessel_j(n: int, x, terms: int = 60):
    """Bessel function of the first kind by its power series (fine for |x| < ~20)."""
    if n < 0:
        return (-1) ** n * bessel_j(-n, x, terms)
    x = np.asarray(x, dtype=float)
    half = x / 2.0
    term = half**n / math.factorial(n)
    total = term.copy()
    sq = -(half**2)
    for k in range(1, terms):
        term = term * sq / (k * (k + n))
        total = total + term
    return total if total.ndim else float(total)


@dataclass(frozen=True)
class DetectorSpec:
    I_0: float = 1e-9
    alpha_g: float = 1.9
    sqrt_S_q: float = 1e-6
    C_x_d: float = 0.5e-15
    V_x_d: float = 10.0
    d_1: float = 100e-9
    C_p_d: float = 1e-15
    beta_hd: float = 1.0
    bandwidth: float = 100e6

    def __post_init__(self):
        if self.alpha_g <= 0:
            raise ValueError("alpha_g must be positive")
        for name in ("sqrt_S_q", "C_x_d", "V_x_d", "d_1", "C_p_d", "beta_hd", "bandwidth"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def alpha_x(self) -> float:
        """Charge-phase gain per metre of displacement, 2 pi C_x V_x / (e d_1)."""
        return 2 * math.pi * self.C_x_d * self.V_x_d / (units.e * self.d_1)

    def check_bandwidth(self, omega_nr: float) -> bool:
        return self.bandwidth < 2 * omega_nr


def demodulated_current(spec: DetectorSpec, alpha_x: float, x_i: float) -> float:
    """Static (DC) SET current, linear in the measured quadrature."""
    if abs(alpha_x * x_i) > LINEAR_REGIME_FRACTION * spec.alpha_g:
        warnings.warn("demodulation outside the linear regime", RuntimeWarning, stacklevel=2)
    return spec.I_0 * bessel_j(0, spec.alpha_g) - spec.I_0 * bessel_j(1, spec.alpha_g) * alpha_x * x_i


def current_trace(spec: DetectorSpec, alpha_x: float, x_i: float, p_i: float, phase):
    """Instantaneous current I_0 cos(2 pi Q / e) over the mixing phase omega_nr * t."""
    phase = np.asarray(phase, dtype=float)
    signal = alpha_x * (x_i * np.cos(phase) + p_i * np.sin(phase))
    return spec.I_0 * np.cos(spec.alpha_g * np.cos(phase) + signal)


def displacement_sensitivity(spec: DetectorSpec) -> float:
    """Shot-noise-limited displacement sensitivity sqrt(S_x) in m/sqrt(Hz)."""
    return spec.beta_hd * spec.sqrt_S_q * units.e * spec.d_1 / (spec.C_x_d * spec.V_x_d)


def momentum_sensitivity(spec: DetectorSpec, C_Sigma: float) -> float:
    """Charge sensitivity for the phase-mode momentum, sqrt(S_p) in e/sqrt(Hz)."""
    return spec.beta_hd * spec.sqrt_S_q * C_Sigma / spec.C_p_d


def charge_zero_point(derived: DerivedCircuit) -> float:
    """Zero-point charge sqrt(h nu_phi C_Sigma / 2) of the phase mode, in units of e."""
    return math.sqrt(units.h * derived.omega_phi * derived.C_Sigma / 2) / units.e


@dataclass(frozen=True)
class DetectorReport:
    sqrt_S_x: float
    sqrt_S_p: float
    delta_x_phys: float
    delta_p_phys: float
    noise: NoiseAmplitudes


def noise_amplitudes(spec: DetectorSpec, tau_m: float, derived: DerivedCircuit) -> NoiseAmplitudes:
    return detector_report(spec, tau_m, derived).noise


def detector_report(spec: DetectorSpec, tau_m: float, derived: DerivedCircuit) -> DetectorReport:
    if tau_m <= 0:
        raise ValueError("tau_m must be positive")
    sx = displacement_sensitivity(spec)
    sp = momentum_sensitivity(spec, derived.C_Sigma)
    dx = sx / math.sqrt(tau_m)
    dp = sp / math.sqrt(tau_m)
    delta_x = dx / (2 * derived.delta_x0)
    delta_p = dp / charge_zero_point(derived)
    return DetectorReport(sx, sp, dx, dp, NoiseAmplitudes.from_deltas(delta_x, delta_p, tau_m))
