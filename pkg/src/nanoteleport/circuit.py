"""Circuit quantities from raw device parameters, the validity hierarchy and the schedule.

All frequencies and energies are ordinary frequencies nu in Hz (energy E stored
as E/h). Factors of 2*pi are applied only where an angular rate is needed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from . import units

PHASE_REGIME_RATIO = 20.0


@dataclass(frozen=True)
class DeviceParams:
    E_J: float = 500e9
    phi_ex: float = math.pi / 3
    C_J: float = 49e-15
    C_g: float = 0.35e-15
    C_x0: float = 0.65e-15
    C_m: float = 1e-15
    C_r: float = 4e-15
    V_x0: float = 2.4
    V_g: float = 0.0
    Q_0: float = 0.0
    omega_nr: float = 1e9
    m_nr: float = 1.733887578758168e-17  # delta_x0 = 22 fm at 1 GHz
    d_0: float = 100e-9
    omega_r: float = 5e9
    T: float = 50e-3
    Q_factor: float = 1e4
    gamma_d: float = 100e3
    E_J_eff: float | None = None

    def __post_init__(self):
        for name in ("C_J", "C_g", "C_x0", "C_m", "C_r"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.C_m / self.C_r >= 0.5:
            raise ValueError(f"need C_r >> C_m, got C_m/C_r = {self.C_m / self.C_r:.3g}")

    @property
    def C_Sigma(self) -> float:
        return 2 * self.C_J + self.C_g + self.C_x0 + self.C_m

    def effective_josephson(self) -> float:
        if self.E_J_eff is not None:
            value = self.E_J_eff
        else:
            value = 2 * self.E_J * math.cos(self.phi_ex)
        if value <= 0:
            raise ValueError(f"effective Josephson energy must be positive, got {value:.4g} Hz")
        return value


def mass_for_zero_point(delta_x0: float, omega_nr: float) -> float:
    """Resonator mass giving zero-point amplitude `delta_x0` at frequency `omega_nr` (Hz)."""
    return units.hbar / (2 * 2 * math.pi * omega_nr * delta_x0**2)


@dataclass(frozen=True)
class DerivedCircuit:
    C_Sigma: float
    E_C: float
    E_J_eff: float
    omega_phi: float
    delta_x0: float
    lambda_ab: float
    lambda_bc: float
    omega_d_squeeze: float
    omega_d_beamsplit: float


def charging_energy(C_Sigma: float) -> float:
    return units.e**2 / (2 * C_Sigma) / units.h


def plasma_frequency(E_J_eff: float, E_C: float) -> float:
    return math.sqrt(8 * E_J_eff * E_C)


def derive(p: DeviceParams) -> DerivedCircuit:
    C_Sigma = p.C_Sigma
    E_C = charging_energy(C_Sigma)
    E_J_eff = p.effective_josephson()
    if E_J_eff / E_C < PHASE_REGIME_RATIO:
        warnings.warn(f"phase regime violated: E_J_eff/E_C = {E_J_eff / E_C:.3g}", RuntimeWarning, stacklevel=2)
    omega_phi = plasma_frequency(E_J_eff, E_C)
    delta_x0 = math.sqrt(units.hbar / (2 * p.m_nr * 2 * math.pi * p.omega_nr))
    lambda_ab = (
        (2 * p.C_x0 * p.V_x0 / units.e)
        * (delta_x0 / p.d_0)
        * (2 * E_J_eff) ** 0.25
        * E_C**0.75
    )
    # hbar sqrt(C_m^2 w_phi w_r / 4 C_Sigma C_r): the 2*pi factors cancel in ordinary frequency
    lambda_bc = math.sqrt(p.C_m**2 * omega_phi * p.omega_r / (4 * C_Sigma * p.C_r))
    return DerivedCircuit(
        C_Sigma=C_Sigma,
        E_C=E_C,
        E_J_eff=E_J_eff,
        omega_phi=omega_phi,
        delta_x0=delta_x0,
        lambda_ab=lambda_ab,
        lambda_bc=lambda_bc,
        omega_d_squeeze=omega_phi + p.omega_nr,
        omega_d_beamsplit=omega_phi - p.omega_nr,
    )


@dataclass(frozen=True)
class Inequality:
    name: str
    small_label: str
    small: float
    large_label: str
    large: float
    margin: float

    @property
    def ratio(self) -> float:
        return self.small / self.large

    @property
    def passed(self) -> bool:
        return self.ratio < self.margin


@dataclass
class ConstraintReport:
    items: list[Inequality] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.items)

    @property
    def failures(self) -> list[Inequality]:
        return [i for i in self.items if not i.passed]

    def to_rows(self):
        yield ("inequality", "small", "small_value_per_s", "large", "large_value_per_s", "ratio", "margin", "pass")
        for i in self.items:
            yield (i.name, i.small_label, i.small, i.large_label, i.large, i.ratio, i.margin, i.passed)


def check_hierarchy(d: DerivedCircuit, p: DeviceParams, tau_m: float, margin: float = 0.1) -> ConstraintReport:
    """Evaluate the chain  w_nr/Q, gamma_d << lambda_ab, lambda_bc, 1/tau_m << w_nr, w_r, w_phi << E_J_eff.

    Everything is compared as a rate in 1/s (2*pi*nu for frequencies). The first
    link is checked for every pair; the later links pair each rate with the mode
    frequencies it acts on. "<<" passes when small/large < margin.
    """
    two_pi = 2 * math.pi
    dissipation = {"omega_nr/Q": two_pi * p.omega_nr / p.Q_factor, "gamma_d": two_pi * p.gamma_d}
    protocol = {"lambda_ab": two_pi * d.lambda_ab, "lambda_bc": two_pi * d.lambda_bc, "1/tau_m": 1.0 / tau_m}
    modes = {"omega_nr": two_pi * p.omega_nr, "omega_r": two_pi * p.omega_r, "omega_phi": two_pi * d.omega_phi}
    E_J_eff = two_pi * d.E_J_eff

    pairs = [(s, l) for s in dissipation for l in protocol]
    rows = [("dissipation", s, dissipation[s], l, protocol[l]) for s, l in pairs]
    rwa = [
        ("lambda_ab", "omega_nr"), ("lambda_ab", "omega_phi"),
        ("lambda_bc", "omega_r"), ("lambda_bc", "omega_phi"),
        ("1/tau_m", "omega_nr"), ("1/tau_m", "omega_phi"),
    ]
    rows += [("rotating-wave", s, protocol[s], l, modes[l]) for s, l in rwa]
    rows += [("harmonic", m, modes[m], "E_J_eff", E_J_eff) for m in modes]
    return ConstraintReport([Inequality(n, s, sv, l, lv, margin) for n, s, sv, l, lv in rows])


@dataclass(frozen=True)
class ScheduleRow:
    operation: str
    modes: tuple[str, str]
    duration: float


@dataclass(frozen=True)
class ProtocolSchedule:
    rows: tuple[ScheduleRow, ...]
    r_2: float

    @property
    def total_duration(self) -> float:
        return sum(r.duration for r in self.rows)


def schedule(d: DerivedCircuit, r_2: float, tau_m: float) -> ProtocolSchedule:
    if r_2 <= 0:
        raise ValueError("r_2 must be positive")
    if d.lambda_ab <= 0 or d.lambda_bc <= 0:
        raise ValueError("couplings must be positive")
    rate_ab = 2 * math.pi * d.lambda_ab
    rate_bc = 2 * math.pi * d.lambda_bc
    rows = (
        ScheduleRow(f"squeezing r_2={r_2:g}", ("a2", "b2"), r_2 / rate_ab),
        ScheduleRow("swapping", ("b2", "c_r"), math.pi / (2 * rate_bc)),
        ScheduleRow("swapping", ("c_r", "b1"), math.pi / (2 * rate_bc)),
        ScheduleRow("50-50 beam splitter", ("a1", "b1"), math.pi / (4 * rate_ab)),
        ScheduleRow("Bell measurement", ("a1", "b1"), tau_m),
    )
    return ProtocolSchedule(rows, r_2)
