"""Run configuration: sectioned key = value text with explicit SI units.

    [device]
    C_x0 = 0.65 fF
    omega_nr = 1 GHz

Every key is checked against the dataclass fields; unknown keys are errors.
Defaults reproduce the reference operating point.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field

from .circuit import DeviceParams
from .detector import DetectorSpec
from .units import format_quantity, parse_quantity


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EnvConfig:
    T: float = 50e-3
    r_2: float = 1.5
    tau_m: float = 50e-9
    coherent_input: bool = True
    input_x: float = 0.0
    input_p: float = 0.0
    delta_x: float | None = None
    delta_p: float | None = None
    lambda_ab: float | None = None
    lambda_bc: float | None = None
    n_samples: int = 10_000
    margin: float = 0.1


@dataclass(frozen=True)
class SweepConfig:
    tau_min: float = 1e-9
    tau_max: float = 1e-5
    tau_points: int = 41
    theta_min: float = 1.0
    theta_max: float = 5.0
    theta_points: int = 41
    r2_list: tuple = (2.0, 0.5, 0.0)


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "."
    precision: int = 9


@dataclass(frozen=True)
class RunConfig:
    device: DeviceParams = field(default_factory=DeviceParams)
    detector: DetectorSpec = field(default_factory=DetectorSpec)
    env: EnvConfig = field(default_factory=EnvConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 0


SECTIONS = {
    "device": DeviceParams,
    "detector": DetectorSpec,
    "env": EnvConfig,
    "sweep": SweepConfig,
    "output": OutputConfig,
}

# base SI unit per key; None means a bare number
UNITS = {
    "device": {
        "E_J": "Hz", "E_J_eff": "Hz", "phi_ex": "rad", "C_J": "F", "C_g": "F", "C_x0": "F",
        "C_m": "F", "C_r": "F", "V_x0": "V", "V_g": "V", "Q_0": "C", "omega_nr": "Hz",
        "m_nr": "kg", "d_0": "m", "omega_r": "Hz", "T": "K", "Q_factor": None, "gamma_d": "Hz",
    },
    "detector": {
        "I_0": "A", "alpha_g": None, "sqrt_S_q": None, "C_x_d": "F", "V_x_d": "V", "d_1": "m",
        "C_p_d": "F", "beta_hd": None, "bandwidth": "Hz",
    },
    "env": {
        "T": "K", "r_2": None, "tau_m": "s", "coherent_input": "bool", "input_x": None,
        "input_p": None, "delta_x": None, "delta_p": None, "lambda_ab": "Hz", "lambda_bc": "Hz",
        "n_samples": "int", "margin": None,
    },
    "sweep": {
        "tau_min": "s", "tau_max": "s", "tau_points": "int", "theta_min": None, "theta_max": None,
        "theta_points": "int", "r2_list": "list",
    },
    "output": {"directory": "str", "precision": "int"},
}


def _parse_value(section: str, key: str, text: str):
    unit = UNITS[section][key]
    if unit == "str":
        return text.strip()
    if unit == "int":
        return int(text)
    if unit == "bool":
        low = text.strip().lower()
        if low not in ("true", "false"):
            raise ConfigError(f"[{section}] {key}: expected true/false")
        return low == "true"
    if unit == "list":
        return tuple(parse_quantity(t) for t in text.split(",") if t.strip())
    return parse_quantity(text, expect=unit)


def _format_value(section: str, key: str, value) -> str:
    unit = UNITS[section][key]
    if unit in ("str", "int"):
        return str(value)
    if unit == "bool":
        return "true" if value else "false"
    if unit == "list":
        return ", ".join(repr(float(v)) for v in value)
    return format_quantity(float(value), "" if unit in (None, "rad") else unit)


def parse_config(text: str) -> RunConfig:
    """Parse config text. A [device] section is mandatory; other sections default."""
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    unknown = set(cp.sections()) - set(SECTIONS) - {"run"}
    if unknown:
        raise ConfigError(f"unknown sections: {sorted(unknown)}")
    if "device" not in cp:
        raise ConfigError("missing [device] section")
    blocks = {}
    for name, cls in SECTIONS.items():
        kwargs = {}
        if name in cp:
            for key, raw in cp[name].items():
                if key not in UNITS[name]:
                    raise ConfigError(f"unknown key [{name}] {key}")
                try:
                    kwargs[key] = _parse_value(name, key, raw)
                except ValueError as exc:
                    raise ConfigError(f"[{name}] {key}: {exc}") from exc
        try:
            blocks[name] = cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[{name}]: {exc}") from exc
    seed = 0
    if "run" in cp:
        extra = set(cp["run"]) - {"seed"}
        if extra:
            raise ConfigError(f"unknown key [run] {sorted(extra)}")
        seed = int(cp["run"].get("seed", "0"))
    return RunConfig(seed=seed, **blocks)


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def dump_config(cfg: RunConfig) -> str:
    lines = []
    for name in SECTIONS:
        block = getattr(cfg, name)
        lines.append(f"[{name}]")
        for f in dataclasses.fields(block):
            value = getattr(block, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {_format_value(name, f.name, value)}")
        lines.append("")
    lines += ["[run]", f"seed = {cfg.seed}", ""]
    return "\n".join(lines)
