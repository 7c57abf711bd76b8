"""Physical constants and SI-prefixed quantity parsing."""

import re
from decimal import Decimal, InvalidOperation

from scipy import constants

h = constants.h
hbar = constants.hbar
e = constants.e
k_B = constants.k

PREFIXES = {
    "a": -18, "f": -15, "p": -12, "n": -9, "u": -6, "µ": -6, "m": -3,
    "": 0, "k": 3, "M": 6, "G": 9, "T": 12,
}
BASE_UNITS = ("Hz", "F", "V", "K", "s", "m", "C", "A", "kg", "rad", "e")

_QUANTITY = re.compile(r"^\s*([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)\s*([^\s]*)\s*$")


def _split_unit(unit: str):
    for base in sorted(BASE_UNITS, key=len, reverse=True):
        if unit.endswith(base) and unit[: -len(base)] in PREFIXES:
            return PREFIXES[unit[: -len(base)]], base
    raise ValueError(f"unknown unit {unit!r}")


def parse_quantity(text: str, expect: str | None = None) -> float:
    """Parse '0.65 fF' or '50 mK' into a float in base SI units.

    Scaling goes through Decimal so '0.65 fF' and '6.5e-16 F' give the same float.
    A bare number is accepted as-is.
    """
    m = _QUANTITY.match(text)
    if not m:
        raise ValueError(f"cannot parse quantity {text!r}")
    number, unit = m.groups()
    try:
        value = Decimal(number)
    except InvalidOperation as exc:
        raise ValueError(f"bad number in {text!r}") from exc
    if not unit:
        return float(value)
    exponent, base = _split_unit(unit)
    if expect is not None and base != expect:
        raise ValueError(f"{text!r}: expected unit {expect}, got {base}")
    return float(value.scaleb(exponent))


def format_quantity(value: float, unit: str = "") -> str:
    """Exact text form: repr of the base-unit float, so parsing round-trips bit-identically."""
    return f"{value!r} {unit}".rstrip()
