"""Rate-unit handling. All internal math is in nats."""

import math

import numpy as np

from .errors import InvalidInputError

UNITS = ("bits", "nats")
DEFAULT_UNIT = "bits"


def check_unit(unit):
    if unit not in UNITS:
        raise InvalidInputError(f"unknown rate unit {unit!r}; expected one of {UNITS}")
    return unit


def from_nats(value, unit=DEFAULT_UNIT):
    """Convert a rate (or array of rates) expressed in nats to ``unit``."""
    check_unit(unit)
    if unit == "bits":
        return value / math.log(2.0)
    return value


def log1p_rate(x, unit=DEFAULT_UNIT):
    """``log(1 + x)`` in the requested unit."""
    return from_nats(np.log1p(x), unit)
