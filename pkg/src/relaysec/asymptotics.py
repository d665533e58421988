"""High-SNR, low-SNR and many-relay diagnostics for the rate regions.

All functions work on one channel pair ``(h, z)``.  Rates are reported in the
requested unit; low-SNR slopes are rates per unit relay power in the same
unit, so ``rate(p_r) / p_r`` can be compared to them directly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, UnsupportedDimensionError
from .pencil import gram_invariants, null_projector_apply
from .schemes import (double_null_point, outer_bound_point, single_null_point,
                      tdma_point)
from .units import DEFAULT_UNIT, check_unit, from_nats

__all__ = [
    "REGIMES",
    "AsymptoticReport",
    "HighSnrGap",
    "high_snr_constants",
    "high_snr_gap",
    "difference_eigmax",
    "low_snr_slopes",
    "measured_low_snr_slopes",
    "large_m_gap",
    "high_snr_report",
    "low_snr_report",
    "large_m_report",
]

REGIMES = ("high_snr", "low_snr", "large_m")


@dataclass(frozen=True, eq=False)
class AsymptoticReport:
    regime: str
    alpha: float
    p_r_values: np.ndarray
    gaps: dict = field(default_factory=dict)
    limit_constants: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise InvalidInputError(f"unknown regime {self.regime!r}")
        n = len(self.p_r_values)
        for name, seq in self.gaps.items():
            if len(seq) != n:
                raise InvalidInputError(f"gap sequence {name!r} has length {len(seq)}, expected {n}")

    def rows(self):
        """Long-format ``(regime, p_r, alpha, quantity, value)`` tuples."""
        out = []
        for i, p_r in enumerate(self.p_r_values):
            for name, value in self.limit_constants.items():
                out.append((self.regime, float(p_r), self.alpha, name, float(value)))
            for name, seq in self.gaps.items():
                out.append((self.regime, float(p_r), self.alpha, name, float(seq[i])))
        return out


@dataclass(frozen=True)
class HighSnrGap:
    gap_d: float
    gap_e: float
    asymptote_gap_d: float
    asymptote_gap_e: float


def _channels(h, z):
    h = np.asarray(h, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    if h.ndim != 1 or h.shape != z.shape:
        raise InvalidInputError("h and z must be 1-D vectors of equal length")
    if h.shape[0] < 2:
        raise UnsupportedDimensionError("projector-based diagnostics need at least 2 relays")
    if not (np.any(h) and np.any(z)):
        raise InvalidInputError("h and z must be nonzero")
    return h, z


def _null_gain(v, x):
    """``x^H (I - v v^H/|v|^2) x``, zero when the pair is parallel."""
    if gram_invariants(v, x)[3] == 0.0:
        return 0.0
    p = null_projector_apply(v, x)
    return float(np.vdot(p, p).real)


def high_snr_constants(h, z):
    """Best gain towards D from a unit direction in the null space of ``z``, and vice versa.

    ``c_d = max_{|x|=1, z^H x=0} |h^H x|^2 = h^H (I - z z^H/|z|^2) h``.
    """
    h, z = _channels(h, z)
    return _null_gain(z, h), _null_gain(h, z)


def high_snr_gap(h, z, alpha, p_r, n0=1.0, unit=DEFAULT_UNIT):
    """How far the outer bound sits above double null-space beamforming.

    ``gap_*`` compare the two regions at the same split.  ``asymptote_gap_*``
    compare the outer bound with its large-power form
    ``log(alpha p_r / n0) + log c_d`` (and the mirror for E).
    """
    h, z = _channels(h, z)
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha}")
    outer = outer_bound_point(h, z, p_r, n0, alpha, unit="nats")
    double, _ = double_null_point(h, z, p_r, n0, alpha, unit="nats")
    c_d, c_e = high_snr_constants(h, z)
    with np.errstate(divide="ignore"):
        asym_d = math.log(alpha * p_r / n0) + (math.log(c_d) if c_d > 0 else -math.inf)
        asym_e = math.log((1.0 - alpha) * p_r / n0) + (math.log(c_e) if c_e > 0 else -math.inf)
    return HighSnrGap(
        gap_d=from_nats(outer.r_d - double.r_d, unit),
        gap_e=from_nats(outer.r_e - double.r_e, unit),
        asymptote_gap_d=from_nats(outer.r_d - asym_d, unit),
        asymptote_gap_e=from_nats(outer.r_e - asym_e, unit),
    )


def difference_eigmax(h, z):
    """Largest eigenvalue of the indefinite matrix ``h h^H - z z^H``.

    On span{h, z} the nonzero eigenvalues solve
    ``x^2 - (|h|^2 - |z|^2) x - G = 0``; the remaining ones are 0.
    """
    h = np.asarray(h, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    hh, zz, _, gram = gram_invariants(h, z)
    d = hh - zz
    if h.shape[0] == 1:
        return d
    s = math.sqrt(d * d + 4.0 * gram)
    if d >= 0.0:
        return 0.5 * (d + s)
    return 0.0 if s == d else 2.0 * gram / (s - d)


def low_snr_slopes(h, z, alpha, n0=1.0, p_r=None, unit=DEFAULT_UNIT):
    """First-order rate slopes ``d rate / d p_r`` as ``p_r -> 0`` for every scheme.

    The single null-space slope for E divides by the effective noise
    ``n0 + |z^H w_opt|^2`` of the actual eigen-beam at power ``p_r``;
    with ``p_r=None`` its limit ``n0`` is used.  Slopes are clamped at
    zero like the rates they describe.
    """
    h, z = _channels(h, z)
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise InvalidInputError(f"alpha must lie in [0, 1], got {alpha}")
    check_unit(unit)
    c_d, c_e = high_snr_constants(h, z)
    lam_d = max(difference_eigmax(h, z), 0.0)
    lam_e = max(difference_eigmax(z, h), 0.0)
    n_t = n0
    if p_r is not None:
        _, weights = single_null_point(h, z, p_r, n0, alpha, "E")
        n_t = n0 + abs(np.vdot(z, weights.w)) ** 2
    nats = {
        "slope_outer_d": alpha * lam_d / n0,
        "slope_outer_e": (1.0 - alpha) * lam_e / n0,
        "slope_single_d": alpha * lam_d / n0,
        "slope_single_e": (1.0 - alpha) * c_e / n_t,
        "slope_double_d": alpha * c_d / n0,
        "slope_double_e": (1.0 - alpha) * c_e / n0,
        "slope_tdma_d": alpha * lam_d / n0,
        "slope_tdma_e": (1.0 - alpha) * lam_e / n0,
    }
    return {name: from_nats(value, unit) for name, value in nats.items()}


def measured_low_snr_slopes(h, z, alpha, p_r, n0=1.0, unit=DEFAULT_UNIT):
    """``rate / p_r`` of every scheme at power ``p_r``, keyed like ``low_snr_slopes``."""
    h, z = _channels(h, z)
    points = {
        "outer": outer_bound_point(h, z, p_r, n0, alpha, unit=unit),
        "single": single_null_point(h, z, p_r, n0, alpha, "E", unit=unit)[0],
        "double": double_null_point(h, z, p_r, n0, alpha, unit=unit)[0],
        "tdma": tdma_point(h, z, p_r, n0, alpha, unit=unit),
    }
    out = {}
    for scheme, pt in points.items():
        out[f"slope_{scheme}_d"] = pt.r_d / p_r
        out[f"slope_{scheme}_e"] = pt.r_e / p_r
    return out


def large_m_gap(h, z, alpha, p_r, n0=1.0):
    """Relative shortfall of the null-steered gain against the unconstrained bound.

    Compares ``1 + alpha p_r |h|^2 / n0`` (an upper bound on the outer-bound
    eigenvalue) with ``1 + alpha p_r h^H (I - z z^H/|z|^2) h / n0``; the
    result lies in ``[0, 1]``.
    """
    h, z = _channels(h, z)
    a = alpha * p_r
    hh, zz, hz, gram = gram_invariants(h, z)
    lost = hh if gram == 0.0 else abs(hz) ** 2 / zz
    return float(a * lost / (n0 + a * hh))


def _p_grid(p_r_values):
    arr = np.asarray(p_r_values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] == 0 or np.any(arr <= 0):
        raise InvalidInputError("p_r values must be a nonempty sequence of positive numbers")
    return arr


def high_snr_report(h, z, alpha, p_r_values, n0=1.0, unit=DEFAULT_UNIT):
    grid = _p_grid(p_r_values)
    rows = [high_snr_gap(h, z, alpha, p, n0, unit) for p in grid]
    c_d, c_e = high_snr_constants(h, z)
    return AsymptoticReport(
        "high_snr", float(alpha), grid,
        gaps={
            "gap_d": np.array([r.gap_d for r in rows]),
            "gap_e": np.array([r.gap_e for r in rows]),
            "asymptote_gap_d": np.array([r.asymptote_gap_d for r in rows]),
            "asymptote_gap_e": np.array([r.asymptote_gap_e for r in rows]),
        },
        limit_constants={"c_d": c_d, "c_e": c_e},
    )


def low_snr_report(h, z, alpha, p_r_values, n0=1.0, unit=DEFAULT_UNIT):
    """Predicted slopes, measured ``rate / p_r`` and their relative errors per power."""
    grid = _p_grid(p_r_values)
    gaps = {}
    for i, p in enumerate(grid):
        predicted = low_snr_slopes(h, z, alpha, n0, p_r=p, unit=unit)
        measured = measured_low_snr_slopes(h, z, alpha, p, n0, unit)
        for name, value in predicted.items():
            gaps.setdefault(name, np.empty(grid.shape[0]))[i] = value
        for name, value in measured.items():
            gaps.setdefault("measured_" + name, np.empty(grid.shape[0]))[i] = value
    return AsymptoticReport(
        "low_snr", float(alpha), grid, gaps=gaps,
        limit_constants={
            "lambda_diff_d": difference_eigmax(h, z),
            "lambda_diff_e": difference_eigmax(z, h),
        },
    )


def large_m_report(h, z, alpha, p_r_values, n0=1.0):
    grid = _p_grid(p_r_values)
    return AsymptoticReport(
        "large_m", float(alpha), grid,
        gaps={
            "large_m_gap_d": np.array([large_m_gap(h, z, alpha, p, n0) for p in grid]),
            "large_m_gap_e": np.array([large_m_gap(z, h, 1.0 - alpha, p, n0) for p in grid]),
        },
        limit_constants={"m": float(np.shape(h)[0])},
    )
