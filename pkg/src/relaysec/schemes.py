"""Secrecy rate regions of the relay beamforming strategies.

Rates follow the secure-broadcast interference model: with weights ``w``
(message for D) and ``u`` (message for E),

    R_d = log(1 + |h^H w|^2 / (n0 + |h^H u|^2)) - log(1 + |z^H w|^2 / n0)
    R_e = log(1 + |z^H u|^2 / (n0 + |z^H w|^2)) - log(1 + |h^H u|^2 / n0)

clamped at zero.  ``achievable_rates`` evaluates these for arbitrary weights
and is the reference that the closed-form scheme points are checked against.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidInputError, UnsupportedDimensionError
from .pencil import (canonical_phase, gram_invariants, null_projector_apply, pencil_eig_grid,
                     pencil_excess_grid)
from .units import DEFAULT_UNIT, check_unit, from_nats

__all__ = [
    "SCHEMES",
    "DEFAULT_GRID_SIZE",
    "BeamformingWeights",
    "RatePoint",
    "RegionCurve",
    "alpha_grid",
    "achievable_rates",
    "single_null_point",
    "double_null_point",
    "tdma_point",
    "outer_bound_point",
    "build_region",
    "build_all_regions",
    "apply_first_hop_cap",
    "time_sharing_hull",
    "region_contains",
    "frontier_gap",
]

SCHEMES = ("single_null_d", "single_null_e", "single_null_union",
           "double_null", "tdma", "outer")
DEFAULT_GRID_SIZE = 101
POWER_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BeamformingWeights:
    w: np.ndarray
    u: np.ndarray
    alpha: float

    @property
    def total_power(self):
        return float(np.vdot(self.w, self.w).real + np.vdot(self.u, self.u).real)

    def satisfies_power(self, p_r, tol=POWER_TOL):
        pw = float(np.vdot(self.w, self.w).real)
        pu = float(np.vdot(self.u, self.u).real)
        return pw <= self.alpha * p_r + tol and pu <= (1.0 - self.alpha) * p_r + tol


@dataclass(frozen=True)
class RatePoint:
    r_d: float
    r_e: float

    def __post_init__(self):
        if not (self.r_d >= 0 and self.r_e >= 0):
            raise InvalidInputError(f"rates must be nonnegative, got ({self.r_d}, {self.r_e})")

    def as_tuple(self):
        return (self.r_d, self.r_e)


@dataclass(frozen=True, eq=False)
class RegionCurve:
    """Samples of one scheme over a power-split grid.

    The region is the union of rectangles ``[0, r_d] x [0, r_e]`` over the
    samples; ``frontier`` flags the Pareto-nondominated samples.  For
    ``single_null_union`` the grid appears twice: first with E protected,
    then with D protected (see ``protected``).
    """

    scheme: str
    alpha: np.ndarray
    r_d: np.ndarray
    r_e: np.ndarray
    frontier: np.ndarray
    unit: str = DEFAULT_UNIT
    weights: tuple = None
    protected: tuple = None

    def __len__(self):
        return self.alpha.shape[0]

    def point(self, i):
        return RatePoint(float(self.r_d[i]), float(self.r_e[i]))

    def frontier_points(self):
        """Frontier samples as an ``(k, 2)`` array sorted by increasing ``r_d``."""
        pts = np.column_stack([self.r_d[self.frontier], self.r_e[self.frontier]])
        return pts[np.argsort(pts[:, 0], kind="stable")]


def alpha_grid(n=DEFAULT_GRID_SIZE):
    if n < 2:
        raise InvalidInputError(f"alpha grid needs at least 2 points, got {n}")
    return np.linspace(0.0, 1.0, int(n))


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.shape[0] < 2:
        raise InvalidInputError("alpha grid must be a 1-D sequence of at least 2 values")
    if np.any(grid < 0) or np.any(grid > 1):
        raise InvalidInputError("alpha grid values must lie in [0, 1]")
    if np.any(np.diff(grid) <= 0):
        raise InvalidInputError("alpha grid must be strictly increasing")
    return grid


def _check_alpha(alpha):
    if not (0.0 <= alpha <= 1.0):
        raise InvalidInputError(f"alpha must lie in [0, 1], got {alpha}")
    return float(alpha)


def _check_channels(h, z, n0):
    h = np.asarray(h, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    if h.ndim != 1 or h.shape != z.shape or h.shape[0] < 1:
        raise InvalidInputError(f"h and z must be 1-D of equal nonzero length, got {h.shape}, {z.shape}")
    if not n0 > 0:
        raise InvalidInputError(f"n0 must be positive, got {n0}")
    return h, z


def _check_power(p_r):
    if not (p_r > 0 and math.isfinite(p_r)):
        raise InvalidInputError(f"p_r must be positive, got {p_r}")
    return float(p_r)


def _require_null_space(h):
    if h.shape[0] < 2:
        raise UnsupportedDimensionError("null-space beamforming needs at least 2 relays")


def achievable_rates(h, z, weights, n0=1.0, unit=DEFAULT_UNIT):
    """Secrecy rate pair achieved by arbitrary weights (clamped at zero)."""
    h, z = _check_channels(h, z, n0)
    w = np.asarray(weights.w, dtype=np.complex128)
    u = np.asarray(weights.u, dtype=np.complex128)
    if w.shape != h.shape or u.shape != h.shape:
        raise InvalidInputError("weight vectors must match the channel length")
    hw = abs(np.vdot(h, w)) ** 2
    hu = abs(np.vdot(h, u)) ** 2
    zw = abs(np.vdot(z, w)) ** 2
    zu = abs(np.vdot(z, u)) ** 2
    r_d = math.log1p(hw / (n0 + hu)) - math.log1p(zw / n0)
    r_e = math.log1p(zu / (n0 + zw)) - math.log1p(hu / n0)
    return RatePoint(from_nats(max(r_d, 0.0), unit), from_nats(max(r_e, 0.0), unit))


def _projected_direction(v, x):
    """Unit vector along ``(I - v v^H/|v|^2) x`` and the squared projection norm.

    Returns ``(None, 0.0)`` when the projection vanishes (``x`` parallel to
    ``v`` to within ``PARALLEL_TOL``).
    """
    _, _, _, gram = gram_invariants(v, x)
    if gram == 0.0:
        return None, 0.0
    proj = null_projector_apply(v, x)
    c = float(np.vdot(proj, proj).real)
    return canonical_phase(proj) / math.sqrt(c), c


def _scaled_rows(direction, powers, m):
    out = np.zeros((powers.shape[0], m), dtype=np.complex128)
    if direction is not None:
        out[:] = direction[None, :] * np.sqrt(powers)[:, None]
    return out


def _single_null_grid(h, z, p_r, n0, alphas):
    """E-protected single null-space beamforming over a grid of splits (nats).

    ``w`` is the scaled generalized eigenvector, ``u`` is confined to the
    null space of ``h`` and sees the effective noise ``n0 + |z^H w|^2``.
    """
    m = h.shape[0]
    p_w = alphas * p_r
    p_u = (1.0 - alphas) * p_r
    mu, vecs = pencil_eig_grid(h, z, p_w, p_w, n0)
    w = vecs * np.sqrt(p_w)[:, None]
    r_d = np.log1p(np.maximum(mu, 0.0))
    off = alphas == 0.0
    w[off] = 0.0
    r_d[off] = 0.0
    n_t = n0 + np.abs(w @ z.conj()) ** 2
    direction, c = _projected_direction(h, z)
    u = _scaled_rows(direction, p_u, m)
    r_e = np.log1p(p_u * c / n_t)
    return r_d, r_e, w, u


def _double_null_grid(h, z, p_r, n0, alphas):
    m = h.shape[0]
    p_w = alphas * p_r
    p_u = (1.0 - alphas) * p_r
    dir_w, c_d = _projected_direction(z, h)
    dir_u, c_e = _projected_direction(h, z)
    w = _scaled_rows(dir_w, p_w, m)
    u = _scaled_rows(dir_u, p_u, m)
    return np.log1p(p_w * c_d / n0), np.log1p(p_u * c_e / n0), w, u


def _variant_grid(variant, h, z, p_r, n0, alphas):
    if variant is None:
        return _double_null_grid(h, z, p_r, n0, alphas)
    if variant == "E":
        return _single_null_grid(h, z, p_r, n0, alphas)
    if variant == "D":
        r_e, r_d, u, w = _single_null_grid(z, h, p_r, n0, 1.0 - alphas)
        return r_d, r_e, w, u
    raise InvalidInputError(f"protected must be 'D' or 'E', got {variant!r}")


def single_null_point(h, z, p_r, n0=1.0, alpha=0.5, protected="E", unit=DEFAULT_UNIT):
    """Single null-space beamforming at power split ``alpha``.

    ``protected="E"`` keeps E's stream out of D's channel (``h^H u = 0``) and
    steers ``w`` by the generalized eigenvector; ``"D"`` is the mirror image
    (``z^H w = 0``).  Returns ``(RatePoint, BeamformingWeights)``.
    """
    h, z = _check_channels(h, z, n0)
    _require_null_space(h)
    p_r = _check_power(p_r)
    alpha = _check_alpha(alpha)
    check_unit(unit)
    r_d, r_e, w, u = _variant_grid(protected, h, z, p_r, n0, np.array([alpha]))
    point = RatePoint(from_nats(float(r_d[0]), unit), from_nats(float(r_e[0]), unit))
    return point, BeamformingWeights(w[0], u[0], alpha)


def double_null_point(h, z, p_r, n0=1.0, alpha=0.5, unit=DEFAULT_UNIT):
    """Double null-space beamforming: ``z^H w = 0`` and ``h^H u = 0``."""
    h, z = _check_channels(h, z, n0)
    _require_null_space(h)
    p_r = _check_power(p_r)
    alpha = _check_alpha(alpha)
    check_unit(unit)
    r_d, r_e, w, u = _double_null_grid(h, z, p_r, n0, np.array([alpha]))
    point = RatePoint(from_nats(float(r_d[0]), unit), from_nats(float(r_e[0]), unit))
    return point, BeamformingWeights(w[0], u[0], alpha)


def _tdma_nats(h, z, p_r, n0, alphas):
    mu_d = pencil_excess_grid(h, z, p_r, p_r, n0)
    mu_e = pencil_excess_grid(z, h, p_r, p_r, n0)
    # same log1p as the outer bound so the corners agree bit for bit
    full_d = float(np.log1p(max(float(mu_d), 0.0)))
    full_e = float(np.log1p(max(float(mu_e), 0.0)))
    return alphas * full_d, (1.0 - alphas) * full_e


def _outer_nats(h, z, p_r, n0, alphas):
    mu_d = pencil_excess_grid(h, z, alphas * p_r, alphas * p_r, n0)
    mu_e = pencil_excess_grid(z, h, (1.0 - alphas) * p_r, (1.0 - alphas) * p_r, n0)
    return np.log1p(np.maximum(mu_d, 0.0)), np.log1p(np.maximum(mu_e, 0.0))


def tdma_point(h, z, p_r, n0=1.0, alpha=0.5, unit=DEFAULT_UNIT):
    """Time sharing: each user gets full power for a fraction of the time."""
    h, z = _check_channels(h, z, n0)
    p_r = _check_power(p_r)
    alpha = _check_alpha(alpha)
    r_d, r_e = _tdma_nats(h, z, p_r, n0, np.array([alpha]))
    return RatePoint(from_nats(float(r_d[0]), unit), from_nats(float(r_e[0]), unit))


def outer_bound_point(h, z, p_r, n0=1.0, alpha=0.5, unit=DEFAULT_UNIT):
    """Outer bound: two MISO wiretap channels with powers ``alpha p_r`` and ``(1-alpha) p_r``."""
    h, z = _check_channels(h, z, n0)
    p_r = _check_power(p_r)
    alpha = _check_alpha(alpha)
    r_d, r_e = _outer_nats(h, z, p_r, n0, np.array([alpha]))
    return RatePoint(from_nats(float(r_d[0]), unit), from_nats(float(r_e[0]), unit))


def _curve(scheme, alphas, r_d, r_e, unit, weights=None, protected=None):
    r_d = np.asarray(from_nats(np.asarray(r_d, dtype=float), unit))
    r_e = np.asarray(from_nats(np.asarray(r_e, dtype=float), unit))
    frontier = np.asarray(_kernels.pareto_mask(r_d, r_e), dtype=bool)
    return RegionCurve(scheme, np.asarray(alphas, dtype=float), r_d, r_e, frontier,
                       unit=unit, weights=weights, protected=protected)


def build_region(scheme, h, z, p_r, n0=1.0, alpha_grid=None, swap_union=True,
                 unit=DEFAULT_UNIT):
    """Evaluate ``scheme`` on every power split of ``alpha_grid``.

    ``scheme`` is one of ``SCHEMES``.  ``"single_null_union"`` merges the
    E-protected and D-protected samples before the frontier is extracted
    unless ``swap_union`` is false, in which case only E is protected.
    """
    if scheme not in SCHEMES:
        raise InvalidInputError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    h, z = _check_channels(h, z, n0)
    p_r = _check_power(p_r)
    check_unit(unit)
    grid = _check_grid(np.linspace(0.0, 1.0, DEFAULT_GRID_SIZE) if alpha_grid is None else alpha_grid)

    if scheme == "tdma":
        r_d, r_e = _tdma_nats(h, z, p_r, n0, grid)
        return _curve(scheme, grid, r_d, r_e, unit)
    if scheme == "outer":
        r_d, r_e = _outer_nats(h, z, p_r, n0, grid)
        return _curve(scheme, grid, r_d, r_e, unit)

    _require_null_space(h)
    if scheme == "double_null":
        variants = [None]
    elif scheme == "single_null_e" or (scheme == "single_null_union" and not swap_union):
        variants = ["E"]
    elif scheme == "single_null_d":
        variants = ["D"]
    else:
        variants = ["E", "D"]

    parts = [_variant_grid(v, h, z, p_r, n0, grid) for v in variants]
    alphas = np.concatenate([grid] * len(variants))
    r_d = np.concatenate([p[0] for p in parts])
    r_e = np.concatenate([p[1] for p in parts])
    w = np.concatenate([p[2] for p in parts])
    u = np.concatenate([p[3] for p in parts])
    weights = tuple(BeamformingWeights(w[i], u[i], float(alphas[i])) for i in range(alphas.shape[0]))
    protected = None
    if variants != [None]:
        protected = tuple(v for v in variants for _ in range(grid.shape[0]))
    return _curve(scheme, alphas, r_d, r_e, unit, weights=weights, protected=protected)


def build_all_regions(h, z, p_r, n0=1.0, alpha_grid=None, schemes=SCHEMES, unit=DEFAULT_UNIT):
    """Dict of ``scheme -> RegionCurve``; null-space schemes are skipped for one relay."""
    out = {}
    for scheme in schemes:
        if np.shape(h)[0] < 2 and scheme not in ("tdma", "outer"):
            continue
        out[scheme] = build_region(scheme, h, z, p_r, n0, alpha_grid, unit=unit)
    return out


def apply_first_hop_cap(region, c1):
    """Clip every sample into the first-hop triangle ``r_d + r_e <= c1``.

    ``r_d`` is clipped to ``c1`` first and ``r_e`` takes what is left, so the
    cap never increases either coordinate.  Weights are dropped since capped
    points are no longer produced by them.
    """
    if not c1 >= 0:
        raise InvalidInputError(f"c1 must be nonnegative, got {c1}")
    r_d = np.minimum(region.r_d, c1)
    r_e = np.minimum(region.r_e, c1 - r_d)
    frontier = np.asarray(_kernels.pareto_mask(r_d, r_e), dtype=bool)
    return RegionCurve(region.scheme, region.alpha.copy(), r_d, r_e, frontier,
                       unit=region.unit, weights=None, protected=region.protected)


def time_sharing_hull(region):
    """Vertices of the convex hull of the region (time sharing between splits).

    Returned as an ``(k, 2)`` array walking the upper-right boundary from the
    ``r_e`` axis to the ``r_d`` axis.
    """
    pts = np.column_stack([region.r_d, region.r_e])
    pts = np.vstack([pts, [[0.0, 0.0], [pts[:, 0].max(), 0.0], [0.0, pts[:, 1].max()]]])
    pts = np.unique(pts, axis=0)
    upper = []
    for p in pts:  # sorted by r_d then r_e
        while len(upper) >= 2:
            o, q = upper[-2], upper[-1]
            cross = (q[0] - o[0]) * (p[1] - o[1]) - (q[1] - o[1]) * (p[0] - o[0])
            if cross >= 0:
                upper.pop()
            else:
                break
        upper.append(p)
    hull = np.array(upper)
    # keep the nonincreasing part: from the top-left corner to the right end
    start = int(np.argmax(hull[:, 1] - 1e-300 * hull[:, 0]))
    return hull[start:]


def _envelope(points, x, mode):
    """Largest ``r_e`` reachable at ``r_d = x`` under the outer region's frontier."""
    xs, ys = points[:, 0], points[:, 1]
    if mode == "staircase":
        ok = xs >= x
        return ys[ok].max() if np.any(ok) else -np.inf
    if x > xs[-1]:
        return -np.inf
    if x <= xs[0]:
        return ys[0]
    return float(np.interp(x, xs, ys))


def region_contains(outer, inner, tol=1e-9, mode="interp"):
    """Whether every frontier point of ``inner`` lies inside ``outer``.

    ``mode="staircase"`` uses the literal union of rectangles of the sampled
    splits.  ``mode="interp"`` joins consecutive frontier samples of
    ``outer`` with straight segments, which removes the artefact of
    comparing two different discrete grids against each other.
    ``mode="hull"`` compares against ``time_sharing_hull(outer)``, i.e. it
    allows time sharing between splits.  ``tol`` is an absolute slack in the
    rate unit.
    """
    if mode not in ("interp", "staircase", "hull"):
        raise InvalidInputError(f"unknown containment mode {mode!r}")
    if mode == "hull":
        pts, mode = time_sharing_hull(outer), "interp"
    else:
        pts = outer.frontier_points()
    for x, y in inner.frontier_points():
        if _envelope(pts, x - tol, mode) + tol < y:
            return False
    return True


def frontier_gap(upper, lower):
    """Mean over the shared split grid of ``max(dr_d, dr_e)`` between two curves."""
    if len(upper) != len(lower) or not np.array_equal(upper.alpha, lower.alpha):
        raise InvalidInputError("curves must share the same alpha grid")
    gaps = np.maximum(upper.r_d - lower.r_d, upper.r_e - lower.r_e)
    return float(np.mean(gaps))
