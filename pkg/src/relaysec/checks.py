"""Invariant suite run on a single channel realization.

Each check yields a ``CheckResult``.  Checks marked ``advisory`` describe
empirical behaviour rather than provable facts; they are reported but only
counted as failures when ``strict=True``.
"""

from dataclasses import dataclass

import numpy as np

from .pencil import PencilSpec, brute_force_oracle, pencil_eig_grid, rayleigh_quotient
from .schemes import DEFAULT_GRID_SIZE, achievable_rates, build_all_regions, region_contains

__all__ = ["CheckResult", "validate_realization", "all_passed", "frontier_violations"]

ROUNDTRIP_RTOL = 1e-9
NULL_RTOL = 1e-10
EIG_RTOL = 1e-9
POWER_TOL = 1e-9
ORDER_TOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    advisory: bool = False

    def line(self):
        status = "PASS" if self.passed else ("WARN" if self.advisory else "FAIL")
        return f"{status} {self.name}" + (f": {self.detail}" if self.detail else "")


def all_passed(results, strict=False):
    return all(r.passed for r in results if strict or not r.advisory)


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def frontier_violations(curve):
    """Count frontier points dominated by a sample plus non-frontier points left undominated."""
    x, y = curve.r_d, curve.r_e
    bad = 0
    for i in range(len(x)):
        dominated = np.any((x >= x[i]) & (y >= y[i]) & ((x > x[i]) | (y > y[i])))
        earlier_dup = np.any((x[:i] == x[i]) & (y[:i] == y[i]))
        if curve.frontier[i] == (dominated or earlier_dup):
            bad += 1
    return bad


def _roundtrip(real, regions):
    worst = 0.0
    for scheme in ("single_null_e", "single_null_d", "double_null"):
        curve = regions[scheme]
        for k, wts in enumerate(curve.weights):
            pt = achievable_rates(real.h, real.z, wts, real.n0, unit=curve.unit)
            worst = max(worst, _rel(pt.r_d, curve.r_d[k]), _rel(pt.r_e, curve.r_e[k]))
    return worst


def _null_residual(real, regions):
    h, z = real.h, real.z
    nh, nz = np.linalg.norm(h), np.linalg.norm(z)
    worst = 0.0

    def resid(v, x, nv):
        nx = np.linalg.norm(x)
        return 0.0 if nx == 0 else abs(np.vdot(v, x)) / (nv * nx)

    for wts in regions["single_null_e"].weights:
        worst = max(worst, resid(h, wts.u, nh))
    for wts in regions["single_null_d"].weights:
        worst = max(worst, resid(z, wts.w, nz))
    for wts in regions["double_null"].weights:
        worst = max(worst, resid(h, wts.u, nh), resid(z, wts.w, nz))
    return worst


def _eig_consistency(real, p_r, grid):
    worst = 0.0
    min_lambda = np.inf
    for hv, zv in ((real.h, real.z), (real.z, real.h)):
        mu, vecs = pencil_eig_grid(hv, zv, grid * p_r, grid * p_r, real.n0)
        for k, a in enumerate(grid * p_r):
            spec = PencilSpec(hv, zv, a, a, real.n0)
            lam = 1.0 + mu[k]
            worst = max(worst, _rel(rayleigh_quotient(vecs[k], spec), lam))
            min_lambda = min(min_lambda, lam)
    return worst, min_lambda


def _monotone(arr, increasing):
    d = np.diff(arr)
    return int(np.sum(d < -ORDER_TOL)) if increasing else int(np.sum(d > ORDER_TOL))


def validate_realization(real, p_r=1.0, alpha_grid=None, oracle_trials=20000, seed=0,
                         unit="bits"):
    """Run every invariant on ``real`` and return the list of ``CheckResult``."""
    grid = np.linspace(0.0, 1.0, DEFAULT_GRID_SIZE) if alpha_grid is None \
        else np.asarray(alpha_grid, dtype=float)
    regions = build_all_regions(real.h, real.z, p_r, real.n0, grid, unit=unit)
    out = []
    null_ok = real.m >= 2

    worst, min_lambda = _eig_consistency(real, p_r, grid)
    out.append(CheckResult("eigvec_rayleigh_consistency", worst <= EIG_RTOL, f"max rel err {worst:.3e}"))
    if null_ok:
        out.append(CheckResult("lambda_at_least_one", min_lambda >= 1.0, f"min lambda {min_lambda:.12g}"))

    spec = PencilSpec(real.h, real.z, 0.5 * p_r, 0.5 * p_r, real.n0)
    lam = 1.0 + pencil_eig_grid(real.h, real.z, spec.a, spec.b, real.n0)[0][0]
    oracle = brute_force_oracle(spec, oracle_trials, seed=seed)
    out.append(CheckResult("oracle_below_lambda", oracle <= lam + 1e-9,
                           f"oracle {oracle:.12g} vs lambda {lam:.12g}"))

    negative = sum(int(np.sum(c.r_d < 0) + np.sum(c.r_e < 0)) for c in regions.values())
    out.append(CheckResult("rates_nonnegative", negative == 0, f"{negative} negative entries"))

    tdma, outer = regions["tdma"], regions["outer"]
    if grid[0] == 0.0 and grid[-1] == 1.0:
        ok = tdma.r_d[-1] == outer.r_d[-1] and tdma.r_e[0] == outer.r_e[0]
        out.append(CheckResult("tdma_corners_match_outer", ok))
    out.append(CheckResult("outer_monotone",
                           _monotone(outer.r_d, True) + _monotone(outer.r_e, False) == 0))

    if null_ok:
        single_e, single_d = regions["single_null_e"], regions["single_null_d"]
        double = regions["double_null"]
        worst = _roundtrip(real, regions)
        out.append(CheckResult("evaluator_roundtrip", worst <= ROUNDTRIP_RTOL, f"max rel err {worst:.3e}"))
        worst = _null_residual(real, regions)
        out.append(CheckResult("null_constraints", worst <= NULL_RTOL, f"max residual {worst:.3e}"))

        eq = max(np.max(np.abs(outer.r_d - single_e.r_d)), np.max(np.abs(outer.r_e - single_d.r_e)))
        out.append(CheckResult("outer_equals_single_protected_side", eq <= 1e-9, f"max diff {eq:.3e}"))
        viol = int(np.sum(double.r_d > single_e.r_d + ORDER_TOL)
                   + np.sum(single_e.r_e > double.r_e + ORDER_TOL)
                   + np.sum(double.r_e > outer.r_e + ORDER_TOL)
                   + np.sum(double.r_e > single_d.r_e + ORDER_TOL)
                   + np.sum(single_d.r_d > double.r_d + ORDER_TOL)
                   + np.sum(double.r_d > outer.r_d + ORDER_TOL))
        out.append(CheckResult("per_alpha_ordering", viol == 0, f"{viol} violations"))

        bad_power = 0
        for scheme in ("single_null_e", "single_null_d", "double_null"):
            for wts in regions[scheme].weights:
                bad_power += (not wts.satisfies_power(p_r, POWER_TOL)
                              or wts.total_power > p_r + POWER_TOL)
        out.append(CheckResult("power_budget", bad_power == 0, f"{bad_power} violations"))

        hard = (_monotone(double.r_d, True) + _monotone(double.r_e, False)
                + _monotone(single_e.r_d, True) + _monotone(single_d.r_e, False))
        out.append(CheckResult("monotone_in_alpha", hard == 0, f"{hard} violations"))
        soft = _monotone(single_e.r_e, False) + _monotone(single_d.r_d, True)
        out.append(CheckResult("single_null_leaky_side_monotone", soft == 0,
                               f"{soft} violations", advisory=True))

        out.append(CheckResult("outer_contains_single_union",
                               region_contains(outer, regions["single_null_union"])))
        out.append(CheckResult("single_union_contains_double",
                               region_contains(regions["single_null_union"], double),
                               advisory=True))

    bad = sum(frontier_violations(c) for c in regions.values())
    out.append(CheckResult("frontier_nondominated", bad == 0, f"{bad} misclassified samples"))
    return out
