"""Seeded ensembles of channel draws pushed through the region pipeline.

Draw ``i`` always uses ``sample_channel(cfg.fading, i)``, so per-draw results
do not depend on scheduling.  Aggregates are reduced in draw-index order,
which keeps the summary bit-identical for any number of workers.
"""

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import FadingConfig, first_hop_capacity, sample_channel
from .csvio import write_region_csv
from .errors import InputFormatError, InvalidInputError
from .schemes import (DEFAULT_GRID_SIZE, SCHEMES, apply_first_hop_cap, build_region,
                      frontier_gap, region_contains)
from .units import DEFAULT_UNIT, check_unit

__all__ = [
    "CONTAINMENT_CHECKS",
    "EnsembleConfig",
    "EnsembleSummary",
    "DrawResult",
    "EnsembleDrawError",
    "evaluate_draw",
    "run_ensemble",
    "load_ensemble_config",
]

# name -> (outer scheme, inner scheme)
CONTAINMENT_CHECKS = {
    "outer_contains_single_union": ("outer", "single_null_union"),
    "single_union_contains_double": ("single_null_union", "double_null"),
    "double_contains_tdma": ("double_null", "tdma"),
}
CONTAINMENT_TOL = 1e-9
# name -> (upper scheme, lower scheme)
GAP_CHECKS = {
    "outer_vs_double": ("outer", "double_null"),
    "outer_vs_single_e": ("outer", "single_null_e"),
}


class EnsembleDrawError(RuntimeError):
    def __init__(self, draw_index, cause):
        super().__init__(f"draw {draw_index} failed: {cause}")
        self.draw_index = draw_index


@dataclass(frozen=True, eq=False)
class EnsembleConfig:
    fading: FadingConfig
    n_draws: int
    p_r: float
    alpha_grid: np.ndarray = field(default_factory=lambda: np.linspace(0.0, 1.0, DEFAULT_GRID_SIZE))
    schemes_enabled: tuple = SCHEMES
    cap_first_hop: bool = False
    p_s: float = None
    unit: str = DEFAULT_UNIT

    def __post_init__(self):
        if int(self.n_draws) != self.n_draws or self.n_draws < 1:
            raise InvalidInputError(f"n_draws must be a positive integer, got {self.n_draws}")
        if not (self.p_r > 0 and math.isfinite(self.p_r)):
            raise InvalidInputError(f"p_r must be positive, got {self.p_r}")
        grid = np.asarray(self.alpha_grid, dtype=float)
        if grid.ndim != 1 or grid.shape[0] < 2 or np.any(np.diff(grid) <= 0) \
                or grid[0] < 0 or grid[-1] > 1:
            raise InvalidInputError("alpha_grid must be strictly increasing in [0, 1] with >= 2 points")
        object.__setattr__(self, "alpha_grid", grid)
        unknown = set(self.schemes_enabled) - set(SCHEMES)
        if unknown:
            raise InvalidInputError(f"unknown schemes: {sorted(unknown)}")
        object.__setattr__(self, "schemes_enabled",
                           tuple(s for s in SCHEMES if s in self.schemes_enabled))
        if self.cap_first_hop and not (self.p_s is not None and self.p_s > 0):
            raise InvalidInputError("cap_first_hop requires a positive p_s")
        check_unit(self.unit)

    @classmethod
    def from_dict(cls, obj):
        """Build from the JSON config layout (see ``to_dict``)."""
        try:
            fading = FadingConfig(**obj["fading"])
            grid = obj.get("alpha_grid", DEFAULT_GRID_SIZE)
            if isinstance(grid, int):
                grid = np.linspace(0.0, 1.0, grid)
            return cls(
                fading=fading,
                n_draws=obj["n_draws"],
                p_r=float(obj["p_r"]),
                alpha_grid=np.asarray(grid, dtype=float),
                schemes_enabled=tuple(obj.get("schemes_enabled", SCHEMES)),
                cap_first_hop=bool(obj.get("cap_first_hop", False)),
                p_s=obj.get("p_s"),
                unit=obj.get("unit", DEFAULT_UNIT),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputFormatError(f"bad ensemble config: {exc!r}") from exc

    def to_dict(self):
        f = self.fading
        return {
            "fading": {"m": f.m, "sigma_h": f.sigma_h, "sigma_z": f.sigma_z,
                       "sigma_g": f.sigma_g, "n0": f.n0, "seed": f.seed,
                       "noise_relay": f.noise_relay},
            "n_draws": self.n_draws,
            "p_r": self.p_r,
            "alpha_grid": [float(a) for a in self.alpha_grid],
            "schemes_enabled": list(self.schemes_enabled),
            "cap_first_hop": self.cap_first_hop,
            "p_s": self.p_s,
            "unit": self.unit,
        }


def load_ensemble_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}: invalid JSON: {exc}") from exc
    except OSError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise InputFormatError(f"{path}: config must be a JSON object")
    return EnsembleConfig.from_dict(obj)


@dataclass(frozen=True, eq=False)
class DrawResult:
    index: int
    regions: dict
    containment: dict
    gaps: dict
    first_hop: float = None


@dataclass(frozen=True, eq=False)
class EnsembleSummary:
    n_draws: int
    alpha: np.ndarray
    mean_r_d: dict
    mean_r_e: dict
    containment_pass: dict
    gap_stats: dict
    first_hop_stats: dict = None

    def to_dict(self):
        out = {
            "n_draws": self.n_draws,
            "alpha": [float(a) for a in self.alpha],
            "mean_frontier": {
                s: {"r_d": [float(v) for v in self.mean_r_d[s]],
                    "r_e": [float(v) for v in self.mean_r_e[s]]}
                for s in self.mean_r_d
            },
            "containment_pass": dict(self.containment_pass),
            "gap_stats": {k: dict(v) for k, v in self.gap_stats.items()},
        }
        if self.first_hop_stats is not None:
            out["first_hop_stats"] = dict(self.first_hop_stats)
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _needed_schemes(cfg):
    needed = set(cfg.schemes_enabled)
    if cfg.fading.m >= 2:
        for pair in list(CONTAINMENT_CHECKS.values()) + list(GAP_CHECKS.values()):
            needed.update(pair)
    else:
        needed &= {"tdma", "outer"}
    return [s for s in SCHEMES if s in needed]


def evaluate_draw(cfg, index):
    """Regions, containment flags and frontier gaps for draw ``index``."""
    real = sample_channel(cfg.fading, index, first_hop=cfg.cap_first_hop)
    regions = {s: build_region(s, real.h, real.z, cfg.p_r, real.n0, cfg.alpha_grid, unit=cfg.unit)
               for s in _needed_schemes(cfg)}
    c1 = None
    if cfg.cap_first_hop:
        c1 = first_hop_capacity(real.g, cfg.p_s, real.noise_relay, unit=cfg.unit)
        regions = {s: apply_first_hop_cap(r, c1) for s, r in regions.items()}
    containment = {}
    gaps = {}
    if cfg.fading.m >= 2:
        for name, (big, small) in CONTAINMENT_CHECKS.items():
            containment[name] = region_contains(regions[big], regions[small], CONTAINMENT_TOL)
        for name, (upper, lower) in GAP_CHECKS.items():
            gaps[name] = frontier_gap(regions[upper], regions[lower])
    return DrawResult(index, regions, containment, gaps, c1)


def _safe_evaluate(args):
    cfg, index = args
    try:
        return evaluate_draw(cfg, index)
    except Exception as exc:  # reported with the draw index
        raise EnsembleDrawError(index, exc) from exc


def _draws(cfg, workers):
    jobs = [(cfg, i) for i in range(cfg.n_draws)]
    if workers is None or workers <= 1:
        return [_safe_evaluate(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_safe_evaluate, jobs))


def summarize(cfg, results):
    """Reduce per-draw results (in draw-index order) into an ``EnsembleSummary``."""
    results = sorted(results, key=lambda r: r.index)
    mean_r_d, mean_r_e = {}, {}
    for scheme in cfg.schemes_enabled:
        if scheme not in results[0].regions:
            continue
        mean_r_d[scheme] = np.mean(np.stack([r.regions[scheme].r_d for r in results]), axis=0)
        mean_r_e[scheme] = np.mean(np.stack([r.regions[scheme].r_e for r in results]), axis=0)
    containment = {name: int(sum(bool(r.containment[name]) for r in results))
                   for name in results[0].containment}
    if set(CONTAINMENT_CHECKS) - {"double_contains_tdma"} <= set(containment):
        containment["outer_single_double"] = int(sum(
            r.containment["outer_contains_single_union"]
            and r.containment["single_union_contains_double"] for r in results))
    gap_stats = {}
    for name in results[0].gaps:
        vals = np.array([r.gaps[name] for r in results])
        gap_stats[name] = {"mean": float(np.mean(vals)), "max": float(np.max(vals))}
    first_hop = None
    if cfg.cap_first_hop:
        vals = np.array([r.first_hop for r in results])
        first_hop = {"mean": float(np.mean(vals)), "min": float(np.min(vals))}
    return EnsembleSummary(len(results), cfg.alpha_grid.copy(), mean_r_d, mean_r_e,
                           containment, gap_stats, first_hop)


def run_ensemble(cfg, workers=1, per_draw_dir=None):
    """Evaluate ``cfg.n_draws`` draws and aggregate them.

    With ``per_draw_dir`` set, each draw's enabled regions are written to
    ``draw_<index>.csv`` in that directory.
    """
    results = _draws(cfg, workers)
    if per_draw_dir is not None:
        out = Path(per_draw_dir)
        out.mkdir(parents=True, exist_ok=True)
        for r in results:
            curves = [r.regions[s] for s in cfg.schemes_enabled if s in r.regions]
            write_region_csv(curves, out / f"draw_{r.index:05d}.csv")
    return summarize(cfg, results)
