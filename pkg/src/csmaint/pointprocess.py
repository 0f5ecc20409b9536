"""PPP, Matern type-II hardcore and SSI patterns with Rayleigh marks, and their shot noise.

All three samplers start from the same Poisson draw (positions, fading marks
and uniform birth times).  MHC keeps a point iff no other point within the
exclusion radius was born earlier; SSI offers the candidates in birth order
and keeps one iff it is at least the exclusion radius from everything kept
so far.  Birth order is a uniformly random order, so SSI has its usual law,
and with a shared generator MHC is a subset of SSI, which is a subset of PPP.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .stats import EmpiricalSample

MIN_DISTANCE_M = 1e-6


class Process(str, enum.Enum):
    PPP = "ppp"
    MHC = "mhc"
    SSI = "ssi"


class ResampleRequired(ValueError):
    """A point sits within MIN_DISTANCE_M of the measuring point."""


@dataclass(frozen=True)
class MonteCarloConfig:
    process: Process = Process.PPP
    lam: float = 1e-4
    exclusion_m: float = 70.0
    region_radius_m: float = 282.0
    iterations: int = 100_000
    seed: int = 0
    tx_power_w: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "process", Process(str(self.process).lower()
                                                     if not isinstance(self.process, Process)
                                                     else self.process))
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.lam < 0 or self.exclusion_m < 0:
            raise ValueError("lambda and exclusion radius must be nonnegative")
        if self.region_radius_m <= 0 or self.tx_power_w <= 0:
            raise ValueError("region radius and power must be positive")


@dataclass
class PointPattern:
    points: np.ndarray  # (n, 2) meters, relative to the region center
    marks: np.ndarray   # received power at 1 m, watts
    region_radius_m: float
    center: tuple[float, float] = (0.0, 0.0)
    birth: np.ndarray = field(default=None, repr=False)
    resampled: int = 0

    def __len__(self) -> int:
        return len(self.marks)

    def subset(self, keep: np.ndarray) -> "PointPattern":
        return PointPattern(self.points[keep], self.marks[keep], self.region_radius_m,
                            self.center, None if self.birth is None else self.birth[keep],
                            self.resampled)

    def min_pair_distance(self) -> float:
        if len(self) < 2:
            return math.inf
        d = np.sqrt(_pair_d2(self.points))
        np.fill_diagonal(d, np.inf)
        return float(d.min())


def iteration_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for one Monte Carlo iteration."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _uniform_disk(rng, n, radius):
    r = radius * np.sqrt(rng.random(n))
    theta = 2 * math.pi * rng.random(n)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def _pair_d2(points):
    diff = points[:, None, :] - points[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def sample_ppp(cfg: MonteCarloConfig, rng: np.random.Generator) -> PointPattern:
    radius = cfg.region_radius_m
    n = rng.poisson(cfg.lam * math.pi * radius**2) if cfg.lam > 0 else 0
    points = _uniform_disk(rng, n, radius)
    resampled = 0
    # a point on top of the measuring point has probability zero; redraw it
    while n and (bad := np.hypot(points[:, 0], points[:, 1]) < MIN_DISTANCE_M).any():
        points[bad] = _uniform_disk(rng, int(bad.sum()), radius)
        resampled += int(bad.sum())
    marks = rng.exponential(cfg.tx_power_w, n)
    birth = rng.random(n)
    return PointPattern(points, marks, radius, birth=birth, resampled=resampled)


def mhc_thin(pattern: PointPattern, exclusion_m: float) -> PointPattern:
    n = len(pattern)
    if exclusion_m <= 0 or n < 2:
        return pattern
    close = _pair_d2(pattern.points) < exclusion_m**2
    np.fill_diagonal(close, False)
    older = pattern.birth[None, :] < pattern.birth[:, None]
    keep = ~np.any(close & older, axis=1)
    return pattern.subset(keep)


def ssi_thin(pattern: PointPattern, exclusion_m: float) -> PointPattern:
    n = len(pattern)
    if exclusion_m <= 0 or n < 2:
        return pattern
    close = _pair_d2(pattern.points) < exclusion_m**2
    np.fill_diagonal(close, False)
    keep = np.zeros(n, dtype=bool)
    for i in np.argsort(pattern.birth, kind="stable"):
        if not np.any(close[i] & keep):
            keep[i] = True
    return pattern.subset(keep)


def sample_mhc(cfg: MonteCarloConfig, rng: np.random.Generator) -> PointPattern:
    return mhc_thin(sample_ppp(cfg, rng), cfg.exclusion_m)


def sample_ssi(cfg: MonteCarloConfig, rng: np.random.Generator) -> PointPattern:
    return ssi_thin(sample_ppp(cfg, rng), cfg.exclusion_m)


SAMPLERS = {Process.PPP: sample_ppp, Process.MHC: sample_mhc, Process.SSI: sample_ssi}


def sample_pattern(cfg: MonteCarloConfig, rng: np.random.Generator) -> PointPattern:
    return SAMPLERS[cfg.process](cfg, rng)


def measure_aggregate(pattern: PointPattern, origin=(0.0, 0.0)) -> float:
    """Shot noise sum of mark / d^4 at ``origin``."""
    if len(pattern) == 0:
        return 0.0
    d = np.hypot(pattern.points[:, 0] - origin[0], pattern.points[:, 1] - origin[1])
    if np.any(d < MIN_DISTANCE_M):
        raise ResampleRequired(f"point within {MIN_DISTANCE_M} m of the measuring point")
    return float(np.sum(pattern.marks / d**4))


@dataclass
class MonteCarloResult:
    cfg: MonteCarloConfig
    aggregate_w: np.ndarray
    retained: np.ndarray        # points kept per iteration
    retained_inner: np.ndarray  # points kept inside radius R - r
    resampled: int = 0

    @property
    def sample(self) -> EmpiricalSample:
        return EmpiricalSample.unit(self.aggregate_w)

    def inner_density(self) -> float:
        """Retained intensity measured away from the region edge."""
        inner = self.cfg.region_radius_m - self.cfg.exclusion_m
        return float(self.retained_inner.mean()) / (math.pi * inner**2)


def _run_range(cfg: MonteCarloConfig, start: int, stop: int):
    inner2 = (cfg.region_radius_m - cfg.exclusion_m) ** 2
    n = stop - start
    agg = np.empty(n)
    kept = np.empty(n, dtype=np.int64)
    kept_inner = np.empty(n, dtype=np.int64)
    resampled = 0
    sampler = SAMPLERS[cfg.process]
    for k in range(n):
        pat = sampler(cfg, iteration_rng(cfg.seed, start + k))
        agg[k] = measure_aggregate(pat)
        kept[k] = len(pat)
        kept_inner[k] = int(np.count_nonzero(np.einsum("ij,ij->i", pat.points, pat.points) <= inner2))
        resampled += pat.resampled
    return agg, kept, kept_inner, resampled


def run_monte_carlo(cfg: MonteCarloConfig, workers: int = 1, chunk: int = 10_000) -> MonteCarloResult:
    """Run ``cfg.iterations`` independent iterations; output does not depend on ``workers``."""
    bounds = [(s, min(s + chunk, cfg.iterations)) for s in range(0, cfg.iterations, chunk)]
    if workers > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_range, [cfg] * len(bounds), *zip(*bounds)))
    else:
        parts = [_run_range(cfg, s, e) for s, e in bounds]
    agg, kept, inner, res = zip(*parts)
    return MonteCarloResult(cfg, np.concatenate(agg), np.concatenate(kept),
                            np.concatenate(inner), int(sum(res)))


def monte_carlo_interference(cfg: MonteCarloConfig, workers: int = 1) -> EmpiricalSample:
    return run_monte_carlo(cfg, workers).sample
