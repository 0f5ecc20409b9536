"""Carrier-sense geometry and the node count in a sharing area."""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from ..config import PhyMacConfig

POISSON_TAIL = 1e-12


def effective_cs_range(cfg: PhyMacConfig) -> float:
    """Radius of the disk whose area equals the mean stochastic sensing area."""
    gap = cfg.cs_threshold_w - cfg.noise_w
    if gap <= 0:
        raise ValueError("effective CS range undefined for cs_threshold_w <= noise_w")
    return (math.pi * cfg.tx_power_w / gap) ** 0.25 / math.sqrt(2.0)


def cs_busy_probability(distance_m, cfg: PhyMacConfig):
    """Probability that a single Rayleigh-faded transmitter at ``distance_m`` trips carrier sense."""
    r = np.asarray(distance_m, dtype=float)
    if np.any(r <= 0):
        raise ValueError("distance must be positive")
    out = np.exp(-(cfg.cs_threshold_w - cfg.noise_w) * r**4 / cfg.tx_power_w)
    return float(out) if out.ndim == 0 else out


def mean_sensing_area(cfg: PhyMacConfig) -> float:
    gap = cfg.cs_threshold_w - cfg.noise_w
    return math.pi**1.5 / (2.0 * math.sqrt(gap / cfg.tx_power_w))


def sharing_area(cs_range_m: float) -> float:
    return math.pi * (cs_range_m / 2.0) ** 2


def sharing_count_mean(lam: float, cs_range_m: float) -> float:
    return lam * sharing_area(cs_range_m)


def sharing_count_pmf(lam: float, cs_range_m: float, n):
    """Poisson probability of ``n`` deployed nodes in a disk of radius R/2."""
    if lam <= 0 or cs_range_m <= 0:
        raise ValueError("density and range must be positive")
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ValueError("n must be nonnegative")
    out = stats.poisson.pmf(n_arr, sharing_count_mean(lam, cs_range_m))
    return float(out) if np.ndim(out) == 0 else out


def poisson_truncation(mu: float, tail: float = POISSON_TAIL) -> int:
    """Smallest n_max with P[N > n_max] < tail."""
    if mu <= 0:
        return 0
    n = int(mu)
    while stats.poisson.sf(n, mu) >= tail:
        n += 1
    return n
