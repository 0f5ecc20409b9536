"""Active-node thinning, the busy-probability fixed point and the effective density."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import optimize, stats

from ..config import PhyMacConfig
from .dcf import power_distribution, slot_durations, solve_dcf
from .geometry import POISSON_TAIL, effective_cs_range, poisson_truncation, sharing_area

SECTORS = 8


class SectorModelError(ValueError):
    pass


class PonBracketWarning(RuntimeWarning):
    """g(p) = RHS(p) - p has no sign change on [0, 1]."""


@dataclass(frozen=True)
class SectorModel:
    """Weights mapping the busy sector count D to the idle-fraction index eta.

    ``coefficients[eta][D]`` multiplies p_on^D (1 - p_on)^(8 - D) in p_eta.
    The default places all C(8, D) configurations with D busy sectors on
    eta = 8 - D: a node is active with probability (idle sectors) / 8.
    """

    coefficients: tuple[tuple[float, ...], ...]
    order: int = SECTORS

    def __post_init__(self):
        c = self.coefficients
        if len(c) != self.order + 1 or any(len(row) != self.order + 1 for row in c):
            raise SectorModelError(f"coefficients must be {self.order + 1}x{self.order + 1}")
        if any(v < 0 for row in c for v in row):
            raise SectorModelError("coefficients must be nonnegative")
        for d in range(self.order + 1):
            col = sum(c[eta][d] for eta in range(self.order + 1))
            if abs(col - math.comb(self.order, d)) > 1e-9 * math.comb(self.order, d):
                raise SectorModelError(f"column D={d} sums to {col}, expected C({self.order},{d})")

    @classmethod
    def default(cls) -> "SectorModel":
        n = SECTORS
        rows = tuple(
            tuple(math.comb(n, d) if eta == n - d else 0 for d in range(n + 1))
            for eta in range(n + 1)
        )
        return cls(rows)

    def p_eta(self, p_on):
        """Probabilities of eta = 0..8; exact when ``p_on`` is a Fraction."""
        n = self.order
        basis = [p_on**d * (1 - p_on) ** (n - d) for d in range(n + 1)]
        vals = [sum(self.coefficients[eta][d] * basis[d] for d in range(n + 1)) for eta in range(n + 1)]
        if isinstance(p_on, Fraction):
            return vals
        return np.array(vals, dtype=float)


def active_node_pmf(n: int, p_on, sector_model: SectorModel | None = None):
    """P[N_a = a | N = n] for a = 0..n.

    Returns a float array, or a list of Fractions when ``p_on`` is a Fraction.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not 0 <= p_on <= 1:
        raise ValueError("p_on must lie in [0, 1]")
    model = sector_model or SectorModel.default()
    p_eta = model.p_eta(p_on)
    order = model.order
    exact = isinstance(p_on, Fraction)
    out = []
    for a in range(n + 1):
        total = 0
        for eta in range(order + 1):
            q = Fraction(eta, order) if exact else eta / order
            total += math.comb(n, a) * q**a * (1 - q) ** (n - a) * p_eta[eta]
        out.append(total)
    return out if exact else np.array(out, dtype=float)


class SharingAreaModel:
    """Precomputed pieces of the busy-probability polynomial for one (lambda, cfg).

    Everything except the sector probabilities p_eta is independent of p_on,
    so the fixed-point map collapses to sum_eta p_eta(p_on) * busy_weight[eta].
    """

    def __init__(self, lam: float, cfg: PhyMacConfig, sector_model: SectorModel | None = None,
                 tail: float = POISSON_TAIL):
        if lam <= 0:
            raise ValueError("lambda must be positive")
        self.lam = lam
        self.cfg = cfg
        self.sector_model = sector_model or SectorModel.default()
        self.cs_range_m = effective_cs_range(cfg)
        self.mu = lam * sharing_area(self.cs_range_m)
        self.n_max = max(poisson_truncation(self.mu, tail), 1)
        self.poisson = stats.poisson.pmf(np.arange(self.n_max + 1), self.mu)

        durations = slot_durations(cfg)
        self.power = [np.array([1.0])]
        for a in range(1, self.n_max + 1):
            self.power.append(power_distribution(a, cfg, solve_dcf(a, cfg).tau, durations))

        order = self.sector_model.order
        nmax = self.n_max
        # thin[eta][n][a] = C(n,a) q^a (1-q)^(n-a), q = eta/order
        thin = np.zeros((order + 1, nmax + 1, nmax + 1))
        for eta in range(order + 1):
            q = eta / order
            for n in range(nmax + 1):
                thin[eta, n, : n + 1] = stats.binom.pmf(np.arange(n + 1), n, q)
        # B[a][z], zero-padded
        power = np.zeros((nmax + 1, nmax + 1))
        for a, row in enumerate(self.power):
            power[a, : a + 1] = row
        # z_weight[eta][z] = sum_n P[N=n] sum_a thin[eta,n,a] B_a(z)
        self.z_weight = np.einsum("n,ena,az->ez", self.poisson, thin, power)
        busy = 1.0 - power[:, 0]
        self.busy_weight = np.einsum("n,ena,a->e", self.poisson, thin, busy)

    def rhs(self, p_on: float) -> float:
        return float(self.sector_model.p_eta(p_on) @ self.busy_weight)

    def g(self, p_on: float) -> float:
        return self.rhs(p_on) - p_on

    def z_pmf(self, p_on: float) -> np.ndarray:
        return self.sector_model.p_eta(p_on) @ self.z_weight

    def solve(self, tol: float = 1e-9) -> float:
        g0, g1 = self.g(0.0), self.g(1.0)
        if g0 == 0.0:
            return 0.0
        if g1 == 0.0:
            return 1.0
        if g0 * g1 > 0:
            warnings.warn(
                f"no sign change of the p_on map on [0, 1] (lambda={self.lam}); "
                "returning the boundary with the smaller residual",
                PonBracketWarning, stacklevel=2,
            )
            return 0.0 if abs(g0) <= abs(g1) else 1.0
        root = optimize.bisect(self.g, 0.0, 1.0, xtol=1e-14, maxiter=200)
        if abs(self.g(root)) >= tol:
            warnings.warn(f"p_on residual {self.g(root):.3g} exceeds {tol}", PonBracketWarning, stacklevel=2)
        return root


def solve_p_on(lam: float, cfg: PhyMacConfig, sector_model: SectorModel | None = None) -> float:
    return SharingAreaModel(lam, cfg, sector_model).solve()


def tx_count_distribution(lam: float, cfg: PhyMacConfig, p_on: float,
                          sector_model: SectorModel | None = None,
                          tail: float = POISSON_TAIL) -> np.ndarray:
    """P[Z = z], z = 0..n_max, the number of on-air nodes in a sharing area."""
    return SharingAreaModel(lam, cfg, sector_model, tail).z_pmf(p_on)


def mhc_density_baseline(lam: float, exclusion_m: float) -> float:
    """Intensity of a type-II Matern hardcore thinning of a PPP."""
    if lam < 0 or exclusion_m <= 0:
        raise ValueError("need lambda >= 0 and a positive exclusion distance")
    area = math.pi * exclusion_m**2
    return -math.expm1(-lam * area) / area


@dataclass(frozen=True)
class SharingAreaAnalysis:
    lambda_init: float
    cs_range_m: float
    p_on_star: float
    z_pmf: np.ndarray = field(repr=False)
    e_z: float
    lambda_eff: float
    residual: float = 0.0

    def to_dict(self) -> dict[str, object]:
        return {
            "lambda_init": self.lambda_init,
            "cs_range_m": self.cs_range_m,
            "p_on_star": self.p_on_star,
            "e_z": self.e_z,
            "lambda_eff": self.lambda_eff,
            "residual": self.residual,
            "z_pmf": [float(v) for v in self.z_pmf],
        }


def effective_density(analysis: SharingAreaAnalysis) -> float:
    z = np.arange(len(analysis.z_pmf))
    return float(z @ analysis.z_pmf) / sharing_area(analysis.cs_range_m)


def analyze_sharing_area(lam: float, cfg: PhyMacConfig,
                         sector_model: SectorModel | None = None) -> SharingAreaAnalysis:
    model = SharingAreaModel(lam, cfg, sector_model)
    p_on = model.solve()
    pmf = model.z_pmf(p_on)
    e_z = float(np.arange(len(pmf)) @ pmf)
    return SharingAreaAnalysis(lam, model.cs_range_m, p_on, pmf, e_z,
                               e_z / sharing_area(model.cs_range_m), model.g(p_on))
