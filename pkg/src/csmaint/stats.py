"""Weighted empirical distributions and distances between them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from . import csvio


class EmptySampleError(ValueError):
    pass


@dataclass(frozen=True)
class EmpiricalSample:
    """Observed aggregate power values (W) with positive weights (dwell us, or 1)."""

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if v.size == 0:
            raise EmptySampleError("sample has no observations")
        if v.shape != w.shape:
            raise ValueError("values and weights differ in length")
        if np.any(~(w > 0)):
            raise ValueError("weights must be positive")
        if np.any(~np.isfinite(v)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)

    @classmethod
    def unit(cls, values) -> "EmpiricalSample":
        v = np.asarray(values, dtype=float)
        return cls(v, np.ones_like(v))

    def __len__(self) -> int:
        return self.values.size

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def mean(self) -> float:
        return float(self.values @ self.weights / self.weights.sum())

    def canonical(self) -> "EmpiricalSample":
        order = np.lexsort((self.weights, self.values))
        return EmpiricalSample(self.values[order], self.weights[order])

    def split_atom(self, at: float = 0.0) -> tuple["EmpiricalSample | None", float]:
        """Separate observations <= ``at`` and return (rest, fraction of weight at the atom)."""
        mask = self.values > at
        atom = float(self.weights[~mask].sum() / self.weights.sum())
        if not mask.any():
            return None, atom
        return EmpiricalSample(self.values[mask], self.weights[mask]), atom

    def to_csv(self, path, comments=()) -> None:
        csvio.write_rows(path, ["value_watts", "weight"], zip(self.values.tolist(), self.weights.tolist()), comments)

    @classmethod
    def from_csv(cls, path) -> "EmpiricalSample":
        header, rows = csvio.read_rows(path)
        if header != ["value_watts", "weight"]:
            raise ValueError(f"{path}: unexpected header {header}")
        if not rows:
            raise EmptySampleError(f"{path}: no observations")
        arr = np.array(rows, dtype=float)
        return cls(arr[:, 0], arr[:, 1])


def merge(*samples: EmpiricalSample) -> EmpiricalSample:
    """Pool samples; the result does not depend on argument order."""
    if not samples:
        raise EmptySampleError("nothing to merge")
    return EmpiricalSample(np.concatenate([s.values for s in samples]),
                           np.concatenate([s.weights for s in samples])).canonical()


@dataclass(frozen=True)
class EmpiricalCdf:
    x: np.ndarray    # sorted unique breakpoints
    cum: np.ndarray  # F(x_k), right-continuous

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.x, t, side="right")
        out = np.where(idx > 0, self.cum[np.maximum(idx - 1, 0)], 0.0)
        return float(out) if out.ndim == 0 else out

    def left_limits(self) -> np.ndarray:
        return np.concatenate([[0.0], self.cum[:-1]])

    def to_csv(self, path, comments=()) -> None:
        csvio.write_rows(path, ["value_watts", "cum_prob"], zip(self.x.tolist(), self.cum.tolist()), comments)


def empirical_cdf(sample: EmpiricalSample) -> EmpiricalCdf:
    if sample is None or len(sample) == 0:
        raise EmptySampleError("empty sample")
    order = np.argsort(sample.values, kind="stable")
    v = sample.values[order]
    w = sample.weights[order]
    x, start = np.unique(v, return_index=True)
    sums = np.add.reduceat(w, start)
    cum = np.cumsum(sums) / w.sum()
    cum[-1] = 1.0
    return EmpiricalCdf(x, cum)


def _law_cdf(law, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x, dtype=float)
    pos = x > 0
    if pos.any():
        out[pos] = law.cdf(x[pos])
    return out


def ks_distance(a, b) -> float:
    """Sup-norm distance between two CDFs.

    Each argument is an :class:`EmpiricalCdf`, an :class:`EmpiricalSample`, or
    an analytic law exposing ``cdf`` (assumed continuous and supported on t > 0).
    """
    if isinstance(a, EmpiricalSample):
        a = empirical_cdf(a)
    if isinstance(b, EmpiricalSample):
        b = empirical_cdf(b)
    a_emp, b_emp = isinstance(a, EmpiricalCdf), isinstance(b, EmpiricalCdf)
    if a_emp and b_emp:
        grid = np.union1d(a.x, b.x)
        return float(np.max(np.abs(a(grid) - b(grid))))
    if not (a_emp or b_emp):
        raise TypeError("at least one argument must be empirical")
    emp, law = (a, b) if a_emp else (b, a)
    f = _law_cdf(law, emp.x)
    return float(max(np.max(np.abs(emp.cum - f)), np.max(np.abs(emp.left_limits() - f))))


def ks_to_law(sample: EmpiricalSample, law, atom_at: float = 0.0) -> tuple[float, float]:
    """KS distance of the continuous part of ``sample`` to ``law`` and the atom mass excluded."""
    rest, atom = sample.split_atom(atom_at)
    if rest is None:
        return 1.0, atom
    return ks_distance(empirical_cdf(rest), law), atom


@dataclass(frozen=True)
class LogHistogram:
    edges: np.ndarray
    density: np.ndarray  # weight fraction per watt
    mass: np.ndarray     # weight fraction per bin
    atom_mass: float
    outside_mass: float

    def to_csv(self, path, comments=()) -> None:
        rows = zip(self.edges[:-1].tolist(), self.edges[1:].tolist(), self.density.tolist())
        csvio.write_rows(path, ["bin_left", "bin_right", "density"], rows, comments)


def log_histogram_pdf(sample: EmpiricalSample, bins_per_decade: int = 10,
                      value_range: tuple[float, float] | None = None) -> LogHistogram:
    """Density over log-spaced bins; nonpositive values form a separate atom."""
    if bins_per_decade < 1:
        raise ValueError("bins_per_decade must be >= 1")
    total = sample.total_weight
    rest, atom = sample.split_atom(0.0)
    if value_range is None:
        if rest is None:
            raise ValueError("no positive values to bin and no range given")
        lo = 10.0 ** math.floor(math.log10(rest.values.min()))
        hi = 10.0 ** math.ceil(math.log10(rest.values.max()))
        if hi <= lo:
            hi = lo * 10.0
    else:
        lo, hi = value_range
    if not (0 < lo < hi):
        raise ValueError("range must satisfy 0 < low < high")
    nbins = max(1, int(round(bins_per_decade * math.log10(hi / lo))))
    edges = np.logspace(math.log10(lo), math.log10(hi), nbins + 1)
    if rest is None:
        mass = np.zeros(nbins)
    else:
        counts, _ = np.histogram(rest.values, bins=edges, weights=rest.weights)
        mass = counts / total
    outside = max(0.0, 1.0 - atom - float(mass.sum()))
    return LogHistogram(edges, mass / np.diff(edges), mass, atom, outside)


def moment_matched_lognormal(values) -> "sps.rv_continuous":
    """Log-normal whose log-mean and log-std match those of ``values``."""
    logs = np.log(np.asarray(values, dtype=float))
    return sps.lognorm(s=float(logs.std()), scale=float(np.exp(logs.mean())))


def lognormal_ks(law, n: int = 100_000) -> float:
    """KS distance between ``law`` and the log-normal fitted to ``n`` of its quantiles."""
    q = (np.arange(n) + 0.5) / n
    x = law.quantile(q)
    fit = moment_matched_lognormal(x)
    return float(np.max(np.abs(q - fit.cdf(x))))
