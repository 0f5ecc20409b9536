"""Aggregate-interference law of a Rayleigh-faded PPP shot noise with path-loss exponent 4.

With c = lambda * pi^2 * sqrt(p) / 4 the aggregate power is Levy distributed:
F(t) = erfc(c / sqrt(t)) and f(t) = c / sqrt(pi) * t^(-3/2) * exp(-c^2 / t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

# erfc(x) = 1/2 at this x
ERFC_HALF = float(special.erfcinv(0.5))


def _positive(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise ValueError("interference level must be positive")
    return t


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class InterferenceLaw:
    lambda_eff: float
    tx_power_w: float

    def __post_init__(self):
        if self.lambda_eff < 0 or self.tx_power_w <= 0:
            raise ValueError("need lambda_eff >= 0 and tx_power_w > 0")

    @property
    def scale(self) -> float:
        return self.lambda_eff * math.pi**2 * math.sqrt(self.tx_power_w) / 4.0

    def cdf(self, t):
        t = _positive(t)
        return _out(special.erfc(self.scale / np.sqrt(t)))

    def sf(self, t):
        t = _positive(t)
        return _out(special.erf(self.scale / np.sqrt(t)))

    def pdf(self, t):
        t = _positive(t)
        c = self.scale
        return _out(c / math.sqrt(math.pi) * t**-1.5 * np.exp(-(c * c) / t))

    def logpdf(self, t):
        t = _positive(t)
        c = self.scale
        with np.errstate(divide="ignore"):
            return _out(np.log(c / math.sqrt(math.pi)) - 1.5 * np.log(t) - c * c / t)

    def quantile(self, q):
        q = np.asarray(q, dtype=float)
        if np.any((q <= 0) | (q >= 1)):
            raise ValueError("quantile level must lie in (0, 1)")
        return _out((self.scale / special.erfcinv(q)) ** 2)

    def median(self) -> float:
        return (self.scale / ERFC_HALF) ** 2

    def mode(self) -> float:
        return 2.0 * self.scale**2 / 3.0

    def to_dict(self) -> dict[str, object]:
        return {"lambda_eff": self.lambda_eff, "tx_power_w": self.tx_power_w}


def interference_cdf(t, law: InterferenceLaw):
    return law.cdf(t)


def interference_pdf(t, law: InterferenceLaw):
    return law.pdf(t)
