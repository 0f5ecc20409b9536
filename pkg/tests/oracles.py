"""Reference computations written without the package, used to freeze test values.

Everything here is deliberately slow and literal: mpmath for special
functions, brute-force enumeration for combinatorics, plain bisection for
roots.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath

mpmath.mp.dps = 40

# reference 802.11a constants, typed in again rather than imported
SLOT, SIFS, DIFS = 9, 16, 34
RTS, CTS, ACK = 52, 44, 44
PHY_US, MAC_BITS, BITS_PER_SYMBOL, SYMBOL_US = 20, 246, 24, 4
W0, M_STAGE, K_RETRY = 16, 6, 7


def ppdu_us(payload_bytes: int) -> int:
    symbols = -(-(MAC_BITS + 8 * payload_bytes) // BITS_PER_SYMBOL)
    return PHY_US + symbols * SYMBOL_US


def slot_parts(mode: str, payload_bytes: int):
    """(success busy, success quiet, collision busy, collision quiet) in us."""
    ppdu = ppdu_us(payload_bytes)
    if mode == "basic":
        return ppdu + ACK, SIFS + DIFS, ppdu, DIFS
    return RTS + CTS + ppdu + ACK, 3 * SIFS + DIFS, RTS, DIFS


# -- shot-noise law ------------------------------------------------------------

def law_scale(lam_eff, p):
    return mpmath.mpf(lam_eff) * mpmath.pi**2 * mpmath.sqrt(p) / 4


def law_cdf(t, lam_eff, p=1e-3):
    return mpmath.erfc(law_scale(lam_eff, p) / mpmath.sqrt(t))


def law_pdf_numeric(t, lam_eff, p=1e-3):
    """dF/dt by high-precision numerical differentiation of the CDF."""
    return mpmath.diff(lambda x: law_cdf(x, lam_eff, p), mpmath.mpf(t))


def law_median(lam_eff, p=1e-3):
    """Bisection on the CDF in log-space."""
    lo, hi = mpmath.mpf(-40), mpmath.mpf(0)
    for _ in range(200):
        mid = (lo + hi) / 2
        if law_cdf(mpmath.e**mid, lam_eff, p) < 0.5:
            lo = mid
        else:
            hi = mid
    return float(mpmath.e**((lo + hi) / 2))


# -- DCF -----------------------------------------------------------------------

def tau_eq(p_c, w0=W0, m=M_STAGE, k=K_RETRY):
    p = mpmath.mpf(p_c)
    first = (1 - p) * w0 * (1 - (2 * p) ** m) / (2 * (1 - p**k) * (1 - 2 * p))
    second = 2**m * w0 * (p**m - p**k) / (2 * (1 - p**k))
    return 1 / (first + second - mpmath.mpf(1) / 2)


def dcf_root(a: int):
    """(tau, p_c) from bisection on h(p) = 1 - (1 - tau(p))^(a-1) - p."""
    if a == 1:
        return float(tau_eq(0)), 0.0
    lo, hi = mpmath.mpf("1e-30"), mpmath.mpf(1) - mpmath.mpf("1e-30")
    h = lambda p: 1 - (1 - tau_eq(p)) ** (a - 1) - p
    for _ in range(200):
        mid = (lo + hi) / 2
        if mid == mpmath.mpf(1) / 2:
            mid += mpmath.mpf("1e-35")
        if h(mid) > 0:
            lo = mid
        else:
            hi = mid
    p = (lo + hi) / 2
    return float(tau_eq(p)), float(p)


def power_by_enumeration(a: int, tau: float, mode: str, payload_bytes: int = 500):
    """Time share of j on-air nodes by walking all 2^a transmit patterns of one slot."""
    s_busy, s_quiet, c_busy, c_quiet = slot_parts(mode, payload_bytes)
    time_at = [0.0] * (a + 1)
    for pattern in itertools.product((0, 1), repeat=a):
        k = sum(pattern)
        prob = tau**k * (1 - tau) ** (a - k)
        if k == 0:
            time_at[0] += prob * SLOT
        elif k == 1:
            time_at[1] += prob * s_busy
            time_at[0] += prob * s_quiet
        else:
            time_at[k] += prob * c_busy
            time_at[0] += prob * c_quiet
    total = sum(time_at)
    return [x / total for x in time_at]


# -- sectors -------------------------------------------------------------------

def active_pmf_bruteforce(n: int, p_on: Fraction, sectors: int = 8):
    """Each sector busy w.p. p_on independently; a node lands in a uniform sector
    and is active iff that sector is idle."""
    out = [Fraction(0)] * (n + 1)
    assignments = list(itertools.product(range(sectors), repeat=n))
    for state in itertools.product((0, 1), repeat=sectors):
        busy = sum(state)
        prob = p_on**busy * (1 - p_on) ** (sectors - busy)
        counts = [0] * (n + 1)
        for assign in assignments:
            counts[sum(1 for s in assign if not state[s])] += 1
        for k, c in enumerate(counts):
            out[k] += prob * Fraction(c, sectors**n)
    return out


# -- sharing area ----------------------------------------------------------------

def sharing_terms(lam: float, cs_range: float, mode: str, payload_bytes: int, tail: float = 1e-15):
    """Poisson weights and B_a rows for the triple sum, fully from the oracles above."""
    mu = lam * math.pi * (cs_range / 2) ** 2
    pois, n = [], 0
    cum = 0.0
    while True:
        w = math.exp(-mu) * mu**n / math.factorial(n)
        pois.append(w)
        cum += w
        if 1 - cum < tail and n >= 1:
            break
        n += 1
    power = [[1.0]]
    for a in range(1, len(pois)):
        tau, _ = dcf_root(a)
        power.append(power_by_enumeration(a, tau, mode, payload_bytes))
    return pois, power


def _p_eta(p_on):
    return [math.comb(8, eta) * (1 - p_on) ** eta * p_on ** (8 - eta) for eta in range(9)]


def z_pmf_triple_sum(p_on, pois, power):
    nmax = len(pois) - 1
    out = [0.0] * (nmax + 1)
    p_eta = _p_eta(p_on)
    for n, wn in enumerate(pois):
        for a in range(n + 1):
            pa = sum(p_eta[e] * math.comb(n, a) * (e / 8) ** a * (1 - e / 8) ** (n - a) for e in range(9))
            for z, bz in enumerate(power[a]):
                out[z] += wn * pa * bz
    return out


def rhs_triple_sum(p_on, pois, power):
    return 1.0 - z_pmf_triple_sum(p_on, pois, power)[0]


def damped_p_on(pois, power, beta=0.5, p0=0.5, tol=1e-13, max_iter=10_000):
    p = p0
    for _ in range(max_iter):
        new = (1 - beta) * p + beta * rhs_triple_sum(p, pois, power)
        if abs(new - p) < tol:
            return new
        p = new
    raise RuntimeError("damped iteration did not settle")
