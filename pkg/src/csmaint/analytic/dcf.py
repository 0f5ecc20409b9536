"""Saturated DCF dynamics inside one sharing area.

The per-node transmission probability follows the retry-limited binary
exponential backoff chain; the time-weighted number of simultaneous
transmitters is obtained from the three virtual-slot types (idle, success,
collision).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ..config import Mode, PhyMacConfig


class DcfConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class DcfFixedPoint:
    active_count: int
    tau: float
    p_coll: float


def tau_from_collision(p_c: float, w0: int, m: int, k: int) -> float:
    """Transmission probability per slot for a conditional collision probability ``p_c``.

    Written as a stage sum, which equals the closed form for K > m and has
    no singularity at p_c = 1/2.
    """
    if not 0.0 <= p_c <= 1.0:
        raise ValueError("p_c must lie in [0, 1]")
    num = 0.0
    den = 0.0
    pw = 1.0
    for stage in range(k):
        window = w0 * 2 ** min(stage, m)
        num += pw * (window - 1) / 2.0
        den += pw
        pw *= p_c
    return den / num


def tau_closed_form(p_c: float, w0: int, m: int, k: int) -> float:
    """Literal closed form; singular at p_c = 1/2 (kept for cross-checking)."""
    first = (1 - p_c) * w0 * (1 - (2 * p_c) ** m) / (2 * (1 - p_c**k) * (1 - 2 * p_c))
    second = 2**m * w0 * (p_c**m - p_c**k) / (2 * (1 - p_c**k))
    return 1.0 / (first + second - 0.5)


def solve_dcf(active_count: int, cfg: PhyMacConfig, xtol: float = 1e-15) -> DcfFixedPoint:
    a = int(active_count)
    if a < 1:
        raise ValueError("active_count must be >= 1")
    w0, m, k = cfg.w0, cfg.max_backoff_stage, cfg.retry_limit
    if a == 1:
        return DcfFixedPoint(1, tau_from_collision(0.0, w0, m, k), 0.0)

    def g(p):
        return 1.0 - (1.0 - tau_from_collision(p, w0, m, k)) ** (a - 1) - p

    try:
        p_c, info = optimize.brentq(g, 0.0, 1.0, xtol=xtol, rtol=4 * np.finfo(float).eps,
                                    maxiter=500, full_output=True)
    except (ValueError, RuntimeError) as exc:
        raise DcfConvergenceError(f"DCF fixed point failed for a={a}: {exc}") from exc
    if not info.converged:
        raise DcfConvergenceError(f"DCF fixed point did not converge for a={a}")
    return DcfFixedPoint(a, tau_from_collision(p_c, w0, m, k), p_c)


def concurrent_tx_pmf(a: int, tau: float) -> np.ndarray:
    """Binomial(a, tau) law of the number of nodes transmitting in a slot."""
    if a < 0 or not 0.0 <= tau <= 1.0:
        raise ValueError("need a >= 0 and tau in [0, 1]")
    return np.array([math.comb(a, i) * tau**i * (1 - tau) ** (a - i) for i in range(a + 1)])


@dataclass(frozen=True)
class SlotDurations:
    """Virtual-slot durations (us) and their transmitting / silent parts."""

    mode: Mode
    idle_us: float
    success_us: float
    collision_us: float
    ppdu_us: float
    success_busy_us: float    # exactly one radio on air
    success_quiet_us: float   # interframe spaces inside a successful slot
    collision_busy_us: float  # the colliding frames on air
    collision_quiet_us: float

    def to_dict(self) -> dict[str, object]:
        return dict(self.__dict__)


def ppdu_duration(cfg: PhyMacConfig) -> int:
    if cfg.symbol_rate <= 0:
        raise ValueError("symbol rate must be positive")
    return cfg.phy_header_us + math.ceil((cfg.mac_header_bits + cfg.payload_bits) / cfg.symbol_rate) * cfg.symbol_us


def slot_durations(cfg: PhyMacConfig) -> SlotDurations:
    ppdu = ppdu_duration(cfg)
    if cfg.mode is Mode.BASIC:
        s_busy, s_quiet = ppdu + cfg.ack_us, cfg.sifs_us + cfg.difs_us
        c_busy = ppdu
    else:
        s_busy = cfg.rts_us + cfg.cts_us + ppdu + cfg.ack_us
        s_quiet = 3 * cfg.sifs_us + cfg.difs_us
        c_busy = cfg.rts_us
    c_quiet = cfg.difs_us
    return SlotDurations(cfg.mode, cfg.slot_us, s_busy + s_quiet, c_busy + c_quiet, ppdu,
                         s_busy, s_quiet, c_busy, c_quiet)


def mean_virtual_slot(a: int, tau: float, durations: SlotDurations) -> float:
    pa = concurrent_tx_pmf(a, tau)
    p0 = pa[0]
    p1 = pa[1] if a >= 1 else 0.0
    return durations.idle_us * p0 + durations.success_us * p1 + durations.collision_us * (1 - p0 - p1)


def power_distribution(a: int, cfg: PhyMacConfig, tau: float | None = None,
                       durations: SlotDurations | None = None) -> np.ndarray:
    """Fraction of time j = 0..a nodes of an a-node sharing area are on air."""
    if a == 0:
        return np.array([1.0])
    if a < 1:
        raise ValueError("a must be nonnegative")
    if tau is None:
        tau = solve_dcf(a, cfg).tau
    d = durations or slot_durations(cfg)
    pa = concurrent_tx_pmf(a, tau)
    p0, p1 = pa[0], pa[1]
    pc = max(1.0 - p0 - p1, 0.0)
    out = np.empty(a + 1)
    out[0] = d.idle_us * p0 + d.success_quiet_us * p1 + d.collision_quiet_us * pc
    out[1] = d.success_busy_us * p1
    out[2:] = d.collision_busy_us * pa[2:]
    mean_slot = d.idle_us * p0 + d.success_us * p1 + d.collision_us * pc
    return out / mean_slot
