"""Event-driven IEEE 802.11 DCF simulator (basic access and RTS/CTS).

Time is kept in integer microseconds.  Carrier sensing compares the summed
received power of every frame on air (Rayleigh mark / d^4, plus noise)
with the threshold.  A frame is lost when any overlapping frame is itself
detectable at its destination (no capture).  Frames that start at the same
instant never sense each other, which is what lets two countdowns that
expire in the same slot collide.
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from ..analytic.dcf import ppdu_duration
from ..config import Mode
from .scenario import Scenario, distance_matrix


class Ev(enum.IntEnum):
    TX_START = 0
    TX_END = 1
    BACKOFF_FREEZE = 2
    BACKOFF_RESUME = 3
    SUCCESS = 4
    COLLISION = 5
    RETRY_DROP = 6


EVENT_NAMES = {e: e.name.lower() for e in Ev}


class Frame(enum.IntEnum):
    DATA = 0
    RTS = 1
    CTS = 2
    ACK = 3


class SimulationError(RuntimeError):
    pass


# node states
_CONTEND = 0   # waiting for the medium or counting down
_EXCHANGE = 1  # inside its own RTS/CTS/DATA/ACK exchange

# queue entry kinds, in the order they are handled within one instant
_Q_END = 0
_Q_START = 1
_Q_ATTEMPT = 2


@dataclass
class DesTrace:
    """Everything a run produced.

    ``frame_*`` arrays describe every frame that started (``frame_end`` is -1
    when the run stopped while it was on air).  ``interval_time[k]`` starts
    a piece on which the power at the measuring point is
    ``interval_power[k]``; the last piece ends at ``end_time``.
    """

    n_links: int
    end_time: int
    event_time: np.ndarray
    event_node: np.ndarray
    event_kind: np.ndarray
    frame_src: np.ndarray
    frame_dst: np.ndarray
    frame_kind: np.ndarray
    frame_start: np.ndarray
    frame_end: np.ndarray
    frame_mark: np.ndarray
    interval_time: np.ndarray
    interval_power: np.ndarray
    measuring_gain: np.ndarray
    attempts: np.ndarray
    successes: np.ndarray
    collisions: np.ndarray
    drops: np.ndarray
    min_counter: int = 0
    meta: dict = field(default_factory=dict)

    def link_of(self, radio):
        return np.asarray(radio) % self.n_links

    def events(self):
        for t, n, k in zip(self.event_time.tolist(), self.event_node.tolist(), self.event_kind.tolist()):
            yield t, n, EVENT_NAMES[Ev(k)]


def shot_noise(marks, gains) -> float:
    """Exactly rounded sum of mark * gain, independent of term order."""
    return math.fsum(m * g for m, g in zip(marks, gains))


class _Sim:
    def __init__(self, sc: Scenario):
        self.sc = sc
        cfg = sc.cfg
        self.cfg = cfg
        self.n = n = sc.n_links
        self.rng = np.random.default_rng(np.random.SeedSequence(sc.seed, spawn_key=(0xDE5,)))
        pos = sc.radio_positions
        d = distance_matrix(pos, pos)
        with np.errstate(divide="ignore"):
            gain = np.where(d > 0, 1.0 / d**4, 0.0)
        np.fill_diagonal(gain, 0.0)
        self.gain = gain
        self.gain_tx = gain[:n]  # rows: transmitters as sensors
        mp = np.asarray(sc.measuring_point, dtype=float)
        dm = np.hypot(*(pos - mp).T)
        if np.any(dm < 1e-6):
            raise SimulationError("a radio sits on the measuring point")
        self.measuring_gain = 1.0 / dm**4
        self.detect = cfg.cs_threshold_w - cfg.noise_w  # single-frame detectability at a radio

        self.dur = {
            Frame.DATA: ppdu_duration(cfg),
            Frame.RTS: cfg.rts_us,
            Frame.CTS: cfg.cts_us,
            Frame.ACK: cfg.ack_us,
        }
        self.rts = cfg.mode is Mode.RTS_CTS

        self.state = np.full(n, _CONTEND, dtype=np.int8)
        self.stage = np.zeros(n, dtype=np.int64)
        self.short_retry = np.zeros(n, dtype=np.int64)
        self.long_retry = np.zeros(n, dtype=np.int64)
        self.counter = np.array([self._draw(0) for _ in range(n)], dtype=np.int64)
        self.counting = np.zeros(n, dtype=bool)
        self.count_start = np.zeros(n, dtype=np.int64)  # first slot boundary after DIFS
        self.tx_time = np.zeros(n, dtype=np.int64)
        self.version = np.zeros(n, dtype=np.int64)
        self.busy = np.zeros(n, dtype=bool)
        self.idle_since = np.zeros(n, dtype=np.int64)
        self.min_counter = 0

        self.attempts = np.zeros(n, dtype=np.int64)
        self.successes = np.zeros(n, dtype=np.int64)
        self.collisions = np.zeros(n, dtype=np.int64)
        self.drops = np.zeros(n, dtype=np.int64)

        self.queue: list = []
        self.seq = 0
        self.active: dict[int, None] = {}  # frame ids on air, insertion ordered
        self.f_src: list[int] = []
        self.f_dst: list[int] = []
        self.f_kind: list[int] = []
        self.f_start: list[int] = []
        self.f_end: list[int] = []
        self.f_mark: list[float] = []
        self.f_bad: list[bool] = []
        self.ev_t: list[int] = []
        self.ev_n: list[int] = []
        self.ev_k: list[int] = []
        self.iv_t: list[int] = [0]
        self.iv_p: list[float] = [0.0]

    # -- helpers -----------------------------------------------------------
    def _draw(self, stage: int) -> int:
        cfg = self.cfg
        cw = cfg.w0 * 2 ** min(stage, cfg.max_backoff_stage)
        return int(self.rng.integers(0, cw))

    def _log(self, t, node, kind):
        self.ev_t.append(t)
        self.ev_n.append(node)
        self.ev_k.append(int(kind))

    def _push(self, t, kind, payload):
        self.seq += 1
        heapq.heappush(self.queue, (t, kind, self.seq, payload))

    # -- frames ------------------------------------------------------------
    def _start_frame(self, t, src, dst, kind):
        fid = len(self.f_src)
        mark = float(self.rng.exponential(self.cfg.tx_power_w))
        bad = False
        if not self.sc.ignore_collisions:
            g = self.gain
            if mark * g[dst, src] < self.detect:
                bad = True  # faded below detectability at its own receiver
            for other in self.active:
                osrc, odst = self.f_src[other], self.f_dst[other]
                # half duplex: a radio that starts sending loses what it was receiving
                if src == odst or mark * g[odst, src] >= self.detect:
                    self.f_bad[other] = True
                if osrc == dst or self.f_mark[other] * g[dst, osrc] >= self.detect:
                    bad = True
        self.f_src.append(src)
        self.f_dst.append(dst)
        self.f_kind.append(int(kind))
        self.f_start.append(t)
        self.f_end.append(-1)
        self.f_mark.append(mark)
        self.f_bad.append(bad)
        self.active[fid] = None
        self._log(t, src, Ev.TX_START)
        self._push(t + self.dur[kind], _Q_END, fid)

    def _end_frame(self, t, fid, entering):
        del self.active[fid]
        self.f_end[fid] = t
        src, kind, ok = self.f_src[fid], Frame(self.f_kind[fid]), not self.f_bad[fid]
        self._log(t, src, Ev.TX_END)
        n = self.n
        link = src % n
        sifs = self.cfg.sifs_us
        if kind is Frame.RTS:
            if ok:
                self._push(t + sifs, _Q_START, (link + n, link, Frame.CTS))
            else:
                self._fail(t, link, entering, long=False)
        elif kind is Frame.CTS:
            if ok:
                self._push(t + sifs, _Q_START, (link, link + n, Frame.DATA))
            else:
                self._fail(t, link, entering, long=False)
        elif kind is Frame.DATA:
            if ok:
                self._push(t + sifs, _Q_START, (link + n, link, Frame.ACK))
            else:
                self._fail(t, link, entering, long=self.rts)
        else:  # ACK
            if ok:
                self.successes[link] += 1
                self._log(t, link, Ev.SUCCESS)
                self.stage[link] = 0
                self.short_retry[link] = 0
                self.long_retry[link] = 0
                self._new_backoff(t, link, entering)
            else:
                self._fail(t, link, entering, long=self.rts)

    def _fail(self, t, link, entering, long):
        cfg = self.cfg
        if long:
            self.long_retry[link] += 1
            exhausted = self.long_retry[link] >= cfg.long_retry_limit
        else:
            self.short_retry[link] += 1
            exhausted = self.short_retry[link] >= cfg.retry_limit
        if exhausted:
            self.drops[link] += 1
            self._log(t, link, Ev.RETRY_DROP)
            self.stage[link] = 0
            self.short_retry[link] = 0
            self.long_retry[link] = 0
        else:
            self.collisions[link] += 1
            self._log(t, link, Ev.COLLISION)
            self.stage[link] += 1
        self._new_backoff(t, link, entering)

    def _new_backoff(self, t, link, entering):
        self.counter[link] = self._draw(int(self.stage[link]))
        self.state[link] = _CONTEND
        self.counting[link] = False
        entering.append(link)

    # -- contention ---------------------------------------------------------
    def _resume(self, t, i, since):
        """Medium idle for node i since ``since``: schedule its countdown."""
        cfg = self.cfg
        start = since + cfg.difs_us
        self.count_start[i] = start
        self.tx_time[i] = start + int(self.counter[i]) * cfg.slot_us
        self.counting[i] = True
        self.version[i] += 1
        self._log(t, i, Ev.BACKOFF_RESUME)
        self._push(int(self.tx_time[i]), _Q_ATTEMPT, (i, int(self.version[i])))

    def _freeze(self, t, i):
        cfg = self.cfg
        elapsed = t - int(self.count_start[i])
        if elapsed > 0:
            self.counter[i] -= elapsed // cfg.slot_us
        if self.counter[i] < self.min_counter:
            self.min_counter = int(self.counter[i])
        self.counting[i] = False
        self.version[i] += 1
        self._log(t, i, Ev.BACKOFF_FREEZE)

    def _sense(self):
        if not self.active or not self.sc.carrier_sense:
            return np.zeros(self.n, dtype=bool)
        ids = list(self.active)
        srcs = [self.f_src[f] for f in ids]
        marks = np.array([self.f_mark[f] for f in ids])
        power = self.gain_tx[:, srcs] @ marks
        return power >= self.detect

    def run(self) -> DesTrace:
        sc = self.sc
        t_stop = sc.duration_us
        entering = list(range(self.n))
        t = 0
        self._update(t, entering, changed=False)
        q = self.queue
        while q and q[0][0] <= t_stop:
            t = q[0][0]
            entering = []
            changed = False
            while q and q[0][0] == t:
                _, kind, _, payload = heapq.heappop(q)
                if kind == _Q_END:
                    self._end_frame(t, payload, entering)
                    changed = True
                elif kind == _Q_START:
                    src, dst, fk = payload
                    self._start_frame(t, src, dst, fk)
                    changed = True
                else:
                    i, ver = payload
                    if ver != self.version[i] or not self.counting[i]:
                        continue
                    self.counting[i] = False
                    self.counter[i] = 0
                    self.state[i] = _EXCHANGE
                    self.attempts[i] += 1
                    self._start_frame(t, i, i + self.n, Frame.RTS if self.rts else Frame.DATA)
                    changed = True
            self._update(t, entering, changed)
        return self._trace(t_stop)

    def _update(self, t, entering, changed):
        if changed:
            ids = list(self.active)
            power = shot_noise([self.f_mark[f] for f in ids],
                               [self.measuring_gain[self.f_src[f]] for f in ids])
            if self.iv_t[-1] == t:
                self.iv_p[-1] = power
            else:
                self.iv_t.append(t)
                self.iv_p.append(power)
            busy = self._sense()
            flipped = np.flatnonzero(busy != self.busy)
            self.busy = busy
            for i in flipped.tolist():
                if not busy[i]:
                    self.idle_since[i] = t
                if self.state[i] != _CONTEND:
                    continue
                if busy[i]:
                    if self.counting[i] and t < self.tx_time[i]:
                        self._freeze(t, i)
                elif not self.counting[i]:
                    self._resume(t, i, t)
        for i in entering:
            if self.state[i] == _CONTEND and not self.busy[i] and not self.counting[i]:
                self._resume(t, i, max(int(self.idle_since[i]), t))

    def _trace(self, t_stop) -> DesTrace:
        as_i = lambda x: np.asarray(x, dtype=np.int64)  # noqa: E731
        return DesTrace(
            n_links=self.n,
            end_time=t_stop,
            event_time=as_i(self.ev_t),
            event_node=as_i(self.ev_n),
            event_kind=np.asarray(self.ev_k, dtype=np.int8),
            frame_src=as_i(self.f_src),
            frame_dst=as_i(self.f_dst),
            frame_kind=np.asarray(self.f_kind, dtype=np.int8),
            frame_start=as_i(self.f_start),
            frame_end=as_i(self.f_end),
            frame_mark=np.asarray(self.f_mark, dtype=float),
            interval_time=as_i(self.iv_t),
            interval_power=np.asarray(self.iv_p, dtype=float),
            measuring_gain=self.measuring_gain,
            attempts=self.attempts,
            successes=self.successes,
            collisions=self.collisions,
            drops=self.drops,
            min_counter=self.min_counter,
            meta={"seed": self.sc.seed, "mode": self.cfg.mode.value, "links": self.n},
        )


def run_des(scenario: Scenario) -> DesTrace:
    """Simulate ``scenario.duration_us`` of saturated DCF traffic."""
    return _Sim(scenario).run()
