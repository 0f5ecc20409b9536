"""Post-processing of simulator traces: measurement window, samples, concurrency."""

from __future__ import annotations

import numpy as np

from .. import csvio
from ..stats import EmpiricalSample
from .engine import EVENT_NAMES, DesTrace, Ev


class DegenerateWindowError(ValueError):
    pass


def time_window(trace: DesTrace) -> tuple[int, int]:
    """From the latest first transmission start to the earliest last transmission end.

    Only the contending transmitters (one per link) are considered.
    """
    n = trace.n_links
    if n == 0:
        raise DegenerateWindowError("no transmitters")
    kinds, nodes, times = trace.event_kind, trace.event_node, trace.event_time
    tx = nodes < n
    starts = (kinds == Ev.TX_START) & tx
    ends = (kinds == Ev.TX_END) & tx
    first = np.full(n, np.iinfo(np.int64).max)
    last = np.full(n, -1, dtype=np.int64)
    np.minimum.at(first, nodes[starts], times[starts])
    np.maximum.at(last, nodes[ends], times[ends])
    silent = np.flatnonzero((last < 0) | (first == np.iinfo(np.int64).max))
    if silent.size:
        raise DegenerateWindowError(f"{silent.size} transmitter(s) never completed a transmission")
    t0, t1 = int(first.max()), int(last.min())
    if not t0 < t1:
        raise DegenerateWindowError(f"empty window ({t0}, {t1})")
    return t0, t1


def _pieces(times: np.ndarray, end_time: int, window):
    t0, t1 = window
    starts = np.clip(times, t0, t1)
    ends = np.clip(np.append(times[1:], end_time), t0, t1)
    return starts, ends


def trace_to_samples(trace: DesTrace, window) -> EmpiricalSample:
    """(aggregate watts, dwell us) for every constant-power piece inside ``window``."""
    starts, ends = _pieces(trace.interval_time, trace.end_time, window)
    dwell = ends - starts
    keep = dwell > 0
    return EmpiricalSample(trace.interval_power[keep], dwell[keep].astype(float))


def concurrent_tx_histogram(trace: DesTrace, links, window) -> np.ndarray:
    """Fraction of the window during which k = 0..len(links) of ``links`` are on air.

    A link is on air while either its transmitter or its receiver sends.
    """
    links = np.asarray(sorted(set(int(x) for x in links)), dtype=np.int64)
    t0, t1 = window
    in_set = np.isin(trace.frame_src % trace.n_links, links)
    fs = trace.frame_start[in_set]
    fe = trace.frame_end[in_set].copy()
    fe[fe < 0] = trace.end_time
    times = np.concatenate([fs, fe, [t0, t1]])
    delta = np.concatenate([np.ones_like(fs), -np.ones_like(fe), [0, 0]])
    order = np.lexsort((delta, times))  # ends before starts at equal times
    times, delta = times[order], delta[order]
    level = np.cumsum(delta)
    seg_start = np.clip(times[:-1], t0, t1)
    seg_end = np.clip(times[1:], t0, t1)
    dur = seg_end - seg_start
    hist = np.zeros(len(links) + 1)
    np.add.at(hist, level[:-1], dur)
    return hist / (t1 - t0)


def write_trace_csv(trace: DesTrace, path, comments=()) -> None:
    rows = ((t, n, EVENT_NAMES[Ev(k)]) for t, n, k in
            zip(trace.event_time.tolist(), trace.event_node.tolist(), trace.event_kind.tolist()))
    csvio.write_rows(path, ["time_us", "node_id", "event"], rows, comments)


def recompute_power(trace: DesTrace, t: int) -> list[tuple[float, float]]:
    """(mark, gain) terms of every frame on air at ``t`` according to the frame table."""
    fe = np.where(trace.frame_end < 0, trace.end_time + 1, trace.frame_end)
    on = np.flatnonzero((trace.frame_start <= t) & (fe > t))
    return [(float(trace.frame_mark[f]), float(trace.measuring_gain[trace.frame_src[f]])) for f in on]
