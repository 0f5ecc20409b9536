"""Topologies for the packet-level simulator."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import kvtext
from ..config import PhyMacConfig


@dataclass
class Scenario:
    """Transmitters, their receivers and the measuring point on a square grid.

    Every transmitter is saturated and talks to one dedicated receiver at
    ``rx_offset`` from it.  Link ``i`` owns radio ``i`` (transmitter) and
    radio ``n_links + i`` (receiver).
    """

    tx_positions: np.ndarray
    cfg: PhyMacConfig
    grid_m: float = 500.0
    duration_us: int = 3_000_000
    seed: int = 0
    rx_offset: tuple[float, float] = (5.0, 5.0)
    measuring_point: tuple[float, float] | None = None
    carrier_sense: bool = True
    ignore_collisions: bool = False
    label: str = field(default="", compare=False)

    def __post_init__(self):
        self.tx_positions = np.asarray(self.tx_positions, dtype=float).reshape(-1, 2)
        if self.grid_m <= 0:
            raise ValueError("grid must have positive area")
        if self.duration_us <= 0:
            raise ValueError("duration must be positive")
        self.duration_us = int(self.duration_us)
        if self.measuring_point is None:
            self.measuring_point = (self.grid_m / 2.0, self.grid_m / 2.0)
        rx = self.rx_positions
        if len(rx) and (rx.min() < 0 or rx.max() > self.grid_m):
            raise ValueError("receivers must lie inside the grid")

    @property
    def n_links(self) -> int:
        return len(self.tx_positions)

    @property
    def rx_positions(self) -> np.ndarray:
        return self.tx_positions + np.asarray(self.rx_offset, dtype=float)

    @property
    def radio_positions(self) -> np.ndarray:
        return np.vstack([self.tx_positions, self.rx_positions])

    def to_kv(self) -> str:
        entries = {
            "grid_m": self.grid_m,
            "duration_us": self.duration_us,
            "seed": self.seed,
            "rx_offset": list(self.rx_offset),
            "measuring_point": list(self.measuring_point),
            "carrier_sense": self.carrier_sense,
            "ignore_collisions": self.ignore_collisions,
            "tx_x": self.tx_positions[:, 0].tolist(),
            "tx_y": self.tx_positions[:, 1].tolist(),
        }
        entries.update(self.cfg.to_dict())
        return kvtext.dumps(entries, header=[f"scenario {self.label}".rstrip()])

    @classmethod
    def from_kv(cls, text: str) -> "Scenario":
        kv = kvtext.loads(text)
        own = {"grid_m", "duration_us", "seed", "rx_offset", "measuring_point", "carrier_sense",
               "ignore_collisions", "tx_x", "tx_y"}
        cfg = PhyMacConfig.from_dict({k: v for k, v in kv.items() if k not in own})
        xs = kvtext.parse_list(kv.get("tx_x", ""), float)
        ys = kvtext.parse_list(kv.get("tx_y", ""), float)
        if len(xs) != len(ys):
            raise kvtext.KVFormatError("tx_x and tx_y differ in length")
        return cls(
            np.column_stack([xs, ys]) if xs else np.zeros((0, 2)), cfg,
            grid_m=float(kv.get("grid_m", 500.0)),
            duration_us=int(kv.get("duration_us", 3_000_000)),
            seed=int(kv.get("seed", 0)),
            rx_offset=tuple(kvtext.parse_list(kv.get("rx_offset", "5, 5"), float)),
            measuring_point=tuple(kvtext.parse_list(kv["measuring_point"], float)) if "measuring_point" in kv else None,
            carrier_sense=kvtext.parse_bool(kv.get("carrier_sense", "true")),
            ignore_collisions=kvtext.parse_bool(kv.get("ignore_collisions", "false")),
        )


def build_scenario(lam: float, cfg: PhyMacConfig, duration_us: int, seed: int,
                   grid_m: float = 500.0, rx_offset=(5.0, 5.0), **kwargs) -> Scenario:
    """Poisson(lam * grid^2) transmitters placed uniformly so that receivers stay on the grid."""
    if grid_m <= 0:
        raise ValueError("grid must have positive area")
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0xC0FFEE,)))
    n = rng.poisson(lam * grid_m**2)
    dx, dy = rx_offset
    lo = np.array([max(0.0, -dx), max(0.0, -dy)])
    hi = np.array([grid_m - max(0.0, dx), grid_m - max(0.0, dy)])
    pos = lo + (hi - lo) * rng.random((n, 2))
    mp = np.array([grid_m / 2.0, grid_m / 2.0])
    while n and (bad := np.hypot(*(pos - mp).T) < 1e-6).any():
        pos[bad] = lo + (hi - lo) * rng.random((int(bad.sum()), 2))
    return Scenario(pos, cfg, grid_m, duration_us, seed, tuple(rx_offset), **kwargs)


def grid_scenario(rows: int, cols: int, spacing_m: float, cfg: PhyMacConfig, duration_us: int,
                  seed: int, grid_m: float = 500.0, **kwargs) -> Scenario:
    """Regular lattice centred on the grid."""
    xs = (np.arange(cols) - (cols - 1) / 2.0) * spacing_m + grid_m / 2.0
    ys = (np.arange(rows) - (rows - 1) / 2.0) * spacing_m + grid_m / 2.0
    pos = np.array([(x, y) for y in ys for x in xs])
    return Scenario(pos, cfg, grid_m, duration_us, seed, **kwargs)


def links_within(scenario: Scenario, center, radius_m: float) -> list[int]:
    d = np.hypot(*(scenario.tx_positions - np.asarray(center, dtype=float)).T)
    return [int(i) for i in np.flatnonzero(d <= radius_m + 1e-9)]


def lattice_scenario(cfg: PhyMacConfig, duration_us: int = 3_000_000, seed: int = 0,
                  cs_range_m: float = 70.0) -> tuple[Scenario, dict[str, list[int]]]:
    """9x9 lattice at 50 m with the CS range tuned to ``cs_range_m``.

    Set C is every link whose transmitter lies within the CS range of the
    centre transmitter.  Set B is every link within R/2 of the midpoint
    between the centre transmitter and its east neighbour (on a 50 m lattice a
    disk of radius 35 m around a lattice node holds only that node).
    """
    cfg = cfg.with_cs_range(cs_range_m)
    mid = 250.0
    # the lattice centre is a transmitter, so measure at the centre of a lattice cell
    sc = grid_scenario(9, 9, 50.0, cfg, duration_us, seed, grid_m=2 * mid,
                       measuring_point=(mid + 25.0, mid + 25.0), label="lattice-concurrency")
    center = sc.tx_positions[40]
    set_b = links_within(sc, center + np.array([25.0, 0.0]), cs_range_m / 2.0)
    set_c = links_within(sc, center, cs_range_m)
    return sc, {"B": set_b, "C": set_c}


def mean_transmitters(lam: float, grid_m: float = 500.0) -> float:
    return lam * grid_m**2


def distance_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


__all__ = ["Scenario", "build_scenario", "grid_scenario", "lattice_scenario", "links_within",
           "mean_transmitters", "distance_matrix"]
