"""Packet-level CSMA/CA simulator used as ground truth for the analysis."""

from .engine import EVENT_NAMES, DesTrace, Ev, Frame, SimulationError, run_des, shot_noise
from .post import (DegenerateWindowError, concurrent_tx_histogram, recompute_power,
                   time_window, trace_to_samples, write_trace_csv)
from .scenario import (Scenario, build_scenario, lattice_scenario, grid_scenario, links_within,
                       mean_transmitters)

__all__ = [
    "EVENT_NAMES", "DesTrace", "Ev", "Frame", "SimulationError", "run_des", "shot_noise",
    "DegenerateWindowError", "concurrent_tx_histogram", "recompute_power", "time_window",
    "trace_to_samples", "write_trace_csv", "Scenario", "build_scenario", "lattice_scenario",
    "grid_scenario", "links_within", "mean_transmitters",
]
