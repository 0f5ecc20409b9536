"""Closed-form and fixed-point pieces of the effective-density analysis."""

from .dcf import (DcfConvergenceError, DcfFixedPoint, SlotDurations, concurrent_tx_pmf,
                  mean_virtual_slot, power_distribution, ppdu_duration, slot_durations,
                  solve_dcf, tau_closed_form, tau_from_collision)
from .geometry import (cs_busy_probability, effective_cs_range, mean_sensing_area,
                       poisson_truncation, sharing_area, sharing_count_mean, sharing_count_pmf)
from .law import InterferenceLaw, interference_cdf, interference_pdf
from .sharing import (PonBracketWarning, SectorModel, SectorModelError, SharingAreaAnalysis,
                      SharingAreaModel, active_node_pmf, analyze_sharing_area, effective_density,
                      mhc_density_baseline, solve_p_on, tx_count_distribution)

__all__ = [
    "DcfConvergenceError", "DcfFixedPoint", "SlotDurations", "concurrent_tx_pmf",
    "mean_virtual_slot", "power_distribution", "ppdu_duration", "slot_durations", "solve_dcf",
    "tau_closed_form", "tau_from_collision", "cs_busy_probability", "effective_cs_range",
    "mean_sensing_area", "poisson_truncation", "sharing_area", "sharing_count_mean",
    "sharing_count_pmf", "InterferenceLaw", "interference_cdf", "interference_pdf",
    "PonBracketWarning", "SectorModel", "SectorModelError", "SharingAreaAnalysis",
    "SharingAreaModel", "active_node_pmf", "analyze_sharing_area", "effective_density",
    "mhc_density_baseline", "solve_p_on", "tx_count_distribution",
]
