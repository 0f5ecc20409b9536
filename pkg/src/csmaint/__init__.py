"""Aggregate interference of randomly deployed CSMA/CA (802.11 DCF) networks."""

from .config import Mode, PhyMacConfig, reference_config

__version__ = "0.1.0"
__all__ = ["Mode", "PhyMacConfig", "reference_config", "__version__"]
