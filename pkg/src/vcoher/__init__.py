"""Optical response and bistability of a V-type atom with decay-channel interference."""

from .model import SystemParams, build_conventional, build_liouvillian_parts
from .response import ResponseScale, Sweep, eq9_coefficients, group_index, normalized_coherence, spectrum
from .solver import harmonic_balance, weak_probe_first_order

__all__ = [
    "SystemParams",
    "build_liouvillian_parts",
    "build_conventional",
    "weak_probe_first_order",
    "harmonic_balance",
    "ResponseScale",
    "Sweep",
    "normalized_coherence",
    "spectrum",
    "group_index",
    "eq9_coefficients",
]
