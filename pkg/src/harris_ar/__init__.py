"""Simulation and verification of AR(1) schemes with Harris(a, k) random selection."""

from . import ar_sim, catalog, descriptors, dist_core, laws, samplers, series, verify
from .catalog import resolve
from .dist_core import HarrisParams
from .errors import HarrisARError

__all__ = [
    "ar_sim",
    "catalog",
    "descriptors",
    "dist_core",
    "laws",
    "samplers",
    "series",
    "verify",
    "resolve",
    "HarrisParams",
    "HarrisARError",
]
