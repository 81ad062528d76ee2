"""Noise modulation (variance shift keying) link-level analysis and simulation."""

from noisemod.model import (
    Awgn,
    NoiseModScenario,
    Rayleigh,
    RayleighSelDiv2,
    SelectionRule,
    SnrConvention,
    SweepGrid,
)

__version__ = "0.1.0"

__all__ = [
    "Awgn",
    "NoiseModScenario",
    "Rayleigh",
    "RayleighSelDiv2",
    "SelectionRule",
    "SnrConvention",
    "SweepGrid",
]
