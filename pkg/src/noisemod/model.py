"""Domain types shared across the package: scenarios, channels, sweep grids."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class ConfigurationError(ValueError):
    """Invalid configuration value (quadrature order, grid, CLI config)."""


class DegenerateHypothesesError(ValueError):
    """The two hypotheses have equal variance, so no threshold separates them."""


class BracketError(RuntimeError):
    """A root-finding bracket does not contain a sign change."""


class NumericWarning(UserWarning):
    """A numerical routine did not reach its accuracy target."""


class SnrConvention(enum.Enum):
    PER_SAMPLE = "per-sample"
    PER_BIT = "per-bit"


class SelectionRule(enum.Enum):
    IDEAL_CSI = "ideal-csi"
    MAX_STATISTIC = "max-statistic"
    ENERGY_COMBINE = "energy-combine"


@dataclass(frozen=True)
class Awgn:
    n_branches = 1


@dataclass(frozen=True)
class Rayleigh:
    n_branches = 1


@dataclass(frozen=True)
class RayleighSelDiv2:
    rule: SelectionRule = SelectionRule.IDEAL_CSI
    n_branches = 2


ChannelModel = Awgn | Rayleigh | RayleighSelDiv2


def db_to_lin(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0) if np.ndim(db) else 10.0 ** (db / 10.0)


def lin_to_db(lin):
    return 10.0 * np.log10(lin) if np.ndim(lin) else 10.0 * math.log10(lin)


def snr_convert(value_db: float, from_: SnrConvention, to: SnrConvention, n_samples: int) -> float:
    """Map an SNR in dB between per-sample and per-bit conventions.

    One bit integrates ``n_samples`` samples, so per-bit = per-sample + 10 log10 N.
    """
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    if from_ is to:
        return value_db
    shift = 10.0 * math.log10(n_samples)
    return value_db + shift if to is SnrConvention.PER_BIT else value_db - shift


@dataclass(frozen=True)
class NoiseModScenario:
    """One operating point: N samples per bit, burst power P, noise power sigma0^2."""

    n_samples: int
    tx_power: float
    noise_var: float = 1.0
    snr_convention: SnrConvention = SnrConvention.PER_SAMPLE

    @classmethod
    def from_snr_db(
        cls,
        n_samples: int,
        snr_db: float,
        convention: SnrConvention = SnrConvention.PER_SAMPLE,
        noise_var: float = 1.0,
    ) -> NoiseModScenario:
        per_sample = snr_convert(snr_db, convention, SnrConvention.PER_SAMPLE, n_samples)
        return cls(n_samples, 10.0 ** (per_sample / 10.0) * noise_var, noise_var, convention)

    @property
    def sigma1_sq(self) -> float:
        return sigma1_sq(self)

    @property
    def snr(self) -> float:
        """Per-sample SNR P / sigma0^2 (linear)."""
        return self.tx_power / self.noise_var

    @property
    def snr_db(self) -> float:
        """SNR in dB expressed in this scenario's own convention."""
        return snr_convert(
            10.0 * math.log10(self.snr), SnrConvention.PER_SAMPLE, self.snr_convention, self.n_samples
        )


def sigma1_sq(scenario: NoiseModScenario) -> float:
    return scenario.tx_power + scenario.noise_var


@dataclass(frozen=True)
class SweepGrid:
    snr_db_start: float = -5.0
    snr_db_stop: float = 20.0
    snr_db_step: float = 1.0
    n_list: tuple[int, ...] = (10, 50, 100)

    def snr_values(self) -> np.ndarray:
        """Grid points from start to stop inclusive (stop kept if it lands on the step)."""
        count = int(math.floor((self.snr_db_stop - self.snr_db_start) / self.snr_db_step + 1e-9)) + 1
        return np.round(self.snr_db_start + self.snr_db_step * np.arange(count), 12)


def validate(scenario: NoiseModScenario | None = None, grid: SweepGrid | None = None) -> list[str]:
    """Check scenario and grid invariants; an empty list means valid."""
    problems: list[str] = []
    if scenario is not None:
        n = scenario.n_samples
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            problems.append(f"n_samples ≥ 1 (got {n!r})")
        if not (scenario.tx_power > 0):
            problems.append(f"tx_power > 0 (got {scenario.tx_power!r})")
        if not (scenario.noise_var > 0):
            problems.append(f"noise_var > 0 (got {scenario.noise_var!r})")
        if not isinstance(scenario.snr_convention, SnrConvention):
            problems.append(f"snr_convention must be a SnrConvention (got {scenario.snr_convention!r})")
    if grid is not None:
        if not (grid.snr_db_start < grid.snr_db_stop):
            problems.append(
                f"snr_db_start < snr_db_stop (got {grid.snr_db_start!r}, {grid.snr_db_stop!r})"
            )
        if not (grid.snr_db_step > 0):
            problems.append(f"snr_db_step > 0 (got {grid.snr_db_step!r})")
        if not grid.n_list:
            problems.append("n_list must be nonempty")
        for n in grid.n_list:
            if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
                problems.append(f"n_list entries ≥ 1 (got {n!r})")
    return problems


@dataclass(frozen=True)
class DetectionStats:
    threshold: float
    pfa: float
    pmd: float
    pe: float


@dataclass(frozen=True)
class FadingBerResult:
    pfa: float
    avg_pmd: float
    pe: float
    quadrature_order: int
    estimated_quadrature_error: float
    warnings: tuple[str, ...] = field(default=())
