"""Energy per bit versus distance and the NoiseMod / BPSK crossover range.

Radiated power follows a free-space style law
``P_PA = snr * noise_floor * kappa * (d * f_c)**alpha``; ``kappa`` lumps the
propagation constant, antenna gains and margins and can be calibrated to one
known crossover distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy import constants

from noisemod.model import DomainError

FREE_SPACE_KAPPA = (4.0 * math.pi / constants.c) ** 2
DISTANCE_BRACKET_M = (1e-3, 1e5)


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class EnergyProfile:
    tx_circuit_w: float
    rx_baseband_w: float
    adc_energy_per_sample_j: float = 0.0
    pa_efficiency: float = 0.35
    bit_rate_hz: float = 1e3
    n_samples: int = 1

    def __post_init__(self):
        if self.tx_circuit_w < 0 or self.rx_baseband_w < 0:
            raise DomainError("circuit powers must be nonnegative")
        if self.adc_energy_per_sample_j < 0:
            raise DomainError("ADC energy must be nonnegative")
        if not 0 < self.pa_efficiency <= 1:
            raise DomainError("PA efficiency must lie in (0, 1]")
        if self.bit_rate_hz <= 0 or self.n_samples < 1:
            raise DomainError("bit rate and n_samples must be positive")

    @property
    def sample_rate_hz(self) -> float:
        return self.n_samples * self.bit_rate_hz

    @property
    def rx_circuit_w(self) -> float:
        """Total receiver circuit power, baseband plus ADC activity."""
        return self.rx_baseband_w + self.sample_rate_hz * self.adc_energy_per_sample_j


# RX budget of 0.5 mW split as 0.4 mW baseband + 0.1 mW of ADC activity at N = 20.
NOISEMOD_DEFAULT = EnergyProfile(
    tx_circuit_w=0.1e-3,
    rx_baseband_w=0.4e-3,
    adc_energy_per_sample_j=0.1e-3 / (20 * 1e3),
    n_samples=20,
)
BPSK_DEFAULT = EnergyProfile(tx_circuit_w=1.0e-3, rx_baseband_w=1.5e-3)


@dataclass(frozen=True)
class LinkBudget:
    carrier_hz: float
    required_snr_db: float
    noise_floor_w: float
    path_loss_exponent: float = 2.0
    gain_constant: float = FREE_SPACE_KAPPA

    def __post_init__(self):
        if self.carrier_hz <= 0 or self.noise_floor_w <= 0 or self.gain_constant <= 0:
            raise DomainError("carrier, noise floor and gain constant must be positive")


def thermal_noise_w(bandwidth_hz: float, noise_figure_db: float = 0.0, temperature_k: float = 290.0) -> float:
    return constants.k * temperature_k * bandwidth_hz * 10.0 ** (noise_figure_db / 10.0)


def link_budget_for(
    profile: EnergyProfile,
    carrier_hz: float,
    required_snr_db: float,
    noise_figure_db: float = 0.0,
    **kwargs,
) -> LinkBudget:
    """Budget whose noise floor spans the detector's sample bandwidth ``N * R_b``.

    ``required_snr_db`` is per-sample, so NoiseMod pays for its oversampling
    through the wider noise bandwidth.
    """
    noise = thermal_noise_w(profile.sample_rate_hz, noise_figure_db)
    return LinkBudget(carrier_hz, required_snr_db, noise, **kwargs)


def ebit_simple(profile: EnergyProfile, pa_power_w: float) -> float:
    """Energy per bit with one lumped receiver circuit power."""
    p = profile
    return (p.tx_circuit_w + pa_power_w) / (p.pa_efficiency * p.bit_rate_hz) + p.rx_circuit_w / p.bit_rate_hz


def ebit_adc_aware(profile: EnergyProfile, pa_power_w: float) -> float:
    """Energy per bit with receiver power split into static baseband and
    per-sample ADC energy, ``N * E_ADC`` per bit."""
    p = profile
    return (
        (p.tx_circuit_w + pa_power_w) / (p.pa_efficiency * p.bit_rate_hz)
        + p.rx_baseband_w / p.bit_rate_hz
        + p.n_samples * p.adc_energy_per_sample_j
    )


def required_pa_power(budget: LinkBudget, distance_m: float) -> float:
    if distance_m <= 0:
        raise DomainError("distance must be positive")
    b = budget
    snr = 10.0 ** (b.required_snr_db / 10.0)
    return snr * b.noise_floor_w * b.gain_constant * (distance_m * b.carrier_hz) ** b.path_loss_exponent


def ebit_at_distance(profile: EnergyProfile, budget: LinkBudget, distance_m: float) -> float:
    return ebit_adc_aware(profile, required_pa_power(budget, distance_m))


def crossover_distance(
    profile_a: EnergyProfile,
    profile_b: EnergyProfile,
    budget_a: LinkBudget,
    budget_b: LinkBudget,
) -> float | None:
    """Distance where both schemes spend equal energy per bit.

    Returns ``None`` when the difference does not change sign over
    ``DISTANCE_BRACKET_M``, i.e. one scheme wins (or ties) everywhere.
    """

    def diff(log_d: float) -> float:
        d = math.exp(log_d)
        return ebit_at_distance(profile_a, budget_a, d) - ebit_at_distance(profile_b, budget_b, d)

    lo, hi = (math.log(x) for x in DISTANCE_BRACKET_M)
    f_lo, f_hi = diff(lo), diff(hi)
    if f_lo == 0.0 and f_hi == 0.0:
        return None
    if f_lo * f_hi > 0:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = diff(mid)
        if f_mid == 0.0:
            return math.exp(mid)
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return math.exp(0.5 * (lo + hi))


def calibrate_gain_constant(
    budget_a: LinkBudget,
    budget_b: LinkBudget,
    profile_a: EnergyProfile,
    profile_b: EnergyProfile,
    target_distance_m: float,
) -> tuple[LinkBudget, LinkBudget]:
    """Set the shared ``gain_constant`` so the crossover lands on ``target_distance_m``.

    The energy difference at a fixed distance is affine in ``kappa``; its
    root is solved directly and then checked against the bisection solver.
    """
    if target_distance_m <= 0:
        raise CalibrationError("target distance must be positive")

    circuit_gap = ebit_adc_aware(profile_a, 0.0) - ebit_adc_aware(profile_b, 0.0)
    unit_a = required_pa_power(replace(budget_a, gain_constant=1.0), target_distance_m)
    unit_b = required_pa_power(replace(budget_b, gain_constant=1.0), target_distance_m)
    slope = unit_a / (profile_a.pa_efficiency * profile_a.bit_rate_hz) - unit_b / (
        profile_b.pa_efficiency * profile_b.bit_rate_hz
    )
    if slope == 0.0 or -circuit_gap / slope <= 0:
        raise CalibrationError(
            "no positive gain constant places a crossover at the target; "
            "scheme A needs lower circuit energy and higher radiated power"
        )
    kappa = -circuit_gap / slope
    out_a = replace(budget_a, gain_constant=kappa)
    out_b = replace(budget_b, gain_constant=kappa)
    got = crossover_distance(profile_a, profile_b, out_a, out_b)
    if got is None or abs(got / target_distance_m - 1.0) > 1e-3:
        raise CalibrationError(f"calibration round trip gave {got!r} for target {target_distance_m}")
    return out_a, out_b
