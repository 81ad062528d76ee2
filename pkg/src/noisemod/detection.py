"""Energy detector: ML threshold and exact AWGN error probabilities."""

from __future__ import annotations

import math

from noisemod.model import (
    BracketError,
    DegenerateHypothesesError,
    DetectionStats,
    DomainError,
    NoiseModScenario,
    SnrConvention,
    snr_convert,
)
from noisemod.specfun import chi2_cdf_even, chi2_sf_even

BISECTION_MAX_ITER = 200
BISECTION_RESOLUTION_DB = 1e-6
SNR_BRACKET_DB = (-30.0, 60.0)


def optimal_threshold(n_samples: int, sigma0_sq: float, sigma1_sq: float) -> float:
    """ML threshold on T = sum |y_n|^2 for equiprobable variance hypotheses.

    ``N * s0 * s1 / (s1 - s0) * ln(s1 / s0)``, written with log1p so the
    limit ``s1 -> s0`` tends to ``N * s0`` instead of 0/0.
    """
    if not sigma0_sq > 0:
        raise DomainError("sigma0_sq must be positive")
    if not sigma1_sq > sigma0_sq:
        raise DegenerateHypothesesError(
            f"need sigma1_sq > sigma0_sq, got {sigma1_sq!r} <= {sigma0_sq!r}"
        )
    rho = (sigma1_sq - sigma0_sq) / sigma0_sq
    return n_samples * sigma1_sq * math.log1p(rho) / rho


def scenario_threshold(scenario: NoiseModScenario) -> float:
    return optimal_threshold(scenario.n_samples, scenario.noise_var, scenario.sigma1_sq)


def error_probabilities(scenario: NoiseModScenario) -> DetectionStats:
    n = scenario.n_samples
    s0, s1 = scenario.noise_var, scenario.sigma1_sq
    th = optimal_threshold(n, s0, s1)
    pfa = chi2_sf_even(2.0 * th / s0, n)
    pmd = chi2_cdf_even(2.0 * th / s1, n)
    return DetectionStats(threshold=th, pfa=pfa, pmd=pmd, pe=0.5 * (pfa + pmd))


def ber_awgn(n_samples: int, snr: float) -> float:
    """BER at linear per-sample SNR with unit noise power."""
    return error_probabilities(NoiseModScenario(n_samples, snr, 1.0)).pe


def required_snr_db(
    n_samples: int,
    target_pe: float,
    convention: SnrConvention = SnrConvention.PER_SAMPLE,
) -> float:
    """SNR (dB, in ``convention``) at which the AWGN BER equals ``target_pe``.

    Bisection in per-sample dB; BER is strictly decreasing in SNR so the root
    is unique.
    """
    if not 0.0 < target_pe < 0.5:
        raise DomainError("target_pe must lie in (0, 0.5)")
    lo, hi = SNR_BRACKET_DB

    def excess(db: float) -> float:
        return ber_awgn(n_samples, 10.0 ** (db / 10.0)) - target_pe

    if excess(lo) < 0 or excess(hi) > 0:
        raise BracketError(f"target {target_pe} not reachable in [{lo}, {hi}] dB per-sample")
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < BISECTION_RESOLUTION_DB:
            break
    per_sample = 0.5 * (lo + hi)
    return snr_convert(per_sample, SnrConvention.PER_SAMPLE, convention, n_samples)
