"""Row builders for the figure sweeps; each returns a list of dicts ready for CSV."""

from __future__ import annotations

import math

import numpy as np

from noisemod import baselines, detection, energy, fading
from noisemod.model import (
    Awgn,
    NoiseModScenario,
    Rayleigh,
    RayleighSelDiv2,
    SelectionRule,
    SnrConvention,
)
from noisemod.montecarlo import McConfig, simulate_ber

BER_COLUMNS = ("snr_db", "pfa", "pmd", "ber_analytic", "ber_mc", "ci_low", "ci_high", "trials")
BASELINE_COLUMNS = ("snr_db", "ber_bpsk", "ber_ncfsk")
CAPACITY_COLUMNS = ("snr_db", "shannon", "se_noisemod", "mutual_info")
ENERGY_COLUMNS = ("distance_m", "ebit_noisemod_j", "ebit_bpsk_j")
CROSSOVER_COLUMNS = ("freq_hz", "crossover_m")

CHANNELS = {
    "awgn": Awgn(),
    "rayleigh": Rayleigh(),
    "div2-ideal": RayleighSelDiv2(SelectionRule.IDEAL_CSI),
    "div2-maxstat": RayleighSelDiv2(SelectionRule.MAX_STATISTIC),
    "div2-energy": RayleighSelDiv2(SelectionRule.ENERGY_COMBINE),
}
_CHANNEL_IDS = {name: i for i, name in enumerate(CHANNELS)}


def analytic_ber(scenario: NoiseModScenario, channel_name: str, quadrature_order: int = fading.DEFAULT_ORDER):
    """(pfa, pmd, pe) for a channel, or None where no closed form exists."""
    if channel_name == "awgn":
        st = detection.error_probabilities(scenario)
        return st.pfa, st.pmd, st.pe
    compute = {
        "rayleigh": fading.ber_rayleigh,
        "div2-ideal": fading.ber_diversity2_ideal,
    }.get(channel_name)
    if compute is None:
        return None
    r = compute(scenario, quadrature_order)
    return r.pfa, r.avg_pmd, r.pe


def ber_rows(
    n_samples: int,
    snr_db: np.ndarray,
    channel_name: str = "awgn",
    convention: SnrConvention = SnrConvention.PER_SAMPLE,
    mc: McConfig | None = None,
    mc_min_ber: float = 1e-5,
    quadrature_order: int = fading.DEFAULT_ORDER,
) -> list[dict]:
    """One row per SNR point; Monte Carlo columns are NaN where skipped.

    MC runs only where the analytic BER is at least ``mc_min_ber`` (always,
    for channels without an analytic value). Cell ``i`` uses stream
    ``(channel, n_samples, i)`` so rows do not depend on which others ran.
    """
    rows = []
    channel = CHANNELS[channel_name]
    for i, db in enumerate(snr_db):
        scen = NoiseModScenario.from_snr_db(n_samples, float(db), convention)
        ana = analytic_ber(scen, channel_name, quadrature_order)
        pfa, pmd, pe = ana if ana is not None else (math.nan, math.nan, math.nan)
        row = dict(snr_db=float(db), pfa=pfa, pmd=pmd, ber_analytic=pe,
                   ber_mc=math.nan, ci_low=math.nan, ci_high=math.nan, trials=0)
        if mc is not None and (ana is None or pe >= mc_min_ber):
            est = simulate_ber(scen, channel, mc, stream=(_CHANNEL_IDS[channel_name], n_samples, i))
            row.update(ber_mc=est.ber_hat, ci_low=est.ci_low, ci_high=est.ci_high, trials=est.trials_used)
        rows.append(row)
    return rows


def baseline_rows(snr_db: np.ndarray) -> list[dict]:
    """BPSK and NC-FSK against their own SNR (one sample per bit, so per-bit)."""
    gamma = 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)
    return [
        dict(snr_db=float(db), ber_bpsk=float(baselines.ber_bpsk(g)), ber_ncfsk=float(baselines.ber_ncfsk(g)))
        for db, g in zip(snr_db, gamma)
    ]


def capacity_rows(n_samples: int, snr_db: np.ndarray) -> list[dict]:
    rows = []
    for db in snr_db:
        pt = baselines.capacity_point(float(db), n_samples)
        rows.append(dict(snr_db=pt.snr_db, shannon=pt.shannon_bits_per_sec_per_hz,
                         se_noisemod=pt.noisemod_bits_per_symbol, mutual_info=pt.mutual_info_bits))
    return rows


def energy_budgets(
    carrier_hz: float,
    target_ber: float = 1e-3,
    noisemod: energy.EnergyProfile = energy.NOISEMOD_DEFAULT,
    bpsk: energy.EnergyProfile = energy.BPSK_DEFAULT,
    gain_constant: float = energy.FREE_SPACE_KAPPA,
) -> tuple[energy.LinkBudget, energy.LinkBudget]:
    """Budgets whose required SNRs come from the detector and BPSK formulas."""
    snr_nm = detection.required_snr_db(noisemod.n_samples, target_ber)
    snr_bpsk = baselines.required_snr_db_bpsk(target_ber)
    return (
        energy.link_budget_for(noisemod, carrier_hz, snr_nm, gain_constant=gain_constant),
        energy.link_budget_for(bpsk, carrier_hz, snr_bpsk, gain_constant=gain_constant),
    )


def calibrated_gain(
    calibrate_hz: float,
    calibrate_m: float,
    target_ber: float = 1e-3,
    noisemod: energy.EnergyProfile = energy.NOISEMOD_DEFAULT,
    bpsk: energy.EnergyProfile = energy.BPSK_DEFAULT,
) -> float:
    a, b = energy_budgets(calibrate_hz, target_ber, noisemod, bpsk)
    a, _ = energy.calibrate_gain_constant(a, b, noisemod, bpsk, calibrate_m)
    return a.gain_constant


def crossover_rows(
    freqs_hz,
    gain_constant: float = energy.FREE_SPACE_KAPPA,
    target_ber: float = 1e-3,
    noisemod: energy.EnergyProfile = energy.NOISEMOD_DEFAULT,
    bpsk: energy.EnergyProfile = energy.BPSK_DEFAULT,
) -> list[dict]:
    rows = []
    for f in freqs_hz:
        a, b = energy_budgets(f, target_ber, noisemod, bpsk, gain_constant)
        d = energy.crossover_distance(noisemod, bpsk, a, b)
        rows.append(dict(freq_hz=float(f), crossover_m=math.nan if d is None else d))
    return rows


def energy_rows(
    carrier_hz: float,
    distances_m,
    gain_constant: float = energy.FREE_SPACE_KAPPA,
    target_ber: float = 1e-3,
    noisemod: energy.EnergyProfile = energy.NOISEMOD_DEFAULT,
    bpsk: energy.EnergyProfile = energy.BPSK_DEFAULT,
) -> list[dict]:
    a, b = energy_budgets(carrier_hz, target_ber, noisemod, bpsk, gain_constant)
    return [
        dict(distance_m=float(d),
             ebit_noisemod_j=energy.ebit_at_distance(noisemod, a, d),
             ebit_bpsk_j=energy.ebit_at_distance(bpsk, b, d))
        for d in distances_m
    ]

