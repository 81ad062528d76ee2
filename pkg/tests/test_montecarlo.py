import math

import numpy as np
import pytest
from scipy import stats

from noisemod.detection import error_probabilities
from noisemod.fading import ber_diversity2_ideal, ber_rayleigh
from noisemod.model import (
    Awgn,
    ConfigurationError,
    NoiseModScenario,
    Rayleigh,
    RayleighSelDiv2,
    SelectionRule,
)
from noisemod.montecarlo import (
    CounterStream,
    McConfig,
    gen_complex_gaussian,
    simulate_ber,
    stream_key,
    wilson_interval,
)
from oracles import binomial_cdf


def covers(est, value):
    return est.ci_low <= value <= est.ci_high


def test_wilson_examples():
    low, high = wilson_interval(0, 100)
    assert low == 0.0 and high > 0.0
    low, high = wilson_interval(50, 100)
    assert 0.5 - low == pytest.approx(high - 0.5, abs=1e-12)
    low, high = wilson_interval(10, 10_000)
    assert low < 1e-3 < high


def test_wilson_against_binomial_tails():
    # the score interval approximates the exact (Clopper-Pearson) one; its
    # endpoints put roughly alpha/2 in each tail
    low, high = wilson_interval(10, 10_000)
    upper_tail = 1.0 - binomial_cdf(9, 10_000, low)
    lower_tail = binomial_cdf(10, 10_000, high)
    assert 0.001 < upper_tail < 0.02
    assert 0.001 < lower_tail < 0.02


def test_wilson_contains_estimate():
    for k, n in [(0, 1), (1, 1), (3, 7), (999, 1000)]:
        low, high = wilson_interval(k, n)
        assert low <= k / n <= high


def test_wilson_rejects_bad_counts():
    with pytest.raises(ValueError):
        wilson_interval(5, 3)
    with pytest.raises(ValueError):
        wilson_interval(0, 0)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        McConfig(target_error_events=10)
    with pytest.raises(ConfigurationError):
        McConfig(trials=10, max_trials=5)
    with pytest.raises(ConfigurationError):
        McConfig(workers=0)


def test_gaussian_moments():
    x = gen_complex_gaussian(1_000_000, 2.0, CounterStream(stream_key(7)))
    assert np.mean(np.abs(x) ** 2) == pytest.approx(2.0, abs=0.01)
    se = math.sqrt(1.0 / x.size)
    assert abs(x.real.mean()) < 3 * se and abs(x.imag.mean()) < 3 * se
    assert x.real.var() == pytest.approx(1.0, abs=0.01)
    assert x.imag.var() == pytest.approx(1.0, abs=0.01)


def test_gaussian_chi_square_fit():
    var = 3.0
    x = gen_complex_gaussian(200_000, var, CounterStream(stream_key(11)))
    t = 2 * np.abs(x) ** 2 / var
    edges = stats.chi2.ppf(np.linspace(0, 1, 41), 2)
    observed, _ = np.histogram(t, edges)
    expected = np.full(40, t.size / 40)
    assert stats.chisquare(observed, expected).pvalue > 0.01


def test_counter_stream_continues():
    key = stream_key(3, (1, 2))
    whole = CounterStream(key).uniforms(40)
    s = CounterStream(key)
    parts = np.concatenate([s.uniforms(16), s.uniforms(24)])
    assert np.array_equal(whole, parts)
    assert np.all((whole > 0) & (whole <= 1))


def test_streams_differ():
    a = CounterStream(stream_key(0, 1)).uniforms(8)
    b = CounterStream(stream_key(0, 2)).uniforms(8)
    assert not np.array_equal(a, b)


def test_exact_single_sample_case():
    mc = McConfig(trials=300_000, max_trials=300_000, seed=1)
    est = simulate_ber(NoiseModScenario(1, 1.0, 1.0), Awgn(), mc)
    assert covers(est, 0.375)
    assert est.trials_used == 300_000


def test_n50_waterfall_point():
    s = NoiseModScenario.from_snr_db(50, 1.9)
    mc = McConfig(trials=20_000, max_trials=10**6, seed=2)
    est = simulate_ber(s, Awgn(), mc)
    assert covers(est, error_probabilities(s).pe)
    assert est.error_events >= 100


@pytest.mark.parametrize("workers,batch", [(1, 1000), (3, 777), (8, 4096)])
def test_determinism_across_schedules(workers, batch):
    s = NoiseModScenario.from_snr_db(10, 4.0)
    ref = simulate_ber(s, Rayleigh(), McConfig(trials=5000, max_trials=10**5, seed=9, batch_size=2048))
    got = simulate_ber(s, Rayleigh(), McConfig(trials=5000, max_trials=10**5, seed=9, batch_size=batch, workers=workers))
    assert got == ref


def test_stop_at_target_error():
    s = NoiseModScenario.from_snr_db(10, 0.0)
    est = simulate_ber(s, Awgn(), McConfig(trials=100, max_trials=10**6, target_error_events=50))
    assert est.error_events == 50
    assert not est.insufficient_events


def test_insufficient_events_flag():
    s = NoiseModScenario.from_snr_db(100, 15.0)
    est = simulate_ber(s, Awgn(), McConfig(trials=2000, max_trials=2000))
    assert est.insufficient_events
    assert est.trials_used == 2000
    assert est.ci_low == 0.0 or est.error_events > 0


@pytest.mark.slow
@pytest.mark.parametrize("db", [-5.0, 0.0, 5.0, 10.0, 15.0, 20.0])
def test_ideal_selection_matches_quadrature(db):
    s = NoiseModScenario.from_snr_db(50, db)
    mc = McConfig(trials=40_000, max_trials=10**6, seed=4)
    div = simulate_ber(s, RayleighSelDiv2(SelectionRule.IDEAL_CSI), mc, stream=1)
    ray = simulate_ber(s, Rayleigh(), mc, stream=2)
    assert covers(div, ber_diversity2_ideal(s).pe)
    assert covers(ray, ber_rayleigh(s).pe)


@pytest.mark.parametrize("rule", [SelectionRule.MAX_STATISTIC, SelectionRule.ENERGY_COMBINE])
def test_practical_selection_beats_single_branch(rule):
    s = NoiseModScenario.from_snr_db(20, 10.0)
    mc = McConfig(trials=20_000, max_trials=20_000, seed=5)
    est = simulate_ber(s, RayleighSelDiv2(rule), mc)
    assert est.ci_high < ber_rayleigh(s).pe


def test_unknown_channel():
    with pytest.raises(TypeError):
        simulate_ber(NoiseModScenario(2, 1.0, 1.0), "awgn", McConfig())
