"""Sample-level Monte Carlo BER of the energy detector.

Every trial owns a fixed slice of a Philox counter space, keyed by
``(seed, stream)``. Trial ``i`` therefore sees the same random numbers however
trials are batched or spread over workers, and the stopping point (the trial
carrying the target-th error) is a property of the error sequence alone.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from noisemod.detection import optimal_threshold
from noisemod.model import (
    Awgn,
    ChannelModel,
    ConfigurationError,
    NoiseModScenario,
    Rayleigh,
    RayleighSelDiv2,
    SelectionRule,
)

_TWO_POW_M53 = 2.0**-53


@dataclass(frozen=True)
class McConfig:
    """``trials`` is the minimum run length; past it the run stops at the
    ``target_error_events``-th error or at ``max_trials``."""

    trials: int = 10_000
    max_trials: int = 10**8
    target_error_events: int = 100
    seed: int = 0
    batch_size: int = 4096
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1 or self.batch_size < 1 or self.workers < 1:
            raise ConfigurationError("trials, batch_size and workers must be positive")
        if self.trials > self.max_trials:
            raise ConfigurationError("trials must not exceed max_trials")
        if self.target_error_events < 50:
            raise ConfigurationError("target_error_events must be >= 50 for a meaningful interval")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    ber_hat: float
    trials_used: int
    error_events: int
    ci_low: float
    ci_high: float
    insufficient_events: bool = False


def wilson_interval(errors: int, trials: int, confidence: float = 0.99) -> tuple[float, float]:
    if trials < 1 or not 0 <= errors <= trials:
        raise ValueError("need 0 <= errors <= trials and trials >= 1")
    z = stats.norm.isf(0.5 * (1.0 - confidence))
    p = errors / trials
    z2n = z * z / trials
    centre = (p + 0.5 * z2n) / (1.0 + z2n)
    half = z * math.sqrt(p * (1.0 - p) / trials + 0.25 * z2n / trials) / (1.0 + z2n)
    low = 0.0 if errors == 0 else max(0.0, min(p, centre - half))
    high = 1.0 if errors == trials else min(1.0, max(p, centre + half))
    return float(low), float(high)


def stream_key(seed: int, stream: int | tuple[int, ...] = 0) -> np.ndarray:
    """128-bit Philox key for one independent stream of a master seed.

    ``stream`` may be a tuple, e.g. ``(n_samples, grid_index)`` for a sweep cell.
    """
    spawn = tuple(stream) if isinstance(stream, tuple) else (stream,)
    ss = np.random.SeedSequence(seed, spawn_key=spawn)
    return ss.generate_state(2, dtype=np.uint64)


class CounterStream:
    """Sequential view of a Philox counter space, starting at ``counter``."""

    def __init__(self, key: np.ndarray, counter: int = 0):
        self.key = np.asarray(key, dtype=np.uint64)
        self.counter = counter

    def uniforms(self, count: int) -> np.ndarray:
        """``count`` doubles in ``(0, 1]`` with 53 random bits each."""
        blocks = -(-count // 4)
        raw = np.random.Philox(key=self.key, counter=self.counter).random_raw(4 * blocks)
        self.counter += blocks
        return _to_unit(raw[:count])


def _to_unit(raw: np.ndarray) -> np.ndarray:
    return ((raw >> np.uint64(11)).astype(np.float64) + 1.0) * _TWO_POW_M53


def _box_muller(u1: np.ndarray, u2: np.ndarray, variance: float) -> np.ndarray:
    """Exact polar transform: ``|z|^2`` is exponential with mean ``variance``."""
    r = np.sqrt(-variance * np.log(u1))
    phase = 2.0 * np.pi * u2
    return r * np.cos(phase) + 1j * (r * np.sin(phase))


def gen_complex_gaussian(count: int, variance: float, stream: CounterStream) -> np.ndarray:
    """Circularly symmetric CN(0, variance) samples."""
    if variance <= 0:
        raise ValueError("variance must be positive")
    u = stream.uniforms(2 * count)
    return _box_muller(u[0::2], u[1::2], variance)


def _layout(n_samples: int, branches: int) -> tuple[int, int]:
    """(uniforms used, Philox counters reserved) per trial.

    Word 0 carries the bit; then one fading pair per branch, the ``2N`` words
    of the transmitted burst (shared by all branches), and ``2N`` noise words
    per branch.
    """
    words = 1 + 2 * branches + 2 * n_samples + branches * 2 * n_samples
    return words, -(-words // 4)


def _trial_block(key, first: int, count: int, counters_per_trial: int) -> np.ndarray:
    raw = np.random.Philox(key=key, counter=first * counters_per_trial).random_raw(
        count * 4 * counters_per_trial
    )
    return raw.reshape(count, 4 * counters_per_trial)


def _simulate_chunk(
    scenario: NoiseModScenario,
    channel: ChannelModel,
    key: np.ndarray,
    first: int,
    count: int,
) -> np.ndarray:
    """Offsets (within the chunk) of trials that produced a bit error."""
    n = scenario.n_samples
    branches = 2 if isinstance(channel, RayleighSelDiv2) else 1
    words, cpt = _layout(n, branches)
    raw = _trial_block(key, first, count, cpt)

    bits = (raw[:, 0] >> np.uint64(63)).astype(bool)
    u = _to_unit(raw[:, 1:words])
    u_h = u[:, : 2 * branches]
    u_x = u[:, 2 * branches : 2 * branches + 2 * n]
    u_w = u[:, 2 * branches + 2 * n :].reshape(count, branches, 2 * n)
    y = _box_muller(u_w[:, :, 0::2], u_w[:, :, 1::2], scenario.noise_var)
    h = None
    if not isinstance(channel, Awgn):
        h = _box_muller(u_h[:, 0::2], u_h[:, 1::2], 1.0)

    # the transmitted burst only matters for trials carrying a 1
    ones = np.flatnonzero(bits)
    x = _box_muller(u_x[ones, 0::2], u_x[ones, 1::2], scenario.tx_power)[:, None, :]
    if h is not None:
        x = h[ones][:, :, None] * x
    y[ones] += x
    stat = np.sum(y.real**2 + y.imag**2, axis=2)

    s0, s1 = scenario.noise_var, scenario.sigma1_sq
    th = optimal_threshold(n, s0, s1)
    if isinstance(channel, (Awgn, Rayleigh)):
        decided = stat[:, 0] >= th
    elif channel.rule is SelectionRule.IDEAL_CSI:
        best = np.argmax(np.abs(h) ** 2, axis=1)
        decided = stat[np.arange(count), best] >= th
    elif channel.rule is SelectionRule.MAX_STATISTIC:
        decided = stat.max(axis=1) >= th
    else:
        decided = stat.sum(axis=1) >= optimal_threshold(2 * n, s0, s1)
    return np.flatnonzero(decided != bits)


def simulate_ber(
    scenario: NoiseModScenario,
    channel: ChannelModel,
    mc: McConfig,
    stream: int | tuple[int, ...] = 0,
    confidence: float = 0.99,
) -> McEstimate:
    """Monte Carlo BER with a Wilson interval.

    Under H1 each branch draws one fading coefficient per bit (AWGN ignores
    it), the receiver thresholds ``T = sum |y_n|^2`` at the average-SNR ML
    threshold and ``T == threshold`` decides 1.
    """
    if not isinstance(channel, (Awgn, Rayleigh, RayleighSelDiv2)):
        raise TypeError(f"unknown channel model {channel!r}")
    key = stream_key(mc.seed, stream)
    chunks = []
    start = 0
    while start < mc.max_trials:
        size = min(mc.batch_size, mc.max_trials - start)
        chunks.append((start, size))
        start += size

    errors_seen = 0
    error_positions: list[np.ndarray] = []
    done_trials = 0
    stop_at: int | None = None

    def run(chunk):
        first, size = chunk
        return first + _simulate_chunk(scenario, channel, key, first, size)

    wave = max(1, 2 * mc.workers)
    with ThreadPoolExecutor(max_workers=mc.workers) as pool:
        i = 0
        while i < len(chunks) and stop_at is None:
            batch = chunks[i : i + wave]
            i += len(batch)
            for (first, size), pos in zip(batch, pool.map(run, batch)):
                error_positions.append(pos)
                errors_seen += len(pos)
                done_trials = first + size
                if done_trials >= mc.trials and errors_seen >= mc.target_error_events:
                    all_pos = np.concatenate(error_positions)
                    kth = int(all_pos[mc.target_error_events - 1]) + 1
                    stop_at = max(mc.trials, kth)
                    break
                if done_trials >= mc.max_trials:
                    stop_at = mc.max_trials
                    break

    if stop_at is None:
        stop_at = done_trials
    all_pos = np.concatenate(error_positions) if error_positions else np.empty(0, dtype=np.int64)
    errors = int(np.count_nonzero(all_pos < stop_at))
    low, high = wilson_interval(errors, stop_at, confidence)
    return McEstimate(
        ber_hat=errors / stop_at,
        trials_used=stop_at,
        error_events=errors,
        ci_low=low,
        ci_high=high,
        insufficient_events=errors < mc.target_error_events,
    )
