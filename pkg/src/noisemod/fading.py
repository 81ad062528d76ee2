"""Fading-averaged BER of the static-threshold energy detector.

The receiver has no instantaneous CSI, so the threshold is the AWGN one for
the *average* SNR; only the missed-detection probability depends on the power
gain ``g``. Averages over ``g`` are integrals against ``exp(-g)``.
"""

from __future__ import annotations

import math
import warnings
from functools import lru_cache

import numpy as np

from noisemod.detection import error_probabilities, scenario_threshold
from noisemod.model import FadingBerResult, NoiseModScenario, NumericWarning
from noisemod.specfun import chi2_cdf_even, gauss_laguerre, gauss_legendre

DEFAULT_ORDER = 96
MAX_ORDER = 256
CONVERGENCE_TOL = 1e-6

# Geometric panel edges around the pmd transition, as multiples of its location.
_PANEL_EXPONENTS = np.arange(-24, 13) / 2.0
_PANEL_CAP = 40.0


@lru_cache(maxsize=None)
def _laguerre(order: int):
    return gauss_laguerre(order)


@lru_cache(maxsize=None)
def _legendre(order: int):
    return gauss_legendre(order)


def conditional_pmd(g, scenario: NoiseModScenario):
    """Missed-detection probability given channel power gain ``g``."""
    th = scenario_threshold(scenario)
    g = np.asarray(g, dtype=float)
    out = chi2_cdf_even(2.0 * th / (g * scenario.tx_power + scenario.noise_var), scenario.n_samples)
    return out


def _transition_gain(scenario: NoiseModScenario) -> float:
    """Gain at which the conditional pmd is about one half."""
    th = scenario_threshold(scenario)
    return (th / scenario.n_samples - scenario.noise_var) / scenario.tx_power


def _exp_integral(f, scale: float, order: int) -> float:
    """``int_0^inf f(g) exp(-g) dg`` for ``f`` with a sharp drop near ``scale``.

    Gauss-Legendre panels with geometric edges cover ``[0, B]`` and a
    Gauss-Laguerre rule the shifted tail ``exp(-B) int_0^inf f(B + t) exp(-t) dt``.
    A bare Laguerre rule cannot resolve the drop once it sits well below the
    smallest node (high SNR puts it near ``ln(snr) / snr``).
    """
    edges = scale * 2.0 ** _PANEL_EXPONENTS
    edges = np.concatenate(([0.0], edges[edges < _PANEL_CAP]))
    if edges[-1] < 1.0:
        edges = np.append(edges, 1.0)
    leg = _legendre(max(8, order // 4))
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    g = (a + b) / 2 + half * leg.nodes[None, :]
    panels = np.sum(half * leg.weights[None, :] * f(g) * np.exp(-g))

    tail_start = edges[-1]
    lag = _laguerre(order)
    tail = math.exp(-tail_start) * np.dot(lag.weights, f(tail_start + lag.nodes))
    return float(panels + tail)


def _with_error_estimate(compute, order: int) -> tuple[float, float, tuple[str, ...]]:
    value = compute(order)
    other = 2 * order if 2 * order <= MAX_ORDER else order // 2
    err = abs(compute(other) - value)
    notes: tuple[str, ...] = ()
    if err > CONVERGENCE_TOL and order >= MAX_ORDER // 2:
        msg = f"quadrature did not converge: order-doubling delta {err:.3g} at order {order}"
        warnings.warn(msg, NumericWarning, stacklevel=3)
        notes = (msg,)
    return value, err, notes


def _check_order(order: int) -> None:
    # raises ConfigurationError for an invalid order
    _laguerre(order)


def expect_over_gain(f, scale: float = 0.5, order: int = DEFAULT_ORDER, max_of_two: bool = False) -> float:
    """``E[f(g)]`` for a unit-mean exponential gain, or for the larger of two
    independent ones (density ``2(1 - e^-g) e^-g``).

    The two-branch average is ``2 int f e^-g - 2 int f e^-2g``; the second
    piece is mapped back onto the ``e^-u`` weight with ``u = 2g``. ``scale``
    places the quadrature panels where ``f`` changes fastest.
    """
    single = _exp_integral(f, scale, order)
    if not max_of_two:
        return single
    doubled = 0.5 * _exp_integral(lambda u: f(0.5 * u), 2.0 * scale, order)
    return 2.0 * single - 2.0 * doubled


def _avg_pmd(scenario: NoiseModScenario, quadrature_order: int, max_of_two: bool):
    _check_order(quadrature_order)
    scale = _transition_gain(scenario)

    def compute(order):
        return expect_over_gain(lambda g: conditional_pmd(g, scenario), scale, order, max_of_two)

    avg, err, notes = _with_error_estimate(compute, quadrature_order)
    return min(max(avg, 0.0), 1.0), err, notes


def ber_rayleigh(scenario: NoiseModScenario, quadrature_order: int = DEFAULT_ORDER) -> FadingBerResult:
    pfa = error_probabilities(scenario).pfa
    avg, err, notes = _avg_pmd(scenario, quadrature_order, max_of_two=False)
    return FadingBerResult(pfa, avg, 0.5 * pfa + 0.5 * avg, quadrature_order, 0.5 * err, notes)


def ber_diversity2_ideal(scenario: NoiseModScenario, quadrature_order: int = DEFAULT_ORDER) -> FadingBerResult:
    """Lower bound with perfect-CSI selection of the stronger of two branches."""
    pfa = error_probabilities(scenario).pfa
    avg, err, notes = _avg_pmd(scenario, quadrature_order, max_of_two=True)
    return FadingBerResult(pfa, avg, 0.5 * pfa + 0.5 * avg, quadrature_order, 0.5 * err, notes)
