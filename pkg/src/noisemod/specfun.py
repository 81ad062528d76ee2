"""Special functions and quadrature rules used by the analytic BER formulas.

Only even degrees of freedom are needed: the test statistic of the complex
energy detector is chi-square with ``2N`` degrees of freedom, so the CDF is an
Erlang (Poisson) sum and has an exact finite form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from noisemod.model import ConfigurationError, DomainError

__all__ = [
    "QuadratureRule",
    "chi2_cdf_even",
    "chi2_sf_even",
    "poisson_pmf",
    "q_function",
    "gauss_laguerre",
    "gauss_legendre",
]

# lgamma(n + 1) - (n + 1/2) log n + n - log sqrt(2 pi), exact to double precision.
_STIRLERR_TABLE = np.array([
    0.0,
    0.08106146679532726,
    0.0413406959554093,
    0.02767792568499834,
    0.020790672103765093,
    0.016644691189821193,
    0.013876128823070748,
    0.01189670994589177,
    0.010411265261972096,
    0.009255462182712733,
    0.00833056343336287,
    0.007573675487951841,
    0.00694284010720953,
    0.006408994188004207,
    0.0059513701127588475,
    0.005554733551962801,
])

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _stirlerr(n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    small = n <= 15
    out = np.empty_like(n)
    out[small] = _STIRLERR_TABLE[n[small].astype(int)]
    big = n[~small]
    nn = big * big
    out[~small] = (
        1 / 12 - (1 / 360 - (1 / 1260 - (1 / 1680 - (1 / 1188) / nn) / nn) / nn) / nn
    ) / big
    return out


def _bd0(x: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Deviance term ``x log(x/m) + m - x`` without cancellation."""
    x, m = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(m, dtype=float))
    out = np.empty(x.shape)
    near = np.abs(x - m) < 0.1 * (x + m)
    xn, mn = x[near], m[near]
    v = (xn - mn) / (xn + mn)
    s = (xn - mn) * v
    ej = 2.0 * xn * v
    v2 = v * v
    # |v| < 0.1, so each term gains two digits
    for j in range(1, 12):
        ej = ej * v2
        s = s + ej / (2 * j + 1)
    out[near] = s
    xf, mf = x[~near], m[~near]
    with np.errstate(divide="ignore", invalid="ignore"):
        out[~near] = xf * np.log(xf / mf) + mf - xf
    return out


def poisson_pmf(k, lam) -> np.ndarray:
    """``exp(-lam) lam**k / k!`` to full relative precision (Loader's method).

    ``k`` is a nonnegative integer (scalar or array), ``lam`` a nonnegative
    array broadcastable against it.
    """
    k, lam = np.broadcast_arrays(np.asarray(k, dtype=float), np.asarray(lam, dtype=float))
    out = np.empty(k.shape)
    zero_k = k == 0
    out[zero_k] = np.exp(-lam[zero_k])
    rest = ~zero_k
    kr, lr = k[rest], lam[rest]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        val = np.exp(-_stirlerr(kr) - _bd0(kr, lr)) / np.sqrt(2.0 * np.pi * kr)
    val[lr == 0] = 0.0
    out[rest] = val
    return out


def _check_chi2_args(x, half_dof):
    if isinstance(half_dof, bool) or int(half_dof) != half_dof or half_dof < 1:
        raise DomainError(f"half_dof must be a positive integer, got {half_dof!r}")
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError("chi-square argument must be nonnegative")
    return x, int(half_dof)


def _erlang_tails(x: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (lower, upper) regularized gamma P(n, x/2), Q(n, x/2).

    Whichever tail is the smaller one is summed directly; the other is its
    complement, so both are accurate wherever they are not close to 1.
    """
    lam = 0.5 * x
    lower = np.zeros_like(lam)
    upper = np.zeros_like(lam)

    # lam < n: P = sum_{k >= n} pmf(k), terms decay forward from k = n
    lo = lam < n
    if np.any(lo):
        lm = lam[lo]
        t = poisson_pmf(n, lm)
        acc = t.copy()
        k = n
        active = t > 0
        while np.any(active):
            k += 1
            t = t * (lm / k)
            acc += t
            active = t > 1e-17 * acc
        lower[lo] = acc
        upper[lo] = 1.0 - acc

    # lam >= n: Q = sum_{k < n} pmf(k), terms decay backward from k = n - 1
    hi = ~lo
    if np.any(hi):
        lm = lam[hi]
        t = poisson_pmf(n - 1, lm)
        acc = t.copy()
        k = n - 1
        active = t > 0
        while k > 0 and np.any(active):
            t = t * (k / lm)
            acc += t
            k -= 1
            active = t > 1e-17 * acc
        upper[hi] = acc
        lower[hi] = 1.0 - acc

    return lower, upper


def _scalar_or_array(arr: np.ndarray, like):
    return float(arr) if np.ndim(like) == 0 else arr


def chi2_cdf_even(x, half_dof: int):
    """CDF of a chi-square variable with ``2 * half_dof`` degrees of freedom.

    Exact Erlang sum ``1 - exp(-x/2) * sum_{k<N} (x/2)**k / k!``; individual
    terms are formed through a saddle-point Poisson pmf so nothing overflows
    for ``half_dof`` in the thousands.
    """
    xa, n = _check_chi2_args(x, half_dof)
    lower, _ = _erlang_tails(np.atleast_1d(xa), n)
    return _scalar_or_array(lower.reshape(xa.shape), x)


def chi2_sf_even(x, half_dof: int):
    """Survival function ``1 - chi2_cdf_even``, accurate deep into the tail."""
    xa, n = _check_chi2_args(x, half_dof)
    _, upper = _erlang_tails(np.atleast_1d(xa), n)
    return _scalar_or_array(upper.reshape(xa.shape), x)


def q_function(x):
    """Gaussian tail probability ``Q(x) = P(Z > x)``."""
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise DomainError("q_function requires finite input")
    out = 0.5 * special.erfc(xa / math.sqrt(2.0))
    return float(out) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule ``sum w_i f(x_i)`` for a fixed weight function.

    ``order`` is the nominal number of nodes; a Laguerre rule of high order
    carries fewer, since nodes whose weight underflows double precision are
    dropped (they cannot contribute to any finite sum).
    """

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def _laguerre_with_derivative(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Evaluate L_n(x) and L_n'(x), returning (log scale, L_n, L_n') with
    ``L_n(x) = exp(scale) * p`` so that large nodes do not overflow."""
    p0 = np.ones_like(x)
    p1 = 1.0 - x
    log_scale = np.zeros_like(x)
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1 - x) * p1 - k * p0) / (k + 1)
        big = np.abs(p1) > 1e150
        if np.any(big):
            f = np.where(big, 1e-150, 1.0)
            p0 = p0 * f
            p1 = p1 * f
            log_scale = log_scale + np.where(big, 150 * math.log(10.0), 0.0)
    # x L_n' = n (L_n - L_{n-1})
    dp = n * (p1 - p0) / x
    return log_scale, p1, dp


def gauss_laguerre(order: int) -> QuadratureRule:
    """Gauss-Laguerre rule for weight ``exp(-x)`` on ``[0, inf)``.

    Nodes start from the eigenvalues of the Jacobi matrix and are polished by
    Newton iteration on the three-term recurrence.
    """
    if isinstance(order, bool) or int(order) != order or not 2 <= order <= 256:
        raise ConfigurationError(f"Gauss-Laguerre order must be in [2, 256], got {order!r}")
    n = int(order)
    k = np.arange(n)
    diag = 2.0 * k + 1.0
    off = np.arange(1, n, dtype=float)
    jac = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    x = np.linalg.eigvalsh(jac)

    for _ in range(100):
        _, p, dp = _laguerre_with_derivative(n, x)
        step = p / dp
        x = x - step
        if np.all(np.abs(step) <= 1e-14 * np.maximum(1.0, x)):
            break

    log_scale, _, dp = _laguerre_with_derivative(n, x)
    # w_i = 1 / (x_i L_n'(x_i)^2)
    log_w = -np.log(x) - 2.0 * (np.log(np.abs(dp)) + log_scale)
    w = np.exp(log_w)
    keep = w > 0
    return QuadratureRule(nodes=x[keep], weights=w[keep], order=n)


def gauss_legendre(order: int) -> QuadratureRule:
    """Gauss-Legendre rule on ``[-1, 1]`` (numpy's construction)."""
    if isinstance(order, bool) or int(order) != order or order < 1:
        raise ConfigurationError(f"Gauss-Legendre order must be positive, got {order!r}")
    x, w = np.polynomial.legendre.leggauss(int(order))
    return QuadratureRule(nodes=x, weights=w, order=int(order))
