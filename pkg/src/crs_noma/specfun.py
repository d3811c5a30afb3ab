"""Incomplete gamma and exponential-integral routines on the positive real axis.

Only the pieces the rate and outage expressions need are provided:

* ``Gamma(0, x) = E_1(x)`` and its exponentially scaled form ``e^x E_1(x)``,
* ``Gamma(-n, x) = x^{-n} E_{n+1}(x)`` for non-negative integer ``n``,
* the regularized lower incomplete gamma ``P(k, x)`` for integer shape ``k``.

``E_1`` uses the power series for ``x <= 1`` and a modified-Lentz continued
fraction for ``x > 1``.  The scaled variants never form ``e^{-x}`` explicitly,
so they stay finite for arguments far beyond the exp() underflow point.
"""

from __future__ import annotations

import math

EULER_GAMMA = 0.57721566490153286061

# E_1 series/continued-fraction switch point.
SERIES_CUTOFF = 1.0

# Default cap on n in Gamma(-n, x): n = i + j <= 2 * (16 - 1).
MAX_NEG_ORDER = 30

_EPS = 1e-16
_TINY = 1e-300
_MAXIT = 10_000

# Recurrence error amplification that triggers the direct fallback (4 digits).
_MAX_AMPLIFICATION = 1e4


class DomainError(ValueError):
    """Argument outside the domain on which the function is finite."""


class UnsupportedOrderError(ValueError):
    """Requested order exceeds the configured cap."""


def _check_positive(x: float) -> float:
    x = float(x)
    if not x > 0.0 or math.isnan(x):
        raise DomainError(f"argument must be > 0, got {x!r}")
    return x


def _series_scaled(n: int, x: float) -> float:
    """e^x * E_n(x) from the power series; intended for 0 < x <= 1."""
    nm1 = n - 1
    ans = 1.0 / nm1 if nm1 else -math.log(x) - EULER_GAMMA
    fact = 1.0
    for i in range(1, _MAXIT):
        fact *= -x / i
        if i != nm1:
            delta = -fact / (i - nm1)
        else:
            psi = -EULER_GAMMA + math.fsum(1.0 / k for k in range(1, nm1 + 1))
            delta = fact * (-math.log(x) + psi)
        ans += delta
        if abs(delta) < abs(ans) * _EPS:
            return ans * math.exp(x)
    raise ArithmeticError(f"E_{n} series did not converge at x={x}")


def _contfrac_scaled(n: int, x: float) -> float:
    """e^x * E_n(x) from the continued fraction; intended for x > 1."""
    b = x + n
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAXIT):
        a = -i * (n - 1 + i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"E_{n} continued fraction did not converge at x={x}")


def _direct_scaled_expint(n: int, x: float) -> float:
    if x <= SERIES_CUTOFF:
        return _series_scaled(n, x)
    return _contfrac_scaled(n, x)


def exp_scaled_upper_gamma_zero(x: float) -> float:
    """Return ``e^x * Gamma(0, x)`` for ``x > 0`` without overflow."""
    x = _check_positive(x)
    return _direct_scaled_expint(1, x)


def upper_gamma_zero(x: float) -> float:
    """Return ``Gamma(0, x) = E_1(x) = -Ei(-x)`` for ``x > 0``."""
    x = _check_positive(x)
    if x <= SERIES_CUTOFF:
        # Unscaled series directly, avoids the exp(x) * exp(-x) round trip.
        s = 0.0
        term = 1.0
        for k in range(1, _MAXIT):
            term *= -x / k
            d = term / k
            s += d
            if abs(d) < _EPS * abs(s):
                break
        return -EULER_GAMMA - math.log(x) - s
    return _contfrac_scaled(1, x) * math.exp(-x)


def exp_scaled_expint(n: int, x: float) -> float:
    """Return ``e^x * E_n(x)`` for integer ``n >= 1`` and ``x > 0``.

    The forward recurrence ``E_{k+1} = (e^{-x} - x E_k) / k`` is run from
    ``E_1``.  Each step multiplies the relative error of the previous value
    by ``x s_k / |1 - x s_k|`` (with ``s_k = e^x E_k``); once the accumulated
    factor reaches 1e4 the value is recomputed directly instead.
    """
    if n < 1:
        raise DomainError(f"order must be >= 1, got {n}")
    x = _check_positive(x)
    s = _direct_scaled_expint(1, x)
    amplification = 1.0
    for k in range(1, n):
        xs = x * s
        diff = 1.0 - xs
        if diff <= 0.0:
            return _direct_scaled_expint(n, x)
        amplification *= max(1.0, xs / diff)
        if amplification >= _MAX_AMPLIFICATION:
            return _direct_scaled_expint(n, x)
        s = diff / k
    return s


def exp_scaled_upper_gamma_neg_int(n: int, x: float, max_order: int = MAX_NEG_ORDER) -> float:
    """Return ``e^x * Gamma(-n, x) = x^{-n} e^x E_{n+1}(x)``."""
    _check_order(n, max_order)
    x = _check_positive(x)
    s = exp_scaled_expint(n + 1, x)
    if n == 0:
        return s
    return s * _pow_neg(x, n)


def upper_gamma_neg_int(n: int, x: float, max_order: int = MAX_NEG_ORDER) -> float:
    """Return ``Gamma(-n, x)`` for integer ``0 <= n <= max_order`` and ``x > 0``."""
    _check_order(n, max_order)
    x = _check_positive(x)
    if n == 0:
        return upper_gamma_zero(x)
    s = exp_scaled_expint(n + 1, x)
    log_scale = -x - n * math.log(x)
    if log_scale > 709.0:
        return math.inf
    return s * math.exp(log_scale)


def _check_order(n: int, max_order: int) -> None:
    if int(n) != n or n < 0:
        raise DomainError(f"order must be a non-negative integer, got {n!r}")
    if n > max_order:
        raise UnsupportedOrderError(f"Gamma(-{n}, x) exceeds the order cap {max_order}")


def _pow_neg(x: float, n: int) -> float:
    log_val = -n * math.log(x)
    if log_val > 709.0:
        return math.inf
    return math.exp(log_val)


def _erlang_terms(shape: int, x: float, start: int, stop: int | None):
    # e^{-x} x^m / m! in log space; stop=None means run until negligible.
    lx = math.log(x)
    m = start
    term = math.exp(m * lx - x - math.lgamma(m + 1))
    out = []
    while True:
        out.append(term)
        m += 1
        if stop is not None and m >= stop:
            break
        if stop is None and term < _EPS * 1e-2 * out[0] and m > x:
            break
        term *= x / m
        if stop is None and term == 0.0:
            break
    return out


def regularized_lower_gamma(shape: int, x: float) -> float:
    """Regularized lower incomplete gamma ``P(shape, x)`` for integer shape.

    This is the Erlang CDF ``1 - e^{-x} sum_{m<shape} x^m/m!``.  For
    ``x < shape`` the complementary tail ``e^{-x} sum_{m>=shape} x^m/m!`` is
    summed instead so that tiny probabilities keep full relative accuracy.
    """
    if int(shape) != shape or shape < 1:
        raise DomainError(f"shape must be a positive integer, got {shape!r}")
    x = float(x)
    if x < 0.0 or math.isnan(x):
        raise DomainError(f"x must be >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < shape:
        return min(1.0, math.fsum(_erlang_terms(shape, x, shape, None)))
    return max(0.0, 1.0 - math.fsum(_erlang_terms(shape, x, 0, shape)))


def regularized_upper_gamma(shape: int, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(shape, x) = 1 - P(shape, x)``."""
    if int(shape) != shape or shape < 1:
        raise DomainError(f"shape must be a positive integer, got {shape!r}")
    x = float(x)
    if x < 0.0 or math.isnan(x):
        raise DomainError(f"x must be >= 0, got {x!r}")
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < shape:
        return max(0.0, 1.0 - math.fsum(_erlang_terms(shape, x, shape, None)))
    return min(1.0, math.fsum(_erlang_terms(shape, x, 0, shape)))
