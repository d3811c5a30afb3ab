"""Closed-form average achievable rates of CRS-NOMA with SC or MRC reception.

Rates are in bits/s/Hz and include the 1/2 pre-log of the two-slot protocol.

SC uses the alternating binomial expansion of the survival function of
``min(delta_sr, delta_sd)`` (resp. ``min(a2 delta_sr, delta_rd)``), giving sums
of ``e^{c/rho} Gamma(0, c/rho)`` terms.

MRC uses the Erlang expansion of ``min(lambda_sr, lambda_sd)``, giving terms
``Gamma(1+m) / (... rho^m) * e^{phi/rho} Gamma(-m, phi/rho)`` with ``m = i+j``.
Because ``Gamma(-m, x) = x^{-m} E_{m+1}(x)``, the ``rho^{-m}`` prefactor cancels
against ``x^{-m}`` with ``x = phi/rho`` and each term reduces to
``m!/(i! j!) (1/(Omega_sr phi))^i (1/(Omega_sd phi))^j e^x E_{m+1}(x)``.
Evaluating that form keeps every term O(1) at any SNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .model import Combiner, SystemConfig, derive_constants
from .specfun import MAX_NEG_ORDER, UnsupportedOrderError, exp_scaled_expint, exp_scaled_upper_gamma_zero

_INV_2LN2 = 1.0 / (2.0 * math.log(2.0))


class Scheme(str, Enum):
    NOMA_SC = "NOMA-SC"
    NOMA_MRC = "NOMA-MRC"
    OMA_SC = "OMA-SC"
    OMA_MRC = "OMA-MRC"


class Method(str, Enum):
    CLOSED_FORM = "closed-form"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte-carlo"


class NumericalRegimeError(ArithmeticError):
    """A rate evaluated negative beyond round-off."""


@dataclass(frozen=True)
class RateResult:
    c_s1: float
    c_s2: float
    c_sum: float
    scheme: Scheme
    method: Method


def _finish(terms: list[float], what: str) -> float:
    value = math.fsum(terms)
    if value < 0.0:
        scale = math.fsum(abs(t) for t in terms)
        if -value > 64.0 * 2.0**-52 * scale:
            raise NumericalRegimeError(f"{what} evaluated to {value!r} (term magnitude {scale!r})")
        return 0.0
    return value * _INV_2LN2


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not rho > 0.0:
        raise ValueError(f"rho must be positive, got {rho!r}")
    return rho


def _alternating_weights(n_r: int, n_d: int):
    for k in range(1, n_r + 1):
        for j in range(1, n_d + 1):
            yield k, j, (-1) ** (k + j) * math.comb(n_r, k) * math.comb(n_d, j)


def rate_s1_sc(cfg: SystemConfig, rho: float) -> float:
    rho = _check_rho(rho)
    dc = derive_constants(cfg, rho)
    terms = []
    for k, j, w in _alternating_weights(cfg.n_r, cfg.n_d):
        chi = dc.chi(k, j)
        terms.append(w * exp_scaled_upper_gamma_zero(chi / rho))
        terms.append(-w * exp_scaled_upper_gamma_zero(chi / (rho * cfg.a2)))
    return _finish(terms, "SC rate of s1")


def rate_s2_sc(cfg: SystemConfig, rho: float) -> float:
    rho = _check_rho(rho)
    dc = derive_constants(cfg, rho)
    terms = [w * exp_scaled_upper_gamma_zero(dc.theta_kj(k, j) / rho) for k, j, w in _alternating_weights(cfg.n_r, cfg.n_d)]
    return _finish(terms, "SC rate of s2")


def rate_sum_sc(cfg: SystemConfig, rho: float) -> RateResult:
    c1 = rate_s1_sc(cfg, rho)
    c2 = rate_s2_sc(cfg, rho)
    return RateResult(c1, c2, c1 + c2, Scheme.NOMA_SC, Method.CLOSED_FORM)


def _erlang_weights(n_r: int, n_d: int, p: float, q: float, max_order: int):
    if n_r + n_d - 2 > max_order:
        raise UnsupportedOrderError(f"N_r + N_d - 2 = {n_r + n_d - 2} exceeds the order cap {max_order}")
    for i in range(n_r):
        for j in range(n_d):
            # m!/(i! j!) p^i q^j, i.e. a multinomial-style weight
            yield i + j, math.comb(i + j, i) * p**i * q**j


def rate_s1_mrc(cfg: SystemConfig, rho: float, max_order: int = MAX_NEG_ORDER) -> float:
    rho = _check_rho(rho)
    phi = derive_constants(cfg, rho).phi
    p = 1.0 / (cfg.omega_sr * phi)
    q = 1.0 / (cfg.omega_sd * phi)
    x_hi = phi / rho
    x_lo = phi / (rho * cfg.a2)
    terms = []
    for m, w in _erlang_weights(cfg.n_r, cfg.n_d, p, q, max_order):
        terms.append(w * exp_scaled_expint(m + 1, x_hi))
        terms.append(-w * exp_scaled_expint(m + 1, x_lo))
    return _finish(terms, "MRC rate of s1")


def rate_s2_mrc(cfg: SystemConfig, rho: float, max_order: int = MAX_NEG_ORDER) -> float:
    rho = _check_rho(rho)
    xi = derive_constants(cfg, rho).xi
    p = 1.0 / (cfg.a2 * cfg.omega_sr * xi)
    q = 1.0 / (cfg.omega_rd * xi)
    x = xi / rho
    terms = [w * exp_scaled_expint(m + 1, x) for m, w in _erlang_weights(cfg.n_r, cfg.n_d, p, q, max_order)]
    return _finish(terms, "MRC rate of s2")


def rate_sum_mrc(cfg: SystemConfig, rho: float) -> RateResult:
    c1 = rate_s1_mrc(cfg, rho)
    c2 = rate_s2_mrc(cfg, rho)
    return RateResult(c1, c2, c1 + c2, Scheme.NOMA_MRC, Method.CLOSED_FORM)


def rate_sum(cfg: SystemConfig, rho: float, combiner: Combiner | str) -> RateResult:
    if Combiner.parse(combiner) is Combiner.SC:
        return rate_sum_sc(cfg, rho)
    return rate_sum_mrc(cfg, rho)
