"""Closed-form outage probabilities and their high-SNR asymptotes.

The per-link CDFs are evaluated in product form (SC: ``(1 - e^{-x/Omega})^N``)
or through the Erlang CDF (MRC), not through alternating binomial sums, so
probabilities around 1e-15 keep full relative precision.  The alternating
expansion is still used, with exact integer arithmetic, to extract the
leading asymptotic coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .model import Combiner, InfeasibleConfigError, SystemConfig, derive_constants
from .specfun import DomainError, regularized_lower_gamma


@dataclass(frozen=True)
class OutagePoint:
    p_out_s1: float
    p_out_s2: float
    rho: float
    scheme: Combiner
    method: str = "closed-form"
    feasible: bool = True


class DiversityAsymptote(NamedTuple):
    """``p_out ~ coefficient * rho^{-order}`` as ``rho -> inf``."""

    coefficient: float
    order: int


def cdf_sc_gain(n: int, omega: float, x: float) -> float:
    """CDF of the largest of ``n`` i.i.d. exponential gains with mean ``omega``."""
    if x < 0.0:
        raise DomainError(f"x must be >= 0, got {x!r}")
    return (-math.expm1(-x / omega)) ** n


def cdf_mrc_gain(n: int, omega: float, x: float) -> float:
    """CDF of the sum of ``n`` i.i.d. exponential gains with mean ``omega``."""
    if x < 0.0:
        raise DomainError(f"x must be >= 0, got {x!r}")
    return regularized_lower_gamma(n, x / omega)


def _cdf(combiner: Combiner):
    return cdf_sc_gain if combiner is Combiner.SC else cdf_mrc_gain


def _union(f1: float, f2: float) -> float:
    # P(A or B) for independent A, B
    return f1 + f2 - f1 * f2


def outage_s1(cfg: SystemConfig, rho: float, combiner: Combiner | str) -> float:
    """Probability that the relay or the destination fails to decode s1."""
    combiner = Combiner.parse(combiner)
    dc = derive_constants(cfg, rho)
    if not dc.feasible:
        return 1.0
    cdf = _cdf(combiner)
    t1 = dc.theta1
    return _union(cdf(cfg.n_r, cfg.omega_sr, t1), cdf(cfg.n_d, cfg.omega_sd, t1))


def outage_s2(cfg: SystemConfig, rho: float, combiner: Combiner | str) -> float:
    """Probability that s2 is lost at the relay (either SIC stage) or on the relay-destination hop."""
    combiner = Combiner.parse(combiner)
    dc = derive_constants(cfg, rho)
    if not dc.feasible:
        return 1.0
    cdf = _cdf(combiner)
    return _union(cdf(cfg.n_r, cfg.omega_sr, dc.theta), cdf(cfg.n_d, cfg.omega_rd, dc.rd_threshold))


def outage_point(cfg: SystemConfig, rho: float, combiner: Combiner | str) -> OutagePoint:
    combiner = Combiner.parse(combiner)
    return OutagePoint(
        outage_s1(cfg, rho, combiner),
        outage_s2(cfg, rho, combiner),
        float(rho),
        combiner,
        feasible=derive_constants(cfg, rho).feasible,
    )


def _stirling_sum(n: int) -> int:
    # sum_k C(n,k) (-1)^k k^n; equals (-1)^n n!
    return sum(math.comb(n, k) * (-1) ** k * k**n for k in range(1, n + 1))


def link_asymptote(combiner: Combiner | str, n: int, omega: float, scaled_threshold: float) -> float:
    """Leading coefficient of ``F(c / rho)`` in powers of ``1/rho`` (order ``n``).

    SC: the alternating expansion of ``(1 - e^{-x/Omega})^n`` leaves
    ``(-1)^n c^n / (n! Omega^n) * sum_k C(n,k)(-1)^k k^n`` as the first
    surviving term.  MRC: ``P(n, y) = y^n / n! + O(y^{n+1})``.
    """
    combiner = Combiner.parse(combiner)
    base = (scaled_threshold / omega) ** n / math.factorial(n)
    if combiner is Combiner.SC:
        return (-1) ** n * _stirling_sum(n) * base
    return base


def _combine(terms: list[tuple[int, float]]) -> DiversityAsymptote:
    order = min(n for n, _ in terms)
    return DiversityAsymptote(math.fsum(c for n, c in terms if n == order), order)


def _scaled_thresholds(cfg: SystemConfig) -> tuple[float, float]:
    dc = derive_constants(cfg, 1.0)
    if not dc.feasible:
        raise InfeasibleConfigError(
            f"no diversity asymptote: a1={cfg.a1} <= eps1*a2={dc.eps1 * cfg.a2}, outage is identically 1"
        )
    return dc.theta1, dc.theta


def diversity_asymptote_s1(cfg: SystemConfig, combiner: Combiner | str) -> DiversityAsymptote:
    t1, _ = _scaled_thresholds(cfg)
    return _combine([
        (cfg.n_r, link_asymptote(combiner, cfg.n_r, cfg.omega_sr, t1)),
        (cfg.n_d, link_asymptote(combiner, cfg.n_d, cfg.omega_sd, t1)),
    ])


def diversity_asymptote_s2(cfg: SystemConfig, combiner: Combiner | str) -> DiversityAsymptote:
    _, t = _scaled_thresholds(cfg)
    return _combine([
        (cfg.n_r, link_asymptote(combiner, cfg.n_r, cfg.omega_sr, t)),
        (cfg.n_d, link_asymptote(combiner, cfg.n_d, cfg.omega_rd, cfg.eps2)),
    ])
