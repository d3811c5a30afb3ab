"""Adaptive-quadrature evaluation of the average-rate integrals.

Every rate is an expectation ``E[log(1 + c Z)] = int_0^inf c S_Z(x) / (1 + c x) dx``
against the survival function ``S_Z`` of an effective gain.  The survival
functions are built directly from the per-antenna exponential model:
products of ``1 - (1 - e^{-x/Omega})^N`` for SC, products of Erlang tails for
MRC, and a one-dimensional convolution integral for the OMA sum of the two
destination-side hops.  Nothing here touches the incomplete-gamma series used
by the closed forms.

Integration is split on a geometric set of breakpoints (the kernel varies on
the scale ``1/c``, the survival function on the scale ``Omega``) and each
piece is handed to QUADPACK's adaptive Gauss-Kronrod routine.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable

from scipy import integrate

from ..model import Combiner, SystemConfig
from .montecarlo import OMA_MRC_ACROSS_SLOTS, OMA_SC_ACROSS_SLOTS

ABS_TOL = 1e-10
_SEG_ABS = 1e-13
_SEG_REL = 1e-12
_SURVIVAL_FLOOR = 1e-16
_INV_2LN2 = 1.0 / (2.0 * math.log(2.0))

WHICH = ("s1_sc", "s2_sc", "s1_mrc", "s2_mrc", "oma_sc", "oma_mrc")


class QuadratureError(ArithmeticError):
    """Adaptive refinement failed to reach the requested tolerance."""


# -- per-link distributions --------------------------------------------------

def sc_survival(n: int, omega: float, x: float) -> float:
    if x <= 0.0:
        return 1.0
    return -math.expm1(n * math.log1p(-math.exp(-x / omega)))


def sc_pdf(n: int, omega: float, x: float) -> float:
    if x < 0.0:
        return 0.0
    e = math.exp(-x / omega)
    return n / omega * e * (1.0 - e) ** (n - 1)


def erlang_survival(n: int, omega: float, x: float) -> float:
    if x <= 0.0:
        return 1.0
    y = x / omega
    term = math.exp(-y)
    total = term
    for m in range(1, n):
        term *= y / m
        total += term
    return min(1.0, total)


def erlang_pdf(n: int, omega: float, x: float) -> float:
    if x < 0.0:
        return 0.0
    if x == 0.0:
        return 1.0 / omega if n == 1 else 0.0
    y = x / omega
    return math.exp((n - 1) * math.log(y) - y - math.lgamma(n)) / omega


def _link(combiner: Combiner):
    if combiner is Combiner.SC:
        return sc_survival, sc_pdf
    return erlang_survival, erlang_pdf


def sum_survival(combiner: Combiner, n: int, omega_a: float, omega_b: float, x: float) -> float:
    """``P(A + B > x)`` for independent combined gains of two ``n``-antenna links.

    ``P(A > x) + int_0^x f_A(u) P(B > x - u) du``; the second piece is the
    convolution integral, done by adaptive quadrature.
    """
    if x <= 0.0:
        return 1.0
    surv, pdf = _link(combiner)
    val, err, info = _quad(lambda u: pdf(n, omega_a, u) * surv(n, omega_b, x - u), 0.0, x)
    return min(1.0, surv(n, omega_a, x) + val)


def sum_cdf(combiner: Combiner | str, n: int, omega_a: float, omega_b: float, x: float) -> float:
    return 1.0 - sum_survival(Combiner.parse(combiner), n, omega_a, omega_b, x)


# -- effective-gain survival functions ----------------------------------------

def survival(cfg: SystemConfig, which: str, oma_combiner: str = OMA_MRC_ACROSS_SLOTS) -> Callable[[float], float]:
    """Survival function of the effective gain behind one rate integral.

    ``s1_*``: ``min(g_sr, g_sd)``; ``s2_*``: ``min(a2 g_sr, g_rd)``;
    ``oma_*``: ``min(g_sr, g_sd + g_rd)`` (or ``max`` instead of ``+`` for
    selection across the two slots).
    """
    if which not in WHICH:
        raise ValueError(f"unknown rate {which!r}; expected one of {WHICH}")
    combiner = Combiner.SC if which.endswith("_sc") else Combiner.MRC
    surv, _ = _link(combiner)
    n_r, n_d = cfg.n_r, cfg.n_d
    if which.startswith("s1"):
        return lambda x: surv(n_r, cfg.omega_sr, x) * surv(n_d, cfg.omega_sd, x)
    if which.startswith("s2"):
        return lambda x: surv(n_r, cfg.omega_sr, x / cfg.a2) * surv(n_d, cfg.omega_rd, x)
    if oma_combiner == OMA_MRC_ACROSS_SLOTS:
        return lambda x: surv(n_r, cfg.omega_sr, x) * sum_survival(combiner, n_d, cfg.omega_sd, cfg.omega_rd, x)
    if oma_combiner == OMA_SC_ACROSS_SLOTS:
        return lambda x: surv(n_r, cfg.omega_sr, x) * (
            1.0 - (1.0 - surv(n_d, cfg.omega_sd, x)) * (1.0 - surv(n_d, cfg.omega_rd, x))
        )
    raise ValueError(f"unknown OMA combiner {oma_combiner!r}")


def integrand(surv: Callable[[float], float], c: float) -> Callable[[float], float]:
    """``x -> c S(x) / (1 + c x)``; equals ``c`` at ``x = 0``."""
    return lambda x: c * surv(x) / (1.0 + c * x)


# -- integration ---------------------------------------------------------------

def _quad(f, a, b):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info, *msg = integrate.quad(f, a, b, epsabs=_SEG_ABS, epsrel=_SEG_REL, limit=400, full_output=True)
    if msg and err > max(_SEG_ABS, 1e-10 * abs(val)) * 1e3:
        raise QuadratureError(f"quadrature on [{a}, {b}] stalled: {msg[0]} (error estimate {err:.3g})")
    return val, err, info


def truncation_point(surv: Callable[[float], float], scale: float) -> float:
    """Smallest doubling of ``scale`` beyond which the survival function is below 1e-16."""
    x = max(scale, 1e-300)
    while surv(x) >= _SURVIVAL_FLOOR:
        x *= 2.0
        if x > 1e300:
            raise QuadratureError("survival function does not decay")
    return x


def expected_log(surv: Callable[[float], float], c: float, scale: float) -> tuple[float, float]:
    """``(E[ln(1 + c Z)], error bound)`` for a gain ``Z`` with survival ``surv``.

    ``scale`` is a characteristic size of ``Z`` (a mean gain) used to place
    breakpoints.
    """
    x_max = truncation_point(surv, scale)
    f = integrand(surv, c)
    edges = {0.0, x_max}
    b = 1.0 / c
    while b < x_max:
        edges.add(b)
        b *= 10.0
    b = scale
    while b < x_max:
        edges.add(b)
        b *= 2.0
    edges = sorted(edges)
    total, err = [], 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e, _ = _quad(f, lo, hi)
        total.append(v)
        err += e
    tail, tail_err, _ = _quad(f, x_max, math.inf)
    total.append(tail)
    err += tail_err
    if err > ABS_TOL:
        raise QuadratureError(f"accumulated quadrature error {err:.3g} exceeds {ABS_TOL:g}")
    return math.fsum(total), err


def _scale(cfg: SystemConfig, which: str) -> float:
    if which.startswith("s2"):
        return min(cfg.omega_sr * cfg.a2, cfg.omega_rd)
    return min(cfg.omega_sr, cfg.omega_sd)


def quad_rate(cfg: SystemConfig, rho: float, which: str, oma_combiner: str = OMA_MRC_ACROSS_SLOTS) -> float:
    """Average rate (bits/s/Hz) by direct integration of its defining expectation."""
    rho = float(rho)
    if not rho > 0.0:
        raise ValueError(f"rho must be positive, got {rho!r}")
    surv = survival(cfg, which, oma_combiner)
    scale = _scale(cfg, which)
    if which.startswith("s1"):
        # E[ln(1 + a1 rho X / (1 + a2 rho X))] = E[ln(1 + rho X)] - E[ln(1 + a2 rho X)]
        i1, _ = expected_log(surv, rho, scale)
        i2, _ = expected_log(surv, rho * cfg.a2, scale)
        return (i1 - i2) * _INV_2LN2
    i, _ = expected_log(surv, rho, scale)
    return i * _INV_2LN2
