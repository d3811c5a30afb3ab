"""Independent verification engines: adaptive quadrature and Monte Carlo."""

from .montecarlo import (
    BLOCK_SIZE,
    OMA_MRC_ACROSS_SLOTS,
    OMA_SC_ACROSS_SLOTS,
    FadingRealization,
    McEstimate,
    McOutage,
    draw_realization,
    mc_outage,
    mc_outage_sweep,
    mc_rate,
    mc_rates,
)
from .quadrature import QuadratureError, quad_rate, sum_cdf

__all__ = [
    "BLOCK_SIZE",
    "OMA_MRC_ACROSS_SLOTS",
    "OMA_SC_ACROSS_SLOTS",
    "FadingRealization",
    "McEstimate",
    "McOutage",
    "QuadratureError",
    "draw_realization",
    "mc_outage",
    "mc_outage_sweep",
    "mc_rate",
    "mc_rates",
    "quad_rate",
    "sum_cdf",
]
