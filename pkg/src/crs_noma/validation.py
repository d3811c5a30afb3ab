"""Cross-checks between the closed forms, quadrature and Monte Carlo engines.

Each comparison yields a ``Discrepancy`` tagged with (antennas, SNR,
quantity), so a failing run says exactly which cell drifted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import outage, rates
from .model import Combiner, SnrGrid, SystemConfig, reference_config
from .oracle import montecarlo, quadrature
from .rates import Scheme

QUAD_TOL = 1e-6  # bits/s/Hz
Z_TOL = 4.0  # standard errors

RATE_GRID_DB = tuple(float(x) for x in range(0, 41, 5))
RATE_ANTENNAS = ((1, 1), (2, 2), (4, 4))
OUTAGE_GRID_DB = (10.0, 20.0, 30.0)
OUTAGE_ANTENNAS = ((1, 1), (2, 2), (2, 4))

_CLOSED = {
    "s1_sc": rates.rate_s1_sc,
    "s2_sc": rates.rate_s2_sc,
    "s1_mrc": rates.rate_s1_mrc,
    "s2_mrc": rates.rate_s2_mrc,
}
_MC_KEY = {
    "s1_sc": (Scheme.NOMA_SC, "s1"),
    "s2_sc": (Scheme.NOMA_SC, "s2"),
    "s1_mrc": (Scheme.NOMA_MRC, "s1"),
    "s2_mrc": (Scheme.NOMA_MRC, "s2"),
    "oma_sc": (Scheme.OMA_SC, "sum"),
    "oma_mrc": (Scheme.OMA_MRC, "sum"),
}


@dataclass(frozen=True)
class Discrepancy:
    check: str
    antennas: tuple[int, int]
    rho_db: float
    quantity: str
    value: float  # |difference| or z-score
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.value <= self.tolerance

    def describe(self) -> str:
        status = "ok  " if self.ok else "FAIL"
        n_r, n_d = self.antennas
        return (f"{status} {self.check:<22} Nr={n_r} Nd={n_d} rho={self.rho_db:g}dB "
                f"{self.quantity:<8} {self.value:.3e} (tol {self.tolerance:g})")


def binomial_z(observed: float, expected: float, trials: int) -> float:
    """z-score of an observed frequency under the binomial null ``p = expected``."""
    var = expected * (1.0 - expected) / trials
    if var <= 0.0:
        return 0.0 if observed == expected else math.inf
    return abs(observed - expected) / math.sqrt(var)


def rate_checks(cfg: SystemConfig, antennas=RATE_ANTENNAS, snr_db=RATE_GRID_DB,
                trials: int = 10**6, seed: int = 0, workers: int | None = None,
                with_oma: bool = True) -> list[Discrepancy]:
    grid = SnrGrid.from_db(snr_db)
    out = []
    for n_r, n_d in antennas:
        c = cfg.with_antennas(n_r, n_d)
        mc = montecarlo.mc_rates(c, grid.points, trials, seed, workers=workers)
        for i, (rho_db, rho) in enumerate(zip(grid.db, grid.points)):
            for name, fn in _CLOSED.items():
                closed = fn(c, rho)
                quad = quadrature.quad_rate(c, rho, name)
                est = mc[_MC_KEY[name]][i]
                out.append(Discrepancy("closed-vs-quadrature", (n_r, n_d), rho_db, name, abs(closed - quad), QUAD_TOL))
                out.append(Discrepancy("closed-vs-montecarlo", (n_r, n_d), rho_db, name,
                                       abs(closed - est.mean) / est.std_error, Z_TOL))
            if with_oma:
                for name in ("oma_sc", "oma_mrc"):
                    quad = quadrature.quad_rate(c, rho, name)
                    est = mc[_MC_KEY[name]][i]
                    out.append(Discrepancy("quadrature-vs-montecarlo", (n_r, n_d), rho_db, name,
                                           abs(quad - est.mean) / est.std_error, Z_TOL))
    return out


def outage_checks(cfg: SystemConfig, antennas=OUTAGE_ANTENNAS, snr_db=OUTAGE_GRID_DB,
                  trials: int = 10**7, seed: int = 0, workers: int | None = None) -> list[Discrepancy]:
    grid = SnrGrid.from_db(snr_db)
    out = []
    for n_r, n_d in antennas:
        c = cfg.with_antennas(n_r, n_d)
        for comb in (Combiner.SC, Combiner.MRC):
            mc = montecarlo.mc_outage_sweep(c, grid.points, comb, trials, seed, workers)
            for rho_db, rho, est in zip(grid.db, grid.points, mc):
                for sym, p, e in (("s1", outage.outage_s1(c, rho, comb), est.s1),
                                  ("s2", outage.outage_s2(c, rho, comb), est.s2)):
                    out.append(Discrepancy("outage-vs-montecarlo", (n_r, n_d), rho_db,
                                           f"{sym}_{comb.value.lower()}", binomial_z(e.mean, p, trials), Z_TOL))
    return out


def run_validation(cfg: SystemConfig | None = None, rate_trials: int = 10**6, outage_trials: int = 10**7,
                   seed: int = 0, workers: int | None = None, antennas=None, snr_db=None) -> list[Discrepancy]:
    cfg = cfg or reference_config()
    return (
        rate_checks(cfg, antennas or RATE_ANTENNAS, snr_db or RATE_GRID_DB, rate_trials, seed, workers)
        + outage_checks(cfg, antennas or OUTAGE_ANTENNAS, snr_db or OUTAGE_GRID_DB, outage_trials, seed, workers)
    )


def summarize(results: list[Discrepancy]) -> list[str]:
    """One line per check kind with its worst value, then every failing cell."""
    lines = []
    kinds = sorted({r.check for r in results})
    for kind in kinds:
        sub = [r for r in results if r.check == kind]
        worst = max(sub, key=lambda r: r.value)
        n_fail = sum(not r.ok for r in sub)
        lines.append(f"{kind:<26} max {worst.value:.3e} (tol {worst.tolerance:g}) "
                     f"cells {len(sub)} failed {n_fail}")
    lines += [r.describe() for r in results if not r.ok]
    return lines
