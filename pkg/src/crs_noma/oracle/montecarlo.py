"""Seeded Monte Carlo simulator of the two-slot relaying protocol.

Random numbers come from a counter-based Philox stream.  Trials are grouped
in fixed blocks of ``BLOCK_SIZE``; block ``b`` uses the Philox key
``(seed, b)``, so trial ``t`` always sees the same uniforms no matter how many
trials are requested or how many workers run the blocks.  Block partial sums
are merged in block order, which makes every estimate bit-reproducible.

Each trial draws ``n_r + 2 n_d`` unit-rate exponentials via ``-ln(1 - U)``:
source-relay antennas first, then source-destination, then relay-destination.
The SC and MRC statistics, and the NOMA and OMA samples, all come from the
same draws (common random numbers).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..model import Combiner, SystemConfig, derive_constants
from ..rates import Scheme

BLOCK_SIZE = 1 << 16
THREADS_ENV = "CRS_NOMA_THREADS"

OMA_MRC_ACROSS_SLOTS = "mrc-across-slots"
OMA_SC_ACROSS_SLOTS = "sc-across-slots"
OMA_COMBINERS = (OMA_MRC_ACROSS_SLOTS, OMA_SC_ACROSS_SLOTS)


@dataclass(frozen=True)
class FadingRealization:
    """Per-link combined gains for a batch of trials (arrays of equal length)."""

    delta_sr: np.ndarray
    delta_sd: np.ndarray
    delta_rd: np.ndarray
    lambda_sr: np.ndarray
    lambda_sd: np.ndarray
    lambda_rd: np.ndarray
    w_sc: np.ndarray
    z_mrc: np.ndarray

    def gains(self, combiner: Combiner):
        if combiner is Combiner.SC:
            return self.delta_sr, self.delta_sd, self.delta_rd
        return self.lambda_sr, self.lambda_sd, self.lambda_rd

    def oma_statistic(self, combiner: Combiner, oma_combiner: str = OMA_MRC_ACROSS_SLOTS) -> np.ndarray:
        """Effective OMA gain ``min(g_sr, g_sd (+|max) g_rd)``."""
        if oma_combiner == OMA_MRC_ACROSS_SLOTS:
            return self.w_sc if combiner is Combiner.SC else self.z_mrc
        if oma_combiner != OMA_SC_ACROSS_SLOTS:
            raise ValueError(f"unknown OMA combiner {oma_combiner!r}")
        sr, sd, rd = self.gains(combiner)
        return np.minimum(sr, np.maximum(sd, rd))


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    trials: int
    seed: int


def _u64(seed: int) -> int:
    return int(seed) & 0xFFFFFFFFFFFFFFFF


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([_u64(seed), block], dtype=np.uint64)))


def draw_realization(cfg: SystemConfig, rng: np.random.Generator, size: int = 1) -> FadingRealization:
    """Draw ``size`` independent channel realizations of every link."""
    n_r, n_d = cfg.n_r, cfg.n_d
    u = rng.random((size, n_r + 2 * n_d))
    e = -np.log1p(-u)
    sr = cfg.omega_sr * e[:, :n_r]
    sd = cfg.omega_sd * e[:, n_r:n_r + n_d]
    rd = cfg.omega_rd * e[:, n_r + n_d:]
    d_sr, d_sd, d_rd = sr.max(axis=1), sd.max(axis=1), rd.max(axis=1)
    l_sr, l_sd, l_rd = sr.sum(axis=1), sd.sum(axis=1), rd.sum(axis=1)
    return FadingRealization(
        delta_sr=d_sr,
        delta_sd=d_sd,
        delta_rd=d_rd,
        lambda_sr=l_sr,
        lambda_sd=l_sd,
        lambda_rd=l_rd,
        w_sc=np.minimum(d_sr, d_sd + d_rd),
        z_mrc=np.minimum(l_sr, l_sd + l_rd),
    )


def worker_count(requested: int | None = None) -> int:
    """Requested worker count, capped by ``$CRS_NOMA_THREADS`` when set."""
    n = requested if requested else (os.cpu_count() or 1)
    cap = os.environ.get(THREADS_ENV)
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, int(n))


def _run_blocks(fn, trials: int, seed: int, workers: int | None):
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    sizes = [min(BLOCK_SIZE, trials - b * BLOCK_SIZE) for b in range((trials + BLOCK_SIZE - 1) // BLOCK_SIZE)]
    jobs = list(enumerate(sizes))
    n_workers = min(worker_count(workers), len(jobs))
    if n_workers == 1:
        return [fn(block_generator(seed, b), n) for b, n in jobs]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(lambda job: fn(block_generator(seed, job[0]), job[1]), jobs))


def _estimate(partials: Iterable[tuple[float, float]], trials: int, seed: int) -> McEstimate:
    partials = list(partials)
    s = math.fsum(p[0] for p in partials)
    ss = math.fsum(p[1] for p in partials)
    mean = s / trials
    if trials > 1:
        var = max(0.0, (ss - s * mean) / (trials - 1))
        se = math.sqrt(var / trials)
    else:
        se = math.inf
    return McEstimate(mean, se, trials, seed)


def _moments(x: np.ndarray) -> tuple[float, float]:
    return float(np.sum(x)), float(np.sum(x * x))


RATE_QUANTITIES = ("s1", "s2", "sum")


def _rate_keys():
    keys = []
    for scheme in (Scheme.NOMA_SC, Scheme.NOMA_MRC):
        keys += [(scheme, q) for q in RATE_QUANTITIES]
    keys += [(Scheme.OMA_SC, "sum"), (Scheme.OMA_MRC, "sum")]
    return keys


def mc_rates(
    cfg: SystemConfig,
    rhos: Sequence[float],
    trials: int,
    seed: int,
    oma_combiner: str = OMA_MRC_ACROSS_SLOTS,
    workers: int | None = None,
) -> dict[tuple[Scheme, str], list[McEstimate]]:
    """Sample-mean rates of every scheme at every SNR, from one set of draws.

    Returns ``{(scheme, quantity): [estimate per rho]}`` where quantity is
    ``s1``, ``s2`` or ``sum``; OMA schemes only carry ``sum``.
    """
    rhos = [float(r) for r in np.atleast_1d(rhos)]
    if oma_combiner not in OMA_COMBINERS:
        raise ValueError(f"unknown OMA combiner {oma_combiner!r}")
    keys = _rate_keys()
    a1, a2 = cfg.a1, cfg.a2

    def block(rng, n):
        real = draw_realization(cfg, rng, n)
        out = {}
        for rho in rhos:
            for scheme, comb in ((Scheme.NOMA_SC, Combiner.SC), (Scheme.NOMA_MRC, Combiner.MRC)):
                sr, sd, rd = real.gains(comb)
                x = np.minimum(sr, sd)
                c1 = 0.5 * np.log2(1.0 + a1 * rho * x / (1.0 + a2 * rho * x))
                c2 = 0.5 * np.log2(1.0 + rho * np.minimum(a2 * sr, rd))
                out[(scheme, "s1", rho)] = _moments(c1)
                out[(scheme, "s2", rho)] = _moments(c2)
                out[(scheme, "sum", rho)] = _moments(c1 + c2)
            for scheme, comb in ((Scheme.OMA_SC, Combiner.SC), (Scheme.OMA_MRC, Combiner.MRC)):
                c = 0.5 * np.log2(1.0 + rho * real.oma_statistic(comb, oma_combiner))
                out[(scheme, "sum", rho)] = _moments(c)
        return out

    partials = _run_blocks(block, trials, seed, workers)
    return {
        key: [_estimate((p[(key[0], key[1], rho)] for p in partials), trials, seed) for rho in rhos]
        for key in keys
    }


def mc_rate(
    cfg: SystemConfig,
    rho: float,
    scheme: Scheme | str,
    trials: int,
    seed: int,
    quantity: str = "sum",
    oma_combiner: str = OMA_MRC_ACROSS_SLOTS,
    workers: int | None = None,
) -> McEstimate:
    scheme = Scheme(scheme)
    if scheme in (Scheme.OMA_SC, Scheme.OMA_MRC) and quantity == "s2":
        return McEstimate(0.0, 0.0, trials, seed)
    if scheme in (Scheme.OMA_SC, Scheme.OMA_MRC) and quantity == "s1":
        quantity = "sum"
    return mc_rates(cfg, [rho], trials, seed, oma_combiner, workers)[(scheme, quantity)][0]


@dataclass(frozen=True)
class McOutage:
    s1: McEstimate
    s2: McEstimate
    s2_collapsed: McEstimate  # same draws, counted with the single max-threshold formula


def _bernoulli(count: int, trials: int, seed: int) -> McEstimate:
    return _estimate([(float(count), float(count))], trials, seed)


def mc_outage_sweep(
    cfg: SystemConfig,
    rhos: Sequence[float],
    combiner: Combiner | str,
    trials: int,
    seed: int,
    workers: int | None = None,
) -> list[McOutage]:
    """Outage frequencies obtained by simulating the decode chain.

    s1 is lost if the relay or the destination cannot decode it (instantaneous
    SINR below ``2^{2 R1} - 1``, i.e. rate below R1).  s2 is lost in one of three disjoint events: the relay
    fails s1; the relay decodes s1 but not s2 after SIC; the relay decodes
    both but the relay-destination hop cannot carry s2.
    """
    combiner = Combiner.parse(combiner)
    rhos = [float(r) for r in np.atleast_1d(rhos)]
    a1, a2 = cfg.a1, cfg.a2
    # rate >= R  <=>  (SI)NR >= 2^{2R} - 1
    eps1, eps2 = cfg.eps1, cfg.eps2
    consts = [derive_constants(cfg, rho) for rho in rhos]

    def block(rng, n):
        sr, sd, rd = draw_realization(cfg, rng, n).gains(combiner)
        out = []
        for rho, dc in zip(rhos, consts):
            relay_s1 = a1 * rho * sr / (1.0 + a2 * rho * sr) >= eps1
            dest_s1 = a1 * rho * sd / (1.0 + a2 * rho * sd) >= eps1
            relay_s2 = a2 * rho * sr >= eps2
            dest_s2 = rho * rd >= eps2
            out1 = ~(relay_s1 & dest_s1)
            ev_i = ~relay_s1
            ev_ii = relay_s1 & ~relay_s2
            ev_iii = relay_s1 & relay_s2 & ~dest_s2
            out2 = ev_i | ev_ii | ev_iii
            if dc.feasible:
                collapsed = (sr < dc.theta) | (rd < dc.rd_threshold)
                n_col = int(np.count_nonzero(collapsed))
            else:
                n_col = n
            out.append((int(np.count_nonzero(out1)), int(np.count_nonzero(out2)), n_col))
        return out

    partials = _run_blocks(block, trials, seed, workers)
    results = []
    for idx in range(len(rhos)):
        c1 = sum(p[idx][0] for p in partials)
        c2 = sum(p[idx][1] for p in partials)
        cc = sum(p[idx][2] for p in partials)
        results.append(McOutage(_bernoulli(c1, trials, seed), _bernoulli(c2, trials, seed), _bernoulli(cc, trials, seed)))
    return results


def mc_outage(
    cfg: SystemConfig,
    rho: float,
    combiner: Combiner | str,
    trials: int,
    seed: int,
    workers: int | None = None,
) -> tuple[McEstimate, McEstimate]:
    res = mc_outage_sweep(cfg, [rho], combiner, trials, seed, workers)[0]
    return res.s1, res.s2
