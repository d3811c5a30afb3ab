"""Acceptance gate: one pass/fail line per criterion, printed in the pytest summary."""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

import acceptance_log
from crs_noma import outage, rates, specfun
from crs_noma.model import Combiner, SnrGrid, reference_config
from crs_noma.oracle import mc_outage_sweep, mc_rates, quad_rate
from crs_noma.rates import Scheme
from crs_noma.validation import outage_checks, rate_checks
from oracles import exp_scaled_expint_quad, lower_gamma_regularized_quad, upper_gamma_quad

RATE_CONFIGS = [(1, 1), (2, 2), (4, 4)]
RATE_GRID = SnrGrid.from_range_db(0, 40, 5)
SLOPE_CONFIGS = [(1, 1), (1, 2), (2, 2), (2, 4), (4, 4)]
COMBINERS = (Combiner.SC, Combiner.MRC)


def record(n, ok, detail):
    acceptance_log.LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
    assert ok, detail


def test_criterion_1_rate_triple_agreement():
    t0 = time.perf_counter()
    checks = rate_checks(reference_config(), RATE_CONFIGS, tuple(RATE_GRID.db), trials=10**6, seed=0, with_oma=False)
    elapsed = time.perf_counter() - t0
    quad = [c for c in checks if c.check == "closed-vs-quadrature"]
    mc = [c for c in checks if c.check == "closed-vs-montecarlo"]
    assert len(quad) == len(mc) == 3 * 9 * 4
    worst_q = max(c.value for c in quad)
    worst_z = max(c.value for c in mc)
    ok = worst_q <= 1e-6 and worst_z <= 4.0 and elapsed < 60.0
    record(1, ok, f"max |closed-quad| = {worst_q:.2e} (<= 1e-6), max MC z = {worst_z:.2f} (<= 4) "
                  f"at 1e6 trials, grid time {elapsed:.1f} s (< 60 s)")


def test_criterion_2_single_antenna_collapse():
    cfg = reference_config()
    worst = max(abs(rates.rate_sum_sc(cfg, r).c_sum - rates.rate_sum_mrc(cfg, r).c_sum) for r in RATE_GRID.points)
    record(2, worst <= 1e-12, f"max |sum SC - sum MRC| at (1,1) = {worst:.1e} (<= 1e-12)")


def _oma(cfg, rho, comb):
    return quad_rate(cfg, rho, "oma_sc" if comb is Combiner.SC else "oma_mrc")


def test_criterion_3_noma_oma_ordering_at_extremes():
    hi, lo = 1e4, 1.0
    gaps_hi = []
    for n_r, n_d in RATE_CONFIGS:
        cfg = reference_config(n_r, n_d)
        for comb in COMBINERS:
            gaps_hi.append(rates.rate_sum(cfg, hi, comb).c_sum - _oma(cfg, hi, comb))
    cfg = reference_config()
    gaps_lo = [_oma(cfg, lo, comb) - rates.rate_sum(cfg, lo, comb).c_sum for comb in COMBINERS]
    ok = min(gaps_hi) > 0 and min(gaps_lo) > 0
    record(3, ok, f"40 dB min(NOMA - OMA) = {min(gaps_hi):.3f} > 0 over 6 cases; "
                  f"0 dB (1,1) min(OMA - NOMA) = {min(gaps_lo):.3f} > 0")


def test_criterion_4_high_snr_equivalence():
    rho = 1e4
    d_sc = abs(rates.rate_sum_sc(reference_config(1, 1), rho).c_sum - quad_rate(reference_config(2, 2), rho, "oma_sc"))
    d_mrc = abs(rates.rate_sum_mrc(reference_config(2, 2), rho).c_sum - quad_rate(reference_config(4, 4), rho, "oma_mrc"))
    ok = d_sc <= 0.05 and d_mrc <= 0.05
    record(4, ok, f"|NOMA-SC(1,1) - OMA-SC(2,2)| = {d_sc:.3f}, |NOMA-MRC(2,2) - OMA-MRC(4,4)| = {d_mrc:.3f} "
                  "at 40 dB (<= 0.05)")


def test_criterion_5_outage_against_mc():
    checks = outage_checks(reference_config(), ((1, 1), (2, 2), (2, 4)), (10.0, 20.0, 30.0), trials=10**7, seed=0)
    assert len(checks) == 3 * 2 * 3 * 2
    worst = max(checks, key=lambda c: c.value)
    record(5, worst.value <= 4.0,
           f"max binomial z = {worst.value:.2f} (<= 4) at 1e7 trials over 36 cells "
           f"(worst {worst.quantity} {worst.antennas} {worst.rho_db:g} dB)")


def _slope(cfg, fn, comb):
    rho = SnrGrid.from_range_db(30, 40, 1).points
    return np.polyfit(np.log10(rho), np.log10([fn(cfg, r, comb) for r in rho]), 1)[0]


def test_criterion_6_diversity_order():
    worst = 0.0
    for n_r, n_d in SLOPE_CONFIGS:
        cfg = reference_config(n_r, n_d)
        for comb in COMBINERS:
            for fn in (outage.outage_s1, outage.outage_s2):
                worst = max(worst, abs(_slope(cfg, fn, comb) + min(n_r, n_d)))
    cfg = reference_config(2, 2)
    ratios = []
    for fn, asym in ((outage.outage_s1, outage.diversity_asymptote_s1),
                     (outage.outage_s2, outage.diversity_asymptote_s2)):
        c, d = asym(cfg, "MRC")
        ratios.append(1e6**d * fn(cfg, 1e6, "MRC") / c)
    dev = max(abs(r - 1) for r in ratios)
    ok = worst <= 0.15 and dev <= 0.01
    record(6, ok, f"max |slope + min(Nr,Nd)| = {worst:.3f} (<= 0.15); (2,2) MRC rho^2 p_out / coefficient "
                  f"deviates by {dev:.1e} at rho = 1e6 (<= 1%)")


def test_criterion_7_combiner_dominance():
    grid = SnrGrid.from_range_db(0, 40, 2).points
    slack = 1 + 1e-15  # (1,1): both combiners are the same statistic
    analytic_ok = True
    for n_r, n_d in SLOPE_CONFIGS:
        cfg = reference_config(n_r, n_d)
        for rho in grid:
            analytic_ok &= outage.outage_s1(cfg, rho, "MRC") <= outage.outage_s1(cfg, rho, "SC") * slack
            analytic_ok &= outage.outage_s2(cfg, rho, "MRC") <= outage.outage_s2(cfg, rho, "SC") * slack
            analytic_ok &= rates.rate_s1_mrc(cfg, rho) * slack >= rates.rate_s1_sc(cfg, rho)
            analytic_ok &= rates.rate_s2_mrc(cfg, rho) * slack >= rates.rate_s2_sc(cfg, rho)
    mc_ok = True
    mc_grid = SnrGrid.from_range_db(0, 40, 10).points
    for n_r, n_d in SLOPE_CONFIGS:
        cfg = reference_config(n_r, n_d)
        mc = mc_rates(cfg, mc_grid, 10**5, seed=1)
        for i in range(len(mc_grid)):
            for q in ("s1", "s2", "sum"):
                mc_ok &= mc[(Scheme.NOMA_MRC, q)][i].mean >= mc[(Scheme.NOMA_SC, q)][i].mean
            mc_ok &= mc[(Scheme.OMA_MRC, "sum")][i].mean >= mc[(Scheme.OMA_SC, "sum")][i].mean
        sc = mc_outage_sweep(cfg, mc_grid, "SC", 10**5, seed=1)
        mrc = mc_outage_sweep(cfg, mc_grid, "MRC", 10**5, seed=1)
        for a, b in zip(sc, mrc):
            mc_ok &= b.s1.mean <= a.s1.mean and b.s2.mean <= a.s2.mean
    record(7, bool(analytic_ok and mc_ok),
           f"MRC <= SC outage and MRC >= SC rate: analytic over 5 configs x 21 SNRs {'ok' if analytic_ok else 'VIOLATED'}, "
           f"paired MC draws {'ok' if mc_ok else 'VIOLATED'}")


def test_criterion_8_special_functions():
    xs = np.logspace(-6, 2, 25)
    worst = 0.0
    for x in xs:
        for n in range(7):
            worst = max(worst, abs(specfun.upper_gamma_neg_int(n, x) / upper_gamma_quad(-float(n), x) - 1))
            k = n + 1
            ref = lower_gamma_regularized_quad(k, x)
            if ref > 1e-290:
                worst = max(worst, abs(specfun.regularized_lower_gamma(k, x) / ref - 1))
        worst = max(worst, abs(specfun.upper_gamma_zero(x) / upper_gamma_quad(0.0, x) - 1))
        worst = max(worst, abs(specfun.exp_scaled_upper_gamma_zero(x) / exp_scaled_expint_quad(1, x) - 1))
    scaled = [specfun.exp_scaled_upper_gamma_zero(1e3)] + [specfun.exp_scaled_upper_gamma_neg_int(n, 1e3) for n in range(7)]
    refs = [exp_scaled_expint_quad(1, 1e3)] + [1e3 ** (-n) * exp_scaled_expint_quad(n + 1, 1e3) for n in range(7)]
    worst_scaled = max(abs(a / b - 1) for a, b in zip(scaled, refs))
    ok = worst <= 1e-9 and worst_scaled <= 1e-9 and all(math.isfinite(v) and v > 0 for v in scaled)
    record(8, ok, f"max relative error vs quadrature = {worst:.1e} on x in [1e-6, 1e2], n = 0..6; "
                  f"exp-scaled at x = 1e3: {worst_scaled:.1e} (<= 1e-9)")


def _fig3(workers):
    cmd = [sys.executable, "-m", "crs_noma.cli", "--preset", "paper-fig3", "--seed", "42", "--workers", str(workers)]
    return subprocess.run(cmd, capture_output=True, check=True).stdout


@pytest.mark.slow
def test_criterion_9_determinism_across_workers():
    one, eight = _fig3(1), _fig3(8)
    ok = one == eight and len(one.splitlines()) > 1
    record(9, ok, f"paper-fig3 --seed 42: workers 1 vs 8 byte-identical = {one == eight} "
                  f"({len(one.splitlines())} lines, {len(one)} bytes)")
