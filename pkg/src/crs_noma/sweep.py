"""SNR / antenna sweeps over the closed-form, quadrature and Monte Carlo engines."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from . import outage, rates
from .model import Combiner, SnrGrid, SystemConfig, reference_config
from .oracle import montecarlo, quadrature
from .rates import Scheme
from .results import SweepRow

CLOSED_FORM = "closed-form"
QUADRATURE = "quadrature"
MONTE_CARLO = "monte-carlo"
METHOD_ALIASES = {
    "analytic": CLOSED_FORM,
    "closed-form": CLOSED_FORM,
    "quadrature": QUADRATURE,
    "quad": QUADRATURE,
    "mc": MONTE_CARLO,
    "monte-carlo": MONTE_CARLO,
}

DEFAULT_RATE_TRIALS = 10**6
DEFAULT_OUTAGE_TRIALS = 10**7


@dataclass(frozen=True)
class SweepSpec:
    cfg: SystemConfig = field(default_factory=reference_config)
    antennas: tuple[tuple[int, int], ...] = ((1, 1),)
    snr_db: tuple[float, ...] = tuple(float(x) for x in range(0, 41, 5))
    combiners: tuple[Combiner, ...] = (Combiner.SC, Combiner.MRC)
    schemes: tuple[str, ...] = ("NOMA", "OMA")
    quantities: tuple[str, ...] = ("rate", "outage")
    methods: tuple[str, ...] = (CLOSED_FORM,)
    rate_trials: int = DEFAULT_RATE_TRIALS
    outage_trials: int = DEFAULT_OUTAGE_TRIALS
    seed: int = 0
    oma_combiner: str = montecarlo.OMA_MRC_ACROSS_SLOTS
    workers: int | None = None


_FIG_RATE_ANTENNAS = ((1, 1), (2, 2), (4, 4))
_FIG_OUTAGE_ANTENNAS = ((1, 1), (1, 2), (2, 2), (2, 4), (4, 4))
_FIG_GRID = tuple(float(x) for x in range(0, 41, 2))

PRESETS: dict[str, SweepSpec] = {
    "paper-fig2a": SweepSpec(
        antennas=_FIG_RATE_ANTENNAS, snr_db=_FIG_GRID, combiners=(Combiner.SC,),
        quantities=("rate",), methods=(CLOSED_FORM, MONTE_CARLO),
    ),
    "paper-fig2b": SweepSpec(
        antennas=_FIG_RATE_ANTENNAS, snr_db=_FIG_GRID, combiners=(Combiner.MRC,),
        quantities=("rate",), methods=(CLOSED_FORM, MONTE_CARLO),
    ),
    "paper-fig3": SweepSpec(
        antennas=_FIG_OUTAGE_ANTENNAS, snr_db=_FIG_GRID, combiners=(Combiner.SC,), schemes=("NOMA",),
        quantities=("outage",), methods=(CLOSED_FORM, MONTE_CARLO),
    ),
    "paper-fig4": SweepSpec(
        antennas=_FIG_OUTAGE_ANTENNAS, snr_db=_FIG_GRID, combiners=(Combiner.MRC,), schemes=("NOMA",),
        quantities=("outage",), methods=(CLOSED_FORM, MONTE_CARLO),
    ),
}


def parse_methods(text: str) -> tuple[str, ...]:
    out = []
    for item in text.split(","):
        item = item.strip().lower()
        if not item:
            continue
        if item not in METHOD_ALIASES:
            raise ValueError(f"unknown method {item!r}; choose from analytic, quadrature, mc")
        if METHOD_ALIASES[item] not in out:
            out.append(METHOD_ALIASES[item])
    if not out:
        raise ValueError("no methods selected")
    return tuple(out)


def parse_antennas(text: str) -> tuple[tuple[int, int], ...]:
    """``"1x1,2x2"`` -> ``((1, 1), (2, 2))``."""
    out = []
    for item in text.split(","):
        item = item.strip().lower()
        if not item:
            continue
        try:
            n_r, n_d = (int(v) for v in item.split("x"))
        except ValueError:
            raise ValueError(f"bad antenna pair {item!r}; expected NrxNd such as 2x4") from None
        out.append((n_r, n_d))
    if not out:
        raise ValueError("no antenna configurations given")
    return tuple(out)


def parse_snr_range(text: str) -> tuple[float, ...]:
    """``"START:STOP:STEP"`` in dB, stop inclusive."""
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise ValueError(f"bad SNR range {text!r}; expected START:STOP:STEP") from None
    return tuple(float(v) for v in SnrGrid.from_range_db(start, stop, step).db)


def _row(scheme, combiner, cfg, rho_db, method, **values) -> SweepRow:
    return SweepRow(scheme, combiner.value, cfg.n_r, cfg.n_d, float(rho_db), method, **values)


def _map(fn, items, workers):
    n = montecarlo.worker_count(workers)
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _closed_rows(spec, cfg, combiner, grid):
    rows = []
    for rho_db, rho in zip(grid.db, grid.points):
        values = {}
        if "rate" in spec.quantities:
            r = rates.rate_sum(cfg, rho, combiner)
            values.update(c_s1=r.c_s1, c_s2=r.c_s2, c_sum=r.c_sum)
        if "outage" in spec.quantities:
            values.update(
                p_out_s1=outage.outage_s1(cfg, rho, combiner),
                p_out_s2=outage.outage_s2(cfg, rho, combiner),
            )
        rows.append(_row("NOMA", combiner, cfg, rho_db, CLOSED_FORM, **values))
    return rows


def _quad_rows(spec, cfg, combiner, scheme, grid):
    if "rate" not in spec.quantities:
        return []
    tag = combiner.value.lower()
    if scheme == "NOMA":
        def point(rho):
            c1 = quadrature.quad_rate(cfg, rho, f"s1_{tag}")
            c2 = quadrature.quad_rate(cfg, rho, f"s2_{tag}")
            return dict(c_s1=c1, c_s2=c2, c_sum=c1 + c2)
    else:
        def point(rho):
            c = quadrature.quad_rate(cfg, rho, f"oma_{tag}", spec.oma_combiner)
            return dict(c_s1=c, c_s2=0.0, c_sum=c)
    values = _map(point, list(grid.points), spec.workers)
    return [_row(scheme, combiner, cfg, d, QUADRATURE, **v) for d, v in zip(grid.db, values)]


def _mc_rows(spec, cfg, combiner, scheme, grid, cache):
    rows = []
    rate_key = ("rate", cfg.n_r, cfg.n_d)
    if "rate" in spec.quantities and rate_key not in cache:
        cache[rate_key] = montecarlo.mc_rates(
            cfg, grid.points, spec.rate_trials, spec.seed, spec.oma_combiner, spec.workers
        )
    outage_key = ("outage", cfg.n_r, cfg.n_d, combiner)
    if scheme == "NOMA" and "outage" in spec.quantities and outage_key not in cache:
        cache[outage_key] = montecarlo.mc_outage_sweep(
            cfg, grid.points, combiner, spec.outage_trials, spec.seed, spec.workers
        )
    sch = Scheme(f"{scheme}-{combiner.value}")
    for i, rho_db in enumerate(grid.db):
        values = {}
        trials = None
        if "rate" in spec.quantities:
            mc = cache[rate_key]
            if scheme == "NOMA":
                e1, e2, es = mc[(sch, "s1")][i], mc[(sch, "s2")][i], mc[(sch, "sum")][i]
                values.update(c_s1=e1.mean, c_s2=e2.mean, c_sum=es.mean,
                              se_c_s1=e1.std_error, se_c_s2=e2.std_error, se_c_sum=es.std_error)
            else:
                es = mc[(sch, "sum")][i]
                values.update(c_s1=es.mean, c_s2=0.0, c_sum=es.mean,
                              se_c_s1=es.std_error, se_c_s2=0.0, se_c_sum=es.std_error)
            trials = spec.rate_trials
        if outage_key in cache:
            o = cache[outage_key][i]
            values.update(p_out_s1=o.s1.mean, p_out_s2=o.s2.mean,
                          se_p_out_s1=o.s1.std_error, se_p_out_s2=o.s2.std_error)
            trials = spec.outage_trials if trials is None else trials
        if values:
            rows.append(_row(scheme, combiner, cfg, rho_db, MONTE_CARLO, seed=spec.seed, trials=trials, **values))
    return rows


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """Evaluate every (antennas, combiner, scheme, method, SNR) cell, in that nesting order.

    OMA has no closed form, so OMA rows only come from quadrature and Monte
    Carlo.  When a run mixes rate and outage quantities with Monte Carlo, the
    ``trials`` column reports the rate trial count.
    """
    grid = SnrGrid.from_db(spec.snr_db)
    rows: list[SweepRow] = []
    for n_r, n_d in spec.antennas:
        cfg = spec.cfg.with_antennas(n_r, n_d)
        cache: dict = {}
        for combiner in spec.combiners:
            for scheme in spec.schemes:
                for method in spec.methods:
                    if method == CLOSED_FORM and scheme == "NOMA":
                        rows += _closed_rows(spec, cfg, combiner, grid)
                    elif method == QUADRATURE:
                        rows += _quad_rows(spec, cfg, combiner, scheme, grid)
                    elif method == MONTE_CARLO:
                        rows += _mc_rows(spec, cfg, combiner, scheme, grid, cache)
    return rows


def with_overrides(spec: SweepSpec, **changes) -> SweepSpec:
    return replace(spec, **{k: v for k, v in changes.items() if v is not None})
