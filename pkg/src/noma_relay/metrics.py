"""Seeded Monte Carlo metrics: ergodic rates, outage, energy efficiency, utilization.

Trial t always draws its fading realization from substream t of the plan's
master seed, so two plans with the same seed consume identical channels
(common random numbers) regardless of strategy, SNR point, chunking, or worker
count.  Results are accumulated into per-trial arrays indexed by trial number
and reduced in a fixed order, which keeps every summary bit-identical across
thread counts.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .allocation import (
    OptimizerConfig,
    PowerAllocation,
    StatisticalBudget,
    fixed_allocation,
    hcsi_allocate_block,
    icsi_optimize_block,
    power_trim_block,
    scsi_optimize,
)
from .channel import sample_realization_block
from .errors import StructuralError
from .scenarios import SYMBOLS, ScenarioSpec, baseline_sinrs, end_to_end_sinrs
from .sic import rate_from_sinr

__all__ = [
    "STRATEGIES",
    "TrialPlan",
    "MetricsSummary",
    "SweepRow",
    "GapRow",
    "run_trials",
    "sweep",
    "compare_gap",
]

STRATEGIES = ("fixed", "icsi", "scsi", "hcsi", "oma_baseline")

# Trials per vectorized slice.  Fixed per strategy (never tuned at runtime) so
# that the slice boundaries, and hence every intermediate float, are identical
# on every machine and worker count.  ICSI slices stay small because each one
# materializes (slice, grid, grid) arrays.
_CHUNK = {"fixed": 8192, "scsi": 8192, "oma_baseline": 8192, "hcsi": 1024, "icsi": 64}

# Strategies that trim by default: the CSI-adaptive ones, where the saving is
# the point of the exercise.  Statistical and fixed schemes keep full power
# unless explicitly asked.
_TRIM_DEFAULT = {"fixed": False, "icsi": True, "scsi": False, "hcsi": True, "oma_baseline": False}

_Z95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class TrialPlan:
    """One Monte Carlo run: a spec, a strategy, an SNR point, and seeding.

    ``snr_db`` fixes the per-phase budget as noise * 10^(snr/10); the spec's
    own phase_budget is ignored.  ``trim`` of None means the strategy default.
    ``outage_targets`` fills missing symbols with 1 bit/s/Hz.  ``mean_gains``
    replaces every draw with the link variances (a deterministic testing hook).
    """

    spec: ScenarioSpec
    strategy: str
    snr_db: float
    trials: int
    master_seed: int
    label: str = ""
    outage_targets: Mapping[str, float] = field(default_factory=dict)
    coefficients: tuple = ()
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    statistics: StatisticalBudget | None = None
    trim: bool | None = None
    mean_gains: bool = False

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise StructuralError(f"unknown strategy {self.strategy!r}")
        if self.trials < 1:
            raise StructuralError("trials must be at least 1")
        if self.strategy == "oma_baseline":
            if self.spec.baseline == "none":
                raise StructuralError("oma_baseline strategy needs a spec with a baseline scheme")
        elif self.spec.baseline != "none":
            raise StructuralError(f"strategy {self.strategy!r} requires baseline 'none'")
        if self.strategy == "fixed" and not self.coefficients:
            raise StructuralError("fixed strategy requires coefficients")
        for sym, target in self.outage_targets.items():
            if target < 0:
                raise StructuralError(f"outage target for {sym} must be nonnegative")

    @property
    def name(self) -> str:
        return self.label or (self.spec.baseline if self.strategy == "oma_baseline" else self.strategy)

    def budget(self) -> float:
        return self.spec.noise_power * 10.0 ** (self.snr_db / 10.0)

    def wants_trim(self) -> bool:
        return _TRIM_DEFAULT[self.strategy] if self.trim is None else bool(self.trim)

    def stat_budget(self) -> StatisticalBudget:
        # deterministic default derived from the master seed
        return self.statistics or StatisticalBudget(sample_count=256, seed=self.master_seed + 101)


@dataclass(frozen=True)
class MetricsSummary:
    ergodic_sum_rate: float
    sum_rate_ci: float
    outage_per_symbol: dict[str, float]
    system_outage: float
    energy_efficiency: float
    ee_ratio_vs_fdma: float | None
    normalized_power_utilization: float
    trials_used: int
    mean_consumed_power: float
    infeasible_trials: int


@dataclass(frozen=True)
class SweepRow:
    label: str
    snr_db: float
    summary: MetricsSummary


@dataclass(frozen=True)
class GapRow:
    snr_db: float
    gap: float
    gap_ci: float


def _spec_at(plan: TrialPlan) -> ScenarioSpec:
    return dataclasses.replace(plan.spec, phase_budget=plan.budget())


def _evaluated_symbols(spec: ScenarioSpec) -> tuple[str, ...]:
    return ("x1",) if spec.baseline == "maxmin_oma" else SYMBOLS


def run_trials(
    plan: TrialPlan,
    *,
    threads: int = 1,
    gains_block: Mapping[str, np.ndarray] | None = None,
    stage1: PowerAllocation | None = None,
) -> MetricsSummary:
    """Monte Carlo summary for one plan.

    ``gains_block`` lets a sweep share sampled channels between plans; it must
    hold (trials,) gains per link drawn from the plan's master seed.  For the
    statistical strategies ``stage1`` skips the once-per-plan SAA optimization.
    Infeasible optimizer trials (rate floors unreachable) are scored as zero
    rate and counted, never raised.
    """
    spec = _spec_at(plan)
    T = plan.trials
    syms = _evaluated_symbols(spec)
    rates = {s: np.zeros(T) for s in syms}
    consumed = np.zeros(T)
    infeasible = np.zeros(T, dtype=bool)

    if plan.strategy in ("scsi", "hcsi") and stage1 is None:
        stage1 = scsi_optimize(spec, plan.stat_budget(), plan.optimizer)
    if plan.strategy == "fixed":
        coeffs = plan.coefficients
        if len(coeffs) == 2 and not isinstance(coeffs[0], (Mapping, tuple, list)):
            fixed = fixed_allocation(spec, coeffs)
        else:
            fixed = fixed_allocation(spec, coeffs[0], coeffs[1] if len(coeffs) > 1 else None)
    else:
        fixed = None

    def work(start: int, stop: int) -> None:
        if gains_block is not None:
            gains = {l: np.asarray(gains_block[l][start:stop], dtype=np.float64) for l in gains_block}
        else:
            gains = sample_realization_block(
                spec.links, plan.master_seed, np.arange(start, stop), mean_gains=plan.mean_gains
            )
        n = stop - start
        if plan.strategy == "oma_baseline":
            sinrs, dof, p1, p2 = baseline_sinrs(spec, gains, adaptive_power=plan.wants_trim())
            for s in syms:
                rates[s][start:stop] = rate_from_sinr(sinrs[s], dof)
            consumed[start:stop] = np.broadcast_to(p1 + p2, (n,))
            return
        if plan.strategy == "fixed":
            alloc, feas = fixed, np.ones(n, dtype=bool)
        elif plan.strategy == "scsi":
            alloc, feas = stage1, np.ones(n, dtype=bool)
        elif plan.strategy == "hcsi":
            alloc, feas = hcsi_allocate_block(spec, stage1, gains, plan.optimizer)
        else:
            alloc, feas = icsi_optimize_block(spec, gains, plan.optimizer)
        if plan.wants_trim():
            alloc = power_trim_block(spec, gains, alloc)
        sinrs = end_to_end_sinrs(spec, gains, alloc.phase1, alloc.phase2)
        for s in syms:
            r = rate_from_sinr(sinrs[s], 0.5)
            rates[s][start:stop] = np.where(feas, np.broadcast_to(r, (n,)), 0.0)
        p1, p2 = alloc.phase_totals()
        total = np.broadcast_to(np.asarray(p1, dtype=np.float64) + np.asarray(p2, dtype=np.float64), (n,))
        consumed[start:stop] = np.where(feas, total, 0.0)
        infeasible[start:stop] = ~feas

    chunk = _CHUNK[plan.strategy]
    spans = [(s, min(s + chunk, T)) for s in range(0, T, chunk)]
    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for f in [pool.submit(work, a, b) for a, b in spans]:
                f.result()
    else:
        for a, b in spans:
            work(a, b)

    return _summarize(plan, spec, rates, consumed, infeasible)


def _summarize(plan, spec, rates, consumed, infeasible) -> MetricsSummary:
    T = plan.trials
    sum_rates = sum(rates.values())
    mean_rate = float(np.mean(sum_rates))
    if T > 1:
        ci = float(_Z95 * np.std(sum_rates, ddof=1) / np.sqrt(T))
    else:
        ci = 0.0
    targets = {s: float(plan.outage_targets.get(s, 1.0)) for s in rates}
    below = {s: rates[s] < targets[s] for s in rates}
    outage = {s: float(np.mean(below[s])) for s in rates}
    system = float(np.mean(np.logical_or.reduce(list(below.values()))))
    mean_power = float(np.mean(consumed))
    ee = mean_rate / mean_power if mean_power > 0 else 0.0
    return MetricsSummary(
        ergodic_sum_rate=mean_rate,
        sum_rate_ci=ci,
        outage_per_symbol=outage,
        system_outage=system,
        energy_efficiency=ee,
        ee_ratio_vs_fdma=None,
        normalized_power_utilization=mean_power / (2.0 * spec.phase_budget),
        trials_used=T,
        mean_consumed_power=mean_power,
        infeasible_trials=int(np.count_nonzero(infeasible)),
    )


def _gains_key(plan: TrialPlan):
    links = tuple(sorted((l.link_id, l.variance) for l in plan.spec.links))
    return (plan.master_seed, plan.trials, plan.mean_gains, links)


def sweep(
    plans: Sequence[TrialPlan],
    snr_list: Sequence[float],
    *,
    threads: int = 1,
) -> list[SweepRow]:
    """Run every plan at every SNR with common random numbers.

    Plans sharing (master_seed, trials, links) reuse one sampled gain block, so
    compared schemes see identical channels per trial index.  When an FDMA
    baseline plan is present, each row's ee_ratio_vs_fdma is filled against the
    FDMA summary at the same SNR (FDMA itself gets exactly 1).
    """
    if not plans:
        raise StructuralError("nothing to compare: empty plan list")
    if len(snr_list) == 0:
        raise StructuralError("empty snr grid")
    cache: dict = {}
    for plan in plans:
        key = _gains_key(plan)
        if key not in cache:
            cache[key] = sample_realization_block(
                plan.spec.links, plan.master_seed, np.arange(plan.trials), mean_gains=plan.mean_gains
            )
    rows: list[SweepRow] = []
    for snr in snr_list:
        at_snr: list[tuple[TrialPlan, MetricsSummary]] = []
        for plan in plans:
            run = dataclasses.replace(plan, snr_db=float(snr))
            summary = run_trials(run, threads=threads, gains_block=cache[_gains_key(plan)])
            at_snr.append((plan, summary))
        fdma_ee = None
        for plan, summary in at_snr:
            if plan.strategy == "oma_baseline" and plan.spec.baseline == "fdma":
                fdma_ee = summary.energy_efficiency
                break
        for plan, summary in at_snr:
            if fdma_ee is not None and fdma_ee > 0:
                summary = dataclasses.replace(summary, ee_ratio_vs_fdma=summary.energy_efficiency / fdma_ee)
            rows.append(SweepRow(label=plan.name, snr_db=float(snr), summary=summary))
    return rows


def compare_gap(
    a: Sequence[SweepRow],
    b: Sequence[SweepRow],
) -> list[GapRow]:
    """Per-SNR difference of ergodic sum rates (a minus b) with combined CI."""
    if len(a) != len(b):
        raise StructuralError("gap comparison needs equal-length row lists")
    out = []
    for ra, rb in zip(a, b):
        if ra.snr_db != rb.snr_db:
            raise StructuralError(f"SNR grids differ: {ra.snr_db} vs {rb.snr_db}")
        ga = ra.summary.ergodic_sum_rate - rb.summary.ergodic_sum_rate
        ci = float(np.hypot(ra.summary.sum_rate_ci, rb.summary.sum_rate_ci))
        out.append(GapRow(snr_db=ra.snr_db, gap=ga, gap_ci=ci))
    return out
