"""Monte Carlo layer: summaries, common random numbers, sweeps, reproducibility."""

import dataclasses
import math

import numpy as np
import pytest

from noma_relay import (
    ChannelRealization,
    OptimizerConfig,
    StatisticalBudget,
    StructuralError,
    TrialPlan,
    compare_gap,
    evaluate,
    fixed_allocation,
    make_scenario,
    run_trials,
    scsi_optimize,
    sweep,
)
from noma_relay.channel import sample_realization_block

DIAMOND_VARS = {"SR1": 1.0, "SR2": 10.0, "R1U": 9.0, "R2U": 2.0}
XNET_VARS = {"S1R": 9.0, "S2R": 3.0, "RU1": 2.0, "RU2": 10.0}


def diamond_plan(**kw):
    args = dict(
        spec=make_scenario("diamond", DIAMOND_VARS),
        strategy="fixed",
        snr_db=10.0,
        trials=200,
        master_seed=2024,
        coefficients=(0.8, 0.2),
    )
    args.update(kw)
    return TrialPlan(**args)


def test_plan_validation():
    with pytest.raises(StructuralError):
        diamond_plan(strategy="magic")
    with pytest.raises(StructuralError):
        diamond_plan(trials=0)
    with pytest.raises(StructuralError):
        diamond_plan(strategy="fixed", coefficients=())
    with pytest.raises(StructuralError):
        diamond_plan(strategy="oma_baseline")  # needs a baseline spec
    with pytest.raises(StructuralError):
        diamond_plan(spec=make_scenario("diamond", DIAMOND_VARS, baseline="tdma"))
    with pytest.raises(StructuralError):
        diamond_plan(outage_targets={"x1": -1.0})


def test_plan_budget_and_name():
    plan = diamond_plan(snr_db=20.0)
    assert plan.budget() == pytest.approx(100.0)
    assert plan.name == "fixed"
    assert diamond_plan(label="NOMA-2").name == "NOMA-2"
    oma = diamond_plan(
        spec=make_scenario("diamond", DIAMOND_VARS, baseline="maxmin_oma"),
        strategy="oma_baseline",
        coefficients=(),
    )
    assert oma.name == "maxmin_oma"


def test_single_trial_mean_gains_matches_evaluate():
    plan = diamond_plan(trials=1, mean_gains=True, snr_db=10.0)
    summary = run_trials(plan)
    spec = make_scenario("diamond", DIAMOND_VARS, phase_budget=10.0)
    report = evaluate(spec, ChannelRealization(dict(DIAMOND_VARS)), fixed_allocation(spec, (0.8, 0.2)))
    assert summary.ergodic_sum_rate == pytest.approx(report.sum_rate, rel=1e-12)
    assert summary.sum_rate_ci == 0.0
    assert summary.trials_used == 1
    assert summary.mean_consumed_power == pytest.approx(report.consumed_power, rel=1e-12)
    assert summary.normalized_power_utilization == pytest.approx(1.0, rel=1e-12)


def test_run_trials_is_repeatable():
    a = run_trials(diamond_plan())
    b = run_trials(diamond_plan())
    assert a == b


def test_gains_block_injection_matches_internal_sampling():
    plan = diamond_plan(trials=300)
    block = sample_realization_block(plan.spec.links, plan.master_seed, np.arange(300))
    assert run_trials(plan, gains_block=block) == run_trials(plan)


def test_threads_do_not_change_results():
    fixed = diamond_plan(trials=20000)
    assert run_trials(fixed, threads=4) == run_trials(fixed, threads=1)
    icsi = diamond_plan(strategy="icsi", coefficients=(), trials=130)
    assert run_trials(icsi, threads=3) == run_trials(icsi, threads=1)


def test_outage_extremes_and_system_outage():
    zero = run_trials(diamond_plan(outage_targets={"x1": 0.0, "x2": 0.0}))
    assert zero.outage_per_symbol == {"x1": 0.0, "x2": 0.0}
    assert zero.system_outage == 0.0
    huge = run_trials(diamond_plan(outage_targets={"x1": 1e6, "x2": 1e6}))
    assert huge.outage_per_symbol == {"x1": 1.0, "x2": 1.0}
    assert huge.system_outage == 1.0
    mid = run_trials(diamond_plan(snr_db=5.0))
    assert mid.system_outage >= max(mid.outage_per_symbol.values())


def test_untrimmed_full_budget_has_unit_npu():
    assert run_trials(diamond_plan()).normalized_power_utilization == pytest.approx(1.0)
    fdma = diamond_plan(
        spec=make_scenario("diamond", DIAMOND_VARS, baseline="fdma"),
        strategy="oma_baseline",
        coefficients=(),
    )
    assert run_trials(fdma).normalized_power_utilization == pytest.approx(1.0)


def test_trim_defaults_per_strategy():
    icsi = diamond_plan(strategy="icsi", coefficients=(), trials=300, snr_db=20.0)
    trimmed = run_trials(icsi)
    untrimmed = run_trials(dataclasses.replace(icsi, trim=False))
    assert trimmed.normalized_power_utilization < 1.0
    assert untrimmed.normalized_power_utilization == pytest.approx(1.0)
    # rates are preserved by the trim
    assert trimmed.ergodic_sum_rate == pytest.approx(untrimmed.ergodic_sum_rate, rel=1e-9)
    # energy efficiency is the ratio of means, so trimming can only help
    assert trimmed.energy_efficiency > untrimmed.energy_efficiency


def test_infeasible_trials_zeroed_and_counted():
    plan = diamond_plan(
        strategy="icsi",
        coefficients=(),
        trials=64,
        optimizer=OptimizerConfig(min_rate_floor=50.0),
    )
    summary = run_trials(plan)
    assert summary.infeasible_trials == 64
    assert summary.ergodic_sum_rate == 0.0
    assert summary.energy_efficiency == 0.0
    assert summary.system_outage == 1.0


def test_ci_shrinks_with_sample_size():
    small = run_trials(diamond_plan(trials=10000))
    big = run_trials(diamond_plan(trials=40000))
    ratio = small.sum_rate_ci / big.sum_rate_ci
    assert 1.6 <= ratio <= 2.4


def test_stage1_injection_matches_plan_default():
    plan = diamond_plan(
        strategy="scsi",
        coefficients=(),
        trials=100,
        statistics=StatisticalBudget(64, 7),
    )
    spec = dataclasses.replace(plan.spec, phase_budget=plan.budget())
    stage1 = scsi_optimize(spec, StatisticalBudget(64, 7), plan.optimizer)
    assert run_trials(plan, stage1=stage1) == run_trials(plan)


def test_sweep_rows_and_fdma_ratio():
    noma = diamond_plan(label="NOMA", trials=400)
    fdma = diamond_plan(
        spec=make_scenario("diamond", DIAMOND_VARS, baseline="fdma"),
        strategy="oma_baseline",
        coefficients=(),
        label="FDMA",
        trials=400,
    )
    rows = sweep([noma, fdma], [0.0, 10.0, 20.0])
    assert [(r.label, r.snr_db) for r in rows[:2]] == [("NOMA", 0.0), ("FDMA", 0.0)]
    assert len(rows) == 6
    for row in rows:
        if row.label == "FDMA":
            assert row.summary.ee_ratio_vs_fdma == 1.0
        else:
            expected = row.summary.energy_efficiency
            fdma_row = next(
                r for r in rows if r.label == "FDMA" and r.snr_db == row.snr_db
            )
            assert row.summary.ee_ratio_vs_fdma == pytest.approx(
                expected / fdma_row.summary.energy_efficiency
            )
    # per-label sum rates ride up with SNR
    for label in ("NOMA", "FDMA"):
        series = [r.summary.ergodic_sum_rate for r in rows if r.label == label]
        assert series == sorted(series)


def test_sweep_without_fdma_leaves_ratio_unset():
    rows = sweep([diamond_plan(trials=50)], [10.0])
    assert rows[0].summary.ee_ratio_vs_fdma is None


def test_sweep_rejects_empty_inputs():
    with pytest.raises(StructuralError, match="nothing to compare"):
        sweep([], [10.0])
    with pytest.raises(StructuralError, match="empty snr grid"):
        sweep([diamond_plan()], [])


def test_sweep_shares_gains_between_plans():
    # identical spec/protocol under two labels: with common random numbers the
    # summaries must agree bit for bit
    rows = sweep([diamond_plan(label="A"), diamond_plan(label="B")], [15.0])
    assert rows[0].summary == rows[1].summary


def test_compare_gap():
    rows_a = sweep([diamond_plan(label="A", trials=300)], [0.0, 10.0])
    rows_b = sweep([diamond_plan(label="B", trials=300)], [0.0, 10.0])
    gaps = compare_gap(rows_a, rows_b)
    assert all(g.gap == 0.0 for g in gaps)
    assert gaps[0].gap_ci == pytest.approx(math.hypot(rows_a[0].summary.sum_rate_ci, rows_b[0].summary.sum_rate_ci))
    with pytest.raises(StructuralError):
        compare_gap(rows_a, rows_b[:1])
    shifted = [dataclasses.replace(r, snr_db=r.snr_db + 1) for r in rows_b]
    with pytest.raises(StructuralError):
        compare_gap(rows_a, shifted)


def test_df_outage_no_worse_than_af():
    vars_ = {"SR": 8.0, "RU1": 2.0, "RU2": 10.0}
    common = dict(
        strategy="fixed",
        snr_db=10.0,
        trials=10000,
        master_seed=99,
        coefficients=(0.6875, 0.3125),
    )
    df = TrialPlan(spec=make_scenario("downlink_relay", vars_, protocol="DF"), **common)
    af = TrialPlan(spec=make_scenario("downlink_relay", vars_, protocol="AF"), **common)
    rows = sweep([df, af], [10.0])
    assert rows[0].summary.system_outage <= rows[1].summary.system_outage
