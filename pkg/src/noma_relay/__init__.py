"""Link-level simulator for two-hop NOMA cooperative relay networks.

Superposition coding and SIC rate computation, six two-phase relay
architectures under DF/AF, OMA baselines, power-allocation optimizers for
instantaneous/statistical/hybrid CSI, and a seeded Monte Carlo metrics engine
with a config-driven CLI.
"""

from .allocation import (
    OptimizerConfig,
    PowerAllocation,
    StatisticalBudget,
    fixed_allocation,
    hcsi_allocate,
    icsi_optimize,
    maximize_on_grid,
    power_trim,
    scsi_optimize,
)
from .channel import (
    NOMA_FAVORABLE_THRESHOLD,
    ChannelRealization,
    LinkStats,
    RngStream,
    degree_of_asymmetry,
    hop_asymmetry,
    relay_asymmetry,
    sample_gain,
    sample_gains,
    sample_realization,
    sample_realization_block,
)
from .config import (
    ExperimentConfig,
    SchemeConfig,
    SettingConfig,
    build_plans,
    dump_config,
    load_config,
    parse_config,
)
from .errors import ConfigError, InfeasibleAllocation, StructuralError
from .metrics import (
    GapRow,
    MetricsSummary,
    SweepRow,
    TrialPlan,
    compare_gap,
    run_trials,
    sweep,
)
from .presets import load_preset, preset_names
from .scenarios import (
    BASELINES,
    KINDS,
    PROTOCOLS,
    RateReport,
    ScenarioSpec,
    ValidationIssue,
    ValidationResult,
    baseline_sinrs,
    default_decoding_plans,
    end_to_end_sinrs,
    evaluate,
    make_scenario,
    maxmin_select,
    validate,
)
from .sic import (
    HopRate,
    SignalComponent,
    af_end_to_end,
    df_compose,
    rate_from_sinr,
    sic_sinr_chain,
)

__version__ = "0.1.0"
