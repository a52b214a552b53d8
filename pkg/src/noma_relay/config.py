"""Experiment configuration: TOML files in, TrialPlan lists out.

A config names one scenario kind, one or more channel settings (per-link
variances), and one or more schemes (strategy plus options).  Every
(setting, scheme) pair becomes a TrialPlan; the sweep runs them with common
random numbers.  ``dump_config`` emits TOML that re-parses to an equal config,
which is the round-trip contract behind ``--dump-config``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .allocation import OptimizerConfig, StatisticalBudget
from .errors import ConfigError, StructuralError
from .metrics import STRATEGIES, TrialPlan
from .scenarios import BASELINES, KINDS, PROTOCOLS, make_scenario

__all__ = [
    "SettingConfig",
    "SchemeConfig",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "dump_config",
    "build_plans",
]

_DEFAULT_SNR = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)


@dataclass(frozen=True)
class SettingConfig:
    """One channel setting: a name and per-link variances, plus overrides."""

    name: str
    variances: dict[str, float]
    pairing: tuple[int, int] | None = None
    decoding_plans: tuple[tuple[str, ...], tuple[str, ...]] | None = None


@dataclass(frozen=True)
class SchemeConfig:
    """One scheme: strategy, optional protocol/baseline, fixed coefficients."""

    label: str
    strategy: str
    baseline: str = "none"
    protocol: str | None = None
    coefficients: tuple[float, ...] = ()
    coefficients2: tuple[float, ...] = ()
    trim: bool | None = None
    decoding_plans: tuple[tuple[str, ...], tuple[str, ...]] | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    settings: tuple[SettingConfig, ...]
    schemes: tuple[SchemeConfig, ...]
    protocol: str = "DF"
    noise_power: float = 1.0
    master_seed: int = 20180001
    trials: int = 10000
    snr_db: tuple[float, ...] = _DEFAULT_SNR
    out: str = "sweep.csv"
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    statistics: StatisticalBudget | None = None
    outage_targets: dict[str, float] = field(default_factory=dict)


def _expect(table: Mapping[str, Any], key: str, kinds: tuple[type, ...], where: str, default=None, required=False):
    if key not in table:
        if required:
            raise ConfigError(f"{where}: missing required field '{key}'")
        return default
    val = table[key]
    if bool in kinds and isinstance(val, bool):
        return val
    if isinstance(val, bool) and bool not in kinds:
        raise ConfigError(f"{where}: field '{key}' has wrong type bool")
    if not isinstance(val, kinds):
        names = "/".join(k.__name__ for k in kinds)
        raise ConfigError(f"{where}: field '{key}' must be {names}, got {type(val).__name__}")
    return val


def _plans_from(raw, where: str):
    if raw is None:
        return None
    try:
        plans = tuple(tuple(str(s) for s in phase) for phase in raw)
    except TypeError:
        raise ConfigError(f"{where}: decoding_plans must be two lists of symbol ids") from None
    if len(plans) != 2:
        raise ConfigError(f"{where}: decoding_plans must list exactly two phases")
    return plans


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    """Parse TOML text; raises ConfigError carrying the offending field."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{source}: not valid TOML: {e}") from None

    kind = _expect(data, "kind", (str,), source, required=True)
    if kind not in KINDS:
        raise ConfigError(f"{source}: unknown kind {kind!r}; expected one of {KINDS}")
    protocol = _expect(data, "protocol", (str,), source, default="DF")
    if protocol not in PROTOCOLS:
        raise ConfigError(f"{source}: unknown protocol {protocol!r}")

    raw_settings = _expect(data, "setting", (list,), source, default=[])
    if not raw_settings:
        raise ConfigError(f"{source}: at least one [[setting]] table is required")
    settings = []
    for i, tbl in enumerate(raw_settings):
        where = f"{source}: setting[{i}]"
        if not isinstance(tbl, Mapping):
            raise ConfigError(f"{where}: must be a table")
        name = _expect(tbl, "name", (str,), where, default=f"setting{i + 1}")
        pairing = _expect(tbl, "pairing", (list,), where)
        plans = _plans_from(tbl.get("decoding_plans"), where)
        variances = {}
        for key, val in tbl.items():
            if key in ("name", "pairing", "decoding_plans"):
                continue
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                raise ConfigError(f"{where}: variance '{key}' must be a number")
            variances[str(key)] = float(val)
        if not variances:
            raise ConfigError(f"{where}: no link variances given")
        settings.append(
            SettingConfig(
                name=name,
                variances=variances,
                pairing=tuple(int(p) for p in pairing) if pairing else None,
                decoding_plans=plans,
            )
        )

    raw_schemes = _expect(data, "scheme", (list,), source, default=[])
    if not raw_schemes:
        raise ConfigError(f"{source}: at least one [[scheme]] table is required")
    schemes = []
    for i, tbl in enumerate(raw_schemes):
        where = f"{source}: scheme[{i}]"
        if not isinstance(tbl, Mapping):
            raise ConfigError(f"{where}: must be a table")
        strategy = _expect(tbl, "strategy", (str,), where, required=True)
        if strategy not in STRATEGIES:
            raise ConfigError(f"{where}: unknown strategy {strategy!r}; expected one of {STRATEGIES}")
        baseline = _expect(tbl, "baseline", (str,), where, default="none")
        if baseline not in BASELINES:
            raise ConfigError(f"{where}: unknown baseline {baseline!r}")
        proto = _expect(tbl, "protocol", (str,), where)
        if proto is not None and proto not in PROTOCOLS:
            raise ConfigError(f"{where}: unknown protocol {proto!r}")
        label = _expect(tbl, "label", (str,), where, default=strategy if baseline == "none" else baseline)
        coeffs = tuple(float(c) for c in _expect(tbl, "coefficients", (list,), where, default=[]))
        coeffs2 = tuple(float(c) for c in _expect(tbl, "coefficients2", (list,), where, default=[]))
        trim = _expect(tbl, "trim", (bool,), where)
        plans = _plans_from(tbl.get("decoding_plans"), where)
        schemes.append(
            SchemeConfig(
                label=label,
                strategy=strategy,
                baseline=baseline,
                protocol=proto,
                coefficients=coeffs,
                coefficients2=coeffs2,
                trim=trim,
                decoding_plans=plans,
            )
        )

    opt_tbl = _expect(data, "optimizer", (dict,), source, default={})
    optimizer = OptimizerConfig(
        grid_resolution=int(_expect(opt_tbl, "grid_resolution", (int,), f"{source}: optimizer", default=201)),
        refinement_rounds=int(_expect(opt_tbl, "refinement_rounds", (int,), f"{source}: optimizer", default=3)),
        min_rate_floor=float(_expect(opt_tbl, "min_rate_floor", (int, float), f"{source}: optimizer", default=0.0)),
        enforce_ordering=bool(_expect(opt_tbl, "enforce_ordering", (bool,), f"{source}: optimizer", default=True)),
    )

    stat_tbl = _expect(data, "statistics", (dict,), source)
    statistics = None
    if stat_tbl is not None:
        statistics = StatisticalBudget(
            sample_count=int(_expect(stat_tbl, "sample_count", (int,), f"{source}: statistics", default=256)),
            seed=int(_expect(stat_tbl, "seed", (int,), f"{source}: statistics", required=True)),
        )

    targets_tbl = _expect(data, "outage_targets", (dict,), source, default={})
    targets = {}
    for sym, val in targets_tbl.items():
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise ConfigError(f"{source}: outage target '{sym}' must be a number")
        targets[str(sym)] = float(val)

    snr_raw = _expect(data, "snr_db", (list,), source, default=list(_DEFAULT_SNR))
    snr = tuple(float(v) for v in snr_raw)

    trials = int(_expect(data, "trials", (int,), source, default=10000))
    if trials < 1:
        raise ConfigError(f"{source}: trials must be >= 1")

    return ExperimentConfig(
        kind=kind,
        settings=tuple(settings),
        schemes=tuple(schemes),
        protocol=protocol,
        noise_power=float(_expect(data, "noise_power", (int, float), source, default=1.0)),
        master_seed=int(_expect(data, "master_seed", (int,), source, default=20180001)),
        trials=trials,
        snr_db=snr,
        out=str(_expect(data, "out", (str,), source, default="sweep.csv")),
        optimizer=optimizer,
        statistics=statistics,
        outage_targets=targets,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_config(text, source=str(path))


# ---------------------------------------------------------------------------
# TOML emission (round-trip support for --dump-config)


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        escaped = v.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise StructuralError(f"cannot serialize {type(v).__name__} to TOML")


def _emit_table(lines: list[str], header: str, table: Mapping[str, Any]) -> None:
    lines.append(header)
    for k, v in table.items():
        if v is None:
            continue
        lines.append(f"{k} = {_toml_value(v)}")
    lines.append("")


def dump_config(cfg: ExperimentConfig) -> str:
    """TOML text that parses back to an equal ExperimentConfig."""
    lines: list[str] = []
    for k, v in (
        ("kind", cfg.kind),
        ("protocol", cfg.protocol),
        ("noise_power", cfg.noise_power),
        ("master_seed", cfg.master_seed),
        ("trials", cfg.trials),
        ("snr_db", list(cfg.snr_db)),
        ("out", cfg.out),
    ):
        lines.append(f"{k} = {_toml_value(v)}")
    lines.append("")
    _emit_table(
        lines,
        "[optimizer]",
        {
            "grid_resolution": cfg.optimizer.grid_resolution,
            "refinement_rounds": cfg.optimizer.refinement_rounds,
            "min_rate_floor": cfg.optimizer.min_rate_floor,
            "enforce_ordering": cfg.optimizer.enforce_ordering,
        },
    )
    if cfg.statistics is not None:
        _emit_table(
            lines,
            "[statistics]",
            {"sample_count": cfg.statistics.sample_count, "seed": cfg.statistics.seed},
        )
    if cfg.outage_targets:
        _emit_table(lines, "[outage_targets]", cfg.outage_targets)
    for s in cfg.settings:
        tbl: dict[str, Any] = {"name": s.name}
        tbl.update(s.variances)
        if s.pairing is not None:
            tbl["pairing"] = list(s.pairing)
        if s.decoding_plans is not None:
            tbl["decoding_plans"] = [list(p) for p in s.decoding_plans]
        _emit_table(lines, "[[setting]]", tbl)
    for s in cfg.schemes:
        tbl = {"label": s.label, "strategy": s.strategy}
        if s.baseline != "none":
            tbl["baseline"] = s.baseline
        if s.protocol is not None:
            tbl["protocol"] = s.protocol
        if s.coefficients:
            tbl["coefficients"] = list(s.coefficients)
        if s.coefficients2:
            tbl["coefficients2"] = list(s.coefficients2)
        if s.trim is not None:
            tbl["trim"] = s.trim
        if s.decoding_plans is not None:
            tbl["decoding_plans"] = [list(p) for p in s.decoding_plans]
        _emit_table(lines, "[[scheme]]", tbl)
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# plan construction


def build_plans(cfg: ExperimentConfig) -> list[tuple[str, list[TrialPlan]]]:
    """One TrialPlan per (setting, scheme); structural problems raise here.

    snr_db on the returned plans is a placeholder; the sweep substitutes each
    grid point.
    """
    out = []
    for setting in cfg.settings:
        plans = []
        for scheme in cfg.schemes:
            plans.append(_plan_for(cfg, setting, scheme))
        out.append((setting.name, plans))
    return out


def _plan_for(cfg: ExperimentConfig, setting: SettingConfig, scheme: SchemeConfig) -> TrialPlan:
    where = f"setting '{setting.name}' / scheme '{scheme.label}'"
    baseline = scheme.baseline if scheme.strategy == "oma_baseline" else "none"
    if scheme.strategy == "oma_baseline" and scheme.baseline == "none":
        raise ConfigError(f"{where}: oma_baseline scheme needs a 'baseline' field")
    plans = scheme.decoding_plans or setting.decoding_plans
    try:
        spec = make_scenario(
            cfg.kind,
            setting.variances,
            protocol=scheme.protocol or cfg.protocol,
            baseline=baseline,
            noise_power=cfg.noise_power,
            decoding_plans=plans,
            pairing=setting.pairing,
        )
    except StructuralError as e:
        raise ConfigError(f"{where}: {e}") from None
    coefficients: tuple = ()
    if scheme.strategy == "fixed":
        if not scheme.coefficients:
            raise ConfigError(f"{where}: fixed strategy requires 'coefficients'")
        if scheme.coefficients2:
            coefficients = (scheme.coefficients, scheme.coefficients2)
        else:
            coefficients = tuple(scheme.coefficients)
    return TrialPlan(
        spec=spec,
        strategy=scheme.strategy,
        snr_db=0.0,
        trials=cfg.trials,
        master_seed=cfg.master_seed,
        label=f"{scheme.label}",
        outage_targets=dict(cfg.outage_targets),
        coefficients=coefficients,
        optimizer=cfg.optimizer,
        statistics=cfg.statistics,
        trim=scheme.trim,
    )


def config_with_overrides(
    cfg: ExperimentConfig,
    *,
    seed: int | None = None,
    trials: int | None = None,
    snr: tuple[float, ...] | None = None,
    out: str | None = None,
) -> ExperimentConfig:
    """Apply CLI flag overrides; flags win over file values."""
    if seed is not None:
        cfg = replace(cfg, master_seed=int(seed))
    if trials is not None:
        if trials < 1:
            raise ConfigError("trials must be >= 1")
        cfg = replace(cfg, trials=int(trials))
    if snr is not None:
        cfg = replace(cfg, snr_db=tuple(float(v) for v in snr))
    if out is not None:
        cfg = replace(cfg, out=str(out))
    return cfg
