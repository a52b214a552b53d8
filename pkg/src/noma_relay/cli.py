"""Config-driven experiment runner.

Subcommands:

- ``sweep``      run every (setting, scheme) pair over the SNR grid, write CSV
- ``asymmetry``  report per-hop and network degree-of-asymmetry ratios
- ``validate``   check decoding-plan consistency rules, exit 1 on advisories

Configs are TOML files (see ``--dump-config`` for the effective layout);
``--preset`` loads one of the shipped experiment presets instead.  Flags
``--seed``, ``--trials``, ``--snr``, ``--out`` override file values.  Output
is data, not plots: one CSV row per (scheme, setting, SNR).

Exit codes: 0 ok, 1 advisory validation findings, 2 invalid config or usage,
3 I/O failure.  The ``NOMA_RELAY_OUTDIR`` environment variable sets the
directory for relative output paths.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from .channel import NOMA_FAVORABLE_THRESHOLD, hop_asymmetry
from .config import (
    ExperimentConfig,
    build_plans,
    config_with_overrides,
    dump_config,
    load_config,
)
from .errors import ConfigError, StructuralError
from .metrics import sweep
from .presets import load_preset, preset_names
from .scenarios import maxmin_select, validate

__all__ = ["main"]

CSV_FIELDS = (
    "scheme",
    "setting",
    "snr_db",
    "sum_rate",
    "sum_rate_ci",
    "outage_sys",
    "outage_s1",
    "outage_s2",
    "energy_eff",
    "ee_ratio",
    "npu",
    "trials",
)

ENV_OUTDIR = "NOMA_RELAY_OUTDIR"

# First-phase / second-phase transmit links, for the asymmetry report.
_HOP_IDS = {
    "uplink_relay": (("S1R", "S2R"), ("RU",)),
    "downlink_relay": (("SR",), ("RU1", "RU2")),
    "x_network": (("S1R", "S2R"), ("RU1", "RU2")),
    "diamond": (("SR1", "SR2"), ("R1U", "R2U")),
    "three_node_direct": (("SR", "SU"), ("RU",)),
    "user_cooperation": (("SU1", "SU2"), ("U2U1",)),
}


def _fmt(value) -> str:
    """Locale-independent finite decimal, empty cell for missing values."""
    return "" if value is None else format(float(value), ".10g")


def _resolve_out(cfg: ExperimentConfig) -> Path:
    path = Path(cfg.out)
    if path.is_absolute():
        return path
    return Path(os.environ.get(ENV_OUTDIR, ".")) / path


def _parse_snr(text: str) -> tuple[float, ...]:
    """Either a comma list ("0,10,20") or a start:stop:step range ("0:40:5")."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ConfigError(f"--snr range must be start:stop[:step], got {text!r}")
        start, stop = float(parts[0]), float(parts[1])
        step = float(parts[2]) if len(parts) == 3 else 5.0
        if step <= 0:
            raise ConfigError("--snr step must be positive")
        vals = []
        v = start
        while v <= stop + 1e-9:
            vals.append(round(v, 10))
            v += step
        return tuple(vals)
    return tuple(float(v) for v in text.split(",") if v.strip())


def _load_cfg(args: argparse.Namespace) -> ExperimentConfig:
    if bool(args.config) == bool(args.preset):
        raise ConfigError("exactly one of --config or --preset is required")
    cfg = load_preset(args.preset) if args.preset else load_config(args.config)
    return config_with_overrides(
        cfg,
        seed=args.seed,
        trials=args.trials,
        snr=_parse_snr(args.snr) if args.snr is not None else None,
        out=args.out,
    )


def cmd_sweep(cfg: ExperimentConfig, threads: int) -> int:
    groups = build_plans(cfg)
    table = []
    for setting_name, plans in groups:
        for row in sweep(plans, cfg.snr_db, threads=threads):
            s = row.summary
            table.append(
                {
                    "scheme": row.label,
                    "setting": setting_name,
                    "snr_db": _fmt(row.snr_db),
                    "sum_rate": _fmt(s.ergodic_sum_rate),
                    "sum_rate_ci": _fmt(s.sum_rate_ci),
                    "outage_sys": _fmt(s.system_outage),
                    "outage_s1": _fmt(s.outage_per_symbol.get("x1")),
                    "outage_s2": _fmt(s.outage_per_symbol.get("x2")),
                    "energy_eff": _fmt(s.energy_efficiency),
                    "ee_ratio": _fmt(s.ee_ratio_vs_fdma),
                    "npu": _fmt(s.normalized_power_utilization),
                    "trials": str(s.trials_used),
                }
            )
    out_path = _resolve_out(cfg)
    if out_path.parent and not out_path.parent.exists():
        out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(table)
    print(f"wrote {len(table)} rows to {out_path}")
    return 0


def cmd_asymmetry(cfg: ExperimentConfig) -> int:
    build_plans(cfg)  # surfaces structural config problems first
    hop1_ids, hop2_ids = _HOP_IDS[cfg.kind]
    for setting in cfg.settings:
        v = setting.variances
        try:
            au = hop_asymmetry([v[l] for l in hop1_ids])
            ad = hop_asymmetry([v[l] for l in hop2_ids])
        except KeyError as e:
            raise ConfigError(f"setting '{setting.name}': missing variance for link {e}") from None
        ar = au * ad
        verdict = (
            f"NOMA-favorable (A^r > {NOMA_FAVORABLE_THRESHOLD:g})"
            if ar > NOMA_FAVORABLE_THRESHOLD
            else "not flagged"
        )
        line = f"{setting.name}: A^u = {au:.2g}, A^d = {ad:.2g}, A^r = {ar:.2g}, {verdict}"
        if cfg.kind == "diamond":
            k_hat = maxmin_select([v["SR1"], v["SR2"]], [v["R1U"], v["R2U"]])
            line += f"; Max-Min relay k_hat = {k_hat}"
            print(line)
            # The strongest max-min path should be the one the NOMA plan
            # decodes last (interference-free); selection elsewhere means the
            # OMA pick rides a path NOMA treats as weak.
            last = 2
            for _, plans in build_plans(cfg):
                if plans:
                    last = int(plans[0].spec.decoding_plans[1][-1][1])
                    break
            if k_hat != last:
                print(
                    f"  warning: Max-Min selects relay {k_hat} but the NOMA plan "
                    f"decodes path {last} last"
                )
        else:
            print(line)
    return 0


def cmd_validate(cfg: ExperimentConfig) -> int:
    findings = 0
    for setting_name, plans in build_plans(cfg):
        for plan in plans:
            result = validate(plan.spec)
            for issue in result.issues:
                findings += 1
                print(f"{setting_name}/{plan.name}: {issue.severity}: {issue.message}")
    if findings == 0:
        print("ok")
        return 0
    return 1


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML experiment config")
    common.add_argument(
        "--preset",
        metavar="NAME",
        help="shipped preset name (%s)" % ", ".join(preset_names()),
    )
    common.add_argument("--seed", type=int, help="override master seed")
    common.add_argument("--trials", type=int, help="override trial count")
    common.add_argument("--snr", help="override SNR grid: '0,10,20' or '0:40:5'")
    common.add_argument("--out", help="override output CSV path")
    common.add_argument("--threads", type=int, default=1, help="worker threads (results identical)")
    common.add_argument(
        "--dump-config",
        action="store_true",
        help="print the effective config as TOML and exit",
    )
    parser = argparse.ArgumentParser(
        prog="noma-relay",
        description="Two-hop NOMA relay simulator: sweeps, asymmetry reports, plan validation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="run the experiment, write CSV")
    sub.add_parser("asymmetry", parents=[common], help="report degree-of-asymmetry ratios")
    sub.add_parser("validate", parents=[common], help="check decoding-plan consistency rules")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        cfg = _load_cfg(args)
        if args.dump_config:
            print(dump_config(cfg))
            return 0
        if args.command == "sweep":
            return cmd_sweep(cfg, args.threads)
        if args.command == "asymmetry":
            return cmd_asymmetry(cfg)
        return cmd_validate(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except StructuralError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
