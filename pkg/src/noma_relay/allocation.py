"""Power-allocation strategies over the shared per-phase budget.

Four ways to pick the superposition powers, in increasing CSI demand:

- ``fixed_allocation``   static fractions of the phase budget
- ``scsi_optimize``      fixed coefficients from channel statistics only
                         (sample-average approximation over seeded draws)
- ``hcsi_allocate``      two-stage hybrid: statistical first hop, per-realization
                         second hop
- ``icsi_optimize``      full per-realization grid optimization

plus ``power_trim``, which scales each phase down to the smallest power that
keeps every end-to-end rate unchanged (the slack hop of a min composition
wastes power at full budget).

The optimizers share one deterministic face search: for each phase with two
superposed symbols the budget is spent fully (raising the first-decoded
symbol's power never hurts any SINR, so the optimum lies on the simplex face)
and a fraction grid is refined around the incumbent.  Ties are broken toward
the lexicographically smallest coefficients; on the face all candidates
consume the same total power, so the minimal-power tie rule is vacuous there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .channel import ChannelRealization, sample_realization_block
from .errors import InfeasibleAllocation, StructuralError
from .scenarios import SYMBOLS, ScenarioSpec, end_to_end_sinrs

__all__ = [
    "PowerAllocation",
    "OptimizerConfig",
    "StatisticalBudget",
    "fixed_allocation",
    "icsi_optimize",
    "icsi_optimize_block",
    "power_trim",
    "power_trim_block",
    "scsi_optimize",
    "hcsi_allocate",
    "hcsi_allocate_block",
    "maximize_on_grid",
]

_SCSI_CHUNK = 64  # samples per accumulation slice; fixed so results never depend on memory


@dataclass(frozen=True)
class PowerAllocation:
    """Absolute per-symbol powers for the two phases.

    The factory operations in this module guarantee the budget invariants
    (nonnegative powers, per-phase sums within P_t).  Hand-built instances are
    evaluated mechanically, which the scenario tests use to probe points
    outside the feasible set.  Values may be scalars or per-trial arrays.
    """

    phase1: Mapping[str, object]
    phase2: Mapping[str, object]

    def phase_totals(self) -> tuple[object, object]:
        p1 = sum(np.asarray(v, dtype=np.float64) for v in self.phase1.values())
        p2 = sum(np.asarray(v, dtype=np.float64) for v in self.phase2.values())
        return p1, p2


@dataclass(frozen=True)
class OptimizerConfig:
    grid_resolution: int = 201
    refinement_rounds: int = 3
    min_rate_floor: float = 0.0
    enforce_ordering: bool = True

    def __post_init__(self) -> None:
        if self.grid_resolution < 2:
            raise StructuralError("grid_resolution must be at least 2")
        if self.refinement_rounds < 0:
            raise StructuralError("refinement_rounds must be nonnegative")
        if self.min_rate_floor < 0:
            raise StructuralError("min_rate_floor must be nonnegative")


@dataclass(frozen=True)
class StatisticalBudget:
    """Sample budget for the statistical (SAA) optimizer."""

    sample_count: int
    seed: int

    def __post_init__(self) -> None:
        if self.sample_count < 1:
            raise StructuralError("sample_count must be at least 1")


# ---------------------------------------------------------------------------
# fixed coefficients


def fixed_allocation(
    spec: ScenarioSpec,
    fractions: Mapping[str, float] | Sequence[float],
    fractions2: Mapping[str, float] | Sequence[float] | None = None,
) -> PowerAllocation:
    """Static allocation: power = fraction * phase budget.

    ``fractions`` maps symbol -> fraction (a bare pair is read as (x1, x2));
    each phase uses the entries for its own symbols.  ``fractions2`` overrides
    the second phase.  Per-phase sums above 1 are rejected.
    """

    def as_map(f) -> dict[str, float]:
        if isinstance(f, Mapping):
            out = {str(k): float(v) for k, v in f.items()}
        else:
            vals = tuple(float(v) for v in f)
            if len(vals) != len(SYMBOLS):
                raise StructuralError(f"expected {len(SYMBOLS)} fractions, got {len(vals)}")
            out = dict(zip(SYMBOLS, vals))
        for sym, val in out.items():
            if not np.isfinite(val) or val < 0:
                raise StructuralError(f"fraction for {sym} must be finite and nonnegative")
        return out

    maps = (as_map(fractions), as_map(fractions if fractions2 is None else fractions2))
    phases = []
    for phase, fmap in enumerate(maps):
        syms = spec.phase_symbols(phase)
        missing = [s for s in syms if s not in fmap]
        if missing:
            raise StructuralError(f"phase-{phase + 1} fractions missing symbols {missing}")
        total = sum(fmap[s] for s in syms)
        if total > 1.0 + 1e-12:
            raise StructuralError(f"phase-{phase + 1} fractions sum to {total:g} > 1")
        phases.append({s: fmap[s] * spec.phase_budget for s in syms})
    return PowerAllocation(phase1=phases[0], phase2=phases[1])


# ---------------------------------------------------------------------------
# grid machinery


def maximize_on_grid(
    objective: Callable[..., np.ndarray],
    bounds: Sequence[tuple[float, float]],
    cfg: OptimizerConfig | None = None,
) -> tuple[tuple[float, ...], float]:
    """Deterministic face search: coarse grid plus local refinement.

    ``objective`` receives one coordinate array per axis, shaped for mutual
    broadcasting ((Ga, 1) and (1, Gb) in the two-axis case), and returns the
    objective values; -inf marks infeasible points.  Each refinement round
    shrinks every axis to +/- one coarse step around the incumbent at the same
    resolution.  Ties go to the first point in row-major order, i.e. the
    lexicographically smallest coordinates.
    """
    cfg = cfg or OptimizerConfig()
    if not bounds:
        raise StructuralError("need at least one axis")
    G = cfg.grid_resolution
    n = len(bounds)
    lo = [float(b[0]) for b in bounds]
    hi = [float(b[1]) for b in bounds]
    coords = tuple(hi)
    value = -np.inf
    for _ in range(cfg.refinement_rounds + 1):
        axes = [np.linspace(lo[a], hi[a], G) for a in range(n)]
        shaped = []
        for a in range(n):
            shape = [1] * n
            shape[a] = G
            shaped.append(axes[a].reshape(shape))
        vals = np.asarray(objective(*shaped), dtype=np.float64)
        flat = int(np.argmax(vals.reshape(-1)))
        value = float(vals.reshape(-1)[flat])
        idx = np.unravel_index(flat, vals.shape)
        coords = tuple(float(axes[a][idx[a]]) for a in range(n))
        for a in range(n):
            step = (hi[a] - lo[a]) / (G - 1)
            lo[a] = max(bounds[a][0], coords[a] - step)
            hi[a] = min(bounds[a][1], coords[a] + step)
    return coords, value


def _free_axes(spec: ScenarioSpec, cfg: OptimizerConfig, phases=(0, 1)) -> list[tuple[int, float, float]]:
    """Phases with a free coefficient, with the fraction bounds for the
    first-decoded symbol (ordering rule pins it to [0.5, 1] on downlink phases)."""
    axes = []
    for phase in phases:
        if len(spec.phase_symbols(phase)) == 2:
            lo = 0.5 if (cfg.enforce_ordering and spec.is_downlink_phase(phase)) else 0.0
            axes.append((phase, lo, 1.0))
    return axes


def _phase_powers(spec: ScenarioSpec, phase: int, frac) -> dict[str, object]:
    """Full-budget powers for one phase given the first-decoded fraction."""
    syms = spec.phase_symbols(phase)
    P = spec.phase_budget
    if len(syms) == 1:
        return {syms[0]: P}
    first, second = spec.decoding_plans[phase]
    return {first: frac * P, second: (1.0 - frac) * P}


def _floor_sinr(cfg: OptimizerConfig) -> float:
    # rate floor r with the 1/2 half-duplex factor: sinr >= 2^(2r) - 1
    return float(2.0 ** (2.0 * cfg.min_rate_floor) - 1.0) if cfg.min_rate_floor > 0 else 0.0


def _product_objective(
    spec: ScenarioSpec,
    gains: Mapping[str, np.ndarray],
    p1: Mapping[str, object],
    p2: Mapping[str, object],
    floor_sinr: float,
) -> np.ndarray:
    """Prod_k (1 + sinr_k): same argmax as the sum rate, no logs needed."""
    sinrs = end_to_end_sinrs(spec, gains, p1, p2)
    obj = None
    feasible = None
    for v in sinrs.values():
        obj = (1.0 + v) if obj is None else obj * (1.0 + v)
        if floor_sinr > 0.0:
            ok = v >= floor_sinr
            feasible = ok if feasible is None else (feasible & ok)
    if feasible is not None:
        obj = np.where(feasible, obj, -np.inf)
    return np.asarray(obj, dtype=np.float64)


def _refine_batch(
    eval_obj: Callable[[list[np.ndarray]], np.ndarray],
    axis_bounds: Sequence[tuple[float, float]],
    cfg: OptimizerConfig,
    trials: int,
) -> tuple[list[np.ndarray], np.ndarray]:
    """Per-trial grid refinement: each trial keeps its own shrinking box.

    ``eval_obj`` maps per-axis fraction grids, each (trials, G), to objective
    values (trials, G) or (trials, Ga, Gb).  Returns per-axis best fractions
    (trials,) and the best objective values.
    """
    G = cfg.grid_resolution
    n = len(axis_bounds)
    unit = np.linspace(0.0, 1.0, G)
    lo = [np.full(trials, b[0]) for b in axis_bounds]
    hi = [np.full(trials, b[1]) for b in axis_bounds]
    best = [np.full(trials, b[1]) for b in axis_bounds]
    best_val = np.full(trials, -np.inf)
    rows = np.arange(trials)
    for _ in range(cfg.refinement_rounds + 1):
        fracs = [l[:, None] + (h - l)[:, None] * unit[None, :] for l, h in zip(lo, hi)]
        obj = eval_obj(fracs)
        flat = obj.reshape(trials, -1)
        idx = np.argmax(flat, axis=1)
        best_val = flat[rows, idx]
        parts = [idx // G, idx % G] if n == 2 else [idx]
        for a in range(n):
            x = fracs[a][rows, parts[a]]
            best[a] = x
            step = (hi[a] - lo[a]) / (G - 1)
            lo[a] = np.maximum(axis_bounds[a][0], x - step)
            hi[a] = np.minimum(axis_bounds[a][1], x + step)
    return best, best_val


def _alloc_from_fracs(
    spec: ScenarioSpec,
    axes: Sequence[tuple[int, float, float]],
    fracs: Sequence[np.ndarray],
    trials: int,
) -> PowerAllocation:
    frac_of = {phase: f for (phase, _, _), f in zip(axes, fracs)}
    phases = []
    for phase in (0, 1):
        if phase in frac_of:
            phases.append(_phase_powers(spec, phase, frac_of[phase]))
        else:
            sym = spec.phase_symbols(phase)[0]
            phases.append({sym: np.full(trials, spec.phase_budget)})
    return PowerAllocation(phase1=phases[0], phase2=phases[1])


# ---------------------------------------------------------------------------
# instantaneous CSI


def icsi_optimize_block(
    spec: ScenarioSpec,
    gains: Mapping[str, np.ndarray],
    cfg: OptimizerConfig | None = None,
) -> tuple[PowerAllocation, np.ndarray]:
    """Vectorized per-realization optimization over a block of trials.

    ``gains`` maps link id -> (trials,) arrays.  Returns array-valued powers
    and a feasibility mask; trials whose rate floors cannot be met get zero
    power and False in the mask (the caller decides how to account for them).
    """
    cfg = cfg or OptimizerConfig()
    trials = len(next(iter(gains.values())))
    axes = _free_axes(spec, cfg)
    floor = _floor_sinr(cfg)
    n = len(axes)
    g_exp = {
        l: np.asarray(g, dtype=np.float64).reshape((trials,) + (1,) * n)
        for l, g in gains.items()
    }

    def eval_obj(fracs: list[np.ndarray]) -> np.ndarray:
        shaped = {}
        for a, (phase, _, _) in enumerate(axes):
            shape = [trials] + [1] * n
            shape[1 + a] = -1
            shaped[phase] = fracs[a].reshape(shape)
        p1 = _phase_powers(spec, 0, shaped.get(0))
        p2 = _phase_powers(spec, 1, shaped.get(1))
        return _product_objective(spec, g_exp, p1, p2, floor)

    best, best_val = _refine_batch(eval_obj, [(lo, hi) for _, lo, hi in axes], cfg, trials)
    feasible = np.isfinite(best_val)
    alloc = _alloc_from_fracs(spec, axes, best, trials)
    if not feasible.all():
        # zero-power placeholders for floor-infeasible trials; callers account
        # for them via the mask
        alloc = PowerAllocation(
            phase1={s: np.where(feasible, v, 0.0) for s, v in alloc.phase1.items()},
            phase2={s: np.where(feasible, v, 0.0) for s, v in alloc.phase2.items()},
        )
    return alloc, feasible


def icsi_optimize(
    spec: ScenarioSpec,
    realization: ChannelRealization,
    cfg: OptimizerConfig | None = None,
) -> PowerAllocation:
    """Grid-optimal allocation for one realization; raises on infeasible floors."""
    gains = {l.link_id: np.asarray([realization.gain(l.link_id)]) for l in spec.links}
    alloc, feasible = icsi_optimize_block(spec, gains, cfg)
    if not bool(feasible[0]):
        cfg = cfg or OptimizerConfig()
        raise InfeasibleAllocation(
            f"rate floor {cfg.min_rate_floor} bits/s/Hz is unreachable for this realization"
        )
    return _scalar_alloc(alloc)


def _scalar_alloc(alloc: PowerAllocation) -> PowerAllocation:
    return PowerAllocation(
        phase1={s: float(np.asarray(v).reshape(-1)[0]) for s, v in alloc.phase1.items()},
        phase2={s: float(np.asarray(v).reshape(-1)[0]) for s, v in alloc.phase2.items()},
    )


# ---------------------------------------------------------------------------
# power trimming


def power_trim_block(
    spec: ScenarioSpec,
    gains: Mapping[str, np.ndarray],
    alloc: PowerAllocation,
    iterations: int = 60,
) -> PowerAllocation:
    """Per-phase bisection for the smallest scale keeping all end-to-end rates.

    Rates are monotone in a uniform phase scale, so for each phase the minimal
    feasible scale is found by bisection on [0, 1]; the returned scale always
    satisfies the no-drop condition (the upper bracket is returned, and 1 is
    feasible by construction), hence re-evaluation reproduces the input SINRs.
    Phase 1 is trimmed first, then phase 2 against the trimmed phase 1.
    """
    base = end_to_end_sinrs(spec, gains, alloc.phase1, alloc.phase2)

    def scaled(powers: Mapping[str, object], s: np.ndarray) -> dict[str, object]:
        return {k: np.asarray(v, dtype=np.float64) * s for k, v in powers.items()}

    def holds(p1, p2) -> np.ndarray:
        sinrs = end_to_end_sinrs(spec, gains, p1, p2)
        ok = None
        for sym, ref in base.items():
            good = sinrs[sym] >= ref
            ok = good if ok is None else (ok & good)
        return ok

    shape = np.broadcast(*base.values()).shape

    def bisect(cond: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        lo = np.zeros(shape)
        hi = np.ones(shape)
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            ok = cond(mid)
            hi = np.where(ok, mid, hi)
            lo = np.where(ok, lo, mid)
        return hi

    s1 = bisect(lambda s: holds(scaled(alloc.phase1, s), alloc.phase2))
    p1 = scaled(alloc.phase1, s1)
    s2 = bisect(lambda s: holds(p1, scaled(alloc.phase2, s)))
    p2 = scaled(alloc.phase2, s2)
    return PowerAllocation(phase1=p1, phase2=p2)


def power_trim(
    spec: ScenarioSpec,
    realization: ChannelRealization,
    alloc: PowerAllocation,
) -> PowerAllocation:
    """Scalar wrapper around :func:`power_trim_block` for one realization."""
    gains = {l.link_id: np.asarray([realization.gain(l.link_id)]) for l in spec.links}
    arr = PowerAllocation(
        phase1={s: np.asarray([v], dtype=np.float64) for s, v in alloc.phase1.items()},
        phase2={s: np.asarray([v], dtype=np.float64) for s, v in alloc.phase2.items()},
    )
    return _scalar_alloc(power_trim_block(spec, gains, arr))


# ---------------------------------------------------------------------------
# statistical CSI (sample-average approximation)


def scsi_optimize(
    spec: ScenarioSpec,
    budget: StatisticalBudget,
    cfg: OptimizerConfig | None = None,
    *,
    samples: Mapping[str, np.ndarray] | None = None,
) -> PowerAllocation:
    """Fixed coefficients maximizing the sample-average sum rate.

    Draws ``sample_count`` seeded realizations (or uses injected ``samples``,
    the hook the deterministic tests rely on) and maximizes the mean of
    log2 prod_k (1 + sinr_k) on the same refinement grid as icsi_optimize.
    Rate floors apply to the sample-average per-symbol rates.
    """
    cfg = cfg or OptimizerConfig()
    if samples is None:
        samples = sample_realization_block(spec.links, budget.seed, np.arange(budget.sample_count))
    samples = {l: np.asarray(g, dtype=np.float64) for l, g in samples.items()}
    count = len(next(iter(samples.values())))
    axes = _free_axes(spec, cfg)
    n = len(axes)
    floor = cfg.min_rate_floor

    def eval_obj(fracs: list[np.ndarray]) -> np.ndarray:
        shaped = {}
        grid_shape = []
        for a, (phase, _, _) in enumerate(axes):
            shape = [1] * (n + 1)
            shape[1 + a] = -1
            shaped[phase] = fracs[a][0].reshape(shape)
            grid_shape.append(fracs[a].shape[1])
        p1 = _phase_powers(spec, 0, shaped.get(0))
        p2 = _phase_powers(spec, 1, shaped.get(1))
        acc = np.zeros(tuple(grid_shape))
        rate_acc = {s: np.zeros(tuple(grid_shape)) for s in SYMBOLS} if floor > 0 else None
        for start in range(0, count, _SCSI_CHUNK):
            sl = slice(start, min(start + _SCSI_CHUNK, count))
            g_exp = {l: g[sl].reshape((-1,) + (1,) * n) for l, g in samples.items()}
            sinrs = end_to_end_sinrs(spec, g_exp, p1, p2)
            total = None
            for sym, v in sinrs.items():
                term = np.log1p(v)
                total = term if total is None else total + term
                if rate_acc is not None:
                    rate_acc[sym] += term.sum(axis=0)
            acc += total.sum(axis=0)
        obj = acc / count
        if rate_acc is not None:
            ln2 = np.log(2.0)
            feasible = None
            for sym, v in rate_acc.items():
                ok = (0.5 * v / (count * ln2)) >= floor - 1e-12
                feasible = ok if feasible is None else (feasible & ok)
            obj = np.where(feasible, obj, -np.inf)
        return obj[None, ...]

    best, best_val = _refine_batch(eval_obj, [(lo, hi) for _, lo, hi in axes], cfg, 1)
    if not np.isfinite(best_val[0]):
        raise InfeasibleAllocation(
            f"rate floor {cfg.min_rate_floor} bits/s/Hz is unreachable on sample average"
        )
    return _scalar_alloc(_alloc_from_fracs(spec, axes, best, 1))


# ---------------------------------------------------------------------------
# hybrid CSI: statistical first hop, instantaneous second hop


def hcsi_allocate_block(
    spec: ScenarioSpec,
    stage1: PowerAllocation,
    gains: Mapping[str, np.ndarray],
    cfg: OptimizerConfig | None = None,
) -> tuple[PowerAllocation, np.ndarray]:
    """Stage 2 of the hybrid scheme, vectorized over trials.

    Phase-1 powers are taken from ``stage1`` verbatim; the phase-2 coefficient
    is re-optimized per realization against the full evaluated sum rate.  A
    one-symbol second phase gets the full budget regardless of stage 1.
    """
    cfg = cfg or OptimizerConfig()
    trials = len(next(iter(gains.values())))
    p1 = {s: float(np.asarray(v).reshape(-1)[0]) for s, v in stage1.phase1.items()}
    if sorted(p1.keys()) != sorted(spec.phase_symbols(0)):
        raise StructuralError("stage-1 allocation does not cover the phase-1 symbols")
    floor = _floor_sinr(cfg)
    axes = _free_axes(spec, cfg, phases=(1,))
    if not axes:
        sym = spec.phase_symbols(1)[0]
        alloc = PowerAllocation(
            phase1={s: np.full(trials, v) for s, v in p1.items()},
            phase2={sym: np.full(trials, spec.phase_budget)},
        )
        g_exp = {l: np.asarray(g, dtype=np.float64) for l, g in gains.items()}
        obj = _product_objective(spec, g_exp, alloc.phase1, alloc.phase2, floor)
        return alloc, np.isfinite(obj)

    g_exp = {l: np.asarray(g, dtype=np.float64).reshape(trials, 1) for l, g in gains.items()}

    def eval_obj(fracs: list[np.ndarray]) -> np.ndarray:
        p2 = _phase_powers(spec, 1, fracs[0])
        return _product_objective(spec, g_exp, p1, p2, floor)

    best, best_val = _refine_batch(eval_obj, [(axes[0][1], axes[0][2])], cfg, trials)
    feasible = np.isfinite(best_val)
    frac = np.where(feasible, best[0], 0.0)
    p2 = _phase_powers(spec, 1, frac)
    scale = feasible.astype(np.float64)
    alloc = PowerAllocation(
        phase1={s: np.full(trials, v) * scale for s, v in p1.items()},
        phase2={s: np.asarray(v) * scale for s, v in p2.items()},
    )
    return alloc, feasible


def hcsi_allocate(
    spec: ScenarioSpec,
    stage1: PowerAllocation,
    realization: ChannelRealization,
    cfg: OptimizerConfig | None = None,
) -> PowerAllocation:
    """Scalar wrapper around :func:`hcsi_allocate_block` for one realization."""
    gains = {l.link_id: np.asarray([realization.gain(l.link_id)]) for l in spec.links}
    alloc, feasible = hcsi_allocate_block(spec, stage1, gains, cfg)
    if not bool(feasible[0]):
        cfg = cfg or OptimizerConfig()
        raise InfeasibleAllocation(
            f"rate floor {cfg.min_rate_floor} bits/s/Hz is unreachable for this realization"
        )
    return _scalar_alloc(alloc)
