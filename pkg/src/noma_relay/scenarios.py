"""Two-hop NOMA network catalog: topologies, decoding plans, validation, evaluation.

Six architectures are supported, each moving two superposed symbols through a
two-phase half-duplex cycle:

- ``uplink_relay``      two sources -> relay -> one user        (links S1R, S2R, RU)
- ``downlink_relay``    source -> relay -> two users            (links SR, RU1, RU2)
- ``x_network``         two sources -> relay -> two users       (links S1R, S2R, RU1, RU2)
- ``diamond``           source -> two relays -> one user        (links SR1, SR2, R1U, R2U)
- ``three_node_direct`` source -> user, with a relay assisting the second symbol
                        (links SR, SU, RU)
- ``user_cooperation``  source -> two users, the strong user forwards the weak
                        user's symbol (links SU1, SU2, U2U1)

Symbols are always named ``x1`` and ``x2``.  Many-to-one phases decode the
strong transmitter first; one-to-many phases decode the weak owner's symbol
first (it carries more power).  Evaluation broadcasts over numpy arrays, so
gains and powers may be scalars, Monte Carlo trial vectors, or optimizer grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .channel import ChannelRealization, LinkStats
from .errors import StructuralError
from .sic import ArrayLike, SignalComponent, af_end_to_end, rate_from_sinr, sic_sinr_chain

__all__ = [
    "KINDS",
    "PROTOCOLS",
    "BASELINES",
    "RELAY_KINDS",
    "SYMBOLS",
    "ScenarioSpec",
    "RateReport",
    "ValidationIssue",
    "ValidationResult",
    "make_scenario",
    "default_decoding_plans",
    "default_pairing",
    "validate",
    "evaluate",
    "end_to_end_sinrs",
    "baseline_sinrs",
    "maxmin_select",
]

KINDS = (
    "uplink_relay",
    "downlink_relay",
    "x_network",
    "diamond",
    "three_node_direct",
    "user_cooperation",
)
PROTOCOLS = ("DF", "AF")
BASELINES = ("none", "tdma", "fdma", "maxmin_oma")

# The four kinds where both symbols traverse relay paths; OMA baselines and the
# AF protocol are defined for these.
RELAY_KINDS = ("uplink_relay", "downlink_relay", "x_network", "diamond")

SYMBOLS = ("x1", "x2")

_TOPOLOGY = {
    "uplink_relay": ("S1R", "S2R", "RU"),
    "downlink_relay": ("SR", "RU1", "RU2"),
    "x_network": ("S1R", "S2R", "RU1", "RU2"),
    "diamond": ("SR1", "SR2", "R1U", "R2U"),
    "three_node_direct": ("SR", "SU", "RU"),
    "user_cooperation": ("SU1", "SU2", "U2U1"),
}

# Phases whose SIC runs in downlink manner (weak owner decoded first); the
# power-ordering rule applies to these.
_DOWNLINK_PHASE = {
    "uplink_relay": (False, False),
    "downlink_relay": (True, True),
    "x_network": (False, True),
    "diamond": (True, False),
    "three_node_direct": (True, False),
    "user_cooperation": (True, False),
}


def _phase_symbols(kind: str, phase: int) -> tuple[str, ...]:
    if kind == "three_node_direct" and phase == 1:
        return ("x2",)  # only the relayed symbol is forwarded
    if kind == "user_cooperation" and phase == 1:
        return ("x1",)  # only the weak user's symbol is forwarded
    return SYMBOLS


@dataclass(frozen=True)
class ScenarioSpec:
    """Immutable description of one network: topology, protocol, decoding plans.

    ``phase_budget`` is the total transmit power P_t available in each phase;
    simultaneous transmitters within a phase share it.  ``pairing`` applies to
    the x_network only and maps source index -> served user index (1-based).
    """

    kind: str
    protocol: str
    baseline: str
    links: tuple[LinkStats, ...]
    phase_budget: float
    noise_power: float = 1.0
    decoding_plans: tuple[tuple[str, ...], tuple[str, ...]] = (SYMBOLS, SYMBOLS)
    pairing: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise StructuralError(f"unknown scenario kind {self.kind!r}")
        if self.protocol not in PROTOCOLS:
            raise StructuralError(f"unknown protocol {self.protocol!r}")
        if self.baseline not in BASELINES:
            raise StructuralError(f"unknown baseline {self.baseline!r}")
        expected = _TOPOLOGY[self.kind]
        got = tuple(s.link_id for s in self.links)
        if sorted(got) != sorted(expected):
            raise StructuralError(
                f"{self.kind} requires links {expected}, got {got}"
            )
        if len(set(got)) != len(got):
            raise StructuralError(f"duplicate link ids: {got}")
        if not (self.phase_budget > 0) or not np.isfinite(self.phase_budget):
            raise StructuralError("phase_budget must be positive and finite")
        if not (self.noise_power > 0) or not np.isfinite(self.noise_power):
            raise StructuralError("noise_power must be positive and finite")
        if len(self.decoding_plans) != 2:
            raise StructuralError("decoding_plans must give one order per phase")
        for phase, plan in enumerate(self.decoding_plans):
            want = _phase_symbols(self.kind, phase)
            if sorted(plan) != sorted(want):
                raise StructuralError(
                    f"phase-{phase + 1} decoding plan {plan!r} is not a permutation of {want}"
                )
        if self.protocol == "AF" and self.kind not in RELAY_KINDS:
            raise StructuralError(f"{self.kind} is decode-based; protocol must be DF")
        if self.baseline in ("tdma", "fdma") and self.kind not in RELAY_KINDS:
            raise StructuralError(f"baseline {self.baseline!r} is undefined for {self.kind}")
        if self.baseline == "maxmin_oma" and self.kind != "diamond":
            raise StructuralError("baseline 'maxmin_oma' requires the diamond kind (two relays)")
        if self.kind == "x_network":
            if self.pairing is None or sorted(self.pairing) != [1, 2]:
                raise StructuralError(
                    f"x_network needs a pairing that is a permutation of (1, 2), got {self.pairing!r}"
                )
        elif self.pairing is not None:
            raise StructuralError(f"pairing is only meaningful for x_network, not {self.kind}")

    # -- convenience accessors -------------------------------------------------

    @property
    def variances(self) -> dict[str, float]:
        return {s.link_id: s.variance for s in self.links}

    def link_variance(self, link_id: str) -> float:
        for s in self.links:
            if s.link_id == link_id:
                return s.variance
        raise StructuralError(f"no link {link_id!r} in spec")

    def phase_symbols(self, phase: int) -> tuple[str, ...]:
        return _phase_symbols(self.kind, phase)

    def is_downlink_phase(self, phase: int) -> bool:
        return _DOWNLINK_PHASE[self.kind][phase]


@dataclass(frozen=True)
class RateReport:
    """Per-realization evaluation result."""

    per_symbol_rates: dict[str, float]
    sum_rate: float
    consumed_power: float
    per_phase_power: tuple[float, float]


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    severity: str  # "violation" or "warning"
    message: str


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    issues: tuple[ValidationIssue, ...] = field(default_factory=tuple)


def _hop_links(spec: ScenarioSpec) -> dict[str, tuple[str, str]]:
    """Per-symbol (hop-1 link, hop-2 link) for the relay kinds."""
    kind = spec.kind
    if kind == "uplink_relay":
        return {"x1": ("S1R", "RU"), "x2": ("S2R", "RU")}
    if kind == "downlink_relay":
        return {"x1": ("SR", "RU1"), "x2": ("SR", "RU2")}
    if kind == "x_network":
        p = spec.pairing
        return {"x1": ("S1R", f"RU{p[0]}"), "x2": ("S2R", f"RU{p[1]}")}
    if kind == "diamond":
        return {"x1": ("SR1", "R1U"), "x2": ("SR2", "R2U")}
    raise StructuralError(f"{kind} has no per-symbol relay paths")


def default_pairing(variances: Mapping[str, float]) -> tuple[int, int]:
    """x_network pairing: strong-uplink source serves the weak-downlink user.

    That way the symbol decoded first at the relay (strong source) is also the
    one decoded first in the downlink phase (weak user's symbol), which is the
    consistent-manner configuration.
    """
    sources = sorted((1, 2), key=lambda k: (-variances[f"S{k}R"], k))
    users = sorted((1, 2), key=lambda k: (variances[f"RU{k}"], k))
    pairing = [0, 0]
    for src, usr in zip(sources, users):
        pairing[src - 1] = usr
    return (pairing[0], pairing[1])


def default_decoding_plans(
    kind: str,
    variances: Mapping[str, float],
    pairing: tuple[int, int] | None = None,
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Natural decoding orders: strong first on uplink hops, weak owner first on downlink hops.

    One-to-one hops copy the informative hop's order (same-manner default).
    Ties keep symbol index order.
    """

    def by_descending(var_of: dict[str, float]) -> tuple[str, ...]:
        return tuple(sorted(SYMBOLS, key=lambda s: (-var_of[s], s)))

    def by_ascending(var_of: dict[str, float]) -> tuple[str, ...]:
        return tuple(sorted(SYMBOLS, key=lambda s: (var_of[s], s)))

    if kind == "uplink_relay":
        order = by_descending({"x1": variances["S1R"], "x2": variances["S2R"]})
        return (order, order)
    if kind == "downlink_relay":
        order = by_ascending({"x1": variances["RU1"], "x2": variances["RU2"]})
        return (order, order)
    if kind == "x_network":
        if pairing is None:
            pairing = default_pairing(variances)
        up = by_descending({"x1": variances["S1R"], "x2": variances["S2R"]})
        down = by_ascending(
            {"x1": variances[f"RU{pairing[0]}"], "x2": variances[f"RU{pairing[1]}"]}
        )
        return (up, down)
    if kind == "diamond":
        down = by_ascending({"x1": variances["SR1"], "x2": variances["SR2"]})
        up = by_descending({"x1": variances["R1U"], "x2": variances["R2U"]})
        return (down, up)
    if kind == "three_node_direct":
        return (("x1", "x2"), ("x2",))
    if kind == "user_cooperation":
        return (("x1", "x2"), ("x1",))
    raise StructuralError(f"unknown scenario kind {kind!r}")


def make_scenario(
    kind: str,
    variances: Mapping[str, float],
    *,
    protocol: str = "DF",
    baseline: str = "none",
    phase_budget: float = 10.0,
    noise_power: float = 1.0,
    decoding_plans: tuple[Sequence[str], Sequence[str]] | None = None,
    pairing: tuple[int, int] | None = None,
) -> ScenarioSpec:
    """Build a spec from per-link variances; plans and pairing default to the natural ones."""
    if kind not in KINDS:
        raise StructuralError(f"unknown scenario kind {kind!r}")
    expected = _TOPOLOGY[kind]
    if sorted(variances.keys()) != sorted(expected):
        raise StructuralError(f"{kind} requires variances for links {expected}, got {sorted(variances)}")
    if kind == "x_network" and pairing is None:
        pairing = default_pairing(variances)
    if decoding_plans is None:
        plans = default_decoding_plans(kind, variances, pairing)
    else:
        plans = (tuple(decoding_plans[0]), tuple(decoding_plans[1]))
    links = tuple(LinkStats(link_id, variances[link_id]) for link_id in expected)
    return ScenarioSpec(
        kind=kind,
        protocol=protocol,
        baseline=baseline,
        links=links,
        phase_budget=phase_budget,
        noise_power=noise_power,
        decoding_plans=plans,
        pairing=pairing,
    )


# ---------------------------------------------------------------------------
# validation


def validate(spec: ScenarioSpec) -> ValidationResult:
    """Check the advisory consistency rules; structural problems raise at construction.

    Flags: DF composites whose two hops decode a different symbol first
    (inconsistent manner), AF composites (impractical; additionally a manner
    violation when the per-hop gain orderings oppose each other), and decoding
    plans that conflict with the strong/weak variance labels of their hop.
    """
    issues: list[ValidationIssue] = []
    composite = spec.kind in ("x_network", "diamond")
    plan1, plan2 = spec.decoding_plans

    if composite and spec.protocol == "DF" and plan1[0] != plan2[0]:
        issues.append(
            ValidationIssue(
                "inconsistent_decoding_manner",
                "violation",
                "inconsistent decoding manner (DF): the symbol decoded first on hop 1 "
                f"({plan1[0]}) differs from hop 2 ({plan2[0]}); end-to-end rates degrade "
                "through the per-hop minimum",
            )
        )

    if composite and spec.protocol == "AF":
        paths = _hop_links(spec)
        v = spec.variances
        rank1 = sorted(SYMBOLS, key=lambda s: (v[paths[s][0]], s))
        rank2 = sorted(SYMBOLS, key=lambda s: (v[paths[s][1]], s))
        if rank1 != rank2:
            issues.append(
                ValidationIssue(
                    "af_manner_mismatch",
                    "violation",
                    "AF composite: per-hop gain orderings oppose each other; the "
                    "amplified superposition cannot keep one power ordering on both hops",
                )
            )
        issues.append(
            ValidationIssue(
                "af_composite_impractical",
                "warning",
                "AF composite impractical: it requires both hops' gains sorted in the "
                "same manner, which yields poor throughput fairness",
            )
        )

    issues.extend(_label_issues(spec))
    return ValidationResult(ok=not issues, issues=tuple(issues))


def _label_issues(spec: ScenarioSpec) -> list[ValidationIssue]:
    """Decoding order vs strong/weak variance labels, per multi-link hop."""
    issues: list[ValidationIssue] = []
    v = spec.variances

    def check(phase: int, var_of: dict[str, float], downlink: bool) -> None:
        plan = [s for s in spec.decoding_plans[phase] if s in var_of]
        vals = [var_of[s] for s in plan]
        ok = all(a >= b for a, b in zip(vals, vals[1:])) if not downlink else all(
            a <= b for a, b in zip(vals, vals[1:])
        )
        if not ok:
            expected = "weakest owner first" if downlink else "strongest link first"
            issues.append(
                ValidationIssue(
                    "asymmetry_labels",
                    "violation",
                    f"phase-{phase + 1} decoding order conflicts with the strong/weak "
                    f"variance labels (expected {expected})",
                )
            )

    kind = spec.kind
    if kind == "uplink_relay":
        check(0, {"x1": v["S1R"], "x2": v["S2R"]}, downlink=False)
    elif kind == "downlink_relay":
        check(1, {"x1": v["RU1"], "x2": v["RU2"]}, downlink=True)
    elif kind == "x_network":
        paths = _hop_links(spec)
        check(0, {s: v[paths[s][0]] for s in SYMBOLS}, downlink=False)
        check(1, {s: v[paths[s][1]] for s in SYMBOLS}, downlink=True)
    elif kind == "diamond":
        paths = _hop_links(spec)
        check(0, {s: v[paths[s][0]] for s in SYMBOLS}, downlink=True)
        check(1, {s: v[paths[s][1]] for s in SYMBOLS}, downlink=False)
    elif kind == "user_cooperation":
        check(0, {"x1": v["SU1"], "x2": v["SU2"]}, downlink=True)
    # three_node_direct: both symbols target the same receiver; no labels to check.
    return issues


# ---------------------------------------------------------------------------
# evaluation


def _compose(spec: ScenarioSpec, h1: ArrayLike, h2: ArrayLike) -> np.ndarray:
    if spec.protocol == "AF":
        return af_end_to_end(h1, h2)
    return np.minimum(np.asarray(h1, dtype=np.float64), np.asarray(h2, dtype=np.float64))


def end_to_end_sinrs(
    spec: ScenarioSpec,
    gains: Mapping[str, ArrayLike],
    phase1: Mapping[str, ArrayLike],
    phase2: Mapping[str, ArrayLike],
) -> dict[str, np.ndarray]:
    """Per-symbol end-to-end effective SINR under the spec's decoding plans.

    ``gains`` maps link id -> instantaneous gain; ``phase1``/``phase2`` map
    symbol id -> allocated power for that phase.  Everything broadcasts, so
    powers shaped (A, 1) against gains shaped (B,) produce (A, B) results;
    that is how the optimizer grids and the Monte Carlo loop reuse this path.

    The composition per kind: relay kinds take the per-hop SIC chains and
    combine them (min for DF, the amplify-forward formula for AF); the
    direct-link kinds add phase SINRs for the forwarded symbol (maximal-ratio
    combining) and keep the relay/forwarder decoding constraint as a min.
    """
    for phase, powers in ((0, phase1), (1, phase2)):
        want = spec.phase_symbols(phase)
        if sorted(powers.keys()) != sorted(want):
            raise StructuralError(
                f"phase-{phase + 1} allocation covers {sorted(powers)}, expected {sorted(want)}"
            )
    missing = [l.link_id for l in spec.links if l.link_id not in gains]
    if missing:
        raise StructuralError(f"missing gains for links {missing}")

    o1, o2 = spec.decoding_plans
    noise = spec.noise_power
    kind = spec.kind

    def chain(powers: Mapping[str, ArrayLike], gain_of: Mapping[str, ArrayLike], order):
        comps = [SignalComponent(s, powers[s], gain_of[s]) for s in order]
        return sic_sinr_chain(comps, order, noise)

    if kind == "uplink_relay":
        h1 = chain(phase1, {"x1": gains["S1R"], "x2": gains["S2R"]}, o1)
        h2 = chain(phase2, {"x1": gains["RU"], "x2": gains["RU"]}, o2)
        return {s: _compose(spec, h1[s], h2[s]) for s in SYMBOLS}

    if kind == "downlink_relay":
        h1 = chain(phase1, {"x1": gains["SR"], "x2": gains["SR"]}, o1)
        h2 = {
            s: chain(phase2, {t: gains[f"RU{s[1]}"] for t in SYMBOLS}, o2)[s]
            for s in SYMBOLS
        }
        return {s: _compose(spec, h1[s], h2[s]) for s in SYMBOLS}

    if kind == "x_network":
        paths = _hop_links(spec)
        h1 = chain(phase1, {"x1": gains["S1R"], "x2": gains["S2R"]}, o1)
        h2 = {
            s: chain(phase2, {t: gains[paths[s][1]] for t in SYMBOLS}, o2)[s]
            for s in SYMBOLS
        }
        return {s: _compose(spec, h1[s], h2[s]) for s in SYMBOLS}

    if kind == "diamond":
        h1 = {
            s: chain(phase1, {t: gains[f"SR{s[1]}"] for t in SYMBOLS}, o1)[s]
            for s in SYMBOLS
        }
        h2 = chain(phase2, {"x1": gains["R1U"], "x2": gains["R2U"]}, o2)
        return {s: _compose(spec, h1[s], h2[s]) for s in SYMBOLS}

    if kind == "three_node_direct":
        relay = chain(phase1, {"x1": gains["SR"], "x2": gains["SR"]}, o1)
        direct = chain(phase1, {"x1": gains["SU"], "x2": gains["SU"]}, o1)
        forwarded = np.asarray(phase2["x2"], dtype=np.float64) * np.asarray(gains["RU"]) / noise
        return {
            "x1": np.minimum(relay["x1"], direct["x1"]),
            "x2": np.minimum(relay["x2"], direct["x2"] + forwarded),
        }

    if kind == "user_cooperation":
        weak = chain(phase1, {"x1": gains["SU1"], "x2": gains["SU1"]}, o1)
        strong = chain(phase1, {"x1": gains["SU2"], "x2": gains["SU2"]}, o1)
        forwarded = np.asarray(phase2["x1"], dtype=np.float64) * np.asarray(gains["U2U1"]) / noise
        return {
            "x1": np.minimum(strong["x1"], weak["x1"] + forwarded),
            "x2": strong["x2"],
        }

    raise StructuralError(f"unknown scenario kind {kind!r}")


def baseline_sinrs(
    spec: ScenarioSpec,
    gains: Mapping[str, ArrayLike],
    *,
    adaptive_power: bool = False,
) -> tuple[dict[str, np.ndarray], float, np.ndarray, np.ndarray]:
    """Orthogonal baseline evaluation: per-symbol SINRs, dof fraction, per-phase power.

    - tdma: alternate slots, full budget during a symbol's slot; per-phase power
      is the slot average, so an untrimmed cycle consumes the full 2*P_t.
    - fdma: half bandwidth and half power per symbol (noise halves with the
      band), always static.
    - maxmin_oma: one message per cycle through the relay whose worse hop
      variance is best; dof stays 1/2.

    ``adaptive_power`` trims the slack hop of each DF path per realization so
    its rate is unchanged at lower power (no-op for AF paths and fdma).
    """
    if spec.baseline == "none":
        raise StructuralError("spec has no baseline scheme")
    P = spec.phase_budget
    noise = spec.noise_power

    def path(sym_links: tuple[str, str]) -> tuple[np.ndarray, np.ndarray]:
        g1 = np.asarray(gains[sym_links[0]], dtype=np.float64)
        g2 = np.asarray(gains[sym_links[1]], dtype=np.float64)
        return g1, g2

    def trimmed_powers(g1, g2) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Full-power DF path with each hop scaled down to the end-to-end SINR."""
        s1 = P * g1 / noise
        s2 = P * g2 / noise
        e2e = np.minimum(s1, s2)
        if spec.protocol == "AF" or not adaptive_power:
            shape = np.broadcast(s1, s2).shape
            full = np.full(shape, float(P))
            if spec.protocol == "AF":
                e2e = af_end_to_end(s1, s2)
            return e2e, full, full
        with np.errstate(invalid="ignore", divide="ignore"):
            p1 = np.where(s1 > 0, P * e2e / np.where(s1 > 0, s1, 1.0), 0.0)
            p2 = np.where(s2 > 0, P * e2e / np.where(s2 > 0, s2, 1.0), 0.0)
        return e2e, p1, p2

    if spec.baseline in ("tdma", "fdma"):
        paths = _hop_links(spec)
        sinrs: dict[str, np.ndarray] = {}
        if spec.baseline == "tdma":
            p1_parts, p2_parts = [], []
            for s in SYMBOLS:
                g1, g2 = path(paths[s])
                e2e, p1, p2 = trimmed_powers(g1, g2)
                sinrs[s] = e2e
                p1_parts.append(p1)
                p2_parts.append(p2)
            # slots are sequential: the phase power is the per-slot average
            phase1 = 0.5 * (p1_parts[0] + p1_parts[1])
            phase2 = 0.5 * (p2_parts[0] + p2_parts[1])
            return sinrs, 0.25, phase1, phase2
        # fdma: each symbol sees (P/2) * g / (noise/2) = P*g/noise per hop
        shape = None
        for s in SYMBOLS:
            g1, g2 = path(paths[s])
            s1 = P * g1 / noise
            s2 = P * g2 / noise
            sinrs[s] = af_end_to_end(s1, s2) if spec.protocol == "AF" else np.minimum(s1, s2)
            shape = np.broadcast(s1, s2).shape
        full = np.full(shape, float(P))
        return sinrs, 0.25, full, full

    # maxmin_oma: single stream through the selected relay at full power
    v = spec.variances
    k = maxmin_select([v["SR1"], v["SR2"]], [v["R1U"], v["R2U"]])
    g1, g2 = path((f"SR{k}", f"R{k}U"))
    e2e, p1, p2 = trimmed_powers(g1, g2)
    return {"x1": e2e}, 0.5, p1, p2


def evaluate(
    spec: ScenarioSpec,
    realization: ChannelRealization,
    alloc=None,
    *,
    adaptive_power: bool = False,
) -> RateReport:
    """Rate report for one channel realization.

    For NOMA specs (``baseline == "none"``) an allocation with ``phase1`` and
    ``phase2`` power maps is required and evaluation is mechanical: budget
    feasibility is the allocation layer's contract, not enforced here.  For
    baseline specs the allocation must be None; the baseline's canonical power
    plan is used and ``adaptive_power`` enables its per-realization trimming.
    """
    gains = {l.link_id: realization.gain(l.link_id) for l in spec.links}
    if spec.baseline == "none":
        if alloc is None:
            raise StructuralError("NOMA evaluation requires a power allocation")
        if adaptive_power:
            raise StructuralError("adaptive_power applies to baseline schemes; use power_trim for NOMA")
        sinrs = end_to_end_sinrs(spec, gains, alloc.phase1, alloc.phase2)
        rates = {s: float(rate_from_sinr(sinrs[s], 0.5)) for s in sinrs}
        p1 = float(sum(np.asarray(v, dtype=np.float64) for v in alloc.phase1.values()))
        p2 = float(sum(np.asarray(v, dtype=np.float64) for v in alloc.phase2.values()))
    else:
        if alloc is not None:
            raise StructuralError("baseline schemes use their canonical power plan; pass alloc=None")
        sinrs, dof, phase1, phase2 = baseline_sinrs(spec, gains, adaptive_power=adaptive_power)
        rates = {s: float(rate_from_sinr(sinrs[s], dof)) for s in sinrs}
        p1 = float(phase1)
        p2 = float(phase2)
    return RateReport(
        per_symbol_rates=rates,
        sum_rate=float(sum(rates.values())),
        consumed_power=p1 + p2,
        per_phase_power=(p1, p2),
    )


def maxmin_select(sr_variances: Sequence[float], ru_variances: Sequence[float]) -> int:
    """1-based index of the relay maximizing min(source-hop, user-hop variance).

    Ties go to the smallest index.
    """
    if len(sr_variances) == 0 or len(sr_variances) != len(ru_variances):
        raise StructuralError("need equal-length nonempty variance lists")
    scores = [min(a, b) for a, b in zip(sr_variances, ru_variances)]
    best = max(range(len(scores)), key=lambda i: (scores[i], -i))
    return best + 1
