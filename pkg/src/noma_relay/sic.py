"""Successive-interference-cancellation arithmetic for superposed signals.

The receiver decodes symbols in a fixed order; each decoded symbol is
subtracted from the aggregate, so a symbol only sees the symbols decoded after
it as interference and the last one is corrupted by noise alone.

Every function broadcasts over numpy arrays: a "power" or "gain" may be a
scalar, a vector of Monte Carlo trials, or an optimizer grid, and the results
follow numpy broadcasting rules.  This is what lets one code path serve the
scalar contract, the trial loop, and the allocation grid search.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence, Union

import numpy as np

from .errors import StructuralError

__all__ = [
    "ArrayLike",
    "SignalComponent",
    "HopRate",
    "sic_sinr_chain",
    "rate_from_sinr",
    "df_compose",
    "af_end_to_end",
    "VALID_DOF_FRACTIONS",
]

ArrayLike = Union[float, np.ndarray]

# 1/2: half-duplex two-phase relaying; 1/4: half-duplex plus an orthogonal
# two-user split (TDMA/FDMA baselines); 1: single-hop sanity checks.
VALID_DOF_FRACTIONS = (1.0, 0.5, 0.25)

_LOG2 = np.log(2.0)


class SignalComponent(NamedTuple):
    """One superposed symbol as seen by a receiver: allocated power and link gain."""

    symbol_id: str
    power: ArrayLike
    gain: ArrayLike


@dataclass(frozen=True)
class HopRate:
    """Per-symbol result of decoding one hop."""

    symbol_id: str
    rate: float
    sinr: float


def _check_nonnegative(name: str, value: ArrayLike) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise StructuralError(f"{name} must be finite and >= 0")
    return arr


def sic_sinr_chain(
    components: Sequence[SignalComponent],
    order: Sequence[str],
    noise_power: ArrayLike,
) -> dict[str, np.ndarray]:
    """Per-symbol SINR along a SIC decoding chain.

    For the symbol decoded at position k:
        sinr_k = p_k g_k / (sum over later-decoded j of p_j g_j + noise).

    Returns a map symbol_id -> sinr with full array broadcasting.  The suffix
    interference sums are accumulated from the tail so the telescoping
    identity prod(1 + sinr_k) = 1 + sum(p_k g_k)/noise holds to near machine
    precision.
    """
    symbols = [c.symbol_id for c in components]
    if len(set(symbols)) != len(symbols):
        raise StructuralError(f"duplicate symbol ids in components: {symbols}")
    if sorted(symbols) != sorted(order):
        raise StructuralError(
            f"decoding order {list(order)!r} is not a permutation of component symbols {symbols!r}"
        )
    noise = np.asarray(noise_power, dtype=np.float64)
    if np.any(noise <= 0):
        raise StructuralError("noise_power must be > 0")

    received = {}
    for c in components:
        p = _check_nonnegative(f"power of {c.symbol_id!r}", c.power)
        g = _check_nonnegative(f"gain of {c.symbol_id!r}", c.gain)
        received[c.symbol_id] = p * g

    sinr: dict[str, np.ndarray] = {}
    tail = np.asarray(0.0)
    for sym in reversed(list(order)):
        sinr[sym] = received[sym] / (tail + noise)
        tail = tail + received[sym]
    return sinr


def rate_from_sinr(sinr: ArrayLike, dof_fraction: float) -> np.ndarray:
    """Spectral efficiency dof_fraction * log2(1 + sinr).

    The dof fraction accounts for orthogonal resource splits: 1/2 for a
    half-duplex relayed symbol, 1/4 for OMA baselines that further split the
    cycle between two users, 1 for single-hop checks.
    """
    if dof_fraction not in VALID_DOF_FRACTIONS:
        raise StructuralError(
            f"dof_fraction must be one of {VALID_DOF_FRACTIONS}, got {dof_fraction!r}"
        )
    s = _check_nonnegative("sinr", sinr)
    return dof_fraction * np.log1p(s) / _LOG2


def df_compose(hop1_rate: ArrayLike, hop2_rate: ArrayLike) -> np.ndarray:
    """Decode-and-forward end-to-end rate: the relay re-encodes, so the slower hop limits."""
    r1 = _check_nonnegative("hop1_rate", hop1_rate)
    r2 = _check_nonnegative("hop2_rate", hop2_rate)
    return np.minimum(r1, r2)


def af_end_to_end(hop1_sinr: ArrayLike, hop2_sinr: ArrayLike) -> np.ndarray:
    """Amplify-and-forward effective SINR: g1*g2 / (g1 + g2 + 1).

    Variable-gain relaying; the +1 keeps the forwarded noise exactly, so the
    result is strictly below min(g1, g2) whenever both hops are alive.
    """
    g1 = _check_nonnegative("hop1_sinr", hop1_sinr)
    g2 = _check_nonnegative("hop2_sinr", hop2_sinr)
    return g1 * g2 / (g1 + g2 + 1.0)
