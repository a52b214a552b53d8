"""Rayleigh-fading link statistics, reproducible gain sampling, and asymmetry ratios.

A link is described only by the average power of its channel (the variance
sigma^2 of the underlying complex Gaussian).  Instantaneous power gains |h|^2
are therefore exponential with mean sigma^2.  All values are noise-normalized:
transmit SNR enters through the power budget, never through the gains.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import StructuralError

__all__ = [
    "LinkStats",
    "ChannelRealization",
    "RngStream",
    "sample_gain",
    "sample_gains",
    "sample_realization",
    "sample_realization_block",
    "degree_of_asymmetry",
    "hop_asymmetry",
    "relay_asymmetry",
    "NOMA_FAVORABLE_THRESHOLD",
]

# Rule of thumb: NOMA outperforms the max-min OMA baseline once the network
# asymmetry product exceeds this value.
NOMA_FAVORABLE_THRESHOLD = 3.0


@dataclass(frozen=True)
class LinkStats:
    """Statistical description of one fading link (its average channel power)."""

    link_id: str
    variance: float

    def __post_init__(self) -> None:
        v = float(self.variance)
        if not np.isfinite(v) or v <= 0.0:
            raise StructuralError(
                f"link {self.link_id!r}: variance must be a positive finite real, got {self.variance!r}"
            )
        object.__setattr__(self, "variance", v)


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of instantaneous power gains |h|^2, keyed by link id."""

    gains: Mapping[str, float]

    def __post_init__(self) -> None:
        for link_id, g in self.gains.items():
            if not np.isfinite(g) or g < 0.0:
                raise StructuralError(f"link {link_id!r}: gain must be finite and >= 0, got {g!r}")

    def gain(self, link_id: str) -> float:
        try:
            return self.gains[link_id]
        except KeyError:
            raise StructuralError(f"realization has no gain for link {link_id!r}") from None


@dataclass(frozen=True)
class RngStream:
    """Counter-addressed substream of a master seed.

    Equal (master_seed, substream_index) pairs produce bit-identical draws;
    distinct indices produce statistically independent sequences.  Streams are
    cheap value objects: a fresh generator is derived on demand, so sampling
    from the same stream twice repeats the same sequence.  This is what makes
    Monte Carlo results independent of trial scheduling and worker count.
    """

    master_seed: int
    substream_index: int = 0

    def __post_init__(self) -> None:
        if self.substream_index < 0:
            raise StructuralError("substream_index must be >= 0")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.substream_index,))
        return np.random.Generator(np.random.PCG64(seq))


def sample_realization(links: Sequence[LinkStats], stream: RngStream) -> ChannelRealization:
    """Draw one instantaneous gain per link, in link order, from the stream."""
    ids = [s.link_id for s in links]
    if len(set(ids)) != len(ids):
        raise StructuralError(f"duplicate link ids in {ids}")
    unit = stream.generator().standard_exponential(len(links))
    return ChannelRealization({s.link_id: s.variance * u for s, u in zip(links, unit)})


def sample_gain(stats: LinkStats, stream: RngStream) -> float:
    """One squared-envelope gain draw: exponential with mean ``stats.variance``."""
    return sample_realization([stats], stream).gains[stats.link_id]


def sample_gains(stats: LinkStats, stream: RngStream, count: int) -> np.ndarray:
    """A vector of ``count`` consecutive gain draws from one substream."""
    if count < 1:
        raise StructuralError("count must be >= 1")
    return stats.variance * stream.generator().standard_exponential(count)


def sample_realization_block(
    links: Sequence[LinkStats],
    master_seed: int,
    trial_indices: Sequence[int],
    *,
    mean_gains: bool = False,
) -> dict[str, np.ndarray]:
    """Gains for many Monte Carlo trials at once, one substream per trial index.

    Row t of each returned array equals ``sample_realization(links,
    RngStream(master_seed, trial_indices[t]))``, which is what makes results
    independent of chunking and threading.  With ``mean_gains`` the fading is
    switched off and every gain equals its link variance (degenerate channels
    for deterministic tests).
    """
    ids = [s.link_id for s in links]
    if len(set(ids)) != len(ids):
        raise StructuralError(f"duplicate link ids in {ids}")
    n = len(trial_indices)
    out = {s.link_id: np.empty(n, dtype=np.float64) for s in links}
    if mean_gains:
        for s in links:
            out[s.link_id].fill(s.variance)
        return out
    for row, t in enumerate(trial_indices):
        unit = RngStream(master_seed, int(t)).generator().standard_exponential(len(links))
        for i, s in enumerate(links):
            out[s.link_id][row] = s.variance * unit[i]
    return out


def degree_of_asymmetry(strong_variance: float, weak_variance: float) -> float:
    """Ratio of the strong link's variance to the weak link's.

    Values below 1 mean the strong/weak labels are misassigned; scenario
    validation flags that case rather than this function.
    """
    if strong_variance <= 0 or weak_variance <= 0:
        raise StructuralError("variances must be positive")
    return strong_variance / weak_variance


def hop_asymmetry(variances: Sequence[float]) -> float:
    """Asymmetry of one hop: max/min variance ratio; 1.0 for a one-to-one hop."""
    if len(variances) == 0:
        raise StructuralError("hop has no links")
    if any(v <= 0 for v in variances):
        raise StructuralError("variances must be positive")
    if len(variances) == 1:
        return 1.0
    return max(variances) / min(variances)


def relay_asymmetry(
    uplink_strong: float,
    uplink_weak: float,
    downlink_strong: float,
    downlink_weak: float,
) -> float:
    """Network asymmetry: product of the per-hop strong/weak variance ratios.

    A one-to-one hop contributes a factor of 1 (pass equal variances for it).
    """
    return degree_of_asymmetry(uplink_strong, uplink_weak) * degree_of_asymmetry(
        downlink_strong, downlink_weak
    )
