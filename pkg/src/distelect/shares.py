"""Discrete vote-share distributions over integer percentages.

A share distribution assigns probability mass to integer vote-share values
0..100 for one candidate in one state contest. Distributions are stored
sparsely (only shares with positive mass appear) and always normalized; the
fraction of raw model probability that survived parsing travels alongside as
``conforming_mass`` and never feeds back into the math.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyDistribution, NegativeMass, ShareOutOfRange

MIN_SHARE = 0
MAX_SHARE = 100

# Stored sums may drift a little through serialization; freshly computed
# sums over at most 101 doubles should be much tighter.
STORED_SUM_TOL = 1e-9
FRESH_SUM_TOL = 1e-12


@dataclass(frozen=True)
class CellMeta:
    """Identifies which (state, candidate, opponent, year) cell a distribution describes."""

    state: str
    candidate: str
    opponent: str
    year: int
    model: str
    prompt_fingerprint: str

    def __post_init__(self) -> None:
        if not self.state:
            raise ValueError("state must be non-empty")
        if not self.candidate or not self.opponent:
            raise ValueError("candidate and opponent must be non-empty")
        if self.candidate == self.opponent:
            raise ValueError(f"candidate and opponent are both {self.candidate!r}")
        if not isinstance(self.year, int) or not 1000 <= self.year <= 9999:
            raise ValueError(f"year must be a 4-digit integer, got {self.year!r}")


@dataclass(frozen=True)
class ShareDistribution:
    """Normalized probability mass over integer shares, plus parse metadata.

    ``masses`` maps share -> probability and is kept canonical: keys sorted
    ascending, zero-mass shares omitted, values summing to 1 within
    ``STORED_SUM_TOL``. ``conforming_mass`` records how much of the original
    model probability parsed as a valid integer share before renormalization.
    Instances are immutable; treat ``masses`` as read-only.
    """

    masses: dict[int, float]
    conforming_mass: float
    meta: CellMeta

    def __post_init__(self) -> None:
        canonical: dict[int, float] = {}
        for share in sorted(self.masses):
            if not isinstance(share, int):
                raise ShareOutOfRange(f"share {share!r} is not an integer")
            if share < MIN_SHARE or share > MAX_SHARE:
                raise ShareOutOfRange(f"share {share} outside [{MIN_SHARE}, {MAX_SHARE}]")
            prob = self.masses[share]
            if prob < 0.0:
                raise NegativeMass(f"share {share} has negative probability {prob}")
            if prob > 0.0:
                canonical[share] = float(prob)
        if not canonical:
            raise EmptyDistribution("no share carries positive probability")
        total = math.fsum(canonical.values())
        if abs(total - 1.0) > STORED_SUM_TOL:
            raise ValueError(f"masses sum to {total!r}, expected 1 within {STORED_SUM_TOL}")
        if not 0.0 <= self.conforming_mass <= 1.0:
            raise ValueError(f"conforming_mass {self.conforming_mass!r} outside [0, 1]")
        object.__setattr__(self, "masses", canonical)

    def support(self) -> list[int]:
        """Shares with positive probability, ascending."""
        return list(self.masses)


def make_distribution(
    raw_masses: dict[int, float],
    conforming_mass: float,
    meta: CellMeta,
) -> ShareDistribution:
    """Scale raw nonnegative mass so it sums to one and wrap it up.

    ``conforming_mass`` is stored untouched; it describes the input, not the
    normalized output.
    """
    if not raw_masses:
        raise EmptyDistribution("raw_masses is empty")
    for share in raw_masses:
        if not isinstance(share, int):
            raise ShareOutOfRange(f"share {share!r} is not an integer")
        if share < MIN_SHARE or share > MAX_SHARE:
            raise ShareOutOfRange(f"share {share} outside [{MIN_SHARE}, {MAX_SHARE}]")
        if raw_masses[share] < 0.0:
            raise NegativeMass(f"share {share} has negative mass {raw_masses[share]}")
    total = math.fsum(raw_masses.values())
    if total <= 0.0:
        raise EmptyDistribution("all mass is zero")
    scaled = {
        share: raw_masses[share] / total
        for share in sorted(raw_masses)
        if raw_masses[share] > 0.0
    }
    return ShareDistribution(scaled, conforming_mass, meta)


def weighted_mean(dist: ShareDistribution) -> float:
    """Mean share: the sum of share times probability."""
    return math.fsum(share * prob for share, prob in dist.masses.items())


def cdf_below(dist: ShareDistribution, threshold: int) -> float:
    """Total probability strictly below ``threshold``.

    ``threshold`` must itself be a share in 0..100, so the largest allowed
    query is ``cdf_below(d, 100)``; the probability at 100 is never included.
    """
    if not isinstance(threshold, int) or threshold < MIN_SHARE or threshold > MAX_SHARE:
        raise ShareOutOfRange(f"threshold {threshold!r} outside [{MIN_SHARE}, {MAX_SHARE}]")
    return math.fsum(prob for share, prob in dist.masses.items() if share < threshold)
