"""Tie-excluded win probabilities for a two-candidate state race.

A candidate wins a sampled outcome pair only on a strictly greater integer
share; equal shares are a tie. Tie outcomes are excluded by conditioning on
the race being decided, so the two win probabilities always sum to one. The
raw tie mass is kept so nothing is hidden by the conditioning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AllTies
from .shares import ShareDistribution, cdf_below


@dataclass(frozen=True)
class StateRace:
    """The two candidates' share distributions for one state and year."""

    c1: ShareDistribution
    c2: ShareDistribution

    def __post_init__(self) -> None:
        m1, m2 = self.c1.meta, self.c2.meta
        if m1.state != m2.state:
            raise ValueError(f"state mismatch: {m1.state!r} vs {m2.state!r}")
        if m1.year != m2.year:
            raise ValueError(f"year mismatch: {m1.year} vs {m2.year}")
        if m1.candidate != m2.opponent or m2.candidate != m1.opponent:
            raise ValueError(
                "candidates do not cross-reference: "
                f"{m1.candidate!r} vs {m1.opponent!r} and {m2.candidate!r} vs {m2.opponent!r}"
            )

    def swapped(self) -> "StateRace":
        """The same race seen from the other candidate's side."""
        return StateRace(self.c2, self.c1)


@dataclass(frozen=True)
class WinProbabilities:
    """Win probabilities conditioned on no integer-share tie.

    ``p_c1_wins + p_c2_wins == 1`` up to rounding; ``raw_tie_mass`` is the
    unconditioned probability of equal shares.
    """

    p_c1_wins: float
    p_c2_wins: float
    raw_tie_mass: float


def tie_probability(race: StateRace) -> float:
    """Probability that both candidates land on the same integer share."""
    other = race.c2.masses
    return math.fsum(
        prob * other[share] for share, prob in race.c1.masses.items() if share in other
    )


def win_probability(race: StateRace) -> WinProbabilities:
    """Tie-excluded win probabilities for the race.

    The raw chance that c1 wins outright is the sum over c1's shares of the
    probability of that share times the probability c2 falls strictly below
    it; c2 symmetrically. Both are then renormalized by the total decided
    mass, which drops ties from consideration.
    """
    raw_c1 = math.fsum(
        prob * cdf_below(race.c2, share) for share, prob in race.c1.masses.items()
    )
    raw_c2 = math.fsum(
        prob * cdf_below(race.c1, share) for share, prob in race.c2.masses.items()
    )
    decided = raw_c1 + raw_c2
    if decided == 0.0:
        raise AllTies(
            "every outcome pair is a tie (identical point masses); "
            "win probabilities are undefined"
        )
    return WinProbabilities(raw_c1 / decided, raw_c2 / decided, tie_probability(race))
