"""Exact Electoral College outcome distributions from state win probabilities.

Each state contributes its full electoral-vote block to whichever candidate
wins it (winner-take-all, independent states). The distribution of the first
candidate's total is the coefficient vector of the product over states of
``lose_prob + win_prob * z**votes``, computed by iterated dense polynomial
multiplication. A subset-enumeration route is kept alongside as an oracle for
small instances.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import (
    OddTotal,
    ProbabilityOutOfRange,
    SchemaError,
    StateMismatch,
    ThresholdOutOfRange,
    TooManyStates,
)

MAJORITY_THRESHOLD = 270
BRUTE_FORCE_MAX_STATES = 20

# 2024 apportionment: 50 states plus the District of Columbia, 538 votes.
ELECTORAL_VOTES_2024: dict[str, int] = {
    "Alabama": 9,
    "Alaska": 3,
    "Arizona": 11,
    "Arkansas": 6,
    "California": 54,
    "Colorado": 10,
    "Connecticut": 7,
    "Delaware": 3,
    "District of Columbia": 3,
    "Florida": 30,
    "Georgia": 16,
    "Hawaii": 4,
    "Idaho": 4,
    "Illinois": 19,
    "Indiana": 11,
    "Iowa": 6,
    "Kansas": 6,
    "Kentucky": 8,
    "Louisiana": 8,
    "Maine": 4,
    "Maryland": 10,
    "Massachusetts": 11,
    "Michigan": 15,
    "Minnesota": 10,
    "Mississippi": 6,
    "Missouri": 10,
    "Montana": 4,
    "Nebraska": 5,
    "Nevada": 6,
    "New Hampshire": 4,
    "New Jersey": 14,
    "New Mexico": 5,
    "New York": 28,
    "North Carolina": 16,
    "North Dakota": 3,
    "Ohio": 17,
    "Oklahoma": 7,
    "Oregon": 8,
    "Pennsylvania": 19,
    "Rhode Island": 4,
    "South Carolina": 9,
    "South Dakota": 3,
    "Tennessee": 11,
    "Texas": 40,
    "Utah": 6,
    "Vermont": 3,
    "Virginia": 13,
    "Washington": 12,
    "West Virginia": 4,
    "Wisconsin": 10,
    "Wyoming": 3,
}


@dataclass(frozen=True)
class EVAllocation:
    """Fixed electoral-vote count per state."""

    votes: dict[str, int]

    def __post_init__(self) -> None:
        if not self.votes:
            raise ValueError("allocation is empty")
        for state, count in self.votes.items():
            if not state:
                raise ValueError("allocation contains an empty state name")
            if not isinstance(count, int) or count < 1:
                raise ValueError(f"{state!r}: electoral votes must be a positive integer, got {count!r}")

    @property
    def total(self) -> int:
        return sum(self.votes.values())


def default_allocation() -> EVAllocation:
    """The bundled 2024 apportionment (51 units, 538 votes)."""
    return EVAllocation(dict(ELECTORAL_VOTES_2024))


def load_allocation(path) -> EVAllocation:
    """Read a ``state,electoral_votes`` CSV with a header row."""
    votes: dict[str, int] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["state", "electoral_votes"]:
            raise SchemaError(f"{path}: expected header 'state,electoral_votes'")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not col.strip() for col in row):
                continue
            if len(row) < 2:
                raise SchemaError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            state = row[0].strip()
            if not state:
                raise SchemaError(f"{path}:{lineno}: empty state name")
            if state in votes:
                raise SchemaError(f"{path}:{lineno}: duplicate state {state!r}")
            try:
                count = int(row[1].strip())
            except ValueError:
                raise SchemaError(f"{path}:{lineno}: electoral_votes is not an integer: {row[1]!r}") from None
            if count < 1:
                raise SchemaError(f"{path}:{lineno}: electoral_votes must be >= 1, got {count}")
            votes[state] = count
    if not votes:
        raise SchemaError(f"{path}: no allocation rows")
    return EVAllocation(votes)


@dataclass(frozen=True, eq=False)
class ECDistribution:
    """Dense PMF over electoral-vote totals 0..e_total for candidate c1."""

    pmf: np.ndarray
    e_total: int

    def __post_init__(self) -> None:
        pmf = np.asarray(self.pmf, dtype=float)
        if pmf.shape != (self.e_total + 1,):
            raise ValueError(f"pmf has length {pmf.shape}, expected {self.e_total + 1}")
        if np.any(pmf < 0.0):
            raise ValueError("pmf contains negative entries")
        total = math.fsum(pmf)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"pmf sums to {total!r}, expected 1 within 1e-9")
        pmf.setflags(write=False)
        object.__setattr__(self, "pmf", pmf)


def _ordered_states(
    state_wins: Mapping[str, float], alloc: EVAllocation
) -> list[tuple[str, int, float]]:
    """Validate the instance and fix a deterministic processing order."""
    missing = sorted(set(alloc.votes) - set(state_wins))
    extra = sorted(set(state_wins) - set(alloc.votes))
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"states without a win probability: {', '.join(missing)}")
        if extra:
            parts.append(f"win probabilities without an allocation: {', '.join(extra)}")
        raise StateMismatch("; ".join(parts))
    for state, p_win in state_wins.items():
        if not 0.0 <= p_win <= 1.0:
            raise ProbabilityOutOfRange(f"{state!r}: probability {p_win!r} outside [0, 1]")
    # Descending vote count, name as tiebreaker: deterministic output.
    return sorted(
        ((state, alloc.votes[state], float(state_wins[state])) for state in alloc.votes),
        key=lambda item: (-item[1], item[0]),
    )


def ec_distribution(state_wins: Mapping[str, float], alloc: EVAllocation) -> ECDistribution:
    """Exact outcome PMF via iterated dense polynomial multiplication.

    One pass per state: multiplying by ``lose + win * z**votes`` shifts a
    scaled copy of the running coefficients up by that state's vote count.
    """
    ordered = _ordered_states(state_wins, alloc)
    total = alloc.total
    pmf = np.zeros(total + 1)
    pmf[0] = 1.0
    for _, votes, p_win in ordered:
        nxt = pmf * (1.0 - p_win)
        nxt[votes:] += pmf[: total + 1 - votes] * p_win
        pmf = nxt
    return ECDistribution(pmf, total)


def brute_force_ec(state_wins: Mapping[str, float], alloc: EVAllocation) -> ECDistribution:
    """Outcome PMF by full subset enumeration; oracle for small instances.

    Every subset of states is a possible set of c1 victories; its probability
    is the product of win probabilities inside and lose probabilities outside,
    accumulated at the subset's vote total.
    """
    if len(alloc.votes) > BRUTE_FORCE_MAX_STATES:
        raise TooManyStates(
            f"{len(alloc.votes)} states exceeds the enumeration guard of {BRUTE_FORCE_MAX_STATES}"
        )
    ordered = _ordered_states(state_wins, alloc)
    n = len(ordered)
    subsets = np.arange(1 << n, dtype=np.int64)
    probs = np.ones(1 << n)
    totals = np.zeros(1 << n, dtype=np.int64)
    for bit, (_, votes, p_win) in enumerate(ordered):
        won = (subsets >> bit) & 1
        probs *= np.where(won == 1, p_win, 1.0 - p_win)
        totals += won * votes
    pmf = np.bincount(totals, weights=probs, minlength=alloc.total + 1)
    return ECDistribution(pmf, alloc.total)


def win_chance(dist: ECDistribution, threshold: int = MAJORITY_THRESHOLD) -> float:
    """Probability of reaching at least ``threshold`` electoral votes."""
    if not isinstance(threshold, int) or not 0 <= threshold <= dist.e_total + 1:
        raise ThresholdOutOfRange(
            f"threshold {threshold!r} outside [0, {dist.e_total + 1}]"
        )
    return float(math.fsum(dist.pmf[threshold:]))


def exact_tie_probability(dist: ECDistribution) -> float:
    """Probability of an exact even split; rejects odd totals as misuse."""
    if dist.e_total % 2 != 0:
        raise OddTotal(f"total of {dist.e_total} votes cannot split evenly")
    return float(dist.pmf[dist.e_total // 2])


def expected_votes(dist: ECDistribution) -> float:
    """Mean electoral-vote total for candidate c1."""
    return float(np.dot(np.arange(dist.e_total + 1), dist.pmf))
