"""Backtest error tables, average-case maps, matchup grids, and swing-state bias.

Everything here compares distribution summaries against ground truth or runs
the full per-state pipeline over many hypothetical pairings. The error metric
throughout is the absolute difference between a distribution's weighted mean
and the actual share; standard deviations are population form (divide by N),
since the covered states are the whole population of interest.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .college import (
    MAJORITY_THRESHOLD,
    EVAllocation,
    default_allocation,
    ec_distribution,
    expected_votes,
    win_chance,
)
from .errors import DistelectError, ExactMeanTie, MissingCell, SchemaError
from .ingest import CellRequest, EndpointConfig, fetch_many
from .pairwise import StateRace, win_probability
from .shares import ShareDistribution, weighted_mean
from .store import CellStore

DEFAULT_SWING_MARGIN = 5.0


@dataclass(frozen=True)
class GroundTruth:
    """Actual share percentages keyed by (state, candidate) for one year."""

    records: dict[tuple[str, str], float]
    year: int

    def __post_init__(self) -> None:
        if not self.records:
            raise ValueError("ground truth is empty")
        if not isinstance(self.year, int) or not 1000 <= self.year <= 9999:
            raise ValueError(f"year must be a 4-digit integer, got {self.year!r}")
        per_state: dict[str, list[str]] = {}
        names: list[str] = []
        for (state, candidate), share in self.records.items():
            if not 0.0 <= share <= 100.0:
                raise ValueError(f"{state!r}/{candidate!r}: share {share!r} outside [0, 100]")
            per_state.setdefault(state, []).append(candidate)
            if candidate not in names:
                names.append(candidate)
        if len(names) != 2:
            raise ValueError(f"expected exactly two candidates, got {names!r}")
        for state, candidates in per_state.items():
            if sorted(candidates) != sorted(names):
                raise ValueError(f"{state!r}: expected one entry per candidate, got {candidates!r}")

    @property
    def candidates(self) -> tuple[str, str]:
        """The two candidate names in first-seen order."""
        names: list[str] = []
        for _, candidate in self.records:
            if candidate not in names:
                names.append(candidate)
        return (names[0], names[1])

    def states(self) -> list[str]:
        """Covered states in first-seen order."""
        seen: list[str] = []
        for state, _ in self.records:
            if state not in seen:
                seen.append(state)
        return seen


def load_ground_truth(path, year: int) -> GroundTruth:
    """Read a ``state,candidate,share_percent`` CSV with a header row."""
    records: dict[tuple[str, str], float] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["state", "candidate", "share_percent"]
        if header is None or [h.strip().lower() for h in header[:3]] != expected:
            raise SchemaError(f"{path}: expected header 'state,candidate,share_percent'")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not col.strip() for col in row):
                continue
            if len(row) < 3:
                raise SchemaError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            state, candidate = row[0].strip(), row[1].strip()
            if not state or not candidate:
                raise SchemaError(f"{path}:{lineno}: empty state or candidate")
            if (state, candidate) in records:
                raise SchemaError(f"{path}:{lineno}: duplicate row for {state!r}/{candidate!r}")
            try:
                share = float(row[2])
            except ValueError:
                raise SchemaError(f"{path}:{lineno}: share_percent is not a number: {row[2]!r}") from None
            records[(state, candidate)] = share
    try:
        return GroundTruth(records, year)
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class ErrorReport:
    """Absolute error between distribution means and actual shares, per state."""

    candidates: tuple[str, str]
    per_state: dict[str, dict[str, float]]
    means: dict[str, float]
    stddevs: dict[str, float]


def _match_cells(
    cells: Sequence[ShareDistribution], truth: GroundTruth
) -> dict[tuple[str, str], ShareDistribution]:
    by_key = {(cell.meta.state, cell.meta.candidate): cell for cell in cells}
    missing = sorted(set(truth.records) - set(by_key))
    extra = sorted(set(by_key) - set(truth.records))
    if missing or extra:
        parts = []
        if missing:
            parts.append("no cell for: " + ", ".join(f"{s}/{c}" for s, c in missing))
        if extra:
            parts.append("no ground truth for: " + ", ".join(f"{s}/{c}" for s, c in extra))
        raise MissingCell("; ".join(parts))
    return by_key


def error_table(cells: Sequence[ShareDistribution], truth: GroundTruth) -> ErrorReport:
    """Per-state absolute error of the distribution means, with per-candidate aggregates."""
    by_key = _match_cells(cells, truth)
    candidates = truth.candidates
    per_state = {
        state: {
            candidate: abs(weighted_mean(by_key[(state, candidate)]) - truth.records[(state, candidate)])
            for candidate in candidates
        }
        for state in truth.states()
    }
    means: dict[str, float] = {}
    stddevs: dict[str, float] = {}
    count = len(per_state)
    for candidate in candidates:
        errors = [per_state[state][candidate] for state in per_state]
        mean = math.fsum(errors) / count
        variance = math.fsum((err - mean) ** 2 for err in errors) / count
        means[candidate] = mean
        stddevs[candidate] = math.sqrt(variance)
    return ErrorReport(candidates, per_state, means, stddevs)


def average_case_map(races: Mapping[str, StateRace]) -> dict[str, str]:
    """Winner per state by pitting the two distributions' weighted means.

    A state whose means are exactly equal has no average-case winner; all such
    states are collected and reported in one error.
    """
    if not races:
        raise ValueError("races is empty")
    winners: dict[str, str] = {}
    tied: list[str] = []
    for state, race in races.items():
        mean_c1 = weighted_mean(race.c1)
        mean_c2 = weighted_mean(race.c2)
        if mean_c1 > mean_c2:
            winners[state] = race.c1.meta.candidate
        elif mean_c2 > mean_c1:
            winners[state] = race.c2.meta.candidate
        else:
            tied.append(state)
    if tied:
        raise ExactMeanTie("exactly equal mean shares in: " + ", ".join(tied))
    return winners


@dataclass(frozen=True)
class MatchupCell:
    """One grid entry, from the row candidate's perspective."""

    expected_ev: float
    win_prob: float


@dataclass(frozen=True)
class MatchupGrid:
    """Head-to-head results for one election year.

    ``cells[(row, col)]`` holds the row candidate's expected electoral votes
    and probability of reaching the majority threshold against the column
    candidate.
    """

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    year: int
    cells: dict[tuple[str, str], MatchupCell]

    def __post_init__(self) -> None:
        for row in self.rows:
            for col in self.cols:
                if (row, col) not in self.cells:
                    raise ValueError(f"grid cell missing for {row!r} vs {col!r}")
        for (row, col), cell in self.cells.items():
            if not 0.0 <= cell.win_prob <= 1.0:
                raise ValueError(f"{row!r} vs {col!r}: win_prob {cell.win_prob!r} outside [0, 1]")


def run_matchups(
    democrats: Sequence[str],
    republicans: Sequence[str],
    years: Sequence[int],
    *,
    store: CellStore | None = None,
    cfg: EndpointConfig | None = None,
    alloc: EVAllocation | None = None,
    threshold: int | None = None,
) -> list[MatchupGrid]:
    """One grid per year over every (democrat, republican) pairing.

    Rows are the first list and cell values are from the row candidate's
    perspective. Cells come from ``store`` when present; anything missing is
    fetched through ``cfg`` with bounded parallelism and added to the store,
    so a complete store performs no requests at all.
    """
    if not democrats or not republicans or not years:
        raise ValueError("democrats, republicans, and years must all be non-empty")
    if alloc is None:
        alloc = default_allocation()
    if store is None:
        store = CellStore()
    if threshold is None:
        threshold = alloc.total // 2 + 1 if alloc.total != 538 else MAJORITY_THRESHOLD
    states = list(alloc.votes)

    missing: list[CellRequest] = []
    for year in years:
        for dem in democrats:
            for rep in republicans:
                for state in states:
                    for candidate, opponent in ((dem, rep), (rep, dem)):
                        if (state, candidate, opponent, year) not in store:
                            missing.append(CellRequest(state, candidate, opponent, year))
    if missing:
        if cfg is None:
            first = missing[0]
            raise MissingCell(
                f"{len(missing)} cells absent from the store and no endpoint configured; "
                f"first gap: year {first.year}, {first.candidate!r} vs {first.opponent!r} "
                f"in {first.state!r}"
            )
        fetched, failures = fetch_many(cfg, missing)
        if failures:
            request, exc = failures[0]
            context = (
                f"year {request.year}, {request.candidate!r} vs {request.opponent!r}, "
                f"state {request.state!r}"
            )
            if isinstance(exc, DistelectError):
                raise type(exc)(f"{context}: {exc}") from exc
            raise exc
        for cell in fetched:
            store.add(cell)

    grids: list[MatchupGrid] = []
    for year in years:
        cells: dict[tuple[str, str], MatchupCell] = {}
        for dem in democrats:
            for rep in republicans:
                state_wins: dict[str, float] = {}
                for state in states:
                    try:
                        race = store.race(state, dem, rep, year)
                        state_wins[state] = win_probability(race).p_c1_wins
                    except DistelectError as exc:
                        raise type(exc)(
                            f"year {year}, {dem!r} vs {rep!r}, state {state!r}: {exc}"
                        ) from exc
                dist = ec_distribution(state_wins, alloc)
                cells[(dem, rep)] = MatchupCell(
                    expected_ev=expected_votes(dist),
                    win_prob=win_chance(dist, threshold),
                )
        grids.append(MatchupGrid(tuple(democrats), tuple(republicans), year, cells))
    return grids


@dataclass(frozen=True)
class GroupBias:
    """Mean signed error (predicted minus actual) per candidate within one group."""

    states: tuple[str, ...]
    mean_signed_error: dict[str, float | None]


@dataclass(frozen=True)
class SwingBiasReport:
    """Signed prediction error split into swing and safe states.

    A state is swing when the actual two-candidate margin is strictly below
    ``margin_threshold`` percentage points. An empty group reports ``None``
    means rather than pretending to a number.
    """

    margin_threshold: float
    candidates: tuple[str, str]
    swing: GroupBias
    safe: GroupBias
    overall: dict[str, float]


def swing_bias_report(
    cells: Sequence[ShareDistribution],
    truth: GroundTruth,
    margin_threshold: float = DEFAULT_SWING_MARGIN,
) -> SwingBiasReport:
    """Group states by actual closeness and compare signed errors across groups."""
    if margin_threshold < 0:
        raise ValueError(f"margin_threshold must be >= 0, got {margin_threshold}")
    by_key = _match_cells(cells, truth)
    first, second = truth.candidates
    swing_states: list[str] = []
    safe_states: list[str] = []
    for state in truth.states():
        margin = abs(truth.records[(state, first)] - truth.records[(state, second)])
        (swing_states if margin < margin_threshold else safe_states).append(state)

    signed = {
        (state, candidate): weighted_mean(by_key[(state, candidate)]) - truth.records[(state, candidate)]
        for state in truth.states()
        for candidate in (first, second)
    }

    def group_means(states: list[str]) -> dict[str, float | None]:
        if not states:
            return {first: None, second: None}
        return {
            candidate: math.fsum(signed[(state, candidate)] for state in states) / len(states)
            for candidate in (first, second)
        }

    overall = {
        candidate: math.fsum(signed[(state, candidate)] for state in truth.states())
        / len(truth.states())
        for candidate in (first, second)
    }
    return SwingBiasReport(
        margin_threshold=float(margin_threshold),
        candidates=(first, second),
        swing=GroupBias(tuple(swing_states), group_means(swing_states)),
        safe=GroupBias(tuple(safe_states), group_means(safe_states)),
        overall=overall,
    )
