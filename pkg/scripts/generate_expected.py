#!/usr/bin/env python3
"""Compute the expected pipeline outputs for the committed synthetic fixtures
by independent brute force, write them under tests/fixtures/expected/, and
cross-check them byte-for-byte against the library's own pipeline.

The oracle side here never calls into the pipeline math: means come from
direct sums over the stored masses, state win probabilities from exhaustive
enumeration over support pairs, and the electoral-vote PMF from a dict-based
total-by-total walk over the states in alphabetical order. Only the output
*formatting* conventions are shared, since byte equality is the whole point.

Run from the repository root after make_synthetic_fixtures.py:

    python3 scripts/generate_expected.py
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "tests" / "fixtures"
EXPECTED = FIXTURES / "expected"

C1_COLOR = "#2166ac"
C2_COLOR = "#b2182b"

STATE_VOTES = {
    "Alabama": 9, "Alaska": 3, "Arizona": 11, "Arkansas": 6, "California": 54,
    "Colorado": 10, "Connecticut": 7, "Delaware": 3, "District of Columbia": 3,
    "Florida": 30, "Georgia": 16, "Hawaii": 4, "Idaho": 4, "Illinois": 19,
    "Indiana": 11, "Iowa": 6, "Kansas": 6, "Kentucky": 8, "Louisiana": 8,
    "Maine": 4, "Maryland": 10, "Massachusetts": 11, "Michigan": 15,
    "Minnesota": 10, "Mississippi": 6, "Missouri": 10, "Montana": 4,
    "Nebraska": 5, "Nevada": 6, "New Hampshire": 4, "New Jersey": 14,
    "New Mexico": 5, "New York": 28, "North Carolina": 16, "North Dakota": 3,
    "Ohio": 17, "Oklahoma": 7, "Oregon": 8, "Pennsylvania": 19,
    "Rhode Island": 4, "South Carolina": 9, "South Dakota": 3, "Tennessee": 11,
    "Texas": 40, "Utah": 6, "Vermont": 3, "Virginia": 13, "Washington": 12,
    "West Virginia": 4, "Wisconsin": 10, "Wyoming": 3,
}


def fmt(value: float) -> str:
    return format(float(value), ".12g")


def rnd(value: float) -> float:
    return float(fmt(value))


def load_fixtures():
    with open(FIXTURES / "cells_synthetic.json", encoding="utf-8") as fh:
        store = json.load(fh)
    masses = {}
    order = []
    for cell in store["cells"]:
        meta = cell["meta"]
        key = (meta["state"], meta["candidate"])
        masses[key] = {int(k): float(v) for k, v in cell["masses"].items()}
        if meta["candidate"] not in order:
            order.append(meta["candidate"])
    truth = {}
    with open(FIXTURES / "truth_synthetic.csv", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        for state, candidate, share in reader:
            truth[(state, candidate)] = float(share)
    return masses, truth, order[0], order[1]


def weighted_mean(masses: dict[int, float]) -> float:
    return math.fsum(share * prob for share, prob in masses.items())


def pairwise_win(masses1: dict[int, float], masses2: dict[int, float]) -> float:
    """Win probability for side 1 by exhaustive enumeration over support pairs."""
    raw1 = math.fsum(
        p1 * p2 for y1, p1 in masses1.items() for y2, p2 in masses2.items() if y1 > y2
    )
    raw2 = math.fsum(
        p1 * p2 for y1, p1 in masses1.items() for y2, p2 in masses2.items() if y2 > y1
    )
    return raw1 / (raw1 + raw2)


def ec_pmf_by_totals(state_wins: dict[str, float]) -> list[float]:
    """Electoral-vote PMF via a dict keyed by running total, states alphabetical."""
    totals = {0: 1.0}
    for state in sorted(state_wins):
        votes = STATE_VOTES[state]
        p_win = state_wins[state]
        nxt: dict[int, float] = {}
        for reached, prob in totals.items():
            nxt[reached] = nxt.get(reached, 0.0) + prob * (1.0 - p_win)
            nxt[reached + votes] = nxt.get(reached + votes, 0.0) + prob * p_win
        totals = nxt
    e_total = sum(STATE_VOTES.values())
    return [totals.get(k, 0.0) for k in range(e_total + 1)]


def build_error_table_csv(masses, truth, c1, c2) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["state", f"{c1} error", f"{c2} error"])
    per_candidate = {c1: [], c2: []}
    for state in sorted(STATE_VOTES):
        row = [state]
        for candidate in (c1, c2):
            err = abs(weighted_mean(masses[(state, candidate)]) - truth[(state, candidate)])
            per_candidate[candidate].append(err)
            row.append(fmt(err))
        writer.writerow(row)
    count = len(STATE_VOTES)
    means = {c: math.fsum(errs) / count for c, errs in per_candidate.items()}
    stds = {
        c: math.sqrt(math.fsum((e - means[c]) ** 2 for e in errs) / count)
        for c, errs in per_candidate.items()
    }
    writer.writerow(["mean_abs_error", fmt(means[c1]), fmt(means[c2])])
    writer.writerow(["stddev", fmt(stds[c1]), fmt(stds[c2])])
    return buffer.getvalue()


def build_error_table_json(masses, truth, c1, c2) -> str:
    per_state = {}
    per_candidate = {c1: [], c2: []}
    for state in sorted(STATE_VOTES):
        per_state[state] = {}
        for candidate in (c1, c2):
            err = abs(weighted_mean(masses[(state, candidate)]) - truth[(state, candidate)])
            per_candidate[candidate].append(err)
            per_state[state][candidate] = rnd(err)
    count = len(STATE_VOTES)
    means = {c: math.fsum(errs) / count for c, errs in per_candidate.items()}
    stds = {
        c: math.sqrt(math.fsum((e - means[c]) ** 2 for e in errs) / count)
        for c, errs in per_candidate.items()
    }
    payload = {
        "candidates": [c1, c2],
        "per_state": per_state,
        "mean_abs_error": {c: rnd(v) for c, v in means.items()},
        "stddev": {c: rnd(v) for c, v in stds.items()},
    }
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def build_map_csv(masses, c1, c2) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["state", "color"])
    for state in sorted(STATE_VOTES):
        mean1 = weighted_mean(masses[(state, c1)])
        mean2 = weighted_mean(masses[(state, c2)])
        if mean1 == mean2:
            raise SystemExit(f"{state}: exact mean tie; fixtures must avoid this")
        writer.writerow([state, C1_COLOR if mean1 > mean2 else C2_COLOR])
    return buffer.getvalue()


def build_ec_pmf_csv(masses, c1, c2) -> str:
    state_wins = {
        state: pairwise_win(masses[(state, c1)], masses[(state, c2)])
        for state in STATE_VOTES
    }
    pmf = ec_pmf_by_totals(state_wins)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["k", "probability"])
    for k, prob in enumerate(pmf):
        writer.writerow([k, fmt(prob)])
    return buffer.getvalue()


def cross_check(expected: dict[str, str]) -> bool:
    """Rebuild each artifact through the installed library and compare bytes."""
    sys.path.insert(0, str(ROOT / "src"))
    from distelect import (
        CellStore,
        average_case_map,
        default_allocation,
        ec_distribution,
        error_table,
        load_ground_truth,
        win_probability,
    )
    from distelect.reports import (
        candidate_colors,
        error_table_csv,
        error_table_json,
        map_csv,
        pmf_csv,
    )

    store = CellStore.from_file(FIXTURES / "cells_synthetic.json")
    c1, c2, year = store.matchup_keys()[0]
    truth = load_ground_truth(FIXTURES / "truth_synthetic.csv", year)
    report = error_table(store.cells, truth)
    races = {state: store.race(state, c1, c2, year) for state in store.race_states(c1, c2, year)}
    winners = average_case_map(races)
    alloc = default_allocation()
    state_wins = {state: win_probability(races[state]).p_c1_wins for state in alloc.votes}
    produced = {
        "error_table.csv": error_table_csv(report),
        "error_table.json": error_table_json(report),
        "map.csv": map_csv(winners, candidate_colors((c1, c2))),
        "ec_pmf.csv": pmf_csv(ec_distribution(state_wins, alloc)),
    }
    ok = True
    for name, text in expected.items():
        if produced[name] == text:
            print(f"cross-check {name}: OK")
        else:
            ok = False
            print(f"cross-check {name}: MISMATCH")
    return ok


def main() -> int:
    masses, truth, c1, c2 = load_fixtures()
    EXPECTED.mkdir(parents=True, exist_ok=True)
    artifacts = {
        "error_table.csv": build_error_table_csv(masses, truth, c1, c2),
        "error_table.json": build_error_table_json(masses, truth, c1, c2),
        "map.csv": build_map_csv(masses, c1, c2),
        "ec_pmf.csv": build_ec_pmf_csv(masses, c1, c2),
    }
    for name, text in artifacts.items():
        with open(EXPECTED / name, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"wrote {EXPECTED / name}")
    return 0 if cross_check(artifacts) else 1


if __name__ == "__main__":
    raise SystemExit(main())
