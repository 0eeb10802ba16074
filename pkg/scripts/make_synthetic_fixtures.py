#!/usr/bin/env python3
"""Generate the committed synthetic fixtures: a 51-state cell store and a
matching ground-truth CSV.

Deliberately written with the standard library only, so the fixtures are not
produced by the code under test. Deterministic: every value derives from a
fixed seed string plus the state name. Run from the repository root:

    python3 scripts/make_synthetic_fixtures.py
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import random
from pathlib import Path

SEED = "distelect-fixture-1"
YEAR = 2020
C1 = "Dana Merritt"
C2 = "Riley Vance"
MODEL = "synthetic/fixture-v1"

# 2024 apportionment, 538 votes across 50 states plus DC.
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


def fingerprint(state: str, candidate: str, opponent: str) -> str:
    tag = f"{SEED}|{state}|{candidate}|{opponent}|{YEAR}"
    return hashlib.sha256(tag.encode("utf-8")).hexdigest()[:16]


def cell_masses(rng: random.Random, target_mean: float) -> dict[int, float]:
    center = min(97, max(3, round(target_mean)))
    weights = [rng.randint(1, 4), rng.randint(3, 9), rng.randint(6, 12),
               rng.randint(3, 9), rng.randint(1, 4)]
    total = sum(weights)
    return {center + offset: weight / total for offset, weight in zip((-2, -1, 0, 1, 2), weights)}


def mean_of(masses: dict[int, float]) -> float:
    return math.fsum(share * prob for share, prob in masses.items())


def main() -> int:
    root = Path(__file__).resolve().parents[1]
    out_dir = root / "tests" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)

    cells = []
    truth_rows = []
    for state in sorted(STATE_VOTES):
        rng = random.Random(f"{SEED}:{state}")
        swing = rng.random() < 0.45
        margin = rng.uniform(0.5, 4.2) if swing else rng.uniform(6.0, 28.0)
        lean = rng.choice([1.0, -1.0])
        mid = rng.uniform(46.0, 50.0)
        targets = {C1: mid + lean * margin / 2, C2: mid - lean * margin / 2}

        masses_by_candidate = {}
        for candidate, opponent in ((C1, C2), (C2, C1)):
            masses = cell_masses(rng, targets[candidate])
            masses_by_candidate[candidate] = masses
            conforming = round(rng.uniform(0.86, 0.99), 4)
            cells.append({
                "meta": {
                    "state": state,
                    "candidate": candidate,
                    "opponent": opponent,
                    "year": YEAR,
                    "model": MODEL,
                    "prompt_fingerprint": fingerprint(state, candidate, opponent),
                },
                "conforming_mass": conforming,
                "masses": {str(share): prob for share, prob in sorted(masses.items())},
            })
            actual = round(targets[candidate] + rng.uniform(-0.9, 0.9), 2)
            truth_rows.append([state, candidate, f"{actual:.2f}"])

        if mean_of(masses_by_candidate[C1]) == mean_of(masses_by_candidate[C2]):
            raise SystemExit(f"{state}: exact mean tie in generated fixture; change SEED")

    store_path = out_dir / "cells_synthetic.json"
    with open(store_path, "w", encoding="utf-8") as fh:
        json.dump({"version": 1, "cells": cells}, fh, indent=2, ensure_ascii=False)
        fh.write("\n")

    truth_path = out_dir / "truth_synthetic.csv"
    with open(truth_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["state", "candidate", "share_percent"])
        writer.writerows(truth_rows)

    print(f"wrote {store_path} ({len(cells)} cells)")
    print(f"wrote {truth_path} ({len(truth_rows)} rows)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
