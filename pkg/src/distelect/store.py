"""Versioned on-disk cell format and an in-memory index over it.

The file format is a single JSON document::

    {
      "version": 1,
      "cells": [
        {
          "meta": {"state": ..., "candidate": ..., "opponent": ...,
                   "year": ..., "model": ..., "prompt_fingerprint": ...},
          "conforming_mass": 0.93,
          "masses": {"46": 0.25, "47": 0.75}
        }
      ]
    }

Mass keys are decimal strings in ascending numeric order; meta keys are
written in a fixed order. Re-serializing a loaded file reproduces it byte for
byte, and writes are atomic (temp file + rename).
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Iterable, Iterator, Sequence

from .errors import MissingCell, SchemaError
from .pairwise import StateRace
from .shares import MAX_SHARE, MIN_SHARE, CellMeta, ShareDistribution

STORE_VERSION = 1

_META_FIELDS = ("state", "candidate", "opponent", "year", "model", "prompt_fingerprint")


def write_text_atomic(path, text: str) -> None:
    """Write via a sibling temp file and rename so readers never see a partial file."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell_payload(cell: ShareDistribution) -> dict:
    meta = cell.meta
    return {
        "meta": {
            "state": meta.state,
            "candidate": meta.candidate,
            "opponent": meta.opponent,
            "year": meta.year,
            "model": meta.model,
            "prompt_fingerprint": meta.prompt_fingerprint,
        },
        "conforming_mass": cell.conforming_mass,
        # masses is canonical (ascending shares), so insertion order is the
        # canonical key order for the file too
        "masses": {str(share): prob for share, prob in cell.masses.items()},
    }


def dumps_cells(cells: Sequence[ShareDistribution]) -> str:
    """Canonical serialization of a cell list."""
    payload = {"version": STORE_VERSION, "cells": [_cell_payload(cell) for cell in cells]}
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def save_cells(cells: Sequence[ShareDistribution], path) -> None:
    """Atomically write the canonical serialization of ``cells``."""
    write_text_atomic(path, dumps_cells(cells))


def _parse_meta(index: int, raw: object) -> CellMeta:
    if not isinstance(raw, dict):
        raise SchemaError(f"cell {index}: meta: expected an object")
    for name in _META_FIELDS:
        if name not in raw:
            raise SchemaError(f"cell {index}: meta.{name}: missing")
    year = raw["year"]
    if not isinstance(year, int) or isinstance(year, bool):
        raise SchemaError(f"cell {index}: meta.year: expected an integer, got {year!r}")
    for name in ("state", "candidate", "opponent", "model", "prompt_fingerprint"):
        if not isinstance(raw[name], str):
            raise SchemaError(f"cell {index}: meta.{name}: expected a string")
    try:
        return CellMeta(
            state=raw["state"],
            candidate=raw["candidate"],
            opponent=raw["opponent"],
            year=year,
            model=raw["model"],
            prompt_fingerprint=raw["prompt_fingerprint"],
        )
    except ValueError as exc:
        raise SchemaError(f"cell {index}: meta: {exc}") from exc


def _parse_masses(index: int, raw: object) -> dict[int, float]:
    if not isinstance(raw, dict) or not raw:
        raise SchemaError(f"cell {index}: masses: expected a non-empty object")
    masses: dict[int, float] = {}
    for key, value in raw.items():
        try:
            share = int(key)
        except (TypeError, ValueError):
            raise SchemaError(f"cell {index}: masses: key {key!r} is not an integer") from None
        if share < MIN_SHARE or share > MAX_SHARE:
            raise SchemaError(f"cell {index}: masses: share {share} outside [0, 100]")
        if share in masses:
            raise SchemaError(f"cell {index}: masses: duplicate share {share}")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(f"cell {index}: masses[{key}]: expected a number")
        if value < 0:
            raise SchemaError(f"cell {index}: masses[{key}]: negative probability {value!r}")
        masses[share] = float(value)
    return masses


def _parse_cell(index: int, raw: object) -> ShareDistribution:
    if not isinstance(raw, dict):
        raise SchemaError(f"cell {index}: expected an object")
    meta = _parse_meta(index, raw.get("meta"))
    conforming = raw.get("conforming_mass")
    if not isinstance(conforming, (int, float)) or isinstance(conforming, bool):
        raise SchemaError(f"cell {index}: conforming_mass: expected a number")
    masses = _parse_masses(index, raw.get("masses"))
    try:
        return ShareDistribution(masses, float(conforming), meta)
    except Exception as exc:
        raise SchemaError(f"cell {index}: masses: {exc}") from exc


def load_cells(path) -> list[ShareDistribution]:
    """Load and validate a cell file; inverse of :func:`save_cells`."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: top level must be an object")
    if data.get("version") != STORE_VERSION:
        raise SchemaError(f"{path}: version: expected {STORE_VERSION}, got {data.get('version')!r}")
    cells_raw = data.get("cells")
    if not isinstance(cells_raw, list):
        raise SchemaError(f"{path}: cells: expected a list")
    return [_parse_cell(index, raw) for index, raw in enumerate(cells_raw)]


class CellStore:
    """Distribution cells indexed by (state, candidate, opponent, year).

    Adding a cell with a key that is already present replaces the old cell in
    place, which keeps re-fetches idempotent.
    """

    def __init__(self, cells: Iterable[ShareDistribution] = ()):
        self._cells: list[ShareDistribution] = []
        self._index: dict[tuple[str, str, str, int], int] = {}
        for cell in cells:
            self.add(cell)

    @staticmethod
    def _key(cell: ShareDistribution) -> tuple[str, str, str, int]:
        meta = cell.meta
        return (meta.state, meta.candidate, meta.opponent, meta.year)

    def add(self, cell: ShareDistribution) -> None:
        key = self._key(cell)
        if key in self._index:
            self._cells[self._index[key]] = cell
        else:
            self._index[key] = len(self._cells)
            self._cells.append(cell)

    def get(self, state: str, candidate: str, opponent: str, year: int) -> ShareDistribution:
        try:
            return self._cells[self._index[(state, candidate, opponent, year)]]
        except KeyError:
            raise MissingCell(
                f"no cell for {candidate!r} vs {opponent!r} in {state!r}, {year}"
            ) from None

    def __contains__(self, key: tuple[str, str, str, int]) -> bool:
        return key in self._index

    def race(self, state: str, c1: str, c2: str, year: int) -> StateRace:
        """Both directional cells for one state, assembled into a race."""
        return StateRace(self.get(state, c1, c2, year), self.get(state, c2, c1, year))

    def race_states(self, c1: str, c2: str, year: int) -> list[str]:
        """States where both directions of the matchup are present, first-seen order."""
        seen: set[str] = set()
        out: list[str] = []
        for cell in self._cells:
            meta = cell.meta
            if meta.candidate == c1 and meta.opponent == c2 and meta.year == year:
                if meta.state not in seen and (meta.state, c2, c1, year) in self._index:
                    seen.add(meta.state)
                    out.append(meta.state)
        return out

    def matchup_keys(self) -> list[tuple[str, str, int]]:
        """Distinct (candidate, opponent, year) matchups, first-seen direction."""
        seen: set[tuple[frozenset, int]] = set()
        out: list[tuple[str, str, int]] = []
        for cell in self._cells:
            meta = cell.meta
            unordered = (frozenset((meta.candidate, meta.opponent)), meta.year)
            if unordered not in seen:
                seen.add(unordered)
                out.append((meta.candidate, meta.opponent, meta.year))
        return out

    @property
    def cells(self) -> list[ShareDistribution]:
        return list(self._cells)

    def __len__(self) -> int:
        return len(self._cells)

    def __iter__(self) -> Iterator[ShareDistribution]:
        return iter(self._cells)

    @classmethod
    def from_file(cls, path) -> "CellStore":
        return cls(load_cells(path))

    def save(self, path) -> None:
        save_cells(self._cells, path)
