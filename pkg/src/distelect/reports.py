"""CSV, JSON, and SVG report emission.

Every builder returns a complete text document and is byte-deterministic for
identical inputs: rows are sorted, floats are rounded to 12 significant
digits, and nothing time- or environment-dependent is written.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Mapping, Sequence

from .analysis import ErrorReport, MatchupGrid, SwingBiasReport
from .college import ECDistribution

C1_COLOR = "#2166ac"
C2_COLOR = "#b2182b"


def fmt_float(value: float) -> str:
    return format(float(value), ".12g")


def _jsonable(value: float | None) -> float | None:
    # round through the same 12-significant-digit grid the CSVs use
    return None if value is None else float(fmt_float(value))


def _csv_buffer() -> tuple[io.StringIO, "csv._writer"]:
    buffer = io.StringIO()
    return buffer, csv.writer(buffer, lineterminator="\n")


def candidate_colors(candidates: Sequence[str]) -> dict[str, str]:
    """Fixed two-color palette keyed by candidate position."""
    if len(candidates) != 2:
        raise ValueError(f"expected exactly two candidates, got {len(candidates)}")
    return {candidates[0]: C1_COLOR, candidates[1]: C2_COLOR}


# -- error tables -------------------------------------------------------------

def error_table_csv(report: ErrorReport) -> str:
    first, second = report.candidates
    buffer, writer = _csv_buffer()
    writer.writerow(["state", f"{first} error", f"{second} error"])
    for state in sorted(report.per_state):
        row = report.per_state[state]
        writer.writerow([state, fmt_float(row[first]), fmt_float(row[second])])
    writer.writerow(["mean_abs_error", fmt_float(report.means[first]), fmt_float(report.means[second])])
    writer.writerow(["stddev", fmt_float(report.stddevs[first]), fmt_float(report.stddevs[second])])
    return buffer.getvalue()


def error_table_json(report: ErrorReport) -> str:
    payload = {
        "candidates": list(report.candidates),
        "per_state": {
            state: {candidate: _jsonable(err) for candidate, err in row.items()}
            for state, row in report.per_state.items()
        },
        "mean_abs_error": {c: _jsonable(v) for c, v in report.means.items()},
        "stddev": {c: _jsonable(v) for c, v in report.stddevs.items()},
    }
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- average-case maps --------------------------------------------------------

def map_rows(winners: Mapping[str, str], colors: Mapping[str, str]) -> list[tuple[str, str]]:
    """Flat (state, color) rows, sorted by state."""
    return [(state, colors[winners[state]]) for state in sorted(winners)]


def map_csv(winners: Mapping[str, str], colors: Mapping[str, str]) -> str:
    buffer, writer = _csv_buffer()
    writer.writerow(["state", "color"])
    for state, color in map_rows(winners, colors):
        writer.writerow([state, color])
    return buffer.getvalue()


def map_json(winners: Mapping[str, str], colors: Mapping[str, str]) -> str:
    payload = {
        "states": [
            {"state": state, "winner": winners[state], "color": colors[winners[state]]}
            for state in sorted(winners)
        ]
    }
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def map_svg(
    winners: Mapping[str, str],
    colors: Mapping[str, str],
    *,
    columns: int = 8,
    cell_width: int = 150,
    cell_height: int = 56,
) -> str:
    """Labeled rectangles in a grid, one per state; no geographic shapes."""
    states = sorted(winners)
    rows = (len(states) + columns - 1) // columns
    width = columns * cell_width
    height = rows * cell_height
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    ]
    for position, state in enumerate(states):
        x = (position % columns) * cell_width
        y = (position // columns) * cell_height
        color = colors[winners[state]]
        label = state.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        parts.append(
            f'  <rect x="{x + 2}" y="{y + 2}" width="{cell_width - 4}" '
            f'height="{cell_height - 4}" fill="{color}" stroke="#333333"/>'
        )
        parts.append(
            f'  <text x="{x + cell_width // 2}" y="{y + cell_height // 2 + 4}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="11" '
            f'fill="#ffffff">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# -- electoral-vote PMFs -------------------------------------------------------

def pmf_csv(dist: ECDistribution) -> str:
    buffer, writer = _csv_buffer()
    writer.writerow(["k", "probability"])
    for k in range(dist.e_total + 1):
        writer.writerow([k, fmt_float(dist.pmf[k])])
    return buffer.getvalue()


# -- matchup grids -------------------------------------------------------------

def grid_csv(grids: Sequence[MatchupGrid]) -> str:
    buffer, writer = _csv_buffer()
    writer.writerow(["year", "row_candidate", "col_candidate", "expected_ev", "win_prob"])
    for grid in grids:
        for row in grid.rows:
            for col in grid.cols:
                cell = grid.cells[(row, col)]
                writer.writerow(
                    [grid.year, row, col, fmt_float(cell.expected_ev), fmt_float(cell.win_prob)]
                )
    return buffer.getvalue()


def grid_json(grids: Sequence[MatchupGrid]) -> str:
    payload = [
        {
            "year": grid.year,
            "rows": list(grid.rows),
            "cols": list(grid.cols),
            "cells": [
                {
                    "row": row,
                    "col": col,
                    "expected_ev": _jsonable(grid.cells[(row, col)].expected_ev),
                    "win_prob": _jsonable(grid.cells[(row, col)].win_prob),
                }
                for row in grid.rows
                for col in grid.cols
            ],
        }
        for grid in grids
    ]
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- swing-state bias -----------------------------------------------------------

def swing_bias_csv(report: SwingBiasReport) -> str:
    buffer, writer = _csv_buffer()
    writer.writerow(["margin_threshold", "group", "candidate", "state_count", "mean_signed_error"])
    threshold = fmt_float(report.margin_threshold)
    for group_name, group in (("swing", report.swing), ("safe", report.safe)):
        for candidate in report.candidates:
            mean = group.mean_signed_error[candidate]
            writer.writerow(
                [
                    threshold,
                    group_name,
                    candidate,
                    len(group.states),
                    "" if mean is None else fmt_float(mean),
                ]
            )
    for candidate in report.candidates:
        writer.writerow(
            [
                threshold,
                "overall",
                candidate,
                len(report.swing.states) + len(report.safe.states),
                fmt_float(report.overall[candidate]),
            ]
        )
    return buffer.getvalue()


def swing_bias_json(report: SwingBiasReport) -> str:
    def group_payload(group):
        return {
            "states": list(group.states),
            "mean_signed_error": {
                c: _jsonable(v) for c, v in group.mean_signed_error.items()
            },
        }

    payload = {
        "margin_threshold": _jsonable(report.margin_threshold),
        "candidates": list(report.candidates),
        "swing": group_payload(report.swing),
        "safe": group_payload(report.safe),
        "overall": {c: _jsonable(v) for c, v in report.overall.items()},
    }
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
