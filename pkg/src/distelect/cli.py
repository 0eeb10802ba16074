"""Command-line front end for the full pipeline.

Subcommands: ``fetch`` (pull distributions from an endpoint into a cell
store), ``ec`` (electoral-vote PMF and summary), ``map`` (average-case
winners), ``error`` (backtest against ground truth), ``bias`` (swing-state
signed errors), and ``matchup`` (head-to-head grids).

Exit codes: 0 success, 2 domain or data error, 64 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .analysis import (
    DEFAULT_SWING_MARGIN,
    average_case_map,
    error_table,
    load_ground_truth,
    run_matchups,
    swing_bias_report,
)
from .college import (
    default_allocation,
    ec_distribution,
    exact_tie_probability,
    expected_votes,
    load_allocation,
    win_chance,
)
from .errors import DistelectError, MissingCell
from .ingest import CellRequest, EndpointConfig, fetch_many
from .pairwise import win_probability
from .reports import (
    candidate_colors,
    error_table_csv,
    error_table_json,
    fmt_float,
    grid_csv,
    grid_json,
    map_csv,
    map_json,
    map_svg,
    pmf_csv,
    swing_bias_csv,
    swing_bias_json,
)
from .store import CellStore, save_cells, write_text_atomic

EXIT_OK = 0
EXIT_DATA = 2
EXIT_USAGE = 64


class _CliError(DistelectError):
    """Command-level data problem; reported on stderr with exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 64, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _split_list(raw: str) -> list[str]:
    items = [item.strip() for item in raw.split(",")]
    return [item for item in items if item]


def _add_endpoint_args(parser) -> None:
    parser.add_argument("--base-url", default=os.environ.get("DISTELECT_BASE_URL"),
                        help="endpoint base URL (env DISTELECT_BASE_URL)")
    parser.add_argument("--model", default=os.environ.get("DISTELECT_MODEL"),
                        help="model identifier (env DISTELECT_MODEL)")
    parser.add_argument("--top-k", type=int, default=20, help="top logprobs to request")
    parser.add_argument("--temperature", type=float, default=1.0)
    parser.add_argument("--timeout", type=float, default=30.0, help="seconds per request")
    parser.add_argument("--retries", type=int, default=3, help="total attempts per request")
    parser.add_argument("--parallel", type=int, default=4, help="max in-flight requests")


def _endpoint_config(args) -> EndpointConfig:
    if not args.base_url:
        raise _CliError("no endpoint: pass --base-url or set DISTELECT_BASE_URL")
    if not args.model:
        raise _CliError("no model: pass --model or set DISTELECT_MODEL")
    cfg = EndpointConfig(
        base_url=args.base_url,
        model=args.model,
        top_k=args.top_k,
        temperature=args.temperature,
        timeout=args.timeout,
        max_retries=args.retries,
        parallel=args.parallel,
    )
    cfg.resolve_api_key()  # fail fast, naming the env var
    return cfg


def _load_store(path) -> CellStore:
    if not os.path.exists(path):
        raise _CliError(f"store not found: {path}")
    return CellStore.from_file(path)


def _select_matchup(store: CellStore, c1, c2, year) -> tuple[str, str, int]:
    """Resolve which (c1, c2, year) matchup a command operates on."""
    keys = store.matchup_keys()
    if not keys:
        raise _CliError("store contains no cells")
    matches = []
    for cand, opp, key_year in keys:
        if c1 is not None and c1 not in (cand, opp):
            continue
        if c2 is not None and c2 not in (cand, opp):
            continue
        if year is not None and year != key_year:
            continue
        matches.append((cand, opp, key_year))
    if not matches:
        available = "; ".join(f"{a!r} vs {b!r} ({y})" for a, b, y in keys)
        raise _CliError(f"no matchup matches the given flags; store has: {available}")
    if len(matches) > 1:
        available = "; ".join(f"{a!r} vs {b!r} ({y})" for a, b, y in matches)
        raise _CliError(f"ambiguous matchup, narrow with --c1/--c2/--year: {available}")
    cand, opp, key_year = matches[0]
    if c1 is not None and c1 == opp:
        return opp, cand, key_year  # honor the requested perspective
    return cand, opp, key_year


def _emit(text: str, out_path) -> None:
    if out_path:
        write_text_atomic(out_path, text)
    else:
        sys.stdout.write(text)


# -- subcommands ---------------------------------------------------------------


def cmd_fetch(args) -> int:
    cfg = _endpoint_config(args)
    if args.states.strip().lower() == "all":
        states = list(default_allocation().votes)
    else:
        states = _split_list(args.states)
    if not states:
        raise _CliError("no states requested")
    requests = [
        CellRequest(state, cand, opp, args.year)
        for state in states
        for cand, opp in ((args.c1, args.c2), (args.c2, args.c1))
    ]
    cells, failures = fetch_many(cfg, requests)
    if failures:
        for request, exc in failures:
            print(
                f"failed: {request.candidate!r} vs {request.opponent!r} in "
                f"{request.state!r} ({request.year}): {exc}",
                file=sys.stderr,
            )
        raise _CliError(f"{len(failures)} of {len(requests)} cells failed; store not written")
    save_cells(cells, args.out)
    print(f"wrote {len(cells)} cells to {args.out}")
    return EXIT_OK


def cmd_ec(args) -> int:
    store = _load_store(args.store)
    c1, c2, year = _select_matchup(store, args.c1, args.c2, args.year)
    alloc = load_allocation(args.alloc) if args.alloc else default_allocation()
    covered = set(store.race_states(c1, c2, year))
    missing = sorted(state for state in alloc.votes if state not in covered)
    if missing:
        raise _CliError(f"store is missing states: {', '.join(missing)}")
    state_wins = {
        state: win_probability(store.race(state, c1, c2, year)).p_c1_wins
        for state in alloc.votes
    }
    dist = ec_distribution(state_wins, alloc)
    threshold = args.threshold if args.threshold is not None else alloc.total // 2 + 1
    p_win = win_chance(dist, threshold)
    p_tie = exact_tie_probability(dist) if alloc.total % 2 == 0 else None
    p_lose = 1.0 - p_win - (p_tie or 0.0)
    _emit(pmf_csv(dist), args.out)
    print(f"candidate: {c1} (vs {c2}, {year})")
    print(f"win_chance[threshold={threshold}]: {fmt_float(p_win)}")
    if p_tie is None:
        print(f"exact_tie_probability: impossible (odd total of {alloc.total})")
    else:
        print(f"exact_tie_probability: {fmt_float(p_tie)}")
    print(f"lose_chance: {fmt_float(p_lose)}")
    print(f"expected_electoral_votes: {fmt_float(expected_votes(dist))} of {alloc.total}")
    if args.out:
        print(f"pmf written to {args.out}")
    return EXIT_OK


def cmd_map(args) -> int:
    store = _load_store(args.store)
    c1, c2, year = _select_matchup(store, args.c1, args.c2, args.year)
    states = store.race_states(c1, c2, year)
    if not states:
        raise _CliError(f"store has no complete races for {c1!r} vs {c2!r} in {year}")
    races = {state: store.race(state, c1, c2, year) for state in states}
    winners = average_case_map(races)
    colors = candidate_colors((c1, c2))
    if args.format == "csv":
        _emit(map_csv(winners, colors), args.out)
    elif args.format == "json":
        _emit(map_json(winners, colors), args.out)
    else:
        _emit(map_svg(winners, colors), args.out)
    alloc = load_allocation(args.alloc) if args.alloc else default_allocation()
    for candidate in (c1, c2):
        won = [state for state, winner in winners.items() if winner == candidate]
        votes = sum(alloc.votes.get(state, 0) for state in won)
        print(f"{candidate}: {votes} electoral votes across {len(won)} states", file=sys.stderr)
    return EXIT_OK


def _matchup_cells(store: CellStore, c1: str, c2: str, year: int):
    cells = []
    for cell in store:
        meta = cell.meta
        if meta.year == year and {meta.candidate, meta.opponent} == {c1, c2}:
            cells.append(cell)
    return cells


def cmd_error(args) -> int:
    store = _load_store(args.store)
    c1, c2, year = _select_matchup(store, args.c1, args.c2, args.year)
    truth = load_ground_truth(args.truth, args.truth_year or year)
    report = error_table(_matchup_cells(store, c1, c2, year), truth)
    if args.format == "json":
        _emit(error_table_json(report), args.out)
    else:
        _emit(error_table_csv(report), args.out)
    return EXIT_OK


def cmd_bias(args) -> int:
    store = _load_store(args.store)
    c1, c2, year = _select_matchup(store, args.c1, args.c2, args.year)
    truth = load_ground_truth(args.truth, args.truth_year or year)
    report = swing_bias_report(
        _matchup_cells(store, c1, c2, year), truth, margin_threshold=args.margin
    )
    if args.format == "json":
        _emit(swing_bias_json(report), args.out)
    else:
        _emit(swing_bias_csv(report), args.out)
    return EXIT_OK


def cmd_matchup(args) -> int:
    dems = _split_list(args.dems)
    reps = _split_list(args.reps)
    years = []
    for item in _split_list(args.years):
        try:
            years.append(int(item))
        except ValueError:
            raise _CliError(f"--years entries must be integers, got {item!r}") from None
    if not dems or not reps or not years:
        raise _CliError("--dems, --reps, and --years must all be non-empty")
    alloc = load_allocation(args.alloc) if args.alloc else default_allocation()
    if args.from_store:
        store = _load_store(args.from_store)
        cfg = None
    else:
        store = CellStore()
        cfg = _endpoint_config(args)
    grids = run_matchups(
        dems, reps, years, store=store, cfg=cfg, alloc=alloc, threshold=args.threshold
    )
    if args.save_store:
        store.save(args.save_store)
    if args.format == "csv":
        _emit(grid_csv(grids), args.out)
    else:
        _emit(grid_json(grids), args.out)
    return EXIT_OK


# -- parser wiring ---------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="distelect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fetch", help="fetch distributions into a cell store")
    p.add_argument("--c1", required=True, help="first candidate")
    p.add_argument("--c2", required=True, help="second candidate")
    p.add_argument("--year", required=True, type=int)
    p.add_argument("--states", required=True,
                   help="comma-separated state names, or 'all' for the bundled 51")
    p.add_argument("--out", required=True, help="cell store path to write")
    _add_endpoint_args(p)
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("ec", help="electoral-vote distribution and summary")
    p.add_argument("--store", required=True)
    p.add_argument("--c1", help="perspective candidate (default: first in store)")
    p.add_argument("--c2")
    p.add_argument("--year", type=int)
    p.add_argument("--alloc", help="override allocation CSV (state,electoral_votes)")
    p.add_argument("--threshold", type=int, default=None,
                   help="votes needed to win (default: majority of the allocation)")
    p.add_argument("--out", help="PMF CSV path (default: stdout)")
    p.set_defaults(func=cmd_ec)

    p = sub.add_parser("map", help="average-case winner per state")
    p.add_argument("--store", required=True)
    p.add_argument("--c1")
    p.add_argument("--c2")
    p.add_argument("--year", type=int)
    p.add_argument("--alloc")
    p.add_argument("--format", choices=["csv", "json", "svg"], default="csv")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("error", help="absolute error table against ground truth")
    p.add_argument("--store", required=True)
    p.add_argument("--truth", required=True, help="ground-truth CSV (state,candidate,share_percent)")
    p.add_argument("--truth-year", type=int, help="year of the ground truth (default: store year)")
    p.add_argument("--c1")
    p.add_argument("--c2")
    p.add_argument("--year", type=int)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_error)

    p = sub.add_parser("bias", help="signed error split into swing and safe states")
    p.add_argument("--store", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--truth-year", type=int)
    p.add_argument("--margin", type=float, default=DEFAULT_SWING_MARGIN,
                   help="swing-state margin threshold in percentage points")
    p.add_argument("--c1")
    p.add_argument("--c2")
    p.add_argument("--year", type=int)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bias)

    p = sub.add_parser("matchup", help="head-to-head grids over candidate lists")
    p.add_argument("--dems", required=True, help="comma-separated row candidates")
    p.add_argument("--reps", required=True, help="comma-separated column candidates")
    p.add_argument("--years", required=True, help="comma-separated election years")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--from-store", help="use a complete cell store, no fetching")
    source.add_argument("--live", action="store_true", help="fetch everything from the endpoint")
    p.add_argument("--save-store", help="persist fetched cells to this path")
    p.add_argument("--alloc")
    p.add_argument("--threshold", type=int, default=None)
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--out")
    _add_endpoint_args(p)
    p.set_defaults(func=cmd_matchup)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MissingCell as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DistelectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
