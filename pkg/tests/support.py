"""Shared builders, strategies, and enumeration oracles for the test suite."""

from __future__ import annotations

import math

import hypothesis.strategies as st

from distelect import CellMeta, ShareDistribution, StateRace, make_distribution

C1 = "Avery Cole"
C2 = "Blair Finch"


def meta(state="Iowa", candidate=C1, opponent=C2, year=2024,
         model="stub-model", fingerprint="0123456789abcdef") -> CellMeta:
    return CellMeta(state=state, candidate=candidate, opponent=opponent,
                    year=year, model=model, prompt_fingerprint=fingerprint)


def dist(masses, conforming=1.0, **meta_kwargs) -> ShareDistribution:
    return make_distribution(dict(masses), conforming, meta(**meta_kwargs))


def race(masses_c1, masses_c2, state="Iowa", year=2024, c1=C1, c2=C2) -> StateRace:
    return StateRace(
        make_distribution(dict(masses_c1), 1.0,
                          meta(state=state, candidate=c1, opponent=c2, year=year)),
        make_distribution(dict(masses_c2), 1.0,
                          meta(state=state, candidate=c2, opponent=c1, year=year)),
    )


@st.composite
def mass_maps(draw, max_points=10):
    size = draw(st.integers(1, max_points))
    shares = draw(st.lists(st.integers(0, 100), min_size=size, max_size=size, unique=True))
    weights = draw(st.lists(
        st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False),
        min_size=size, max_size=size,
    ))
    return dict(zip(shares, weights))


@st.composite
def share_dists(draw, max_points=10, **meta_kwargs):
    masses = draw(mass_maps(max_points=max_points))
    conforming = draw(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
    return make_distribution(masses, conforming, meta(**meta_kwargs))


@st.composite
def races(draw, max_points=10):
    return race(draw(mass_maps(max_points=max_points)),
                draw(mass_maps(max_points=max_points)))


def enumerate_pairwise(masses1: dict[int, float], masses2: dict[int, float]):
    """Exhaustive enumeration over all support pairs: (raw_win1, raw_win2, tie)."""
    raw1 = math.fsum(p1 * p2 for y1, p1 in masses1.items()
                     for y2, p2 in masses2.items() if y1 > y2)
    raw2 = math.fsum(p1 * p2 for y1, p1 in masses1.items()
                     for y2, p2 in masses2.items() if y2 > y1)
    tie = math.fsum(p1 * p2 for y1, p1 in masses1.items()
                    for y2, p2 in masses2.items() if y1 == y2)
    return raw1, raw2, tie
