import pytest
from hypothesis import assume, given, settings

from distelect import AllTies, StateRace, tie_probability, win_probability
from support import dist, enumerate_pairwise, race, races


class TestStateRaceValidation:
    def test_state_mismatch(self):
        with pytest.raises(ValueError, match="state"):
            StateRace(
                dist({50: 1.0}, state="Iowa"),
                dist({50: 1.0}, state="Ohio", candidate="Blair Finch", opponent="Avery Cole"),
            )

    def test_year_mismatch(self):
        with pytest.raises(ValueError, match="year"):
            StateRace(
                dist({50: 1.0}, year=2020),
                dist({50: 1.0}, year=2024, candidate="Blair Finch", opponent="Avery Cole"),
            )

    def test_candidates_must_cross_reference(self):
        with pytest.raises(ValueError, match="cross-reference"):
            StateRace(dist({50: 1.0}), dist({50: 1.0}))


class TestWinProbability:
    def test_strict_dominance(self):
        result = win_probability(race({60: 1.0}, {40: 1.0}))
        assert result.p_c1_wins == 1.0
        assert result.p_c2_wins == 0.0
        assert result.raw_tie_mass == 0.0

    def test_symmetric_uniforms(self):
        uniform = {49: 1.0, 50: 1.0, 51: 1.0}
        result = win_probability(race(uniform, uniform))
        assert result.p_c1_wins == pytest.approx(0.5, abs=1e-12)
        assert result.p_c2_wins == pytest.approx(0.5, abs=1e-12)
        assert result.raw_tie_mass == pytest.approx(1 / 3, abs=1e-12)

    def test_four_outcome_enumeration(self):
        # pairs: (50,49) c1, (50,51) c2, (52,49) c1, (52,51) c1 -> 3/4 vs 1/4
        result = win_probability(race({50: 0.5, 52: 0.5}, {49: 0.5, 51: 0.5}))
        assert result.p_c1_wins == 0.75
        assert result.p_c2_wins == 0.25
        assert result.raw_tie_mass == 0.0

    def test_identical_point_masses_raise(self):
        with pytest.raises(AllTies):
            win_probability(race({50: 1.0}, {50: 1.0}))


class TestTieProbability:
    def test_disjoint_supports(self):
        assert tie_probability(race({40: 1.0, 42: 1.0}, {50: 1.0, 60: 1.0})) == 0.0

    def test_certain_tie(self):
        assert tie_probability(race({50: 1.0}, {50: 1.0})) == 1.0

    def test_uniform_overlap(self):
        uniform = {49: 1.0, 50: 1.0, 51: 1.0}
        assert tie_probability(race(uniform, uniform)) == pytest.approx(1 / 3, abs=1e-12)


@settings(max_examples=300)
@given(races())
def test_matches_exhaustive_enumeration(r):
    raw1, raw2, tie = enumerate_pairwise(r.c1.masses, r.c2.masses)
    assume(raw1 + raw2 > 0)
    result = win_probability(r)
    assert abs(result.p_c1_wins - raw1 / (raw1 + raw2)) <= 1e-12
    assert abs(result.p_c2_wins - raw2 / (raw1 + raw2)) <= 1e-12
    assert abs(result.raw_tie_mass - tie) <= 1e-12
    assert abs(raw1 + raw2 + tie - 1.0) <= 1e-9
    assert abs(result.p_c1_wins + result.p_c2_wins - 1.0) <= 1e-9


@settings(max_examples=300)
@given(races())
def test_swap_symmetry(r):
    try:
        forward = win_probability(r)
    except AllTies:
        with pytest.raises(AllTies):
            win_probability(r.swapped())
        return
    backward = win_probability(r.swapped())
    assert backward.p_c1_wins == forward.p_c2_wins
    assert backward.p_c2_wins == forward.p_c1_wins
    assert backward.raw_tie_mass == forward.raw_tie_mass


@settings(max_examples=300)
@given(races())
def test_upward_shift_never_hurts(r):
    try:
        before = win_probability(r)
    except AllTies:
        assume(False)
    shifted_raw: dict[int, float] = {}
    for share, prob in r.c1.masses.items():
        capped = min(share + 1, 100)
        shifted_raw[capped] = shifted_raw.get(capped, 0.0) + prob
    shifted = race(shifted_raw, r.c2.masses)
    try:
        after = win_probability(shifted)
    except AllTies:
        assume(False)
    assert after.p_c1_wins >= before.p_c1_wins - 1e-12
