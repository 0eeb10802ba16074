import math
import random

import numpy as np
import pytest

from distelect import (
    ELECTORAL_VOTES_2024,
    EVAllocation,
    OddTotal,
    ProbabilityOutOfRange,
    SchemaError,
    StateMismatch,
    ThresholdOutOfRange,
    TooManyStates,
    brute_force_ec,
    default_allocation,
    ec_distribution,
    exact_tie_probability,
    expected_votes,
    load_allocation,
    win_chance,
)


def random_instance(rng, max_states=15, max_votes=20):
    n = rng.randint(1, max_states)
    votes = {f"S{i:02d}": rng.randint(1, max_votes) for i in range(n)}
    wins = {state: rng.random() for state in votes}
    return wins, EVAllocation(votes)


class TestBundledAllocation:
    def test_shape(self):
        alloc = default_allocation()
        assert len(alloc.votes) == 51
        assert alloc.total == 538
        assert all(count >= 1 for count in alloc.votes.values())
        assert "District of Columbia" in alloc.votes

    def test_validation(self):
        with pytest.raises(ValueError):
            EVAllocation({})
        with pytest.raises(ValueError):
            EVAllocation({"A": 0})


class TestAllocationCsv:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "alloc.csv"
        path.write_text("state,electoral_votes\nA,1\nB,2\n", encoding="utf-8")
        alloc = load_allocation(path)
        assert alloc.votes == {"A": 1, "B": 2}

    def test_bad_header(self, tmp_path):
        path = tmp_path / "alloc.csv"
        path.write_text("name,votes\nA,1\n", encoding="utf-8")
        with pytest.raises(SchemaError):
            load_allocation(path)

    def test_bad_count(self, tmp_path):
        path = tmp_path / "alloc.csv"
        path.write_text("state,electoral_votes\nA,three\n", encoding="utf-8")
        with pytest.raises(SchemaError):
            load_allocation(path)


class TestEcDistribution:
    def test_certain_sweep(self):
        dist = ec_distribution({"A": 1.0, "B": 1.0}, EVAllocation({"A": 2, "B": 3}))
        assert dist.pmf[5] == 1.0
        assert math.fsum(dist.pmf) == pytest.approx(1.0, abs=1e-12)

    def test_two_state_enumeration(self):
        # subsets: {} -> 0, {A} -> 1, {B} -> 2, {A,B} -> 3, each 0.25
        dist = ec_distribution({"A": 0.5, "B": 0.5}, EVAllocation({"A": 1, "B": 2}))
        assert list(dist.pmf) == [0.25, 0.25, 0.25, 0.25]

    def test_state_mismatch(self):
        with pytest.raises(StateMismatch, match="B"):
            ec_distribution({"A": 0.5}, EVAllocation({"A": 1, "B": 2}))
        with pytest.raises(StateMismatch, match="C"):
            ec_distribution({"A": 0.5, "C": 0.5}, EVAllocation({"A": 1}))

    def test_probability_out_of_range(self):
        with pytest.raises(ProbabilityOutOfRange):
            ec_distribution({"A": 1.5}, EVAllocation({"A": 1}))

    def test_input_order_irrelevant(self):
        alloc = EVAllocation({"A": 3, "B": 5, "C": 2})
        wins = {"A": 0.2, "B": 0.7, "C": 0.5}
        reordered = {"C": 0.5, "A": 0.2, "B": 0.7}
        assert np.array_equal(ec_distribution(wins, alloc).pmf,
                              ec_distribution(reordered, alloc).pmf)


class TestBruteForce:
    def test_single_bernoulli(self):
        dist = brute_force_ec({"A": 0.7}, EVAllocation({"A": 3}))
        assert dist.pmf[0] == pytest.approx(0.3, abs=1e-15)
        assert dist.pmf[3] == pytest.approx(0.7, abs=1e-15)
        assert dist.pmf[1] == 0.0 and dist.pmf[2] == 0.0

    def test_matches_convolution(self):
        wins = {"A": 0.5, "B": 0.5}
        alloc = EVAllocation({"A": 1, "B": 2})
        assert np.allclose(brute_force_ec(wins, alloc).pmf,
                           ec_distribution(wins, alloc).pmf, atol=1e-15)

    def test_guard(self):
        votes = {f"S{i}": 1 for i in range(21)}
        wins = {state: 0.5 for state in votes}
        with pytest.raises(TooManyStates):
            brute_force_ec(wins, EVAllocation(votes))


class TestWinChance:
    def test_tail_sum(self):
        dist = brute_force_ec({"A": 0.7}, EVAllocation({"A": 3}))
        assert win_chance(dist, 2) == pytest.approx(0.7, abs=1e-15)

    def test_threshold_zero_is_total_mass(self):
        dist = ec_distribution({"A": 0.3, "B": 0.9}, EVAllocation({"A": 2, "B": 5}))
        assert win_chance(dist, 0) == pytest.approx(1.0, abs=1e-12)

    def test_partial_sum(self):
        dist = ec_distribution({"A": 0.5, "B": 0.5}, EVAllocation({"A": 1, "B": 2}))
        assert win_chance(dist, 2) == 0.5

    def test_threshold_past_end_is_zero(self):
        dist = ec_distribution({"A": 0.5}, EVAllocation({"A": 1}))
        assert win_chance(dist, 2) == 0.0

    def test_threshold_out_of_range(self):
        dist = ec_distribution({"A": 0.5}, EVAllocation({"A": 1}))
        with pytest.raises(ThresholdOutOfRange):
            win_chance(dist, 3)
        with pytest.raises(ThresholdOutOfRange):
            win_chance(dist, -1)


class TestExactTie:
    def test_even_split(self):
        dist = ec_distribution({"A": 0.5, "B": 0.5}, EVAllocation({"A": 1, "B": 1}))
        assert exact_tie_probability(dist) == 0.5

    def test_certain_sweep_has_no_tie(self):
        dist = ec_distribution({"A": 1.0, "B": 1.0}, EVAllocation({"A": 2, "B": 2}))
        assert exact_tie_probability(dist) == 0.0

    def test_odd_total(self):
        dist = ec_distribution({"A": 0.5, "B": 0.5}, EVAllocation({"A": 2, "B": 3}))
        with pytest.raises(OddTotal):
            exact_tie_probability(dist)


def test_oracle_equivalence_random_instances():
    rng = random.Random(1701)
    for _ in range(40):
        wins, alloc = random_instance(rng)
        exact = ec_distribution(wins, alloc)
        brute = brute_force_ec(wins, alloc)
        assert np.max(np.abs(exact.pmf - brute.pmf)) <= 1e-12


def test_complement_symmetry_full_allocation():
    rng = random.Random(93)
    alloc = default_allocation()
    wins = {state: rng.random() for state in alloc.votes}
    flipped = {state: 1.0 - p for state, p in wins.items()}
    pmf_a = ec_distribution(wins, alloc).pmf
    pmf_b = ec_distribution(flipped, alloc).pmf
    assert np.max(np.abs(pmf_a - pmf_b[::-1])) <= 1e-12
    # the flip-side reading: mass at 272 for one side sits at E-272 for the other
    assert abs(pmf_a[272] - pmf_b[538 - 272]) <= 1e-12


def test_multiplication_order_independence():
    rng = random.Random(47)
    alloc = default_allocation()
    wins = {state: rng.random() for state in alloc.votes}
    reference = ec_distribution(wins, alloc).pmf

    # same product computed in shuffled orders, locally
    for seed in range(3):
        order = list(alloc.votes)
        random.Random(seed).shuffle(order)
        pmf = np.zeros(alloc.total + 1)
        pmf[0] = 1.0
        for state in order:
            votes, p_win = alloc.votes[state], wins[state]
            nxt = pmf * (1.0 - p_win)
            nxt[votes:] += pmf[: alloc.total + 1 - votes] * p_win
            pmf = nxt
        assert np.max(np.abs(pmf - reference)) <= 1e-12


def test_mean_identity():
    rng = random.Random(7)
    alloc = default_allocation()
    wins = {state: rng.random() for state in alloc.votes}
    dist = ec_distribution(wins, alloc)
    expected = math.fsum(wins[state] * alloc.votes[state] for state in alloc.votes)
    assert abs(expected_votes(dist) - expected) <= 1e-9


def test_normalization_always_holds():
    rng = random.Random(11)
    for _ in range(20):
        wins, alloc = random_instance(rng)
        dist = ec_distribution(wins, alloc)
        assert abs(math.fsum(dist.pmf) - 1.0) <= 1e-9
        assert np.all(dist.pmf >= 0.0)


def test_bundled_table_matches_module_constant():
    assert default_allocation().votes == ELECTORAL_VOTES_2024
    assert sum(ELECTORAL_VOTES_2024.values()) == 538
