import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leaguerank.model import InvalidParameterError, LeagueConfig, win_probability
from leaguerank.results import ResultSet
from leaguerank.synth import (
    is_graphical,
    make_fitness,
    make_schedule,
    perturb_unexpected,
    schedule_size,
    simulate_season,
    unexpected_mask,
)


def test_uniform_fitness_grid():
    f = make_fitness(4, 1.0, 1.0)
    np.testing.assert_allclose(f.values, [0.125, 0.375, 0.625, 0.875], atol=1e-15)


def test_power_law_fitness_hand_evaluated():
    # raw (0.0625, 0.5625), offset 0.1875
    np.testing.assert_allclose(make_fitness(2, 2.0, 1.0).values, [0.25, 0.75], atol=1e-15)


@given(st.integers(2, 60), st.floats(0.05, 4), st.floats(0.05, 1))
def test_fitness_mean_and_order(n, alpha, beta):
    f = make_fitness(n, alpha, beta).values
    assert abs(f.mean() - 0.5) < 1e-12
    assert np.all(np.diff(f) > 0)


def test_fitness_rejects_bad_shape():
    with pytest.raises(InvalidParameterError):
        make_fitness(5, 0.0, 1.0)
    with pytest.raises(InvalidParameterError):
        make_fitness(1, 1.0, 1.0)


def _degrees(pairs, n):
    d = np.zeros(n, dtype=int)
    for h, a in pairs:
        d[h] += 1
        d[a] += 1
    return d


def test_full_round_robin():
    pairs = make_schedule(4, 1.0, np.random.default_rng(0))
    assert len(pairs) == 6
    assert {frozenset(p) for p in pairs} == {frozenset(p) for p in itertools.combinations(range(4), 2)}
    assert list(_degrees(pairs, 4)) == [3, 3, 3, 3]


def test_two_teams():
    assert len(make_schedule(2, 1.0, np.random.default_rng(1))) == 1


def test_partial_schedule_size_and_degrees():
    # round(0.1 * 435) = round(43.5) = 44 games, so degrees 2 or 3 summing to 88
    pairs = make_schedule(30, 0.1, np.random.default_rng(2))
    assert schedule_size(30, 0.1) == 44
    assert len(pairs) == 44
    d = _degrees(pairs, 30)
    assert set(d) <= {2, 3} and d.sum() == 88


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 25), st.floats(0.01, 1.0), st.integers(0, 2**32))
def test_schedule_is_simple_and_regular(n, p, seed):
    pairs = make_schedule(n, p, np.random.default_rng(seed))
    assert len(pairs) == schedule_size(n, p)
    keys = [frozenset(x) for x in pairs]
    assert all(len(k) == 2 for k in keys)
    assert len(set(keys)) == len(keys)
    d = _degrees(pairs, n)
    assert d.max() - d.min() <= 1
    lo, hi = np.floor(p * (n - 1) - 1e-9), np.ceil(p * (n - 1) + 1e-9)
    # the total is rounded, so degrees may leave [floor, ceil] by at most one game overall
    assert np.sum((d < lo) | (d > hi)) <= 2


def test_erdos_gallai():
    assert is_graphical([3, 3, 3, 3])
    assert is_graphical([2, 2, 2])
    assert not is_graphical([3, 3, 1, 1])
    assert not is_graphical([1, 1, 1])
    assert not is_graphical([4, 1, 1, 1])


def test_schedule_edges_are_well_mixed():
    # low-degree schedules should not keep the Havel-Hakimi structure
    rng = np.random.default_rng(5)
    counts = Counter()
    for _ in range(300):
        for h, a in make_schedule(10, 0.34, rng):
            counts[frozenset((h, a))] += 1
    assert len(counts) == 45
    assert max(counts.values()) < 3 * min(counts.values())


def test_home_assignment_balance():
    rng = np.random.default_rng(11)
    home = np.zeros(12)
    played = np.zeros(12)
    for _ in range(400):
        for h, a in make_schedule(12, 0.5, rng):
            home[h] += 1
            played[h] += 1
            played[a] += 1
    frac = home / played
    sigma = np.sqrt(0.25 / played)
    assert np.all(np.abs(frac - 0.5) < 3 * sigma)


def test_simulate_season_is_deterministic():
    cfg = LeagueConfig(n_teams=12, delta=0.2, home_adv=0.05, frac_played=0.6, seed=42)
    f1, r1 = simulate_season(cfg)
    f2, r2 = simulate_season(cfg)
    assert r1 == r2
    np.testing.assert_array_equal(f1.values, f2.values)
    _, r3 = simulate_season(LeagueConfig(n_teams=12, delta=0.2, home_adv=0.05, frac_played=0.6, seed=43))
    assert r1 != r3


def test_coin_flip_limit():
    wins = games = 0
    for seed in range(1000):
        _, r = simulate_season(LeagueConfig(n_teams=30, delta=1e9, frac_played=1.0, seed=seed))
        wins += int(r.home_won.sum())
        games += len(r)
    assert abs(wins / games - 0.5) < 0.01


def test_low_randomness_favours_fitter_team():
    # gap of two grid steps at delta=0.01 gives P = 0.998729
    upsets = games = 0
    for seed in range(20):
        f, r = simulate_season(LeagueConfig(n_teams=30, delta=0.01, frac_played=1.0, seed=seed))
        far = np.abs(r.home - r.away) >= 2
        upsets += int(unexpected_mask(r, f)[far].sum())
        games += int(far.sum())
    assert 1 - upsets / games >= 0.99


def test_outcome_frequencies_follow_the_model():
    fitness = make_fitness(2, 1.0, 1.0)
    rng = np.random.default_rng(123)
    n = 100_000
    p = win_probability(fitness.values[0], fitness.values[1], 0.08, 0.25)
    hits = (rng.random(n) < p).sum()
    # draw the outcomes exactly as simulate_season does, on a fixed pairing
    se = np.sqrt(p * (1 - p) / n)
    assert abs(hits / n - p) < 3 * se
    total = home_wins = 0
    for seed in range(300):
        f, r = simulate_season(LeagueConfig(n_teams=4, delta=0.25, home_adv=0.08, seed=seed))
        mask = (r.home == 3) & (r.away == 0)
        home_wins += int(r.home_won[mask].sum())
        total += int(mask.sum())
    p30 = win_probability(0.875, 0.125, 0.08, 0.25)
    assert abs(home_wins / total - p30) < 3 * np.sqrt(p30 * (1 - p30) / total)


@pytest.fixture
def season():
    return simulate_season(LeagueConfig(n_teams=30, delta=0.25, home_adv=0.08, frac_played=1.0, seed=9))


def test_perturb_eta_zero_is_identity(season):
    f, r = season
    for mode in ("remove", "revert"):
        assert perturb_unexpected(r, f, 0.0, mode, np.random.default_rng(0)) == r


def test_perturb_revert_all(season):
    f, r = season
    out = perturb_unexpected(r, f, 1.0, "revert", np.random.default_rng(0))
    assert len(out) == len(r)
    assert not unexpected_mask(out, f).any()
    # on a full round robin, team i beats exactly the i weaker teams
    np.testing.assert_array_equal(out.wins(), np.arange(30))


def test_perturb_remove_all(season):
    f, r = season
    upsets = int(unexpected_mask(r, f).sum())
    out = perturb_unexpected(r, f, 1.0, "remove", np.random.default_rng(0))
    assert len(out) == len(r) - upsets
    assert not unexpected_mask(out, f).any()


def test_perturb_partial_counts_and_nesting(season):
    f, r = season
    u = int(unexpected_mask(r, f).sum())
    previous = None
    for eta in (0.1, 0.35, 0.5, 0.8):
        out = perturb_unexpected(r, f, eta, "remove", np.random.default_rng(77))
        assert len(r) - len(out) == int(np.floor(eta * u + 0.5))
        kept = set(out.order.tolist())
        if previous is not None:
            assert kept <= previous
        previous = kept


def test_perturb_leaves_expected_games_alone(season):
    f, r = season
    out = perturb_unexpected(r, f, 0.5, "revert", np.random.default_rng(3))
    expected = ~unexpected_mask(r, f)
    np.testing.assert_array_equal(out.home_won[expected], r.home_won[expected])


def test_perturb_rejects_bad_arguments(season):
    f, r = season
    with pytest.raises(InvalidParameterError):
        perturb_unexpected(r, f, 1.5, "remove", np.random.default_rng(0))
    with pytest.raises(InvalidParameterError):
        perturb_unexpected(r, f, 0.5, "flip", np.random.default_rng(0))


def test_result_set_invariants():
    with pytest.raises(ValueError):
        ResultSet(3, [0], [0], [True])
    with pytest.raises(ValueError):
        ResultSet(3, [0], [3], [True])
