import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from leaguerank.model import InvalidParameterError, LeagueConfig, bradley_terry_probability, win_probability

fitness = st.floats(-5, 5, allow_nan=False)
deltas = st.floats(1e-3, 10, allow_nan=False)


def test_equal_fitness_no_home_advantage_is_half():
    for delta in (0.01, 0.3, 7.0):
        assert win_probability(0.4, 0.4, 0.0, delta) == 0.5


def test_reference_value():
    # 1 / (1 + e^-2), evaluated with mpmath at 30 digits
    assert win_probability(0.6, 0.5, 0.1, 0.1) == pytest.approx(0.880797077977882444, abs=1e-12)


def test_large_delta_is_a_coin_flip():
    assert win_probability(0.75, 0.25, 0.25, 1e9) == pytest.approx(0.5, abs=1e-9)


def test_extreme_arguments_do_not_overflow():
    assert win_probability(0.0, 1.0, 0.0, 1e-6) == 0.0
    assert win_probability(1.0, 0.0, 0.0, 1e-6) == 1.0
    assert not np.isnan(bradley_terry_probability(1.0, 0.0, 1e-6))


@pytest.mark.parametrize("delta", [0.0, -0.1])
def test_invalid_delta(delta):
    with pytest.raises(InvalidParameterError):
        win_probability(0.1, 0.2, 0.0, delta)
    with pytest.raises(InvalidParameterError):
        bradley_terry_probability(0.1, 0.2, delta)


def test_vectorized():
    p = win_probability(np.array([0.1, 0.9]), np.array([0.9, 0.1]), 0.0, 0.2)
    assert p.shape == (2,)
    assert p[0] + p[1] == pytest.approx(1.0, abs=1e-15)


def test_bradley_terry_reference():
    # e^4.5 / (e^4.5 + e^0.5)
    assert bradley_terry_probability(0.9, 0.1, 0.2) == pytest.approx(0.982013790037908442, abs=1e-12)
    assert bradley_terry_probability(0.3, 0.3, 0.7) == 0.5


@given(fitness, fitness, deltas)
def test_complementarity(a, b, delta):
    assert win_probability(a, b, 0.0, delta) + win_probability(b, a, 0.0, delta) == pytest.approx(1.0, abs=1e-12)


@given(fitness, fitness, deltas)
def test_bradley_terry_identity(a, b, delta):
    assert win_probability(a, b, 0.0, delta) == pytest.approx(bradley_terry_probability(a, b, delta), abs=1e-12)


@given(fitness, fitness, st.floats(0, 1), deltas, st.floats(0.01, 100))
def test_gauge_scaling(a, b, h, delta, c):
    assert win_probability(c * a, c * b, c * h, c * delta) == pytest.approx(win_probability(a, b, h, delta), abs=1e-12)


@given(fitness, st.floats(1e-3, 1), fitness, deltas)
def test_monotone(a, step, b, delta):
    hi = win_probability(a + step, b, 0.0, delta)
    lo = win_probability(a, b, 0.0, delta)
    assert hi >= lo
    assert win_probability(a, b + step, 0.0, delta) <= lo
    if 0.01 < lo < 0.99:
        assert hi > lo


@pytest.mark.parametrize("kwargs", [
    {"n_teams": 1}, {"delta": 0.0}, {"frac_played": 0.0}, {"frac_played": 1.5},
    {"shape_alpha": 0.0}, {"shape_beta": 0.0}, {"shape_beta": 1.2}, {"home_adv": -0.1},
])
def test_league_config_rejects(kwargs):
    with pytest.raises(InvalidParameterError):
        LeagueConfig(**kwargs)


def test_league_config_defaults_are_valid():
    cfg = LeagueConfig()
    assert cfg.n_teams == 30 and math.isclose(cfg.frac_played, 1.0)
