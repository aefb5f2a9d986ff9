"""Synthetic league generator: fitness assignment, random schedules, outcomes,
and removal or reversal of unexpected outcomes."""

from __future__ import annotations

import math
from typing import Literal

import numpy as np
import numpy.typing as npt

from .model import FitnessVector, InvalidParameterError, LeagueConfig, win_probability
from .results import ResultSet

MAX_SCHEDULE_RETRIES = 20
SWAPS_PER_GAME = 10


class ScheduleError(RuntimeError):
    """A schedule with the requested degree sequence could not be built."""


def _round_half_up(x: float) -> int:
    # the epsilon absorbs representation error, e.g. 0.1 * 435 -> 43.50000000000001
    return int(math.floor(x + 0.5 + 1e-9))


def make_fitness(n_teams: int, shape_alpha: float = 1.0, shape_beta: float = 1.0) -> FitnessVector:
    """Power-law fitness ``beta * ((i - 0.5) / N) ** alpha + gamma`` for ``i = 1..N``.

    ``gamma`` is set so that the mean fitness is exactly 1/2. With
    ``alpha = beta = 1`` the values form the uniform grid ``(i - 0.5) / N``.
    """
    if n_teams < 2:
        raise InvalidParameterError(f"n_teams must be >= 2, got {n_teams}")
    if not shape_alpha > 0:
        raise InvalidParameterError(f"shape_alpha must be positive, got {shape_alpha}")
    if not shape_beta > 0:
        raise InvalidParameterError(f"shape_beta must be positive, got {shape_beta}")
    x = (np.arange(1, n_teams + 1) - 0.5) / n_teams
    raw = shape_beta * x**shape_alpha
    gamma = 0.5 - raw.mean()
    values = raw + gamma
    # remove residual rounding so the mean sits on 1/2
    values -= values.mean() - 0.5
    return FitnessVector(values)


def is_graphical(degrees) -> bool:
    """Erdős–Gallai test for a simple-graph degree sequence."""
    d = sorted((int(x) for x in degrees), reverse=True)
    n = len(d)
    if any(x < 0 or x > n - 1 for x in d) or sum(d) % 2:
        return False
    prefix = 0
    for k in range(1, n + 1):
        prefix += d[k - 1]
        tail = sum(min(x, k) for x in d[k:])
        if prefix > k * (k - 1) + tail:
            return False
    return True


def _havel_hakimi(degrees: list[int]) -> list[tuple[int, int]]:
    remaining = list(degrees)
    edges = []
    while True:
        # largest remaining degree, lowest index on ties
        v = max(range(len(remaining)), key=lambda i: (remaining[i], -i))
        d = remaining[v]
        if d == 0:
            return edges
        remaining[v] = 0
        others = sorted((i for i in range(len(remaining)) if remaining[i] > 0), key=lambda i: (-remaining[i], i))
        if len(others) < d:
            raise ScheduleError("degree sequence is not graphical")
        for u in others[:d]:
            remaining[u] -= 1
            edges.append((min(u, v), max(u, v)))


def _double_edge_swaps(edges: list[tuple[int, int]], n_teams: int, n_swaps: int,
                       rng: np.random.Generator) -> list[tuple[int, int]]:
    m = len(edges)
    if m < 2 or m == n_teams * (n_teams - 1) // 2:
        return edges
    edges = list(edges)
    present = {u * n_teams + v for u, v in edges}
    max_tries = 10 * n_swaps
    done = tries = 0
    while done < n_swaps and tries < max_tries:
        batch = min(4096, max_tries - tries)
        picks = rng.integers(0, m, size=(batch, 2)).tolist()
        flips = (rng.random(batch) < 0.5).tolist()
        for (i, j), flip in zip(picks, flips):
            tries += 1
            if i == j:
                continue
            a, b = edges[i]
            c, d = edges[j]
            if flip:
                c, d = d, c
            # (a,b),(c,d) -> (a,d),(c,b)
            if a == d or c == b:
                continue
            e1 = (a, d) if a < d else (d, a)
            e2 = (c, b) if c < b else (b, c)
            k1 = e1[0] * n_teams + e1[1]
            k2 = e2[0] * n_teams + e2[1]
            if k1 in present or k2 in present or k1 == k2:
                continue
            present.discard(edges[i][0] * n_teams + edges[i][1])
            present.discard(edges[j][0] * n_teams + edges[j][1])
            present.add(k1)
            present.add(k2)
            edges[i] = e1
            edges[j] = e2
            done += 1
            if done >= n_swaps:
                break
    return edges


def schedule_size(n_teams: int, frac_played: float) -> int:
    """Number of games, ``P * N(N-1)/2`` rounded half-up."""
    return _round_half_up(frac_played * n_teams * (n_teams - 1) / 2)


def make_schedule(n_teams: int, frac_played: float, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Random simple schedule of ``(home, away)`` pairs in random chronological order.

    Every team plays ``floor(P(N-1))`` or ``ceil(P(N-1))`` games and no pair
    meets twice. A Havel-Hakimi realization of the degree sequence is
    randomized with at least ``10 * G`` successful double-edge swaps, then
    each game gets a random home side.
    """
    if n_teams < 2:
        raise InvalidParameterError(f"n_teams must be >= 2, got {n_teams}")
    if not 0 < frac_played <= 1:
        raise InvalidParameterError(f"frac_played must lie in (0, 1], got {frac_played}")
    n_games = schedule_size(n_teams, frac_played)
    base, extra = divmod(2 * n_games, n_teams)
    for _ in range(MAX_SCHEDULE_RETRIES):
        degrees = np.full(n_teams, base, dtype=np.int64)
        degrees[rng.permutation(n_teams)[:extra]] += 1
        if is_graphical(degrees):
            break
    else:
        raise ScheduleError(f"no graphical degree sequence for N={n_teams}, P={frac_played}")
    edges = _havel_hakimi(degrees.tolist())
    edges = _double_edge_swaps(edges, n_teams, SWAPS_PER_GAME * n_games, rng)
    flip = rng.random(len(edges)) < 0.5
    pairs = [(v, u) if f else (u, v) for (u, v), f in zip(edges, flip.tolist())]
    return [pairs[i] for i in rng.permutation(len(pairs))]


def simulate_season(config: LeagueConfig, rng: np.random.Generator | None = None) -> tuple[FitnessVector, ResultSet]:
    """Fitness, schedule, and sampled outcomes for one synthetic season.

    The random stream is ``np.random.default_rng(config.seed)`` unless an
    explicit generator is passed.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    fitness = make_fitness(config.n_teams, config.shape_alpha, config.shape_beta)
    schedule = make_schedule(config.n_teams, config.frac_played, rng)
    pairs = np.array(schedule, dtype=np.int64).reshape(-1, 2)
    home, away = pairs[:, 0], pairs[:, 1]
    p = win_probability(fitness.values[home], fitness.values[away], config.home_adv, config.delta)
    home_won = rng.random(len(pairs)) < p
    return fitness, ResultSet(config.n_teams, home, away, home_won)


def unexpected_mask(results: ResultSet, fitness: FitnessVector) -> npt.NDArray[np.bool_]:
    """Games won by the less fit team."""
    f = np.asarray(fitness.values)
    if len(f) != results.n_teams:
        raise ValueError("fitness length does not match n_teams")
    return f[results.winners] < f[results.losers]


def perturb_unexpected(results: ResultSet, fitness: FitnessVector, eta: float,
                       mode: Literal["remove", "revert"], rng: np.random.Generator) -> ResultSet:
    """Remove or revert a random fraction ``eta`` of the unexpected outcomes.

    ``round(eta * U)`` (half-up) of the ``U`` upsets are chosen uniformly
    without replacement. The generator always draws one permutation of the
    upsets, so equal seeds give nested selections across ``eta``.
    """
    if not 0 <= eta <= 1:
        raise InvalidParameterError(f"eta must lie in [0, 1], got {eta}")
    if mode not in ("remove", "revert"):
        raise InvalidParameterError(f"mode must be 'remove' or 'revert', got {mode!r}")
    upsets = np.flatnonzero(unexpected_mask(results, fitness))
    count = _round_half_up(eta * len(upsets))
    chosen = upsets[rng.permutation(len(upsets))[:count]]
    if mode == "remove":
        keep = np.ones(len(results), dtype=bool)
        keep[chosen] = False
        return results.subset(keep)
    won = results.home_won.copy()
    won[chosen] = ~won[chosen]
    return ResultSet(results.n_teams, results.home, results.away, won, results.order)
