"""Logistic outcome model and the parameter types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy.special import expit


class InvalidParameterError(ValueError):
    """Raised when a model parameter is outside its domain."""


@dataclass(frozen=True)
class LeagueConfig:
    """Parameters of one synthetic league.

    Attributes:
        n_teams: Number of teams.
        delta: Fitness sensitivity; larger values make outcomes more random.
        home_adv: Additive fitness bonus of the home team.
        frac_played: Fraction of all pairings that are scheduled.
        shape_alpha: Exponent of the power-law fitness assignment.
        shape_beta: Spread between the worst and best fitness.
        seed: Seed of the random stream used for schedule and outcomes.
    """

    n_teams: int = 30
    delta: float = 0.1
    home_adv: float = 0.0
    frac_played: float = 1.0
    shape_alpha: float = 1.0
    shape_beta: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if int(self.n_teams) != self.n_teams or self.n_teams < 2:
            raise InvalidParameterError(f"n_teams must be an integer >= 2, got {self.n_teams}")
        if not self.delta > 0:
            raise InvalidParameterError(f"delta must be positive, got {self.delta}")
        if not self.home_adv >= 0:
            raise InvalidParameterError(f"home_adv must be non-negative, got {self.home_adv}")
        if not 0 < self.frac_played <= 1:
            raise InvalidParameterError(f"frac_played must lie in (0, 1], got {self.frac_played}")
        if not self.shape_alpha > 0:
            raise InvalidParameterError(f"shape_alpha must be positive, got {self.shape_alpha}")
        if not 0 < self.shape_beta <= 1:
            raise InvalidParameterError(f"shape_beta must lie in (0, 1], got {self.shape_beta}")


@dataclass(frozen=True)
class FitnessVector:
    """Team fitness values, indexed from the worst team to the best."""

    values: npt.NDArray[np.float64]

    def __len__(self) -> int:
        return len(self.values)

    def ordering(self) -> npt.NDArray[np.int64]:
        """Team indices from the fittest to the least fit."""
        return np.argsort(-self.values, kind="stable")


def _check_delta(delta: float) -> None:
    if not np.all(np.asarray(delta) > 0):
        raise InvalidParameterError(f"delta must be positive, got {delta}")


def win_probability(f_home, f_away, home_adv=0.0, delta=1.0):
    """Probability that the home team wins.

    Computes ``1 / (1 + exp(-(f_home - f_away + home_adv) / delta))``.
    Accepts scalars or broadcastable arrays; the logistic is evaluated
    without overflow for arbitrarily large arguments.
    """
    _check_delta(delta)
    z = (np.asarray(f_home, dtype=float) - np.asarray(f_away, dtype=float) + home_adv) / delta
    p = expit(z)
    return float(p) if np.ndim(p) == 0 else p


def bradley_terry_probability(f_home, f_away, delta=1.0):
    """Bradley-Terry form ``p_i / (p_i + p_j)`` with propensities ``exp(f / delta)``.

    Only meant as an independent check of :func:`win_probability` without
    home advantage. Propensities are taken relative to the larger fitness so
    the exponentials never overflow.
    """
    _check_delta(delta)
    a = np.asarray(f_home, dtype=float) / delta
    b = np.asarray(f_away, dtype=float) / delta
    m = np.maximum(a, b)
    p_home = np.exp(a - m)
    p_away = np.exp(b - m)
    p = p_home / (p_home + p_away)
    return float(p) if np.ndim(p) == 0 else p
