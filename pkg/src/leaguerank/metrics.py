"""Ranking quality against a ground-truth ordering: Kendall tau, average
rank of the top teams, and AUC of the top set."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .model import FitnessVector
from .rankers import TIE_TOL, ScoreVector, to_ranking
from .results import ResultSet

METRICS: tuple[str, ...] = ("kendall", "auc", "avg_top_rank")


@dataclass(frozen=True)
class GroundTruth:
    """Team indices ordered from best to worst.

    Attributes:
        ordering: Permutation of all team indices, best first.
        top_k: Size of the top set used by ``avg_top_rank`` and ``auc_top``.
        tie_broken: True when the underlying quantity had ties that were
            broken by team index.
    """

    ordering: npt.NDArray[np.int64]
    top_k: int = 5
    tie_broken: bool = False

    def __post_init__(self) -> None:
        ordering = np.asarray(self.ordering, dtype=np.int64)
        n = len(ordering)
        if not np.array_equal(np.sort(ordering), np.arange(n)):
            raise ValueError("ordering must be a permutation of all team indices")
        if not 1 <= self.top_k <= n:
            raise ValueError(f"top_k must lie in [1, {n}], got {self.top_k}")
        object.__setattr__(self, "ordering", ordering)

    def __len__(self) -> int:
        return len(self.ordering)

    def positions(self) -> npt.NDArray[np.int64]:
        """0-based truth position of every team (0 = best)."""
        pos = np.empty(len(self.ordering), dtype=np.int64)
        pos[self.ordering] = np.arange(len(self.ordering))
        return pos


def truth_from_fitness(fitness: FitnessVector, top_k: int = 5) -> GroundTruth:
    return GroundTruth(fitness.ordering(), top_k)


def truth_from_wins(results: ResultSet, top_k: int = 5) -> GroundTruth:
    """Order teams by win count; equal counts are broken by lower team index."""
    wins = results.wins()
    ordering = np.lexsort((np.arange(results.n_teams), -wins))
    tied = len(np.unique(wins)) < len(wins)
    return GroundTruth(ordering, min(top_k, results.n_teams), tied)


def _scores(computed: ScoreVector | npt.ArrayLike) -> npt.NDArray[np.float64]:
    return np.asarray(computed.scores if isinstance(computed, ScoreVector) else computed, dtype=float)


def _pair_sign(diff: npt.NDArray[np.float64], tol: float) -> npt.NDArray[np.int64]:
    return np.where(diff > tol, 1, np.where(diff < -tol, -1, 0))


def kendall_tau(computed: ScoreVector | npt.ArrayLike, truth: GroundTruth, tol: float = TIE_TOL) -> float:
    """``(concordant - discordant) / (N(N-1)/2)``.

    Pairs whose computed scores are within ``tol`` are ties and count as
    neither concordant nor discordant.
    """
    s = _scores(computed)
    n = len(s)
    if n != len(truth):
        raise ValueError("score and ground-truth lengths differ")
    if n < 2:
        return 0.0
    i, j = np.triu_indices(n, k=1)
    pos = truth.positions()
    agree = _pair_sign(s[i] - s[j], tol) * np.sign(pos[j] - pos[i])
    return float(agree.sum()) / (n * (n - 1) / 2)


def avg_top_rank(computed: ScoreVector | npt.ArrayLike, truth: GroundTruth, tol: float = TIE_TOL) -> float:
    """Mean computed rank (1 = best, ties fractional) of the top-k truth teams."""
    s = _scores(computed)
    if len(s) != len(truth):
        raise ValueError("score and ground-truth lengths differ")
    ranks = to_ranking(s, tol)
    return float(ranks[truth.ordering[: truth.top_k]].mean())


def auc_top(computed: ScoreVector | npt.ArrayLike, truth: GroundTruth, tol: float = TIE_TOL,
            n_samples: int | None = None, rng: np.random.Generator | None = None) -> float:
    """Probability that a top-k truth team outscores an ordinary team, ties counting 1/2.

    By default every (top, ordinary) pair is evaluated. With ``n_samples``
    the value is instead estimated from that many random pairs.
    """
    s = _scores(computed)
    if len(s) != len(truth):
        raise ValueError("score and ground-truth lengths differ")
    k = truth.top_k
    if k >= len(s):
        raise ValueError("auc_top needs at least one team outside the top set")
    top = s[truth.ordering[:k]]
    rest = s[truth.ordering[k:]]
    if n_samples is None:
        sign = _pair_sign(top[:, None] - rest[None, :], tol)
        n = sign.size
    else:
        if rng is None:
            rng = np.random.default_rng()
        sign = _pair_sign(top[rng.integers(0, len(top), n_samples)] - rest[rng.integers(0, len(rest), n_samples)], tol)
        n = n_samples
    return (float((sign > 0).sum()) + 0.5 * float((sign == 0).sum())) / n


def evaluate(computed: ScoreVector | npt.ArrayLike, truth: GroundTruth, metrics=METRICS) -> dict[str, float]:
    funcs = {"kendall": kendall_tau, "auc": auc_top, "avg_top_rank": avg_top_rank}
    unknown = set(metrics) - set(funcs)
    if unknown:
        raise ValueError(f"unknown metrics: {sorted(unknown)}")
    return {m: funcs[m](computed, truth) for m in metrics}
