"""Win ratio, PageRank, and bi-directional PageRank team scores."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt

from .results import ResultSet

TIE_TOL = 1e-10
DEFAULT_TELEPORT = 0.15

Method = Literal["WinRatio", "PageRank", "BiPageRank"]
METHODS: tuple[str, ...] = ("WinRatio", "PageRank", "BiPageRank")


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last L1 residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class WinLossNetwork:
    """Directed network where ``wins[j, i]`` counts the wins of ``i`` over ``j``.

    Links point from loser to winner, so prestige flows towards winners.
    """

    wins: npt.NDArray[np.int64]

    def __post_init__(self) -> None:
        w = np.asarray(self.wins, dtype=np.int64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("wins must be a square matrix")
        if np.any(np.diag(w) != 0) or np.any(w < 0):
            raise ValueError("wins must be non-negative with a zero diagonal")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "wins", w)

    @property
    def n_teams(self) -> int:
        return self.wins.shape[0]

    @property
    def out_strength(self) -> npt.NDArray[np.int64]:
        """Losses of each team."""
        return self.wins.sum(axis=1)

    @property
    def in_strength(self) -> npt.NDArray[np.int64]:
        """Wins of each team."""
        return self.wins.sum(axis=0)

    def reversed(self) -> "WinLossNetwork":
        return WinLossNetwork(self.wins.T)


@dataclass(frozen=True)
class ScoreVector:
    scores: npt.NDArray[np.float64]
    method: str

    def __len__(self) -> int:
        return len(self.scores)


def build_network(results: ResultSet) -> WinLossNetwork:
    """Accumulate one unit of link weight from the loser to the winner of every game."""
    n = results.n_teams
    flat = np.bincount(results.losers * n + results.winners, minlength=n * n)
    return WinLossNetwork(flat.reshape(n, n))


def win_ratio(results: ResultSet) -> ScoreVector:
    """Wins divided by games played; teams without games score 0."""
    wins = results.wins()
    played = results.games_played()
    scores = np.divide(wins, played, out=np.zeros(results.n_teams), where=played > 0)
    return ScoreVector(scores, "WinRatio")


def _pagerank_vector(weights: npt.NDArray, teleport_alpha: float, tol: float, max_iter: int) -> npt.NDArray[np.float64]:
    n = weights.shape[0]
    strength = weights.sum(axis=1).astype(float)
    dangling = strength == 0
    transition = np.divide(weights, strength[:, None], out=np.zeros(weights.shape), where=~dangling[:, None])
    damping = 1.0 - teleport_alpha
    p = np.full(n, 1.0 / n)
    residual = np.inf
    for _ in range(max_iter):
        # dangling mass is a scalar broadcast to every node
        new = damping * (p @ transition) + teleport_alpha / n + damping * p[dangling].sum() / n
        residual = np.abs(new - p).sum()
        p = new
        if residual < tol:
            return p
    raise ConvergenceError(f"PageRank did not converge in {max_iter} iterations", residual)


def pagerank(network: WinLossNetwork, teleport_alpha: float = DEFAULT_TELEPORT,
             tol: float = 1e-12, max_iter: int = 10_000) -> ScoreVector:
    """PageRank prestige with uniform redistribution of dangling-node score.

    Power iteration from the uniform vector until the L1 change drops below
    ``tol``. Teams without losses are dangling.
    """
    if not 0 < teleport_alpha < 1:
        raise ValueError(f"teleport_alpha must lie in (0, 1), got {teleport_alpha}")
    return ScoreVector(_pagerank_vector(network.wins, teleport_alpha, tol, max_iter), "PageRank")


def bipagerank(network: WinLossNetwork, teleport_alpha: float = DEFAULT_TELEPORT,
               tol: float = 1e-12, max_iter: int = 10_000) -> ScoreVector:
    """PageRank on the win network minus PageRank on the reversed (loss) network."""
    p = pagerank(network, teleport_alpha, tol, max_iter).scores
    q = pagerank(network.reversed(), teleport_alpha, tol, max_iter).scores
    return ScoreVector(p - q, "BiPageRank")


def pagerank_direct(network: WinLossNetwork, teleport_alpha: float = DEFAULT_TELEPORT) -> npt.NDArray[np.float64]:
    """Dense linear-system solution of the PageRank fixed point (for cross-checks)."""
    w = network.wins.astype(float)
    n = w.shape[0]
    strength = w.sum(axis=1)
    dangling = (strength == 0).astype(float)
    transition = np.divide(w, strength[:, None], out=np.zeros_like(w), where=strength[:, None] > 0)
    damping = 1.0 - teleport_alpha
    a = np.eye(n) - damping * transition.T - damping / n * np.outer(np.ones(n), dangling)
    return np.linalg.solve(a, np.full(n, teleport_alpha / n))


def score(results: ResultSet, method: str, teleport_alpha: float = DEFAULT_TELEPORT) -> ScoreVector:
    """Score teams with the named method (``WinRatio``, ``PageRank`` or ``BiPageRank``)."""
    key = method.lower()
    if key == "winratio":
        return win_ratio(results)
    if key == "pagerank":
        return pagerank(build_network(results), teleport_alpha)
    if key == "bipagerank":
        return bipagerank(build_network(results), teleport_alpha)
    raise ValueError(f"unknown ranking method {method!r}; expected one of {', '.join(METHODS)}")


def canonical_method(method: str) -> str:
    for m in METHODS:
        if m.lower() == method.lower():
            return m
    raise ValueError(f"unknown ranking method {method!r}; expected one of {', '.join(METHODS)}")


def to_ranking(scores: ScoreVector | npt.ArrayLike, tol: float = TIE_TOL) -> npt.NDArray[np.float64]:
    """Fractional ranks, 1 = best.

    Scores are sorted in descending order; consecutive scores within ``tol``
    of each other form a tie group whose members share the mean of the
    positions the group spans.
    """
    s = np.asarray(scores.scores if isinstance(scores, ScoreVector) else scores, dtype=float)
    n = len(s)
    order = np.argsort(-s, kind="stable")
    sorted_s = s[order]
    ranks = np.empty(n)
    start = 0
    for k in range(1, n + 1):
        if k == n or sorted_s[k - 1] - sorted_s[k] > tol:
            ranks[order[start:k]] = (start + 1 + k) / 2
            start = k
    return ranks
