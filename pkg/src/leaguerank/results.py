"""Game records, result sets, and their CSV representation."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

import numpy as np
import numpy.typing as npt

RESULTS_HEADER = ("order", "home", "away", "home_won")


class DataFormatError(ValueError):
    """Raised for malformed input files; the message carries the line number."""


class GameRecord(NamedTuple):
    home: int
    away: int
    home_won: bool
    order: int = 0

    @property
    def winner(self) -> int:
        return self.home if self.home_won else self.away

    @property
    def loser(self) -> int:
        return self.away if self.home_won else self.home


@dataclass(frozen=True)
class ResultSet:
    """Chronologically ordered games between ``n_teams`` teams.

    Games are stored column-wise; iterate over the set (or use ``games``)
    to get :class:`GameRecord` tuples.
    """

    n_teams: int
    home: npt.NDArray[np.int64] = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    away: npt.NDArray[np.int64] = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    home_won: npt.NDArray[np.bool_] = field(default_factory=lambda: np.zeros(0, dtype=bool))
    order: npt.NDArray[np.int64] | None = None

    def __post_init__(self) -> None:
        home = np.asarray(self.home, dtype=np.int64)
        away = np.asarray(self.away, dtype=np.int64)
        won = np.asarray(self.home_won, dtype=bool)
        order = np.arange(len(home), dtype=np.int64) if self.order is None else np.asarray(self.order, dtype=np.int64)
        if not (len(home) == len(away) == len(won) == len(order)):
            raise ValueError("home, away, home_won and order must have equal length")
        if self.n_teams < 1:
            raise ValueError("n_teams must be positive")
        if len(home):
            if np.any(home == away):
                raise ValueError("a team cannot play against itself")
            lo = min(home.min(), away.min())
            hi = max(home.max(), away.max())
            if lo < 0 or hi >= self.n_teams:
                raise ValueError(f"team index out of range [0, {self.n_teams})")
            if np.any(np.diff(order) < 0):
                idx = np.argsort(order, kind="stable")
                home, away, won, order = home[idx], away[idx], won[idx], order[idx]
        for name, arr in (("home", home), ("away", away), ("home_won", won), ("order", order)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_games(cls, n_teams: int, games: Iterable[GameRecord | tuple]) -> "ResultSet":
        games = [GameRecord(*g) for g in games]
        if not games:
            return cls(n_teams)
        home, away, won, order = zip(*games)
        return cls(n_teams, np.array(home), np.array(away), np.array(won, dtype=bool), np.array(order))

    def __len__(self) -> int:
        return len(self.home)

    def __iter__(self) -> Iterator[GameRecord]:
        for h, a, w, o in zip(self.home.tolist(), self.away.tolist(), self.home_won.tolist(), self.order.tolist()):
            yield GameRecord(h, a, w, o)

    @property
    def games(self) -> list[GameRecord]:
        return list(self)

    @property
    def winners(self) -> npt.NDArray[np.int64]:
        return np.where(self.home_won, self.home, self.away)

    @property
    def losers(self) -> npt.NDArray[np.int64]:
        return np.where(self.home_won, self.away, self.home)

    def subset(self, mask_or_index) -> "ResultSet":
        """Games selected by a boolean mask or an index array, order preserved."""
        return ResultSet(
            self.n_teams,
            self.home[mask_or_index],
            self.away[mask_or_index],
            self.home_won[mask_or_index],
            self.order[mask_or_index],
        )

    def head(self, n_games: int) -> "ResultSet":
        return self.subset(slice(0, max(int(n_games), 0)))

    def wins(self) -> npt.NDArray[np.int64]:
        return np.bincount(self.winners, minlength=self.n_teams)

    def games_played(self) -> npt.NDArray[np.int64]:
        return np.bincount(self.home, minlength=self.n_teams) + np.bincount(self.away, minlength=self.n_teams)

    def mirrored(self) -> "ResultSet":
        """Same games with home and away swapped and outcomes flipped."""
        return ResultSet(self.n_teams, self.away, self.home, ~self.home_won, self.order)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ResultSet):
            return NotImplemented
        return (
            self.n_teams == other.n_teams
            and np.array_equal(self.home, other.home)
            and np.array_equal(self.away, other.away)
            and np.array_equal(self.home_won, other.home_won)
            and np.array_equal(self.order, other.order)
        )

    __hash__ = None  # type: ignore[assignment]


def write_results_csv(results: ResultSet, path: str | os.PathLike | io.TextIOBase) -> None:
    """Write ``order,home,away,home_won`` rows; ``home_won`` is 0/1."""

    def _write(fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULTS_HEADER)
        for g in results:
            writer.writerow((g.order, g.home, g.away, int(g.home_won)))

    if isinstance(path, io.TextIOBase):
        _write(path)
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            _write(fh)


def _parse_bool(token: str) -> bool:
    t = token.strip().lower()
    if t in ("1", "true", "t", "yes"):
        return True
    if t in ("0", "false", "f", "no"):
        return False
    raise ValueError(f"not a boolean: {token!r}")


def read_results_csv(path: str | os.PathLike, n_teams: int | None = None) -> ResultSet:
    """Read a result set written by :func:`write_results_csv`.

    ``n_teams`` defaults to one more than the largest team index found.
    """
    homes, aways, wons, orders = [], [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != RESULTS_HEADER:
            raise DataFormatError(f"{path}:1: expected header {','.join(RESULTS_HEADER)}")
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(RESULTS_HEADER):
                raise DataFormatError(f"{path}:{lineno}: expected {len(RESULTS_HEADER)} fields, got {len(row)}")
            try:
                order, home, away = int(row[0]), int(row[1]), int(row[2])
                won = _parse_bool(row[3])
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: {exc}") from None
            if home == away or home < 0 or away < 0:
                raise DataFormatError(f"{path}:{lineno}: invalid team pair ({home}, {away})")
            orders.append(order)
            homes.append(home)
            aways.append(away)
            wons.append(won)
    top = max(homes + aways, default=-1) + 1
    if n_teams is None:
        n_teams = max(top, 1)
    elif top > n_teams:
        raise DataFormatError(f"{path}: team index {top - 1} exceeds n_teams={n_teams}")
    return ResultSet(n_teams, np.array(homes, dtype=np.int64), np.array(aways, dtype=np.int64),
                     np.array(wons, dtype=bool), np.array(orders, dtype=np.int64))


def concat_results(parts: Iterable[ResultSet]) -> ResultSet:
    """Chain result sets over the same teams, renumbering ``order`` consecutively."""
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to concatenate")
    n = parts[0].n_teams
    if any(p.n_teams != n for p in parts):
        raise ValueError("all parts must have the same n_teams")
    home = np.concatenate([p.home for p in parts])
    return ResultSet(n, home, np.concatenate([p.away for p in parts]),
                     np.concatenate([p.home_won for p in parts]), np.arange(len(home)))
