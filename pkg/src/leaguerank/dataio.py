"""Loading real game results grouped by season.

The canonical input is a CSV file with header ``season,date,home,away,outcome``
where ``outcome`` is ``H`` (home win), ``A`` (away win) or ``D`` (draw). The
same fields are accepted as JSON lines. Draws are dropped on load.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
import os
import warnings
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .results import DataFormatError, ResultSet

SEASON_FIELDS = ("season", "date", "home", "away", "outcome")
OUTCOMES = {"H": "home_win", "A": "away_win", "D": "draw"}


class RawGameRow(NamedTuple):
    season: str
    date_order: str
    home_name: str
    away_name: str
    outcome: str
    line: int = 0


@dataclass(frozen=True)
class SeasonData:
    season: str
    team_names: tuple[str, ...]
    results: ResultSet

    @property
    def n_games(self) -> int:
        return len(self.results)


def _csv_rows(path: str | os.PathLike) -> Iterator[tuple[int, dict]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataFormatError(f"{path}:1: empty file")
        header = [h.strip().lower() for h in header]
        missing = [f for f in SEASON_FIELDS if f not in header]
        if missing:
            raise DataFormatError(f"{path}:1: missing columns {', '.join(missing)}")
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataFormatError(f"{path}:{reader.line_num}: expected {len(header)} fields, got {len(row)}")
            yield reader.line_num, dict(zip(header, row))


def _jsonl_rows(path: str | os.PathLike) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise DataFormatError(f"{path}:{lineno}: expected a JSON object")
            missing = [f for f in SEASON_FIELDS if f not in obj]
            if missing:
                raise DataFormatError(f"{path}:{lineno}: missing fields {', '.join(missing)}")
            yield lineno, {k: str(v) for k, v in obj.items()}


def read_rows(path: str | os.PathLike, fmt: str | None = None) -> list[RawGameRow]:
    """Parse and validate every row, draws included."""
    if fmt is None:
        fmt = "jsonl" if str(path).endswith((".jsonl", ".ndjson")) else "csv"
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"unknown format {fmt!r}")
    source = _csv_rows(path) if fmt == "csv" else _jsonl_rows(path)
    rows = []
    for lineno, rec in source:
        season = rec["season"].strip()
        home = rec["home"].strip()
        away = rec["away"].strip()
        token = rec["outcome"].strip().upper()
        if not season or not home or not away:
            raise DataFormatError(f"{path}:{lineno}: empty season or team name")
        if home == away:
            raise DataFormatError(f"{path}:{lineno}: team {home!r} plays against itself")
        if token not in OUTCOMES:
            raise DataFormatError(f"{path}:{lineno}: unknown outcome {rec['outcome']!r} (expected H, A or D)")
        rows.append(RawGameRow(season, rec["date"].strip(), home, away, OUTCOMES[token], lineno))
    return rows


def _date_key(values: list[str]):
    try:
        return [float(v) for v in values]
    except ValueError:
        pass
    try:
        return [dt.date.fromisoformat(v).toordinal() for v in values]
    except ValueError:
        return values


def seasons_from_rows(rows: Iterable[RawGameRow]) -> list[SeasonData]:
    """Group rows by season, drop draws, and intern team names per season.

    Games are sorted by date (numeric, ISO date, or plain string order);
    games on the same date keep their file order. Seasons are returned
    sorted by their label.
    """
    by_season: dict[str, list[RawGameRow]] = {}
    for row in rows:
        by_season.setdefault(row.season, []).append(row)
    seasons = []
    for label in sorted(by_season):
        played = [r for r in by_season[label] if r.outcome != "draw"]
        if not played:
            warnings.warn(f"season {label!r} has no decided games; skipped", RuntimeWarning, stacklevel=2)
            continue
        keys = _date_key([r.date_order for r in played])
        played = [r for _, _, r in sorted(zip(keys, range(len(played)), played), key=lambda t: (t[0], t[1]))]
        names: dict[str, int] = {}
        for r in played:
            names.setdefault(r.home_name, len(names))
            names.setdefault(r.away_name, len(names))
        home = np.array([names[r.home_name] for r in played], dtype=np.int64)
        away = np.array([names[r.away_name] for r in played], dtype=np.int64)
        won = np.array([r.outcome == "home_win" for r in played], dtype=bool)
        seasons.append(SeasonData(label, tuple(names), ResultSet(len(names), home, away, won)))
    return seasons


def load_seasons(path: str | os.PathLike, fmt: str | None = None) -> list[SeasonData]:
    """Read a results file into per-season data with draws removed.

    ``fmt`` is ``"csv"`` or ``"jsonl"``; by default it follows the file
    extension. Malformed rows raise :class:`DataFormatError` naming the line.
    """
    return seasons_from_rows(read_rows(path, fmt))


def draw_fraction(rows: Iterable[RawGameRow]) -> float:
    rows = list(rows)
    return sum(r.outcome == "draw" for r in rows) / len(rows) if rows else 0.0


def truncate_season(season: SeasonData, frac: float) -> ResultSet:
    """The first ``floor(frac * N_S)`` games of the season."""
    if not 0 < frac <= 1:
        raise ValueError(f"frac must lie in (0, 1], got {frac}")
    # the epsilon absorbs representation error such as 0.29 * 100 = 28.999999999999996
    n = int(math.floor(frac * season.n_games + 1e-9))
    return season.results.head(n)


def write_seasons_csv(seasons: Iterable[SeasonData], path: str | os.PathLike) -> None:
    """Write seasons in the canonical CSV format, using game order as the date."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SEASON_FIELDS)
        for s in seasons:
            for i, g in enumerate(s.results):
                writer.writerow((s.season, i, s.team_names[g.home], s.team_names[g.away], "H" if g.home_won else "A"))
