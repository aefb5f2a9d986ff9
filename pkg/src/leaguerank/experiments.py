"""Monte Carlo sweeps over model parameters and the early-season evaluation
protocol for real (or real-like) seasons."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np
import numpy.typing as npt

from .dataio import SeasonData, truncate_season
from .metrics import METRICS, auc_top, avg_top_rank, kendall_tau, truth_from_fitness, truth_from_wins
from .model import LeagueConfig
from .rankers import METHODS, canonical_method, score
from .synth import perturb_unexpected, simulate_season

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

CONFIG_FIELDS = ("n_teams", "delta", "home_adv", "frac_played", "shape_alpha", "shape_beta")
PERTURB_FIELDS = ("eta", "mode")
AXES = CONFIG_FIELDS + PERTURB_FIELDS
_METRIC_FUNCS = {"kendall": kendall_tau, "auc": auc_top, "avg_top_rank": avg_top_rank}


@dataclass(frozen=True)
class SweepSpec:
    """A grid of league parameters, each point simulated ``realizations`` times.

    ``grid`` maps axis names to value lists; ``fixed`` holds the remaining
    parameters. Valid names are the :class:`LeagueConfig` fields other than
    ``seed``, plus ``eta`` and ``mode`` for perturbation studies.
    """

    grid: Mapping[str, Sequence[Any]]
    fixed: Mapping[str, Any] = field(default_factory=dict)
    realizations: int = 100
    metrics: tuple[str, ...] = METRICS
    algorithms: tuple[str, ...] = METHODS
    base_seed: int = 0
    top_k: int = 5
    teleport_alpha: float = 0.15

    def __post_init__(self) -> None:
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if not self.grid:
            raise ValueError("grid needs at least one axis")
        for name, values in self.grid.items():
            if name not in AXES:
                raise ValueError(f"unknown grid axis {name!r}; expected one of {', '.join(AXES)}")
            if len(values) == 0:
                raise ValueError(f"grid axis {name!r} is empty")
        for name in self.fixed:
            if name not in AXES:
                raise ValueError(f"unknown fixed parameter {name!r}")
        overlap = set(self.grid) & set(self.fixed)
        if overlap:
            raise ValueError(f"parameters both on the grid and fixed: {sorted(overlap)}")
        unknown = set(self.metrics) - set(_METRIC_FUNCS)
        if unknown:
            raise ValueError(f"unknown metrics {sorted(unknown)}")
        object.__setattr__(self, "algorithms", tuple(canonical_method(a) for a in self.algorithms))
        object.__setattr__(self, "metrics", tuple(self.metrics))
        object.__setattr__(self, "grid", {k: sorted(v) for k, v in self.grid.items()})
        object.__setattr__(self, "fixed", dict(self.fixed))

    @property
    def axes(self) -> tuple[str, ...]:
        return tuple(self.grid)

    def points(self) -> list[tuple]:
        """Grid points in lexicographic order of the axes."""
        return list(itertools.product(*self.grid.values()))

    @property
    def is_perturbation(self) -> bool:
        return any(k in self.grid or k in self.fixed for k in PERTURB_FIELDS)

    def with_overrides(self, **changes) -> "SweepSpec":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class SweepResult:
    """Aggregated metrics per grid point, algorithm, and metric.

    ``values`` keeps every realization, shaped
    ``(points, realizations, algorithms, metrics)``.
    """

    spec: SweepSpec
    points: list[tuple]
    values: npt.NDArray[np.float64]

    @property
    def axes(self) -> tuple[str, ...]:
        return self.spec.axes

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def _index(self, algorithm: str, metric: str, point: Mapping[str, Any]) -> tuple[int, int, int]:
        key = tuple(point[a] for a in self.axes)
        return (self.points.index(key), self.spec.algorithms.index(canonical_method(algorithm)),
                self.spec.metrics.index(metric))

    def samples(self, algorithm: str, metric: str = "kendall", **point) -> npt.NDArray[np.float64]:
        p, a, m = self._index(algorithm, metric, point)
        return self.values[p, :, a, m]

    def mean(self, algorithm: str, metric: str = "kendall", **point) -> float:
        return _mean(self.samples(algorithm, metric, **point))

    def sem(self, algorithm: str, metric: str = "kendall", **point) -> float:
        return _sem(self.samples(algorithm, metric, **point))

    def rows(self) -> list[tuple]:
        out = []
        for p, point in enumerate(self.points):
            for a, alg in enumerate(self.spec.algorithms):
                for m, metric in enumerate(self.spec.metrics):
                    x = self.values[p, :, a, m]
                    out.append((*point, alg, metric, _mean(x), _sem(x), len(x)))
        return out

    def to_csv(self, path: str | os.PathLike | None = None) -> str:
        """CSV with header ``<axes>,algorithm,metric,mean,sem,n``; returns the text."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow((*self.axes, "algorithm", "metric", "mean", "sem", "n"))
        for row in self.rows():
            writer.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="", encoding="utf-8") as fh:
                fh.write(text)
        return text


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _mean(x) -> float:
    return math.fsum(x) / len(x)


def _sem(x) -> float:
    n = len(x)
    if n < 2:
        return float("nan")
    m = _mean(x)
    return math.sqrt(math.fsum((v - m) ** 2 for v in x) / (n - 1)) / math.sqrt(n)


def derive_seed(base_seed: int, point: Mapping[str, Any], realization: int, tag: str = "season") -> int:
    """Stable 64-bit seed from the base seed, the parameter values, and the realization."""
    payload = json.dumps([int(base_seed), sorted((k, point[k]) for k in point), int(realization), tag])
    return int.from_bytes(hashlib.sha256(payload.encode()).digest()[:8], "little")


def _run_unit(spec: SweepSpec, point: tuple, realization: int) -> npt.NDArray[np.float64]:
    params = {**spec.fixed, **dict(zip(spec.axes, point))}
    league = {k: params[k] for k in CONFIG_FIELDS if k in params}
    # eta and mode do not enter the season seed: every perturbation level
    # reuses the same season and a nested selection of upsets
    seed = derive_seed(spec.base_seed, league, realization)
    fitness, results = simulate_season(LeagueConfig(seed=seed, **league))
    if spec.is_perturbation:
        rng = np.random.default_rng(derive_seed(spec.base_seed, league, realization, "perturb"))
        results = perturb_unexpected(results, fitness, float(params.get("eta", 0.0)),
                                     params.get("mode", "remove"), rng)
    truth = truth_from_fitness(fitness, spec.top_k)
    out = np.empty((len(spec.algorithms), len(spec.metrics)))
    for a, alg in enumerate(spec.algorithms):
        s = score(results, alg, spec.teleport_alpha)
        for m, metric in enumerate(spec.metrics):
            out[a, m] = _METRIC_FUNCS[metric](s, truth)
    return out


def _run_chunk(spec: SweepSpec, units: list[tuple[int, tuple, int]]) -> list[tuple[int, int, npt.NDArray]]:
    return [(p, r, _run_unit(spec, point, r)) for p, point, r in units]


def _execute(spec: SweepSpec, threads: int) -> SweepResult:
    points = spec.points()
    values = np.empty((len(points), spec.realizations, len(spec.algorithms), len(spec.metrics)))
    units = [(p, point, r) for p, point in enumerate(points) for r in range(spec.realizations)]
    if threads <= 1:
        done = _run_chunk(spec, units)
    else:
        chunks = [units[i::threads * 4] for i in range(threads * 4)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            done = [u for part in pool.map(_run_chunk, itertools.repeat(spec), chunks) for u in part]
    for p, r, v in done:
        values[p, r] = v
    return SweepResult(spec, points, values)


def run_sweep(spec: SweepSpec, threads: int = 1) -> SweepResult:
    """Simulate every grid point ``spec.realizations`` times and score each season.

    Each (point, realization) unit draws from its own seed, derived from
    ``base_seed`` and the parameter values, so the result does not depend on
    ``threads`` or scheduling.
    """
    if spec.is_perturbation:
        raise ValueError("eta/mode given; use run_perturbation_study")
    return _execute(spec, threads)


def run_perturbation_study(spec: SweepSpec, threads: int = 1) -> SweepResult:
    """Like :func:`run_sweep`, with a fraction ``eta`` of upsets removed or reverted.

    Needs an ``eta`` axis; ``mode`` (``remove`` or ``revert``) may be an axis
    or fixed. Seasons are identical to those of :func:`run_sweep` with the
    same non-perturbation parameters and base seed.
    """
    if "eta" not in spec.grid:
        raise ValueError("perturbation study needs an 'eta' grid axis")
    if "mode" not in spec.grid and "mode" not in spec.fixed:
        raise ValueError("perturbation study needs 'mode' on the grid or fixed")
    modes = spec.grid.get("mode", [spec.fixed.get("mode")])
    bad = [m for m in modes if m not in ("remove", "revert")]
    if bad:
        raise ValueError(f"mode must be 'remove' or 'revert', got {bad}")
    return _execute(spec, threads)


def load_sweep_spec(path: str | os.PathLike, **overrides) -> SweepSpec:
    """Read a sweep spec from TOML (or JSON) and apply keyword overrides.

    Top-level keys: ``base_seed``, ``realizations``, ``algorithms``,
    ``metrics``, ``top_k``, ``teleport_alpha``; tables ``[grid]`` (axis ->
    list of values) and ``[fixed]`` (parameter -> value).
    """
    path = str(path)
    with open(path, "rb") as fh:
        data = json.load(fh) if path.endswith(".json") else tomllib.load(fh)
    data.update({k: v for k, v in overrides.items() if v is not None})
    allowed = {f.name for f in dataclasses.fields(SweepSpec)}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
    for key in ("metrics", "algorithms"):
        if key in data:
            data[key] = tuple(data[key])
    return SweepSpec(**data)


@dataclass(frozen=True)
class RealEvalCurve:
    """Kendall tau of early-season rankings against the end-of-season win order.

    ``tau_mean[p, a]`` averages over the seasons in which the first
    ``p_axis[p]`` fraction of games is non-empty; ``n_seasons[p]`` counts them.
    """

    league: str
    p_axis: tuple[float, ...]
    algorithms: tuple[str, ...]
    tau_mean: npt.NDArray[np.float64]
    n_seasons: npt.NDArray[np.int64]
    seasons_used: tuple[str, ...]
    skipped_cells: int
    tie_broken_seasons: tuple[str, ...]

    def tau(self, p: float, algorithm: str) -> float:
        return float(self.tau_mean[self.p_axis.index(p), self.algorithms.index(canonical_method(algorithm))])

    def difference(self, a: str = "BiPageRank", b: str = "WinRatio") -> npt.NDArray[np.float64]:
        ia = self.algorithms.index(canonical_method(a))
        ib = self.algorithms.index(canonical_method(b))
        return self.tau_mean[:, ia] - self.tau_mean[:, ib]

    @property
    def threshold(self) -> float | None:
        """Largest P at which BiPageRank beats the win ratio, if any."""
        if "BiPageRank" not in self.algorithms or "WinRatio" not in self.algorithms:
            return None
        diff = self.difference()
        winning = [p for p, d in zip(self.p_axis, diff) if d > 0]
        return max(winning) if winning else None


def run_real_eval(seasons: Sequence[SeasonData], p_axis: Sequence[float],
                  algorithms: Sequence[str] = ("WinRatio", "PageRank", "BiPageRank"),
                  last_k_seasons: int = 10, league: str = "league",
                  teleport_alpha: float = 0.15) -> RealEvalCurve:
    """Rank teams from the first ``floor(P * N_S)`` games of each season.

    Uses the last ``last_k_seasons`` entries of ``seasons`` (all of them if
    fewer). The ground truth is the season's final win count with ties broken
    by team index; such seasons are listed in ``tie_broken_seasons``.
    Truncations with no games are skipped and counted.
    """
    if not seasons:
        raise ValueError("need at least one season")
    algorithms = tuple(canonical_method(a) for a in algorithms)
    used = list(seasons)[-last_k_seasons:]
    p_axis = tuple(float(p) for p in p_axis)
    taus: list[list[list[float]]] = [[[] for _ in algorithms] for _ in p_axis]
    skipped = 0
    tied = []
    for season in used:
        truth = truth_from_wins(season.results)
        if truth.tie_broken:
            tied.append(season.season)
        for i, p in enumerate(p_axis):
            part = truncate_season(season, p)
            if len(part) == 0:
                skipped += 1
                continue
            for a, alg in enumerate(algorithms):
                taus[i][a].append(kendall_tau(score(part, alg, teleport_alpha), truth))
    tau_mean = np.array([[_mean(t) if t else float("nan") for t in row] for row in taus]).reshape(len(p_axis), len(algorithms))
    n_seasons = np.array([len(row[0]) if algorithms else 0 for row in taus], dtype=np.int64)
    return RealEvalCurve(league, p_axis, algorithms, tau_mean, n_seasons,
                         tuple(s.season for s in used), skipped, tuple(tied))


def real_eval_csv(curves: Sequence[RealEvalCurve], path: str | os.PathLike | None = None) -> str:
    """CSV with header ``league,P,algorithm,tau_mean,n_seasons``; returns the text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("league", "P", "algorithm", "tau_mean", "n_seasons"))
    for c in sorted(curves, key=lambda c: c.league):
        for i, p in enumerate(c.p_axis):
            for a, alg in enumerate(c.algorithms):
                writer.writerow((c.league, _fmt(p), alg, _fmt(c.tau_mean[i, a]), int(c.n_seasons[i])))
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    return text


def synthetic_seasons(config: LeagueConfig, n_seasons: int, label_prefix: str = "S") -> list[SeasonData]:
    """Model-generated seasons in the same shape as loaded real data.

    Season ``k`` uses seed ``derive_seed(config.seed, ..., k)``; games are in
    the random chronological order produced by the generator.
    """
    base = {k: getattr(config, k) for k in CONFIG_FIELDS}
    out = []
    width = len(str(max(n_seasons - 1, 0)))
    for k in range(n_seasons):
        seed = derive_seed(config.seed, base, k)
        _, results = simulate_season(dataclasses.replace(config, seed=seed))
        names = tuple(f"T{i:02d}" for i in range(config.n_teams))
        out.append(SeasonData(f"{label_prefix}{k:0{width}d}", names, results))
    return out
