"""Command-line entry point: ``leaguerank <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import calibration, dataio, experiments, metrics, rankers
from .model import FitnessVector, LeagueConfig
from .results import RESULTS_HEADER, DataFormatError, ResultSet, read_results_csv, write_results_csv
from .synth import simulate_season


class CliError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x) -> str:
    return repr(float(x))


def _sidecar_path(out: str) -> str:
    p = Path(out)
    return str(p.with_name(p.stem + ".fitness.csv"))


def _read_fitness(path: str) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"team", "fitness"} <= set(reader.fieldnames):
            raise DataFormatError(f"{path}:1: expected header team,fitness")
        rows = []
        for rec in reader:
            try:
                rows.append((int(rec["team"]), float(rec["fitness"])))
            except (TypeError, ValueError):
                raise DataFormatError(f"{path}:{reader.line_num}: malformed row") from None
    rows.sort()
    if [t for t, _ in rows] != list(range(len(rows))):
        raise DataFormatError(f"{path}: team ids must be 0..N-1")
    return np.array([f for _, f in rows])


def _is_results_file(path: str) -> bool:
    with open(path, newline="", encoding="utf-8") as fh:
        first = fh.readline().strip()
    return tuple(h.strip() for h in first.split(",")) == RESULTS_HEADER


def _load_any(path: str, fmt: str | None = None) -> list[dataio.SeasonData]:
    """Seasons from a results file (one season named after the file) or a seasons file."""
    if fmt != "jsonl" and not path.endswith((".jsonl", ".ndjson")) and _is_results_file(path):
        results = read_results_csv(path)
        names = tuple(str(i) for i in range(results.n_teams))
        return [dataio.SeasonData(Path(path).stem, names, results)]
    return dataio.load_seasons(path, fmt)


def cmd_generate(args) -> None:
    config = LeagueConfig(args.teams, args.delta, args.home_adv, args.frac, args.shape_alpha, args.shape_beta, args.seed)
    fitness, results = simulate_season(config)
    write_results_csv(results, args.out)
    sidecar = args.fitness_out or _sidecar_path(args.out)
    _emit(_csv_text(("team", "fitness"), [(i, _fmt(f)) for i, f in enumerate(fitness.values)]), sidecar)


def cmd_rank(args) -> None:
    results = read_results_csv(args.input)
    methods = rankers.METHODS if args.method == "all" else (rankers.canonical_method(args.method),)
    scored = {m: rankers.score(results, m, args.teleport) for m in methods}
    if args.format == "json":
        payload = {m: {"scores": s.scores.tolist(), "ranks": rankers.to_ranking(s).tolist()} for m, s in scored.items()}
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
        return
    rows = []
    for m, s in scored.items():
        ranks = rankers.to_ranking(s)
        rows.extend((i, m, _fmt(v), _fmt(r)) for i, (v, r) in enumerate(zip(s.scores, ranks)))
    _emit(_csv_text(("team", "method", "score", "rank"), rows), args.out)


def _read_scores(path: str) -> dict[str, np.ndarray]:
    if path.endswith(".json"):
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return {m: np.asarray(v["scores"], dtype=float) for m, v in data.items()}
    out: dict[str, dict[int, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"team", "score"} <= set(reader.fieldnames):
            raise DataFormatError(f"{path}:1: expected columns team,score[,method]")
        for rec in reader:
            try:
                out.setdefault(rec.get("method") or "scores", {})[int(rec["team"])] = float(rec["score"])
            except (TypeError, ValueError):
                raise DataFormatError(f"{path}:{reader.line_num}: malformed row") from None
    return {m: np.array([d[i] for i in sorted(d)]) for m, d in out.items()}


def cmd_evaluate(args) -> None:
    scores = _read_scores(args.scores)
    if args.truth:
        truth = metrics.truth_from_fitness(FitnessVector(_read_fitness(args.truth)), args.top_k)
    else:
        truth = metrics.truth_from_wins(read_results_csv(args.truth_results), args.top_k)
    table = {}
    for method, s in scores.items():
        if len(s) != len(truth):
            raise CliError(f"{method}: {len(s)} scores but {len(truth)} teams in the ground truth")
        table[method] = metrics.evaluate(s, truth, args.metrics)
    if args.format == "json":
        _emit(json.dumps(table, indent=2, sort_keys=True) + "\n", args.out)
    else:
        rows = [(m, k, _fmt(v)) for m, d in table.items() for k, v in d.items()]
        _emit(_csv_text(("method", "metric", "value"), rows), args.out)


def cmd_calibrate(args) -> None:
    seasons = _load_any(args.input, args.input_format)
    fits = []
    curve_rows = []
    for s in seasons:
        simple = calibration.fit_simplified(s.results)
        entry = {"season": s.season, "n_teams": s.results.n_teams, "simplified": simple.to_dict()}
        if not args.no_full:
            full = calibration.fit_full(s.results, simple)
            entry["full"] = full.to_dict()
            entry["selected"] = calibration.select_model(simple, full)
        fits.append(entry)
        if args.curve_out:
            for c in calibration.empirical_curve(s.results, args.min_games, args.bin_width):
                curve_rows.append((s.season, _fmt(c.center), _fmt(c.rate), _fmt(c.sem), _fmt(c.count)))
    _emit(json.dumps(fits, indent=2, sort_keys=True) + "\n", args.out)
    if args.curve_out:
        _emit(_csv_text(("season", "dw_center", "rate", "sem", "count"), curve_rows), args.curve_out)


def _spec_from_args(args) -> experiments.SweepSpec:
    overrides = {"base_seed": args.seed, "realizations": args.realizations}
    if args.algorithms:
        overrides["algorithms"] = tuple(args.algorithms.split(","))
    if args.metrics:
        overrides["metrics"] = tuple(args.metrics.split(","))
    return experiments.load_sweep_spec(args.spec, **overrides)


def cmd_sweep(args) -> None:
    result = experiments.run_sweep(_spec_from_args(args), threads=args.threads)
    _emit(result.to_csv(), args.out)


def cmd_perturb(args) -> None:
    result = experiments.run_perturbation_study(_spec_from_args(args), threads=args.threads)
    _emit(result.to_csv(), args.out)


def cmd_real_eval(args) -> None:
    p_axis = [float(p) for p in args.p_axis.split(",")]
    algorithms = tuple(args.algorithms.split(","))
    if args.league and len(args.input) > 1:
        raise CliError("--league applies to a single --input")
    curves = []
    for path in args.input:
        seasons = _load_any(path)
        league = args.league or Path(path).stem
        curves.append(experiments.run_real_eval(seasons, p_axis, algorithms, args.last_k, league))
    _emit(experiments.real_eval_csv(curves), args.out)
    for c in curves:
        print(f"{c.league}: seasons={len(c.seasons_used)} threshold_P={c.threshold} "
              f"skipped_cells={c.skipped_cells} tie_broken={len(c.tie_broken_seasons)}", file=sys.stderr)


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leaguerank", description="Synthetic leagues, team rankings, and their evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="simulate one synthetic season")
    p.add_argument("--teams", type=int, default=30)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--home-adv", type=float, default=0.0)
    p.add_argument("--frac", type=float, default=1.0, help="fraction of pairings played")
    p.add_argument("--shape-alpha", type=float, default=1.0)
    p.add_argument("--shape-beta", type=float, default=1.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="results CSV (order,home,away,home_won)")
    p.add_argument("--fitness-out", help="fitness CSV; default <out>.fitness.csv")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("rank", help="score teams from a results CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--method", default="all", choices=["all", "winratio", "pagerank", "bipagerank",
                                                       "WinRatio", "PageRank", "BiPageRank"])
    p.add_argument("--teleport", type=float, default=rankers.DEFAULT_TELEPORT)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("evaluate", help="compare scores with a ground truth")
    p.add_argument("--scores", required=True, help="output of 'rank' (CSV or JSON)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--truth", help="fitness CSV (team,fitness)")
    g.add_argument("--truth-results", help="results CSV; final win counts are the truth")
    p.add_argument("--top-k", type=_positive_int, default=5)
    p.add_argument("--metrics", type=lambda s: tuple(s.split(",")), default=metrics.METRICS)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("calibrate", help="fit delta and H per season")
    p.add_argument("--input", required=True, help="seasons file or results CSV")
    p.add_argument("--input-format", choices=["csv", "jsonl"])
    p.add_argument("--no-full", action="store_true", help="skip the full-model fit")
    p.add_argument("--curve-out", help="write empirical win-probability curve CSV")
    p.add_argument("--bin-width", type=float, default=0.1)
    p.add_argument("--min-games", type=_positive_int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_calibrate)

    for name, func, help_text in (("sweep", cmd_sweep, "parameter sweep from a spec file"),
                                  ("perturb", cmd_perturb, "unexpected-outcome study from a spec file")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--spec", required=True, help="TOML or JSON sweep spec")
        p.add_argument("--seed", type=int, required=True, help="base seed (overrides the file)")
        p.add_argument("--realizations", type=_positive_int)
        p.add_argument("--algorithms")
        p.add_argument("--metrics")
        p.add_argument("--threads", type=_positive_int, default=1)
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("real-eval", help="early-season ranking quality on real seasons")
    p.add_argument("--input", required=True, action="append", help="seasons file; repeat for several leagues")
    p.add_argument("--league", help="league label (default: file stem)")
    p.add_argument("--p-axis", default=",".join(f"{k / 20:g}" for k in range(1, 21)))
    p.add_argument("--algorithms", default="WinRatio,PageRank,BiPageRank")
    p.add_argument("--last-k", type=_positive_int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_real_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (CliError, DataFormatError, OSError, ValueError, RuntimeError) as exc:
        print(f"leaguerank {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
