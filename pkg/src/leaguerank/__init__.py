"""Synthetic sports leagues, PageRank-style team rankings, and their evaluation."""

from .calibration import (
    CalibrationFit,
    ShapeFit,
    empirical_curve,
    fit_full,
    fit_shape,
    fit_simplified,
    log_likelihood,
    select_model,
)
from .dataio import SeasonData, load_seasons, truncate_season
from .experiments import (
    SweepResult,
    SweepSpec,
    load_sweep_spec,
    run_perturbation_study,
    run_real_eval,
    run_sweep,
    synthetic_seasons,
)
from .metrics import GroundTruth, auc_top, avg_top_rank, evaluate, kendall_tau, truth_from_fitness, truth_from_wins
from .model import FitnessVector, InvalidParameterError, LeagueConfig, bradley_terry_probability, win_probability
from .rankers import ScoreVector, WinLossNetwork, bipagerank, build_network, pagerank, score, to_ranking, win_ratio
from .results import GameRecord, ResultSet
from .synth import make_fitness, make_schedule, perturb_unexpected, simulate_season

__version__ = "0.1.0"
