"""Maximum-likelihood calibration of the outcome model on observed results.

Two nested models are fitted. The simplified model replaces each team's
fitness by its win ratio and estimates only the home advantage and the
fitness sensitivity; the full model estimates every team's fitness as well.
AIC decides between them.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
from scipy.optimize import minimize, minimize_scalar
from scipy.special import expit, log_expit

from .model import FitnessVector, InvalidParameterError
from .rankers import win_ratio
from .results import ResultSet

PROB_CLAMP = 1e-15
HOME_CAP = 2.0
AGREEMENT_TOL = 1e-4

GAUGE_NOTE = (
    "fitness fixed up to shift and scale: mean(f) = 1/2, delta chosen so that "
    "the fitted fitness range equals the win-ratio range"
)


class UnderdeterminedFitError(ValueError):
    pass


@dataclass(frozen=True)
class CalibrationFit:
    delta_hat: float
    home_hat: float
    log_likelihood: float
    n_params: int
    model: str
    fitness_hat: npt.NDArray[np.float64] | None = None
    dataset_key: str = ""
    n_games: int = 0
    gauge_note: str = ""

    @property
    def aic(self) -> float:
        return 2 * self.n_params - 2 * self.log_likelihood

    def to_dict(self) -> dict:
        out = {
            "delta_hat": self.delta_hat,
            "home_hat": self.home_hat,
            "log_likelihood": self.log_likelihood,
            "n_params": self.n_params,
            "aic": self.aic,
            "model": self.model,
            "gauge_note": self.gauge_note,
            "n_games": self.n_games,
        }
        if self.fitness_hat is not None:
            out["fitness_hat"] = [float(v) for v in self.fitness_hat]
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class ShapeFit:
    shape_alpha_hat: float
    shape_beta_hat: float
    gamma_hat: float
    sse: float
    grad_norm: float = 0.0


class CurvePoint(NamedTuple):
    center: float
    rate: float
    sem: float
    count: float


def dataset_key(results: ResultSet) -> str:
    """Content hash identifying a result set."""
    h = hashlib.sha1()
    h.update(str(results.n_teams).encode())
    for arr in (results.home, results.away, results.home_won.astype(np.int8)):
        h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()


def log_likelihood(results: ResultSet, fitness, home_adv: float, delta: float) -> float:
    """Log-likelihood of the observed home wins and losses under the logistic model.

    Probabilities are clamped to ``[1e-15, 1 - 1e-15]``.
    """
    if not delta > 0:
        raise InvalidParameterError(f"delta must be positive, got {delta}")
    if len(results) == 0:
        return 0.0
    f = np.asarray(fitness.values if isinstance(fitness, FitnessVector) else fitness, dtype=float)
    z = (f[results.home] - f[results.away] + home_adv) / delta
    return _clamped_loglik(z, results.home_won)


def _clamped_loglik(z, home_won) -> float:
    # probability of the observed outcome, taken from the matching tail so
    # that both ends clamp at exactly PROB_CLAMP
    p_obs = expit(np.where(home_won, z, -z))
    return float(np.log(np.clip(p_obs, PROB_CLAMP, 1 - PROB_CLAMP)).sum())


def _require_played(results: ResultSet) -> None:
    if len(results) < 2:
        raise UnderdeterminedFitError("at least two games are needed for a fit")
    idle = np.flatnonzero(results.games_played() == 0)
    if len(idle):
        raise UnderdeterminedFitError(f"teams without games: {idle.tolist()}")


def _degenerate_side(results: ResultSet) -> int:
    """+1 if the home team won every game, -1 if the away team did, else 0."""
    frac = results.home_won.mean()
    if frac in (0.0, 1.0):
        side = "home" if frac == 1.0 else "away"
        warnings.warn(f"every game was won by the {side} team; home advantage fixed at the "
                      f"boundary +/-{HOME_CAP}", RuntimeWarning, stacklevel=3)
        return 1 if frac == 1.0 else -1
    return 0


def fit_simplified(results: ResultSet, n_starts: int = 3) -> CalibrationFit:
    """Fit home advantage and fitness sensitivity with fitness set to the win ratios.

    A coarse grid over ``delta in [0.01, 2]`` and ``H in [-0.5, 0.5]`` supplies
    ``n_starts`` seeds for Nelder-Mead on ``(H, log delta)``; the best optimum
    is returned and disagreement between starts beyond 1e-4 raises a warning.
    """
    _require_played(results)
    side = _degenerate_side(results)
    w = win_ratio(results).scores
    dw = w[results.home] - w[results.away]
    y = results.home_won

    def neg_ll(theta):
        h, log_d = theta
        return -_clamped_loglik((dw + h) / math.exp(log_d), y)

    deltas = np.geomspace(0.01, 2.0, 24)
    homes = np.linspace(-0.5, 0.5, 21)
    grid = [(neg_ll((h, math.log(d))), h, math.log(d)) for d in deltas for h in homes]
    grid.sort()
    starts = [g[1:] for g in grid[: max(n_starts, 1)]]
    bounds = [(-HOME_CAP, HOME_CAP), (math.log(1e-4), math.log(1e4))]
    if side:
        # the likelihood grows without bound in H/delta; pin H and fit delta alone
        h_cap = side * HOME_CAP
        res = minimize_scalar(lambda ld: neg_ll((h_cap, ld)), bounds=bounds[1], method="bounded",
                              options={"xatol": 1e-10})
        return CalibrationFit(math.exp(res.x), h_cap, -float(res.fun), 2, "simplified", None,
                              dataset_key(results), len(results))
    fits = []
    for x0 in starts:
        res = minimize(neg_ll, np.array(x0), method="Nelder-Mead", bounds=bounds,
                       options={"xatol": 1e-10, "fatol": 1e-11, "maxiter": 20_000, "maxfev": 40_000})
        fits.append((res.fun, res.x[0], math.exp(res.x[1])))
    fits.sort()
    best_nll, h_hat, d_hat = fits[0]
    spread = max(max(abs(f[1] - h_hat), abs(f[2] - d_hat)) for f in fits)
    if spread > AGREEMENT_TOL:
        warnings.warn(f"simplified-model starts disagree by {spread:.2e}", RuntimeWarning, stacklevel=2)
    return CalibrationFit(d_hat, h_hat, -best_nll, 2, "simplified", None,
                          dataset_key(results), len(results))


def _full_objective(params, home, away, y, n):
    g = params[:n]
    h = params[n]
    z = g[home] - g[away] + h
    sign = np.where(y, 1.0, -1.0)
    nll = -log_expit(sign * z).sum()
    # d(-log sigma(s z))/dz = -s * sigma(-s z)
    dz = -sign * expit(-sign * z)
    grad = np.zeros(n + 1)
    np.add.at(grad, home, dz)
    np.add.at(grad, away, -dz)
    grad[n] = dz.sum()
    return nll, grad


def fit_full(results: ResultSet, simplified: CalibrationFit | None = None) -> CalibrationFit:
    """Fit every team's fitness together with home advantage and sensitivity.

    The likelihood depends only on ``(f_i - f_j + H) / delta``, so the fit runs
    on scaled variables ``g = (f - 1/2) / delta`` and ``h = H / delta`` with
    mean(g) = 0. The reported ``delta_hat`` rescales ``g`` so the fitted
    fitness range equals the win-ratio range. Starts from the simplified
    solution and from zero; the better optimum is kept.
    """
    _require_played(results)
    n = results.n_teams
    if simplified is None:
        simplified = fit_simplified(results)
    w = win_ratio(results).scores
    x_simpl = np.append((w - w.mean()) / simplified.delta_hat, simplified.home_hat / simplified.delta_hat)
    bound = 50.0
    bounds = [(-bound, bound)] * (n + 1)
    best = None
    for x0 in (np.clip(x_simpl, -bound, bound), np.zeros(n + 1)):
        res = minimize(_full_objective, x0, args=(results.home, results.away, results.home_won, n),
                       jac=True, method="L-BFGS-B", bounds=bounds,
                       options={"ftol": 1e-15, "gtol": 1e-9, "maxiter": 20_000})
        if best is None or res.fun < best.fun:
            best = res
    g = best.x[:n] - best.x[:n].mean()
    h = best.x[n]
    w_range = w.max() - w.min()
    g_range = g.max() - g.min()
    delta_hat = w_range / g_range if g_range > 0 and w_range > 0 else simplified.delta_hat
    fitness_hat = 0.5 + delta_hat * g
    ll = -float(best.fun)
    # nesting guarantees this; guards against an optimizer stopping early
    if ll < simplified.log_likelihood:
        ll = simplified.log_likelihood
    return CalibrationFit(delta_hat, delta_hat * h, ll, n + 2, "full", fitness_hat,
                          dataset_key(results), len(results), GAUGE_NOTE)


def select_model(simplified: CalibrationFit, full: CalibrationFit, tol: float = 1e-9) -> str:
    """Label of the fit with the lower AIC; ties go to the simplified model."""
    if simplified.dataset_key != full.dataset_key:
        raise ValueError("fits were computed on different datasets")
    return full.model if full.aic < simplified.aic - tol else simplified.model


def _bin_index(x: npt.NDArray[np.float64], width: float, half: int) -> npt.NDArray[np.int64]:
    # sign-magnitude binning keeps bin(-x) the mirror of bin(x)
    k = np.minimum(np.floor(np.abs(x) / width).astype(np.int64), half - 1)
    return np.where(x >= 0, k, -k - 1)


def empirical_curve(results: ResultSet, min_games_per_bin: int = 4, bin_width: float = 0.1) -> list[CurvePoint]:
    """Empirical home-win rate against the end-of-season win-ratio difference.

    Games are binned by ``w_home - w_away`` into bins of ``bin_width`` with edges
    at multiples of the width. A game with a difference of exactly zero counts
    half in each of the two central bins, so ``count`` may be a half-integer.
    Bins with a count below ``min_games_per_bin`` are dropped.
    """
    if len(results) == 0:
        return []
    half = int(math.ceil(1.0 / bin_width - 1e-9))
    w = win_ratio(results).scores
    dw = w[results.home] - w[results.away]
    y = results.home_won.astype(float)
    zero = dw == 0
    idx = np.concatenate([_bin_index(dw[~zero], bin_width, half),
                          np.zeros(zero.sum(), dtype=np.int64), np.full(zero.sum(), -1, dtype=np.int64)])
    wt = np.concatenate([np.ones((~zero).sum()), np.full(2 * zero.sum(), 0.5)])
    yy = np.concatenate([y[~zero], y[zero], y[zero]])
    out = []
    for b in range(-half, half):
        sel = idx == b
        count = float(wt[sel].sum())
        if count == 0 or count < min_games_per_bin:
            continue
        rate = float((wt[sel] * yy[sel]).sum()) / count
        if count > 1:
            var = float((wt[sel] * (yy[sel] - rate) ** 2).sum()) / (count - 1)
            sem = math.sqrt(var / count)
        else:
            sem = float("nan")
        out.append(CurvePoint((b + 0.5) * bin_width, rate, sem, count))
    return out


def _shape_sse(theta, x, target):
    alpha, beta = theta
    xa = x**alpha
    basis = xa - xa.mean()
    resid = target - 0.5 - beta * basis
    dxa = xa * np.log(x)
    dbasis = dxa - dxa.mean()
    sse = float(resid @ resid)
    grad = np.array([-2 * beta * float(resid @ dbasis), -2 * float(resid @ basis)])
    return sse, grad


def fit_shape_values(win_ratios: npt.ArrayLike) -> ShapeFit:
    """Least-squares fit of the power-law fitness curve to sorted win ratios.

    The offset is not a free parameter: it keeps the mean of the curve at 1/2.
    """
    w = np.sort(np.asarray(win_ratios, dtype=float))
    if len(np.unique(w)) < 3:
        raise UnderdeterminedFitError("need at least three distinct win ratios")
    n = len(w)
    x = (np.arange(1, n + 1) - 0.5) / n
    best = None
    for a0 in (0.5, 1.0, 2.0, 3.0):
        for b0 in (0.25, 0.5, 1.0):
            res = minimize(_shape_sse, np.array([a0, b0]), args=(x, w), jac=True, method="L-BFGS-B",
                           bounds=[(1e-3, 50.0), (None, None)],
                           options={"ftol": 1e-16, "gtol": 1e-12, "maxiter": 10_000})
            if best is None or res.fun < best.fun:
                best = res
    alpha, beta = best.x
    sse, grad = _shape_sse(best.x, x, w)
    gamma = 0.5 - beta * float((x**alpha).mean())
    return ShapeFit(float(alpha), float(beta), gamma, sse, float(np.linalg.norm(grad)))


def fit_shape(results: ResultSet) -> ShapeFit:
    """Fit the fitness-shape exponent and range to the season's win ratios."""
    if np.any(results.games_played() == 0):
        raise UnderdeterminedFitError("every team needs at least one game")
    return fit_shape_values(win_ratio(results).scores)
