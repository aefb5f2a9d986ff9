import numpy as np

from leaguerank import LeagueConfig, empirical_curve, fit_full, fit_shape, fit_simplified, select_model
from leaguerank.experiments import synthetic_seasons

# %%
# Ten model-generated seasons stand in for a real league.

seasons = synthetic_seasons(LeagueConfig(n_teams=20, delta=0.25, home_adv=0.08, seed=5), 10)

# %%
# Two-parameter fit (fitness replaced by the final win ratio) against the
# full fit with one fitness per team.  AIC decides.

for s in seasons[:3]:
    simple = fit_simplified(s.results)
    full = fit_full(s.results, simplified=simple)
    print(s.season, f"delta={simple.delta_hat:.3f} H={simple.home_hat:.3f}",
          f"AIC {simple.aic:.1f} vs {full.aic:.1f} ->", select_model(simple, full))

""" The recovered delta sits below the generating 0.25: win ratios are a compressed copy of fitness. """

# %%
# Home-win frequency against the win-ratio gap, next to the fitted curve.

season = seasons[0]
fit = fit_simplified(season.results)
for point in empirical_curve(season.results, bin_width=0.2):
    model = 1 / (1 + np.exp(-(point.center + fit.home_hat) / fit.delta_hat))
    print(f"dw={point.center:+.1f}  observed {point.rate:.2f} +/- {point.sem:.2f}  model {model:.2f}  (n={point.count})")

# %%

shape = fit_shape(season.results)
print(f"alpha={shape.shape_alpha_hat:.2f} beta={shape.shape_beta_hat:.2f}")
