from leaguerank import LeagueConfig, run_real_eval
from leaguerank.experiments import real_eval_csv, synthetic_seasons

# %%
# Real leagues go through load_seasons(path); here the model supplies the
# seasons so the script runs without downloads.

seasons = synthetic_seasons(LeagueConfig(n_teams=30, delta=0.1, home_adv=0.05, seed=0), 10)
p_axis = [round(0.05 * k, 2) for k in range(1, 21)]
curve = run_real_eval(seasons, p_axis, league="model")

# %%
# Each truncated season is ranked and compared with the final standings.

for p, d in zip(curve.p_axis, curve.difference()):
    print(f"P={p:<5} BiPageRank - WinRatio = {d:+.4f}")
print("largest P where BiPageRank still wins:", curve.threshold)

# %%

print(real_eval_csv([curve])[:300])
