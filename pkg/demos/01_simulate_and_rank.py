import numpy as np

from leaguerank import LeagueConfig, score, simulate_season, to_ranking, truth_from_fitness, evaluate

# %%
# A synthetic league
#
# Thirty teams with evenly spread fitness, a fairly deterministic outcome
# model (delta = 0.1) and only a fifth of all pairings actually played.

config = LeagueConfig(n_teams=30, delta=0.1, frac_played=0.2, seed=11)
fitness, results = simulate_season(config)

""" Each team plays roughly the same number of games; nobody plays the same opponent twice. """

print(len(results), "games")
games, teams = np.unique(results.games_played(), return_counts=True)
print(dict(zip(games.tolist(), teams.tolist())), "(games played: number of teams)")

# %%
# Three scores from one result set

scores = {method: score(results, method) for method in ("WinRatio", "PageRank", "BiPageRank")}
for method, s in scores.items():
    top = np.argsort(-s.scores, kind="stable")[:5]
    print(f"{method:>10}: top five {top.tolist()}")

""" The true order is simply the teams sorted by fitness, strongest first. """

truth = truth_from_fitness(fitness, top_k=5)
print("truth     : top five", truth.ordering[:5].tolist())

# %%

for method, s in scores.items():
    print(method, {k: round(v, 3) for k, v in evaluate(s, truth).items()})

# %%
# Ties in the win ratio share fractional ranks.

print(to_ranking(scores["WinRatio"].scores)[:10])
