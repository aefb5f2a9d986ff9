from leaguerank import SweepSpec, run_perturbation_study, run_sweep

# %%
# A small version of the randomness / completeness grid.
# The shipped configs/fig3.toml runs the full grid through the CLI.

spec = SweepSpec(grid={"delta": [0.05, 0.5], "frac_played": [0.1, 1.0]},
                 fixed={"n_teams": 30, "home_adv": 0.0}, realizations=20,
                 metrics=("kendall",), base_seed=0)
result = run_sweep(spec)

for delta, frac in spec.points():
    row = {alg: result.mean(alg, delta=delta, frac_played=frac) for alg in spec.algorithms}
    print(f"delta={delta:<5} P={frac:<4}", "  ".join(f"{a} {v:.3f}" for a, v in row.items()))

""" PageRank only helps when outcomes are nearly deterministic and few games are played. """

# %%
# Cleaning upsets out of the data.

pert = SweepSpec(grid={"eta": [0.0, 0.5, 1.0], "mode": ["remove", "revert"]},
                 fixed={"n_teams": 30, "delta": 0.25, "home_adv": 0.08,
                        "shape_alpha": 1.5, "shape_beta": 0.5},
                 realizations=10, metrics=("kendall",), base_seed=0)
print(run_perturbation_study(pert).to_csv())
