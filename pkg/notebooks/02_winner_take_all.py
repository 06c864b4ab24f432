# %% [markdown]
# # Winner takes all
#
# 1000 seeded contests of the shipped scenario. Almost every run ends with
# one firm holding more than 99.9% of the market, and the crossing census
# shows the trajectories come in two kinds: H wins without ever dropping
# below one half, M wins after crossing it once.

# %%
from duelsim import BatchSpec, SimParams, run_batch
from duelsim.experiments import WinStats, census_from_outcomes

outcomes = run_batch(BatchSpec(SimParams(), n_reps=1000, base_seed=0))
stats = WinStats.from_outcomes(outcomes)
print(stats)
print("decided fraction:", stats.decided_fraction)

# %%
census = census_from_outcomes(outcomes)
for crossings, count in census.crossing_histogram.items():
    print(f"{crossings} crossings: {count:4d} runs  {census.by_winner[crossings]}")

# %% [markdown]
# Undecided runs are the ones whose log profit ratio landed within a few
# units of zero after 30 periods; they become rarer as the money exponent
# grows and vanish with a longer horizon.

# %%
import dataclasses

for periods in (20, 30, 60):
    params = dataclasses.replace(SimParams(), periods=periods)
    s = WinStats.from_outcomes(run_batch(BatchSpec(params, 1000, 0)))
    print(periods, "periods -> undecided", s.undecided)
