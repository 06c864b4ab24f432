# %% [markdown]
# # Sensitivity: where does the challenger's extra money go?
#
# By default the "protect" and "attack" bonuses only raise M's market-share
# numerator. Setting `bonus_in_loan_base` also counts them in the profit
# the banker lends against. This compares the balanced exponent under both
# routings and under a few bonus sizes.

# %%
import dataclasses

from duelsim import AggressionParams, CalibrationSpec, SimParams, find_balanced_exponent

base = SimParams()
for routed in (False, True):
    for alpha in (0.0, 0.1, 0.3):
        params = dataclasses.replace(base, aggression=AggressionParams(alpha, alpha, routed))
        res = find_balanced_exponent(CalibrationSpec(params, 1.0, 3.0, reps_per_eval=1000, tolerance=0.03))
        print(f"routed={routed!s:5}  alpha={alpha:.1f}  balanced M_exp={res.balanced_m_exp:.5f}  "
              f"rate={res.achieved_stats.m_win_rate:.3f}")

# %% [markdown]
# Outside the bank circuit the bonuses leave the balance where it is: they
# scale M's share numerator by at most 1 + alpha_protect + alpha_attack,
# while the profit ratio itself diverges, so no contest changes hands.
# Routed through the bank they compound like profit and lower the exponent
# M needs.
