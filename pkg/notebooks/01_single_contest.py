# %% [markdown]
# # One contest, both endings
#
# Two seeded runs of the shipped scenario: one where the defender H keeps
# the market and one where the challenger M takes it. For each we plot H's
# market share and the technical-progress draws that drove it, and write the
# `shares.dat` / `tp.dat` plot files.

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from duelsim import SimParams, TpProvider, run_cycle
from duelsim.output import write_plot_data

OUT = Path(__file__).resolve().parent / "output"
params = SimParams()

# %%
# first seeds giving each winner
runs = {}
seed = 0
while len(runs) < 2:
    traj = run_cycle(params, TpProvider.seeded(seed))
    if traj.outcome.winner != "none":
        runs.setdefault(traj.outcome.winner, traj)
    seed += 1
for winner, traj in sorted(runs.items()):
    print(winner, traj.tp_source, "final H share", traj.outcome.final_share_h,
          "crossings", traj.outcome.half_crossings)

# %%
fig, axes = plt.subplots(2, 2, figsize=(10, 6), sharex=True)
for col, winner in enumerate(("H", "M")):
    traj = runs[winner]
    periods = [r.period for r in traj.records]
    axes[0, col].plot(periods, traj.h_shares, label="H")
    axes[0, col].plot(periods, [r.m.market_share for r in traj.records], label="M")
    axes[0, col].set_title(f"{winner} wins ({traj.tp_source})")
    axes[0, col].set_ylim(-0.02, 1.02)
    axes[0, col].legend()
    axes[1, col].bar(periods, traj.tp_values, color="grey")
    axes[1, col].set_ylabel("TP")
    axes[1, col].set_xlabel("period")
    write_plot_data(traj, OUT / f"{winner}_wins")
fig.tight_layout()
OUT.mkdir(exist_ok=True)
fig.savefig(OUT / "single_contest.png", dpi=120)

# %% [markdown]
# The TP panels look alike: nothing in the draws themselves announces the
# winner. What decides the contest is mostly the first few periods, because
# a money exponent above one compounds any early lead.
