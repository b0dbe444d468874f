# %% [markdown]
# Vacuum in one port, a photon-added coherent state in the other.
# Intensity-difference detection never beats the shot-noise limit here,
# and touches it at phi = pi/2.

# %%
import numpy as np

from pacsmzi.analytic import vacuum_pacs_moments

phis = np.linspace(0, np.pi, 9)[1:-1]
for m in (1, 3, 5):
    s = [vacuum_pacs_moments(phi, 1.5, m).s_sql for phi in phis]
    print(f"m={m}", " ".join(f"{v:7.4f}" for v in s))

# %%
# the floor sits at exactly 1 whatever the seed amplitude
for ab in (0.1, 0.5, 1.5, 2.0):
    best = min(vacuum_pacs_moments(phi, ab, 1).s_sql for phi in np.linspace(0.05, np.pi - 0.05, 201))
    print(f"|alpha_b|={ab}: min S = {best:.9f}")
