# %% [markdown]
# Wigner function of output port f. The negative volume measures how much
# of the photon-added nonclassicality survives at a given phase.

# %%
import numpy as np

from pacsmzi.core import InputConfig
from pacsmzi.wigner import GridSpec, output_mode_wigner

cfg = InputConfig(1.17, 1.5, 1)
grid = GridSpec(64)
for phi in (0.0, 1.0, 2.0, 3.77, 5.03):
    w, rep = output_mode_wigner(cfg, phi, "f", grid)
    print(f"phi={phi:4.2f}  min W={rep.min_value: .4f}  negative volume={rep.negative_volume:.2e}  "
          f"integral={w.integral():.4f}")

# %%
# coherent inputs only ever give Gaussians at the output
w, rep = output_mode_wigner(InputConfig(1.17, 1.5, 0), 0.7, "f", grid)
print("coherent pair, min W:", rep.min_value, "nonclassical:", rep.is_nonclassical)
print("peak at", np.unravel_index(np.argmax(w.values), w.values.shape))
