# %% [markdown]
# Coherent light in port a (alpha_a = 1.5), a single-photon-added coherent
# state in port b, phi = 0. Sweep the total mean photon number by changing
# |alpha_b| and locate where the normalized uncertainty dips below 1.

# %%
from pacsmzi.core import InputConfig
from pacsmzi.sweep import Axis, SweepSpec, landmarks_for, run_sweep

spec = SweepSpec([Axis("n_total", 3.25, 10.0, 200)], InputConfig(1.5, 0.0, 1), phi=0.0)
result = run_sweep(spec)
marks = landmarks_for(result)
print("crossings  ", [round(c, 4) for c in marks.crossings])
print("minimum    ", round(marks.min_value, 5), "at <n> =", round(marks.min_location, 4))

# %%
# the same curve from the closed forms and from the truncated Fock model
oracle = run_sweep(SweepSpec(spec.axes, spec.template, phi=0.0, path="oracle"))
ok = result.ok_mask()
print("max |analytic - oracle| =", abs(result.s_sql()[ok] - oracle.s_sql()[ok]).max())
