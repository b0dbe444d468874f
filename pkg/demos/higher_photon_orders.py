# %% [markdown]
# Adding more photons to the seed in port b widens and deepens the
# sub-shot-noise window. Orders above one have no closed form in this
# package, so the sweep falls back to the Fock model automatically.

# %%
from pacsmzi.core import InputConfig
from pacsmzi.sweep import Axis, SweepSpec, landmarks_for, run_sweep

axis = Axis("n_total", 2.25, 10.0, 160)
for m in range(5):
    res = run_sweep(SweepSpec([axis], InputConfig(1.5, 0.0, m), phi=0.0))
    marks = landmarks_for(res)
    paths = sorted({r.path for r in res.rows if r.status == "ok"})
    print(f"m={m}  min S={marks.min_value:.4f} at <n>={marks.min_location:.3f}  "
          f"crossings={[round(c, 3) for c in marks.crossings]}  path={paths}")
