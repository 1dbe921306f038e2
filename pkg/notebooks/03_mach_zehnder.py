# %% [markdown]
# # Both tips in one coherence area: a Mach-Zehnder interferometer
#
# With zero tip separation the two arms carry the same field.  The singles
# now fringe at the optical period and the joint rate is just the product of
# the two singles.

# %%
import numpy as np

from thermaldip.bench import parse_bench_config, run_mach_zehnder

doc = """
[source]
emission = cw
[filter]
tau_c_fs = 345
[geometry]
tip_sep_lc = 0
[scan]
from_fs = -1.4
to_fs = 1.4
step_fs = 0.1
[mc]
trials = 4000
"""
cfg = parse_bench_config(doc)

# %%
exact = run_mach_zehnder(cfg)
mc = run_mach_zehnder(cfg, "classical-mc")
print("visibility", exact.extras["visibility"], mc.extras["visibility"])
print("max factorization residual", exact.extras["factorization_residual"].max(), mc.extras["factorization_residual"].max())

# %% [markdown]
# Chaotic intensity fluctuates from realization to realization, so the raw
# Monte Carlo <W1 W2> carries a constant factor <W^2>/<W>^2; the scan runner
# divides it out.

# %%
print("kappa per point:", np.round(mc.extras["kappa"], 4))
for d, s1, s2, j in zip(exact.grid, exact.singles_1, exact.singles_2, exact.joint):
    print(f"{d * 1e15:5.2f} fs  s1 {s1:.4f}  s2 {s2:.4f}  joint {j:.4f}  s1*s2 {s1 * s2:.4f}")
