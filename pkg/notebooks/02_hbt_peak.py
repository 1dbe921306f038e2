# %% [markdown]
# # HBT correlation: rotating versus frozen ground glass
#
# Without the second beamsplitter each detector looks at one tip.  Chaotic
# light gives a correlation of 2 when the tips sit inside one coherence area
# and 1 far outside it.  With the glass at rest there is a single speckle
# pattern and no ensemble average, so no reproducible peak appears.

# %%
import numpy as np

from thermaldip.bench import parse_bench_config, run_hbt_scan, transverse_coherence
from thermaldip.spectral import coherence_scales

dtheta, lc = coherence_scales(800e-9, 4.5e-3, 200e-3)
print(f"angular size {dtheta * 1e3:.1f} mrad, coherence length {lc * 1e6:.1f} um")

doc = """
[source]
emission = cw
[filter]
tau_c_fs = 345
[geometry]
tip_sep_lc = 0
[topology]
bs2 = false
[scan]
axis = transverse
from_um = -60
to_um = 60
step_um = 10
[mc]
trials = 20000
seed = {seed}
"""

# %%
cfg = parse_bench_config(doc.format(seed=0))
exact = run_hbt_scan(cfg, engine="quantum")
mc = run_hbt_scan(cfg, engine="classical-mc")
for x, a, m, e in zip(exact.grid, exact.joint, mc.joint, mc.stderr):
    print(f"dx {x * 1e6:6.1f} um   1+|mu|^2 {a:.4f}   MC {m:.4f} +- {e:.4f}")

# %% [markdown]
# Frozen glass: one realization per scan point, reused across the scan.

# %%
frozen_doc = doc + "[counting]\nintegration_realizations = 1\n"
for seed in range(4):
    f = run_hbt_scan(parse_bench_config(frozen_doc.format(seed=seed)), engine="classical-mc")
    r = np.corrcoef(f.joint, exact.joint)[0, 1]
    print(f"seed {seed}: values {np.round(f.joint, 2)}  r with rotating curve {r:+.2f}")
