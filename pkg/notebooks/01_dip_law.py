# %% [markdown]
# # The two-photon anti-correlation dip
#
# Two mutually incoherent chaotic fields meet at a beamsplitter.  The joint
# detection rate behind it, as a function of the delay inserted in one arm,
# has a dip of depth one half and width tau_c.

# %%
import math

import numpy as np

from thermaldip.bench import fit_dip, parse_bench_config, run_dip_scan
from thermaldip.correlators import coincidence_rate, rc_from_g2_integral
from thermaldip.spectral import make_gaussian_spectrum

tau_c = 345e-15
omega0 = 2 * math.pi * 299_792_458.0 / 800e-9

# %% [markdown]
# Closed form versus a brute-force integral of the four-amplitude rate over
# both detection times.

# %%
spectrum = make_gaussian_spectrum(omega0, tau_c)
for x in (0, 0.5, 1, 2, 4):
    d = x * tau_c
    print(f"delta = {x:3} tau_c   closed {coincidence_rate(d, tau_c):.9f}   integral {rc_from_g2_integral(spectrum, d):.9f}")

# %% [markdown]
# The same curve from a bench description, and a Gaussian dip fit.  A scalar
# gamma < 1 on the cross term lowers the contrast to gamma/2.

# %%
doc = """
[source]
emission = cw
[filter]
tau_c_fs = {tau}
[geometry]
tip_sep_lc = 40
[scan]
from_fs = -2500
to_fs = 2500
step_fs = 25
[imperfection]
gamma = {gamma}
"""
for tau, gamma in ((345, 1.0), (345, 0.56), (541, 0.58)):
    cfg = parse_bench_config(doc.format(tau=tau, gamma=gamma))
    fit = fit_dip(run_dip_scan(cfg, "quantum"))
    print(f"tau_c {tau} fs, gamma {gamma}: width {fit.width * 1e15:.1f} fs, contrast {100 * fit.contrast:.1f}%")

# %% [markdown]
# A crude text plot of the measured-contrast case.

# %%
cfg = parse_bench_config(doc.format(tau=345, gamma=0.56).replace("step_fs = 25", "step_fs = 125"))
r = run_dip_scan(cfg, "quantum")
for d, y in zip(r.grid, r.joint):
    print(f"{d * 1e15:7.0f} fs |" + "#" * int(round(60 * (y - 0.6) / 0.4)))
