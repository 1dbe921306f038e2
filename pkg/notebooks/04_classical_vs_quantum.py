# %% [markdown]
# # Classical statistics versus the two-photon picture
#
# Three engines on one delay grid: the two-photon dip law, the closed-form
# classical term ledger and a direct Monte Carlo of chaotic fields.  For CW
# light all classical routes are flat.  For pulses shorter than tau_c the
# Monte Carlo and the ledger both show a dip set by the pulse width, not by
# tau_c; the ledger's cross terms do not cancel the self terms.

# %%
import numpy as np

from thermaldip.bench import parse_bench_config, run_dip_scan
from thermaldip.correlators import TERM_NAMES

doc = """
[source]
emission = {emission}
pulse_fwhm_fs = 200
[filter]
tau_c_fs = 345
[geometry]
tip_sep_lc = 40
[scan]
from_fs = -1200
to_fs = 1200
step_fs = 200
[mc]
trials = 5000
"""

# %%
for emission in ("cw", "pulsed"):
    cfg = parse_bench_config(doc.format(emission=emission))
    q = run_dip_scan(cfg, "quantum")
    led = run_dip_scan(cfg, "classical-ledger")
    mc = run_dip_scan(cfg, "classical-mc")
    print(f"--- {emission}")
    for d, a, b, c, e in zip(q.grid, q.joint, led.joint, mc.joint, mc.stderr):
        print(f"{d * 1e15:7.0f} fs   quantum {a:.4f}   ledger {b:.4f}   MC {c:.4f} +- {e:.4f}")

# %% [markdown]
# Term by term at zero delay for the pulsed source.

# %%
k = int(np.argmin(np.abs(mc.grid)))
for i, name in enumerate(TERM_NAMES):
    L = led.extras["ledgers"][k].values[i]
    print(f"{name:8s} ledger {L:+.5f}   MC {mc.extras['terms'][i, k]:+.5f} +- {mc.extras['terms_stderr'][i, k]:.5f}")
