# %% [markdown]
# # Slope at the kick versus cutoff
#
# |ds_z/dt| near t = tau grows as M^(1-alpha) below alpha = 1, as ln M at
# alpha = 1 and saturates above. The sweep keeps h0 fixed, so raising M
# only adds harmonics.

# %%
import matplotlib.pyplot as plt
import numpy as np

from floquet_lattice.spectral import derivative_bound, scaling_sweep

from _common import DRIVE, QUBIT, save

Ms = [16, 32, 64, 128]
scan = scaling_sweep(QUBIT, DRIVE, [0.0, 0.5, 1.0, 1.5], Ms)
report = scan.report()["alphas"]

fig, ax = plt.subplots(figsize=(6, 4))
for i, alpha in enumerate(scan.alphas):
    entry = report[repr(float(alpha))]
    line, = ax.loglog(Ms, scan.values[i], "o", label=f"alpha={alpha:g}, slope {entry['slope']:.2f}")
    overlay = entry["bound_scale"] * np.array([derivative_bound(alpha, M, 1) for M in Ms])
    ax.loglog(Ms, overlay, "--", color=line.get_color(), lw=0.8)
ax.set_xlabel("M")
ax.set_ylabel("max |ds_z/dt| near tau")
ax.legend()
save(fig, "derivative_scaling.png")

# %%
for key, entry in report.items():
    print(key, {k: round(v, 4) for k, v in entry.items() if isinstance(v, float)})
