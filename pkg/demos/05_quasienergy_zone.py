# %% [markdown]
# # Folded quasienergies versus drive strength
#
# The two central-zone quasienergies start at +-omega_z/2 for the undriven
# qubit and wander through the zone as h_sum grows.

# %%
import matplotlib.pyplot as plt
import numpy as np

from floquet_lattice import quasienergy_scan

from _common import DRIVE, QUBIT, TWO_PI, save

h_sums = np.linspace(0, TWO_PI * 2, 200)
scan = quasienergy_scan(QUBIT, DRIVE, [0.0, 1.5], h_sums)
table = scan.as_array()

fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
for ax, alpha in zip(axes, (0.0, 1.5)):
    rows = table[table[:, 0] == alpha]
    ax.plot(rows[:, 1] / TWO_PI, rows[:, 2] / DRIVE.omega_p, ".", ms=2)
    ax.plot(rows[:, 1] / TWO_PI, rows[:, 3] / DRIVE.omega_p, ".", ms=2)
    ax.set_title(f"alpha={alpha:g}")
    ax.set_xlabel("h_sum / 2 pi  [MHz]")
axes[0].set_ylabel("folded mu / omega_p")
save(fig, "quasienergy_zone.png")

# %%
print("largest step between grid points:", scan.max_jump() / DRIVE.omega_p, "omega_p")
print("crossings:", scan.crossings())
