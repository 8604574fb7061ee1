# %% [markdown]
# # Detecting the cutoff in the measured signal
#
# The Fourier components s_z(m) of a five-period trace carry the ladder
# structure; for alpha = 0 a peak sits at m = M and it washes out as
# alpha grows.

# %%
import matplotlib.pyplot as plt
import numpy as np

from floquet_lattice import SpinState, harmonic_components, peak_visibility, trace_sz

from _common import DRIVE, QUBIT, TAU, save


def spectrum(alpha, M):
    spec = DRIVE.replace(alpha=alpha, cutoff_M=M)
    series = trace_sz(QUBIT, spec, SpinState.down(), 5 * TAU, 740)
    return harmonic_components(series, spec.omega_p, M + 10)


fig, (ax_m, ax_a) = plt.subplots(1, 2, figsize=(11, 4))
for M in (5, 10, 20):
    tr = spectrum(0.0, M)
    keep = tr.m >= 0
    ax_m.semilogy(tr.m[keep], np.abs(tr.values[keep]), ".-", label=f"M={M}")
    print(f"alpha=0, M={M}: visibility {peak_visibility(tr, M):.2f}")
ax_m.set_xlabel("m")
ax_m.set_ylabel("|s_z(m)|")
ax_m.legend()

# %%
for alpha in (0.0, 0.5, 1.0, 1.5):
    tr = spectrum(alpha, 10)
    keep = tr.m >= 0
    ax_a.semilogy(tr.m[keep], np.abs(tr.values[keep]), ".-", label=f"alpha={alpha:g}")
    print(f"M=10, alpha={alpha:g}: visibility {peak_visibility(tr, 10):.2f}")
ax_a.axvline(10, color="k", lw=0.5)
ax_a.set_xlabel("m")
ax_a.legend()
save(fig, "harmonic_spectrum.png")
