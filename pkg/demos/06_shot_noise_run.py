# %% [markdown]
# # A full run with shot noise
#
# The harness drives a protocol from a config, adds binomial measurement
# noise and writes every file with a checksum. The same seed reproduces
# the same bytes.

# %%
import tempfile
from pathlib import Path

import matplotlib.pyplot as plt

from floquet_lattice._io import read_csv
from floquet_lattice.harness import dumps_config, preset_config, run

from _common import save

out = Path(tempfile.mkdtemp()) / "trace"
config = preset_config("armonk-defaults").replace(out_dir=str(out))
print(dumps_config(config))

# %%
manifest = run(config)
print(manifest.status, manifest.summary)
again = run(config.replace(out_dir=str(out) + "-again"))
print("identical checksums:", again.files == manifest.files)

# %%
_, clean = read_csv(out / "trace.csv")
_, noisy = read_csv(out / "trace_shots.csv")
fig, ax = plt.subplots(figsize=(7, 3))
ax.plot(noisy[:, 0], noisy[:, 1], ".", ms=2, label="8192 shots")
ax.plot(clean[:, 0], clean[:, 1], lw=1, label="noiseless")
ax.set_xlabel("t [us]")
ax.set_ylabel("s_z")
ax.legend()
save(fig, "shot_noise_run.png")
