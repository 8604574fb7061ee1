"""Shared parameters and figure output for the demo scripts."""
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

from floquet_lattice import DriveSpec, QubitParams  # noqa: E402

TWO_PI = 2 * math.pi
QUBIT = QubitParams(omega_z=TWO_PI * 0.25)
DRIVE = DriveSpec(h_sum=TWO_PI * 1.2, alpha=0.0, cutoff_M=5, omega_p=TWO_PI * 0.3)
TAU = DRIVE.period

FIGURES = Path(__file__).resolve().parent / "figures"


def save(fig, name):
    FIGURES.mkdir(exist_ok=True)
    path = FIGURES / name
    fig.savefig(path, dpi=120, bbox_inches="tight")
    print(f"wrote {path}")
    return path
