r"""Power-law harmonic drives.

The drive is a real, :math:`\tau`-periodic field whose Fourier components
decay as a power of the harmonic index,

.. math:: h_x^{(m)} = \frac{h_0}{(1 + |m|)^{\alpha}}, \qquad |m| \le M,

and vanish for :math:`|m| > M`. The base amplitude :math:`h_0` is fixed by
the total weight :math:`h_\mathrm{sum} = \sum_m h_x^{(m)}`, which is also
the peak value of the drive at integer multiples of the period.

Units: angular frequencies in rad/µs, times in µs, :math:`\hbar = 1`.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from ._io import write_csv
from .errors import InvalidInputError

__all__ = [
    "DriveSpec",
    "HarmonicSpectrum",
    "base_amplitude",
    "harmonics",
    "synthesize",
    "drive_area",
    "averaged_drive",
    "sample_discretized",
    "write_pulse_csv",
]


def _weights(alpha, cutoff_M):
    """Relative harmonic weights ``(1+m)^-alpha`` for ``m = 0..M``."""
    m = np.arange(cutoff_M + 1, dtype=float)
    return (1.0 + m) ** (-float(alpha))


@dataclass(frozen=True)
class DriveSpec:
    """Parameters of a power-law harmonic drive.

    Parameters
    ----------
    h_sum : float
        Total harmonic weight, equal to the drive value at ``t = n*tau``
        (rad/µs). Zero gives the undriven qubit.
    alpha : float
        Power-law decay exponent, ``alpha >= 0``.
    cutoff_M : int
        Highest retained harmonic index.
    omega_p : float
        Angular pump frequency (rad/µs).
    """

    h_sum: float
    alpha: float
    cutoff_M: int
    omega_p: float

    def __post_init__(self):
        for name in ("h_sum", "alpha", "omega_p"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidInputError(f"{name} must be finite")
        if self.h_sum < 0:
            raise InvalidInputError("h_sum must be ≥ 0")
        if self.alpha < 0:
            raise InvalidInputError("alpha must be ≥ 0")
        if self.omega_p <= 0:
            raise InvalidInputError("omega_p must be > 0")
        if int(self.cutoff_M) != self.cutoff_M or self.cutoff_M < 0:
            raise InvalidInputError("cutoff_M must be a nonnegative integer")
        object.__setattr__(self, "cutoff_M", int(self.cutoff_M))

    @property
    def period(self):
        """Drive period ``tau = 2 pi / omega_p`` in µs."""
        return 2.0 * math.pi / self.omega_p

    @classmethod
    def from_base_amplitude(cls, h0, alpha, cutoff_M, omega_p):
        """Build a spec from the base amplitude ``h0`` instead of ``h_sum``.

        Useful for sweeps over the cutoff at fixed hopping strength.
        """
        w = _weights(alpha, int(cutoff_M))
        h_sum = float(h0) * (w[0] + 2.0 * w[1:].sum())
        return cls(h_sum=h_sum, alpha=alpha, cutoff_M=cutoff_M, omega_p=omega_p)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class HarmonicSpectrum:
    """Fourier components of a real drive.

    Only the nonnegative half ``amplitudes[m]`` for ``m = 0..M`` is stored;
    negative indices are obtained by conjugate reflection, so Hermitian
    symmetry holds by construction.
    """

    amplitudes: np.ndarray

    @property
    def cutoff_M(self):
        return len(self.amplitudes) - 1

    def __getitem__(self, m):
        m = int(m)
        if abs(m) > self.cutoff_M:
            return 0.0
        value = self.amplitudes[abs(m)]
        return np.conj(value) if m < 0 else value

    def indices(self):
        return np.arange(-self.cutoff_M, self.cutoff_M + 1)

    def full(self):
        """Entries for ``m = -M..M`` as an array."""
        half = self.amplitudes
        return np.concatenate([np.conj(half[:0:-1]), half])

    def as_dict(self):
        return {int(m): v for m, v in zip(self.indices(), self.full())}

    def total(self):
        return self.full().sum()


def base_amplitude(spec):
    """Base amplitude ``h0`` such that the truncated harmonics sum to ``h_sum``.

    Examples
    --------
    >>> spec = DriveSpec(h_sum=8.0, alpha=1.0, cutoff_M=2, omega_p=1.0)
    >>> float(base_amplitude(spec))
    3.0
    """
    w = _weights(spec.alpha, spec.cutoff_M)
    return spec.h_sum / (w[0] + 2.0 * w[1:].sum())


def harmonics(spec):
    """Harmonic spectrum of the drive (all entries real and nonnegative)."""
    return HarmonicSpectrum(base_amplitude(spec) * _weights(spec.alpha, spec.cutoff_M))


def _cosine_series(spec, t, coeff):
    # Accumulate one harmonic at a time to keep memory flat for long grids.
    t = np.asarray(t, dtype=float)
    w = _weights(spec.alpha, spec.cutoff_M)
    out = np.zeros_like(t)
    for m in range(1, spec.cutoff_M + 1):
        out += coeff(m, t) * w[m]
    return out


def synthesize(spec, t):
    """Drive value ``h_x(t)`` (rad/µs); scalar or array ``t``.

    Harmonics are real and positive, so all cosines align at ``t = n*tau``
    where the drive equals ``h_sum``.
    """
    h0 = base_amplitude(spec)
    wp = spec.omega_p
    series = _cosine_series(spec, t, lambda m, tt: np.cos(m * wp * tt))
    out = h0 * (1.0 + 2.0 * series)
    return float(out) if np.ndim(out) == 0 else out


def drive_area(spec, t):
    """Accumulated drive ``theta(t) = int_0^t h_x(s) ds`` in closed form."""
    h0 = base_amplitude(spec)
    wp = spec.omega_p
    series = _cosine_series(spec, t, lambda m, tt: np.sin(m * wp * tt) / (m * wp))
    out = h0 * (np.asarray(t, dtype=float) + 2.0 * series)
    return float(out) if np.ndim(out) == 0 else out


def averaged_drive(spec, t_mid, delta):
    """Exact average of ``h_x`` over ``[t_mid - delta/2, t_mid + delta/2]``.

    Equivalent to ``(drive_area(t1) - drive_area(t0)) / delta`` but free of
    cancellation: each harmonic is damped by ``sinc(m omega_p delta / 2)``.
    """
    h0 = base_amplitude(spec)
    wp = spec.omega_p
    delta = np.asarray(delta, dtype=float)

    def term(m, tt):
        # np.sinc(x) = sin(pi x) / (pi x)
        return np.cos(m * wp * tt) * np.sinc(m * wp * delta / (2.0 * np.pi))

    out = h0 * (1.0 + 2.0 * _cosine_series(spec, t_mid, term))
    return float(out) if np.ndim(out) == 0 else out


def sample_discretized(spec, dt, duration):
    """Samples of the drive on ``t_k = k*dt`` for ``k = 0..floor(duration/dt)``.

    Returns
    -------
    t, values : ndarray
    """
    if not dt > 0 or not duration > 0:
        raise InvalidInputError("dt and duration must be positive")
    # Relative guard so that duration = n*dt counts the endpoint despite rounding.
    n = int(math.floor(duration / dt * (1.0 + 1e-12))) + 1
    t = np.arange(n) * float(dt)
    return t, synthesize(spec, t)


def write_pulse_csv(path, spec, dt, duration):
    """Export the discretized pulse as ``t_us,h_x_rad_per_us`` CSV."""
    t, values = sample_discretized(spec, dt, duration)
    write_csv(path, ["t_us", "h_x_rad_per_us"], np.column_stack([t, values]))
    return path
