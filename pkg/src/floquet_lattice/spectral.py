"""Detection protocols on measured or simulated ``s_z(t)`` traces.

Two probes of the Floquet tails:

* harmonic decomposition ``s_z(m) = T^-1 int_0^T s_z(t) exp(-i m omega_p t) dt``,
  whose peak at ``m = M`` signals long-range hopping;
* the slope ``|ds_z/dt|`` at the kick ``t = tau`` as a function of the cutoff,
  which diverges as ``M^(1-alpha)`` below ``alpha = 1`` and saturates above it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._io import write_csv, write_json
from .drive import DriveSpec, base_amplitude
from .dynamics import SpinState, trace_sz
from .errors import InvalidInputError, InvalidWindowError

__all__ = [
    "HarmonicTrace",
    "DerivativeScan",
    "harmonic_components",
    "peak_visibility",
    "derivative_near_tau",
    "scaling_sweep",
    "derivative_bound",
    "write_harmonics_csv",
]


@dataclass(frozen=True, eq=False)
class HarmonicTrace:
    """Fourier components ``s_z(m)`` for ``m = -m_max..m_max``."""

    m: np.ndarray
    values: np.ndarray
    base_frequency: float
    window_T: float

    @property
    def m_max(self):
        return int(self.m[-1])

    def __getitem__(self, m):
        m = int(m)
        if abs(m) > self.m_max:
            raise KeyError(m)
        return self.values[m + self.m_max]

    @property
    def components(self):
        return {int(k): v for k, v in zip(self.m, self.values)}

    def magnitude(self, m):
        return abs(self[m])


def harmonic_components(series, omega_p, m_max):
    """Trapezoidal estimate of the harmonics of ``series`` at multiples of ``omega_p``.

    The series must cover a whole number of periods, to within one sample.
    """
    if int(m_max) != m_max or m_max < 1:
        raise InvalidInputError("m_max must be a positive integer")
    m_max = int(m_max)
    tau = 2 * math.pi / omega_p
    T = series.duration
    n_periods = round(T / tau)
    if n_periods < 1 or abs(T - n_periods * tau) > series.dt * (1 + 1e-9):
        raise InvalidWindowError(
            f"series spans {T / tau:.4f} periods; need a whole number >= 1"
        )
    t = series.times - series.t0
    m = np.arange(-m_max, m_max + 1)
    kernel = np.exp(-1j * omega_p * np.outer(m, t))
    values = np.trapezoid(kernel * series.values, dx=series.dt, axis=1) / T
    return HarmonicTrace(m, values, float(omega_p), float(T))


def peak_visibility(trace, M):
    """``|s_z(M)|`` over the median of ``|s_z(M+1)|, |s_z(M+2)|, |s_z(M+3)|``.

    Returns ``math.inf`` when the reference median is below 1e-14.
    """
    if M + 3 > trace.m_max or M < 0:
        raise InvalidWindowError(f"need m_max >= M+3 = {M + 3}, have {trace.m_max}")
    ref = float(np.median([abs(trace[M + k]) for k in (1, 2, 3)]))
    if ref < 1e-14:
        return math.inf
    return abs(trace[M]) / ref


def derivative_near_tau(series, tau, half_window=None):
    """Largest ``|ds_z/dt|`` on the samples within ``tau +- half_window``.

    Central differences; every stencil must lie inside the series.
    Default ``half_window`` is ``tau/20``.
    """
    if half_window is None:
        half_window = tau / 20
    t = series.times
    eps = 1e-9 * series.dt
    inside = np.nonzero((t >= tau - half_window - eps) & (t <= tau + half_window + eps))[0]
    if len(inside) == 0 or inside[0] < 1 or inside[-1] > len(t) - 2:
        raise InvalidWindowError("derivative window is not inside the sampled series")
    lo, hi = inside[0], inside[-1]
    v = series.values
    deriv = (v[lo + 1:hi + 2] - v[lo - 1:hi]) / (2 * series.dt)
    return float(np.max(np.abs(deriv)))


def derivative_bound(alpha, M, q, omega_p=1.0):
    """Leading large-``M`` scaling of the bound on ``|d^q <O>/dt^q|``.

    Two contributions are compared: terms with one index at ``m = 0`` grow
    with exponent ``q - alpha``, the double sum over nonzero indices with
    ``q - 2 alpha``. Each gives ``M^p`` for ``p > 0``, ``ln M`` for ``p = 0``
    and ``1`` for ``p < 0``. The larger one, times ``omega_p^q``, is returned.
    Only the shape is meaningful; the prefactor is arbitrary.

    Examples
    --------
    >>> derivative_bound(0.0, 100, 1)
    100.0
    >>> derivative_bound(2.0, 100, 1)
    1.0
    """
    if q < 0:
        raise InvalidInputError("q must be >= 0")

    def growth(p):
        if math.isclose(p, 0.0, abs_tol=1e-12):
            return math.log(M)
        return float(M) ** p if p > 0 else 1.0

    return omega_p ** q * max(growth(q - alpha), growth(q - 2 * alpha))


def _r_squared(x, y):
    coef = np.polyfit(x, y, 1)
    resid = y - np.polyval(coef, x)
    ss = np.sum((y - y.mean()) ** 2)
    return coef, (1.0 - np.sum(resid ** 2) / ss) if ss > 0 else 1.0


@dataclass(eq=False)
class DerivativeScan:
    """``|ds_z/dt|`` near ``t = tau`` on an ``(alpha, M)`` grid.

    ``values[i, j]`` and ``stencil_dt[i, j]`` belong to ``alphas[i]``, ``Ms[j]``.
    Failed points hold NaN and an entry in ``errors``.
    """

    alphas: np.ndarray
    Ms: np.ndarray
    values: np.ndarray
    stencil_dt: np.ndarray
    h0: float
    errors: dict = field(default_factory=dict)

    def report(self):
        """Per-alpha scaling fits, keyed by ``str(alpha)``.

        ``slope`` is the log-log slope versus ``M``; ``log_fit_r2`` the R^2 of a
        linear fit versus ``ln M``; ``last_step_change`` the relative change
        between the two largest cutoffs; ``bound_scale`` the least-squares
        prefactor of :func:`derivative_bound` with ``q = 1``.
        """
        out = {}
        for i, alpha in enumerate(self.alphas):
            ok = np.isfinite(self.values[i]) & (self.values[i] > 0)
            Ms = self.Ms[ok].astype(float)
            v = self.values[i][ok]
            entry = {"alpha": float(alpha), "n_points": int(ok.sum())}
            if len(v) >= 2:
                coef, r2_loglog = _r_squared(np.log(Ms), np.log(v))
                lin, r2_lin = _r_squared(np.log(Ms), v)
                bound = np.array([derivative_bound(alpha, M, 1) for M in Ms])
                scale = float(v @ bound / (bound @ bound))
                entry.update(
                    slope=float(coef[0]),
                    slope_r2=float(r2_loglog),
                    slope_residual=float(np.sqrt(np.mean(
                        (np.log(v) - np.polyval(coef, np.log(Ms))) ** 2))),
                    log_fit_slope=float(lin[0]),
                    log_fit_r2=float(r2_lin),
                    last_step_change=float(abs(v[-1] - v[-2]) / abs(v[-2])),
                    bound_scale=scale,
                )
            out[repr(float(alpha))] = entry
        return {"h0": self.h0, "alphas": out, "errors": dict(self.errors)}

    def write_csv(self, path):
        """Export as ``alpha,M,deriv_abs,stencil_dt`` CSV."""
        rows = [[a, int(M), self.values[i, j], self.stencil_dt[i, j]]
                for i, a in enumerate(self.alphas) for j, M in enumerate(self.Ms)]
        write_csv(path, ["alpha", "M", "deriv_abs", "stencil_dt"], rows)
        return path

    def write_report(self, path):
        return write_json(path, self.report())


def scaling_sweep(params, spec_template, alphas, Ms, *, h0=None, samples_per_period=None,
                  half_window=None, initial=None):
    """Simulate ``s_z`` over ``[0, 2 tau]`` for each ``(alpha, M)`` and record the kick slope.

    The base amplitude is held fixed across the grid (default: that of
    ``spec_template``), so raising ``M`` adds harmonics without diluting the
    existing ones. Sampling defaults to ``64 * max(M, 16)`` points per period
    with one integration substep per sample.
    """
    alphas = np.asarray(list(alphas), dtype=float)
    Ms = np.asarray(list(Ms), dtype=int)
    if alphas.size == 0 or Ms.size == 0:
        raise InvalidInputError("parameter grids must be nonempty")
    if np.any(np.diff(Ms) <= 0):
        raise InvalidInputError("Ms must be strictly ascending")
    if h0 is None:
        h0 = base_amplitude(spec_template)
    if initial is None:
        initial = SpinState.down()
    wp = spec_template.omega_p
    tau = spec_template.period
    values = np.full((alphas.size, Ms.size), np.nan)
    stencil = np.full_like(values, np.nan)
    errors = {}
    for i, alpha in enumerate(alphas):
        for j, M in enumerate(Ms):
            try:
                spec = DriveSpec.from_base_amplitude(h0, alpha, int(M), wp)
                spp = samples_per_period or 64 * max(int(M), 16)
                series = trace_sz(params, spec, initial, 2 * tau, 2 * spp + 1, spp)
                values[i, j] = derivative_near_tau(series, tau, half_window)
                stencil[i, j] = series.dt
            except Exception as exc:  # keep sweeping; failures are reported per point
                errors[f"{float(alpha)!r},{int(M)}"] = f"{type(exc).__name__}: {exc}"
    return DerivativeScan(alphas, Ms, values, stencil, float(h0), errors)


def write_harmonics_csv(path, trace):
    """Export as ``m,re_sz,im_sz,abs_sz`` CSV."""
    rows = np.column_stack([trace.m, trace.values.real, trace.values.imag, np.abs(trace.values)])
    write_csv(path, ["m", "re_sz", "im_sz", "abs_sz"], rows)
    return path
