r"""Floquet ladder: a tilted lattice with power-law hopping.

A :math:`\tau`-periodic two-level Hamiltonian maps onto a one-dimensional
lattice in the harmonic index :math:`m`. The truncated ladder keeps
:math:`m \in [-N, N]` and has 2x2 blocks

* diagonal: :math:`H_0 + m\,\omega_p`, with
  :math:`H_0 = -\tfrac{\omega_z}{2}\sigma_z + \tfrac{h_x^{(0)}}{2}\sigma_x`;
* off-diagonal :math:`(m, m')`: :math:`\tfrac{h_x^{(m-m')}}{2}\sigma_x`.

The factor 1/2 follows from taking the Fourier integral of :math:`H(t)`
itself. Basis index ``2*(m + N) + s`` with ``s = 0`` for up, ``1`` for down.

With this sign of the ladder tilt the Floquet functions are recovered as
:math:`\phi(t) = \sum_m e^{+i m \omega_p t} \phi(m)`; for a real, symmetric
harmonic spectrum this is the same physics as the opposite convention with
:math:`m \to -m`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ._io import write_csv
from .drive import DriveSpec, harmonics
from .dynamics import SIGMA_X, SIGMA_Z, SpinState, TimeSeries
from .errors import (
    DegenerateSelectionError,
    InvalidInputError,
    InvalidWindowError,
    NumericalFailureError,
    TruncationWarning,
)

__all__ = [
    "FloquetLadder",
    "FloquetState",
    "FloquetDecomposition",
    "TailProfile",
    "TailFit",
    "QuasienergyScan",
    "CutoffScan",
    "default_trunc_N",
    "default_fit_window",
    "build_ladder",
    "diagonalize",
    "fold_quasienergy",
    "select_central_state",
    "tail_profile",
    "fit_tail_exponent",
    "weight_beyond",
    "decompose",
    "reconstruct_trace",
    "quasienergy_scan",
    "cutoff_scan",
    "write_profile_csv",
]


def default_trunc_N(cutoff_M):
    return max(4 * int(cutoff_M), 40)


def default_fit_window(cutoff_M, trunc_N):
    """Tail-fit window ``(m_lo, m_hi)`` that avoids the central, cutoff and edge peaks."""
    if cutoff_M < trunc_N:
        return max(4, cutoff_M // 8), cutoff_M // 2
    return 4, trunc_N // 4


@dataclass(frozen=True, eq=False)
class FloquetLadder:
    trunc_N: int
    omega_p: float
    matrix: np.ndarray

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def indices(self):
        return np.arange(-self.trunc_N, self.trunc_N + 1)

    def block(self, m, m_prime):
        i = 2 * (m + self.trunc_N)
        j = 2 * (m_prime + self.trunc_N)
        return self.matrix[i:i + 2, j:j + 2]


@dataclass(frozen=True, eq=False)
class FloquetState:
    """One eigenpair of the truncated ladder.

    ``blocks[i]`` is the spinor at harmonic ``m = i - trunc_N``.
    """

    quasienergy: float
    blocks: np.ndarray
    omega_p: float
    index: int = -1

    @property
    def trunc_N(self):
        return (len(self.blocks) - 1) // 2

    @property
    def vector(self):
        return self.blocks.reshape(-1)

    def weights(self):
        return np.sum(np.abs(self.blocks) ** 2, axis=1)

    def weight_at(self, m):
        return float(np.sum(np.abs(self.blocks[m + self.trunc_N]) ** 2))

    def at_time(self, t):
        """Floquet function ``phi(t) = sum_m exp(i m omega_p t) phi(m)``; shape ``(len(t), 2)``."""
        m = np.arange(-self.trunc_N, self.trunc_N + 1)
        phases = np.exp(1j * self.omega_p * np.outer(np.atleast_1d(t), m))
        return phases @ self.blocks


def build_ladder(params, spec, trunc_N=None):
    """Dense Hermitian ladder matrix of dimension ``2(2N+1)``."""
    M = spec.cutoff_M
    if trunc_N is None:
        trunc_N = default_trunc_N(M)
    if int(trunc_N) != trunc_N or trunc_N < 1:
        raise InvalidInputError("trunc_N must be a positive integer")
    trunc_N = int(trunc_N)
    if trunc_N < M:
        raise InvalidInputError(
            f"trunc_N={trunc_N} is below cutoff_M={M}; physical couplings would be clipped"
        )
    D = 2 * trunc_N + 1
    hopping = np.zeros(D)
    hopping[: M + 1] = 0.5 * np.real(harmonics(spec).amplitudes)
    toeplitz = scipy.linalg.toeplitz(hopping)
    m = np.arange(-trunc_N, trunc_N + 1)
    matrix = (
        np.kron(toeplitz, SIGMA_X)
        + np.kron(np.eye(D), -0.5 * params.omega_z * SIGMA_Z)
        + np.kron(np.diag(m * spec.omega_p), np.eye(2))
    )
    return FloquetLadder(trunc_N, spec.omega_p, matrix)


def diagonalize(ladder):
    """All eigenstates of the ladder, sorted by ascending quasienergy."""
    try:
        mu, vecs = scipy.linalg.eigh(ladder.matrix)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailureError(f"eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(mu)):
        raise NumericalFailureError("eigensolver returned non-finite quasienergies")
    D = 2 * ladder.trunc_N + 1
    blocks = vecs.T.reshape(-1, D, 2)
    return [FloquetState(float(mu[n]), blocks[n], ladder.omega_p, n) for n in range(len(mu))]


def fold_quasienergy(mu, omega_p):
    """Fold into the first zone ``(-omega_p/2, omega_p/2]``.

    Examples
    --------
    >>> fold_quasienergy(-1.5, 1.0)
    0.5
    """
    mu = np.asarray(mu, dtype=float)
    out = mu - omega_p * np.ceil(mu / omega_p - 0.5)
    return float(out) if out.ndim == 0 else out


def _is_gauge_copy(a, b, tol=0.5):
    """True if ``b`` is ``a`` shifted along the ladder by a nonzero number of blocks."""
    omega_p = a.omega_p
    diff = b.quasienergy - a.quasienergy
    if abs(fold_quasienergy(diff, omega_p)) > 1e-6 * omega_p:
        return False
    k = int(round(diff / omega_p))
    D = len(a.blocks)
    if k == 0 or abs(k) >= D:
        return False
    shifted = np.zeros_like(a.blocks)
    if k > 0:
        shifted[k:] = a.blocks[:-k]
    else:
        shifted[:k] = a.blocks[-k:]
    return abs(np.vdot(shifted, b.blocks)) > tol


def select_central_state(states):
    """The two states with the largest weight at ``m = 0``, one per quasienergy branch.

    Gauge copies (the same state shifted by whole blocks, quasienergy moved
    by a multiple of ``omega_p``) of an already chosen state are skipped.

    Raises
    ------
    DegenerateSelectionError
        If a third, unrelated state ties the second pick within 1e-12.
    """
    if len(states) < 2:
        raise InvalidInputError("need at least two states")
    central = np.array([s.weight_at(0) for s in states])
    order = np.argsort(-central, kind="stable")
    first = states[order[0]]
    rest = [n for n in order[1:] if not _is_gauge_copy(first, states[n])]
    if not rest:
        raise DegenerateSelectionError("no second branch found", candidates=(order[0],))
    second = states[rest[0]]
    for n in rest[1:]:
        if _is_gauge_copy(second, states[n]):
            continue
        if central[rest[0]] > 0 and central[rest[0]] - central[n] < 1e-12:
            raise DegenerateSelectionError(
                f"central weight {central[rest[0]]:.6g} is shared by several states",
                candidates=(int(rest[0]), int(n)),
            )
        break
    return first, second


@dataclass(frozen=True, eq=False)
class TailProfile:
    """Weight of a Floquet state per harmonic, split by spin component."""

    m: np.ndarray
    weight_up: np.ndarray
    weight_down: np.ndarray

    @property
    def weight(self):
        return self.weight_up + self.weight_down

    def at(self, m):
        idx = np.searchsorted(self.m, m)
        if idx >= len(self.m) or self.m[idx] != m:
            raise KeyError(m)
        return float(self.weight[idx])

    def __iter__(self):
        return iter(zip(self.m.tolist(), self.weight.tolist()))

    def __len__(self):
        return len(self.m)


def tail_profile(state):
    N = state.trunc_N
    p = np.abs(state.blocks) ** 2
    return TailProfile(np.arange(-N, N + 1), p[:, 0], p[:, 1])


class TailFit(tuple):
    """``(exponent, residual)`` of a log-log tail fit."""

    __slots__ = ()

    def __new__(cls, exponent, residual):
        return super().__new__(cls, (exponent, residual))

    @property
    def exponent(self):
        return self[0]

    @property
    def residual(self):
        return self[1]


def _profile_arrays(profile):
    if isinstance(profile, TailProfile):
        return profile.m, profile.weight
    pairs = np.asarray(list(profile), dtype=float)
    return pairs[:, 0].astype(int), pairs[:, 1]


def fit_tail_exponent(profile, m_lo, m_hi):
    """Exponent ``x`` of ``weight ~ |m|^-x`` fitted over ``m_lo <= |m| <= m_hi``.

    Weights at ``+m`` and ``-m`` are averaged when both are present. The
    residual is the RMS deviation of ``log(weight)`` from the fitted line.
    """
    if not (1 <= m_lo < m_hi):
        raise InvalidWindowError("require 1 <= m_lo < m_hi")
    if m_hi - m_lo + 1 < 4:
        raise InvalidWindowError("fit window needs at least 4 points")
    ms, w = _profile_arrays(profile)
    lookup = dict(zip(ms.tolist(), w.tolist()))
    xs, ys = [], []
    for m in range(m_lo, m_hi + 1):
        vals = [lookup[k] for k in (m, -m) if k in lookup]
        if not vals:
            raise InvalidWindowError(f"harmonic {m} is outside the profile")
        val = float(np.mean(vals))
        if not val > 0:
            raise InvalidWindowError(f"zero weight at m={m}")
        xs.append(math.log(m))
        ys.append(math.log(val))
    coef, res, *_ = np.polyfit(xs, ys, 1, full=True)
    rms = math.sqrt(float(res[0]) / len(xs)) if len(res) else 0.0
    return TailFit(float(-coef[0]), rms)


def weight_beyond(profile, M):
    """Integrated weight at ``|m| > M``."""
    ms, w = _profile_arrays(profile)
    return float(np.sum(w[np.abs(ms) > M]))


def write_profile_csv(path, profile):
    """Export as ``m,weight_up,weight_down,weight_total`` CSV."""
    rows = np.column_stack([profile.m, profile.weight_up, profile.weight_down, profile.weight])
    write_csv(path, ["m", "weight_up", "weight_down", "weight_total"], rows)
    return path


@dataclass(frozen=True, eq=False)
class FloquetDecomposition:
    """Expansion ``psi(t) = sum_n c_n exp(-i mu_n t) phi_n(t)``.

    ``basis="central"`` keeps one representative per quasienergy branch and
    ``c_n = <phi_n(0)|psi0>``. ``basis="full"`` embeds ``psi0`` at ``m = 0`` and
    projects on every ladder eigenstate, ``c_n = <phi_n(m=0)|psi0>``.
    """

    states: tuple
    coefficients: np.ndarray
    basis: str
    reconstruction_error: float


def decompose(states, initial=None, basis="central"):
    """Expand ``initial`` (default ``|down>``) on Floquet states."""
    if initial is None:
        initial = SpinState.down()
    psi0 = initial.vector
    if basis == "central":
        chosen = select_central_state(states)
        phi0 = np.array([s.blocks.sum(axis=0) for s in chosen])
        coeffs = phi0.conj() @ psi0
        err = float(np.linalg.norm(coeffs @ phi0 - psi0))
    elif basis == "full":
        chosen = tuple(states)
        N = chosen[0].trunc_N
        central = np.array([s.blocks[N] for s in chosen])
        coeffs = central.conj() @ psi0
        err = float(np.linalg.norm(coeffs @ central - psi0))
    else:
        raise InvalidInputError(f"unknown basis {basis!r}")
    return FloquetDecomposition(tuple(chosen), coeffs, basis, err)


def reconstruct_trace(decomp, omega_p, t_grid):
    """``s_z(t)`` from the Floquet expansion on a uniform time grid."""
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) < 2:
        raise InvalidInputError("t_grid must be a 1-d grid with at least two points")
    dt = float(t[1] - t[0])
    if not dt > 0 or not np.allclose(np.diff(t), dt, rtol=1e-9, atol=1e-12):
        raise InvalidInputError("t_grid must be uniform and increasing")
    if decomp.reconstruction_error > 1e-6:
        warnings.warn(
            f"initial state reproduced only to {decomp.reconstruction_error:.2e}; "
            "increase trunc_N",
            TruncationWarning,
            stacklevel=2,
        )
    N = decomp.states[0].trunc_N
    m = np.arange(-N, N + 1)
    mu = np.array([s.quasienergy for s in decomp.states])
    blocks = np.stack([s.blocks for s in decomp.states])  # (n, D, 2)
    weighted = decomp.coefficients[:, None, None] * blocks
    psi = np.empty((len(t), 2), dtype=complex)
    # Chunk over time to bound the (t, m) phase matrix.
    chunk = max(1, 2_000_000 // max(1, len(m) * len(mu)))
    for start in range(0, len(t), chunk):
        tt = t[start:start + chunk]
        harm = np.exp(1j * omega_p * np.outer(tt, m))          # (t, D)
        evol = np.exp(-1j * np.outer(tt, mu))                  # (t, n)
        psi[start:start + chunk] = np.einsum("tm,nms,tn->ts", harm, weighted, evol)
    sz = np.abs(psi[:, 0]) ** 2 - np.abs(psi[:, 1]) ** 2
    return TimeSeries(float(t[0]), dt, sz)


@dataclass(eq=False)
class QuasienergyScan:
    """Folded quasienergy pairs over an ``(alpha, h_sum)`` grid.

    Within each alpha the two branches are ordered by continuity in
    ``h_sum``; ``folded_gap`` is the distance between them on the circle of
    circumference ``omega_p``.
    """

    omega_p: float
    rows: list = field(default_factory=list)

    def as_array(self):
        return np.array([[r["alpha"], r["h_sum"], r["mu1"], r["mu2"], r["folded_gap"]]
                         for r in self.rows], dtype=float)

    def failures(self):
        return [r for r in self.rows if r["status"] != "ok"]

    def crossings(self, tol=None):
        """Grid locations where the folded branches meet.

        A crossing is reported where the signed gap changes sign between
        neighbouring ``h_sum`` points while staying small (not a wrap at
        the zone edge), or where the gap itself falls below ``tol``.
        """
        if tol is None:
            tol = 1e-6 * self.omega_p
        out = []
        for alpha in sorted({r["alpha"] for r in self.rows}):
            rows = [r for r in self.rows if r["alpha"] == alpha and r["status"] == "ok"]
            signed = [fold_quasienergy(r["mu1"] - r["mu2"], self.omega_p) for r in rows]
            for i, r in enumerate(rows):
                if abs(signed[i]) < tol:
                    out.append({"alpha": alpha, "h_sum": r["h_sum"], "gap": abs(signed[i])})
                elif i > 0 and signed[i - 1] * signed[i] < 0 and \
                        max(abs(signed[i - 1]), abs(signed[i])) < self.omega_p / 4:
                    a, b = signed[i - 1], signed[i]
                    h = rows[i - 1]["h_sum"] + (r["h_sum"] - rows[i - 1]["h_sum"]) * a / (a - b)
                    out.append({"alpha": alpha, "h_sum": h, "gap": 0.0})
        return out

    def max_jump(self):
        """Largest circular step of either branch between adjacent ``h_sum`` points."""
        worst = 0.0
        for alpha in sorted({r["alpha"] for r in self.rows}):
            rows = [r for r in self.rows if r["alpha"] == alpha and r["status"] == "ok"]
            for a, b in zip(rows, rows[1:]):
                for key in ("mu1", "mu2"):
                    step = abs(fold_quasienergy(b[key] - a[key], self.omega_p))
                    worst = max(worst, step)
        return worst

    def write_csv(self, path):
        """Export as ``alpha,h_sum,mu1,mu2,folded_gap`` CSV (successful points only)."""
        ok = [r for r in self.rows if r["status"] == "ok"]
        rows = [[r["alpha"], r["h_sum"], r["mu1"], r["mu2"], r["folded_gap"]] for r in ok]
        write_csv(path, ["alpha", "h_sum", "mu1", "mu2", "folded_gap"], rows)
        return path


def _circ(a, b, omega_p):
    return abs(fold_quasienergy(a - b, omega_p))


def quasienergy_scan(params, spec_template, alphas, h_sums, trunc_N=None):
    """Folded central-zone quasienergies for every ``(alpha, h_sum)`` pair."""
    alphas = list(alphas)
    h_sums = list(h_sums)
    if not alphas or not h_sums:
        raise InvalidInputError("parameter grids must be nonempty")
    wp = spec_template.omega_p
    scan = QuasienergyScan(wp)
    for alpha in alphas:
        prev = None
        for h in h_sums:
            row = {"alpha": float(alpha), "h_sum": float(h)}
            try:
                spec = spec_template.replace(alpha=float(alpha), h_sum=float(h))
                states = diagonalize(build_ladder(params, spec, trunc_N))
                a, b = select_central_state(states)
                pair = [fold_quasienergy(a.quasienergy, wp), fold_quasienergy(b.quasienergy, wp)]
                if prev is None:
                    pair.sort()
                else:
                    direct = _circ(pair[0], prev[0], wp) + _circ(pair[1], prev[1], wp)
                    swapped = _circ(pair[1], prev[0], wp) + _circ(pair[0], prev[1], wp)
                    if swapped < direct:
                        pair.reverse()
                prev = pair
                row.update(mu1=pair[0], mu2=pair[1],
                           folded_gap=_circ(pair[0], pair[1], wp), status="ok")
            except Exception as exc:  # per-point failures are reported, not raised
                row.update(mu1=math.nan, mu2=math.nan, folded_gap=math.nan,
                           status=f"{type(exc).__name__}: {exc}")
            scan.rows.append(row)
    return scan


@dataclass(frozen=True, eq=False)
class CutoffScan:
    """Cutoff-peak diagnostics of the central state for a series of cutoffs at fixed ``h0``."""

    alpha: float
    Ms: np.ndarray
    weight_beyond: np.ndarray
    peak_ratio: np.ndarray

    def slope(self):
        """Log-log slope of the integrated weight beyond ``M`` versus ``M``."""
        return float(np.polyfit(np.log(self.Ms), np.log(self.weight_beyond), 1)[0])


def cutoff_scan(params, h0, alpha, Ms, omega_p, trunc_N=None):
    """Central-state weight beyond the cutoff and peak sharpness ``w(M)/w(M+3)``.

    The base amplitude ``h0`` is held fixed so that only the cutoff changes.
    """
    beyond, ratio = [], []
    for M in Ms:
        spec = DriveSpec.from_base_amplitude(h0, alpha, int(M), omega_p)
        N = default_trunc_N(M) if trunc_N is None else trunc_N
        first, _ = select_central_state(diagonalize(build_ladder(params, spec, N)))
        prof = tail_profile(first)
        beyond.append(weight_beyond(prof, M))
        ratio.append(_symmetric(prof, M) / _symmetric(prof, M + 3))
    return CutoffScan(float(alpha), np.asarray(Ms, dtype=float), np.array(beyond), np.array(ratio))


def _symmetric(profile, m):
    return 0.5 * (profile.at(m) + profile.at(-m))
