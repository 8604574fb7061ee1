"""Experiment orchestration: configuration, shot noise and run directories.

Configuration files are TOML with one optional table per concern::

    kind = "trace"          # trace | spectrum | eigenstate | derivative-sweep | quasienergy-scan
    out_dir = "runs/trace"
    seed = 2021
    shots = 8192            # 0 disables shot-noise emulation

    [qubit]
    omega_z = 1.5707963267948966     # rad/us

    [drive]
    h_sum = 7.5398223686155035       # rad/us
    alpha = 0.0
    cutoff_M = 5
    omega_p = 1.8849555921538759     # rad/us

    [simulation]
    t_total = 16.666666666666668     # us, default 5 periods
    n_samples = 740
    steps_per_period = 1024
    trunc_N = 40                     # default max(4 M, 40)
    pulse_dt = 0.00022               # us

    [analysis]
    m_max = 15                       # default cutoff_M + 10
    alphas = [0.0, 0.5, 1.0, 1.5]
    Ms = [16, 32, 64, 128]
    h_sum_max = 12.566370614359172   # rad/us
    h_sum_points = 200

Missing keys take the ``armonk-defaults`` preset values; unknown keys are
rejected.
"""
from __future__ import annotations

import dataclasses
import hashlib
import math
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.stats
import tomli_w

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from ._io import write_json
from .drive import DriveSpec, write_pulse_csv
from .dynamics import QubitParams, SpinState, TimeSeries, trace_sz, write_trace_csv
from .errors import ConfigParseError, ConfigValidationError, InvalidInputError
from .floquet import (
    build_ladder,
    default_fit_window,
    default_trunc_N,
    diagonalize,
    fit_tail_exponent,
    fold_quasienergy,
    quasienergy_scan,
    select_central_state,
    tail_profile,
    write_profile_csv,
)
from .spectral import harmonic_components, peak_visibility, scaling_sweep, write_harmonics_csv

__all__ = [
    "KINDS",
    "PRESETS",
    "ExperimentConfig",
    "RunManifest",
    "preset_config",
    "load_config",
    "loads_config",
    "dumps_config",
    "save_config",
    "emulate_shots",
    "run",
]

KINDS = ("trace", "spectrum", "eigenstate", "derivative-sweep", "quasienergy-scan")

TWO_PI = 2 * math.pi

PRESETS = {
    "armonk-defaults": {
        "kind": "trace",
        "out_dir": "runs/armonk-defaults",
        "seed": 2021,
        "shots": 8192,
        "qubit": {"omega_z": TWO_PI * 0.25},
        "drive": {"h_sum": TWO_PI * 1.2, "alpha": 0.0, "cutoff_M": 5, "omega_p": TWO_PI * 0.3},
        "simulation": {
            "t_total": None,
            "n_samples": 740,
            "steps_per_period": 1024,
            "trunc_N": None,
            "pulse_dt": 0.00022,
        },
        "analysis": {
            "m_max": None,
            "alphas": [0.0, 0.5, 1.0, 1.5],
            "Ms": [16, 32, 64, 128],
            "h_sum_max": TWO_PI * 2.0,
            "h_sum_points": 200,
        },
    }
}

_TOP = ("kind", "out_dir", "seed", "shots")
_SECTIONS = ("qubit", "drive", "simulation", "analysis")

_TYPES = {
    "kind": str, "out_dir": str, "seed": int, "shots": int,
    "omega_z": float, "h_sum": float, "alpha": float, "cutoff_M": int, "omega_p": float,
    "t_total": float, "n_samples": int, "steps_per_period": int, "trunc_N": int,
    "pulse_dt": float, "m_max": int, "alphas": [float], "Ms": [int],
    "h_sum_max": float, "h_sum_points": int,
}


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    qubit: QubitParams
    drive: DriveSpec
    trunc_N: int
    t_total: float
    n_samples: int
    steps_per_period: int
    shots: int
    seed: int
    out_dir: str
    pulse_dt: float
    m_max: int
    alphas: tuple
    Ms: tuple
    h_sum_max: float
    h_sum_points: int

    def __post_init__(self):
        def need(cond, msg):
            if not cond:
                raise ConfigValidationError(msg)

        need(self.kind in KINDS, f"kind must be one of {', '.join(KINDS)}")
        need(self.trunc_N >= self.drive.cutoff_M, "trunc_N must be ≥ cutoff_M")
        need(self.t_total > 0, "t_total must be > 0")
        need(self.n_samples >= 2, "n_samples must be ≥ 2")
        need(self.steps_per_period >= 1, "steps_per_period must be ≥ 1")
        need(self.shots >= 0, "shots must be ≥ 0")
        need(self.seed >= 0, "seed must be ≥ 0")
        need(self.pulse_dt > 0, "pulse_dt must be > 0")
        need(self.m_max >= 1, "m_max must be ≥ 1")
        need(len(self.alphas) > 0 and all(a >= 0 for a in self.alphas),
             "alphas must be a nonempty list of values ≥ 0")
        need(len(self.Ms) > 0 and all(M >= 1 for M in self.Ms)
             and all(a < b for a, b in zip(self.Ms, self.Ms[1:])),
             "Ms must be a nonempty ascending list of positive integers")
        need(self.h_sum_max > 0, "h_sum_max must be > 0")
        need(self.h_sum_points >= 2, "h_sum_points must be ≥ 2")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        """Nested mapping in the file layout (all defaults resolved)."""
        return {
            "kind": self.kind,
            "out_dir": self.out_dir,
            "seed": self.seed,
            "shots": self.shots,
            "qubit": {"omega_z": self.qubit.omega_z},
            "drive": {
                "h_sum": self.drive.h_sum,
                "alpha": self.drive.alpha,
                "cutoff_M": self.drive.cutoff_M,
                "omega_p": self.drive.omega_p,
            },
            "simulation": {
                "t_total": self.t_total,
                "n_samples": self.n_samples,
                "steps_per_period": self.steps_per_period,
                "trunc_N": self.trunc_N,
                "pulse_dt": self.pulse_dt,
            },
            "analysis": {
                "m_max": self.m_max,
                "alphas": list(self.alphas),
                "Ms": list(self.Ms),
                "h_sum_max": self.h_sum_max,
                "h_sum_points": self.h_sum_points,
            },
        }


def _coerce(key, value):
    kind = _TYPES[key]
    if isinstance(kind, list):
        if not isinstance(value, list):
            raise ConfigValidationError(f"{key} must be a list")
        return tuple(_coerce_scalar(key, v, kind[0]) for v in value)
    return _coerce_scalar(key, value, kind)


def _coerce_scalar(key, value, kind):
    if kind is str:
        if not isinstance(value, str):
            raise ConfigValidationError(f"{key} must be a string")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValidationError(f"{key} must be a number")
    if kind is int:
        if int(value) != value:
            raise ConfigValidationError(f"{key} must be an integer")
        return int(value)
    if not math.isfinite(value):
        raise ConfigValidationError(f"{key} must be finite")
    return float(value)


def _merge(raw, preset):
    """Flatten ``raw`` over the preset, rejecting unknown tables and keys."""
    flat = {k: preset[k] for k in _TOP}
    for section in _SECTIONS:
        flat.update(preset[section])
    for key, value in raw.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigParseError(f"[{key}] must be a table", key=key)
            for sub, subval in value.items():
                if sub not in preset[key]:
                    raise ConfigParseError(f"unknown key {key}.{sub!s}", key=f"{key}.{sub}")
                flat[sub] = _coerce(sub, subval)
        elif key in _TOP:
            flat[key] = _coerce(key, value)
        else:
            raise ConfigParseError(f"unknown key {key!s}", key=key)
    return flat


def _build(flat):
    try:
        qubit = QubitParams(flat["omega_z"])
        drive = DriveSpec(flat["h_sum"], flat["alpha"], flat["cutoff_M"], flat["omega_p"])
    except InvalidInputError as exc:
        raise ConfigValidationError(str(exc)) from exc
    M = drive.cutoff_M
    return ExperimentConfig(
        kind=flat["kind"],
        qubit=qubit,
        drive=drive,
        trunc_N=flat["trunc_N"] if flat["trunc_N"] is not None else default_trunc_N(M),
        t_total=flat["t_total"] if flat["t_total"] is not None else 5 * drive.period,
        n_samples=flat["n_samples"],
        steps_per_period=flat["steps_per_period"],
        shots=flat["shots"],
        seed=flat["seed"],
        out_dir=flat["out_dir"],
        pulse_dt=flat["pulse_dt"],
        m_max=flat["m_max"] if flat["m_max"] is not None else M + 10,
        alphas=tuple(flat["alphas"]),
        Ms=tuple(flat["Ms"]),
        h_sum_max=flat["h_sum_max"],
        h_sum_points=flat["h_sum_points"],
    )


def preset_config(name="armonk-defaults"):
    if name not in PRESETS:
        raise ConfigParseError(f"unknown preset {name!r}", key=name)
    return loads_config("", preset=name)


def loads_config(text, preset="armonk-defaults"):
    """Parse TOML text into a validated :class:`ExperimentConfig`."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        match = re.search(r"line (\d+)", str(exc))
        raise ConfigParseError(
            f"cannot parse config: {exc}", line=int(match.group(1)) if match else None
        ) from exc
    if preset not in PRESETS:
        raise ConfigParseError(f"unknown preset {preset!r}", key=preset)
    return _build(_merge(raw, PRESETS[preset]))


def load_config(path, preset="armonk-defaults"):
    """Load and validate a config file; an empty file yields the preset."""
    return loads_config(Path(path).read_text(encoding="utf-8"), preset=preset)


def dumps_config(config):
    return tomli_w.dumps(config.to_dict())


def save_config(config, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_config(config))
    return path


def emulate_shots(series, shots, seed):
    """Replace each ``s_z`` by its estimate from ``shots`` projective measurements.

    For every sample, ``k ~ Binomial(shots, (1 + s_z)/2)`` is drawn by
    inverse-CDF from a PCG64 uniform stream seeded with ``seed``; the result
    is ``2k/shots - 1``.
    """
    if int(shots) != shots or shots < 1:
        raise InvalidInputError("shots must be a positive integer")
    v = np.asarray(series.values, dtype=float)
    if np.any(np.abs(v) > 1 + 1e-9):
        raise InvalidInputError("s_z values must lie in [-1, 1]")
    p = (1.0 + np.clip(v, -1.0, 1.0)) / 2.0
    u = np.random.Generator(np.random.PCG64(seed)).random(len(v))
    k = scipy.stats.binom.ppf(u, int(shots), p)
    return TimeSeries(series.t0, series.dt, 2.0 * k / shots - 1.0)


@dataclass
class RunManifest:
    config: dict
    version: str
    duration_s: float = 0.0
    files: dict = field(default_factory=dict)
    status: str = "ok"
    errors: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.status == "ok"

    def to_dict(self):
        return dataclasses.asdict(self)


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _alpha_tag(alpha):
    return f"{alpha:g}"


def _run_trace(cfg, out):
    series = trace_sz(cfg.qubit, cfg.drive, SpinState.down(), cfg.t_total, cfg.n_samples,
                      cfg.steps_per_period)
    files = [write_trace_csv(out / "trace.csv", series),
             write_pulse_csv(out / "pulse.csv", cfg.drive, cfg.pulse_dt, cfg.t_total)]
    summary = {"s_z_final": float(series.values[-1]), "n_samples": len(series)}
    if cfg.shots:
        noisy = emulate_shots(series, cfg.shots, cfg.seed)
        files.append(write_trace_csv(out / "trace_shots.csv", noisy))
        rms = float(np.sqrt(np.mean((noisy.values - series.values) ** 2)))
        predicted = float(np.sqrt(np.mean((1 - series.values ** 2) / cfg.shots)))
        summary.update(shot_rms=rms, shot_rms_predicted=predicted)
    return files, summary


def _run_spectrum(cfg, out):
    files, vis = [], {}
    M = cfg.drive.cutoff_M
    for i, alpha in enumerate(cfg.alphas):
        spec = cfg.drive.replace(alpha=alpha)
        series = trace_sz(cfg.qubit, spec, SpinState.down(), cfg.t_total, cfg.n_samples,
                          cfg.steps_per_period)
        comps = harmonic_components(series, spec.omega_p, cfg.m_max)
        files.append(write_harmonics_csv(out / f"spectrum_alpha{_alpha_tag(alpha)}.csv", comps))
        entry = {}
        if cfg.m_max >= M + 3:
            entry["visibility"] = peak_visibility(comps, M)
        if cfg.shots:
            noisy = emulate_shots(series, cfg.shots, cfg.seed + i)
            noisy_comps = harmonic_components(noisy, spec.omega_p, cfg.m_max)
            files.append(write_harmonics_csv(
                out / f"spectrum_shots_alpha{_alpha_tag(alpha)}.csv", noisy_comps))
            if cfg.m_max >= M + 3:
                entry["visibility_shots"] = peak_visibility(noisy_comps, M)
        vis[_alpha_tag(alpha)] = entry
    return files, {"cutoff_M": M, "per_alpha": vis}


def _run_eigenstate(cfg, out):
    states = diagonalize(build_ladder(cfg.qubit, cfg.drive, cfg.trunc_N))
    pair = select_central_state(states)
    files, info = [], []
    M, N = cfg.drive.cutoff_M, cfg.trunc_N
    for k, state in enumerate(pair):
        prof = tail_profile(state)
        files.append(write_profile_csv(out / f"profile_state{k}.csv", prof))
        entry = {
            "quasienergy": state.quasienergy,
            "folded": fold_quasienergy(state.quasienergy, cfg.drive.omega_p),
            "weight_m0": state.weight_at(0),
        }
        lo, hi = default_fit_window(M, N)
        if hi - lo + 1 >= 4:
            fit = fit_tail_exponent(prof, lo, hi)
            entry.update(tail_exponent=fit.exponent, tail_residual=fit.residual,
                         fit_window=[lo, hi])
        if 0 < M and M + 3 <= N:
            entry["peak_ratio"] = prof.at(M) / prof.at(M + 3)
        info.append(entry)
    return files, {"states": info, "trunc_N": N}


def _run_sweep(cfg, out):
    scan = scaling_sweep(cfg.qubit, cfg.drive, cfg.alphas, cfg.Ms)
    files = [scan.write_csv(out / "sweep.csv"), scan.write_report(out / "scaling_report.json")]
    summary = {"h0": scan.h0, "failed_points": len(scan.errors)}
    if scan.errors:
        raise RuntimeError(f"{len(scan.errors)} sweep points failed: {scan.errors}")
    return files, summary


def _run_scan(cfg, out):
    h_sums = np.linspace(0.0, cfg.h_sum_max, cfg.h_sum_points)
    scan = quasienergy_scan(cfg.qubit, cfg.drive, cfg.alphas, h_sums, cfg.trunc_N)
    files = [scan.write_csv(out / "scan.csv")]
    summary = {"crossings": scan.crossings(), "max_jump": scan.max_jump(),
               "failed_points": len(scan.failures())}
    if scan.failures():
        raise RuntimeError(f"{len(scan.failures())} scan points failed")
    return files, summary


_PROTOCOLS = {
    "trace": _run_trace,
    "spectrum": _run_spectrum,
    "eigenstate": _run_eigenstate,
    "derivative-sweep": _run_sweep,
    "quasienergy-scan": _run_scan,
}


def run(config):
    """Execute the configured protocol and write its files plus ``manifest.json``.

    Files emitted before a failure are kept and listed; the manifest status
    is ``"failed"`` with the stage named in ``errors``.
    """
    start = time.perf_counter()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(config=config.to_dict(), version=__version__)
    try:
        files, summary = _PROTOCOLS[config.kind](config, out)
        manifest.summary = summary
    except Exception as exc:
        files = [p for p in sorted(out.iterdir()) if p.name != "manifest.json"]
        manifest.status = "failed"
        manifest.errors.append({"stage": config.kind, "error": f"{type(exc).__name__}: {exc}"})
    manifest.files = {Path(p).name: _sha256(p) for p in files}
    manifest.duration_s = time.perf_counter() - start
    write_json(out / "manifest.json", manifest.to_dict())
    return manifest
