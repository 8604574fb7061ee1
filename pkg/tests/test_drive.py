import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from floquet_lattice import DriveSpec, InvalidInputError, base_amplitude, harmonics
from floquet_lattice.drive import (
    averaged_drive,
    drive_area,
    sample_discretized,
    synthesize,
    write_pulse_csv,
)
from floquet_lattice._io import read_csv

from reference_params import H_SUM, OMEGA_P, TAU

specs = st.builds(
    DriveSpec,
    h_sum=st.floats(0.1, 20.0),
    alpha=st.floats(0.0, 3.0),
    cutoff_M=st.integers(0, 30),
    omega_p=st.floats(0.5, 5.0),
)


def test_base_amplitude_flat_spectrum():
    spec = DriveSpec(H_SUM, 0.0, 5, OMEGA_P)
    assert base_amplitude(spec) == pytest.approx(H_SUM / 11, rel=1e-14)


def test_base_amplitude_single_harmonic():
    assert base_amplitude(DriveSpec(3.7, 1.3, 0, OMEGA_P)) == 3.7


def test_base_amplitude_alpha_one():
    # 1 + 2*(1/2 + 1/3) = 8/3
    assert base_amplitude(DriveSpec(2.0, 1.0, 2, OMEGA_P)) == pytest.approx(3 * 2.0 / 8, rel=1e-14)


@given(specs)
def test_harmonics_sum_to_h_sum(spec):
    h0 = base_amplitude(spec)
    direct = sum(h0 * (1 + abs(m)) ** -spec.alpha for m in range(-spec.cutoff_M, spec.cutoff_M + 1))
    assert direct == pytest.approx(spec.h_sum, rel=1e-12)
    assert harmonics(spec).total() == pytest.approx(spec.h_sum, rel=1e-12)


def test_harmonics_entries():
    spec = DriveSpec(H_SUM, 1.0, 2, OMEGA_P)
    h0 = base_amplitude(spec)
    spectrum = harmonics(spec)
    np.testing.assert_allclose(spectrum.full(), [h0 / 3, h0 / 2, h0, h0 / 2, h0 / 3], rtol=1e-15)
    assert spectrum[3] == 0.0 and spectrum[-7] == 0.0
    flat = harmonics(DriveSpec(H_SUM, 0.0, 5, OMEGA_P)).full()
    assert len(flat) == 11 and np.all(flat == flat[0])


@given(specs)
def test_spectrum_hermitian_and_nonnegative(spec):
    spectrum = harmonics(spec)
    for m in range(spec.cutoff_M + 1):
        assert spectrum[-m] == np.conj(spectrum[m])
        assert spectrum[m] >= 0


@given(st.floats(0.0, 2.0), st.floats(0.0, 2.0), st.integers(1, 20))
def test_harmonic_nonincreasing_in_alpha(a1, a2, m):
    lo, hi = sorted((a1, a2))
    # Compare at fixed h0: entry(m)/h0 = (1+m)^-alpha.
    w_lo = harmonics(DriveSpec.from_base_amplitude(1.0, lo, 20, OMEGA_P))[m]
    w_hi = harmonics(DriveSpec.from_base_amplitude(1.0, hi, 20, OMEGA_P))[m]
    assert w_hi <= w_lo * (1 + 1e-15)


@pytest.mark.parametrize("n", [-3, 0, 1, 2, 7])
def test_synthesize_equals_h_sum_at_kicks(n):
    for alpha in (0.0, 0.7, 2.0):
        spec = DriveSpec(H_SUM, alpha, 12, OMEGA_P)
        assert synthesize(spec, n * spec.period) == pytest.approx(H_SUM, rel=1e-12)


@given(specs, st.floats(-50.0, 50.0))
def test_synthesize_periodic(spec, t):
    scale = max(1.0, spec.h_sum)
    assert abs(synthesize(spec, t + spec.period) - synthesize(spec, t)) < 1e-9 * scale


def test_synthesize_constant_without_harmonics():
    spec = DriveSpec(4.2, 1.0, 0, OMEGA_P)
    np.testing.assert_array_equal(synthesize(spec, np.linspace(0, 10, 7)), 4.2)


@given(specs)
@settings(max_examples=30)
def test_synthesize_maximal_at_kick(spec):
    t = np.linspace(0, spec.period, 2001)
    assert np.max(synthesize(spec, t)) <= synthesize(spec, 0.0) * (1 + 1e-12) + 1e-12


@pytest.mark.parametrize("alpha,M", [(0.0, 5), (0.5, 10), (1.5, 30)])
def test_parseval(alpha, M):
    spec = DriveSpec(H_SUM, alpha, M, OMEGA_P)
    n = 64 * (M + 1)
    t = np.arange(n) * spec.period / n
    mean_square = np.mean(synthesize(spec, t) ** 2)  # periodic trapezoid
    assert mean_square == pytest.approx(np.sum(np.abs(harmonics(spec).full()) ** 2), rel=1e-8)


@pytest.mark.parametrize("alpha,M", [(0.0, 5), (1.0, 8)])
def test_fourier_round_trip(alpha, M):
    spec = DriveSpec(H_SUM, alpha, M, OMEGA_P)
    tau, wp = spec.period, spec.omega_p
    spectrum = harmonics(spec)
    for m in range(0, M + 2):
        re = quad(lambda t: synthesize(spec, t) * math.cos(m * wp * t), 0, tau, limit=200)[0] / tau
        im = quad(lambda t: synthesize(spec, t) * math.sin(m * wp * t), 0, tau, limit=200)[0] / tau
        if m <= M:
            assert re == pytest.approx(spectrum[m], rel=1e-8)
        else:
            assert abs(re) < 1e-8
        assert abs(im) < 1e-8


def test_drive_area_matches_quadrature():
    spec = DriveSpec(H_SUM, 0.5, 7, OMEGA_P)
    for t in (0.3, 1.7, TAU, 4.1):
        assert drive_area(spec, t) == pytest.approx(quad(lambda s: synthesize(spec, s), 0, t,
                                                         limit=200)[0], rel=1e-10)
    assert drive_area(spec, TAU) == pytest.approx(base_amplitude(spec) * TAU, rel=1e-13)


def test_averaged_drive_is_area_difference():
    spec = DriveSpec(H_SUM, 0.0, 20, OMEGA_P)
    t0 = np.linspace(0, 2 * TAU, 50)
    delta = 0.013
    expected = (drive_area(spec, t0 + delta) - drive_area(spec, t0)) / delta
    np.testing.assert_allclose(averaged_drive(spec, t0 + delta / 2, delta), expected, rtol=1e-9)


def test_sample_discretized_periodic_grid():
    spec = DriveSpec(H_SUM, 0.3, 6, OMEGA_P)
    t, values = sample_discretized(spec, spec.period, 3 * spec.period)
    assert len(values) == 4
    np.testing.assert_allclose(values, H_SUM, rtol=1e-12)
    _, const = sample_discretized(DriveSpec(2.0, 0.0, 0, OMEGA_P), 0.37, 5.0)
    np.testing.assert_array_equal(const, 2.0)


def test_sample_discretized_hardware_grid():
    spec = DriveSpec(H_SUM, 0.0, 5, OMEGA_P)
    t, values = sample_discretized(spec, 0.00022, 5 * TAU)
    assert len(values) == math.floor(5 * TAU / 0.00022) + 1
    assert 75_700 <= len(values) <= 75_800


@pytest.mark.parametrize("dt,duration", [(0.0, 1.0), (-1.0, 1.0), (0.1, 0.0)])
def test_sample_discretized_rejects(dt, duration):
    with pytest.raises(InvalidInputError):
        sample_discretized(DriveSpec(1.0, 0.0, 1, OMEGA_P), dt, duration)


@pytest.mark.parametrize("kwargs", [
    dict(h_sum=-1.0), dict(alpha=-0.1), dict(cutoff_M=-1), dict(cutoff_M=2.5),
    dict(omega_p=0.0), dict(h_sum=float("nan")),
])
def test_drive_spec_invariants(kwargs):
    base = dict(h_sum=1.0, alpha=0.0, cutoff_M=3, omega_p=1.0)
    base.update(kwargs)
    with pytest.raises(InvalidInputError):
        DriveSpec(**base)


def test_pulse_csv(tmp_path):
    spec = DriveSpec(H_SUM, 0.0, 5, OMEGA_P)
    path = write_pulse_csv(tmp_path / "pulse.csv", spec, 0.01, 1.0)
    raw = path.read_bytes()
    assert raw.startswith(b"t_us,h_x_rad_per_us\n") and b"\r" not in raw
    header, data = read_csv(path)
    t, values = sample_discretized(spec, 0.01, 1.0)
    np.testing.assert_array_equal(data[:, 0], t)
    np.testing.assert_array_equal(data[:, 1], values)  # 17 digits round-trip exactly
