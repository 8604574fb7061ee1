"""Periodically driven qubits as Floquet lattices with power-law hopping."""

__version__ = "0.1.0"

from .drive import (
    DriveSpec,
    HarmonicSpectrum,
    base_amplitude,
    harmonics,
    sample_discretized,
    synthesize,
)
from .dynamics import (
    QubitParams,
    SpinState,
    TimeSeries,
    evolve,
    expectation_sz,
    hamiltonian_at,
    oracle_kicked_stroboscopic,
    oracle_x_field,
    trace_sz,
)
from .errors import (
    ConfigParseError,
    ConfigValidationError,
    DegenerateSelectionError,
    FloquetLatticeError,
    InvalidInputError,
    InvalidWindowError,
    NumericalFailureError,
    TruncationWarning,
)
from .floquet import (
    build_ladder,
    decompose,
    diagonalize,
    fit_tail_exponent,
    fold_quasienergy,
    quasienergy_scan,
    reconstruct_trace,
    select_central_state,
    tail_profile,
)
from .spectral import (
    derivative_bound,
    derivative_near_tau,
    harmonic_components,
    peak_visibility,
    scaling_sweep,
)
