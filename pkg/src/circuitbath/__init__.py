"""circuitbath: when does a purely reactive circuit act as a heat bath?

Simulates a qubit exchanging a single excitation with finite reactive
environments (transmission lines, linearized junction arrays, two-level
ensembles), computes the circuits' impedance and mode spectra, and
compares the dynamics against closed-form decay, revival and plateau
laws.
"""

__version__ = "0.1.0"

from .analytics import (
    DecayFit,
    analytic_detuned_population,
    decay_rate_line,
    decay_rate_tls,
    detect_revival,
    fit_exponential,
    long_time_plateau,
    revival_time,
    time_average,
)
from .bath import (
    DegenerateTLSParams,
    TransmissionLineParams,
    UniformTLSParams,
    build_degenerate_tls_bath,
    build_jj_array_bath,
    build_transmission_line_bath,
    build_uniform_tls_bath,
    density_at,
)
from .circuit import (
    OPEN,
    SHORT,
    CircuitSpec,
    DispersionTable,
    Termination,
    UnsupportedTermination,
    capacitive_asymptote_constant,
    dispersion,
    dispersion_table,
    find_modes,
    input_impedance,
    junction_admittance,
    junction_impedance,
    load,
)
from .core import (
    AmplitudeState,
    BathKind,
    BathSpec,
    FrequencyUnit,
    QubitSpec,
    TimeSeries,
    lambda0,
    norm_error,
)
from .dynamics import (
    EngineConfig,
    MemoryKernel,
    NumericalFailure,
    bath_populations,
    build_memory_kernel,
    evolve,
    evolve_kernel,
    resolve_dt,
)

__all__ = [
    "__version__",
    "AmplitudeState",
    "BathKind",
    "BathSpec",
    "CircuitSpec",
    "DecayFit",
    "DegenerateTLSParams",
    "DispersionTable",
    "EngineConfig",
    "FrequencyUnit",
    "MemoryKernel",
    "NumericalFailure",
    "OPEN",
    "QubitSpec",
    "SHORT",
    "Termination",
    "TimeSeries",
    "TransmissionLineParams",
    "UniformTLSParams",
    "UnsupportedTermination",
    "analytic_detuned_population",
    "bath_populations",
    "build_degenerate_tls_bath",
    "build_jj_array_bath",
    "build_memory_kernel",
    "build_transmission_line_bath",
    "build_uniform_tls_bath",
    "capacitive_asymptote_constant",
    "decay_rate_line",
    "decay_rate_tls",
    "density_at",
    "detect_revival",
    "dispersion",
    "dispersion_table",
    "evolve",
    "evolve_kernel",
    "find_modes",
    "fit_exponential",
    "input_impedance",
    "junction_admittance",
    "junction_impedance",
    "lambda0",
    "load",
    "long_time_plateau",
    "norm_error",
    "resolve_dt",
    "revival_time",
    "time_average",
]
