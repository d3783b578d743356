"""Deterministic, seeded construction of every bath family.

Random builders draw from numpy's PCG64 generator with an explicit
64-bit seed; one independent stream per builder call, so identical
parameters and seed reproduce the mode list bit-for-bit on any platform.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .circuit import CircuitSpec, dispersion_table
from .core import BathKind, BathSpec

__all__ = [
    "RNG_ALGORITHM",
    "TransmissionLineParams",
    "UniformTLSParams",
    "DegenerateTLSParams",
    "build_transmission_line_bath",
    "build_jj_array_bath",
    "build_uniform_tls_bath",
    "build_degenerate_tls_bath",
    "density_at",
    "gamma_max_for_rate",
    "write_bath_csv",
    "read_bath_csv",
]

RNG_ALGORITHM = "numpy-pcg64"


def _rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(0 if seed is None else seed))


@dataclass(frozen=True)
class TransmissionLineParams:
    """Equally spaced modes omega_k = k*delta_omega with couplings g*sqrt(k)."""

    delta_omega: float
    g: float
    n_modes: int

    def __post_init__(self) -> None:
        if not self.delta_omega > 0:
            raise ValueError("delta_omega must be > 0")
        if self.g < 0:
            raise ValueError("g must be >= 0")
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")


@dataclass(frozen=True)
class UniformTLSParams:
    """TLS energies uniform on [omega_min, omega_max], couplings uniform on [0, gamma_max].

    Exactly one of ``gamma0`` (target overall relaxation rate) or
    ``gamma_max`` must be given; gamma0 is inverted to gamma_max through
    the band-average density (see :func:`gamma_max_for_rate`).
    """

    n_tls: int
    omega_min: float = 0.0
    omega_max: float = 2.0
    gamma0: Optional[float] = None
    gamma_max: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.n_tls < 1:
            raise ValueError("n_tls must be >= 1")
        if not (0 <= self.omega_min < self.omega_max):
            raise ValueError("need 0 <= omega_min < omega_max")
        if (self.gamma0 is None) == (self.gamma_max is None):
            raise ValueError("exactly one of gamma0 or gamma_max must be set")
        bound = self.gamma0 if self.gamma0 is not None else self.gamma_max
        if bound < 0:
            raise ValueError("coupling target must be >= 0")


@dataclass(frozen=True)
class DegenerateTLSParams:
    """All TLS energies at (1-r)*Omega; random couplings rescaled to hit lambda0."""

    n_tls: int
    r: float
    lambda0: float
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.n_tls < 1:
            raise ValueError("n_tls must be >= 1")
        if not self.lambda0 > 0:
            raise ValueError("lambda0 must be > 0")


def build_transmission_line_bath(params: TransmissionLineParams) -> BathSpec:
    """Multimode-resonator bath: (k*delta_omega, g*sqrt(k)) for k = 1..N."""
    k = np.arange(1, params.n_modes + 1, dtype=float)
    return BathSpec(
        omega=k * params.delta_omega,
        gamma=params.g * np.sqrt(k),
        builder_kind=BathKind.TRANSMISSION_LINE,
    )


def build_jj_array_bath(circuit: CircuitSpec, g: float, max_modes: int) -> BathSpec:
    """Bath built from the array's dressed mode frequencies.

    Couplings keep the transmission-line form gamma_n = g*sqrt(n); the
    array supplies only the frequencies, which all lie below omega_p.
    ``max_modes`` beyond the junction count truncates at N with a warning.
    """
    if g < 0:
        raise ValueError("g must be >= 0")
    if max_modes < 1:
        raise ValueError("max_modes must be >= 1")
    notes: tuple[str, ...] = ()
    if max_modes > circuit.N:
        msg = f"max_modes={max_modes} exceeds junction count N={circuit.N}; truncated"
        warnings.warn(msg)
        notes = (msg,)
        max_modes = circuit.N
    table = dispersion_table(circuit, max_modes)
    return BathSpec(
        omega=table.omega_n,
        gamma=g * np.sqrt(table.n.astype(float)),
        builder_kind=BathKind.JJ_ARRAY,
        warnings=notes,
    )


def gamma_max_for_rate(gamma0: float, n_tls: int, omega_min: float, omega_max: float) -> float:
    """Invert Gamma0 = 2 pi nu0 <Lambda0^2> / N to the coupling ceiling.

    Uses the band-average density nu0 = N/(omega_max - omega_min) and
    E[Lambda0^2] = N gamma_max^2 / 3 for couplings uniform on [0, gamma_max];
    for the default band [0, 2*Omega] this is sqrt(3*Omega*Gamma0/(pi*N)).
    """
    width = omega_max - omega_min
    return math.sqrt(3.0 * gamma0 * width / (2.0 * math.pi * n_tls))


def build_uniform_tls_bath(params: UniformTLSParams) -> BathSpec:
    """Distributed TLS ensemble; deterministic under the seed."""
    if params.gamma_max is not None:
        gmax = params.gamma_max
    else:
        gmax = gamma_max_for_rate(
            params.gamma0, params.n_tls, params.omega_min, params.omega_max
        )
    rng = _rng(params.seed)
    omega = rng.uniform(params.omega_min, params.omega_max, params.n_tls)
    gamma = rng.uniform(0.0, gmax, params.n_tls) if gmax > 0 else np.zeros(params.n_tls)
    return BathSpec(
        omega=omega,
        gamma=gamma,
        builder_kind=BathKind.UNIFORM_TLS,
        seed=0 if params.seed is None else params.seed,
    )


def build_degenerate_tls_bath(params: DegenerateTLSParams) -> BathSpec:
    """Equal-energy (possibly detuned) TLS ensemble.

    omega_i = (1-r)*Omega for every mode; couplings are drawn uniform on
    [0, 1] and rescaled by one factor so sum gamma_i^2 = lambda0^2
    exactly, which makes comparisons against the oscillatory closed form
    tight rather than statistical.  r > 1 yields negative energies; they
    are accepted but flagged.
    """
    rng = _rng(params.seed)
    raw = rng.uniform(0.0, 1.0, params.n_tls)
    ss = np.sum(raw**2)
    if ss == 0.0:
        raise ValueError("degenerate coupling draw collapsed to zero")
    gamma = raw * (params.lambda0 / math.sqrt(ss))
    omega_val = 1.0 - params.r
    notes: tuple[str, ...] = ()
    if omega_val <= 0:
        msg = f"detuning r={params.r} puts all bath energies at or below zero"
        warnings.warn(msg)
        notes = (msg,)
    return BathSpec(
        omega=np.full(params.n_tls, omega_val),
        gamma=gamma,
        builder_kind=BathKind.DEGENERATE_TLS,
        seed=0 if params.seed is None else params.seed,
        warnings=notes,
    )


def density_at(bath: BathSpec, omega: float, window: float) -> float:
    """Empirical mode density around omega: count in the window over its width.

    The window is half-open, [omega - w/2, omega + w/2), so on an equally
    spaced comb an integer-multiple window counts exactly window/spacing
    modes.
    """
    if not window > 0:
        raise ValueError("window must be > 0")
    lo = omega - 0.5 * window
    hi = omega + 0.5 * window
    count = int(np.count_nonzero((bath.omega >= lo) & (bath.omega < hi)))
    return count / window


def write_bath_csv(bath: BathSpec, path) -> None:
    """Dump modes as ``index,omega,gamma`` rows (17 significant digits)."""
    with open(path, "w", newline="") as fh:
        fh.write("index,omega,gamma\n")
        for i, (w, g) in enumerate(zip(bath.omega, bath.gamma), start=1):
            fh.write(f"{i},{w:.17g},{g:.17g}\n")


def read_bath_csv(path) -> BathSpec:
    """Load a custom bath from an ``index,omega,gamma`` CSV."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    data = np.atleast_1d(data)
    return BathSpec(
        omega=np.asarray(data["omega"], dtype=float),
        gamma=np.asarray(data["gamma"], dtype=float),
        builder_kind=BathKind.CUSTOM,
    )
