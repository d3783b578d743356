"""Shared unit conventions and domain types.

Internal units: hbar = 1 and the qubit angular frequency Omega = 1.
Every frequency, coupling and rate is stored in units of Omega; every
time in units of 1/Omega.  This matches the dimensionless axes used by
all downstream analytics (populations against Omega*t).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "FrequencyUnit",
    "QubitSpec",
    "BathKind",
    "BathSpec",
    "AmplitudeState",
    "TimeSeries",
    "lambda0",
    "norm_error",
]


@dataclass(frozen=True)
class FrequencyUnit:
    """Conversion between a physical frequency scale and internal units.

    ``omega_ref`` is the physical value of the qubit angular frequency;
    internally it maps to 1.  Frequencies divide by it, times multiply.
    """

    omega_ref: float

    def __post_init__(self) -> None:
        if not self.omega_ref > 0:
            raise ValueError(f"omega_ref must be > 0, got {self.omega_ref}")

    def frequency_to_internal(self, omega: float) -> float:
        return omega / self.omega_ref

    def frequency_from_internal(self, omega: float) -> float:
        return omega * self.omega_ref

    def time_to_internal(self, t: float) -> float:
        return t * self.omega_ref

    def time_from_internal(self, t: float) -> float:
        return t / self.omega_ref

    # rates scale like frequencies
    rate_to_internal = frequency_to_internal
    rate_from_internal = frequency_from_internal


@dataclass(frozen=True)
class QubitSpec:
    """The two-level system under study; omega in units of Omega."""

    omega: float = 1.0

    def __post_init__(self) -> None:
        if not self.omega > 0:
            raise ValueError(f"qubit omega must be > 0, got {self.omega}")


class BathKind(enum.Enum):
    TRANSMISSION_LINE = "line"
    JJ_ARRAY = "jj_array"
    UNIFORM_TLS = "uniform"
    DEGENERATE_TLS = "degenerate"
    CUSTOM = "custom"


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class BathSpec:
    """An ordered set of N bath modes (omega_i, gamma_i).

    Immutable after construction; arrays are read-only so a spec can be
    shared across threads.  Construction is deterministic: identical
    builder parameters and seed give element-wise identical mode lists.
    """

    omega: np.ndarray
    gamma: np.ndarray
    builder_kind: BathKind = BathKind.CUSTOM
    seed: Optional[int] = None
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega", _readonly(self.omega))
        object.__setattr__(self, "gamma", _readonly(self.gamma))
        if self.omega.ndim != 1 or self.omega.shape != self.gamma.shape:
            raise ValueError("omega and gamma must be 1-d arrays of equal length")
        if self.n_modes < 1:
            raise ValueError("a bath needs at least one mode")
        if np.any(self.gamma < 0):
            raise ValueError("couplings gamma_i must be >= 0")

    @property
    def n_modes(self) -> int:
        return self.omega.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BathSpec):
            return NotImplemented
        return (
            self.builder_kind == other.builder_kind
            and self.seed == other.seed
            and self.omega.shape == other.omega.shape
            and bool(np.all(self.omega == other.omega))
            and bool(np.all(self.gamma == other.gamma))
        )


@dataclass(frozen=True)
class AmplitudeState:
    """Single-excitation wavefunction at time t.

    ``amplitudes[0]`` is the qubit-excited amplitude, ``amplitudes[i]``
    the amplitude for the excitation sitting in bath mode i.
    """

    t: float
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        a = np.ascontiguousarray(self.amplitudes, dtype=complex)
        a.flags.writeable = False
        object.__setattr__(self, "amplitudes", a)
        if a.ndim != 1 or a.size < 1:
            raise ValueError("amplitudes must be a 1-d vector of length N+1")

    @property
    def n_modes(self) -> int:
        return self.amplitudes.size - 1

    @property
    def p_e(self) -> float:
        return float(abs(self.amplitudes[0]) ** 2)


@dataclass(frozen=True)
class TimeSeries:
    """Sampled (t, p_e, norm_error) records plus optional bath snapshots."""

    t: np.ndarray
    p_e: np.ndarray
    norm_error: np.ndarray
    snapshots: tuple[tuple[float, np.ndarray], ...] = field(default_factory=tuple)
    final_state: Optional[AmplitudeState] = None

    def __post_init__(self) -> None:
        for name in ("t", "p_e", "norm_error"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (self.t.shape == self.p_e.shape == self.norm_error.shape):
            raise ValueError("t, p_e and norm_error must have equal shape")
        if self.t.size > 1 and not np.all(np.diff(self.t) > 0):
            raise ValueError("sample times must be strictly increasing")

    def window(self, t_lo: float, t_hi: float) -> "TimeSeries":
        """Sub-series with t_lo <= t <= t_hi (snapshots dropped)."""
        m = (self.t >= t_lo) & (self.t <= t_hi)
        return TimeSeries(self.t[m], self.p_e[m], self.norm_error[m])


def lambda0(bath: BathSpec) -> float:
    """Collective coupling sqrt(sum_i gamma_i^2), in units of Omega."""
    return float(np.sqrt(np.sum(bath.gamma**2)))


def norm_error(state: AmplitudeState) -> float:
    """Deviation of the total population from 1 (unitarity diagnostic)."""
    return float(np.sum(np.abs(state.amplitudes) ** 2) - 1.0)


def lambda0_from_couplings(gamma: Sequence[float]) -> float:
    """lambda0 for a bare coupling list, without building a BathSpec."""
    g = np.asarray(gamma, dtype=float)
    return float(np.sqrt(np.sum(g**2)))
