"""Impedance, dispersion and mode spectrum of the linearized junction array.

The array is a ladder of N identical cells: a series junction (inductor L
shunted by capacitance C, i.e. a parallel LC) followed by a capacitance Cg
from the island to ground.  The drive port sees a junction first; the
termination (open, short, or a lumped load) is applied after the last
shunt.  With C = 0 the circuit reduces exactly to a plain L-Cg
transmission line.

The ladder recursion is carried in homogeneous coordinates Z = A/B so
that genuine poles of a lossless network are represented exactly (B -> 0)
instead of overflowing.  For open/short terminations A and B stay purely
real/imaginary in alternation, so Re Z is exactly zero up to IEEE signed
zeros: the network is lossless by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

__all__ = [
    "Termination",
    "OPEN",
    "SHORT",
    "load",
    "CircuitSpec",
    "DispersionTable",
    "UnsupportedTermination",
    "junction_admittance",
    "junction_impedance",
    "input_impedance",
    "dispersion",
    "dispersion_table",
    "find_modes",
    "capacitive_asymptote_constant",
]


class UnsupportedTermination(ValueError):
    """Raised when an operation needs an open or short termination."""


@dataclass(frozen=True)
class Termination:
    kind: str  # "open" | "short" | "load"
    z_load: complex = 0j

    def __post_init__(self) -> None:
        if self.kind not in ("open", "short", "load"):
            raise ValueError(f"unknown termination kind {self.kind!r}")


OPEN = Termination("open")
SHORT = Termination("short")


def load(z_load: complex) -> Termination:
    """Lumped-impedance termination."""
    return Termination("load", complex(z_load))


@dataclass(frozen=True)
class CircuitSpec:
    """Uniform array of N linearized junctions with per-island ground capacitance."""

    L: float
    C: float
    Cg: float
    N: int
    termination: Termination = OPEN

    def __post_init__(self) -> None:
        if not self.L > 0:
            raise ValueError(f"L must be > 0, got {self.L}")
        if not self.Cg > 0:
            raise ValueError(f"Cg must be > 0, got {self.Cg}")
        if self.C < 0:
            raise ValueError(f"C must be >= 0, got {self.C}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")

    @property
    def omega_p(self) -> float:
        """Junction plasma frequency 1/sqrt(LC); infinite for C = 0."""
        return math.inf if self.C == 0 else 1.0 / math.sqrt(self.L * self.C)

    @property
    def z_inf(self) -> float:
        """Junction impedance scale sqrt(L/C); infinite for C = 0."""
        return math.inf if self.C == 0 else math.sqrt(self.L / self.C)

    @property
    def bare_mode_spacing(self) -> float:
        """Low-frequency spacing pi/(N sqrt(L Cg)) of the bare mode comb."""
        return math.pi / (self.N * math.sqrt(self.L * self.Cg))


def _check_positive_omega(omega: np.ndarray) -> None:
    if np.any(omega <= 0):
        raise ValueError("omega must be > 0")


def junction_admittance(spec: CircuitSpec, omega) -> Union[complex, np.ndarray]:
    """Admittance i(omega C - 1/(omega L)) of one junction cell.

    Always finite; the junction pole at omega_p appears as zero
    admittance, which is the representation callers should use near
    resonance.
    """
    w = np.asarray(omega, dtype=float)
    _check_positive_omega(w)
    y = 1j * (w * spec.C - 1.0 / (w * spec.L))
    return complex(y) if np.isscalar(omega) else y


def junction_impedance(spec: CircuitSpec, omega) -> Union[complex, np.ndarray]:
    """Parallel-LC impedance of one junction; equals -i Z_inf/(w/wp - wp/w).

    Diverges at the plasma frequency: an exact hit returns complex
    infinity.  Use :func:`junction_admittance` where finiteness matters.
    """
    y = junction_admittance(spec, omega)
    y = np.asarray(y)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(y == 0, complex(math.inf), 1.0 / np.where(y == 0, 1.0, y))
    return complex(z) if np.isscalar(omega) else z


def _termination_state(spec: CircuitSpec, shape) -> tuple[np.ndarray, np.ndarray]:
    # Z = A/B: open -> (1, 0), short -> (0, 1), load -> (Z_L, 1)
    A = np.empty(shape, dtype=complex)
    B = np.empty(shape, dtype=complex)
    term = spec.termination
    if term.kind == "open":
        A[...] = 1.0
        B[...] = 0.0
    elif term.kind == "short":
        A[...] = 0.0
        B[...] = 1.0
    else:
        A[...] = term.z_load
        B[...] = 1.0
    return A, B


def _ladder_state(spec: CircuitSpec, omega: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Homogeneous (A, B) with Z_in = A/B after iterating all N cells."""
    yg = 1j * omega * spec.Cg
    yj = 1j * (omega * spec.C - 1.0 / (omega * spec.L))
    A, B = _termination_state(spec, omega.shape)
    for _ in range(spec.N):
        B = B + yg * A  # shunt Cg in parallel
        A, B = A * yj + B, B * yj  # junction in series, via its admittance
        s = np.maximum(np.abs(A), np.abs(B))
        A = A / s
        B = B / s
    return A, B


def input_impedance(spec: CircuitSpec, omega) -> Union[complex, np.ndarray]:
    """Drive-port impedance of the terminated ladder.

    Accepts a scalar or an array of frequencies; evaluation at distinct
    frequencies is independent (no shared mutable state).  At a genuine
    pole the returned value is infinite.
    """
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    _check_positive_omega(w)
    A, B = _ladder_state(spec, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(B == 0, complex(math.inf), A / np.where(B == 0, 1.0, B))
    return complex(z[0]) if np.isscalar(omega) or np.ndim(omega) == 0 else z


def _reactance_sign(spec: CircuitSpec, omega: np.ndarray) -> np.ndarray:
    # sign(Im Z) = sign(Im(A conj(B))); robust at poles, no division
    A, B = _ladder_state(spec, omega)
    return np.sign((A * np.conj(B)).imag)


def dispersion(spec: CircuitSpec, n: int) -> float:
    """Dressed mode frequency omega_n = omega_n0 / sqrt(1 + (omega_n0/omega_p)^2).

    The bare frequency is omega_n0 = n*pi/(N sqrt(L Cg)) for an open
    array and (n - 1/2)*pi/(N sqrt(L Cg)) for a shorted one.  With C = 0
    the bare value is returned unchanged.
    """
    if n < 1:
        raise ValueError(f"mode index must be >= 1, got {n}")
    kind = spec.termination.kind
    if kind == "open":
        w0 = n * math.pi / (spec.N * math.sqrt(spec.L * spec.Cg))
    elif kind == "short":
        w0 = (n - 0.5) * math.pi / (spec.N * math.sqrt(spec.L * spec.Cg))
    else:
        raise UnsupportedTermination(
            "dispersion has a closed form only for open or short terminations"
        )
    if spec.C == 0:
        return w0
    return w0 / math.sqrt(1.0 + (w0 / spec.omega_p) ** 2)


@dataclass(frozen=True)
class DispersionTable:
    """Mode table: index n, bare omega_n0 and dressed omega_n."""

    n: np.ndarray
    omega_n0: np.ndarray
    omega_n: np.ndarray


def dispersion_table(spec: CircuitSpec, n_max: Optional[int] = None) -> DispersionTable:
    if n_max is None:
        n_max = spec.N
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    idx = np.arange(1, n_max + 1)
    if spec.termination.kind == "open":
        w0 = idx * math.pi / (spec.N * math.sqrt(spec.L * spec.Cg))
    elif spec.termination.kind == "short":
        w0 = (idx - 0.5) * math.pi / (spec.N * math.sqrt(spec.L * spec.Cg))
    else:
        raise UnsupportedTermination(
            "dispersion has a closed form only for open or short terminations"
        )
    if spec.C == 0:
        wn = w0.copy()
    else:
        wn = w0 / np.sqrt(1.0 + (w0 / spec.omega_p) ** 2)
    return DispersionTable(idx, w0, wn)


def default_grid_points(spec: CircuitSpec, omega_min: float, omega_max: float) -> int:
    """40 grid points per expected bare mode spacing, at least 3."""
    spacing = spec.bare_mode_spacing
    return max(3, int(math.ceil((omega_max - omega_min) / spacing * 40)) + 1)


def find_modes(
    spec: CircuitSpec,
    omega_min: float,
    omega_max: float,
    grid_points: Optional[int] = None,
    rel_tol: float = 1e-9,
) -> np.ndarray:
    """Resonance frequencies of |Z| in [omega_min, omega_max], sorted.

    Scans the reactance on a dense grid and refines each extremum by
    bisection on its sign change.  Open (and load) terminations resonate
    at impedance poles, where the reactance flips + -> -; a shorted array
    is probed at its |Z| minima, i.e. reactance zeros flipping - -> +.
    Returns an empty array when the range holds no extremum (e.g.
    entirely above the plasma frequency).
    """
    if not (0 < omega_min < omega_max):
        raise ValueError("need 0 < omega_min < omega_max")
    if grid_points is None:
        grid_points = default_grid_points(spec, omega_min, omega_max)
    if grid_points < 3:
        raise ValueError("grid_points must be >= 3")

    grid = np.linspace(omega_min, omega_max, grid_points)
    sign = _reactance_sign(spec, grid)
    if spec.termination.kind == "short":
        hits = (sign[:-1] < 0) & (sign[1:] > 0)
    else:
        hits = (sign[:-1] > 0) & (sign[1:] < 0)
    lo = grid[:-1][hits].copy()
    hi = grid[1:][hits].copy()
    if lo.size == 0:
        return np.empty(0, dtype=float)

    want = -1.0 if spec.termination.kind != "short" else 1.0
    # vectorized bisection: keep the bracket end whose sign still matches
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        s = _reactance_sign(spec, mid)
        take_hi = s == want  # crossing lies in [lo, mid]
        hi = np.where(take_hi, mid, hi)
        lo = np.where(take_hi, lo, mid)
        if np.all((hi - lo) <= rel_tol * hi):
            break
    return np.sort(0.5 * (lo + hi))


def capacitive_asymptote_constant(c_ratio: float) -> float:
    """High-frequency limit of |Z| * omega * sqrt(C*Cg) for the semi-infinite ladder.

    Solves the ladder fixed point Z^2 - aZ - ab = 0 with a = 1/(i w C)
    and b = 1/(i w Cg): the product tends to (1 + sqrt(1 + 4 rho)) /
    (2 sqrt(rho)) with rho = C/Cg, approaching 1 from above as rho grows.
    """
    if not c_ratio > 0:
        raise ValueError("C/Cg ratio must be > 0")
    return (1.0 + math.sqrt(1.0 + 4.0 * c_ratio)) / (2.0 * math.sqrt(c_ratio))
