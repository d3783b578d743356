"""Exact single-excitation dynamics of the qubit + N-mode bath.

Two independent engines compute p_e(t) from the same initial state
(qubit excited, bath in its ground state):

* :func:`evolve` - the production engine.  It integrates the autonomous
  rotating-frame system

      dC0/dt = -i sum_i gamma_i C_i
      dCi/dt = -i (omega_i - Omega) C_i - i gamma_i C0

  with fixed-step classical RK4.  Mode populations are identical to the
  interaction picture, which differs only by per-component phases.

* :func:`evolve_kernel` - the oracle engine.  Eliminating the bath
  amplitudes gives the closed memory-kernel form

      dC0/dt = -int_0^t K(t-s) C0(s) ds,
      K(tau) = sum_i gamma_i^2 exp(i (Omega - omega_i) tau)

  solved with trapezoidal convolution quadrature (O(steps^2), intended
  for oracle-scale cross-checks only).

Reductions over bath amplitudes use numpy's fixed-order pairwise sums,
so results are bit-reproducible run to run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import AmplitudeState, BathSpec, QubitSpec, TimeSeries, lambda0

__all__ = [
    "STEPS_PER_CYCLE",
    "EngineConfig",
    "MemoryKernel",
    "NumericalFailure",
    "resolve_dt",
    "evolve",
    "evolve_kernel",
    "build_memory_kernel",
    "bath_populations",
]

# Steps per fastest rotation period used by dt="auto".  50 resolves the
# dynamics but leaves RK4 phase error near 2e-5 over a thousand Rabi
# radians; 200 keeps long closed-form comparisons below 1e-7.
STEPS_PER_CYCLE = 200


class NumericalFailure(RuntimeError):
    """Integration aborted (norm drift or non-finite amplitudes).

    Carries the partial series accumulated up to the failing sample.
    """

    def __init__(self, message: str, partial: TimeSeries):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class EngineConfig:
    """Integration controls; dt=None means "auto" via :func:`resolve_dt`."""

    t_max: float
    dt: Optional[float] = None
    sample_stride: int = 1
    snapshot_times: tuple[float, ...] = field(default_factory=tuple)
    norm_tolerance: float = 1e-7

    def __post_init__(self) -> None:
        if not self.t_max > 0:
            raise ValueError("t_max must be > 0")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be > 0 (or None for auto)")
        if self.sample_stride < 1:
            raise ValueError("sample_stride must be >= 1")
        if not self.norm_tolerance > 0:
            raise ValueError("norm_tolerance must be > 0")


def resolve_dt(qubit: QubitSpec, bath: BathSpec, cfg: EngineConfig) -> float:
    """Resolved time step: cfg.dt if given, else auto.

    Auto picks dt = (2 pi / omega_scale) / STEPS_PER_CYCLE with
    omega_scale = max(max_i |Omega - omega_i|, Lambda0, 1e-3 Omega), i.e.
    at least STEPS_PER_CYCLE steps per fastest rotation in the rotating
    frame.
    """
    if cfg.dt is not None:
        return cfg.dt
    detuning = float(np.max(np.abs(bath.omega - qubit.omega)))
    omega_scale = max(detuning, lambda0(bath), 1e-3 * qubit.omega)
    return (2.0 * math.pi / omega_scale) / STEPS_PER_CYCLE


def _snapshot_steps(times: Sequence[float], dt: float, n_steps: int) -> dict[int, float]:
    # snap each requested time to the nearest integration step
    snapped: dict[int, float] = {}
    for t in times:
        k = int(round(t / dt))
        k = min(max(k, 0), n_steps)
        snapped.setdefault(k, k * dt)
    return snapped


def evolve(
    qubit: QubitSpec,
    bath: BathSpec,
    cfg: EngineConfig,
    initial_state: Optional[np.ndarray] = None,
) -> TimeSeries:
    """Integrate the rotating-frame Schroedinger equation; return sampled p_e.

    The initial state defaults to the qubit excited and the bath empty
    (the zero-temperature single-excitation start).  ``initial_state``
    exists for validation work (e.g. global-phase invariance checks).

    Raises :exc:`NumericalFailure` when the sampled norm drifts beyond
    cfg.norm_tolerance or an amplitude stops being finite; the partial
    series up to that sample rides on the exception.
    """
    n_modes = bath.n_modes
    dt = resolve_dt(qubit, bath, cfg)
    n_steps = max(1, int(math.ceil(cfg.t_max / dt - 1e-12)))

    y = np.zeros(n_modes + 1, dtype=complex)
    if initial_state is None:
        y[0] = 1.0
    else:
        if initial_state.shape != y.shape:
            raise ValueError("initial_state must have length N+1")
        y[:] = initial_state

    delta = np.ascontiguousarray(bath.omega - qubit.omega)
    gamma = np.ascontiguousarray(bath.gamma)

    k1, k2, k3, k4, yt = (np.empty_like(y) for _ in range(5))
    tmp = np.empty(n_modes, dtype=complex)

    def rhs(v: np.ndarray, out: np.ndarray) -> None:
        np.multiply(gamma, v[1:], out=tmp)
        out[0] = -1j * np.sum(tmp)  # pairwise sum: deterministic order
        np.multiply(delta, v[1:], out=out[1:])
        np.multiply(gamma, v[0], out=tmp)
        out[1:] += tmp
        out[1:] *= -1j

    snapshots_at = _snapshot_steps(cfg.snapshot_times, dt, n_steps)
    snapshots: list[tuple[float, np.ndarray]] = []
    if 0 in snapshots_at:
        snapshots.append((0.0, np.abs(y[1:]) ** 2))

    n_rec = n_steps // cfg.sample_stride + 1
    if n_steps % cfg.sample_stride:
        n_rec += 1  # always record the final step
    ts = np.empty(n_rec)
    ps = np.empty(n_rec)
    ne = np.empty(n_rec)
    start_norm = float(np.sum(np.abs(y) ** 2))
    ts[0], ps[0], ne[0] = 0.0, float(abs(y[0]) ** 2), start_norm - 1.0
    r = 1

    def partial() -> TimeSeries:
        return TimeSeries(ts[:r], ps[:r], ne[:r], snapshots=tuple(snapshots))

    if abs(ne[0]) > cfg.norm_tolerance:
        raise NumericalFailure(
            f"initial state norm error {ne[0]:.3e} exceeds tolerance", partial()
        )

    for n in range(n_steps):
        rhs(y, k1)
        np.multiply(k1, 0.5 * dt, out=yt)
        yt += y
        rhs(yt, k2)
        np.multiply(k2, 0.5 * dt, out=yt)
        yt += y
        rhs(yt, k3)
        np.multiply(k3, dt, out=yt)
        yt += y
        rhs(yt, k4)
        np.add(k2, k3, out=k2)
        k2 *= 2.0
        k2 += k1
        k2 += k4
        k2 *= dt / 6.0
        y += k2

        step = n + 1
        if step in snapshots_at:
            snapshots.append((snapshots_at[step], np.abs(y[1:]) ** 2))
        if step % cfg.sample_stride == 0 or step == n_steps:
            t = step * dt
            pe = float(abs(y[0]) ** 2)
            err = float(np.sum(np.abs(y) ** 2)) - 1.0
            ts[r], ps[r], ne[r] = t, pe, err
            r += 1
            if not math.isfinite(pe) or not math.isfinite(err):
                raise NumericalFailure(f"non-finite amplitude at t={t:g}", partial())
            if abs(err) > cfg.norm_tolerance:
                raise NumericalFailure(
                    f"norm error {err:.3e} exceeds tolerance {cfg.norm_tolerance:g} "
                    f"at t={t:g}",
                    partial(),
                )

    final = AmplitudeState(t=n_steps * dt, amplitudes=y)
    return TimeSeries(
        ts[:r], ps[:r], ne[:r], snapshots=tuple(snapshots), final_state=final
    )


@dataclass(frozen=True)
class MemoryKernel:
    """Sampled memory kernel K(tau) on a uniform grid; K(0) = Lambda0^2."""

    tau_grid: np.ndarray
    k_values: np.ndarray


def build_memory_kernel(qubit: QubitSpec, bath: BathSpec, tau_grid: np.ndarray) -> MemoryKernel:
    tau = np.asarray(tau_grid, dtype=float)
    k = np.zeros(tau.shape, dtype=complex)
    for w, g in zip(bath.omega, bath.gamma):
        k += (g * g) * np.exp(1j * (qubit.omega - w) * tau)
    return MemoryKernel(tau_grid=tau, k_values=k)


def evolve_kernel(qubit: QubitSpec, bath: BathSpec, cfg: EngineConfig) -> TimeSeries:
    """Independent oracle: solve the memory-kernel equation for C0 only.

    Trapezoidal rule is applied both to the convolution and to the time
    advance (the step is implicit but scalar-linear).  Bath populations
    do not exist in this picture, so no snapshots are produced and the
    norm-error column is NaN.
    """
    if cfg.snapshot_times:
        raise ValueError("the kernel engine cannot produce bath snapshots")
    dt = resolve_dt(qubit, bath, cfg)
    n_steps = max(1, int(math.ceil(cfg.t_max / dt - 1e-12)))
    tau = np.arange(n_steps + 1) * dt
    kernel = build_memory_kernel(qubit, bath, tau).k_values

    c = np.empty(n_steps + 1, dtype=complex)
    conv = np.empty(n_steps + 1, dtype=complex)  # trapezoid of K*C up to t_n
    c[0] = 1.0
    conv[0] = 0.0
    k0 = kernel[0]
    denom = 1.0 + (dt * dt / 4.0) * k0
    for n in range(n_steps):
        # trapezoid convolution at t_{n+1}, minus the unknown j=n+1 term
        head = np.multiply(kernel[n + 1 : 0 : -1], c[: n + 1])
        part = dt * (np.sum(head) - 0.5 * head[0])
        c[n + 1] = (c[n] - 0.5 * dt * (conv[n] + part)) / denom
        conv[n + 1] = part + 0.5 * dt * k0 * c[n + 1]

    sel = np.arange(0, n_steps + 1, cfg.sample_stride)
    if sel[-1] != n_steps:
        sel = np.append(sel, n_steps)
    return TimeSeries(
        t=tau[sel],
        p_e=np.abs(c[sel]) ** 2,
        norm_error=np.full(sel.size, np.nan),
    )


def bath_populations(state: AmplitudeState) -> np.ndarray:
    """Per-mode populations |C_i|^2, i = 1..N; they sum to 1 - p_e."""
    return np.abs(state.amplitudes[1:]) ** 2
