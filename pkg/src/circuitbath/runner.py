"""Pipeline orchestration: build, integrate, analyze, persist.

Every run writes its CSV products plus a ``manifest.json`` holding the
fully resolved configuration, derived quantities, a checksum per output
file and the exit status.  The manifest is written in a pending state
first and finalized last, so a crashed run leaves evidence behind.
Given the same configuration and seed, all CSV outputs are byte
identical run to run.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .analytics import (
    InsufficientDataError,
    detect_revival,
    fit_exponential,
    long_time_plateau,
    revival_time,
    time_average,
    decay_rate_line,
    decay_rate_tls,
)
from .bath import (
    RNG_ALGORITHM,
    DegenerateTLSParams,
    TransmissionLineParams,
    UniformTLSParams,
    build_degenerate_tls_bath,
    build_jj_array_bath,
    build_transmission_line_bath,
    build_uniform_tls_bath,
    read_bath_csv,
    write_bath_csv,
)
from .circuit import OPEN, SHORT, CircuitSpec, Termination, dispersion_table, input_impedance, load
from .config import (
    ConfigError,
    MissingKeyError,
    RunConfig,
    parse_config,
    serialize_config,
)
from .core import BathSpec, QubitSpec, TimeSeries, lambda0
from .dynamics import EngineConfig, NumericalFailure, evolve, evolve_kernel, resolve_dt

__all__ = [
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_NUMERICAL",
    "EXIT_IO",
    "build_circuit",
    "build_bath",
    "run_evolve",
    "run_impedance",
    "run_dispersion",
    "run_sweep",
    "write_series_csv",
    "read_series_csv",
    "analysis_report",
    "format_report",
]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


def _fmt17(x: float) -> str:
    return f"{x:.17g}"


def build_circuit(cfg: RunConfig) -> CircuitSpec:
    if cfg.circuit is None:
        raise MissingKeyError("circuit: section required for this pipeline")
    c = cfg.circuit
    if c.termination == "open":
        term: Termination = OPEN
    elif c.termination == "short":
        term = SHORT
    else:
        term = load(c.z_load)
    return CircuitSpec(L=c.L, C=c.C, Cg=c.Cg, N=c.N, termination=term)


def build_bath(cfg: RunConfig, seed_override: Optional[int] = None) -> BathSpec:
    if cfg.bath is None:
        raise MissingKeyError("bath: section required for this pipeline")
    b = cfg.bath
    seed = seed_override if seed_override is not None else b.seed
    if b.kind == "line":
        return build_transmission_line_bath(
            TransmissionLineParams(delta_omega=b.delta_omega, g=b.g, n_modes=b.n_modes)
        )
    if b.kind == "jj_array":
        return build_jj_array_bath(build_circuit(cfg), g=b.g, max_modes=b.max_modes)
    if b.kind == "uniform":
        return build_uniform_tls_bath(
            UniformTLSParams(
                n_tls=b.n_tls,
                omega_min=b.omega_min,
                omega_max=b.omega_max,
                gamma0=b.gamma0,
                gamma_max=b.gamma_max,
                seed=seed,
            )
        )
    if b.kind == "degenerate":
        return build_degenerate_tls_bath(
            DegenerateTLSParams(n_tls=b.n_tls, r=b.r, lambda0=b.lambda0, seed=seed)
        )
    return read_bath_csv(b.file)


def write_series_csv(series: TimeSeries, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("t,p_e,norm_error\n")
        for t, p, e in zip(series.t, series.p_e, series.norm_error):
            fh.write(f"{_fmt17(t)},{_fmt17(p)},{_fmt17(e)}\n")


def read_series_csv(path) -> TimeSeries:
    data = np.genfromtxt(path, delimiter=",", names=True)
    data = np.atleast_1d(data)
    return TimeSeries(
        t=np.asarray(data["t"], dtype=float),
        p_e=np.asarray(data["p_e"], dtype=float),
        norm_error=np.asarray(data["norm_error"], dtype=float),
    )


def _write_snapshot_csv(bath: BathSpec, populations: np.ndarray, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("index,omega,gamma,population\n")
        for i, (w, g, p) in enumerate(zip(bath.omega, bath.gamma, populations), start=1):
            fh.write(f"{i},{_fmt17(w)},{_fmt17(g)},{_fmt17(p)}\n")


def _sha256(path: Path) -> dict:
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    return {"sha256": digest, "bytes": path.stat().st_size}


class _Manifest:
    def __init__(self, out_dir: Path, pipeline: str, cfg: RunConfig, seed: Optional[int]):
        self.path = out_dir / "manifest.json"
        self.t0 = time.perf_counter()
        self.data = {
            "tool": {"name": "circuitbath", "version": __version__},
            "pipeline": pipeline,
            "status": "pending",
            "exit_code": None,
            "seed": seed,
            "rng": {"algorithm": RNG_ALGORITHM, "numpy": np.__version__},
            "config_text": serialize_config(cfg),
            "derived": {},
            "warnings": [],
            "outputs": {},
            "report": None,
            "duration_seconds": None,
        }
        self._write()

    def _write(self) -> None:
        with open(self.path, "w") as fh:
            json.dump(self.data, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def add_output(self, path: Path) -> None:
        self.data["outputs"][path.name] = _sha256(path)

    def finalize(self, status: str, exit_code: int) -> None:
        self.data["status"] = status
        self.data["exit_code"] = exit_code
        self.data["duration_seconds"] = time.perf_counter() - self.t0
        self._write()


def _predictions(cfg: RunConfig, bath: BathSpec, qubit: QubitSpec) -> dict:
    lam = lambda0(bath)
    derived: dict = {"lambda0": lam, "n_modes": bath.n_modes}
    b = cfg.bath
    if b.kind == "line":
        derived["predicted_gamma"] = decay_rate_line(b.g, qubit.omega, b.delta_omega)
        derived["predicted_revival_time"] = revival_time(b.delta_omega)
    elif b.kind == "jj_array":
        # local spacing of the dressed comb around the qubit frequency
        idx = np.searchsorted(bath.omega, qubit.omega)
        if 0 < idx < bath.n_modes:
            d_local = float(bath.omega[idx] - bath.omega[idx - 1])
            derived["predicted_gamma"] = decay_rate_line(b.g, qubit.omega, d_local)
            derived["predicted_revival_time"] = revival_time(d_local)
    elif b.kind == "uniform":
        nu0 = bath.n_modes / (b.omega_max - b.omega_min)
        gamma0 = decay_rate_tls(nu0, lam, bath.n_modes)
        derived["predicted_gamma"] = gamma0
        if b.gamma0 is not None:
            derived["gamma0_target"] = b.gamma0
        derived["predicted_plateau"] = long_time_plateau(qubit.omega, bath.n_modes, gamma0)
    elif b.kind == "degenerate":
        kappa = math.sqrt(lam**2 + (0.5 * b.r * qubit.omega) ** 2)
        derived["oscillation_frequency"] = kappa
        derived["population_minimum"] = 1.0 - lam**2 / kappa**2
        derived["recurrence_period"] = math.pi / kappa
    return derived


def analysis_report(series: TimeSeries, cfg: RunConfig, derived: dict) -> dict:
    """Fit/revival/average summary with relative errors against predictions."""
    a = cfg.analysis
    report: dict = {}
    try:
        fit = fit_exponential(series, a.fit_p_hi, a.fit_p_lo)
        report["gamma_fit"] = fit.gamma_fit
        report["fit_r_squared"] = fit.r_squared
        report["fit_t_lo"], report["fit_t_hi"] = fit.window
        report["fit_samples"] = fit.n_samples
        if "predicted_gamma" in derived and derived["predicted_gamma"] > 0:
            report["gamma_rel_error"] = (
                abs(fit.gamma_fit - derived["predicted_gamma"]) / derived["predicted_gamma"]
            )
    except InsufficientDataError as exc:
        report["fit_skipped"] = str(exc)

    detected = detect_revival(series, a.revival_floor_factor)
    report["revival_time"] = detected
    if detected is not None and "predicted_revival_time" in derived:
        pred = derived["predicted_revival_time"]
        report["revival_rel_error"] = abs(detected - pred) / pred

    if a.plateau_t_lo is not None:
        try:
            mean = time_average(series, a.plateau_t_lo, a.plateau_t_hi)
            report["plateau_mean"] = mean
            if "predicted_plateau" in derived and derived["predicted_plateau"] > 0:
                report["plateau_ratio"] = mean / derived["predicted_plateau"]
        except InsufficientDataError as exc:
            report["plateau_skipped"] = str(exc)
    return report


def format_report(derived: dict, report: dict) -> str:
    """Flat key = value text block (predictions first, then measurements)."""
    lines = []
    for key in sorted(derived):
        lines.append(f"{key} = {_value_str(derived[key])}")
    for key in sorted(report):
        lines.append(f"{key} = {_value_str(report[key])}")
    return "\n".join(lines) + "\n"


def _value_str(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, float):
        return _fmt17(v)
    return str(v)


def _impedance_grid(cfg: RunConfig) -> np.ndarray:
    o = cfg.output
    if o.sweep_points is None:
        raise MissingKeyError("output.sweep_points: required for an impedance sweep")
    if o.sweep_scale == "log":
        return np.geomspace(o.sweep_omega_min, o.sweep_omega_max, o.sweep_points)
    return np.linspace(o.sweep_omega_min, o.sweep_omega_max, o.sweep_points)


def _omega_unit(cfg: RunConfig, circuit: CircuitSpec) -> float:
    choice = cfg.output.omega_unit
    if choice == "auto":
        choice = "plasma" if circuit.C > 0 else "lcg"
    if choice == "plasma":
        if circuit.C == 0:
            raise ConfigError("output.omega_unit: plasma units undefined for C = 0")
        return circuit.omega_p
    if choice == "lcg":
        return 1.0 / math.sqrt(circuit.L * circuit.Cg)
    return 1.0


def _write_impedance_csv(cfg: RunConfig, circuit: CircuitSpec, path: Path) -> None:
    grid = _impedance_grid(cfg)
    unit = _omega_unit(cfg, circuit)
    z = input_impedance(circuit, grid)
    with open(path, "w", newline="") as fh:
        fh.write("omega,re_z,im_z,abs_z\n")
        for w, zz in zip(grid, z):
            fh.write(
                f"{_fmt17(w / unit)},{_fmt17(zz.real)},{_fmt17(zz.imag)},{_fmt17(abs(zz))}\n"
            )


def _prepare_out_dir(cfg: RunConfig, out_dir) -> Path:
    path = Path(out_dir) if out_dir is not None else Path(cfg.output.directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def run_evolve(cfg: RunConfig, out_dir=None, seed_override: Optional[int] = None) -> int:
    """Full dynamics pipeline; returns the process exit code."""
    if cfg.bath is None or cfg.engine is None:
        raise MissingKeyError("bath/engine: sections required for the evolve pipeline")
    out = _prepare_out_dir(cfg, out_dir)
    qubit = QubitSpec(omega=cfg.qubit.omega)
    bath = build_bath(cfg, seed_override)
    seed = seed_override if seed_override is not None else cfg.bath.seed
    manifest = _Manifest(out, "evolve", cfg, seed)
    manifest.data["warnings"].extend(bath.warnings)

    e = cfg.engine
    engine_cfg = EngineConfig(
        t_max=e.t_max,
        dt=e.dt,
        sample_stride=e.sample_stride,
        snapshot_times=e.snapshot_times,
        norm_tolerance=e.norm_tolerance,
    )
    derived = _predictions(cfg, bath, qubit)
    derived["dt"] = resolve_dt(qubit, bath, engine_cfg)
    derived["engine"] = e.engine
    manifest.data["derived"] = derived

    status, code = "ok", EXIT_OK
    try:
        if e.engine == "kernel":
            series = evolve_kernel(qubit, bath, engine_cfg)
        else:
            series = evolve(qubit, bath, engine_cfg)
    except NumericalFailure as exc:
        series = exc.partial
        manifest.data["warnings"].append(f"numerical failure: {exc}")
        status, code = "numerical-failure", EXIT_NUMERICAL

    try:
        series_path = out / "series.csv"
        write_series_csv(series, series_path)
        manifest.add_output(series_path)
        if cfg.output.emit_bath_dump:
            bath_path = out / "bath.csv"
            write_bath_csv(bath, bath_path)
            manifest.add_output(bath_path)
        for k, (t_snap, pops) in enumerate(series.snapshots):
            snap_path = out / f"snapshot_{k:03d}.csv"
            _write_snapshot_csv(bath, pops, snap_path)
            manifest.add_output(snap_path)
        if cfg.output.emit_impedance_sweep:
            imp_path = out / "impedance.csv"
            _write_impedance_csv(cfg, build_circuit(cfg), imp_path)
            manifest.add_output(imp_path)

        report = analysis_report(series, cfg, derived)
        manifest.data["report"] = report
        report_path = out / "report.txt"
        report_path.write_text(format_report(derived, report))
        manifest.add_output(report_path)
    except OSError as exc:
        manifest.data["warnings"].append(f"io error: {exc}")
        status, code = "io-error", EXIT_IO

    manifest.finalize(status, code)
    return code


def run_impedance(cfg: RunConfig, out_dir=None) -> int:
    """Impedance sweep pipeline."""
    out = _prepare_out_dir(cfg, out_dir)
    circuit = build_circuit(cfg)
    manifest = _Manifest(out, "impedance", cfg, None)
    derived = {
        "omega_p": circuit.omega_p if circuit.C > 0 else None,
        "z_inf": circuit.z_inf if circuit.C > 0 else None,
        "bare_mode_spacing": circuit.bare_mode_spacing,
    }
    manifest.data["derived"] = derived
    status, code = "ok", EXIT_OK
    try:
        path = out / "impedance.csv"
        _write_impedance_csv(cfg, circuit, path)
        manifest.add_output(path)
    except OSError as exc:
        manifest.data["warnings"].append(f"io error: {exc}")
        status, code = "io-error", EXIT_IO
    manifest.finalize(status, code)
    return code


def run_dispersion(cfg: RunConfig, out_dir=None, n_max: Optional[int] = None) -> int:
    """Dispersion table pipeline."""
    out = _prepare_out_dir(cfg, out_dir)
    circuit = build_circuit(cfg)
    manifest = _Manifest(out, "dispersion", cfg, None)
    manifest.data["derived"] = {
        "omega_p": circuit.omega_p if circuit.C > 0 else None,
        "bare_mode_spacing": circuit.bare_mode_spacing,
    }
    status, code = "ok", EXIT_OK
    try:
        table = dispersion_table(circuit, n_max)
        path = out / "dispersion.csv"
        with open(path, "w", newline="") as fh:
            fh.write("n,omega_n0,omega_n\n")
            for n, w0, wn in zip(table.n, table.omega_n0, table.omega_n):
                fh.write(f"{n},{_fmt17(w0)},{_fmt17(wn)}\n")
        manifest.add_output(path)
    except OSError as exc:
        manifest.data["warnings"].append(f"io error: {exc}")
        status, code = "io-error", EXIT_IO
    manifest.finalize(status, code)
    return code


def override_config_text(text: str, param_path: str, value: str) -> str:
    """Set ``section.key = value`` in a config text, preserving the rest."""
    if "." not in param_path:
        raise ConfigError(f"sweep parameter {param_path!r} must look like section.key")
    section, key = param_path.split(".", 1)
    parser = configparser.ConfigParser(
        interpolation=None,
        delimiters=("=",),
        comment_prefixes=("#",),
        inline_comment_prefixes=("#",),
        strict=True,
    )
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc
    if not parser.has_section(section):
        raise ConfigError(f"{param_path}: section [{section}] not present in base config")
    parser.set(section, key, value)
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def _sweep_worker(args: tuple[str, str, Optional[int]]) -> int:
    text, out_dir, seed = args
    cfg = parse_config(text)
    return run_evolve(cfg, out_dir, seed)


def run_sweep(
    base_text: str,
    param_path: str,
    values: list[str],
    out_dir,
    jobs: int = 1,
    seed_override: Optional[int] = None,
) -> int:
    """One evolve run per value; summary CSV + per-run manifests.

    Sub-runs are independent and may execute in parallel; outputs do not
    depend on the execution order or on ``jobs``.
    """
    if not values:
        raise ConfigError("sweep needs at least one value")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    tasks = []
    for value in values:
        text = override_config_text(base_text, param_path, value)
        parse_config(text)  # fail fast on an invalid value
        sub = out / f"{param_path}={value}"
        tasks.append((text, str(sub), seed_override))

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            codes = list(pool.map(_sweep_worker, tasks))
    else:
        codes = [_sweep_worker(t) for t in tasks]

    rows = []
    for value, (_, sub, _) in zip(values, tasks):
        manifest = json.loads((Path(sub) / "manifest.json").read_text())
        report = manifest.get("report") or {}
        rows.append(
            (
                value,
                report.get("gamma_fit"),
                report.get("revival_time"),
                report.get("plateau_mean"),
            )
        )
    summary = out / "summary.csv"
    with open(summary, "w", newline="") as fh:
        fh.write("value,gamma_fit,revival_time,plateau_mean\n")
        for value, gf, rt, pm in rows:
            cells = [str(value)] + [
                "nan" if v is None else _fmt17(float(v)) for v in (gf, rt, pm)
            ]
            fh.write(",".join(cells) + "\n")
    return max(codes)
