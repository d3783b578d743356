"""Run configuration: flat ``key = value`` pairs under bracketed sections.

Grammar: ``[section]`` headers, one ``key = value`` per line, ``#``
comments, numbers in decimal or scientific notation, lists
comma-separated.  Unknown sections or keys are rejected; every
validation failure names the offending ``section.key`` path.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, fields
from typing import Optional

__all__ = [
    "ConfigError",
    "ConfigSyntaxError",
    "UnknownKeyError",
    "MissingKeyError",
    "DomainError",
    "QubitConfig",
    "CircuitConfig",
    "BathConfig",
    "EngineSettings",
    "AnalysisConfig",
    "OutputConfig",
    "RunConfig",
    "parse_config",
    "parse_config_file",
    "serialize_config",
]


class ConfigError(ValueError):
    """Base class for configuration problems."""


class ConfigSyntaxError(ConfigError):
    pass


class UnknownKeyError(ConfigError):
    pass


class MissingKeyError(ConfigError):
    pass


class DomainError(ConfigError):
    pass


BATH_KINDS = ("line", "jj_array", "uniform", "degenerate", "custom")
_BATH_KEYS = {
    "line": {"delta_omega", "g", "n_modes"},
    "jj_array": {"g", "max_modes"},
    "uniform": {"n_tls", "omega_min", "omega_max", "gamma0", "gamma_max", "seed"},
    "degenerate": {"n_tls", "r", "lambda0", "seed"},
    "custom": {"file"},
}


@dataclass(frozen=True)
class QubitConfig:
    omega: float = 1.0


@dataclass(frozen=True)
class CircuitConfig:
    L: float = 1.0
    C: float = 0.0
    Cg: float = 1.0
    N: int = 1
    termination: str = "open"
    z_load: Optional[complex] = None


@dataclass(frozen=True)
class BathConfig:
    kind: str
    delta_omega: Optional[float] = None
    g: Optional[float] = None
    n_modes: Optional[int] = None
    max_modes: Optional[int] = None
    n_tls: Optional[int] = None
    omega_min: Optional[float] = None
    omega_max: Optional[float] = None
    gamma0: Optional[float] = None
    gamma_max: Optional[float] = None
    r: Optional[float] = None
    lambda0: Optional[float] = None
    file: Optional[str] = None
    seed: Optional[int] = None


@dataclass(frozen=True)
class EngineSettings:
    t_max: float
    dt: Optional[float] = None  # None = auto
    sample_stride: int = 1
    snapshot_times: tuple[float, ...] = field(default_factory=tuple)
    norm_tolerance: float = 1e-7
    engine: str = "direct"


@dataclass(frozen=True)
class AnalysisConfig:
    fit_p_hi: float = 1e-1
    fit_p_lo: float = 1e-7
    revival_floor_factor: float = 10.0
    plateau_t_lo: Optional[float] = None
    plateau_t_hi: Optional[float] = None


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    emit_bath_dump: bool = True
    emit_impedance_sweep: bool = False
    sweep_omega_min: Optional[float] = None
    sweep_omega_max: Optional[float] = None
    sweep_points: Optional[int] = None
    sweep_scale: str = "log"
    omega_unit: str = "auto"


@dataclass(frozen=True)
class RunConfig:
    qubit: QubitConfig = field(default_factory=QubitConfig)
    circuit: Optional[CircuitConfig] = None
    bath: Optional[BathConfig] = None
    engine: Optional[EngineSettings] = None
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


class _Section:
    """Tracks consumption of a section's keys so leftovers can be rejected."""

    def __init__(self, name: str, items: dict[str, str]):
        self.name = name
        self.items = dict(items)

    def path(self, key: str) -> str:
        return f"{self.name}.{key}"

    def take(self, key: str) -> Optional[str]:
        return self.items.pop(key, None)

    def require(self, key: str) -> str:
        raw = self.take(key)
        if raw is None or raw == "":
            raise MissingKeyError(f"{self.path(key)}: required key is missing")
        return raw

    def reject_leftovers(self) -> None:
        if self.items:
            key = sorted(self.items)[0]
            raise UnknownKeyError(f"{self.path(key)}: unknown key")

    def get_float(self, key: str, default=None) -> Optional[float]:
        raw = self.take(key)
        if raw is None or raw == "":
            return default
        try:
            return float(raw)
        except ValueError:
            raise DomainError(f"{self.path(key)}: not a number: {raw!r}") from None

    def need_float(self, key: str) -> float:
        raw = self.require(key)
        try:
            return float(raw)
        except ValueError:
            raise DomainError(f"{self.path(key)}: not a number: {raw!r}") from None

    def get_int(self, key: str, default=None) -> Optional[int]:
        raw = self.take(key)
        if raw is None or raw == "":
            return default
        try:
            return int(raw)
        except ValueError:
            raise DomainError(f"{self.path(key)}: not an integer: {raw!r}") from None

    def need_int(self, key: str) -> int:
        raw = self.require(key)
        try:
            return int(raw)
        except ValueError:
            raise DomainError(f"{self.path(key)}: not an integer: {raw!r}") from None

    def get_bool(self, key: str, default: bool) -> bool:
        raw = self.take(key)
        if raw is None or raw == "":
            return default
        low = raw.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise DomainError(f"{self.path(key)}: not a boolean: {raw!r}")

    def get_str(self, key: str, default=None, choices=None) -> Optional[str]:
        raw = self.take(key)
        if raw is None or raw == "":
            raw = default
        if raw is not None and choices is not None and raw not in choices:
            raise DomainError(
                f"{self.path(key)}: must be one of {', '.join(choices)}; got {raw!r}"
            )
        return raw

    def get_float_list(self, key: str) -> tuple[float, ...]:
        raw = self.take(key)
        if raw is None or raw.strip() == "":
            return ()
        out = []
        for piece in raw.split(","):
            piece = piece.strip()
            if not piece:
                continue
            try:
                out.append(float(piece))
            except ValueError:
                raise DomainError(
                    f"{self.path(key)}: list element is not a number: {piece!r}"
                ) from None
        return tuple(out)


def _check(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise DomainError(f"{path}: {message}")


def _parse_qubit(sec: _Section) -> QubitConfig:
    omega = sec.get_float("omega", 1.0)
    sec.reject_leftovers()
    _check(omega > 0, "qubit.omega", "must be > 0")
    return QubitConfig(omega=omega)


def _parse_circuit(sec: _Section) -> CircuitConfig:
    L = sec.need_float("L")
    C = sec.get_float("C", 0.0)
    Cg = sec.need_float("Cg")
    N = sec.need_int("N")
    termination = sec.get_str("termination", "open", choices=("open", "short", "load"))
    z_raw = sec.take("z_load")
    sec.reject_leftovers()
    _check(L > 0, "circuit.L", "must be > 0")
    _check(C >= 0, "circuit.C", "must be >= 0")
    _check(Cg > 0, "circuit.Cg", "must be > 0")
    _check(N >= 1, "circuit.N", "must be >= 1")
    z_load: Optional[complex] = None
    if termination == "load":
        if z_raw is None:
            raise MissingKeyError("circuit.z_load: required when termination = load")
        try:
            z_load = complex(z_raw.replace(" ", ""))
        except ValueError:
            raise DomainError(f"circuit.z_load: not a complex number: {z_raw!r}") from None
    elif z_raw is not None:
        raise UnknownKeyError("circuit.z_load: only valid when termination = load")
    return CircuitConfig(L=L, C=C, Cg=Cg, N=N, termination=termination, z_load=z_load)


def _parse_bath(sec: _Section) -> BathConfig:
    kind = sec.get_str("kind", None, choices=BATH_KINDS)
    if kind is None:
        raise MissingKeyError("bath.kind: required key is missing")
    allowed = _BATH_KEYS[kind]
    for key in list(sec.items):
        if key not in allowed:
            raise UnknownKeyError(f"bath.{key}: unknown key for bath.kind = {kind}")
    if kind == "line":
        cfg = BathConfig(
            kind=kind,
            delta_omega=sec.need_float("delta_omega"),
            g=sec.need_float("g"),
            n_modes=sec.need_int("n_modes"),
        )
        _check(cfg.delta_omega > 0, "bath.delta_omega", "must be > 0")
        _check(cfg.g >= 0, "bath.g", "must be >= 0")
        _check(cfg.n_modes >= 1, "bath.n_modes", "must be >= 1")
    elif kind == "jj_array":
        cfg = BathConfig(kind=kind, g=sec.need_float("g"), max_modes=sec.need_int("max_modes"))
        _check(cfg.g >= 0, "bath.g", "must be >= 0")
        _check(cfg.max_modes >= 1, "bath.max_modes", "must be >= 1")
    elif kind == "uniform":
        gamma0 = sec.get_float("gamma0")
        gamma_max = sec.get_float("gamma_max")
        if (gamma0 is None) and (gamma_max is None):
            raise MissingKeyError("bath.gamma0: one of gamma0 or gamma_max is required")
        if (gamma0 is not None) and (gamma_max is not None):
            raise DomainError("bath.gamma0: mutually exclusive with bath.gamma_max")
        cfg = BathConfig(
            kind=kind,
            n_tls=sec.need_int("n_tls"),
            omega_min=sec.get_float("omega_min", 0.0),
            omega_max=sec.get_float("omega_max", 2.0),
            gamma0=gamma0,
            gamma_max=gamma_max,
            seed=sec.get_int("seed", 0),
        )
        _check(cfg.n_tls >= 1, "bath.n_tls", "must be >= 1")
        _check(
            0 <= cfg.omega_min < cfg.omega_max,
            "bath.omega_min",
            "need 0 <= omega_min < omega_max",
        )
        bound = gamma0 if gamma0 is not None else gamma_max
        _check(bound >= 0, "bath.gamma0", "coupling target must be >= 0")
    elif kind == "degenerate":
        cfg = BathConfig(
            kind=kind,
            n_tls=sec.need_int("n_tls"),
            r=sec.need_float("r"),
            lambda0=sec.need_float("lambda0"),
            seed=sec.get_int("seed", 0),
        )
        _check(cfg.n_tls >= 1, "bath.n_tls", "must be >= 1")
        _check(cfg.lambda0 > 0, "bath.lambda0", "must be > 0")
    else:  # custom
        cfg = BathConfig(kind=kind, file=sec.require("file"))
    sec.reject_leftovers()
    return cfg


def _parse_engine(sec: _Section) -> EngineSettings:
    dt_raw = sec.take("dt")
    if dt_raw is None or dt_raw == "" or dt_raw.lower() == "auto":
        dt = None
    else:
        try:
            dt = float(dt_raw)
        except ValueError:
            raise DomainError(f"engine.dt: not a number or 'auto': {dt_raw!r}") from None
        _check(dt > 0, "engine.dt", "must be > 0")
    cfg = EngineSettings(
        t_max=sec.need_float("t_max"),
        dt=dt,
        sample_stride=sec.get_int("sample_stride", 1),
        snapshot_times=sec.get_float_list("snapshot_times"),
        norm_tolerance=sec.get_float("norm_tolerance", 1e-7),
        engine=sec.get_str("engine", "direct", choices=("direct", "kernel")),
    )
    sec.reject_leftovers()
    _check(cfg.t_max > 0, "engine.t_max", "must be > 0")
    _check(cfg.sample_stride >= 1, "engine.sample_stride", "must be >= 1")
    _check(cfg.norm_tolerance > 0, "engine.norm_tolerance", "must be > 0")
    if cfg.engine == "kernel" and cfg.snapshot_times:
        raise DomainError(
            "engine.snapshot_times: the kernel engine cannot produce bath snapshots"
        )
    return cfg


def _parse_analysis(sec: _Section) -> AnalysisConfig:
    cfg = AnalysisConfig(
        fit_p_hi=sec.get_float("fit_p_hi", 1e-1),
        fit_p_lo=sec.get_float("fit_p_lo", 1e-7),
        revival_floor_factor=sec.get_float("revival_floor_factor", 10.0),
        plateau_t_lo=sec.get_float("plateau_t_lo"),
        plateau_t_hi=sec.get_float("plateau_t_hi"),
    )
    sec.reject_leftovers()
    _check(cfg.fit_p_hi > cfg.fit_p_lo > 0, "analysis.fit_p_hi", "need fit_p_hi > fit_p_lo > 0")
    _check(cfg.revival_floor_factor > 1, "analysis.revival_floor_factor", "must be > 1")
    if (cfg.plateau_t_lo is None) != (cfg.plateau_t_hi is None):
        raise MissingKeyError(
            "analysis.plateau_t_lo: plateau_t_lo and plateau_t_hi must be given together"
        )
    if cfg.plateau_t_lo is not None:
        _check(
            cfg.plateau_t_lo < cfg.plateau_t_hi,
            "analysis.plateau_t_lo",
            "must be < plateau_t_hi",
        )
    return cfg


def _parse_output(sec: _Section) -> OutputConfig:
    cfg = OutputConfig(
        directory=sec.get_str("directory", "out"),
        emit_bath_dump=sec.get_bool("emit_bath_dump", True),
        emit_impedance_sweep=sec.get_bool("emit_impedance_sweep", False),
        sweep_omega_min=sec.get_float("sweep_omega_min"),
        sweep_omega_max=sec.get_float("sweep_omega_max"),
        sweep_points=sec.get_int("sweep_points"),
        sweep_scale=sec.get_str("sweep_scale", "log", choices=("log", "linear")),
        omega_unit=sec.get_str("omega_unit", "auto", choices=("auto", "plasma", "lcg", "raw")),
    )
    sec.reject_leftovers()
    if cfg.emit_impedance_sweep or cfg.sweep_points is not None:
        for key in ("sweep_omega_min", "sweep_omega_max", "sweep_points"):
            if getattr(cfg, key) is None:
                raise MissingKeyError(f"output.{key}: required for an impedance sweep")
        _check(
            0 < cfg.sweep_omega_min < cfg.sweep_omega_max,
            "output.sweep_omega_min",
            "need 0 < sweep_omega_min < sweep_omega_max",
        )
        _check(cfg.sweep_points >= 2, "output.sweep_points", "must be >= 2")
    return cfg


_PARSERS = {
    "qubit": _parse_qubit,
    "circuit": _parse_circuit,
    "bath": _parse_bath,
    "engine": _parse_engine,
    "analysis": _parse_analysis,
    "output": _parse_output,
}


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a run configuration."""
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
        raise ConfigSyntaxError(f"config syntax error: {exc}") from exc

    present = parser.sections()
    if not present:
        raise MissingKeyError("config is empty: at least one [section] is required")
    for name in present:
        if name not in _PARSERS:
            raise UnknownKeyError(f"{name}: unknown section")

    parsed: dict[str, object] = {}
    for name in present:
        sec = _Section(name, dict(parser.items(name)))
        parsed[name] = _PARSERS[name](sec)

    cfg = RunConfig(
        qubit=parsed.get("qubit", QubitConfig()),
        circuit=parsed.get("circuit"),
        bath=parsed.get("bath"),
        engine=parsed.get("engine"),
        analysis=parsed.get("analysis", AnalysisConfig()),
        output=parsed.get("output", OutputConfig()),
    )
    if cfg.bath is not None and cfg.bath.kind == "jj_array" and cfg.circuit is None:
        raise MissingKeyError("circuit: section required when bath.kind = jj_array")
    return cfg


def parse_config_file(path) -> RunConfig:
    with open(path, "r") as fh:
        return parse_config(fh.read())


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, complex):
        return repr(value).strip("()")
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; parsing it back yields an equal RunConfig."""
    out = io.StringIO()

    def emit(name: str, obj, skip=()) -> None:
        out.write(f"[{name}]\n")
        for f in fields(obj):
            if f.name in skip:
                continue
            value = getattr(obj, f.name)
            if value is None:
                continue
            if f.name == "snapshot_times" and not value:
                continue
            key = f.name
            if name == "engine" and key == "dt":
                out.write(f"dt = {_fmt(value)}\n")
                continue
            out.write(f"{key} = {_fmt(value)}\n")
        if name == "engine" and obj.dt is None:
            out.write("dt = auto\n")
        out.write("\n")

    emit("qubit", cfg.qubit)
    if cfg.circuit is not None:
        emit("circuit", cfg.circuit)
    if cfg.bath is not None:
        emit("bath", cfg.bath)
    if cfg.engine is not None:
        emit("engine", cfg.engine)
    emit("analysis", cfg.analysis)
    emit("output", cfg.output)
    return out.getvalue()
