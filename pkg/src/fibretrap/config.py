"""INI-style run configuration and the objects built from it."""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .export import config_hash
from .fibre_modes import FibreGeometry, GuidedMode, solve_propagation_constant
from .polarisability import (
    PolarisabilityTensor,
    StateLabel,
    parse_state,
    polarisability_tensor,
    tensor_from_cartesian,
    tensor_from_parallel_perp,
)

ROLES = ("travelling", "standing")
PLANES = ("xz", "xy", "r", "theta", "z")


@dataclass(frozen=True)
class LaserSpec:
    role: str
    wavenumber: float
    amplitude: float | None = None
    power: float | None = None


@dataclass
class RunConfig:
    fibre: FibreGeometry
    lasers: dict
    isotope: int = 87
    states: list = field(default_factory=list)
    source: str = "table"
    manifest: Path | None = None
    table: dict = field(default_factory=dict)
    cartesian: dict = field(default_factory=dict)
    guard_cm: float = 1.0
    boundary_mK: float = -3.8
    fd_step: float = 1e-3
    ftol: float = 1e-12
    grid_points: int = 121
    grid_extent: float = 3.0
    planes: tuple = PLANES
    cp_distance_nm: float = 200.0
    cp_moment_au: float = 4.0
    out_dir: Path = Path("out")
    text: str = ""

    @property
    def hash(self) -> str:
        return config_hash(self.text)


def default_config_path() -> Path:
    return Path(str(resources.files("fibretrap") / "paper.cfg"))


def _get(cp, section, key, cast=str, default=None, required=True):
    if not cp.has_section(section):
        if required and default is None:
            raise ConfigError(f"missing section [{section}]")
        return default
    if not cp.has_option(section, key):
        if required and default is None:
            raise ConfigError(f"[{section}] missing key '{key}'")
        return default
    raw = cp.get(section, key)
    try:
        value = cast(raw)
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from None
    if isinstance(value, float) and not math.isfinite(value):
        raise ConfigError(f"[{section}] {key} must be finite")
    return value


def _laser(cp, role) -> LaserSpec:
    sec = f"laser.{role}"
    wn = _get(cp, sec, "wavenumber_cm", float)
    amp = _get(cp, sec, "amplitude_au", float, required=False)
    power = _get(cp, sec, "power_au", float, required=False)
    if amp is not None and power is not None:
        raise ConfigError(f"[{sec}] give either amplitude_au or power_au, not both")
    if amp is None and power is None:
        raise ConfigError(f"[{sec}] missing key 'amplitude_au' (or 'power_au')")
    if (amp is not None and amp <= 0) or (power is not None and power <= 0) or wn <= 0:
        raise ConfigError(f"[{sec}] wavenumber, amplitude and power must be positive")
    return LaserSpec(role, wn, amp, power)


def _states(raw: str):
    return [parse_state(s) for s in raw.split(";") if s.strip()]


def parse_config(text: str, base_dir: Path | None = None) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    base_dir = Path(".") if base_dir is None else base_dir

    try:
        fibre = FibreGeometry(_get(cp, "fibre", "radius_nm", float), _get(cp, "fibre", "n1", float),
                              _get(cp, "fibre", "n2", float, default=1.0))
    except ValueError as exc:
        raise ConfigError(f"[fibre] {exc}") from None
    lasers = {role: _laser(cp, role) for role in ROLES}
    if not lasers["travelling"].wavenumber > lasers["standing"].wavenumber:
        raise ConfigError("the travelling laser must have the larger wavenumber")

    source = _get(cp, "molecule", "source", str, default="table")
    if source not in ("table", "computed"):
        raise ConfigError(f"[molecule] source must be 'table' or 'computed', got {source!r}")
    manifest = _get(cp, "molecule", "manifest", str, required=False)
    if source == "computed" and manifest is None:
        raise ConfigError("[molecule] source = computed requires 'manifest'")
    isotope = _get(cp, "molecule", "isotope", int, default=87)
    if isotope not in (85, 87):
        raise ConfigError("[molecule] isotope must be 85 or 87")

    table, cartesian = {}, {}
    for role in ROLES:
        sec = f"polarisability.{role}"
        if cp.has_section(sec):
            table[role] = (_get(cp, sec, "parallel", float), _get(cp, sec, "perpendicular", float))
    for sec in cp.sections():
        if sec.startswith("cartesian."):
            role, _, spec = sec[len("cartesian."):].partition(" ")
            if role not in ROLES:
                raise ConfigError(f"[{sec}] unknown laser role {role!r}")
            state = parse_state(spec)
            cartesian[(role, state)] = (_get(cp, sec, "xx", float), _get(cp, sec, "zz", float))
    if source == "table" and set(table) != set(ROLES):
        missing = sorted(set(ROLES) - set(table))
        raise ConfigError(f"source = table needs [polarisability.{missing[0]}] parallel/perpendicular")

    planes = tuple(p.strip() for p in _get(cp, "trap", "planes", str, default=",".join(PLANES)).split(",") if p.strip())
    for p in planes:
        if p not in PLANES:
            raise ConfigError(f"[trap] unknown plane {p!r}")
    rc = RunConfig(
        fibre=fibre,
        lasers=lasers,
        isotope=isotope,
        states=_states(_get(cp, "molecule", "states", str, default="b:L=0,S=1,N=0,v=0,J=1,M=0")),
        source=source,
        manifest=None if manifest is None else (base_dir / manifest),
        table=table,
        cartesian=cartesian,
        guard_cm=_get(cp, "molecule", "guard_cm", float, default=1.0),
        boundary_mK=_get(cp, "trap", "boundary_mK", float, default=-3.8),
        fd_step=_get(cp, "trap", "fd_step_a", float, default=1e-3),
        ftol=_get(cp, "trap", "ftol", float, default=1e-12),
        grid_points=_get(cp, "trap", "grid_points", int, default=121),
        grid_extent=_get(cp, "trap", "grid_extent_a", float, default=3.0),
        planes=planes,
        cp_distance_nm=_get(cp, "casimir", "distance_nm", float, default=200.0),
        cp_moment_au=_get(cp, "casimir", "moment_au", float, default=4.0),
        out_dir=Path(_get(cp, "output", "dir", str, default="out")),
        text=text,
    )
    if rc.grid_points < 3 or rc.fd_step <= 0 or rc.grid_extent <= 1:
        raise ConfigError("[trap] grid_points >= 3, fd_step_a > 0 and grid_extent_a > 1 required")
    if rc.cp_distance_nm <= 0:
        raise ConfigError("[casimir] distance_nm must be positive")
    return rc


def load_config(path=None) -> RunConfig:
    path = default_config_path() if path is None else Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, path.parent)


def build_mode(rc: RunConfig, role: str) -> GuidedMode:
    spec = rc.lasers[role]
    return solve_propagation_constant(rc.fibre, spec.wavenumber, amplitude=spec.amplitude, power=spec.power)


def table_tensor(rc: RunConfig, role: str, state: StateLabel) -> PolarisabilityTensor:
    par, perp = rc.table[role]
    wn = rc.lasers[role].wavenumber
    if (role, state) in rc.cartesian:
        xx, zz = rc.cartesian[(role, state)]
        return tensor_from_cartesian(state, wn, xx, zz, par, perp)
    return tensor_from_parallel_perp(state, wn, par, perp)


def state_tensors(rc: RunConfig, state: StateLabel, transitions=None) -> tuple:
    """(travelling, standing) tensors for ``state`` from the configured source."""
    if rc.source == "table":
        return tuple(table_tensor(rc, role, state) for role in ROLES)
    if transitions is None:
        raise ConfigError("computed polarisabilities need a transition table")
    return tuple(polarisability_tensor(state, rc.lasers[r].wavenumber, transitions, rc.guard_cm) for r in ROLES)
