"""Tabulated potential curves, rovibrational eigenstates and dipole matrix elements.

Vibrational states come from a Colbert-Miller sinc-DVR on a uniform grid
(hard walls at the box edges). States above dissociation are kept as
box-discretised continuum representatives.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh

from . import constants as C
from .errors import ConfigError, CoverageError, GridTooCoarse
from .special_math import HalfInteger

__all__ = [
    "ElectronicLabel",
    "ElectronicCurve",
    "DipoleFunction",
    "RovibState",
    "Transition",
    "MolecularData",
    "sinc_dvr_kinetic",
    "solve_vibrational",
    "transition_dipole_me",
    "transition_table",
    "load_table",
    "load_curve",
    "load_dipole",
    "load_manifest",
    "build_transitions",
]

_LAMBDA_NAMES = {0: "Sigma", 1: "Pi", 2: "Delta"}


@dataclass(frozen=True)
class ElectronicLabel:
    Lambda: int
    S: HalfInteger
    symmetry: str = ""
    index: int = 1
    name: str = ""

    def __post_init__(self):
        if not isinstance(self.S, HalfInteger):
            object.__setattr__(self, "S", HalfInteger.of(self.S))
        if self.Lambda < 0:
            raise ValueError("store |Lambda| in the label; signed projections are summed over")
        if self.symmetry not in ("", "g", "u"):
            raise ValueError(f"symmetry must be 'g' or 'u', got {self.symmetry!r}")

    def __str__(self):
        mult = self.S.twice_value + 1
        return self.name or f"({self.index}){mult}{_LAMBDA_NAMES.get(self.Lambda, self.Lambda)}{self.symmetry}"


@dataclass(frozen=True, eq=False)
class ElectronicCurve:
    label: ElectronicLabel
    grid_R: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.grid_R, dtype=float)
        V = np.asarray(self.V, dtype=float)
        if R.shape != V.shape or R.ndim != 1:
            raise ValueError("grid_R and V must be 1D arrays of equal length")
        if len(R) < 100:
            raise ValueError(f"curve {self.label} has {len(R)} points; need at least 100")
        if np.any(np.diff(R) <= 0):
            raise ValueError("grid_R must be strictly ascending")
        if not np.all(np.isfinite(V)):
            raise ValueError("potential values must be finite")
        tail = V[-max(2, len(V) // 20):]
        if np.ptp(tail) > 1e-6:
            warnings.warn(f"curve {self.label}: last 5% of points vary by {np.ptp(tail):.2e} hartree; "
                          "the dissociation plateau may not be covered", stacklevel=2)
        object.__setattr__(self, "grid_R", R)
        object.__setattr__(self, "V", V)

    def spline(self) -> CubicSpline:
        return CubicSpline(self.grid_R, self.V, bc_type="natural")

    @property
    def dissociation(self) -> float:
        return float(self.V[-1])


@dataclass(frozen=True, eq=False)
class DipoleFunction:
    """Body-fixed transition dipole d_m(R) with m = Lambda - Lambda'."""

    from_label: ElectronicLabel
    to_label: ElectronicLabel
    grid_R: np.ndarray
    d: np.ndarray
    component: int | None = None

    def __post_init__(self):
        m = self.from_label.Lambda - self.to_label.Lambda
        if abs(m) > 1:
            raise ValueError(f"dipole-forbidden pair {self.from_label} -> {self.to_label}")
        if self.component is None:
            object.__setattr__(self, "component", m)
        elif self.component != m:
            raise ValueError(f"component {self.component} inconsistent with Lambda - Lambda' = {m}")
        R = np.asarray(self.grid_R, dtype=float)
        if np.any(np.diff(R) <= 0):
            raise ValueError("grid_R must be strictly ascending")
        object.__setattr__(self, "grid_R", R)
        object.__setattr__(self, "d", np.asarray(self.d, dtype=float))

    @property
    def parallel(self) -> bool:
        return self.component == 0

    def spline(self) -> CubicSpline:
        return CubicSpline(self.grid_R, self.d, bc_type="natural")


@dataclass(frozen=True, eq=False)
class RovibState:
    label: ElectronicLabel
    v: int
    J: HalfInteger
    energy: float
    grid: np.ndarray
    wavefunction: np.ndarray

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def nodes(self, rel_floor=1e-6) -> int:
        psi = self.wavefunction
        big = psi[np.abs(psi) > rel_floor * np.abs(psi).max()]
        return int(np.count_nonzero(np.diff(np.sign(big))))


@dataclass(frozen=True)
class Transition:
    """One vibronic transition n -> n' feeding the sum-over-states.

    ``omega`` is E(n') - E(n) in hartree and ``dipole`` the body-fixed
    matrix element (atomic units). ``J_upper`` of None means the rotational
    levels of the upper state are degenerate and summed over.
    """

    omega: float
    dipole: float
    lower: ElectronicLabel
    upper: ElectronicLabel
    v_lower: int = 0
    v_upper: int = 0
    J_upper: HalfInteger | None = None

    @property
    def parallel(self) -> bool:
        return self.lower.Lambda == self.upper.Lambda


def sinc_dvr_kinetic(n: int, dx: float, mass: float) -> np.ndarray:
    """Colbert-Miller kinetic-energy matrix on n equally spaced points."""
    i = np.arange(n)
    diff = i[:, None] - i[None, :]
    with np.errstate(divide="ignore"):
        T = 2.0 * (-1.0) ** diff / diff.astype(float) ** 2
    T[i, i] = math.pi**2 / 3.0
    return T / (2.0 * mass * dx**2)


def _box_grid(curve, r_min, r_max, step):
    lo = curve.grid_R[0] if r_min is None else r_min
    hi = curve.grid_R[-1] if r_max is None else r_max
    if lo < curve.grid_R[0] - 1e-12 or hi > curve.grid_R[-1] + 1e-12 or hi <= lo:
        raise ValueError("the solver box must lie inside the tabulated curve range")
    n = int(round((hi - lo) / step))
    # interior points only: the box edges are the hard walls
    return lo + step * np.arange(1, n)


def _solve(curve, J, count, grid, mass, centrifugal):
    V = curve.spline()(grid)
    if centrifugal:
        j = float(J)
        V = V + j * (j + 1) / (2 * mass * grid**2)
    H = sinc_dvr_kinetic(len(grid), grid[1] - grid[0], mass)
    H[np.diag_indices_from(H)] += V
    return eigh(H, subset_by_index=[0, count - 1], driver="evr")


def solve_vibrational(
    curve: ElectronicCurve,
    J=0,
    count: int = 1,
    r_min: float | None = None,
    r_max: float | None = None,
    step: float = 0.02,
    mass: float | None = None,
    centrifugal: bool = False,
    check_convergence: bool = False,
) -> list[RovibState]:
    """Lowest ``count`` rovibrational eigenstates of one electronic curve.

    Energies in hartree, lengths in bohr. ``mass`` is the vibrational
    reduced mass (default: 87Rb2). The centrifugal term J(J+1)/(2 mu R^2)
    is only added when ``centrifugal`` is set.
    """
    mass = C.reduced_mass(87) if mass is None else mass
    J = HalfInteger.of(J)
    grid = _box_grid(curve, r_min, r_max, step)
    if count < 1 or count > len(grid) - 2:
        raise ValueError(f"count must be in [1, {len(grid) - 2}] for this grid")
    energies, vecs = _solve(curve, J, count, grid, mass, centrifugal)

    if check_convergence:
        fine = _box_grid(curve, r_min, r_max, step / 2)
        e_fine, _ = _solve(curve, J, 1, fine, mass, centrifugal)
        if abs(e_fine[0] - energies[0]) > 1e-8:
            raise GridTooCoarse(
                f"ground energy moved by {abs(e_fine[0] - energies[0]):.3e} hartree on halving the step {step}"
            )

    dx = grid[1] - grid[0]
    states = []
    for v in range(count):
        psi = vecs[:, v] / math.sqrt(dx)
        # deterministic sign: first appreciable lobe positive
        first = np.nonzero(np.abs(psi) > 1e-3 * np.abs(psi).max())[0][0]
        if psi[first] < 0:
            psi = -psi
        states.append(RovibState(curve.label, v, J, float(energies[v]), grid, psi))
    return states


def _on_grid(state: RovibState, grid: np.ndarray) -> np.ndarray:
    if len(grid) == len(state.grid) and np.allclose(grid, state.grid, rtol=0, atol=1e-12):
        return state.wavefunction
    # pad with the hard-wall zeros so the spline vanishes at the box edges
    g = np.concatenate(([state.grid[0] - state.step], state.grid, [state.grid[-1] + state.step]))
    psi = np.concatenate(([0.0], state.wavefunction, [0.0]))
    out = CubicSpline(g, psi)(grid)
    out[(grid < g[0]) | (grid > g[-1])] = 0.0
    return out


def _common_grid(bra: RovibState, ket: RovibState) -> np.ndarray:
    if len(bra.grid) == len(ket.grid) and np.allclose(bra.grid, ket.grid, rtol=0, atol=1e-12):
        return bra.grid
    step = min(bra.step, ket.step)
    lo = min(bra.grid[0], ket.grid[0])
    hi = max(bra.grid[-1], ket.grid[-1])
    return lo + step * np.arange(int(round((hi - lo) / step)) + 1)


def transition_dipole_me(bra: RovibState, ket: RovibState, dipole: DipoleFunction) -> float:
    """Radial integral <chi_bra| d(R) |chi_ket> on a common uniform grid."""
    grid = _common_grid(bra, ket)
    dx = grid[1] - grid[0]
    pb, pk = _on_grid(bra, grid), _on_grid(ket, grid)
    inside = (grid >= dipole.grid_R[0]) & (grid <= dipole.grid_R[-1])
    for p in (pb, pk):
        total = np.sum(p**2)
        if total > 0 and np.sum(p[~inside] ** 2) / total > 1e-6:
            raise CoverageError("more than 1e-6 of the wavefunction norm lies outside the dipole data range")
    d = np.zeros_like(grid)
    d[inside] = dipole.spline()(grid[inside])
    return float(np.sum(pb * d * pk) * dx)


def transition_table(initial: RovibState, finals, dipoles, threshold=1e-12) -> list[Transition]:
    """Transitions from ``initial`` to each state in ``finals``, sorted by frequency.

    ``dipoles`` is a single DipoleFunction or a mapping from the upper
    electronic label to its DipoleFunction. Matrix elements below
    ``threshold`` (au) are dropped.
    """
    table = []
    for f in finals:
        dip = dipoles if isinstance(dipoles, DipoleFunction) else dipoles[f.label]
        me = transition_dipole_me(initial, f, dip)
        if abs(me) < threshold:
            continue
        table.append(Transition(
            omega=f.energy - initial.energy,
            dipole=me,
            lower=initial.label,
            upper=f.label,
            v_lower=initial.v,
            v_upper=f.v,
        ))
    table.sort(key=lambda t: (t.omega, str(t.upper), t.v_upper))
    return table


# ---------------------------------------------------------------------------
# file formats

_R_UNITS = {"bohr": 1.0, "angstrom": C.angstrom_to_bohr(1.0)}
_V_UNITS = {"hartree": 1.0, "cm-1": 1.0 / C.HARTREE_CM}
_D_UNITS = {"au": 1.0}


def load_table(path):
    """Read a two-column whitespace table; returns (R_bohr, values, quantity).

    The mandatory ``# units:`` header fixes the unit of each column, e.g.
    ``# units: R=angstrom V=cm-1`` or ``# units: R=bohr d=au``.
    """
    path = Path(path)
    units = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                body = s.lstrip("#").strip()
                if body.lower().startswith("units:"):
                    units = dict(tok.split("=", 1) for tok in body[6:].split())
                continue
            parts = s.split()
            if len(parts) != 2:
                raise ConfigError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: non-numeric entry") from None
    if units is None:
        raise ConfigError(f"{path}: missing '# units:' header")
    try:
        r_scale = _R_UNITS[units["R"]]
    except KeyError:
        raise ConfigError(f"{path}: R unit must be one of {sorted(_R_UNITS)}") from None
    if "V" in units:
        quantity, table = "V", _V_UNITS
    elif "d" in units:
        quantity, table = "d", _D_UNITS
    else:
        raise ConfigError(f"{path}: units header needs V=... or d=...")
    if units[quantity] not in table:
        raise ConfigError(f"{path}: {quantity} unit must be one of {sorted(table)}")
    arr = np.array(rows, dtype=float)
    return arr[:, 0] * r_scale, arr[:, 1] * table[units[quantity]], quantity


def load_curve(path, label: ElectronicLabel) -> ElectronicCurve:
    R, V, quantity = load_table(path)
    if quantity != "V":
        raise ConfigError(f"{path}: expected a potential table (V=...)")
    return ElectronicCurve(label, R, V)


def load_dipole(path, from_label: ElectronicLabel, to_label: ElectronicLabel) -> DipoleFunction:
    R, d, quantity = load_table(path)
    if quantity != "d":
        raise ConfigError(f"{path}: expected a dipole table (d=...)")
    return DipoleFunction(from_label, to_label, R, d)


@dataclass
class MolecularData:
    initial: str
    curves: dict[str, ElectronicCurve]
    dipoles: dict[str, DipoleFunction]
    settings: dict = field(default_factory=dict)


def _read_kv(path):
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            if "=" not in s:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            k, v = s.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def load_manifest(path) -> MolecularData:
    """Parse a key=value manifest of curve and dipole files.

    Keys::

        initial = <curve name>
        curve.<name>.file / .lambda / .spin / .symmetry / .index
        dipole.<upper curve name>.file      (dipole from the initial curve)
        vibrational.count, grid.step, grid.r_min, grid.r_max, isotope

    Relative paths are resolved against the manifest's directory.
    """
    path = Path(path)
    kv = _read_kv(path)
    base = path.parent

    def need(key):
        if key not in kv:
            raise ConfigError(f"{path}: missing key '{key}'")
        return kv[key]

    names = sorted({k.split(".")[1] for k in kv if k.startswith("curve.")})
    labels = {}
    curves = {}
    for name in names:
        pre = f"curve.{name}"
        try:
            label = ElectronicLabel(
                Lambda=int(need(pre + ".lambda")),
                S=HalfInteger.of(float(need(pre + ".spin"))),
                symmetry=kv.get(pre + ".symmetry", ""),
                index=int(kv.get(pre + ".index", 1)),
                name=name,
            )
        except ValueError as exc:
            raise ConfigError(f"{path}: bad label for curve '{name}': {exc}") from None
        labels[name] = label
        curves[name] = load_curve(base / need(pre + ".file"), label)

    initial = need("initial")
    if initial not in curves:
        raise ConfigError(f"{path}: initial curve '{initial}' is not defined")
    dipoles = {}
    for key in sorted(k for k in kv if k.startswith("dipole.") and k.endswith(".file")):
        upper = key.split(".")[1]
        if upper not in labels:
            raise ConfigError(f"{path}: dipole to unknown curve '{upper}'")
        dipoles[upper] = load_dipole(base / kv[key], labels[initial], labels[upper])

    settings = {}
    for key, cast in (("vibrational.count", int), ("grid.step", float), ("grid.r_min", float),
                      ("grid.r_max", float), ("isotope", int)):
        if key in kv:
            try:
                settings[key] = cast(kv[key])
            except ValueError:
                raise ConfigError(f"{path}: key '{key}' has invalid value {kv[key]!r}") from None
    return MolecularData(initial, curves, dipoles, settings)


def build_transitions(data: MolecularData, v: int = 0, J=1, count: int | None = None) -> list[Transition]:
    """Transition table from state ``v`` of the initial curve to all upper curves."""
    s = data.settings
    count = s.get("vibrational.count", 500) if count is None else count
    mass = C.reduced_mass(s.get("isotope", 87))
    kw = dict(step=s.get("grid.step", 0.02), r_min=s.get("grid.r_min"), r_max=s.get("grid.r_max"), mass=mass)
    lower = solve_vibrational(data.curves[data.initial], J=J, count=v + 1, **kw)[v]
    table = []
    for upper, dip in data.dipoles.items():
        finals = solve_vibrational(data.curves[upper], J=J, count=count, **kw)
        table.extend(transition_table(lower, finals, dip))
    table.sort(key=lambda t: (t.omega, str(t.upper), t.v_upper))
    return table
