"""Bichromatic optical potential around the nanofibre and its analysis.

Public functions take lengths in units of the fibre radius a (R, X, Y, Z)
and report energies in mK, spring constants in mK a^-2 and harmonic
quanta in uK. Internally everything is converted to atomic units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.integrate import quad
from scipy.optimize import brentq, minimize, minimize_scalar

from . import constants as C
from .errors import AboveBarrier, InsideFibre, MissingDecomposition, NegativeCurvature, NoMinimum
from .fibre_modes import GuidedMode, standing_field, travelling_field
from .polarisability import PolarisabilityTensor, StateLabel

__all__ = [
    "TrapConfiguration",
    "Minimum",
    "TrapAnalysis",
    "potential",
    "potential_xyz",
    "vw_decomposition",
    "find_minimum",
    "second_derivative",
    "harmonic_fit",
    "weyl_count",
    "count_bound_states",
    "lobe_extent",
    "wkb_transmission",
    "wkb_exponent",
    "tunneling_exponent",
    "tunneling_estimate",
    "grid_export",
    "analyze",
]

DEFAULT_BOUNDARY_MK = -3.8


@dataclass
class TrapConfiguration:
    """Travelling (omega_1) and standing (omega_2) guided fields plus per-state tensors."""

    travelling: GuidedMode
    standing: GuidedMode
    tensors: dict = field(default_factory=dict)
    mass: float = field(default_factory=lambda: C.molecule_mass(87))
    fd_step: float = 1e-3
    ftol: float = 1e-12

    def __post_init__(self):
        if not self.travelling.wavenumber > self.standing.wavenumber:
            raise ValueError("the travelling field must be the higher-frequency one")
        if self.travelling.geometry != self.standing.geometry:
            raise ValueError("both fields must be guided by the same fibre")
        for state, pair in self.tensors.items():
            self._check_pair(state, pair)

    def _check_pair(self, state, pair):
        t1, t2 = pair
        if t1.frequency != self.travelling.wavenumber or t2.frequency != self.standing.wavenumber:
            raise ValueError(f"tensor frequencies for {state} do not match the field wavenumbers")

    def add_state(self, state: StateLabel, travelling: PolarisabilityTensor, standing: PolarisabilityTensor):
        self._check_pair(state, (travelling, standing))
        self.tensors[state] = (travelling, standing)

    @property
    def radius(self) -> float:
        return self.travelling.geometry.radius

    def scaled(self, factor: float) -> "TrapConfiguration":
        """Both field amplitudes multiplied by ``factor``."""
        return TrapConfiguration(
            self.travelling.with_amplitude(self.travelling.amplitude * factor),
            self.standing.with_amplitude(self.standing.amplitude * factor),
            dict(self.tensors), self.mass, self.fd_step, self.ftol,
        )


def _fields(config, R, theta, Z):
    a = config.radius
    R = np.asarray(R, dtype=float)
    if np.any(R <= 1.0):
        raise InsideFibre("potential requested at R <= a")
    e1 = travelling_field(config.travelling, R * a, theta, np.asarray(Z, float) * a)
    e2 = standing_field(config.standing, R * a, theta, np.asarray(Z, float) * a)
    return np.abs(e1) ** 2, np.abs(e2) ** 2


def _tensors(config, state):
    try:
        return config.tensors[state]
    except KeyError:
        raise KeyError(f"no polarisability tensors configured for {state}") from None


def _potential_au(config, state, R, theta, Z):
    t1, t2 = _tensors(config, state)
    i1, i2 = _fields(config, R, theta, Z)
    d1 = np.asarray(t1.cartesian_diag).reshape((3,) + (1,) * (i1.ndim - 1))
    d2 = np.asarray(t2.cartesian_diag).reshape((3,) + (1,) * (i2.ndim - 1))
    return -(np.sum(d1 * i1, axis=0) + np.sum(d2 * i2, axis=0))


def potential(config: TrapConfiguration, state: StateLabel, R, theta, Z):
    """U(R, Theta, Z) in mK: minus the sum over both fields of E* . alpha . E."""
    out = C.hartree_to_mK(_potential_au(config, state, R, theta, Z))
    return out[()] if np.ndim(out) == 0 else out


def potential_xyz(config, state, X, Y, Z):
    X, Y = np.asarray(X, float), np.asarray(Y, float)
    return potential(config, state, np.hypot(X, Y), np.arctan2(Y, X), Z)


def vw_decomposition(config, state, R, theta, Z):
    """(V, W, a_Z, V + a_Z W) in mK; the last entry reproduces ``potential``."""
    t1, t2 = _tensors(config, state)
    if any(t.parallel is None or t.perpendicular is None for t in (t1, t2)):
        raise MissingDecomposition(f"alpha_par / alpha_perp not available for {state}")
    i1, i2 = _fields(config, R, theta, Z)
    V = 0.0
    W = 0.0
    for t, inten in ((t1, i1), (t2, i2)):
        tot, ez = inten.sum(axis=0), inten[2]
        diff, add = t.parallel - t.perpendicular, t.parallel + t.perpendicular
        V = V + 0.5 * (diff * ez - add * tot)
        W = W + 0.5 * diff * (tot - 3 * ez)
    az = t1.alignment[2]
    V, W = C.hartree_to_mK(V), C.hartree_to_mK(W)
    return V, W, az, V + az * W


@dataclass(frozen=True)
class Minimum:
    R: float
    theta: float
    Z: float
    U: float
    xyz: tuple
    U_refined: float


def find_minimum(config, state, r_range=(1.0, 5.0), n_scan=400, theta=0.0) -> Minimum:
    """Radial golden-section search at (Theta, Z=0), confirmed by a 3D Nelder-Mead."""
    lo, hi = r_range
    rs = np.linspace(lo, hi, n_scan + 1)[1:]
    us = potential(config, state, rs, theta, 0.0)
    i = int(np.argmin(us))
    if i == 0 or i == len(rs) - 1:
        raise NoMinimum(f"U(R) is monotonic on ({lo}, {hi}] a for {state}",
                        scan=list(zip(rs.tolist(), np.asarray(us).tolist())))
    f = lambda r: float(potential(config, state, r, theta, 0.0))  # noqa: E731
    res = minimize_scalar(f, bracket=(rs[i - 1], rs[i], rs[i + 1]), method="golden", tol=1e-8)
    R = float(res.x)
    x0 = np.array([R * math.cos(theta), R * math.sin(theta), 0.0])
    u_au = lambda p: float(_potential_au(config, state, math.hypot(p[0], p[1]), math.atan2(p[1], p[0]), p[2]))  # noqa: E731
    nm = minimize(u_au, x0, method="Nelder-Mead",
                  options={"xatol": 1e-9, "fatol": config.ftol * abs(u_au(x0)), "maxiter": 4000,
                           "initial_simplex": x0 + 1e-3 * np.vstack([np.zeros(3), np.eye(3)])})
    if np.linalg.norm(nm.x - x0) > 1e-4:
        raise NoMinimum(f"3D refinement left the radial minimum by {np.linalg.norm(nm.x - x0):.2e} a")
    return Minimum(R, theta, 0.0, f(R), tuple(float(v) for v in nm.x), C.hartree_to_mK(nm.fun))


def second_derivative(f, h: float) -> float:
    """Central second difference of f at 0 with one Richardson step (h, h/2)."""
    f0 = f(0.0)

    def d2(step):
        return (f(step) - 2 * f0 + f(-step)) / step**2

    return (4 * d2(h / 2) - d2(h)) / 3


def _hbar_omega_uK(k_mK_a2, mass, radius):
    k_au = C.mK_to_hartree(k_mK_a2) / radius**2
    return C.hartree_to_uK(math.sqrt(k_au / mass))


def harmonic_fit(config, state, minimum: Minimum, h: float | None = None):
    """Spring constants (mK a^-2) and hbar*omega (uK) along X, Y, Z."""
    h = config.fd_step if h is None else h
    x0, y0, z0 = minimum.xyz
    axes = (
        lambda d: float(potential_xyz(config, state, x0 + d, y0, z0)),
        lambda d: float(potential_xyz(config, state, x0, y0 + d, z0)),
        lambda d: float(potential_xyz(config, state, x0, y0, z0 + d)),
    )
    k = tuple(second_derivative(f, h) for f in axes)
    if min(k) <= 0:
        raise NegativeCurvature(f"non-positive curvature {k} at the minimum for {state}")
    hw = tuple(_hbar_omega_uK(ki, config.mass, config.radius) for ki in k)
    return k, hw


def weyl_count(potential_au, center, half_widths, E_b, mass, n=24, rtol=1e-3, n_max=192):
    """Semiclassical count of states with energy below E_b in the lobe around ``center``.

    ``potential_au`` maps arrays (x, y, z) in bohr to energies in hartree.
    The phase-space integral (2m)^{3/2}/(6 pi^2) * int (E_b - U)^{3/2} d^3r
    runs over the connected sublevel set containing ``center`` (flood
    fill on a midpoint grid). The grid is doubled until successive
    estimates agree to ``rtol``; the box is grown if the lobe touches it.
    """
    center = np.asarray(center, float)
    half = np.asarray(half_widths, float)
    prev = None
    while True:
        axes = [c + hw * (2 * (np.arange(n) + 0.5) / n - 1) for c, hw in zip(center, half)]
        X, Y, Z = np.meshgrid(*axes, indexing="ij")
        U = potential_au(X, Y, Z)
        inside = U < E_b
        labels, _ = ndimage.label(inside)
        idx = tuple(int(np.argmin(np.abs(ax - c))) for ax, c in zip(axes, center))
        lab = labels[idx]
        if lab == 0:
            return 0.0
        lobe = labels == lab
        if lobe[0].any() or lobe[-1].any() or lobe[:, 0].any() or lobe[:, -1].any() \
                or lobe[:, :, 0].any() or lobe[:, :, -1].any():
            half = half * 1.5
            prev = None
            continue
        dV = np.prod(2 * half / n)
        integral = np.sum((E_b - U[lobe]) ** 1.5) * dV
        count = (2 * mass) ** 1.5 / (6 * math.pi**2) * integral
        if prev is not None and abs(count - prev) <= rtol * max(count, 1e-300):
            return float(count)
        if n >= n_max:
            return float(count)
        prev = count
        n *= 2


def lobe_extent(config, state, E_b=DEFAULT_BOUNDARY_MK, minimum: Minimum | None = None, step=0.01, max_dist=3.0):
    """Widths (in a) of the E_b sublevel set along X, Y, Z through the minimum."""
    m = find_minimum(config, state) if minimum is None else minimum
    if E_b <= m.U_refined:
        return (0.0, 0.0, 0.0)
    x0, y0, z0 = m.xyz
    out = []
    for axis in range(3):
        def g(d, axis=axis):
            p = [x0, y0, z0]
            p[axis] += d
            return float(potential_xyz(config, state, *p)) - E_b

        width = 0.0
        for sign in (1.0, -1.0):
            prev = 0.0
            d = step
            edge = None
            while d <= max_dist:
                p = [x0, y0, z0]
                p[axis] += sign * d
                if math.hypot(p[0], p[1]) <= 1.0 + 1e-9:
                    # the fibre surface bounds the lobe
                    lo_d, hi_d = prev, d
                    edge = brentq(lambda t: math.hypot(x0 + sign * t * (axis == 0), y0 + sign * t * (axis == 1)) - 1.0 - 1e-9,
                                  lo_d, hi_d) if g(sign * prev) < 0 else prev
                    break
                if g(sign * d) >= 0:
                    edge = brentq(lambda t: g(sign * t), prev, d, xtol=1e-12)
                    break
                prev, d = d, d + step
            if edge is None:
                edge = max_dist
            width += edge
        out.append(width)
    return tuple(out)


def count_bound_states(config, state, E_b=DEFAULT_BOUNDARY_MK, minimum: Minimum | None = None) -> int:
    """Semiclassical number of translational states below E_b in one lobe."""
    m = find_minimum(config, state) if minimum is None else minimum
    if E_b <= m.U_refined:
        return 0
    return int(round(_weyl_for(config, state, E_b, m)))


def _weyl_for(config, state, E_b, m):
    a = config.radius
    ext = lobe_extent(config, state, E_b, m)
    half = np.array([max(e, 1e-3) for e in ext]) * 0.75 * a
    center = np.array(m.xyz) * a

    def u_au(x, y, z):
        R = np.hypot(x, y) / a
        out = np.full(R.shape, np.inf)
        ok = R > 1.0
        out[ok] = _potential_au(config, state, R[ok], np.arctan2(y[ok], x[ok]), z[ok] / a)
        return out

    return weyl_count(u_au, center, half, C.mK_to_hartree(E_b), config.mass)


def wkb_transmission(u_of_s, E, s_lo, s_hi, mass, n_sample=4001, u_array=None):
    """exp(-2 int sqrt(2 m (U(s) - E)) ds) over the classically forbidden parts of [s_lo, s_hi]."""
    return math.exp(-wkb_exponent(u_of_s, E, s_lo, s_hi, mass, n_sample, u_array))


def wkb_exponent(u_of_s, E, s_lo, s_hi, mass, n_sample=4001, u_array=None):
    """2 int sqrt(2 m (U(s) - E)) ds over the classically forbidden parts of [s_lo, s_hi].

    Atomic units. Forbidden intervals are bracketed on a sample grid and
    their end points refined by root finding before quadrature.
    ``u_array``, if given, evaluates U on the whole sample grid at once.
    """
    s = np.linspace(s_lo, s_hi, n_sample)
    u = np.array([u_of_s(v) for v in s]) if u_array is None else np.asarray(u_array(s), dtype=float)
    if E >= u.max():
        raise AboveBarrier(f"E = {E:.6e} is above the barrier top {u.max():.6e}")
    g = lambda v: u_of_s(v) - E  # noqa: E731
    above = u > E
    exponent = 0.0
    i = 0
    while i < len(s):
        if not above[i]:
            i += 1
            continue
        j = i
        while j + 1 < len(s) and above[j + 1]:
            j += 1
        left = s_lo if i == 0 else brentq(g, s[i - 1], s[i], xtol=1e-15 * max(1.0, abs(s[i])))
        right = s_hi if j == len(s) - 1 else brentq(g, s[j], s[j + 1], xtol=1e-15 * max(1.0, abs(s[j])))
        val, _ = quad(lambda v: math.sqrt(max(2 * mass * g(v), 0.0)), left, right,
                      limit=400, epsabs=1e-13, epsrel=1e-11)
        exponent += val
        i = j + 1
    return 2.0 * exponent


def tunneling_exponent(config, state, E_mK, minimum: Minimum | None = None) -> float:
    """WKB exponent between the Theta = 0 and Theta = pi lobes along the arc R = R_min, Z = 0."""
    m = find_minimum(config, state) if minimum is None else minimum
    a = config.radius
    R = m.R
    u_of_s = lambda s: float(_potential_au(config, state, R, s / (R * a), 0.0))  # noqa: E731
    u_array = lambda s: _potential_au(config, state, np.full_like(s, R), s / (R * a), 0.0)  # noqa: E731
    return wkb_exponent(u_of_s, C.mK_to_hartree(E_mK), 0.0, math.pi * R * a, config.mass, u_array=u_array)


def tunneling_estimate(config, state, E_mK, minimum: Minimum | None = None) -> float:
    return math.exp(-tunneling_exponent(config, state, E_mK, minimum))


_PLANES = ("xz", "xy", "r", "theta", "z")


def grid_export(config, state, plane="xy", n=121, extent=3.0, minimum: Minimum | None = None):
    """Potential (mK) on a plane or along a 1D cut.

    Returns (column names, rows). Planes "xz" (Y = 0, Z over one standing
    period centred on 0) and "xy" (Z = 0) span [-extent, extent] a in X
    (and Y); points inside the fibre are NaN. Cuts "r" (Theta = 0, Z = 0),
    "theta" (R = R_min, Z = 0) and "z" (R = R_min, Theta = 0) follow the
    radial-minimum convention.
    """
    if plane not in _PLANES:
        raise ValueError(f"plane must be one of {_PLANES}")
    period = config.standing.standing_period / config.radius
    if plane in ("xz", "xy"):
        u = np.linspace(-extent, extent, n)
        v = np.linspace(-period / 2, period / 2, n) if plane == "xz" else u.copy()
        A, B = np.meshgrid(u, v, indexing="ij")
        X, Y, Z = (A, np.zeros_like(A), B) if plane == "xz" else (A, B, np.zeros_like(A))
        R = np.hypot(X, Y)
        vals = np.full(R.shape, np.nan)
        ok = R > 1.0
        vals[ok] = potential(config, state, R[ok], np.arctan2(Y[ok], X[ok]), Z[ok])
        names = ["X_over_a", "Z_over_a" if plane == "xz" else "Y_over_a", "U_mK"]
        rows = [(u[i], v[j], vals[i, j]) for i in range(n) for j in range(n)]
        return names, rows

    m = find_minimum(config, state) if minimum is None else minimum
    if plane == "r":
        x = np.linspace(1.0, 1.0 + extent, n + 1)[1:]
        vals = potential(config, state, x, 0.0, 0.0)
        return ["R_over_a", "U_mK"], list(zip(x, vals))
    if plane == "theta":
        x = np.linspace(-math.pi, math.pi, n)
        vals = potential(config, state, m.R, x, 0.0)
        return ["Theta_rad", "U_mK"], list(zip(x, vals))
    x = np.linspace(-period, period, n)
    vals = potential(config, state, m.R, 0.0, x)
    return ["Z_over_a", "U_mK"], list(zip(x, vals))


@dataclass
class TrapAnalysis:
    state: str
    R_min_a: float
    R_min_nm: float
    surface_distance_nm: float
    theta_min: float
    Z_min_a: float
    U_min_mK: float
    spring_constants_mK_a2: tuple
    hbar_omega_uK: tuple
    boundary_mK: float
    depth_uK: float
    bound_count: int
    bound_count_weyl: float
    lobe_extent_a: tuple
    lobe_extent_nm: tuple
    ground_level_mK: float
    tunneling_exponent: float
    standing_period_nm: float

    @property
    def tunneling_transmission(self) -> float:
        return math.exp(-self.tunneling_exponent)

    def as_dict(self) -> dict:
        k, w, e = self.spring_constants_mK_a2, self.hbar_omega_uK, self.lobe_extent_a
        en = self.lobe_extent_nm
        return {
            "state": self.state,
            "R_min": {"a": self.R_min_a, "nm": self.R_min_nm},
            "surface_distance_nm": self.surface_distance_nm,
            "Theta_min_rad": self.theta_min,
            "Z_min_a": self.Z_min_a,
            "U_min_mK": self.U_min_mK,
            "spring_constants_mK_per_a2": {"X": k[0], "Y": k[1], "Z": k[2]},
            "hbar_omega_uK": {"X": w[0], "Y": w[1], "Z": w[2]},
            "boundary_mK": self.boundary_mK,
            "depth_uK": self.depth_uK,
            "bound_states": {"count": self.bound_count, "weyl_integral": self.bound_count_weyl},
            "lobe_extent_a": {"X": e[0], "Y": e[1], "Z": e[2]},
            "lobe_extent_nm": {"X": en[0], "Y": en[1], "Z": en[2]},
            "ground_level_mK": self.ground_level_mK,
            "tunneling": {"wkb_exponent": self.tunneling_exponent,
                          "log10_transmission": -self.tunneling_exponent / math.log(10)},
            "standing_period_nm": self.standing_period_nm,
        }


def analyze(config, state, E_b=DEFAULT_BOUNDARY_MK) -> TrapAnalysis:
    m = find_minimum(config, state)
    k, hw = harmonic_fit(config, state, m)
    ext = lobe_extent(config, state, E_b, m)
    weyl = _weyl_for(config, state, E_b, m) if E_b > m.U_refined else 0.0
    ground = m.U_refined + 0.5 * sum(hw) * 1e-3
    a_nm = config.travelling.geometry.radius_nm
    return TrapAnalysis(
        state=state.spec(),
        R_min_a=m.R,
        R_min_nm=m.R * a_nm,
        surface_distance_nm=(m.R - 1.0) * a_nm,
        theta_min=m.theta,
        Z_min_a=m.Z,
        U_min_mK=m.U_refined,
        spring_constants_mK_a2=k,
        hbar_omega_uK=hw,
        boundary_mK=E_b,
        depth_uK=(E_b - m.U_refined) * 1e3,
        bound_count=int(round(weyl)),
        bound_count_weyl=weyl,
        lobe_extent_a=ext,
        lobe_extent_nm=tuple(e * a_nm for e in ext),
        ground_level_mK=ground,
        tunneling_exponent=tunneling_exponent(config, state, ground, m),
        standing_period_nm=C.bohr_to_nm(config.standing.standing_period),
    )
