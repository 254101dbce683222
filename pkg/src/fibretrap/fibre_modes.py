"""HE11 guided mode of a step-index nanofibre and its evanescent fields.

Only the exterior (R > a) branch of the field is implemented. Fields are
the positive-frequency components of the X-quasi-linearly polarised mode,
returned as complex arrays whose leading axis holds (E_X, E_Y, E_Z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from . import constants as C
from .errors import InsideFibre, MultipleRoots, NoGuidedMode
from .special_math import bessel_j, bessel_j_prime, bessel_k, bessel_k_prime

__all__ = [
    "FibreGeometry",
    "GuidedMode",
    "characteristic_residual",
    "solve_propagation_constant",
    "power_from_amplitude",
    "amplitude_from_power",
    "power_watts",
    "travelling_field",
    "standing_field",
    "intensity",
    "intensity_map",
]

EDGE_EPS = 1e-9
N_SCAN = 2000


@dataclass(frozen=True)
class FibreGeometry:
    radius_nm: float
    n1: float
    n2: float = 1.0

    def __post_init__(self):
        if not self.radius_nm > 0:
            raise ValueError("fibre radius must be positive")
        if not (self.n1 > self.n2 >= 1.0):
            raise ValueError("need n1 > n2 >= 1")

    @property
    def radius(self) -> float:
        """Radius in bohr."""
        return C.nm_to_bohr(self.radius_nm)


@dataclass(frozen=True)
class GuidedMode:
    """A solved HE11 mode. Lengths in bohr, inverse lengths in bohr^-1."""

    geometry: FibreGeometry
    wavenumber: float
    k0: float
    beta: float
    h: float
    q: float
    s: float
    amplitude: float = 0.0
    direction: int = 1

    @property
    def power(self) -> float:
        return power_from_amplitude(self, self.amplitude)

    @property
    def prefactor(self) -> float:
        """h J1(ha) / (q K1(qa)), the continuity factor of the exterior field."""
        a = self.geometry.radius
        return self.h * bessel_j(1, self.h * a) / (self.q * bessel_k(1, self.q * a))

    @property
    def standing_period(self) -> float:
        """Intensity period pi/beta of the standing wave, in bohr."""
        return math.pi / self.beta

    def with_amplitude(self, amplitude: float) -> "GuidedMode":
        return replace(self, amplitude=float(amplitude))

    def with_power(self, power: float) -> "GuidedMode":
        return replace(self, amplitude=amplitude_from_power(self, power))

    def reversed(self) -> "GuidedMode":
        return replace(self, direction=-self.direction)

    def adimensioned(self) -> dict:
        a = self.geometry.radius
        return {
            "wavenumber_cm": self.wavenumber,
            "ka": self.k0 * a,
            "beta_a": self.beta * a,
            "ha": self.h * a,
            "qa": self.q * a,
            "s": self.s,
            "amplitude_au": self.amplitude,
            "power_au": self.power,
            "power_W": power_watts(self, self.amplitude),
        }


def _k1_log_ratio(qa):
    return bessel_k_prime(1, qa) / (qa * bessel_k(1, qa))


def characteristic_residual(geometry: FibreGeometry, k0: float, beta):
    """LHS - RHS of the HE11 eigenvalue equation, as a function of beta.

    Vectorised over ``beta``; the equation is dimensionless so the
    residual is on its natural O(1) scale.
    """
    a, n1, n2 = geometry.radius, geometry.n1, geometry.n2
    beta = np.asarray(beta, dtype=float)
    ha = a * np.sqrt(k0**2 * n1**2 - beta**2)
    qa = a * np.sqrt(beta**2 - k0**2 * n2**2)
    kr = _k1_log_ratio(qa)
    lhs = bessel_j(0, ha) / (ha * bessel_j(1, ha))
    inv = 1.0 / qa**2 + 1.0 / ha**2
    root = np.sqrt(((n1**2 - n2**2) / (2 * n1**2) * kr) ** 2 + (beta / (n1 * k0)) ** 2 * inv**2)
    rhs = -(n1**2 + n2**2) / (2 * n1**2) * kr + 1.0 / ha**2 - root
    return lhs - rhs


def _s_parameter(ha, qa):
    num = 1.0 / ha**2 + 1.0 / qa**2
    den = bessel_j_prime(1, ha) / (ha * bessel_j(1, ha)) + _k1_log_ratio(qa)
    return num / den


def solve_propagation_constant(
    geometry: FibreGeometry,
    wavenumber: float,
    amplitude: float | None = None,
    power: float | None = None,
    direction: int = 1,
) -> GuidedMode:
    """Solve for the HE11 propagation constant at ``wavenumber`` (cm^-1).

    The residual is scanned on a uniform grid of beta*a inside the guided
    window to bracket sign changes, each bracket is refined by Brent's
    method, and sign changes that are poles rather than roots are dropped.
    Exactly one root is expected in the single-mode regime.
    """
    if amplitude is not None and power is not None:
        raise ValueError("give either amplitude or power, not both")
    a = geometry.radius
    k0 = C.wavenumber_to_k0(wavenumber)
    lo = (k0 * geometry.n2 * a + EDGE_EPS) / a
    hi = (k0 * geometry.n1 * a - EDGE_EPS) / a
    grid = np.linspace(lo, hi, N_SCAN)
    with np.errstate(all="ignore"):
        res = characteristic_residual(geometry, k0, grid)

    f = lambda b: float(characteristic_residual(geometry, k0, b))  # noqa: E731
    roots = []
    finite = np.isfinite(res)
    for i in np.nonzero(finite[:-1] & finite[1:] & (np.sign(res[:-1]) != np.sign(res[1:])))[0]:
        b = brentq(f, grid[i], grid[i + 1], xtol=1e-15 / a, rtol=4 * np.finfo(float).eps, maxiter=200)
        if abs(f(b)) < 1e-9:
            roots.append(b)
    if not roots:
        raise NoGuidedMode(f"no HE11 root in the guided window at {wavenumber} cm^-1")
    if len(roots) > 1:
        raise MultipleRoots(f"{len(roots)} roots found at {wavenumber} cm^-1: beta*a = {[r * a for r in roots]}")

    beta = roots[0]
    h = math.sqrt(k0**2 * geometry.n1**2 - beta**2)
    q = math.sqrt(beta**2 - k0**2 * geometry.n2**2)
    mode = GuidedMode(
        geometry=geometry,
        wavenumber=float(wavenumber),
        k0=k0,
        beta=beta,
        h=h,
        q=q,
        s=float(_s_parameter(h * a, q * a)),
        direction=int(direction),
    )
    if amplitude is not None:
        mode = mode.with_amplitude(amplitude)
    elif power is not None:
        mode = mode.with_power(power)
    return mode


def _power_factor(mode: GuidedMode) -> float:
    # Pi / A^2 from the guided-mode power integral (both regions)
    a = mode.geometry.radius
    h, q, b, s = mode.h, mode.q, mode.beta, mode.s
    ha, qa = h * a, q * a
    j0, j1 = bessel_j(0, ha), bessel_j(1, ha)
    k0_, k1 = bessel_k(0, qa), bessel_k(1, qa)
    inner = (1 + s**2 + h**2 / b**2) * (j0**2 + j1**2) - 2.0 / ha**2 * (1 + s) * (1 + s + h**2 / b**2) * j1**2
    outer = (1 + s**2 - q**2 / b**2) * (k1**2 - k0_**2) + 2.0 / qa**2 * (1 + s) * (1 + s - q**2 / b**2) * k1**2
    bracket = inner + (h * j1 / (q * k1)) ** 2 * outer
    return 4 * math.pi * a**2 / C.POWER_FORMULA_MU0_C * (b / mode.k0) * bracket


def power_from_amplitude(mode: GuidedMode, amplitude: float) -> float:
    return amplitude**2 * _power_factor(mode)


def amplitude_from_power(mode: GuidedMode, power: float) -> float:
    if power <= 0:
        raise ValueError("power must be positive")
    return math.sqrt(power / _power_factor(mode))


def power_watts(mode: GuidedMode, amplitude: float) -> float:
    """Beam power in watts for a field amplitude in atomic units."""
    scale = (C.FIELD_AU_V_M * C.BOHR_M) ** 2
    return power_from_amplitude(mode, amplitude) * scale


def _check_outside(mode, R):
    if np.any(np.asarray(R) <= mode.geometry.radius):
        raise InsideFibre("field requested at R <= a; only the exterior branch is available")


def _profiles(mode, R, theta):
    qR = mode.q * np.asarray(R, dtype=float)
    k0_, k1, k2 = bessel_k(0, qR), bessel_k(1, qR), bessel_k(2, qR)
    s = mode.s
    ex = (1 - s) * k0_ + (1 + s) * k2 * np.cos(2 * theta)
    ey = (1 + s) * k2 * np.sin(2 * theta)
    ez = 2 * mode.q / mode.beta * k1 * np.cos(theta)
    return ex, ey, ez


def travelling_field(mode: GuidedMode, R, theta, Z, direction: int | None = None):
    """Exterior field of a mode travelling in direction f = +1 or -1."""
    _check_outside(mode, R)
    f = mode.direction if direction is None else direction
    R, theta, Z = np.broadcast_arrays(np.asarray(R, float), np.asarray(theta, float), np.asarray(Z, float))
    ex, ey, ez = _profiles(mode, R, theta)
    pre = 1j * mode.amplitude * np.exp(1j * f * mode.beta * Z) * mode.prefactor
    return np.stack([pre * ex, pre * ey, pre * (-1j * f) * ez])


def standing_field(mode: GuidedMode, R, theta, Z):
    """Standing wave of two counter-propagating beams of equal amplitude."""
    _check_outside(mode, R)
    R, theta, Z = np.broadcast_arrays(np.asarray(R, float), np.asarray(theta, float), np.asarray(Z, float))
    ex, ey, ez = _profiles(mode, R, theta)
    pre = 2j * mode.amplitude * mode.prefactor
    c, sn = np.cos(mode.beta * Z), np.sin(mode.beta * Z)
    return np.stack([pre * ex * c, pre * ey * c, np.asarray(pre * ez * sn, dtype=complex)])


def intensity(field) -> np.ndarray:
    """|E_X|^2 + |E_Y|^2 + |E_Z|^2 summed over the leading axis."""
    return np.sum(np.abs(field) ** 2, axis=0)


def intensity_map(mode: GuidedMode, kind="travelling", plane="xy", fixed=0.0, extent=3.0, n=101):
    """|E|^2 on a square grid in units of a; points with R <= a are NaN.

    ``plane`` is "xy" (at Z = fixed*a) or "xz" (at Y = fixed*a). Returns
    (axis1, axis2, values) with values[i, j] at (axis1[i], axis2[j]).
    """
    if kind not in ("travelling", "standing"):
        raise ValueError(f"unknown field kind {kind!r}")
    a = mode.geometry.radius
    u = np.linspace(-extent, extent, n)
    U1, U2 = np.meshgrid(u, u, indexing="ij")
    if plane == "xy":
        X, Y, Z = U1, U2, np.full_like(U1, fixed)
    elif plane == "xz":
        X, Y, Z = U1, np.full_like(U1, fixed), U2
    else:
        raise ValueError(f"unknown plane {plane!r}")
    R = np.hypot(X, Y) * a
    theta = np.arctan2(Y, X)
    out = np.full(R.shape, np.nan)
    mask = R > a
    fn = travelling_field if kind == "travelling" else standing_field
    out[mask] = intensity(fn(mode, R[mask], theta[mask], Z[mask] * a))
    return u, u.copy(), out
