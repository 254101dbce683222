"""Dynamic polarisability tensors of rovibrational states in Hund's cases (a) and (b).

The sum-over-states runs over vibronic transitions; each is expanded into
its rotational (and, for Pi states, both Lambda' = +-1) channels with the
line-strength factors below. Atomic units throughout (hbar = 1).
"""

from __future__ import annotations

import re
import warnings
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from . import constants as C
from .errors import CaseMismatch, ConfigError, ResonanceProximity
from .molecular_structure import Transition
from .special_math import HalfInteger, clebsch_gordan, wigner_3j, wigner_6j

__all__ = [
    "StateLabel",
    "PolarisabilityTensor",
    "parse_state",
    "line_strength_case_a",
    "line_strength_case_b",
    "upper_channels",
    "polarisability_tensor",
    "decompose_parallel_perp",
    "alignment_analytic",
    "tensor_from_parallel_perp",
    "tensor_from_cartesian",
    "nearest_resonances",
    "polar_report",
]

MU = (-1, 0, 1)


def _hi(x):
    return x if isinstance(x, HalfInteger) else HalfInteger.of(x)


@dataclass(frozen=True)
class StateLabel:
    """Quantum numbers of a space-fixed molecular state.

    Case (a): (Lambda, S, Sigma, v, J, M) with Omega = Lambda + Sigma.
    Case (b): (Lambda, S, N, v, J, M).
    """

    hund_case: str
    Lambda: int
    S: HalfInteger
    J: HalfInteger
    M: HalfInteger
    v: int = 0
    Sigma: HalfInteger | None = None
    N: int | None = None

    def __post_init__(self):
        for name in ("S", "J", "M"):
            object.__setattr__(self, name, _hi(getattr(self, name)))
        if self.Sigma is not None:
            object.__setattr__(self, "Sigma", _hi(self.Sigma))
        if abs(self.M.twice_value) > self.J.twice_value:
            raise ValueError(f"|M| > J in {self}")
        if (self.J.twice_value - self.M.twice_value) % 2:
            raise ValueError(f"J and M parity differ in {self}")
        if self.hund_case == "a":
            if self.Sigma is None:
                raise ValueError("case (a) label needs Sigma")
            if abs(self.Sigma.twice_value) > self.S.twice_value:
                raise ValueError(f"|Sigma| > S in {self}")
            if abs(self.Omega.twice_value) > self.J.twice_value:
                raise ValueError(f"|Omega| > J in {self}")
        elif self.hund_case == "b":
            if self.N is None:
                raise ValueError("case (b) label needs N")
            if abs(self.Lambda) > self.N:
                raise ValueError(f"|Lambda| > N in {self}")
            tn, tj, ts = 2 * self.N, self.J.twice_value, self.S.twice_value
            if not (abs(tj - ts) <= tn <= tj + ts and (tn + tj + ts) % 2 == 0):
                raise ValueError(f"N, S, J violate the triangle rule in {self}")
        else:
            raise ValueError(f"hund_case must be 'a' or 'b', got {self.hund_case!r}")

    @property
    def Omega(self) -> HalfInteger:
        return self.Sigma + self.Lambda

    def spec(self) -> str:
        if self.hund_case == "a":
            return f"a:L={self.Lambda},S={self.S},Sigma={self.Sigma},v={self.v},J={self.J},M={self.M}"
        return f"b:L={self.Lambda},S={self.S},N={self.N},v={self.v},J={self.J},M={self.M}"

    def __str__(self):
        return self.spec()


_STATE_RE = re.compile(r"^\s*([ab])\s*:\s*(.*)$")


def parse_state(spec: str) -> StateLabel:
    """Parse ``a:L=0,S=1,Sigma=1,v=0,J=1,M=0`` or ``b:L=0,S=1,N=0,v=0,J=1,M=0``."""
    m = _STATE_RE.match(spec)
    if not m:
        raise ConfigError(f"state spec {spec!r} must start with 'a:' or 'b:'")
    case, body = m.groups()
    fields = {}
    for tok in filter(None, (t.strip() for t in body.split(","))):
        if "=" not in tok:
            raise ConfigError(f"state spec {spec!r}: bad token {tok!r}")
        k, v = (s.strip() for s in tok.split("=", 1))
        fields[k] = v
    allowed = {"a": {"L", "S", "Sigma", "v", "J", "M"}, "b": {"L", "S", "N", "v", "J", "M"}}[case]
    unknown = set(fields) - allowed
    missing = allowed - set(fields) - {"v"}
    if unknown or missing:
        raise ConfigError(f"state spec {spec!r}: unknown keys {sorted(unknown)}, missing {sorted(missing)}")

    def num(key):
        try:
            return HalfInteger.of(Fraction(fields[key]))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"state spec {spec!r}: {key}={fields[key]!r} is not a (half-)integer") from None

    try:
        return StateLabel(
            hund_case=case,
            Lambda=int(num("L")),
            S=num("S"),
            J=num("J"),
            M=num("M"),
            v=int(fields.get("v", 0)),
            Sigma=num("Sigma") if case == "a" else None,
            N=int(num("N")) if case == "b" else None,
        )
    except ValueError as exc:
        raise ConfigError(f"state spec {spec!r}: {exc}") from None


def _parity(twice_exp: int) -> int:
    # (-1)^(twice_exp/2) for an even doubled exponent
    return -1 if (twice_exp // 2) % 2 else 1


def line_strength_case_a(n: StateLabel, n_up: StateLabel, mu: int, dipole_me: float) -> float:
    """<n|d_-mu|n'><n'|d_mu|n> for Hund's case (a) states."""
    if n.hund_case != "a" or n_up.hund_case != "a":
        raise CaseMismatch("line_strength_case_a needs two case (a) labels")
    if n_up.S != n.S or n_up.Sigma != n.Sigma or n_up.M != n.M + mu or abs(n.Lambda - n_up.Lambda) > 1:
        return 0.0
    J, Jp = n.J, n_up.J
    w1 = wigner_3j(J, 1, Jp, -n.M, -mu, n_up.M)
    if w1 == 0.0:
        return 0.0
    w2 = wigner_3j(J, 1, Jp, -n.Omega, n.Lambda - n_up.Lambda, n_up.Omega)
    return (_parity(2 * mu) * (J.twice_value + 1) * (Jp.twice_value + 1)
            * dipole_me**2 * w1**2 * w2**2)


def line_strength_case_b(n: StateLabel, n_up: StateLabel, mu: int, dipole_me: float) -> float:
    """<n|d_-mu|n'><n'|d_mu|n> for Hund's case (b) states."""
    if n.hund_case != "b" or n_up.hund_case != "b":
        raise CaseMismatch("line_strength_case_b needs two case (b) labels")
    if n_up.S != n.S or n_up.M != n.M + mu or abs(n.Lambda - n_up.Lambda) > 1:
        return 0.0
    J, Jp, N, Np = n.J, n_up.J, n.N, n_up.N
    w1 = wigner_3j(J, 1, Jp, -n.M, -mu, n_up.M)
    if w1 == 0.0:
        return 0.0
    w6 = wigner_6j(1, Jp, J, n.S, N, Np)
    w2 = wigner_3j(N, 1, Np, -n.Lambda, n.Lambda - n_up.Lambda, n_up.Lambda)
    # (-1)^mu from d_-mu = (-1)^mu d_mu^dagger; an extra (-1)^(2M) would flip the sign for half-integer M
    phase = _parity(2 * mu)
    return (phase * (2 * N + 1) * (2 * Np + 1) * (J.twice_value + 1) * (Jp.twice_value + 1)
            * dipole_me**2 * w6**2 * w2**2 * w1**2)


def _j_range(a: HalfInteger, b: HalfInteger):
    lo, hi = abs(a.twice_value - b.twice_value), a.twice_value + b.twice_value
    return [HalfInteger(t) for t in range(lo, hi + 1, 2)]


def upper_channels(state: StateLabel, upper_lambda: int, mu: int, J_upper=None):
    """Upper-state labels reachable from ``state`` by d_mu with the given signed Lambda'."""
    Mp = state.M + mu
    out = []
    if state.hund_case == "a":
        for Jp in _j_range(state.J, HalfInteger(2)):
            if J_upper is not None and Jp != J_upper:
                continue
            Omp = state.Sigma + upper_lambda
            if abs(Mp.twice_value) > Jp.twice_value or abs(Omp.twice_value) > Jp.twice_value:
                continue
            out.append(StateLabel("a", upper_lambda, state.S, Jp, Mp, Sigma=state.Sigma))
    else:
        for Np in range(abs(state.N - 1), state.N + 2):
            if Np < abs(upper_lambda):
                continue
            for Jp in _j_range(HalfInteger(2 * Np), state.S):
                if J_upper is not None and Jp != J_upper:
                    continue
                if abs(Jp.twice_value - state.J.twice_value) > 2 or abs(Mp.twice_value) > Jp.twice_value:
                    continue
                out.append(StateLabel("b", upper_lambda, state.S, Jp, Mp, N=Np))
    return out


def _line_strength(state, up, mu, d):
    fn = line_strength_case_a if state.hund_case == "a" else line_strength_case_b
    return fn(state, up, mu, d)


def _angular_weights(state: StateLabel, upper_abs_lambda: int, J_upper=None) -> np.ndarray:
    """Per-mu line strength with |d| = 1, summed over all upper channels."""
    lambdas = (0,) if upper_abs_lambda == 0 else (upper_abs_lambda, -upper_abs_lambda)
    w = np.zeros(3)
    for i, mu in enumerate(MU):
        for lam in lambdas:
            if abs(state.Lambda - lam) > 1:
                continue
            for up in upper_channels(state, lam, mu, J_upper):
                w[i] += _line_strength(state, up, mu, 1.0)
    return w


@dataclass(frozen=True, eq=False)
class PolarisabilityTensor:
    """Polarisability of one state at one frequency (atomic units).

    ``spherical[mu + 1, nu + 1]`` holds alpha_{mu nu}; only the nu = -mu
    entries are populated by the sum-over-states.
    """

    state: StateLabel
    frequency: float
    spherical: np.ndarray
    parallel: float | None = None
    perpendicular: float | None = None
    alignment: tuple = field(default=None)

    def __post_init__(self):
        if self.alignment is None:
            object.__setattr__(self, "alignment", _extract_alignment(self))

    @property
    def cartesian_diag(self) -> tuple:
        sp = self.spherical
        xx = -0.5 * (sp[2, 0] + sp[0, 2])
        return (xx, xx, sp[1, 1])

    @property
    def cartesian(self) -> np.ndarray:
        return np.diag(self.cartesian_diag)

    @property
    def scalar(self) -> float:
        sp = self.spherical
        return (-sp[0, 2] + sp[1, 1] - sp[2, 0]) / 3.0

    def as_dict(self) -> dict:
        xx, yy, zz = self.cartesian_diag
        return {
            "state": self.state.spec(),
            "frequency_cm": self.frequency,
            "alpha_scalar": self.scalar,
            "alpha_parallel": self.parallel,
            "alpha_perpendicular": self.perpendicular,
            "alpha_XX": xx,
            "alpha_YY": yy,
            "alpha_ZZ": zz,
            "spherical": {f"{m},{n}": self.spherical[m + 1, n + 1] for m in MU for n in MU},
            "alignment": {"a_X": self.alignment[0], "a_Y": self.alignment[1], "a_Z": self.alignment[2]},
        }


def _extract_alignment(t: PolarisabilityTensor):
    if t.parallel is None or t.perpendicular is None or np.isclose(t.parallel, t.perpendicular, rtol=1e-12, atol=0):
        return alignment_analytic(t.state)
    return tuple((aii - t.perpendicular) / (t.parallel - t.perpendicular) for aii in t.cartesian_diag)


def _resonance_check(omega_au, transitions, guard_cm):
    if not transitions:
        return
    det = np.array([t.omega for t in transitions]) - omega_au
    i = int(np.argmin(np.abs(det)))
    if abs(det[i]) < C.cm_to_hartree(guard_cm):
        t = transitions[i]
        warnings.warn(ResonanceProximity(
            f"{C.hartree_to_cm(omega_au):.3f} cm^-1 lies within {guard_cm} cm^-1 of the "
            f"{t.lower}(v={t.v_lower}) -> {t.upper}(v={t.v_upper}) transition at {C.hartree_to_cm(t.omega):.3f} cm^-1"
        ), stacklevel=3)


def _spherical_sum(state, omega_au, transitions, select=None):
    sp = np.zeros((3, 3))
    groups = {}
    for t in transitions:
        if select is not None and not select(t):
            continue
        groups.setdefault((t.upper.Lambda, t.J_upper), []).append(t)
    for (lam, Jup), ts in sorted(groups.items(), key=lambda kv: (kv[0][0], -1 if kv[0][1] is None else kv[0][1].twice_value)):
        w = _angular_weights(state, lam, Jup)
        w0 = np.array([t.omega for t in ts])
        d2 = np.array([t.dipole for t in ts]) ** 2
        s = float(np.sum(2.0 * w0 / (w0**2 - omega_au**2) * d2))
        for i, mu in enumerate(MU):
            sp[i, 2 - i] += s * w[i]
    return sp


def polarisability_tensor(state: StateLabel, omega_cm: float, transitions, guard_cm: float = 1.0) -> PolarisabilityTensor:
    """Sum-over-states tensor of ``state`` at angular frequency ``omega_cm`` (cm^-1).

    Warns with ResonanceProximity when the frequency falls within
    ``guard_cm`` of any transition; evaluation proceeds regardless.
    """
    omega = C.cm_to_hartree(omega_cm)
    transitions = list(transitions)
    _resonance_check(omega, transitions, guard_cm)
    sp = _spherical_sum(state, omega, transitions)
    par, perp = _parallel_perp(state, omega, transitions)
    return PolarisabilityTensor(state, float(omega_cm), sp, par, perp)


def _scalar_of(sp):
    return (-sp[0, 2] + sp[1, 1] - sp[2, 0]) / 3.0


def _parallel_perp(state, omega, transitions):
    # alpha_par / alpha_perp normalised so that the isotropic average of the
    # parallel (perpendicular) channels is 1/3 (2/3) of their contribution
    par = 3.0 * _scalar_of(_spherical_sum(state, omega, transitions, lambda t: t.parallel))
    perp = 1.5 * _scalar_of(_spherical_sum(state, omega, transitions, lambda t: not t.parallel))
    return par, perp


def decompose_parallel_perp(state: StateLabel, omega_cm: float, transitions) -> tuple[float, float]:
    """(alpha_par, alpha_perp) from the Sigma-Sigma and Sigma-Pi transitions separately."""
    return _parallel_perp(state, C.cm_to_hartree(omega_cm), list(transitions))


def _cos2_case_a(J: HalfInteger, Omega: HalfInteger, M: HalfInteger) -> float:
    # <J Omega M| cos^2 theta |J Omega M> = 1/3 + 2/3 <P2>
    p2 = (J.twice_value + 1) * wigner_3j(J, 2, J, -M, 0, M) * wigner_3j(J, 2, J, -Omega, 0, Omega)
    p2 *= _parity(M.twice_value - Omega.twice_value)
    return 1.0 / 3.0 + 2.0 / 3.0 * p2


def alignment_analytic(state: StateLabel) -> tuple[float, float, float]:
    """(a_X, a_Y, a_Z) = <(e_i . e_z)^2> over the rotational wavefunction."""
    if state.hund_case == "a":
        az = _cos2_case_a(state.J, state.Omega, state.M)
    else:
        # case (b) as a superposition of case (a) states of equal J, M
        az = 0.0
        for t in range(-state.S.twice_value, state.S.twice_value + 1, 2):
            Sigma = HalfInteger(t)
            Omega = Sigma + state.Lambda
            if abs(Omega.twice_value) > state.J.twice_value:
                continue
            c = clebsch_gordan(state.J, Omega, state.S, -Sigma, state.N, state.Lambda)
            az += c * c * _cos2_case_a(state.J, Omega, state.M)
    ax = 0.5 * (1.0 - az)
    return (ax, ax, az)


def tensor_from_parallel_perp(state: StateLabel, omega_cm: float, parallel: float, perpendicular: float) -> PolarisabilityTensor:
    """Tensor whose Cartesian components follow a_i alpha_par + (1 - a_i) alpha_perp."""
    a = alignment_analytic(state)
    xx = a[0] * parallel + (1 - a[0]) * perpendicular
    zz = a[2] * parallel + (1 - a[2]) * perpendicular
    return PolarisabilityTensor(state, float(omega_cm), _spherical_from_cartesian(xx, zz), parallel, perpendicular, a)


def tensor_from_cartesian(state: StateLabel, omega_cm: float, xx: float, zz: float,
                          parallel: float | None = None, perpendicular: float | None = None) -> PolarisabilityTensor:
    return PolarisabilityTensor(state, float(omega_cm), _spherical_from_cartesian(xx, zz), parallel, perpendicular)


def _spherical_from_cartesian(xx, zz):
    sp = np.zeros((3, 3))
    sp[2, 0] = sp[0, 2] = -xx
    sp[1, 1] = zz
    return sp


def nearest_resonances(omega_cm: float, transitions, count: int = 10) -> list[dict]:
    rows = []
    for t in transitions:
        w = C.hartree_to_cm(t.omega)
        rows.append({
            "upper": str(t.upper),
            "v_upper": t.v_upper,
            "wavenumber_cm": w,
            "detuning_cm": float(omega_cm) - w,
            "dipole_au": t.dipole,
        })
    rows.sort(key=lambda r: (abs(r["detuning_cm"]), r["wavenumber_cm"]))
    return rows[:count]


def polar_report(tensor: PolarisabilityTensor, transitions=(), warnings_list=()) -> dict:
    out = tensor.as_dict()
    out["nearest_resonances"] = nearest_resonances(tensor.frequency, transitions)
    out["warnings"] = list(warnings_list)
    return out
