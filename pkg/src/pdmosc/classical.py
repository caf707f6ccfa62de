"""Classical dynamics of the oscillator with mass m0/(1+gamma x)^2."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .errors import DomainError, RegimeError, WallCollisionError
from .params import ModelParams

PARABOLIC_TOL = 1e-12


class Regime(enum.Enum):
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class OrbitSpec:
    """Orbit of energy m0 omega0^2 A0^2 / 2; t0 is the turning-point time."""

    A0: float
    params: ModelParams = field(default_factory=ModelParams)
    t0: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.A0) and self.A0 >= 0):
            raise DomainError(f"A0 must be >= 0, got {self.A0!r}", "A0")

    @classmethod
    def from_gammaA0(cls, gammaA0: float, params: ModelParams, t0: float = 0.0):
        if params.is_undeformed:
            raise DomainError("gamma*A0 parametrisation needs gamma > 0", "gamma")
        return cls(A0=gammaA0 / params.gamma, params=params, t0=t0)

    @property
    def q(self) -> float:
        return self.params.gamma * self.A0

    @property
    def energy(self) -> float:
        p = self.params
        return 0.5 * p.m0 * p.omega0 ** 2 * self.A0 ** 2

    @property
    def A_gamma(self) -> float:
        return self.A0 / (1.0 - self.q ** 2)

    @property
    def Omega(self) -> float:
        return self.params.omega0 * math.sqrt(1.0 - self.q ** 2)

    @property
    def Lambda(self) -> float:
        # real growth rate for open orbits
        return self.params.omega0 * math.sqrt(self.q ** 2 - 1.0)

    @property
    def period(self) -> float:
        if classify_orbit(self) is not Regime.ELLIPTIC:
            raise RegimeError("open orbits have no period")
        return 2.0 * math.pi / self.Omega

    @property
    def x_min(self) -> float:
        return -self.A0 / (1.0 + self.q)

    @property
    def x_max(self) -> float:
        return self.A0 / (1.0 - self.q) if self.q < 1 else math.inf


@dataclass(frozen=True)
class ClassicalState:
    t: float
    x: float
    p: float


@dataclass(frozen=True)
class DeformedState:
    t: float
    x_gamma: float
    Pi_gamma: float


@dataclass
class Trajectory:
    """Time samples in both charts."""

    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    params: ModelParams

    @property
    def x_gamma(self):
        return to_deformed_arrays(self.x, self.p, self.params)[0]

    @property
    def Pi_gamma(self):
        return to_deformed_arrays(self.x, self.p, self.params)[1]

    @property
    def energy(self):
        return hamiltonian_xp(self.x, self.p, self.params)

    @property
    def velocity(self):
        g = self.params.gamma
        return (1.0 + g * self.x) ** 2 * self.p / self.params.m0


def classify_orbit(orb: OrbitSpec) -> Regime:
    q = orb.q
    if abs(q - 1.0) < PARABOLIC_TOL:
        return Regime.PARABOLIC
    return Regime.ELLIPTIC if q < 1.0 else Regime.HYPERBOLIC


def deformed_phase(orb: OrbitSpec, t):
    """Deformed phase theta(t), continuous in t.

    Elliptic orbits start at x_max (theta = 0) and the arctangent branch is
    lifted by 2 pi per period.  Open orbits start at the turning point x_min,
    where theta = pi, and theta decreases towards 0 as x grows without bound.
    """
    t = np.asarray(t, dtype=float)
    tau = t - orb.t0
    w = orb.params.omega0
    q = orb.q
    regime = classify_orbit(orb)
    if q == 0.0:
        th = w * tau
    elif regime is Regime.ELLIPTIC:
        u = orb.Omega * tau
        r = math.sqrt((1.0 - q) / (1.0 + q))
        k = np.floor(u / (2.0 * math.pi) + 0.5)
        half = 0.5 * u - k * math.pi
        # arctan2 avoids the tangent pole at the half period
        th = 2.0 * np.arctan2(r * np.sin(half), np.cos(half)) + 2.0 * math.pi * k
    elif regime is Regime.PARABOLIC:
        th = math.pi - 2.0 * np.arctan(w * tau)
    else:
        r = math.sqrt((q + 1.0) / (q - 1.0))
        th = math.pi - 2.0 * np.arctan(r * np.tanh(0.5 * orb.Lambda * tau))
    return float(th) if th.ndim == 0 else th


def exact_position(orb: OrbitSpec, t):
    """x(t) from the phase form A0 cos(theta) / (1 - gamma A0 cos(theta))."""
    th = np.asarray(deformed_phase(orb, t))
    c = np.cos(th)
    x = orb.A0 * c / (1.0 - orb.q * c)
    return float(x) if x.ndim == 0 else x


def exact_position_direct(orb: OrbitSpec, t):
    """x(t) written directly in time: cosine, polynomial or -cosh branch."""
    t = np.asarray(t, dtype=float)
    tau = t - orb.t0
    w = orb.params.omega0
    regime = classify_orbit(orb)
    if orb.q == 0.0:
        x = orb.A0 * np.cos(w * tau)
    elif regime is Regime.ELLIPTIC:
        x = orb.A_gamma * (np.cos(orb.Omega * tau) + orb.q)
    elif regime is Regime.PARABOLIC:
        x = 0.5 * orb.A0 * ((w * tau) ** 2 - 1.0)
    else:
        x = orb.A_gamma * (orb.q - np.cosh(orb.Lambda * tau))
    return float(x) if x.ndim == 0 else x


def exact_momentum(orb: OrbitSpec, t):
    th = np.asarray(deformed_phase(orb, t))
    P = orb.params
    p = -P.m0 * P.omega0 * orb.A0 * np.sin(th) * (1.0 - orb.q * np.cos(th))
    return float(p) if p.ndim == 0 else p


def exact_pseudomomentum(orb: OrbitSpec, t):
    th = np.asarray(deformed_phase(orb, t))
    P = orb.params
    Pi = -P.m0 * P.omega0 * orb.A0 * np.sin(th)
    return float(Pi) if Pi.ndim == 0 else Pi


def exact_trajectory(orb: OrbitSpec, t) -> Trajectory:
    t = np.asarray(t, dtype=float)
    return Trajectory(t=t, x=np.asarray(exact_position(orb, t)),
                      p=np.asarray(exact_momentum(orb, t)), params=orb.params)


def orbit_residual(orb: OrbitSpec, x, xdot):
    """Residual of the conic (ellipse, parabola or hyperbola) in the (x, xdot) plane."""
    x = np.asarray(x, dtype=float)
    xdot = np.asarray(xdot, dtype=float)
    w = orb.params.omega0
    A0 = orb.A0
    regime = classify_orbit(orb)
    if orb.q == 0.0:
        return x ** 2 / A0 ** 2 + xdot ** 2 / (A0 * w) ** 2 - 1.0
    if regime is Regime.PARABOLIC:
        return xdot ** 2 / (w * A0) ** 2 - (2.0 * x / A0 + 1.0)
    Ag = orb.A_gamma
    c = orb.q * Ag
    if regime is Regime.ELLIPTIC:
        return (x - c) ** 2 / Ag ** 2 + xdot ** 2 / (orb.Omega * Ag) ** 2 - 1.0
    return (x - c) ** 2 / Ag ** 2 - xdot ** 2 / (orb.Lambda * Ag) ** 2 - 1.0


# ------------------------------------------------------------------ charts


def _check_domain(x, params: ModelParams):
    if params.is_undeformed:
        return
    bad = np.asarray(1.0 + params.gamma * np.asarray(x, dtype=float)) <= 0.0
    if np.any(bad):
        raise DomainError(f"x must exceed the wall -1/gamma = {params.wall:g}", "x")


def to_deformed_arrays(x, p, params: ModelParams):
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    _check_domain(x, params)
    g = params.gamma
    if g == 0.0:
        return x.copy(), p.copy()
    return np.log1p(g * x) / g, (1.0 + g * x) * p


def from_deformed_arrays(xg, Pi, params: ModelParams):
    xg = np.asarray(xg, dtype=float)
    Pi = np.asarray(Pi, dtype=float)
    g = params.gamma
    if g == 0.0:
        return xg.copy(), Pi.copy()
    x = np.expm1(g * xg) / g
    return x, Pi / (1.0 + g * x)


def to_deformed(state: ClassicalState, params: ModelParams) -> DeformedState:
    xg, Pi = to_deformed_arrays(state.x, state.p, params)
    return DeformedState(t=state.t, x_gamma=float(xg), Pi_gamma=float(Pi))


def from_deformed(state: DeformedState, params: ModelParams) -> ClassicalState:
    x, p = from_deformed_arrays(state.x_gamma, state.Pi_gamma, params)
    return ClassicalState(t=state.t, x=float(x), p=float(p))


def hamiltonian_xp(x, p, params: ModelParams):
    x = np.asarray(x, dtype=float)
    _check_domain(x, params)
    u = 1.0 + params.gamma * x
    m0, w = params.m0, params.omega0
    return u ** 2 * p ** 2 / (2 * m0) + m0 * w ** 2 * x ** 2 / (2 * u ** 2)


def morse_hamiltonian_xp(xg, Pi, params: ModelParams):
    m0, w, g = params.m0, params.omega0, params.gamma
    if g == 0.0:
        return Pi ** 2 / (2 * m0) + 0.5 * m0 * w ** 2 * np.asarray(xg) ** 2
    # W (e^{-g y} - 1)^2 written as (m0 w^2 / 2) (expm1(-g y)/g)^2 to keep small-g accuracy
    return Pi ** 2 / (2 * m0) + 0.5 * m0 * w ** 2 * (np.expm1(-g * np.asarray(xg)) / g) ** 2


def hamiltonian(state: ClassicalState, params: ModelParams) -> float:
    return float(hamiltonian_xp(state.x, state.p, params))


def morse_hamiltonian(state: DeformedState, params: ModelParams) -> float:
    return float(morse_hamiltonian_xp(state.x_gamma, state.Pi_gamma, params))


def rk4_integrate(state0: ClassicalState, params: ModelParams, dt: float, steps: int,
                  wall_margin: float = 1e-9) -> Trajectory:
    """Fixed-step RK4 for dx/dt = dH/dp, dp/dt = -dH/dx."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    _check_domain(state0.x, params)
    xs, ps, hit = _kernels.rk4(float(state0.x), float(state0.p), params.m0, params.omega0,
                               params.gamma, float(dt), int(steps), float(wall_margin))
    if hit >= 0:
        raise WallCollisionError(f"trajectory reached the wall at step {hit}")
    t = state0.t + dt * np.arange(steps + 1)
    return Trajectory(t=t, x=xs, p=ps, params=params)


# --------------------------------------------------------- density, moments


def classical_density(orb: OrbitSpec, x):
    if not (0.0 <= orb.q < 1.0):
        raise RegimeError("classical density is defined for closed orbits only")
    x = np.asarray(x, dtype=float)
    Ag = orb.A_gamma
    d = Ag ** 2 - (x - orb.q * Ag) ** 2
    if np.any(d <= 0):
        raise DomainError("density diverges at and beyond the turning points", "x")
    rho = 1.0 / (math.pi * np.sqrt(d))
    return float(rho) if rho.ndim == 0 else rho


def classical_cdf(orb: OrbitSpec, x):
    """Probability of finding the particle left of x (arcsine law)."""
    Ag = orb.A_gamma
    u = np.clip((np.asarray(x, dtype=float) - orb.q * Ag) / Ag, -1.0, 1.0)
    return 0.5 + np.arcsin(u) / math.pi


def classical_moments(orb: OrbitSpec) -> dict:
    """Time averages over one period of a closed orbit."""
    if not (0.0 <= orb.q < 1.0):
        raise RegimeError("moments are defined for closed orbits (0 <= gamma A0 < 1)")
    P = orb.params
    q = orb.q
    A0 = orb.A0
    m0, w = P.m0, P.omega0
    r = math.sqrt(1.0 - q * q)
    E = orb.energy
    if q == 0.0:
        Pi2 = 0.5 * (m0 * w * A0) ** 2
    else:
        Pi2 = (m0 * w * A0) ** 2 * (1.0 - (1.0 - r) / q ** 2)
    V = E / (1.0 + r)
    return {
        "x": q * A0 / (1.0 - q * q),
        "x2": 0.5 * A0 ** 2 * (1.0 + 2.0 * q * q) / (1.0 - q * q) ** 2,
        "p": 0.0,
        "p2": 0.5 * (m0 * w * A0) ** 2 * r,
        "Pi": 0.0,
        "Pi2": Pi2,
        "m": m0 * r,
        "V": V,
        "T": E * r / (1.0 + r),
    }


# --------------------------------------------------- brackets, alpha, catalog


def poisson_bracket(f: Callable, g: Callable, x: float, p: float, h: float | None = None):
    """{f, g} = df/dx dg/dp - df/dp dg/dx by fourth-order central differences."""
    hx = h if h is not None else 1e-4 * max(1.0, abs(x))
    hp = h if h is not None else 1e-4 * max(1.0, abs(p))

    def dx(F):
        return (-F(x + 2 * hx, p) + 8 * F(x + hx, p) - 8 * F(x - hx, p) + F(x - 2 * hx, p)) / (12 * hx)

    def dp(F):
        return (-F(x, p + 2 * hp) + 8 * F(x, p + hp) - 8 * F(x, p - hp) + F(x, p - 2 * hp)) / (12 * hp)

    return dx(f) * dp(g) - dp(f) * dx(g)


def alpha_xp(x, p, params: ModelParams):
    x = np.asarray(x, dtype=float)
    _check_domain(x, params)
    u = 1.0 + params.gamma * x
    s0 = params.sigma0
    return (x / u + 1j * u * p / (params.m0 * params.omega0)) / (math.sqrt(2.0) * s0)


def alpha_variable(state: ClassicalState, params: ModelParams) -> complex:
    return complex(alpha_xp(state.x, state.p, params))


def alpha_bracket_closed_form(alpha: complex, params: ModelParams) -> float:
    """i hbar {alpha, alpha*} = 1 - (gamma sigma0/sqrt 2)(alpha + alpha*)."""
    return 1.0 - params.gamma_sigma0 / math.sqrt(2.0) * 2.0 * alpha.real


@dataclass(frozen=True)
class MorseMapEntry:
    """One member of the family H = p^2/(2M(x)) + m0 w^2 chi(x)^2 / 2 mapped onto Morse."""

    id: str
    chi: Callable
    M: Callable
    V: Callable
    eta: Callable
    domain: tuple
    sign: int  # +1 uses 1 - gamma chi, -1 uses 1 + gamma chi
    params: ModelParams

    def contains(self, x):
        x = np.asarray(x)
        return (x > self.domain[0]) & (x < self.domain[1])

    def Pi(self, x, p):
        return np.sqrt(self.params.m0 / self.M(x)) * p

    def H(self, x, p):
        return p ** 2 / (2.0 * self.M(x)) + self.V(x)


def morse_catalog(params: ModelParams = ModelParams(gamma=1.0)) -> list:
    if params.is_undeformed:
        raise DomainError("the catalog needs gamma > 0", "gamma")
    g, m0, w = params.gamma, params.m0, params.omega0
    k = 0.5 * m0 * w ** 2
    W = params.W_gamma
    inf = math.inf

    def entry(eid, chi, M, V, eta, dom, sign):
        return MorseMapEntry(eid, chi, M, V, eta, dom, sign, params)

    return [
        entry("a", lambda x: x / (1 + g * x), lambda x: m0 / (1 + g * x) ** 2,
              lambda x: k * x ** 2 / (1 + g * x) ** 2, lambda x: np.log1p(g * x) / g,
              (-1.0 / g, inf), +1),
        entry("b", lambda x: np.asarray(x, dtype=float), lambda x: m0 / (1 - g * x) ** 2,
              lambda x: k * np.asarray(x) ** 2, lambda x: -np.log1p(-g * x) / g,
              (-inf, 1.0 / g), +1),
        entry("c", lambda x: (np.sqrt(1 + (g * x) ** 2) - 1 - g * x) / g,
              lambda x: m0 / (1 + (g * x) ** 2),
              lambda x: W * (np.sqrt(1 + (g * x) ** 2) - 1 - g * x) ** 2,
              lambda x: np.arcsinh(g * x) / g, (-inf, inf), -1),
        entry("d", lambda x: -np.expm1(-np.arctan(g * x)) / g,
              lambda x: m0 / (1 + (g * x) ** 2) ** 2,
              lambda x: W * np.expm1(-np.arctan(g * x)) ** 2,
              lambda x: np.arctan(g * x) / g, (-inf, inf), +1),
        entry("e", lambda x: -np.expm1(-np.arctan(np.sinh(g * x))) / g,
              lambda x: m0 / np.cosh(g * x) ** 2,
              lambda x: W * np.expm1(-np.arctan(np.sinh(g * x))) ** 2,
              lambda x: np.arctan(np.sinh(g * x)) / g, (-inf, inf), +1),
        entry("f", lambda x: -np.expm1(-np.arcsinh(np.tan(g * x))) / g,
              lambda x: m0 / np.cos(g * x) ** 2,
              lambda x: W * np.expm1(-np.arcsinh(np.tan(g * x))) ** 2,
              lambda x: np.arcsinh(np.tan(g * x)) / g,
              (-0.5 * math.pi / g, 0.5 * math.pi / g), +1),
    ]


def _deriv5(f, x, h):
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


def catalog_verify(entry: MorseMapEntry, xs, ps=None) -> dict:
    """Check chart relations and H_chi = K_Morse for one catalog entry."""
    xs = np.asarray(xs, dtype=float)
    if not np.all(entry.contains(xs)):
        raise DomainError(f"samples outside the domain of entry {entry.id}", "x")
    P = entry.params
    g = P.gamma
    if ps is None:
        ps = np.zeros_like(xs)
    ps = np.asarray(ps, dtype=float)
    sgn = entry.sign
    chi = entry.chi(xs)
    base = 1.0 - sgn * g * chi
    # step scaled to the local length scale so the stencil stays inside the domain
    h = 1e-3 * np.minimum(1.0 / g, np.minimum(np.abs(xs - entry.domain[0]), np.abs(entry.domain[1] - xs)) / 4)
    dchi = _deriv5(entry.chi, xs, h)
    M_rel = entry.M(xs) / (P.m0 * (dchi / base) ** 2) - 1.0
    eta_rel = entry.eta(xs) - (-np.log(base) / g)
    H = entry.H(xs, ps)
    K = morse_hamiltonian_xp(entry.eta(xs), entry.Pi(xs, ps), P)
    scale = np.maximum(np.abs(H), np.finfo(float).tiny)
    return {
        "id": entry.id,
        "max_HK_rel": float(np.max(np.abs(H - K) / scale)),
        "max_M_rel": float(np.max(np.abs(M_rel))),
        "max_eta_abs": float(np.max(np.abs(eta_rel) / np.maximum(1.0, np.abs(entry.eta(xs))))),
        "max_V_rel": float(np.max(np.abs(entry.V(xs) - 0.5 * P.m0 * P.omega0 ** 2 * chi ** 2)
                                  / np.maximum(np.abs(entry.V(xs)), np.finfo(float).tiny))),
    }
