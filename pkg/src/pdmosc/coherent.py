"""Coherent and cat states of the deformed oscillator.

In the variable z = 2s/(1 + gamma x) the coherent state is
sqrt(N^2/2s) e^(-z/2) z^c with c = s - sqrt2 alpha/(gamma sigma0), so
|psi|^2 dx is a Gamma(lambda) density in z.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MomentDivergenceError, NonNormalizableError, OpenRegimeError
from .params import ModelParams
from .quantum import GridWavefunction
from .special import gauss_laguerre, log_gamma, log_gamma_ratio

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class CoherentState:
    alpha: complex
    params: ModelParams
    t0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        if not self.params.is_undeformed and self.lambda_cs <= 0:
            raise NonNormalizableError(
                f"lambda_cs = {self.lambda_cs:g} <= 0 for alpha = {self.alpha}")

    @property
    def lambda_cs(self) -> float:
        P = self.params
        if P.is_undeformed:
            return math.inf
        return 2.0 * P.s - 2.0 * SQRT2 * self.alpha.real / P.gamma_sigma0 - 1.0

    @property
    def exponent(self) -> complex:
        P = self.params
        return P.s - SQRT2 * self.alpha / P.gamma_sigma0

    @property
    def A_cs(self) -> float:
        return SQRT2 * self.params.sigma0 * abs(self.alpha)

    @property
    def log_norm2(self) -> float:
        # N^2 = gamma / Gamma(lambda)
        return math.log(abs(self.params.gamma)) - float(log_gamma(self.lambda_cs))

    def evaluate(self, x):
        return cs_wavefunction(self, x)

    def sample(self, grid) -> GridWavefunction:
        return GridWavefunction("x", np.asarray(grid, float), np.asarray(cs_wavefunction(self, grid), complex))


def cs_wavefunction(cs: CoherentState, x):
    """psi_cs(x); zero beyond the wall, a displaced Gaussian when gamma = 0."""
    P = cs.params
    x = np.asarray(x, dtype=float)
    a = cs.alpha
    if P.is_undeformed:
        s0 = P.sigma0
        xi = x / s0
        val = np.exp(-0.5 * xi ** 2 + SQRT2 * a * xi - a.real ** 2) / (math.pi ** 0.25 * math.sqrt(s0))
        return complex(val) if val.ndim == 0 else val
    u = 1.0 + P.gamma * x
    out = np.zeros(x.shape, dtype=complex)
    inside = u > 0
    z = 2.0 * P.s / u[inside]
    logv = 0.5 * (cs.log_norm2 - math.log(2.0 * P.s)) - 0.5 * z + cs.exponent * np.log(z)
    out[inside] = np.exp(logv)
    return complex(out) if out.ndim == 0 else out


def _denominators(cs: CoherentState):
    P = cs.params
    kS = P.gamma_sigma0 / SQRT2 * 2.0 * cs.alpha.real
    g = P.g
    return 1.0 - kS - g, 1.0 - kS - 1.5 * g


def cs_moments(cs: CoherentState, strict: bool = True) -> dict:
    """Closed-form moments; with strict=False divergent entries are inf."""
    P = cs.params
    a = cs.alpha
    S = (a.conjugate() + a).real
    D = (a.conjugate() - a)  # purely imaginary
    s0, hb = P.sigma0, P.hbar
    k = P.gamma_sigma0 / SQRT2
    g = P.g
    out = {
        "p": ((1j * hb / (SQRT2 * s0)) * D * (1.0 - k * S - 0.5 * g)).real,
        "p2": (hb ** 2 / (2.0 * s0 ** 2) * (1.0 - k * S) * (1.0 - k * S - 0.5 * g)
               * (1.0 - D * D - k * S + g)).real,
        "Phi": s0 * S / SQRT2,
        "Phi2": 0.5 * s0 ** 2 * (1.0 + S * S - k * S - 0.5 * g),
        "Pi": ((1j * hb / (SQRT2 * s0)) * D).real,
        "Pi2": (hb ** 2 / (2.0 * s0 ** 2) * (1.0 - D * D - k * S - 0.5 * g)).real,
        "inv_u": 1.0 - k * S - 0.5 * g,
    }
    if P.is_undeformed:
        out["x"] = s0 * S / SQRT2
        out["x2"] = 0.5 * s0 ** 2 * (1.0 + S * S)
        return out
    d1, d2 = _denominators(cs)
    gm = P.gamma
    # (1 - d1)/gamma and (1 - d2)/gamma, kept free of the 1/gamma cancellation
    e1 = s0 * S / SQRT2 + gm * s0 ** 2
    e2 = s0 * S / SQRT2 + 1.5 * gm * s0 ** 2
    for key, ok, fn in (("x", d1 > 0, lambda: e1 / d1),
                        ("x2", d1 > 0 and d2 > 0, lambda: (0.5 * s0 ** 2 + e1 * e2) / (d1 * d2))):
        if ok:
            out[key] = fn()
        elif strict:
            raise MomentDivergenceError(f"<{key}> diverges: denominator {min(d1, d2):g} <= 0")
        else:
            out[key] = math.inf
    return out


def cs_moments_quadrature(cs: CoherentState, k: int = 80) -> dict:
    """The same moments by Gauss-Laguerre quadrature of psi_cs in z.

    |psi|^2 dx = e^-z z^(lambda-1) dz / Gamma(lambda); the 1/z and 1/z^2 parts
    of x and x^2 are absorbed by lowering the Laguerre parameter by two.
    """
    P = cs.params
    if P.is_undeformed:
        raise DomainError("quadrature in z needs gamma != 0", "gamma")
    lam = cs.lambda_cs
    c = cs.exponent
    s2, hb, gm = 2.0 * P.s, P.hbar, P.gamma
    z, w = gauss_laguerre(k, lam - 1.0, normalized=True)
    E = lambda f: complex(np.dot(w, f(z)))
    out = {
        "norm": 1.0,
        "inv_u": E(lambda z: z / s2).real,
        "Phi": E(lambda z: (1.0 - z / s2) / gm - 0.5 * gm * P.sigma0 ** 2).real,
        "Phi2": E(lambda z: ((1.0 - z / s2) / gm - 0.5 * gm * P.sigma0 ** 2) ** 2).real,
        # p psi = -i hbar psi' = i hbar (gamma z^2 / 2s)(c / z - 1/2) psi
        "p": E(lambda z: (1j * hb * gm / s2) * (c * z - 0.5 * z ** 2)).real,
        "p2": E(lambda z: np.abs((hb * gm / s2) * (c * z - 0.5 * z ** 2)) ** 2).real,
        # Pi psi = -i hbar gamma (z/2 - c + 1/2) psi
        "Pi": E(lambda z: -1j * hb * gm * (0.5 * z - c + 0.5)).real,
        "Pi2": E(lambda z: np.abs(hb * gm * (0.5 * z - c + 0.5)) ** 2).real,
    }
    if lam > 2.0:
        z2, w2 = gauss_laguerre(k, lam - 3.0, normalized=True)
        r = math.exp(float(log_gamma(lam - 2.0)) - float(log_gamma(lam)))
        out["x"] = r * float(np.dot(w2, (s2 * z2 - z2 ** 2) / gm))
        out["x2"] = r * float(np.dot(w2, (s2 - z2) ** 2 / gm ** 2))
    return out


def cs_dispersions(cs: CoherentState, strict: bool = True) -> dict:
    m = cs_moments(cs, strict)
    var = lambda a, b: max(m[b] - m[a] ** 2, 0.0) if math.isfinite(m[b]) else math.inf
    dx, dp = math.sqrt(var("x", "x2")), math.sqrt(var("p", "p2"))
    dPhi, dPi = math.sqrt(var("Phi", "Phi2")), math.sqrt(var("Pi", "Pi2"))
    P = cs.params
    return {
        "dx": dx, "dp": dp, "dPhi": dPhi, "dPi": dPi,
        "dxdp": dx * dp, "dxdPi": dx * dPi, "dPhidPi": dPhi * dPi,
        "dPhidPi_closed": 0.5 * P.hbar * m["inv_u"],
        "gup_bound": 0.5 * P.hbar * abs(1.0 + P.gamma * m["x"]) if math.isfinite(m["x"]) else math.inf,
    }


# ---------------------------------------------------------------- dynamics


def cs_frequency(cs: CoherentState) -> float:
    P = cs.params
    w = P.omega0
    if P.is_undeformed:
        return w
    om2 = (1.0 - 0.5 * P.g) ** 2 - 2.0 * P.g * abs(cs.alpha) ** 2
    if om2 <= 0 or 1.0 - 0.5 * P.g <= 0:
        raise OpenRegimeError(f"Omega_cs^2 = {om2:g} <= 0: label outside the oscillatory window")
    return w * math.sqrt(om2)


def _phase_ratio(cs: CoherentState) -> float:
    P = cs.params
    u = SQRT2 * P.gamma_sigma0 * abs(cs.alpha)
    h = 1.0 - 0.5 * P.g
    return math.sqrt((h - u) / (h + u))


def cs_phase(cs: CoherentState, t):
    """Theta(t), continuous, with Theta(t0) = -arg(alpha).

    Solves dTheta/dt = w0 [1 - sqrt2 gamma sigma0 |alpha| cos(Theta) - g/2]:
    Theta = 2 atan(r tan(v/2)) with v = Omega (t - t0) + v0, lifted by 2 pi
    per period.
    """
    t = np.asarray(t, dtype=float)
    tau = t - cs.t0
    th0 = -cmath.phase(cs.alpha) if cs.alpha != 0 else 0.0
    Om = cs_frequency(cs)
    if cs.params.is_undeformed or cs.alpha == 0:
        th = th0 + Om * tau
        return float(th) if th.ndim == 0 else th
    r = _phase_ratio(cs)
    v0 = 2.0 * math.atan2(math.sin(0.5 * th0), r * math.cos(0.5 * th0))
    v = Om * tau + v0
    k = np.floor(v / (2.0 * math.pi) + 0.5)
    half = 0.5 * v - k * math.pi
    th = 2.0 * np.arctan2(r * np.sin(half), np.cos(half)) + 2.0 * math.pi * k
    return float(th) if th.ndim == 0 else th


def cs_phase_rate(cs: CoherentState, theta):
    P = cs.params
    return P.omega0 * (1.0 - SQRT2 * P.gamma_sigma0 * abs(cs.alpha) * np.cos(theta) - 0.5 * P.g)


def alpha_at(cs: CoherentState, t):
    """alpha(t) = |alpha| e^(-i Theta(t))."""
    return abs(cs.alpha) * np.exp(-1j * np.asarray(cs_phase(cs, t)))


def cs_evolved_expectations(cs: CoherentState, t) -> dict:
    P = cs.params
    th = np.asarray(cs_phase(cs, t))
    A = cs.A_cs
    c, s = np.cos(th), np.sin(th)
    gm = P.gamma
    mw = P.m0 * P.omega0
    return {
        "t": np.asarray(t, dtype=float),
        "theta": th,
        "x": (A * c + gm * P.sigma0 ** 2) / (1.0 - gm * A * c - P.g),
        "p": -mw * A * s * (1.0 - gm * A * c - 0.5 * P.g),
        "Pi": -mw * A * s,
    }


def cs_time_uncertainties(cs: CoherentState, t) -> dict:
    t = np.asarray(t, dtype=float)
    alphas = np.atleast_1d(alpha_at(cs, t))
    dx = np.empty(alphas.shape)
    dp = np.empty(alphas.shape)
    for i, a in enumerate(alphas):
        d = cs_dispersions(CoherentState(complex(a), cs.params, cs.t0))
        dx[i], dp[i] = d["dx"], d["dp"]
    return {"t": np.atleast_1d(t), "dx": dx, "dp": dp, "product": dx * dp}


def product_oscillation_amplitude(params: ModelParams, alpha_modulus: float, samples: int = 2000) -> float:
    """max - min of dx dp(t) over one period starting from a real label."""
    cs = CoherentState(alpha_modulus, params)
    T = 2.0 * math.pi / cs_frequency(cs)
    prod = cs_time_uncertainties(cs, np.linspace(0.0, T, samples))["product"]
    return float(prod.max() - prod.min())


# -------------------------------------------------------------- cat states


def _cat_lambdas(params: ModelParams, alpha: complex):
    a = complex(alpha)
    gs = params.gamma_sigma0
    base = 2.0 * params.s - 1.0
    d = 2.0 * SQRT2 * a.real / gs
    y = -2.0 * SQRT2 * a.imag / gs
    if base - abs(d) <= 0:
        raise NonNormalizableError("lambda_cs(+-alpha) must both be positive")
    return base, d, y


def cat_overlap_log(params: ModelParams, alpha: complex) -> complex:
    """log <-alpha|alpha> = log Gamma(l~) - (log Gamma(l+) + log Gamma(l-))/2.

    Written as Gamma ratios about 2s - 1 so that large s keeps full accuracy.
    """
    a = complex(alpha)
    if params.is_undeformed:
        return complex(-2.0 * abs(a) ** 2)
    base, d, y = _cat_lambdas(params, a)
    return (log_gamma_ratio(base, 1j * y)
            - 0.5 * (log_gamma_ratio(base, -d) + log_gamma_ratio(base, d)))


def cat_overlap(params: ModelParams, alpha: complex) -> float:
    """|<-alpha|alpha>| = sqrt(B(l~(a), l~(-a)) / B(l(a), l(-a)))."""
    return math.exp(cat_overlap_log(params, alpha).real)


def cat_overlap_exact(params: ModelParams, alpha: complex) -> complex:
    """Complex inner product <-alpha|alpha>; its modulus is `cat_overlap`."""
    return cmath.exp(cat_overlap_log(params, alpha))


def cat_normalization(params: ModelParams, alpha: complex, parity: str) -> float:
    sgn = _parity_sign(parity)
    ov = cat_overlap_exact(params, alpha).real
    val = 2.0 * (1.0 + sgn * ov)
    if val <= 0:
        raise NonNormalizableError("odd cat state vanishes at alpha = 0")
    return 1.0 / math.sqrt(val)


def _parity_sign(parity: str) -> float:
    if parity == "even":
        return 1.0
    if parity == "odd":
        return -1.0
    raise ValueError("parity must be 'even' or 'odd'")


@dataclass(frozen=True)
class CatState:
    alpha: complex
    parity: str
    params: ModelParams
    t0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        _parity_sign(self.parity)
        if not self.params.is_undeformed:
            _cat_lambdas(self.params, self.alpha)

    @property
    def normalization(self) -> float:
        return cat_normalization(self.params, self.alpha, self.parity)

    def evaluate(self, x, t=None):
        return cat_state(self.params, self.alpha, self.parity, x, t, self.t0)


def cat_state(params: ModelParams, alpha: complex, parity: str, x, t=None, t0: float = 0.0):
    """Even/odd cat wavefunction; at time t both branches use alpha(t) from |alpha|."""
    a = complex(alpha)
    if t is not None:
        a = complex(alpha_at(CoherentState(a, params, t0), t))
    sgn = _parity_sign(parity)
    C = cat_normalization(params, a, parity)
    plus = cs_wavefunction(CoherentState(a, params), x)
    minus = cs_wavefunction(CoherentState(-a, params), x)
    return C * (plus + sgn * minus)
