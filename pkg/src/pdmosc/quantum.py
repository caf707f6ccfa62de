"""Bound-state spectrum, eigenfunctions and expectation values."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .classical import OrbitSpec, classical_cdf, classical_moments
from .errors import ConvergenceError, DomainError, UnboundError
from .params import ModelParams
from .special import assoc_laguerre, assoc_laguerre_deriv, gauss_laguerre, log_gamma


def nu_n(params: ModelParams, n: int) -> float:
    return 2.0 * params.s - 2.0 * n - 1.0


def energy_level(params: ModelParams, n: int) -> float:
    if n < 0:
        raise ValueError("n must be >= 0")
    hw = params.hbar * params.omega0
    if params.is_undeformed:
        return hw * (n + 0.5)
    if nu_n(params, n) <= 0:
        raise UnboundError(f"n={n} is not bound for gamma*sigma0={params.gamma_sigma0:g}", "n")
    return hw * (n + 0.5) - params.hbar ** 2 * params.gamma ** 2 / (2 * params.m0) * (n + 0.5) ** 2


def bound_state_count(params: ModelParams):
    """Number of n >= 0 with n + 1/2 < s; math.inf when undeformed."""
    if params.is_undeformed:
        return math.inf
    return max(0, math.ceil(params.s - 0.5))


# ------------------------------------------------------------- grid wavefunction


@dataclass
class GridWavefunction:
    """Complex samples on a uniform grid in the x or x_gamma chart."""

    chart: str
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.chart not in ("x", "x_gamma"):
            raise ValueError("chart must be 'x' or 'x_gamma'")
        if self.grid.shape != self.values.shape or self.grid.ndim != 1:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        d = np.diff(self.grid)
        if np.any(d <= 0) or np.max(np.abs(d - d.mean())) > 1e-12 * max(1.0, abs(self.grid).max()):
            raise ValueError("grid must be uniform and strictly increasing")

    @property
    def spacing(self) -> float:
        return float((self.grid[-1] - self.grid[0]) / (len(self.grid) - 1))

    def inner(self, other: "GridWavefunction") -> complex:
        return complex(np.trapezoid(np.conj(self.values) * other.values, dx=self.spacing))

    def norm(self) -> float:
        return math.sqrt(max(self.inner(self).real, 0.0))

    def with_values(self, values) -> "GridWavefunction":
        return GridWavefunction(self.chart, self.grid, values)

    def __sub__(self, other):
        return self.with_values(self.values - other.values)

    def __add__(self, other):
        return self.with_values(self.values + other.values)

    def scale(self, c):
        return self.with_values(c * self.values)


# ------------------------------------------------------------------ eigenstates


def _hermite_functions(nmax: int, xi):
    """Normalised Hermite functions h_0..h_nmax at xi (unit length scale)."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty((nmax + 1,) + xi.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * xi ** 2)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for k in range(1, nmax):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * xi * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


@dataclass(frozen=True)
class Eigenstate:
    """Bound eigenstate n.

    The default phase makes psi_n positive as x -> +inf, which is the usual
    Hermite-function convention in the undeformed limit.  ``alternating=True``
    multiplies by (-1)^n.
    """

    n: int
    params: ModelParams = field(default_factory=ModelParams)
    alternating: bool = False

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be >= 0")
        self.params.require_bound_ground()
        if not self.params.is_undeformed and self.nu <= 0:
            raise UnboundError(f"n={self.n} is not bound (nu_n = {self.nu:g})", "n")

    @property
    def nu(self) -> float:
        return math.inf if self.params.is_undeformed else nu_n(self.params, self.n)

    @property
    def energy(self) -> float:
        return energy_level(self.params, self.n)

    @property
    def log_norm2(self) -> float:
        """log N_n^2 with N_n^2 = nu gamma n! / Gamma(nu+n+1)."""
        n, nu = self.n, self.nu
        return math.log(nu * self.params.gamma) + log_gamma(n + 1.0) - log_gamma(nu + n + 1.0)

    @property
    def sign(self) -> float:
        return (-1.0) ** self.n if self.alternating else 1.0

    def zeta(self, x):
        return 2.0 * self.params.s / (1.0 + self.params.gamma * np.asarray(x, dtype=float))

    def log_envelope(self, z):
        """log of psi / L_n^(nu)(zeta) as a function of zeta."""
        z = np.asarray(z, dtype=float)
        nu = self.nu
        return 0.5 * self.log_norm2 - 0.5 * math.log(2.0 * self.params.s) - 0.5 * z + 0.5 * (nu + 1.0) * np.log(z)

    def psi_zeta(self, z):
        z = np.asarray(z, dtype=float)
        return self.sign * np.exp(self.log_envelope(z)) * assoc_laguerre(self.n, self.nu, z)

    def dpsi_dzeta(self, z):
        z = np.asarray(z, dtype=float)
        nu = self.nu
        L = assoc_laguerre(self.n, nu, z)
        dL = assoc_laguerre_deriv(self.n, nu, z)
        return self.sign * np.exp(self.log_envelope(z)) * ((0.5 * (nu + 1.0) / z - 0.5) * L + dL)

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        P = self.params
        if P.is_undeformed:
            s0 = P.sigma0
            out = self.sign * _hermite_functions(self.n, x / s0)[self.n] / math.sqrt(s0)
            return float(out) if out.ndim == 0 else out
        inside = 1.0 + P.gamma * x > 0
        out = np.zeros_like(x)
        if np.any(inside):
            out[inside] = self.psi_zeta(self.zeta(x[inside]))
        return float(out) if out.ndim == 0 else out

    def derivative(self, x):
        """d psi / dx."""
        x = np.asarray(x, dtype=float)
        P = self.params
        if P.is_undeformed:
            s0 = P.sigma0
            h = _hermite_functions(self.n + 1, x / s0)
            n = self.n
            # h_n' = sqrt(n/2) h_{n-1} - sqrt((n+1)/2) h_{n+1}
            d = -math.sqrt((n + 1) / 2.0) * h[n + 1]
            if n > 0:
                d = d + math.sqrt(n / 2.0) * h[n - 1]
            out = self.sign * d / s0 ** 1.5
            return float(out) if out.ndim == 0 else out
        inside = 1.0 + P.gamma * x > 0
        out = np.zeros_like(x)
        z = self.zeta(x[inside])
        out[inside] = self.dpsi_dzeta(z) * (-P.gamma * z * z / (2.0 * P.s))
        return float(out) if out.ndim == 0 else out

    def sample(self, grid) -> GridWavefunction:
        return GridWavefunction("x", grid, self.evaluate(grid))


def eigenfunction(state: Eigenstate, x):
    return state.evaluate(x)


def morse_eigenfunction(state: Eigenstate, xg):
    """Eigenfunction in the x_gamma chart, normalised over x_gamma."""
    xg = np.asarray(xg, dtype=float)
    g = state.params.gamma
    if g == 0.0:
        return state.evaluate(xg)
    x = np.expm1(g * xg) / g
    return state.evaluate(x) * np.sqrt(1.0 + g * x)


# ------------------------------------------------------- closed-form moments


def expectation_suite(state: Eigenstate) -> dict:
    P = state.params
    n = state.n
    hw = P.hbar * P.omega0
    s0 = P.sigma0
    h2 = P.hbar ** 2 / s0 ** 2
    k = n + 0.5
    if P.is_undeformed:
        V = 0.5 * hw * k
        return {"V": V, "T": V, "m": P.m0, "x": 0.0, "x2": s0 ** 2 * k, "p": 0.0,
                "p2": h2 * k, "Pi": 0.0, "Pi2": h2 * k, "Phi": 0.0, "Phi2": s0 ** 2 * k}
    g = P.g
    gam = P.gamma
    c = 1.0 - g * k
    d1 = c * c - g * g / 4.0
    d2 = c * c - g * g
    nu = state.nu
    # <x> needs nu > 1 and <x^2> needs nu > 2; otherwise the x-tail makes them diverge
    # the printed forms subtract O(1/gamma^2) terms; these are expanded so g factors out
    x = gam * s0 ** 2 * (k * (2.0 - g * k) + 0.25 * g) / d1 if nu > 1 else math.inf
    if nu > 2:
        num = k + g * (3.5 * k * k + 0.875) + g * g * (2.5 * k - 4.0 * k ** 3) + g ** 3 * (k ** 4 - 1.25 * k * k + 0.25)
        x2 = s0 ** 2 * num / (d1 * d2)
    else:
        x2 = math.inf
    return {
        "V": 0.5 * hw * k,
        "T": 0.5 * hw * k * c,
        "m": P.m0 * c,
        "x": x,
        "x2": x2,
        "p": 0.0,
        "p2": h2 * (k - 0.5 * g * (n * n + n - 1)) * c,
        "Pi": 0.0,
        "Pi2": h2 * k * c,
        "Phi": n * gam * s0 ** 2,
        "Phi2": s0 ** 2 * ((1.0 - g) * k + g / 4.0),
    }


def _gl_integral(state: Eigenstate, shift: int, poly, log_pref: float, k: int):
    """integral_0^inf e^-z z^(nu-1+shift) poly(z) dz * exp(log_pref) * C^2.

    C^2 = N^2 / (2s) is the squared prefactor of the eigenfunction envelope.
    """
    alpha = state.nu - 1.0 + shift
    z, w = gauss_laguerre(k, alpha, normalized=True)
    lc2 = state.log_norm2 - math.log(2.0 * state.params.s)
    return math.exp(lc2 + log_gamma(alpha + 1.0) + log_pref) * float(np.dot(w, poly(z)))


def expectation_quadrature(state: Eigenstate, k: int | None = None) -> dict:
    """Moments of psi_n by generalized Gauss-Laguerre quadrature in zeta.

    Each integrand is rewritten as e^-zeta zeta^alpha times a polynomial built
    from the eigenfunction's Laguerre factor, so the rule is exact.
    """
    P = state.params
    if P.is_undeformed:
        raise DomainError("quadrature in zeta needs gamma > 0", "gamma")
    n, nu = state.n, state.nu
    s, gam, hb = P.s, P.gamma, P.hbar
    k = k or max(200, n + 8)
    L = lambda z: assoc_laguerre(n, nu, z)
    dL = lambda z: assoc_laguerre_deriv(n, nu, z)
    jac = math.log(2.0 * s / gam)  # dx = (2s/gamma) zeta^-2 dzeta
    # x = (2s - zeta) / (gamma zeta)
    out = {}
    out["norm"] = _gl_integral(state, 0, lambda z: L(z) ** 2, jac, k)
    if nu - 2.0 > -1.0:
        out["x"] = _gl_integral(state, -1, lambda z: (2 * s - z) * L(z) ** 2, jac - math.log(gam), k)
    else:
        out["x"] = math.inf
    if nu - 3.0 > -1.0:
        out["x2"] = _gl_integral(state, -2, lambda z: (2 * s - z) ** 2 * L(z) ** 2, jac - 2 * math.log(gam), k)
    else:
        out["x2"] = math.inf
    # 1/(1+gamma x) = zeta / 2s ; m = m0 zeta^2/(2s)^2
    inv_u = _gl_integral(state, 1, lambda z: L(z) ** 2, jac - math.log(2 * s), k)
    out["inv_u"] = inv_u
    out["m"] = P.m0 * _gl_integral(state, 2, lambda z: L(z) ** 2, jac - 2 * math.log(2 * s), k)
    # Phi = x/(1+gamma x) - gamma sigma0^2/2 = (1 - zeta/2s)/gamma - gamma sigma0^2 / 2
    c0 = 1.0 / gam - 0.5 * gam * P.sigma0 ** 2
    phi = lambda z: c0 - z / (2 * s * gam)
    out["Phi"] = _gl_integral(state, 0, lambda z: phi(z) * L(z) ** 2, jac, k)
    out["Phi2"] = _gl_integral(state, 0, lambda z: phi(z) ** 2 * L(z) ** 2, jac, k)
    # potential m(x) w^2 x^2 / 2 = (m0 w^2/2)((1 - zeta/2s)/gamma)^2
    out["V"] = 0.5 * P.m0 * P.omega0 ** 2 * _gl_integral(
        state, 0, lambda z: ((1 - z / (2 * s)) / gam) ** 2 * L(z) ** 2, jac, k)
    # |dpsi/dx|^2 dx = C^2 (gamma/2s) e^-z z^(nu+1) [((nu+1)/2 - z/2) L + z L']^2 dz
    bp = lambda z: ((0.5 * (nu + 1) - 0.5 * z) * L(z) + z * dL(z)) ** 2
    out["p2"] = hb ** 2 * _gl_integral(state, 2, bp, math.log(gam / (2 * s)), k)
    # |Pi psi|^2 dx = hbar^2 gamma 2s C^2 e^-z z^(nu-1) [(nu/2 - z/2) L + z L']^2 dz
    bq = lambda z: ((0.5 * nu - 0.5 * z) * L(z) + z * dL(z)) ** 2
    out["Pi2"] = hb ** 2 * _gl_integral(state, 0, bq, math.log(gam * 2 * s), k)
    # with the symmetric ordering the kinetic term is Pi^2 / 2m0
    out["T"] = out["Pi2"] / (2.0 * P.m0)
    out["p"] = 0.0
    out["Pi"] = 0.0
    return out


def uncertainty_report(state: Eigenstate) -> dict:
    e = expectation_suite(state)
    P = state.params
    hb = P.hbar
    dx = math.sqrt(e["x2"] - e["x"] ** 2) if math.isfinite(e["x2"]) else math.inf
    dp = math.sqrt(e["p2"])
    dPi = math.sqrt(e["Pi2"])
    dPhi = math.sqrt(e["Phi2"] - e["Phi"] ** 2)
    k = state.n + 0.5
    inv_u = 1.0 if P.is_undeformed else 1.0 - P.g * k
    gup = 0.5 * hb * (1.0 + P.gamma * e["x"]) if math.isfinite(e["x"]) else math.inf
    return {
        "dx": dx, "dp": dp, "dPi": dPi, "dPhi": dPhi,
        "dxdp": dx * dp, "dxdPi": dx * dPi, "dPhidPi": dPhi * dPi,
        "dPhidPi_closed": hb * k * inv_u,
        "gup_bound": gup,
        "heisenberg_ok": dx * dp >= 0.5 * hb,
        "gup_ok": dx * dPi >= gup,
    }


# --------------------------------------------------------------- grids


def zeta_window(params: ModelParams, n_max: int, drop: float = 40.0, points: int = 6000):
    """A zeta interval outside of which each |psi_n|^2, n <= n_max, has mass < e^-drop.

    The zeta-density e^-z z^(nu-1) L_n(z)^2 is integrated on a log-spaced
    grid and both cumulative tails are read off.
    """
    lo, hi = math.inf, 0.0
    for n in range(n_max + 1):
        nu = nu_n(params, n)
        if nu <= 0:
            break
        top = math.log(4.0 * (nu + 2 * n + 10.0) + 20.0 * drop)
        bottom = max(-690.0, -4.0 * drop / nu - 5.0)
        u = np.linspace(bottom, top, points)
        zz = np.exp(u)
        L = np.abs(assoc_laguerre(n, nu, zz))
        with np.errstate(divide="ignore"):
            logd = -zz + nu * u + 2.0 * np.log(L)
        cum = np.logaddexp.accumulate(logd)
        total = cum[-1]
        left = np.nonzero(cum - total < -drop)[0]
        rcum = np.logaddexp.accumulate(logd[::-1])[::-1]
        right = np.nonzero(rcum - total < -drop)[0]
        zl = zz[left[-1]] if left.size else zz[0]
        zh = zz[right[0]] if right.size else zz[-1]
        lo, hi = min(lo, zl), max(hi, zh)
    return lo, hi


def default_x_grid(params: ModelParams, n_max: int = 0, h: float | None = None,
                   x_cap: float | None = None, drop: float = 40.0):
    """Uniform x grid covering the bound states up to n_max."""
    s0 = params.sigma0
    h = h or s0 / 200.0
    if params.is_undeformed:
        L = math.sqrt(2 * n_max + 1) * s0 + math.sqrt(2 * drop) * s0
        return np.arange(-L, L + 0.5 * h, h)
    zlo, zhi = zeta_window(params, n_max, drop)
    s, g = params.s, params.gamma
    xl = (2 * s / zhi - 1.0) / g
    xr = (2 * s / zlo - 1.0) / g
    cap = x_cap if x_cap is not None else 60.0 * s0 * math.sqrt(n_max + 1)
    xr = min(xr, cap)
    return np.arange(xl, xr + 0.5 * h, h)


# ------------------------------------------------------------- FD oracle


@dataclass
class FDResult:
    energies: np.ndarray
    coarse: np.ndarray
    fine: np.ndarray
    y_range: tuple
    n_points: int


def _fd_eigs(params: ModelParams, y, select, select_range=None):
    h = y[1] - y[0]
    kin = params.hbar ** 2 / (2 * params.m0 * h * h)
    if params.is_undeformed:
        V = 0.5 * params.m0 * params.omega0 ** 2 * y ** 2
    else:
        V = params.W_gamma * np.expm1(-params.gamma * y) ** 2
    d = 2.0 * kin + V
    e = -kin * np.ones(len(y) - 1)
    try:
        return eigh_tridiagonal(d, e, eigvals_only=True, select=select, select_range=select_range)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"tridiagonal eigensolver failed: {exc}") from exc


def fd_y_range(params: ModelParams, k: int, drop: float = 40.0, y_cap: float | None = None):
    s0 = params.sigma0
    if params.is_undeformed:
        L = math.sqrt(2 * k + 1) * s0 + math.sqrt(2 * drop) * s0
        return -L, L
    zlo, zhi = zeta_window(params, k - 1, drop)
    s, g = params.s, params.gamma
    ylo = -math.log(zhi / (2 * s)) / g
    yhi = -math.log(zlo / (2 * s)) / g
    if y_cap is not None:
        yhi = min(yhi, y_cap)
    return ylo, yhi


def fd_diagonalize(params: ModelParams, k: int, y_range=None, n_points: int | None = None,
                   points_per_sigma: float = 50.0, richardson: bool = True) -> FDResult:
    """Lowest k eigenvalues of the three-point Morse Hamiltonian in x_gamma.

    Dirichlet ends.  With ``richardson`` the grid is doubled and the two
    spectra are combined as (4 E_fine - E_coarse)/3.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if y_range is None:
        y_range = fd_y_range(params, k)
    ylo, yhi = y_range
    if n_points is None:
        n_points = int(math.ceil((yhi - ylo) / params.sigma0 * points_per_sigma)) + 1
    if k >= n_points:
        raise ValueError("k must be smaller than the grid size")
    y = np.linspace(ylo, yhi, n_points + 2)[1:-1]
    coarse = _fd_eigs(params, y, "i", (0, k - 1))
    if not richardson:
        return FDResult(coarse, coarse, coarse, (ylo, yhi), n_points)
    y2 = np.linspace(ylo, yhi, 2 * (n_points + 1) + 1)[1:-1]
    fine = _fd_eigs(params, y2, "i", (0, k - 1))
    return FDResult((4.0 * fine - coarse) / 3.0, coarse, fine, (ylo, yhi), n_points)


def fd_count_below(params: ModelParams, energy: float, y_range=None, points_per_sigma: float = 20.0):
    """Number of FD eigenvalues strictly below `energy`."""
    if y_range is None:
        y_range = fd_y_range(params, bound_state_count(params))
    ylo, yhi = y_range
    n = int(math.ceil((yhi - ylo) / params.sigma0 * points_per_sigma)) + 1
    y = np.linspace(ylo, yhi, n + 2)[1:-1]
    ev = _fd_eigs(params, y, "v", (-math.inf, energy))
    return int(len(ev)), ev


# ------------------------------------------------------------ correspondence


def bin_probabilities(state: Eigenstate, edges, nodes: int = 64):
    """Probability per bin by Gauss-Legendre on each bin."""
    t, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    xs = mid[:, None] + half[:, None] * t[None, :]
    vals = state.evaluate(xs.ravel()).reshape(xs.shape) ** 2
    return (vals * w[None, :]).sum(axis=1) * half


def correspondence_check(params: ModelParams, n: int, bins: int = 50) -> dict:
    """Compare state n with the classical orbit of the same energy."""
    st = Eigenstate(n, params)
    E = st.energy
    A2 = 2.0 * params.sigma0 ** 2 * E / (params.hbar * params.omega0)
    orb = OrbitSpec(A0=math.sqrt(A2), params=params)
    qm = expectation_suite(st)
    cl = classical_moments(orb)
    gaps = {}
    for key in ("x", "x2", "p2"):
        ref = cl[key]
        gaps[key] = abs(qm[key] - ref) / abs(ref) if ref else abs(qm[key])
    edges = np.linspace(orb.x_min, orb.x_max, bins + 1)
    Pq = bin_probabilities(st, edges)
    Pc = np.diff(classical_cdf(orb, edges))
    return {
        "n": n,
        "energy": E,
        "A": math.sqrt(A2),
        "quantum": {k: qm[k] for k in ("x", "x2", "p2")},
        "classical": {k: cl[k] for k in ("x", "x2", "p2")},
        "relative_gap": gaps,
        "edges": edges,
        "p_quantum": Pq,
        "p_classical": Pc,
        "inside_mass": float(Pq.sum()),
        "l1": float(np.abs(Pq - Pc).sum()),
    }
