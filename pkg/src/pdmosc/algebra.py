"""Factorization, partner Hamiltonians, shape invariance and ladder operators.

Coefficient formulas are closed form; operator identities are also realised
on uniform x grids with fourth-order derivative stencils.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, GridTooCoarse, PoleError, UnboundError
from .params import ModelParams
from .quantum import Eigenstate, GridWavefunction, energy_level, nu_n
from .special import assoc_laguerre, log_gamma

KINDS = ("a", "a_dag", "b", "b_dag", "Phi", "Pi", "a_beta", "a_dag_beta", "L_minus", "L_plus")


@dataclass(frozen=True)
class ShapeChain:
    params: ModelParams
    beta: float = 1.0
    varsigma: float = 2.0

    def beta_j(self, j: int) -> float:
        return self.beta + self.varsigma * (j - 1)


@dataclass(frozen=True)
class OperatorOnGrid:
    kind: str
    params: ModelParams
    beta: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}; expected one of {KINDS}")

    def __call__(self, psi: GridWavefunction) -> GridWavefunction:
        return apply_operator(self, psi)


# ------------------------------------------------------------ grid primitives


def _d(values, h):
    return _kernels.deriv4(np.ascontiguousarray(values, dtype=complex), h)


def _lower(P: ModelParams, x, f, h, shift=0.0):
    u = 1.0 + P.gamma * x
    s0 = P.sigma0
    return (x / u * f + s0 ** 2 * u * _d(f, h)) / (math.sqrt(2.0) * s0) - shift * f


def _raise(P: ModelParams, x, f, h, shift=0.0):
    u = 1.0 + P.gamma * x
    s0 = P.sigma0
    return (x / u * f - s0 ** 2 * _d(u * f, h)) / (math.sqrt(2.0) * s0) - shift * f


def _beta_shift(P: ModelParams, beta: float) -> float:
    # a(beta) = a - (beta - 1) gamma sigma0 / (2 sqrt 2)
    return (beta - 1.0) * P.gamma_sigma0 / (2.0 * math.sqrt(2.0))


def _check_grid(psi: GridWavefunction, P: ModelParams):
    if psi.chart != "x":
        raise DomainError("operators act in the x chart", "chart")
    if len(psi.grid) < 5:
        raise GridTooCoarse("need at least five grid points")
    if psi.spacing > P.sigma0 / 50.0 * (1.0 + 1e-9):
        raise GridTooCoarse(f"grid spacing {psi.spacing:g} exceeds sigma0/50")
    if not P.is_undeformed and np.any(1.0 + P.gamma * psi.grid <= 0):
        raise DomainError("grid crosses the wall x = -1/gamma", "grid")


def _apply_values(op: OperatorOnGrid, x, f, h):
    P = op.params
    if op.kind == "a":
        return _lower(P, x, f, h)
    if op.kind == "a_dag":
        return _raise(P, x, f, h)
    if op.kind in ("b", "b_dag"):
        c = P.gamma_sigma0 / (2.0 * math.sqrt(2.0))
        base = _lower(P, x, f, h) if op.kind == "b" else _raise(P, x, f, h)
        return base + c * f
    if op.kind == "Phi":
        return (x / (1.0 + P.gamma * x) - 0.5 * P.gamma * P.sigma0 ** 2) * f
    if op.kind == "Pi":
        r = np.sqrt(1.0 + P.gamma * x)
        return -1j * P.hbar * r * _d(r * f, h)
    if op.kind == "a_beta":
        return _lower(P, x, f, h, _beta_shift(P, op.beta))
    if op.kind == "a_dag_beta":
        return _raise(P, x, f, h, _beta_shift(P, op.beta))
    raise ValueError(op.kind)


def apply_operator(op: OperatorOnGrid, psi: GridWavefunction, check_tol: float | None = None):
    """Apply a first-order operator to grid samples.

    The ladder kinds realise the beta translation by expanding in the
    psi_{m,beta} family and relabelling the parameter (see `translate_beta`).
    With ``check_tol`` the result is recomputed on every second point and
    GridTooCoarse is raised when the two differ by more than the tolerance.
    """
    P = op.params
    _check_grid(psi, P)
    x, f, h = psi.grid, psi.values, psi.spacing
    if op.kind == "L_minus":
        chain = ShapeChain(P, op.beta)
        inner = psi.with_values(_apply_values(OperatorOnGrid("a_beta", P, op.beta), x, f, h))
        out, _ = translate_beta(inner, chain, op.beta + chain.varsigma, op.beta)
        return out
    if op.kind == "L_plus":
        chain = ShapeChain(P, op.beta)
        moved, _ = translate_beta(psi, chain, op.beta, op.beta + chain.varsigma)
        return moved.with_values(
            _apply_values(OperatorOnGrid("a_dag_beta", P, op.beta), x, moved.values, h))
    out = _apply_values(op, x, f, h)
    if check_tol is not None and len(x) >= 10:
        coarse = _apply_values(op, x[::2], f[::2], 2 * h)
        diff = np.linalg.norm(coarse[2:-2] - out[::2][2:-2])
        ref = max(np.linalg.norm(out[::2]), np.linalg.norm(f[::2]), 1e-300)
        if diff / ref > check_tol:
            raise GridTooCoarse(f"halving the resolution changes the result by {diff / ref:.2e}")
    return psi.with_values(out)


def op(kind: str, params: ModelParams, beta: float = 1.0) -> OperatorOnGrid:
    return OperatorOnGrid(kind, params, beta)


def residual(lhs: GridWavefunction, rhs: GridWavefunction, ref: GridWavefunction | None = None) -> float:
    ref = ref if ref is not None else rhs
    return (lhs - rhs).norm() / max(ref.norm(), 1e-300)


# -------------------------------------------------------- beta-family states


def _laguerre_state(params: ModelParams, n: int, expo: float, lag_nu: float, log_n2: float, x, sign=1.0):
    x = np.asarray(x, dtype=float)
    g = params.gamma
    out = np.zeros_like(x)
    inside = 1.0 + g * x > 0
    z = 2.0 * params.s / (1.0 + g * x[inside])
    env = 0.5 * log_n2 - 0.5 * math.log(2.0 * params.s) - 0.5 * z + expo * np.log(z)
    out[inside] = sign * np.exp(env) * assoc_laguerre(n, lag_nu, z)
    return float(out) if out.ndim == 0 else out


def psi_n_beta(chain: ShapeChain, n: int, x, alternating: bool = False):
    """Eigenfunctions of hbar w a^dag(beta) a(beta) + E0; beta = 1 gives psi_n."""
    P = chain.params
    if P.is_undeformed:
        return Eigenstate(n, P, alternating).evaluate(x)
    b = chain.beta
    nu = nu_n(P, n)
    lag = nu + 1.0 - b
    if lag <= 0:
        raise UnboundError(f"psi_(n={n}, beta={b:g}) is not normalizable", "n")
    log_n2 = math.log(lag * P.gamma) + log_gamma(n + 1.0) - log_gamma(nu + 2.0 - b + n)
    sign = (-1.0) ** n if alternating else 1.0
    return _laguerre_state(P, n, 0.5 * (nu - b + 2.0), lag, log_n2, x, sign)


def beta_state_bound(params: ModelParams, n: int, beta: float) -> bool:
    return params.is_undeformed or nu_n(params, n) + 1.0 - beta > 0


def psi_minus(params: ModelParams, n: int, x, alternating: bool = False):
    """Eigenfunctions of the partner hbar w a a^dag, built with nu_{n+1}."""
    if params.is_undeformed:
        return Eigenstate(n, params, alternating).evaluate(x)
    nt = nu_n(params, n + 1)
    if nt <= 0:
        raise UnboundError(f"partner state n={n} needs nu_(n+1) > 0", "n")
    log_n2 = math.log(nt * params.gamma) + log_gamma(n + 1.0) - log_gamma(nt + n + 1.0)
    sign = (-1.0) ** n if alternating else 1.0
    return _laguerre_state(params, n, 0.5 * (nt + 1.0), nt, log_n2, x, sign)


def translate_beta(psi: GridWavefunction, chain: ShapeChain, beta_from: float, beta_to: float):
    """Relabel beta_from -> beta_to on the coefficients of the psi_{m,beta} expansion.

    Returns the relabelled wavefunction and the relative norm of the part of
    psi outside the span of the bound beta_from family.
    """
    P = chain.params
    x = psi.grid
    if P.is_undeformed:
        return psi, 0.0
    rebuilt = np.zeros_like(psi.values)
    out = np.zeros_like(psi.values)
    m = 0
    while beta_state_bound(P, m, beta_from) and beta_state_bound(P, m, beta_to):
        src = GridWavefunction("x", x, psi_n_beta(ShapeChain(P, beta_from), m, x))
        c = src.inner(psi)
        rebuilt += c * src.values
        out += c * psi_n_beta(ShapeChain(P, beta_to), m, x)
        m += 1
    rest = np.linalg.norm(psi.values - rebuilt) / max(np.linalg.norm(psi.values), 1e-300)
    return psi.with_values(out), float(rest)


# ------------------------------------------------------------ closed forms


def partner_potentials(params: ModelParams, x):
    x = np.asarray(x, dtype=float)
    P = params
    if not P.is_undeformed and np.any(1.0 + P.gamma * x <= 0):
        raise DomainError("x must exceed the wall", "x")
    E0 = energy_level(P, 0)
    k = 0.5 * P.m0 * P.omega0 ** 2
    chi = x / (1.0 + P.gamma * x)
    vp = k * chi ** 2 - E0
    vm = (k * (chi - P.hbar * P.gamma / (P.m0 * P.omega0)) ** 2 - E0 + P.hbar * P.omega0
          - P.hbar ** 2 * P.gamma ** 2 / (2.0 * P.m0))
    return vp, vm


def partner_equilibria(params: ModelParams):
    g = params.g
    return 0.0, params.gamma * params.sigma0 ** 2 / (1.0 - g)


def shape_invariance_remainder(chain: ShapeChain, j: int) -> float:
    P = chain.params
    return P.hbar * P.omega0 * (1.0 - 0.5 * P.g * (chain.beta_j(j) + 1.0))


def en_plus_beta(chain: ShapeChain, n: int) -> float:
    P = chain.params
    return P.hbar * P.omega0 * n * (1.0 - 0.5 * P.g * (n + chain.beta))


def deformed_factorial(chain: ShapeChain, n: int) -> float:
    """[n_gamma(beta)]! = n!/(2s)^n Gamma(2s+1-beta-n)/Gamma(2s+1-beta-2n)."""
    P = chain.params
    if P.is_undeformed:
        return float(math.factorial(n))
    s2 = 2.0 * P.s
    top = s2 + 1.0 - chain.beta - n
    if top <= 0 and top == round(top):
        raise PoleError(f"Gamma pole at {top:g}")
    # the Gamma ratio is the finite product (top-1)(top-2)...(top-n)
    val = 1.0
    for j in range(1, n + 1):
        val *= (top - j) * (j / s2)
    return val


def ladder_coefficients(chain: ShapeChain, n: int, direction: str) -> float:
    P = chain.params
    g = 0.0 if P.is_undeformed else P.g
    b = chain.beta
    if direction in ("-", "minus", "lower"):
        if n == 0:
            return 0.0
        rad = n * (1.0 - 0.5 * g * (n + b))
    elif direction in ("+", "plus", "raise"):
        if not beta_state_bound(P, n + 1, b):
            raise UnboundError(f"L+ target n={n + 1} is not bound", "n")
        rad = (n + 1) * (1.0 - 0.5 * g * (n + 1 + b))
    else:
        raise ValueError("direction must be '+' or '-'")
    if rad < 0:
        raise UnboundError("ladder coefficient outside the bound window", "n")
    return math.sqrt(rad)


def su11_coefficients(params: ModelParams, n: int) -> dict:
    """Coefficient-level commutators of M+- = sqrt(2s) L+-, M0 = 2s L0 at beta = 1.

    Returns the diagonal value of [M+, M-] and the coefficients of
    [M0, M+-] psi_n relative to M+- psi_n, together with the values
    2 M0(n) the brackets are compared with.
    """
    s2 = 2.0 * params.s
    g = params.g
    chain = ShapeChain(params, 1.0)
    cm = ladder_coefficients(chain, n, "-")
    cp = ladder_coefficients(chain, n, "+")
    L0 = lambda k: 0.5 * (1.0 - g * (k + 1))
    comm_pm = s2 * (cm ** 2 - cp ** 2)  # [M+, M-] psi_n = comm_pm psi_n
    m0_plus = s2 * (L0(n + 1) - L0(n))  # [M0, M+] = m0_plus M+
    m0_minus = s2 * (L0(n - 1) - L0(n))  # [M0, M-] = m0_minus M-  (n >= 1)
    return {"n": n, "comm_pm": comm_pm, "two_M0": 2.0 * s2 * L0(n),
            "M0_Mplus": m0_plus, "M0_Mminus": m0_minus}


def su11_check(params: ModelParams, n_values=range(6), tol: float = 1e-12) -> dict:
    """Check [M-, M+] = 2 M0 and [M0, M+-] = -+ M+- on coefficients.

    These are the relations that follow from the ladder coefficients; the
    opposite-sign convention [M+, M-] = 2 M0, [M0, M+-] = +-M+- is reported
    alongside for comparison.
    """
    rows = []
    ok = True
    alt_ok = True
    for n in n_values:
        c = su11_coefficients(params, n)
        e1 = abs(-c["comm_pm"] - c["two_M0"])
        e2 = abs(c["M0_Mplus"] + 1.0)
        e3 = abs(c["M0_Mminus"] - 1.0) if n >= 1 else 0.0
        rows.append({**c, "err_comm": e1, "err_M0_plus": e2, "err_M0_minus": e3})
        ok &= max(e1, e2, e3) <= tol * max(1.0, abs(c["two_M0"]))
        alt_ok &= abs(c["comm_pm"] - c["two_M0"]) <= tol * max(1.0, abs(c["two_M0"]))
    return {"rows": rows, "ok": bool(ok), "opposite_sign_convention_holds": bool(alt_ok)}


# ---------------------------------------------------------------- grid checks


def sample_eigenstates(params: ModelParams, n_max: int, grid):
    return [Eigenstate(n, params).sample(grid) for n in range(n_max + 1)]


def number_projection(psi: GridWavefunction, params: ModelParams, fn, n_max: int):
    """Apply f(n-hat) through the eigenbasis psi_0..psi_{n_max}."""
    out = np.zeros_like(psi.values)
    for m in range(n_max + 1):
        e = Eigenstate(m, params).sample(psi.grid)
        out += fn(m) * e.inner(psi) * e.values
    return psi.with_values(out)


def commutator_check(params: ModelParams, psi_samples) -> dict:
    """Grid residuals of the deformed commutation relations on test functions."""
    P = params
    A, Ad = op("a", P), op("a_dag", P)
    B, Bd = op("b", P), op("b_dag", P)
    Phi, Pi = op("Phi", P), op("Pi", P)
    worst = {"a_adag": 0.0, "a_N": 0.0, "b_bdag": 0.0, "Phi_Pi": 0.0, "jacobi": 0.0}
    c = P.gamma_sigma0 / math.sqrt(2.0)
    for psi in psi_samples:
        inv_u = psi.with_values(psi.values / (1.0 + P.gamma * psi.grid))
        N = lambda f: Ad(A(f))
        lhs = A(Ad(psi)) - Ad(A(psi))
        worst["a_adag"] = max(worst["a_adag"], residual(lhs, inv_u, psi))
        lhs = A(N(psi)) - N(A(psi))
        rhs = A(psi).with_values(A(psi).values / (1.0 + P.gamma * psi.grid))
        worst["a_N"] = max(worst["a_N"], residual(lhs, rhs, psi))
        lhs = B(Bd(psi)) - Bd(B(psi))
        rhs = psi - (Bd(psi) + B(psi)).scale(c)
        worst["b_bdag"] = max(worst["b_bdag"], residual(lhs, rhs, psi))
        lhs = Phi(Pi(psi)) - Pi(Phi(psi))
        worst["Phi_Pi"] = max(worst["Phi_Pi"], residual(lhs, inv_u.scale(1j * P.hbar), psi))
        # Jacobi: [a,[adag,N]] + [adag,[N,a]] + [N,[a,adag]]
        def comm(X, Y):
            return lambda f: X(Y(f)) - Y(X(f))
        t1 = comm(A, comm(Ad, N))(psi)
        t2 = comm(Ad, comm(N, A))(psi)
        t3 = comm(N, comm(A, Ad))(psi)
        worst["jacobi"] = max(worst["jacobi"], (t1 + t2 + t3).norm() / psi.norm())
    return worst


def integrability_residual(chain: ShapeChain, j: int, psi: GridWavefunction) -> float:
    """|| hbar w [a(b_j) a^dag(b_j) - a^dag(b_{j+1}) a(b_{j+1})] psi - R(b_j) psi || / ||psi||."""
    P = chain.params
    bj, bn = chain.beta_j(j), chain.beta_j(j + 1)
    lhs = (op("a_beta", P, bj)(op("a_dag_beta", P, bj)(psi))
           - op("a_dag_beta", P, bn)(op("a_beta", P, bn)(psi))).scale(P.hbar * P.omega0)
    return residual(lhs, psi.scale(shape_invariance_remainder(chain, j)), psi)


def ladder_grid_residuals(chain: ShapeChain, n: int, grid) -> dict:
    """Grid residuals of L-+ psi_{n,beta} against coefficient x psi_{n-+1,beta}."""
    P = chain.params
    b = chain.beta
    wrap = lambda v: GridWavefunction("x", grid, np.asarray(v, dtype=complex))
    psi = wrap(psi_n_beta(chain, n, grid))
    lm = apply_operator(op("L_minus", P, b), psi)
    target = (wrap(psi_n_beta(chain, n - 1, grid)).scale(ladder_coefficients(chain, n, "-"))
              if n > 0 else psi.scale(0.0))
    out = {"minus": residual(lm, target, psi)}
    if beta_state_bound(P, n + 1, b):
        lp = apply_operator(op("L_plus", P, b), psi)
        target = wrap(psi_n_beta(chain, n + 1, grid)).scale(ladder_coefficients(chain, n, "+"))
        out["plus"] = residual(lp, target, psi)
    return out


def su11_grid_check(params: ModelParams, n: int, grid, n_max: int | None = None) -> dict:
    """Grid residuals of [M-, M+] = 2 M0 and [M0, M+-] = -+ M+- on psi_n.

    M+- are applied as differential operators with the beta relabelling,
    M0 through the eigenbasis projection.
    """
    P = params
    s2 = 2.0 * P.s
    r = math.sqrt(s2)
    g = P.g
    if n_max is None:
        n_max = n + 2
    Lm, Lp = op("L_minus", P, 1.0), op("L_plus", P, 1.0)
    Mm = lambda f: Lm(f).scale(r)
    Mp = lambda f: Lp(f).scale(r)
    M0 = lambda f: number_projection(f, P, lambda k: s2 * 0.5 * (1.0 - g * (k + 1)), n_max)
    psi = Eigenstate(n, P).sample(grid)
    out = {}
    lhs = Mm(Mp(psi)) - Mp(Mm(psi))
    out["comm_minus_plus"] = residual(lhs, M0(psi).scale(2.0), psi)
    lhs = M0(Mp(psi)) - Mp(M0(psi))
    out["comm_M0_plus"] = residual(lhs, Mp(psi).scale(-1.0), psi)
    if n >= 1:
        lhs = M0(Mm(psi)) - Mm(M0(psi))
        out["comm_M0_minus"] = residual(lhs, Mm(psi), psi)
    return out
