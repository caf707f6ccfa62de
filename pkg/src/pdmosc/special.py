"""Special functions and quadrature used throughout the package."""
from __future__ import annotations

import math

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import _kernels
from .errors import ConvergenceError, PoleError

# Lanczos coefficients for g = 7, nine terms
_LANCZOS_G = 7.0
_LANCZOS = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def assoc_laguerre(n: int, nu: float, z):
    """L_n^(nu)(z) by the ascending three-term recurrence. Accepts scalar or array z."""
    if n < 0:
        raise ValueError("n must be >= 0")
    arr = np.asarray(z, dtype=float)
    out = _kernels.laguerre(int(n), float(nu), np.ascontiguousarray(arr.ravel()))
    out = out.reshape(arr.shape)
    return float(out) if arr.ndim == 0 else out


def assoc_laguerre_deriv(n: int, nu: float, z):
    """d/dz L_n^(nu)(z) = -L_{n-1}^(nu+1)(z)."""
    if n == 0:
        arr = np.asarray(z, dtype=float)
        return 0.0 if arr.ndim == 0 else np.zeros_like(arr)
    out = assoc_laguerre(n - 1, nu + 1.0, z)
    return -out


def _lanczos_shifted(z):
    # log Gamma(z) for Re z >= 0.5
    zm = z - 1.0
    acc = _LANCZOS[0] + np.zeros_like(zm)
    for k in range(1, len(_LANCZOS)):
        acc = acc + _LANCZOS[k] / (zm + k)
    t = zm + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(acc)


def log_gamma(z):
    """Principal-branch log Gamma via Lanczos (g=7, 9 terms).

    Arguments with Re z < 0.5 are shifted right with the recurrence
    Gamma(z) = Gamma(z+m) / (z (z+1) ... (z+m-1)).  Real input gives a real
    result, log|Gamma(z)|.
    """
    real_input = not np.iscomplexobj(z) and np.isrealobj(np.asarray(z))
    zz = np.asarray(z, dtype=complex)
    scalar = zz.ndim == 0
    zz = np.atleast_1d(zz).astype(complex)
    pole = (zz.imag == 0) & (zz.real <= 0) & (zz.real == np.round(zz.real))
    if pole.any():
        raise PoleError(f"log_gamma pole at {zz[pole][0].real:g}")
    shift = np.where(zz.real < 0.5, np.ceil(0.5 - zz.real), 0.0).astype(int)
    out = np.empty_like(zz)
    for m in np.unique(shift):
        sel = shift == m
        w = zz[sel]
        corr = np.zeros_like(w)
        for k in range(int(m)):
            corr = corr + np.log(w + k)
        out[sel] = _lanczos_shifted(w + m) - corr
    if real_input:
        res = out.real.copy()
        return float(res[0]) if scalar else res
    return complex(out[0]) if scalar else out


def log_gamma_ratio(a, d):
    """log Gamma(a+d) - log Gamma(a), without cancellation for large |a|.

    For |a| > 50 this uses the Stirling expansion in difference form,
    (a-1/2) log1p(d/a) + d log(a+d) - d + S(a+d) - S(a).
    """
    a = complex(a)
    d = complex(d)
    if abs(a) < 50.0 or abs(a + d) < 50.0 or abs(d) > 0.5 * abs(a):
        return complex(log_gamma(a + d)) - complex(log_gamma(a))
    b = a + d
    main = (a - 0.5) * _log1p_complex(d / a) + d * complex(np.log(b)) - d
    return main + _stirling_tail(b) - _stirling_tail(a)


def _log1p_complex(w: complex) -> complex:
    # numpy's complex log1p forms 1 + w first; keep |1+w|^2 - 1 exact instead
    x, y = w.real, w.imag
    return complex(0.5 * math.log1p(2.0 * x + x * x + y * y), math.atan2(y, 1.0 + x))


def _stirling_tail(z):
    # Bernoulli corrections B2k / (2k(2k-1) z^(2k-1)), k = 1..6
    coeffs = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360)
    zi = 1.0 / z
    zi2 = zi * zi
    acc = 0.0
    p = zi
    for c in coeffs:
        acc += c * p
        p *= zi2
    return acc


def log_beta(a, b):
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def beta_fn(a, b):
    """Euler Beta function through log Gamma; complex in, complex out."""
    val = np.exp(log_beta(complex(a), complex(b)))
    if np.isrealobj(np.asarray(a)) and np.isrealobj(np.asarray(b)):
        return float(val.real)
    return complex(val)


def gauss_laguerre(k: int, alpha: float = 0.0, normalized: bool = False, maxiter: int = 50):
    """Generalized Gauss-Laguerre nodes and weights.

    Exact for integral_0^inf e^-x x^alpha P(x) dx with deg P <= 2k-1.
    Golub-Welsch eigenvalues seed a Newton polish on the orthonormal
    recurrence.  With ``normalized=True`` the weights are divided by
    Gamma(alpha+1) so they sum to one, which avoids overflow for large alpha.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not alpha > -1.0:
        raise ValueError("alpha must be > -1")
    j = np.arange(k, dtype=float)
    diag = 2.0 * j + alpha + 1.0
    off = np.sqrt(j[1:] * (j[1:] + alpha))
    x0 = eigh_tridiagonal(diag, off, eigvals_only=True) if k > 1 else np.array([alpha + 1.0])
    nodes, logw, worst = _kernels.gl_newton(np.ascontiguousarray(x0), int(k), float(alpha), int(maxiter))
    if not np.all(np.isfinite(nodes)) or worst > 1e-10:
        raise ConvergenceError(f"Gauss-Laguerre Newton polish failed (k={k}, alpha={alpha}, step={worst:.2e})")
    if np.any(np.diff(nodes) <= 0):
        raise ConvergenceError("Gauss-Laguerre nodes collapsed during polishing")
    if not normalized:
        logw = logw + log_gamma(alpha + 1.0)
    return nodes, np.exp(logw)
