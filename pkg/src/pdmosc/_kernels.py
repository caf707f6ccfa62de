"""Hot loops.

Every kernel exists as a plain loop (`*_loop`, compiled by numba when it is
available) and as a pure-numpy implementation (`*_numpy`).  The public name
binds to whichever backend `_accel` selected; both stay importable so tests can
check them against each other.
"""
import math

import numpy as np

from ._accel import jit

# ---------------------------------------------------------------- Laguerre


def laguerre_loop(n, nu, z):
    # recurrence index outermost so the inner sweep over z vectorizes
    m = z.shape[0]
    prev = np.ones(m)
    if n == 0:
        return prev
    cur = np.empty(m)
    for i in range(m):
        cur[i] = 1.0 + nu - z[i]
    for k in range(1, n):
        a = 2 * k + 1 + nu
        c = k + nu
        d = k + 1
        for i in range(m):
            nxt = ((a - z[i]) * cur[i] - c * prev[i]) / d
            prev[i] = cur[i]
            cur[i] = nxt
    return cur


def laguerre_numpy(n, nu, z):
    prev = np.ones_like(z)
    if n == 0:
        return prev
    cur = 1.0 + nu - z
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + nu - z) * cur - (k + nu) * prev) / (k + 1)
    return cur


# ------------------------------------------------------ Gauss-Laguerre Newton

_BIG = 1e150
_LOG_BIG = math.log(_BIG)


def gl_newton_loop(x0, k, alpha, maxiter):
    """Polish roots of the degree-k orthonormal Laguerre polynomial.

    Returns (nodes, log_weights, worst_step) with weights for the measure
    e^-x x^alpha / Gamma(alpha+1), so they sum to one.
    """
    m = x0.shape[0]
    nodes = x0.copy()
    logw = np.empty(m)
    worst = 0.0
    for i in range(m):
        x = nodes[i]
        step = 0.0
        for it in range(maxiter + 1):
            pm, p = 0.0, 1.0
            dpm, dp = 0.0, 0.0
            ssq = 1.0
            lscale = 0.0
            for j in range(k):
                bj = math.sqrt(j * (j + alpha)) if j > 0 else 0.0
                bj1 = math.sqrt((j + 1) * (j + 1 + alpha))
                aj = 2 * j + alpha + 1
                pn = ((x - aj) * p - bj * pm) / bj1
                dpn = (p + (x - aj) * dp - bj * dpm) / bj1
                pm, p = p, pn
                dpm, dp = dp, dpn
                if j < k - 1:
                    ssq += p * p
                if abs(p) > _BIG:
                    p /= _BIG
                    pm /= _BIG
                    dp /= _BIG
                    dpm /= _BIG
                    ssq /= _BIG * _BIG
                    lscale += _LOG_BIG
            if it == maxiter:
                logw[i] = -(math.log(ssq) + 2.0 * lscale)
                break
            step = p / dp
            x -= step
            if abs(step) <= 4e-16 * max(1.0, abs(x)):
                # one more pass at the polished node to evaluate the weight
                pm, p = 0.0, 1.0
                ssq = 1.0
                lscale = 0.0
                for j in range(k - 1):
                    bj = math.sqrt(j * (j + alpha)) if j > 0 else 0.0
                    bj1 = math.sqrt((j + 1) * (j + 1 + alpha))
                    pn = ((x - (2 * j + alpha + 1)) * p - bj * pm) / bj1
                    pm, p = p, pn
                    ssq += p * p
                    if abs(p) > _BIG:
                        p /= _BIG
                        pm /= _BIG
                        ssq /= _BIG * _BIG
                        lscale += _LOG_BIG
                logw[i] = -(math.log(ssq) + 2.0 * lscale)
                step = 0.0
                break
        nodes[i] = x
        rel = abs(step) / max(1.0, abs(x))
        if rel > worst:
            worst = rel
    return nodes, logw, worst


def gl_newton_numpy(x0, k, alpha, maxiter):
    x = np.array(x0, dtype=float)
    active = np.ones(x.shape, dtype=bool)
    step = np.zeros_like(x)

    def sweep(x, deg, want_deriv):
        pm = np.zeros_like(x)
        p = np.ones_like(x)
        dpm = np.zeros_like(x)
        dp = np.zeros_like(x)
        ssq = np.ones_like(x)
        lscale = np.zeros_like(x)
        for j in range(deg):
            bj = math.sqrt(j * (j + alpha)) if j > 0 else 0.0
            bj1 = math.sqrt((j + 1) * (j + 1 + alpha))
            aj = 2 * j + alpha + 1
            pn = ((x - aj) * p - bj * pm) / bj1
            if want_deriv:
                dpn = (p + (x - aj) * dp - bj * dpm) / bj1
                dpm, dp = dp, dpn
            pm, p = p, pn
            if j < k - 1:
                ssq = ssq + p * p
            big = np.abs(p) > _BIG
            if big.any():
                p = np.where(big, p / _BIG, p)
                pm = np.where(big, pm / _BIG, pm)
                dp = np.where(big, dp / _BIG, dp)
                dpm = np.where(big, dpm / _BIG, dpm)
                ssq = np.where(big, ssq / (_BIG * _BIG), ssq)
                lscale = lscale + np.where(big, _LOG_BIG, 0.0)
        return p, dp, ssq, lscale

    for _ in range(maxiter):
        p, dp, _, _ = sweep(x, k, True)
        st = np.where(active, p / dp, 0.0)
        x = x - st
        step = np.where(active, st, step)
        active &= np.abs(st) > 4e-16 * np.maximum(1.0, np.abs(x))
        if not active.any():
            break
    _, _, ssq, lscale = sweep(x, k - 1, False)
    logw = -(np.log(ssq) + 2.0 * lscale)
    rel = np.where(active, np.abs(step) / np.maximum(1.0, np.abs(x)), 0.0)
    return x, logw, float(rel.max()) if rel.size else 0.0


# ------------------------------------------------------------------ RK4


def rk4_loop(x0, p0, m0, omega0, gamma, dt, steps, wall_margin):
    xs = np.empty(steps + 1)
    ps = np.empty(steps + 1)
    xs[0] = x0
    ps[0] = p0
    x = x0
    p = p0
    w2 = m0 * omega0 * omega0
    wall = -1.0 / gamma if gamma > 0 else -np.inf
    for i in range(steps):
        # dx/dt = (1+gx)^2 p/m0 ; dp/dt = -[g(1+gx)p^2/m0 + m0 w^2 x/(1+gx)^3]
        u = 1.0 + gamma * x
        k1x = u * u * p / m0
        k1p = -(gamma * u * p * p / m0 + w2 * x / (u * u * u))
        xa = x + 0.5 * dt * k1x
        pa = p + 0.5 * dt * k1p
        u = 1.0 + gamma * xa
        k2x = u * u * pa / m0
        k2p = -(gamma * u * pa * pa / m0 + w2 * xa / (u * u * u))
        xa = x + 0.5 * dt * k2x
        pa = p + 0.5 * dt * k2p
        u = 1.0 + gamma * xa
        k3x = u * u * pa / m0
        k3p = -(gamma * u * pa * pa / m0 + w2 * xa / (u * u * u))
        xa = x + dt * k3x
        pa = p + dt * k3p
        u = 1.0 + gamma * xa
        k4x = u * u * pa / m0
        k4p = -(gamma * u * pa * pa / m0 + w2 * xa / (u * u * u))
        x = x + dt * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
        p = p + dt * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
        xs[i + 1] = x
        ps[i + 1] = p
        if x - wall < wall_margin or not (x == x):
            return xs[: i + 2], ps[: i + 2], i + 1
    return xs, ps, -1


# the integrator is inherently sequential: the numpy fallback is the loop itself
rk4_numpy = rk4_loop

# ------------------------------------------------------- derivative stencil


def deriv4_loop(f, h):
    n = f.shape[0]
    out = np.empty_like(f)
    for i in range(2, n - 2):
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h)
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
    out[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3]
                  - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h)
    out[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3]
                  + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h)
    return out


def deriv4_numpy(f, h):
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    out[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12.0 * h)
    out[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12.0 * h)
    out[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12.0 * h)
    out[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12.0 * h)
    return out


laguerre = jit(laguerre_loop) or laguerre_numpy
gl_newton = jit(gl_newton_loop) or gl_newton_numpy
rk4 = jit(rk4_loop) or rk4_numpy
_deriv4_jit = jit(deriv4_loop)


def deriv4(f, h):
    f = np.ascontiguousarray(f)
    if f.shape[0] < 5:
        raise ValueError("derivative stencil needs at least 5 points")
    if _deriv4_jit is not None:
        return _deriv4_jit(f, float(h))
    return deriv4_numpy(f, h)
