import os
import subprocess
import sys

import numpy as np
import pytest

from pdmosc import _accel, _kernels


def test_laguerre_loop_matches_numpy():
    z = np.linspace(0, 80, 101)
    for n, nu in ((0, 1.0), (1, 0.5), (7, 3.2), (25, 60.0)):
        np.testing.assert_allclose(_kernels.laguerre_loop(n, nu, z), _kernels.laguerre_numpy(n, nu, z),
                                   rtol=1e-14, atol=0)


def test_gl_newton_loop_matches_numpy():
    from scipy.linalg import eigh_tridiagonal
    k, alpha = 30, 2.5
    i = np.arange(k)
    x0 = eigh_tridiagonal(2 * i + alpha + 1, -np.sqrt((i[1:]) * (i[1:] + alpha)), eigvals_only=True)
    a = _kernels.gl_newton_loop(x0.copy(), k, alpha, 50)
    b = _kernels.gl_newton_numpy(x0.copy(), k, alpha, 50)
    np.testing.assert_allclose(a[0], b[0], rtol=1e-14)
    np.testing.assert_allclose(a[1], b[1], rtol=1e-12, atol=1e-12)


def test_deriv4_loop_matches_numpy():
    x = np.linspace(-3, 3, 301)
    f = np.exp(-x ** 2) * (1 + 0.3j * x)
    h = x[1] - x[0]
    np.testing.assert_allclose(_kernels.deriv4_loop(f, h), _kernels.deriv4_numpy(f, h), rtol=1e-12, atol=1e-14)


def test_deriv4_fourth_order():
    errs = []
    for n in (201, 401, 801):
        x = np.linspace(-2, 2, n)
        d = _kernels.deriv4(np.sin(x).astype(complex), x[1] - x[0])
        errs.append(np.abs(d - np.cos(x)).max())
    assert errs[0] / errs[1] > 12 and errs[1] / errs[2] > 12


def test_deriv4_needs_five_points():
    with pytest.raises(ValueError):
        _kernels.deriv4(np.ones(4, complex), 0.1)


def test_rk4_loop_matches_dispatch():
    a = _kernels.rk4_loop(1.0, 0.0, 1.0, 1.0, 0.4, 1e-3, 2000, 1e-9)
    b = _kernels.rk4(1.0, 0.0, 1.0, 1.0, 0.4, 1e-3, 2000, 1e-9)
    np.testing.assert_allclose(a[0], b[0], rtol=1e-13)
    np.testing.assert_allclose(a[1], b[1], rtol=1e-13, atol=1e-15)
    assert a[2] == b[2] == -1


def test_backend_reports_state():
    assert _accel.backend() in ("numba", "numpy")


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, PDMOSC_DISABLE_NUMBA="1")
    code = "from pdmosc import _accel, _kernels; print(_accel.backend(), _kernels.laguerre is _kernels.laguerre_numpy)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "True"]
