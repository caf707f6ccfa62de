"""Oracle checks for the ten acceptance criteria and the figure manifest.

Each check returns a CheckResult with the worst measured value and the
tolerance it is held to.  Criteria listed in KNOWN_UNATTAINABLE are run at
their stated tolerance and reported as expected failures.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import algebra as alg
from .classical import (ClassicalState, OrbitSpec, exact_momentum, exact_position, morse_catalog,
                        catalog_verify, hamiltonian_xp, orbit_residual, rk4_integrate)
from .coherent import (CoherentState, cat_overlap, cs_dispersions, cs_frequency, cs_evolved_expectations,
                       cs_time_uncertainties, cs_wavefunction, product_oscillation_amplitude)
from .params import ModelParams
from .quantum import (Eigenstate, GridWavefunction, bound_state_count, correspondence_check, default_x_grid,
                      energy_level, expectation_quadrature, expectation_suite, fd_count_below, fd_diagonalize,
                      uncertainty_report)

KNOWN_UNATTAINABLE = {10}


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    worst: float
    tol: float
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def expected_failure(self) -> bool:
        return self.criterion in KNOWN_UNATTAINABLE

    @property
    def status(self) -> str:
        if self.passed:
            return "PASS"
        return "XFAIL" if self.expected_failure else "FAIL"

    def line(self) -> str:
        return (f"[{self.status}] criterion {self.criterion:2d} {self.name}: "
                f"worst={self.worst:.3e} tol={self.tol:.1e}")


def _rel(a, b, floor=0.0):
    return abs(a - b) / max(abs(b), floor, 1e-300)


# ------------------------------------------------------------------ 1


def check_spectrum(tol=1e-6) -> CheckResult:
    worst = 0.0
    rows = {}
    for gs in (0.1, 0.2, 0.3):
        P = ModelParams.from_gamma_sigma0(gs)
        fd = fd_diagonalize(P, 6)
        exact = np.array([energy_level(P, n) for n in range(6)])
        err = np.abs(fd.energies - exact) / exact
        rows[gs] = float(err.max())
        worst = max(worst, rows[gs])
    P = ModelParams.from_gamma_sigma0(0.3)
    count, _ = fd_count_below(P, P.W_gamma)
    ok = worst < tol and count == 11 and bound_state_count(P) == 11
    return CheckResult(1, "spectrum oracle", ok, worst, tol,
                       {"max_rel_by_gamma_sigma0": rows, "fd_bound_count": count,
                        "closed_form_count": bound_state_count(P)})


# ------------------------------------------------------------------ 2


def check_classical(tol_x=1e-7, tol_e=1e-9, tol_orbit=1e-10, dt=1e-4) -> CheckResult:
    worst_x = worst_e = worst_orb = 0.0
    for gA0 in (0.2, 0.4, 0.8):
        orb = OrbitSpec(1.0, ModelParams(gamma=gA0))
        steps = int(round(3 * orb.period / dt))
        traj = rk4_integrate(ClassicalState(0.0, orb.x_max, 0.0), orb.params, dt, steps)
        x_exact = exact_position(orb, traj.t)
        worst_x = max(worst_x, float(np.abs(traj.x - x_exact).max()))
        E = hamiltonian_xp(traj.x, traj.p, orb.params)
        worst_e = max(worst_e, float(np.abs(E - E[0]).max() / abs(E[0])))
    for gA0 in (0.2, 0.4, 0.8, 1.0, 1.5, 2.0):
        orb = OrbitSpec(1.0, ModelParams(gamma=gA0))
        t = np.linspace(0, 3 * orb.period, 2001) if gA0 < 1 else np.linspace(-3.0, 3.0, 2001)
        x = exact_position(orb, t)
        xdot = exact_momentum(orb, t) * (1 + gA0 * x) ** 2
        worst_orb = max(worst_orb, float(np.abs(orbit_residual(orb, x, xdot)).max()))
    ok = worst_x < tol_x and worst_e < tol_e and worst_orb < tol_orbit
    return CheckResult(2, "classical oracle", ok, worst_x, tol_x,
                       {"max_dx": worst_x, "energy_drift": worst_e, "orbit_residual": worst_orb})


# ------------------------------------------------------------------ 3


def check_morse_catalog(tol=1e-9, points=100, seed=1) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    per = {}
    for entry in morse_catalog():
        lo, hi = entry.domain
        lo, hi = max(lo, -3.0) + 1e-3, min(hi, 3.0) - 1e-3
        xs = rng.uniform(lo, hi, points)
        ps = rng.uniform(-3.0, 3.0, points)
        r = catalog_verify(entry, xs, ps)
        per[entry.id] = r["max_HK_rel"]
        worst = max(worst, r["max_HK_rel"])
    return CheckResult(3, "Morse-map catalog", worst < tol, worst, tol, per)


# ------------------------------------------------------------------ 4

SECOND_MOMENT = {"x": "x2", "p": "p2", "Pi": "Pi2", "Phi": "Phi2"}
CLOSED_KEYS = ("V", "T", "m", "x", "x2", "p", "p2", "Pi", "Pi2", "Phi", "Phi2")


def check_expectations(tol=1e-9, tol_id=1e-12) -> CheckResult:
    worst = worst_id = 0.0
    for gs in (0.1, 0.3):
        P = ModelParams.from_gamma_sigma0(gs)
        for n in range(4):
            st = Eigenstate(n, P)
            cf = expectation_suite(st)
            qd = expectation_quadrature(st)
            for k in CLOSED_KEYS:
                floor = math.sqrt(abs(cf[SECOND_MOMENT[k]])) if k in SECOND_MOMENT else 0.0
                worst = max(worst, _rel(cf[k], qd[k], floor))
            E = st.energy
            worst_id = max(worst_id, _rel(cf["T"] + cf["V"], E),
                           _rel(cf["T"] * P.m0, cf["V"] * cf["m"]))
    ok = worst < tol and worst_id < tol_id
    return CheckResult(4, "expectation closed forms", ok, worst, tol, {"identity_worst": worst_id})


# ------------------------------------------------------------------ 5


def check_uncertainty_sweep() -> CheckResult:
    violations = []
    checked = 0
    worst_margin = math.inf
    for i in range(19):
        gs = round(0.05 * i, 10)
        P = ModelParams.from_gamma_sigma0(gs) if gs else ModelParams()
        count = bound_state_count(P)
        n_top = int(count) if math.isfinite(count) else 60
        for n in range(n_top):
            r = uncertainty_report(Eigenstate(n, P))
            checked += 1
            h = 0.5 * P.hbar
            if not (r["dxdp"] >= h * (1 - 1e-12) and r["dxdPi"] >= r["gup_bound"] * (1 - 1e-12)):
                violations.append((gs, n))
            if math.isfinite(r["dxdp"]):
                worst_margin = min(worst_margin, r["dxdp"] / h - 1.0)
    return CheckResult(5, "uncertainty suite", not violations, float(len(violations)), 0.0,
                       {"states_checked": checked, "violations": violations,
                        "min_relative_margin_dxdp": worst_margin})


# ------------------------------------------------------------------ 6


def _packet(grid, centre, width, phase=0.0):
    v = np.exp(-((grid - centre) ** 2) / (2 * width ** 2) + 1j * phase * grid)
    psi = GridWavefunction("x", grid, v)
    return psi.scale(1.0 / psi.norm())


def check_algebra(tol=1e-5, tol_coeff=1e-12) -> CheckResult:
    parts = {}
    def bump(key, val):
        parts[key] = max(parts.get(key, 0.0), float(val))
    for gs in (0.1, 0.2, 0.3):
        P = ModelParams.from_gamma_sigma0(gs)
        grid = default_x_grid(P, 6)
        A, Ad = alg.op("a", P), alg.op("a_dag", P)
        E0 = energy_level(P, 0)
        states = alg.sample_eigenstates(P, 5, grid)
        bump("annihilate_ground", A(states[0]).norm())
        for n, s in enumerate(states):
            bump("factorization", alg.residual(Ad(A(s)).scale(P.hbar * P.omega0),
                                              s.scale(energy_level(P, n) - E0), s))
            if n:
                pm = GridWavefunction("x", grid, alg.psi_minus(P, n - 1, grid))
                bump("intertwining", alg.residual(A(s), pm.scale(math.sqrt((energy_level(P, n) - E0)
                                                                           / (P.hbar * P.omega0))), s))
        packets = [_packet(grid, 0.0, P.sigma0), _packet(grid, 0.5 * P.sigma0, 0.7 * P.sigma0, 0.8 / P.sigma0)]
        rep = alg.commutator_check(P, packets)
        bump("commutator", rep["a_adag"])
        chain = alg.ShapeChain(P, 1.0)
        for j in (1, 2, 3):
            for pk in packets:
                bump("integrability", alg.integrability_residual(chain, j, pk))
    P = ModelParams.from_gamma_sigma0(0.2)
    grid = default_x_grid(P, 6)
    for n in range(4):
        for v in alg.su11_grid_check(P, n, grid).values():
            bump("su11_grid", v)
    coeff = alg.su11_check(ModelParams.from_gamma_sigma0(0.3), range(6), tol_coeff)
    coeff_worst = max(max(r["err_comm"] / max(1.0, abs(r["two_M0"])), r["err_M0_plus"], r["err_M0_minus"])
                      for r in coeff["rows"])
    worst = max(parts.values())
    ok = worst < tol and coeff["ok"] and coeff_worst < tol_coeff
    return CheckResult(6, "algebra suite", ok, worst, tol, {**parts, "su11_coefficients": coeff_worst})


# ------------------------------------------------------------------ 7


def check_coherent(tol=1e-5, tol_id=1e-12) -> CheckResult:
    res = 0.0
    for gs in (0.1, 0.2):
        P = ModelParams.from_gamma_sigma0(gs)
        grid = default_x_grid(P, 12)
        A = alg.op("a", P)
        for re in np.linspace(-1, 1, 5):
            for im in np.linspace(-1, 1, 5):
                cs = CoherentState(complex(re, im), P)
                s = cs.sample(grid)
                res = max(res, alg.residual(A(s), s.scale(cs.alpha), s))
    rng = np.random.default_rng(7)
    ident = 0.0
    for gs in (0.1, 0.2, 0.4):
        P = ModelParams.from_gamma_sigma0(gs)
        for _ in range(40):
            a = complex(*rng.uniform(-1.0, 1.0, 2))
            d = cs_dispersions(CoherentState(a, P))
            S = 2 * a.real
            target = 0.5 * P.hbar * (1 - gs / math.sqrt(2) * S - 0.5 * gs * gs)
            ident = max(ident, _rel(d["dPhidPi"], target))
    P = ModelParams.from_gamma_sigma0(0.4)
    cs = CoherentState(1 / math.sqrt(2), P)
    T = 2 * math.pi / cs_frequency(cs)
    prod = cs_time_uncertainties(cs, np.linspace(0, 3 * T, 3001))["product"]
    min_prod = float(prod.min())
    amps = [product_oscillation_amplitude(ModelParams.from_gamma_sigma0(g), 1 / math.sqrt(2))
            for g in (0.1, 0.2, 0.3, 0.4)]
    increasing = all(b > a for a, b in zip(amps, amps[1:]))
    ok = res < tol and ident < tol_id and min_prod >= 0.5 * P.hbar and increasing
    return CheckResult(7, "coherent-state suite", ok, res, tol,
                       {"dPhidPi_identity": ident, "min_dxdp": min_prod, "amplitudes": amps})


# ------------------------------------------------------------------ 8


def check_classical_limit(tol=1e-3) -> CheckResult:
    P = ModelParams.from_gamma_sigma0(0.005)
    cs = CoherentState(20.0, P)
    orb = OrbitSpec(cs.A_cs, P)
    t = np.linspace(0.0, 2 * math.pi / cs_frequency(cs), 2001)
    xq = cs_evolved_expectations(cs, t)["x"]
    xc = exact_position(orb, t)
    worst = float(np.abs(xq - xc).max() / np.abs(xc).max())
    return CheckResult(8, "classical limit", worst < tol, worst, tol)


# ------------------------------------------------------------------ 9


def overlap_by_quadrature(params: ModelParams, alpha: complex) -> complex:
    """<-alpha|alpha> by adaptive quadrature of the two wavefunctions in x."""
    plus, minus = CoherentState(alpha, params), CoherentState(-alpha, params)
    f = lambda x: complex(np.conj(cs_wavefunction(minus, x)) * cs_wavefunction(plus, x))
    grid = default_x_grid(params, 12)
    edges = np.linspace(grid[0], grid[-1], 41)
    re = sum(integrate.quad(lambda x: f(x).real, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
             for a, b in zip(edges[:-1], edges[1:]))
    im = sum(integrate.quad(lambda x: f(x).imag, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
             for a, b in zip(edges[:-1], edges[1:]))
    return complex(re, im)


def check_cat(tol=1e-8, tol_limit=1e-5) -> CheckResult:
    P = ModelParams.from_gamma_sigma0(0.1)
    a = math.sqrt(2.0)
    ov = cat_overlap(P, a)
    quad = overlap_by_quadrature(P, a)
    err = abs(ov - abs(quad))
    lim = abs(cat_overlap(ModelParams.from_gamma_sigma0(1e-4), 1.0) - math.exp(-2.0))
    ok = err < tol and lim < tol_limit
    return CheckResult(9, "cat states", ok, err, tol, {"formula": ov, "quadrature": abs(quad),
                                                      "limit_error": lim})


# ------------------------------------------------------------------ 10


def check_correspondence(tol=0.05) -> CheckResult:
    rep = correspondence_check(ModelParams.from_gamma_sigma0(0.1), 20, bins=50)
    return CheckResult(10, "correspondence", rep["l1"] < tol, rep["l1"], tol,
                       {"inside_mass": rep["inside_mass"], "relative_gap": rep["relative_gap"]})


CHECKS = (check_spectrum, check_classical, check_morse_catalog, check_expectations, check_uncertainty_sweep,
          check_algebra, check_coherent, check_classical_limit, check_cat, check_correspondence)


def run_all(selected=None) -> list:
    out = []
    for i, fn in enumerate(CHECKS, start=1):
        if selected and i not in selected:
            continue
        t = time.perf_counter()
        r = fn()
        r.seconds = time.perf_counter() - t
        out.append(r)
    return out


def check_figures() -> list:
    from .figures import build_figure, figure_manifest
    rows = []
    for fid in figure_manifest():
        try:
            ds = build_figure(fid)
            rows.append((fid, True, ds.rows.shape[0], ""))
        except Exception as exc:  # report every failing panel, not just the first
            rows.append((fid, False, 0, f"{type(exc).__name__}: {exc}"))
    return rows
