"""Figure-data builders, the figure manifest, and CSV/JSON writers."""
from __future__ import annotations

import copy
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .classical import (OrbitSpec, Regime, classify_orbit, classical_density, exact_momentum,
                        exact_position, exact_pseudomomentum, morse_catalog, catalog_verify)
from .coherent import (CoherentState, alpha_at, cat_state, cs_dispersions, cs_frequency, cs_time_uncertainties,
                       cs_evolved_expectations, cs_wavefunction)
from .errors import ConfigError
from .params import ModelParams
from .quantum import (Eigenstate, bound_state_count, correspondence_check, energy_level, expectation_suite,
                      uncertainty_report)

EPSILON0_LABEL = "hbar omega0 / 2"
GAMMA_A0_FIG1 = [0.0, 0.2, 0.4, 0.8, 1.0, 1.5, 2.0]


_INDEX_COLUMNS = {"n"}


@dataclass
class FigureDataset:
    figure_id: str
    columns: list
    rows: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if self.rows.size and self.rows.shape[1] != len(self.columns):
            raise ValueError(f"{self.figure_id}: {self.rows.shape[1]} values per row, "
                             f"{len(self.columns)} columns")
        if not np.all(np.isfinite(self.rows)):
            raise ValueError(f"{self.figure_id}: non-finite values in rows")

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.columns) + "\n")
        as_int = [c.split(" [")[0] in _INDEX_COLUMNS for c in self.columns]
        for row in self.rows:
            # adding 0.0 folds -0.0 into 0.0
            buf.write(",".join(str(int(v)) if i else repr(float(v) + 0.0) for v, i in zip(row, as_int)) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"figure_id": self.figure_id, "columns": self.columns,
               "rows": [[float(v) + 0.0 for v in row] for row in self.rows], "meta": _jsonable(self.meta)}
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"

    def write(self, path, fmt: str = "csv"):
        text = self.to_csv() if fmt == "csv" else self.to_json()
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)

    def select(self, names) -> "FigureDataset":
        """Keep the columns whose name (without the unit) is listed, in that order."""
        base = [c.split(" [")[0] for c in self.columns]
        try:
            idx = [base.index(n) for n in names]
        except ValueError as exc:
            raise ConfigError(f"{self.figure_id}: unknown column in {names}") from exc
        return FigureDataset(self.figure_id, [self.columns[i] for i in idx], self.rows[:, idx], self.meta)

    @classmethod
    def from_csv(cls, figure_id: str, text: str) -> "FigureDataset":
        lines = [ln for ln in text.splitlines() if ln]
        cols = lines[0].split(",")
        rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
        return cls(figure_id, cols, np.array(rows).reshape(-1, len(cols)))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return str(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _complex(v) -> complex:
    try:
        return complex(v.replace(" ", "") if isinstance(v, str) else v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot read {v!r} as a complex number") from exc


def _stack(blocks):
    return np.vstack([np.column_stack(b) for b in blocks])


def _params(opts) -> ModelParams:
    return ModelParams(**{k: float(opts.get(k, d)) for k, d in
                          (("m0", 1.0), ("omega0", 1.0), ("hbar", 1.0))})


def _require(opts, key):
    if opts.get(key) is None:
        raise ConfigError(f"option {key!r} is required")
    return opts[key]


def _as_list(v) -> list:
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _with_gs(opts, gs) -> ModelParams:
    base = _params(opts)
    return ModelParams.from_gamma_sigma0(gs, base.m0, base.omega0, base.hbar)


# ------------------------------------------------------------- classical


def _orbit(opts, gA0):
    base = _params(opts)
    A0 = float(opts.get("A0", 1.0))
    return OrbitSpec(A0, ModelParams(base.m0, base.omega0, base.hbar, gA0 / A0))


def _time_axis(orb: OrbitSpec, opts):
    periods = float(opts.get("periods", 1.0))
    samples = int(opts.get("samples", 400))
    w = orb.params.omega0
    if classify_orbit(orb) is Regime.ELLIPTIC:
        return np.linspace(0.0, periods * orb.period, samples)
    half = float(opts.get("t_half", periods * math.pi / w))
    return np.linspace(-half, half, samples)


def build_potential(opts) -> FigureDataset:
    A0 = float(opts.get("A0", 1.0))
    xs = np.linspace(float(opts.get("x_min", -0.45)), float(opts.get("x_max", 2.0)), int(opts.get("samples", 400))) * A0
    base = _params(opts)
    blocks = []
    for gA0 in _as_list(_require(opts, "gammaA0")):
        g = gA0 / A0
        u = 1.0 + g * xs
        ok = u > 0
        V = 0.5 * base.m0 * base.omega0 ** 2 * (xs[ok] / u[ok]) ** 2
        blocks.append((np.full(ok.sum(), gA0), xs[ok], V))
    return FigureDataset("", ["gammaA0", "x [length]", "V [energy]"], _stack(blocks))


def build_phase_portrait(opts) -> FigureDataset:
    blocks = []
    for gA0 in _as_list(_require(opts, "gammaA0")):
        orb = _orbit(opts, gA0)
        t = _time_axis(orb, opts)
        x = exact_position(orb, t)
        v = exact_momentum(orb, t) * (1.0 + orb.params.gamma * x) ** 2 / orb.params.m0
        blocks.append((np.full(t.shape, gA0), t, x, v))
    return FigureDataset("", ["gammaA0", "t [time]", "x [length]", "xdot [length/time]"], _stack(blocks))


def build_classical_orbit(opts) -> FigureDataset:
    blocks = []
    for gA0 in _as_list(_require(opts, "gammaA0")):
        orb = _orbit(opts, gA0)
        t = _time_axis(orb, opts)
        x = exact_position(orb, t)
        p = exact_momentum(orb, t)
        g = orb.params.gamma
        xg = np.log1p(g * x) / g if g else x
        Pi = exact_pseudomomentum(orb, t)
        blocks.append((np.full(t.shape, gA0), t, x, p, xg, Pi))
    cols = ["gammaA0", "t [time]", "x [length]", "p [momentum]", "x_gamma [length]", "Pi_gamma [momentum]"]
    return FigureDataset("", cols, _stack(blocks))


def build_morse_catalog(opts) -> FigureDataset:
    rng = np.random.default_rng(int(opts.get("seed", 0)))
    rows = []
    for i, entry in enumerate(morse_catalog()):
        lo, hi = entry.domain
        lo = max(lo, -5.0) + 1e-3
        hi = min(hi, 5.0) - 1e-3
        xs = rng.uniform(lo, hi, int(opts.get("points", 100)))
        r = catalog_verify(entry, xs)
        rows.append((i, r["max_HK_rel"], r["max_M_rel"], r["max_eta_abs"], r["max_V_rel"]))
    return FigureDataset("", ["entry", "max_rel_H_minus_K", "max_rel_M", "max_abs_eta", "max_rel_V"],
                         np.array(rows))


# --------------------------------------------------------------- quantum


def build_eigenfunction(opts) -> FigureDataset:
    xs = np.linspace(float(opts.get("x_min", -3.0)), float(opts.get("x_max", 6.0)), int(opts.get("samples", 500)))
    blocks = []
    for gs in _as_list(_require(opts, "gamma_sigma0")):
        P = _with_gs(opts, gs)
        xx = xs * P.sigma0
        for n in _as_list(opts.get("n") or [0, 1, 2]):
            psi = Eigenstate(int(n), P).evaluate(xx)
            blocks.append((np.full(xx.shape, gs), np.full(xx.shape, n), xx, psi, psi ** 2))
    cols = ["gamma_sigma0", "n", "x [length]", "psi [length^-1/2]", "rho [1/length]"]
    return FigureDataset("", cols, _stack(blocks))


def build_correspondence(opts) -> FigureDataset:
    P = _with_gs(opts, float(_require(opts, "gamma_sigma0")))
    n = int(_require(opts, "n"))
    rep = correspondence_check(P, n, int(opts.get("bins", 50)))
    orb = OrbitSpec(rep["A"], P)
    xs = np.linspace(orb.x_min, orb.x_max, int(opts.get("samples", 800)) + 2)[1:-1]
    rho_q = Eigenstate(n, P).evaluate(xs) ** 2
    rho_c = classical_density(orb, xs)
    meta = {"l1_bins": rep["l1"], "inside_mass": rep["inside_mass"],
            "relative_gap": rep["relative_gap"], "x_min": orb.x_min, "x_max": orb.x_max}
    return FigureDataset("", ["x [length]", "rho_quantum [1/length]", "rho_classical [1/length]"],
                         np.column_stack((xs, rho_q, rho_c)), meta)


def build_spectrum(opts) -> FigureDataset:
    """E_n, <T>, <V> for the bound states, in units of eps0 when ``in_eps0`` is set."""
    P = _with_gs(opts, float(_require(opts, "gamma_sigma0")))
    P.require_bound_ground()
    in_eps0 = bool(opts.get("in_eps0", False))
    unit = 0.5 * P.hbar * P.omega0 if in_eps0 else 1.0
    count = bound_state_count(P)
    n_max = int(opts.get("n_max", count - 1 if math.isfinite(count) else 10))
    rows = []
    for n in range(n_max + 1):
        e = expectation_suite(Eigenstate(n, P))
        rows.append((n, energy_level(P, n) / unit, e["T"] / unit, e["V"] / unit))
    u = "eps0" if in_eps0 else "energy"
    meta = {"bound_states": count}
    if in_eps0:
        meta["eps0"] = EPSILON0_LABEL
    return FigureDataset("", ["n", f"E_n [{u}]", f"T [{u}]", f"V [{u}]"], np.array(rows), meta)


def build_potential_levels(opts) -> FigureDataset:
    P = _with_gs(opts, float(_require(opts, "gamma_sigma0")))
    eps0 = 0.5 * P.hbar * P.omega0
    xs = np.linspace(P.wall * 0.95 if P.gamma else -5 * P.sigma0, 15 * P.sigma0, int(opts.get("samples", 500)))
    V = 0.5 * P.m0 * P.omega0 ** 2 * (xs / (1 + P.gamma * xs)) ** 2
    return FigureDataset("", ["x [length]", "V [eps0]"], np.column_stack((xs, V / eps0)),
                         {"levels_eps0": [energy_level(P, n) / eps0 for n in range(int(bound_state_count(P)))],
                          "W_gamma_eps0": P.W_gamma / eps0})


def build_uncertainties(opts) -> FigureDataset:
    gs_list = opts.get("gamma_sigma0") or list(np.round(np.arange(0.0, 0.9001, 0.01), 10))
    rows = []
    for gs in gs_list:
        P = _with_gs(opts, float(gs))
        for n in _as_list(opts.get("n") or [0, 1, 2]):
            if n >= bound_state_count(P):
                continue
            r = uncertainty_report(Eigenstate(int(n), P))
            vals = (r["dx"], r["dp"], r["dxdp"], r["dxdPi"])
            if all(math.isfinite(v) for v in vals):
                rows.append((gs, n) + vals)
    return FigureDataset("", ["gamma_sigma0", "n", "dx [length]", "dp [momentum]", "dxdp [action]",
                              "dxdPi [action]"], np.array(rows))


# --------------------------------------------------------------- coherent


def build_cs_surface(opts) -> FigureDataset:
    k = int(opts.get("samples", 41))
    lim = float(opts.get("alpha_max", 2.0))
    grid = np.linspace(-lim, lim, k)
    rows = []
    for gs in _as_list(_require(opts, "gamma_sigma0")):
        P = _with_gs(opts, gs)
        for re in grid:
            for im in grid:
                d = cs_dispersions(CoherentState(complex(re, im), P))
                rows.append((gs, re, im, d["dx"], d["dp"], d["dxdp"]))
    return FigureDataset("", ["gamma_sigma0", "Re_alpha", "Im_alpha", "dx [length]", "dp [momentum]",
                              "dxdp [action]"], np.array(rows))


def build_coherent_evolve(opts) -> FigureDataset:
    modulus = float(_require(opts, "alpha_modulus"))
    tau0 = 2.0 * math.pi / _params(opts).omega0
    times = [float(f) * tau0 for f in opts.get("time_fractions", [0.0, 0.25, 0.5])]
    xs = np.linspace(float(opts.get("x_min", -3.0)), float(opts.get("x_max", 6.0)), int(opts.get("samples", 500)))
    blocks = []
    for gs in _as_list(_require(opts, "gamma_sigma0")):
        P = _with_gs(opts, gs)
        cs = CoherentState(modulus, P)
        for t in times:
            a = complex(alpha_at(cs, t))
            rho = np.abs(cs_wavefunction(CoherentState(a, P), xs * P.sigma0)) ** 2
            blocks.append((np.full(xs.shape, gs), np.full(xs.shape, t), xs * P.sigma0, rho))
    return FigureDataset("", ["gamma_sigma0", "t [time]", "x [length]", "rho [1/length]"], _stack(blocks))


def build_cs_time_uncertainties(opts) -> FigureDataset:
    modulus = float(_require(opts, "alpha_modulus"))
    periods = float(opts.get("periods", 3.0))
    samples = int(opts.get("samples", 600))
    tau0 = 2.0 * math.pi / _params(opts).omega0
    t = np.linspace(0.0, periods * tau0, samples)
    blocks = []
    for gs in _as_list(_require(opts, "gamma_sigma0")):
        P = _with_gs(opts, gs)
        u = cs_time_uncertainties(CoherentState(modulus, P), t)
        blocks.append((np.full(t.shape, gs), t, u["dx"], u["dp"], u["product"]))
    return FigureDataset("", ["gamma_sigma0", "t [time]", "dx [length]", "dp [momentum]", "dxdp [action]"],
                         _stack(blocks))


def build_cs_expectations(opts) -> FigureDataset:
    """Theta(t), <x>, <p>, <Pi> and the dispersions along the coherent-state orbit."""
    P = _with_gs(opts, float(_require(opts, "gamma_sigma0")))
    cs = CoherentState(_complex(_require(opts, "alpha")), P)
    T = 2.0 * math.pi / cs_frequency(cs)
    t = np.linspace(0.0, float(opts.get("periods", 1.0)) * T, int(opts.get("samples", 400)))
    ev = cs_evolved_expectations(cs, t)
    u = cs_time_uncertainties(cs, t)
    cols = ["t [time]", "theta [rad]", "x [length]", "p [momentum]", "Pi [momentum]", "dx [length]",
            "dp [momentum]"]
    return FigureDataset("", cols, np.column_stack((t, ev["theta"], ev["x"], ev["p"], ev["Pi"], u["dx"], u["dp"])))


def build_cat_evolve(opts) -> FigureDataset:
    alpha = _complex(_require(opts, "alpha"))
    parity = opts.get("parity") or "even"
    P = _with_gs(opts, float(_require(opts, "gamma_sigma0")))
    nt = int(opts.get("time_samples", 41))
    nx = int(opts.get("samples", 201))
    tau0 = 2.0 * math.pi / P.omega0
    ts = np.linspace(0.0, float(opts.get("periods", 1.0)) * tau0, nt)
    xs = np.linspace(float(opts.get("x_min", -4.0)), float(opts.get("x_max", 6.0)), nx) * P.sigma0
    blocks = []
    for t in ts:
        rho = np.abs(cat_state(P, alpha, parity, xs, t)) ** 2
        blocks.append((np.full(xs.shape, t), xs, rho))
    return FigureDataset("", ["t [time]", "x [length]", "rho [1/length]"], _stack(blocks))


BUILDERS = {
    "potential": build_potential,
    "phase-portrait": build_phase_portrait,
    "classical-orbit": build_classical_orbit,
    "morse-catalog": build_morse_catalog,
    "eigenfunction": build_eigenfunction,
    "correspondence": build_correspondence,
    "spectrum": build_spectrum,
    "potential-levels": build_potential_levels,
    "uncertainties": build_uncertainties,
    "cs-surface": build_cs_surface,
    "coherent-evolve": build_coherent_evolve,
    "cs-time-uncertainties": build_cs_time_uncertainties,
    "cs-expectations": build_cs_expectations,
    "cat-evolve": build_cat_evolve,
}

# Builders are grouped under the experiment names exposed by the CLI.
EXPERIMENT_OF = {
    "potential": "phase-portrait", "phase-portrait": "phase-portrait", "classical-orbit": "classical-orbit",
    "morse-catalog": "morse-catalog", "eigenfunction": "eigenfunction", "correspondence": "eigenfunction",
    "spectrum": "spectrum", "potential-levels": "spectrum", "uncertainties": "uncertainties",
    "cs-surface": "uncertainties", "coherent-evolve": "coherent-evolve",
    "cs-time-uncertainties": "uncertainties", "cs-expectations": "coherent-evolve",
    "cat-evolve": "cat-evolve",
}


def _manifest() -> dict:
    m = {}
    m["fig1a"] = {"builder": "potential", "gammaA0": GAMMA_A0_FIG1}
    m["fig1b"] = {"builder": "phase-portrait", "gammaA0": GAMMA_A0_FIG1, "t_half": 6.0}
    for fig, gl in (("fig2", [0.0, 0.2, 0.4]), ("fig3", [1.0, 1.5, 2.0])):
        for panel, cols in zip("abcdef", (["t", "x"], ["t", "p"], ["x", "p"], ["t", "x_gamma"],
                                          ["t", "Pi_gamma"], ["x_gamma", "Pi_gamma"])):
            m[fig + panel] = {"builder": "classical-orbit", "gammaA0": gl, "periods": 2.0,
                              "t_half": 3.0, "columns": ["gammaA0"] + cols}
    for i, n in enumerate((0, 1, 2)):
        for panel, q in ((("abc"[i]), "psi"), (("def"[i]), "rho")):
            m["fig4" + panel] = {"builder": "eigenfunction", "gamma_sigma0": [0.0, 0.2, 0.4], "n": [n],
                                 "columns": ["gamma_sigma0", "n", "x", q]}
    m["fig5"] = {"builder": "correspondence", "gamma_sigma0": 0.1, "n": 20}
    m["fig6a"] = {"builder": "potential-levels", "gamma_sigma0": 0.3}
    m["fig6b"] = {"builder": "spectrum", "gamma_sigma0": 0.3, "in_eps0": True}
    for panel, q in zip("abcd", ("dx", "dp", "dxdp", "dxdPi")):
        m["fig7" + panel] = {"builder": "uncertainties", "n": [0, 1, 2],
                             "columns": ["gamma_sigma0", "n", q]}
    for panel, q in zip("abc", ("dx", "dp", "dxdp")):
        m["fig8" + panel] = {"builder": "cs-surface", "gamma_sigma0": [0.0, 0.1, 0.2],
                             "columns": ["gamma_sigma0", "Re_alpha", "Im_alpha", q]}
    m["fig9"] = {"builder": "coherent-evolve", "gamma_sigma0": [0.0, 0.4], "alpha_modulus": 1 / math.sqrt(2),
                 "time_fractions": [0.0, 0.25, 0.5]}
    for panel, q in zip("abc", ("dx", "dp", "dxdp")):
        m["fig10" + panel] = {"builder": "cs-time-uncertainties", "gamma_sigma0": [0.0, 0.2, 0.4],
                              "alpha_modulus": 1 / math.sqrt(2), "columns": ["gamma_sigma0", "t", q]}
    for i, gs in enumerate((0.0, 0.1, 0.2)):
        m["fig11" + "abc"[i]] = {"builder": "cat-evolve", "gamma_sigma0": gs, "alpha": math.sqrt(2),
                                 "parity": "even"}
        m["fig11" + "def"[i]] = {"builder": "cat-evolve", "gamma_sigma0": gs, "alpha": math.sqrt(2),
                                 "parity": "odd"}
    return m


_MANIFEST = _manifest()


def figure_manifest() -> dict:
    """figure id -> config template (a fresh copy)."""
    return copy.deepcopy(_MANIFEST)


def resolve_figure_ids(fid: str) -> list:
    """Accept a panel id (fig2c) or a figure id (fig2) naming all its panels."""
    if fid in _MANIFEST:
        return [fid]
    ids = [k for k in _MANIFEST if k.startswith(fid) and k[len(fid):].isalpha()]
    if not ids:
        raise ConfigError(f"unknown figure id {fid!r}")
    return ids


def build_figure(fid: str, overrides: dict | None = None) -> FigureDataset:
    if fid not in _MANIFEST:
        raise ConfigError(f"unknown figure id {fid!r}")
    opts = {**figure_manifest()[fid], **(overrides or {})}
    ds = BUILDERS[opts["builder"]](opts)
    if "columns" in opts:
        ds = ds.select(opts["columns"])
    ds.figure_id = fid
    ds.meta = {**ds.meta, "config": {k: v for k, v in opts.items()}}
    return ds
