"""Parameter sweeps that produce the reference datasets.

Each ``run_*`` function takes a :class:`~steadyent.config.SweepConfig` and
returns a :class:`SweepResult`; grid points are computed on a process pool
(``config.workers``) and always reported in grid order. Failing points carry
the exception class name in the ``error`` column and never abort a sweep.
"""

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field, replace
import datetime
import io
import itertools
import math
import time

import numpy as np
from scipy.optimize import minimize

from . import __version__
from .cavity import CavitySpec, effective_concurrence, solve_point
from .concurrence import concurrence
from .diamond import analytic_concurrence, build_diamond, rates_from_betas
from .errors import ConfigError, SteadyEntError
from .lindblad import steady_state
from .thermo import entropy_rate
from .trajectories import ExactJumpSampler, ensemble_estimators, run_ensemble, write_trajectory_dump

__all__ = [
    "SweepResult",
    "run_effective_grid",
    "run_cavity_kappa_scan",
    "run_cavity_grid",
    "run_robustness",
    "run_trajectories",
    "run_sweep",
    "write_csv",
    "csv_text",
]


@dataclass
class SweepResult:
    columns: list
    rows: list
    summary: dict = field(default_factory=dict)
    n_failed: int = 0

    @property
    def exit_code(self):
        if not self.rows:
            return 0
        if self.n_failed == len(self.rows):
            return 3
        return 2 if self.n_failed else 0


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(result, timestamp=True):
    """CSV text: optional ``#`` provenance line, one header row, LF endings."""
    buf = io.StringIO()
    if timestamp:
        now = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
        buf.write(f"# steadyent {__version__} generated {now}\n")
    cols = [c for c in result.columns if timestamp or c != "wall_time"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in result.rows:
        w.writerow([_fmt(row.get(c)) for c in cols])
    return buf.getvalue()


def write_csv(result, path, timestamp=True):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(result, timestamp))


def _map(fn, tasks, workers):
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    return [fn(t) for t in tasks]


def _guard(fn, row, *args):
    t = time.perf_counter()
    try:
        row.update(fn(*args))
        row["error"] = ""
    except (SteadyEntError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        row["error"] = type(exc).__name__
    row["wall_time"] = time.perf_counter() - t
    return row


def _finish(columns, rows, summary=None):
    failed = sum(1 for r in rows if r.get("error"))
    return SweepResult(columns=columns, rows=rows, summary=summary or {}, n_failed=failed)


def _expect(config, mode):
    if config.mode != mode:
        raise ConfigError(f"config mode is {config.mode!r}, expected {mode!r}")


# --------------------------------------------------------------------------
# effective diamond grid

_EFF_COLUMNS = [
    "beta_A", "beta_S", "concurrence_analytic", "concurrence_numeric",
    "qdot_A", "qdot_S", "sdot", "sdot_norm", "sdot_norm_omega0",
    "residual", "error", "wall_time",
]


def effective_point(beta_A, beta_S, gamma_plus=1.0, omega0=1.0):
    """All effective-model outputs at one ``(beta_A, beta_S)``."""
    spec = rates_from_betas(beta_A, beta_S, gamma_plus, omega0)
    sys = build_diamond(spec)
    ss = steady_state(sys)
    rep = entropy_rate(sys, ss.rho, {"A": beta_A, "S": beta_S}, omega0=omega0, gamma_plus=gamma_plus)
    return {
        "concurrence_analytic": analytic_concurrence(beta_A, beta_S),
        "concurrence_numeric": concurrence(ss.rho),
        "qdot_A": rep.heat_currents["A"],
        "qdot_S": rep.heat_currents["S"],
        "sdot": rep.entropy_rate,
        "sdot_norm": rep.entropy_rate_normalized,
        "sdot_norm_omega0": rep.entropy_rate_normalized_omega0,
        "residual": ss.residual,
    }


def _effective_task(args):
    ba, bs, gp, w0 = args
    return _guard(effective_point, {"beta_A": ba, "beta_S": bs}, ba, bs, gp, w0)


def run_effective_grid(config):
    _expect(config, "effective-grid")
    gp = float(config.param("gamma_plus"))
    w0 = float(config.param("omega0"))
    tasks = [
        (float(a), float(s), gp, w0)
        for a, s in itertools.product(config.axes["beta_A"].values(), config.axes["beta_S"].values())
    ]
    return _finish(_EFF_COLUMNS, _map(_effective_task, tasks, config.workers))


# --------------------------------------------------------------------------
# cavity model


def cavity_spec(g_over_omega0, kappa_over_g, p_over_g, gamma_over_g, **extra_over_g):
    """``CavitySpec`` with ``omega0 = 1`` from rates quoted in units of ``g``."""
    g = float(g_over_omega0)
    kw = {k.removesuffix("_over_g"): float(v) * g for k, v in extra_over_g.items()}
    return CavitySpec(g=g, kappa=kappa_over_g * g, p=p_over_g * g, gamma=gamma_over_g * g, **kw)


def _cavity_outputs(spec, c_tol):
    pt = solve_point(spec, c_tol)
    return {"C_full": pt.concurrence, "n_used": pt.n_used, "residual": pt.steady.residual}


_KAPPA_COLUMNS = ["p_over_g", "kappa_over_g", "C_full", "C_effective_mapped", "n_used", "residual", "error", "wall_time"]


def _kappa_task(args):
    g, kap, p, gam, c_tol = args

    def work():
        spec = cavity_spec(g, kap, p, gam)
        out = _cavity_outputs(spec, c_tol)
        out["C_effective_mapped"] = effective_concurrence(spec)
        return out

    return _guard(work, {"p_over_g": p, "kappa_over_g": kap})


def run_cavity_kappa_scan(config):
    _expect(config, "cavity-kappa-scan")
    f = config.fixed
    ps = config.axes["p_over_g"].values() if "p_over_g" in config.axes else [f["p_over_g"]]
    tasks = [
        (float(f["g_over_omega0"]), float(k), float(p), float(f["gamma_over_g"]), float(f["c_tol"]))
        for p in ps
        for k in config.axes["kappa_over_g"].values()
    ]
    return _finish(_KAPPA_COLUMNS, _map(_kappa_task, tasks, config.workers))


_GRID_COLUMNS = ["p_over_g", "kappa_over_g", "p_over_gamma", "C_full", "n_used", "residual", "error", "wall_time"]


def _grid_task(args):
    g, p, kap, gam, c_tol = args
    row = {"p_over_g": p, "kappa_over_g": kap, "p_over_gamma": p / gam if gam > 0 else math.inf}
    return _guard(lambda: _cavity_outputs(cavity_spec(g, kap, p, gam), c_tol), row)


def refine_maximum(g_over_omega0, gamma_over_g, p_over_g, kappa_over_g, c_tol=1e-4, xatol=1e-4):
    """Nelder-Mead on ``(log10 p, log10 kappa)`` starting from a grid point.

    Returns ``(C_max, p_over_g, kappa_over_g, n_used)``.
    """
    cache = {}

    def neg_c(x):
        key = (round(x[0], 12), round(x[1], 12))
        if key not in cache:
            try:
                pt = solve_point(cavity_spec(g_over_omega0, 10 ** x[1], 10 ** x[0], gamma_over_g), c_tol)
                cache[key] = (-pt.concurrence, pt.n_used)
            except SteadyEntError:
                cache[key] = (0.0, 0)
        return cache[key][0]

    x0 = [math.log10(p_over_g), math.log10(kappa_over_g)]
    res = minimize(neg_c, x0, method="Nelder-Mead",
                   options={"xatol": xatol, "fatol": 1e-9, "initial_simplex": [x0, [x0[0] + 0.05, x0[1]], [x0[0], x0[1] + 0.05]]})
    key = (round(res.x[0], 12), round(res.x[1], 12))
    neg_c(res.x)
    return -cache[key][0], float(10 ** res.x[0]), float(10 ** res.x[1]), cache[key][1]


def run_cavity_grid(config):
    """Concurrence over ``(p, kappa)``; the summary holds grid and refined maxima."""
    _expect(config, "cavity-grid")
    f = config.fixed
    g, gam, c_tol = float(f["g_over_omega0"]), float(f["gamma_over_g"]), float(f["c_tol"])
    tasks = [
        (g, float(p), float(k), gam, c_tol)
        for p, k in itertools.product(config.axes["p_over_g"].values(), config.axes["kappa_over_g"].values())
    ]
    rows = _map(_grid_task, tasks, config.workers)
    ok = [r for r in rows if not r["error"]]
    summary = {}
    if ok:
        best = max(ok, key=lambda r: r["C_full"])
        summary = {
            "grid_max": best["C_full"],
            "grid_argmax_p_over_g": best["p_over_g"],
            "grid_argmax_kappa_over_g": best["kappa_over_g"],
            "grid_argmax_p_over_gamma": best["p_over_gamma"],
            "grid_argmax_n_used": best["n_used"],
            "max_n_used": max(r["n_used"] for r in ok),
        }
        if float(f.get("refine", 0.0)):
            cmax, p, k, n = refine_maximum(g, gam, best["p_over_g"], best["kappa_over_g"], c_tol)
            if cmax >= best["C_full"]:
                summary.update({
                    "refined_max": cmax,
                    "refined_argmax_p_over_g": p,
                    "refined_argmax_kappa_over_g": k,
                    "refined_argmax_p_over_gamma": p / gam if gam > 0 else math.inf,
                    "refined_n_used": n,
                })
    return _finish(_GRID_COLUMNS, rows, summary)


_ROB_COLUMNS = ["scan", "value_over_g", "C_full", "n_used", "residual", "error", "wall_time"]
_ROB_FIELDS = {"gamma_z_over_g": "gamma_z", "delta_over_g": "delta", "p_c_over_g": "p_c"}


def _rob_task(args):
    g, base_kw, field_name, value, c_tol = args

    def work():
        spec = replace(cavity_spec(g, **base_kw), **{field_name: value * g})
        return _cavity_outputs(spec, c_tol)

    return _guard(work, {"scan": field_name, "value_over_g": value})


def run_robustness(config):
    """Three one-parameter scans (dephasing, detuning, cavity pump) around a base point."""
    _expect(config, "robustness")
    f = config.fixed
    g = float(f["g_over_omega0"])
    base_kw = {
        "kappa_over_g": float(f["kappa_over_g"]),
        "p_over_g": float(f["p_over_g"]),
        "gamma_over_g": float(f["gamma_over_g"]),
    }
    tasks = [
        (g, base_kw, field_name, float(v), float(f["c_tol"]))
        for axis_name, field_name in _ROB_FIELDS.items()
        for v in config.axes[axis_name].values()
    ]
    rows = _map(_rob_task, tasks, config.workers)
    summary = {"base_p_over_g": base_kw["p_over_g"], "base_kappa_over_g": base_kw["kappa_over_g"]}
    return _finish(_ROB_COLUMNS, rows, summary)


# --------------------------------------------------------------------------
# trajectories

_TRAJ_COLUMNS = ["quantity", "value", "stderr", "reference", "check", "pass"]


def run_trajectories(config, dump=None):
    """Ensemble estimators plus pass/fail lines for the fluctuation theorem,
    the second law and agreement with the steady-state entropy rate."""
    _expect(config, "trajectories")
    f = config.fixed
    ba, bs = float(f["beta_A"]), float(f["beta_S"])
    gp, w0 = float(f["gamma_plus"]), float(f["omega0"])
    n, dur = int(f["n_traj"]), float(f["duration"])
    sys = build_diamond(rates_from_betas(ba, bs, gp, w0))
    ss = steady_state(sys)
    betas = {"A": ba, "S": bs}
    rep = entropy_rate(sys, ss.rho, betas, omega0=w0, gamma_plus=gp)
    sampler = ExactJumpSampler(sys, ss, betas, omega0=w0)
    dump_path = dump or f.get("dump") or None
    records = run_ensemble(sampler, dur, n, base_seed=config.seed, workers=config.workers,
                           keep_events=bool(dump_path))
    st = ensemble_estimators(records)
    if dump_path:
        with open(dump_path, "w", encoding="utf-8", newline="") as fh:
            write_trajectory_dump(records, fh)
    equilibrium = ba == bs
    ft_ok = abs(st.mean_exp_neg_dS - 1.0) < 3 * st.se_exp_neg_dS
    if equilibrium:
        sl_ok = abs(st.mean_dS) <= 3 * st.se_dS
        sl_check = "|mean_dS| <= 3 SE"
    else:
        sl_ok = st.mean_dS > 3 * st.se_dS
        sl_check = "mean_dS > 3 SE"
    rate_ok = abs(st.rate_estimate - rep.entropy_rate) <= 3 * st.se_rate
    rows = [
        {"quantity": "n_trajectories", "value": st.n},
        {"quantity": "duration", "value": st.duration},
        {"quantity": "mean_dS_boundary", "value": st.mean_dS_boundary},
        {"quantity": "mean_dS_conditional", "value": st.mean_dS_conditional},
        {"quantity": "mean_exp_neg_dS", "value": st.mean_exp_neg_dS, "stderr": st.se_exp_neg_dS,
         "reference": 1.0, "check": "|value - 1| < 3 SE", "pass": ft_ok},
        {"quantity": "mean_dS", "value": st.mean_dS, "stderr": st.se_dS,
         "reference": 0.0, "check": sl_check, "pass": sl_ok},
        {"quantity": "rate_estimate", "value": st.rate_estimate, "stderr": st.se_rate,
         "reference": rep.entropy_rate, "check": "|value - thermo| <= 3 SE", "pass": rate_ok},
    ]
    for (label, direction), c in sorted(st.mean_jump_counts.items()):
        rows.append({"quantity": f"mean_jumps_{label}_{direction}", "value": c})
    n_failed = sum(1 for r in rows if r.get("pass") is False)
    summary = {"fluctuation_theorem": ft_ok, "second_law": sl_ok, "rate_consistency": rate_ok}
    return SweepResult(columns=_TRAJ_COLUMNS, rows=rows, summary=summary, n_failed=n_failed)


RUNNERS = {
    "effective-grid": run_effective_grid,
    "cavity-kappa-scan": run_cavity_kappa_scan,
    "cavity-grid": run_cavity_grid,
    "robustness": run_robustness,
    "trajectories": run_trajectories,
}


def run_sweep(config):
    return RUNNERS[config.mode](config)
