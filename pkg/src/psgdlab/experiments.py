"""Experiment runners behind the command line.

Each runner takes a resolved :class:`~psgdlab.config.ExperimentConfig` and
returns a :class:`Report` holding pass/fail checks, headline values, CSV tables
and figure callbacks. Writing to disk is left to :func:`write_report`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, plotting
from .bounds import (constant_step_deviation_bound, deviation_bound, h_bound, hp_rhs,
                     loglog_slope, make_constants, theorem_rhs)
from .config import (build_problem, build_schedule, build_set, build_x0, is_constant,
                     is_robbins_monro, require)
from .engine import Constant, build_time_grid, run_mean_process, run_psgd_batch
from .errors import ConfigError, MissingConstant
from .export import (breaks_table, deviation_table, flow_table, measure_table, run_table,
                     to_jsonable, write_csv, write_keyvalue)
from .flow import build_jumping_process, jumping_process_batch
from .geometry import Box
from .problems import ZeroNoise, run_seeds
from .stationarity import (goldstein_measure, gradient_mapping_measure, moreau_grad_norm,
                           running_weighted_average, tangent_residual_measure,
                           weighted_average)


@dataclass
class Check:
    name: str
    passed: bool
    value: float | None = None
    threshold: float | None = None
    detail: str = ""

    def as_dict(self):
        return to_jsonable({"name": self.name, "passed": bool(self.passed), "value": self.value,
                            "threshold": self.threshold, "detail": self.detail})


@dataclass
class Report:
    name: str
    checks: list = field(default_factory=list)
    values: dict = field(default_factory=dict)
    constants: dict | None = None
    tables: dict = field(default_factory=dict)
    figures: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict)

    @property
    def all_passed(self):
        return all(c.passed for c in self.checks)

    def check(self, name, passed, value=None, threshold=None, detail=""):
        self.checks.append(Check(name, bool(passed), value, threshold, detail))


@dataclass
class SweepResult:
    """Per-N statistics of a rate sweep and the fitted log-log slopes."""

    rows: list
    slope: float
    slope_se: float
    rhs_slope: float
    rhs_slope_se: float
    rule: str

    @property
    def slope_ci(self):
        return (self.slope - 1.96 * self.slope_se, self.slope + 1.96 * self.slope_se)


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else float("nan")
    return float(x.mean()), se


def _setup(cfg, section=None):
    section = cfg.raw if section is None else section
    for key in ("problem", "set", "schedule", "N"):
        if section.get(key) is None:
            raise ConfigError(f"missing required key {key!r}", path=key)
    cset = build_set(section["set"])
    problem = build_problem(section)
    if problem.dim != cset.dim:
        raise ConfigError("problem and set dimensions differ", path="set")
    schedule = build_schedule(section["schedule"])
    x0 = build_x0(section, cset)
    return problem, cset, schedule, int(section["N"]), x0


def _runs(cfg, problem, cset, schedule, N, x0, count=None):
    count = cfg.seed_count if count is None else count
    seeds = run_seeds(cfg.master_seed, count)
    return run_psgd_batch(problem, cset, schedule, N, x0, seeds, threads=cfg["threads"])


def _constants(problem, cset):
    try:
        return make_constants(problem, cset)
    except MissingConstant:
        return None


# -- scalar Rademacher example ---------------------------------------------------

def run_example41(cfg):
    """Gradient mapping versus the Goldstein measure for ``f(x, z) = -x + x z``."""
    spec = cfg.get("problem") or {}
    if "example41" not in spec:
        raise ConfigError("example41 needs problem {\"example41\": {}}", path="problem")
    s = cfg.get("set") or {"box": {"lower": [-1.0], "upper": [1.0]}}
    cset = build_set(s)
    if not (isinstance(cset, Box) and cset.dim == 1 and cset.lower[0] == -1.0
            and cset.upper[0] == 1.0):
        raise ConfigError("example41 runs on the interval [-1, 1]", path="set")
    section = dict(cfg.raw)
    section.setdefault("set", s)
    section.setdefault("schedule", {"constant": {"alpha": 0.01}})
    section.setdefault("N", 10_000)
    problem, cset, schedule, N, x0 = _setup(cfg, section)
    batch = _runs(cfg, problem, cset, schedule, N, x0)
    grid = batch.grid
    jb = jumping_process_batch(batch.xs, grid, problem, cset, h=cfg.get("h"))
    gm = gradient_mapping_measure(batch, problem, cset, use_stochastic=True)
    gs = goldstein_measure(batch, jb, problem, cset)
    gm_avg = weighted_average(gm, squared=False)
    gm_mean, gm_se = _mean_se(gm_avg)
    tail = int(N * (1 - cfg["tail_fraction"]))
    gs_tail = float(gs.values[:, tail:].mean())
    one_minus_z = float(np.abs(1.0 - batch.zs).mean())
    det = run_mean_process(problem.deterministic(), cset, schedule, N, x0)
    det_gm = gradient_mapping_measure(det, problem, cset, use_stochastic=False).values
    det_tr = tangent_residual_measure(det, problem, cset).values

    rep = Report("example41")
    rep.constants = make_constants(problem, cset).report()
    rep.values.update(gradient_mapping_mean=gm_mean, gradient_mapping_se=gm_se,
                      goldstein_tail_mean=gs_tail, mean_abs_one_minus_z=one_minus_z,
                      deterministic_final_iterate=float(det.xs[-1, 0]),
                      seeds=batch.R, alpha=float(grid.alphas[0]), N=N)
    if isinstance(problem.noise, ZeroNoise):
        rep.check("iterates reach the boundary maximizer", np.all(batch.xs[:, -1, 0] == 1.0),
                  float(batch.xs[:, -1, 0].min()), 1.0)
        rep.check("deterministic measures vanish at the end",
                  det_gm[-1] == 0.0 and det_tr[-1] == 0.0, float(det_gm[-1] + det_tr[-1]), 0.0)
    else:
        rep.check("gradient mapping average stays at least 1/2", gm_mean >= 0.5, gm_mean, 0.5,
                  f"seed mean of the weighted stochastic gradient mapping, se {gm_se:.3g}")
        rep.check("Goldstein measure tail average at most 0.1", gs_tail <= 0.1, gs_tail, 0.1,
                  f"average over the last {N - tail} iterates at radius b_k")

    mean_gm = gm.values.mean(axis=0)
    mean_gs = gs.values.mean(axis=0)
    rep.tables["example41_measures.csv"] = (
        ["k", "tau_k", "alpha_k", "gradient_mapping_mean", "goldstein_mean", "b_k_mean"],
        [[k, grid.taus[k], grid.alphas[k], mean_gm[k], mean_gs[k], jb.b[:, k].mean()]
         for k in range(N)],
    )
    rep.tables["example41_run0.csv"] = run_table(batch[0])
    rep.tables["example41_run0_goldstein.csv"] = measure_table(gs, grid, 0)
    run_gm = running_weighted_average(gm, squared=False).mean(axis=0)
    run_gs = running_weighted_average(gs, squared=False).mean(axis=0)
    rep.figures["example41.svg"] = lambda p: plotting.series_plot(
        p, grid.taus[1:], {"gradient mapping (running average)": run_gm,
                           "Goldstein at b_k (running average)": run_gs},
        ylabel="seed mean", title="Example with scaled Rademacher noise")
    return rep


# -- trajectory figure ----------------------------------------------------------

FIG1_LEFT = {
    "problem": {"quadratic_cosine": {"P": [[0.1, 0.0], [0.0, 0.1]], "q": [0.0, 0.0],
                                     "c": 0.5, "kappa": 3.0}},
    "set": {"box": {"lower": [-1.0, -1.0], "upper": [1.0, 1.0]}},
    "noise": {"gaussian": {"sigma_hat": 0.5}},
    "schedule": {"constant": {"alpha": 0.01}},
    "N": 2000,
    "x0": [0.0, 0.0],
}

FIG1_RIGHT = {
    "problem": {"quadratic": {"P": [[1.0]], "q": [-0.3]}},
    "set": {"box": {"lower": [-1.0], "upper": [1.0]}},
    "noise": {"gaussian": {"sigma_hat": 0.5}},
    "schedule": {"constant": {"alpha": 0.0001}},
    "N": 50_000,
    "x0": [-1.0],
}


def run_fig1(cfg):
    """Two diverging runs of a nonconvex problem and one convex scalar run."""
    left = {**FIG1_LEFT, **{k: cfg.raw[k] for k in FIG1_LEFT if k in cfg.raw}}
    right = {**FIG1_RIGHT, **(cfg.get("right") or {})}
    rep = Report("fig1")
    rep.labels["objectives"] = "built-in objectives and noise scale chosen for illustration"

    problem, cset, schedule, N, x0 = _setup(cfg, left)
    if not is_constant(schedule):
        raise ConfigError("fig1 uses a constant step", path="schedule")
    consts = make_constants(problem, cset)
    rep.constants = consts.report()
    cand = _runs(cfg, problem, cset, schedule, N, x0, count=cfg["divergence_candidates"])
    finals = cand.xs[:, -1]
    dist = np.linalg.norm(finals[:, None] - finals[None], axis=-1)
    need = 0.1 * cset.diameter
    pair = None
    for i in range(cand.R):
        for j in range(i + 1, cand.R):
            if dist[i, j] >= need:
                pair = (i, j)
                break
        if pair:
            break
    if pair is None:
        pair = tuple(int(v) for v in np.unravel_index(np.argmax(dist), dist.shape))
    i, j = pair
    rep.check("left runs diverge from the same start", dist[i, j] >= need, dist[i, j], need,
              f"runs {i} and {j} of the candidate seeds")
    grid = cand.grid
    left_runs, left_flows = [], []
    hfrac = []
    for r in (i, j):
        run = cand[r]
        flows, dev = build_jumping_process(run, grid, problem, cset, h=cfg.get("h"))
        hs = np.array([h_bound(consts, grid.interval_alphas(k), 0.05)
                       for k in range(grid.n_intervals)])
        hfrac.append(float(np.mean(dev.interval_max <= hs)))
        left_runs.append(run)
        left_flows.append(flows)
        rep.check(f"run {r} stays feasible",
                  np.all(cset.membership_violation(run.xs) <= 1e-9))
        rep.check(f"run {r} flow restarts coincide with break points",
                  np.array_equal(np.array([f.times[0] for f in flows]), grid.breaks[:-1]))
        rep.tables[f"fig1_left_run{r}.csv"] = run_table(run)
        rep.tables[f"fig1_left_flows{r}.csv"] = flow_table(flows)
        rep.tables[f"fig1_left_deviations{r}.csv"] = deviation_table(dev, grid)
    rep.check("interval deviations within h_i(0.05) on at least 95% of intervals",
              min(hfrac) >= 0.95, min(hfrac), 0.95)
    rep.tables["fig1_left_breaks.csv"] = breaks_table(grid)
    rep.values.update(left_pair=[int(i), int(j)], left_final_distance=float(dist[i, j]))
    rep.figures["fig1_left.svg"] = lambda p: plotting.fig1_left(
        p, left_runs, left_flows, cset, [f"run {i}", f"run {j}"])

    pr, cr, sr, Nr, x0r = _setup(cfg, right)
    run = _runs(cfg, pr, cr, sr, Nr, x0r, count=1)[0]
    flows, dev = build_jumping_process(run, run.grid, pr, cr, h=cfg.get("h"))
    target = run_mean_process(pr.deterministic(), cr, Constant(0.1), 20_000, x0r).xs[-1]
    cr_consts = make_constants(pr, cr)
    alpha = float(run.grid.alphas[0])
    err = float(np.linalg.norm(run.xs[-1] - target))
    tol = 5 * math.sqrt(alpha) * (cr_consts.c1 + cr_consts.c2)
    rep.check("right run ends near the constrained minimizer", err <= tol, err, tol)
    rep.values.update(right_final=run.xs[-1].tolist(), right_minimizer=target.tolist())
    rep.tables["fig1_right_run.csv"] = run_table(run)
    rep.tables["fig1_right_flows.csv"] = flow_table(flows, stride=10)
    rep.tables["fig1_right_breaks.csv"] = breaks_table(run.grid)
    rep.figures["fig1_right.svg"] = lambda p: plotting.fig1_right(p, run, flows, float(target[0]))
    return rep


# -- rate sweep -------------------------------------------------------------------

RATE_TOL = {"N^-2/3": (-1.0 / 3.0, 0.02), "N^-4/5": (-0.2, 0.05)}


def sweep_alpha(N, rule, scale=1.0):
    p = {"N^-2/3": -2.0 / 3.0, "N^-4/5": -0.8}[rule]
    return min(0.5, scale * float(N) ** p)


def rhs_curve(consts, Ns, rule, scale=1.0, delta=0.1):
    """Closed-form right-hand side along ``alpha = scale N^p``.

    For the high-probability rule the values are divided by
    ``sqrt(log(N^(1/5) / delta))`` so only the power law remains.
    """
    out = []
    for N in Ns:
        a = sweep_alpha(N, rule, scale)
        if rule == "N^-2/3":
            out.append(theorem_rhs(consts, build_time_grid(Constant(a), N)))
        else:
            out.append(hp_rhs(consts, None, a, N, delta)[1]
                       / math.sqrt(math.log(N**0.2 / delta)))
    return np.array(out)


def run_rate_sweep(cfg):
    """Weighted Goldstein measure across ``N`` with ``alpha`` tied to ``N``."""
    sweep = cfg.get("sweep")
    if sweep is None:
        raise ConfigError("rates needs a sweep section", path="sweep")
    Ns = sorted(int(n) for n in sweep["N"])
    if len(Ns) < 4:
        raise ConfigError("a slope fit needs at least 4 values of N", path="sweep/N")
    if Ns[-1] < 100 * Ns[0]:
        raise ConfigError("the N values must span at least two decades", path="sweep/N")
    if cfg.seed_count < 30:
        raise ConfigError("rate sweeps need at least 30 seeds", path="seeds/count")
    rule, scale, delta = sweep["alpha_rule"], sweep["alpha_scale"], sweep["delta"]
    section = dict(cfg.raw)
    section.setdefault("schedule", {"constant": {"alpha": 0.5}})
    section.setdefault("N", Ns[0])
    problem, cset, _, _, x0 = _setup(cfg, section)
    consts = make_constants(problem, cset)
    rep = Report("rates")
    rep.constants = consts.report()
    rows = []
    for N in Ns:
        a = sweep_alpha(N, rule, scale)
        batch = _runs(cfg, problem, cset, Constant(a), N, x0)
        if rule == "N^-2/3":
            jb = jumping_process_batch(batch.xs, batch.grid, problem, cset, h=cfg.get("h"))
            per_run = weighted_average(goldstein_measure(batch, jb, problem, cset))
            rhs = theorem_rhs(consts, batch.grid)
            extra = float(jb.b.mean())
        else:
            radius, rhs = hp_rhs(consts, batch.grid, a, N, delta)
            per_run = weighted_average(goldstein_measure(batch, radius, problem, cset))
            extra = float(np.mean(per_run > rhs))
        m, se = _mean_se(per_run)
        q25, q50, q75 = np.quantile(per_run, [0.25, 0.5, 0.75])
        rows.append([N, a, m, se, q25, q50, q75, rhs, extra])
        rep.check(f"empirical mean below the bound at N={N}", m <= rhs, m, rhs)
    arr = np.array(rows, dtype=float)
    slope, slope_se = loglog_slope(arr[:, 0], np.maximum(arr[:, 2], 1e-300))
    curve = rhs_curve(consts, Ns, rule, scale, delta)
    rhs_slope, rhs_se = loglog_slope(Ns, curve)
    target, tol = RATE_TOL[rule]
    rep.check(f"bound exponent matches {target:.3f}", abs(rhs_slope - target) <= tol,
              rhs_slope, target, f"tolerance {tol}")
    res = SweepResult(rows, slope, slope_se, rhs_slope, rhs_se, rule)
    rep.values.update(rule=rule, empirical_slope=slope, empirical_slope_ci=list(res.slope_ci),
                      rhs_slope=rhs_slope, seeds=cfg.seed_count)
    last = "mean_b" if rule == "N^-2/3" else "violation_fraction"
    rep.tables["rates.csv"] = (["N", "alpha", "mean", "se", "q25", "median", "q75", "rhs", last],
                               rows)
    rep.figures["rates.svg"] = lambda p: plotting.loglog_plot(
        p, arr[:, 0], {"empirical mean": arr[:, 2], "bound": arr[:, 7]},
        ylabel="weighted squared Goldstein measure")
    rep.sweep = res
    return rep


# -- Robbins-Monro ----------------------------------------------------------------

def quartile_drop(values):
    """Means of the first and last quarter of ``values`` (split as evenly as possible)."""
    parts = np.array_split(np.asarray(values, dtype=float), 4)
    return float(parts[0].mean()), float(parts[-1].mean())


def run_robbins_monro(cfg):
    """Interval deviations and the running weighted measure under a decaying step."""
    problem, cset, schedule, N, x0 = _setup(cfg)
    if not is_robbins_monro(schedule):
        raise ConfigError("robbins-monro needs a harmonic schedule", path="schedule")
    batch = _runs(cfg, problem, cset, schedule, N, x0)
    grid = batch.grid
    if grid.n_intervals < 4:
        raise ConfigError("the run is too short for quartiles of intervals", path="N")
    jb = jumping_process_batch(batch.xs, grid, problem, cset, h=cfg.get("h"))
    gs = goldstein_measure(batch, jb, problem, cset)
    imax = jb.interval_max().mean(axis=0)
    running = running_weighted_average(gs)[:, grid.K[1:] - 1].mean(axis=0)
    rep = Report("robbins_monro")
    c = _constants(problem, cset)
    rep.constants = None if c is None else c.report()
    for name, series in (("interval-max deviation", imax), ("running weighted measure", running)):
        first, last = quartile_drop(series)
        rep.check(f"{name} drops by half from first to last quartile", last <= 0.5 * first,
                  last, 0.5 * first)
    rep.values.update(interval_max=imax.tolist(), running_measure=running.tolist(),
                      intervals=grid.n_intervals, seeds=batch.R)
    rep.tables["robbins_monro.csv"] = (
        ["i", "s_i", "interval_max_b_mean", "running_measure_mean"],
        [[i, grid.breaks[i], imax[i], running[i]] for i in range(grid.n_intervals)],
    )
    rep.tables["robbins_monro_breaks.csv"] = breaks_table(grid)
    idx = np.arange(grid.n_intervals)
    rep.figures["robbins_monro.svg"] = lambda p: plotting.series_plot(
        p, idx, {"interval max b_k": imax, "running weighted measure": running},
        xlabel="interval i", logy=True)
    return rep


# -- generic run ------------------------------------------------------------------

def run_generic(cfg):
    """Runs, requested measures and one-sided checks against the bounds."""
    problem, cset, schedule, N, x0 = _setup(cfg)
    batch = _runs(cfg, problem, cset, schedule, N, x0)
    grid = batch.grid
    rep = Report("run")
    consts = _constants(problem, cset)
    rep.constants = None if consts is None else consts.report()
    rep.check("iterates stay feasible", np.all(cset.membership_violation(batch.xs) <= 1e-9))
    jb = jumping_process_batch(batch.xs, grid, problem, cset, h=cfg.get("h"))
    series = {}
    wanted = cfg["measures"]
    if "goldstein" in wanted:
        series["goldstein"] = goldstein_measure(batch, jb, problem, cset)
    if "gradient_mapping" in wanted:
        series["gradient_mapping"] = gradient_mapping_measure(batch, problem, cset, True)
    if "tangent_residual" in wanted:
        series["tangent_residual"] = tangent_residual_measure(batch, problem, cset)
    for eps in cfg["fixed_eps"]:
        series[f"goldstein_eps{eps:g}"] = goldstein_measure(batch, float(eps), problem, cset)
    for name, s in series.items():
        avg = weighted_average(s)
        m, se = _mean_se(avg)
        rep.values[f"{name}_weighted_sq_mean"] = m
        rep.values[f"{name}_weighted_sq_se"] = se
        rep.tables[f"measure_{name}_run0.csv"] = measure_table(s, grid, 0)
    if "moreau" in wanted:
        lam = cfg["moreau_lambda"]
        vals = [moreau_grad_norm(problem, cset, x, lam) for x in batch.xs[0, :-1]]
        rep.values["moreau_weighted_sq_run0"] = float(
            np.sum(grid.alphas * np.square(vals)) / grid.taus[-1])
    if consts is not None:
        dev = deviation_bound(consts, grid)
        mb = jb.b.mean(axis=0)
        rep.check("mean deviations below the per-iterate bound", np.all(mb <= dev),
                  float(np.max(mb - dev)), 0.0, "largest excess of mean b_k over its bound")
        if "goldstein" in series:
            m = rep.values["goldstein_weighted_sq_mean"]
            rhs = theorem_rhs(consts, grid)
            rep.values["theorem_rhs"] = rhs
            rep.check("weighted squared Goldstein mean below the theorem bound", m <= rhs, m, rhs)
        if is_constant(schedule) and consts.sigma_hat is not None and problem.assumption == "A1":
            a = float(grid.alphas[0])
            rep.values["constant_step_deviation_bound"] = constant_step_deviation_bound(consts, a)
            for d in cfg["deltas"]:
                radius, bound = hp_rhs(consts, grid, a, N, d)
                lhs = weighted_average(goldstein_measure(batch, radius, problem, cset))
                frac = float(np.mean(lhs > bound))
                slack = 3.0 * math.sqrt(d * (1 - d) / batch.R)
                rep.check(f"high-probability bound coverage at delta={d}", frac <= d + slack,
                          frac, d + slack)
    rep.tables["run0.csv"] = run_table(batch[0])
    rep.tables["breaks.csv"] = breaks_table(grid)
    rep.tables["deviations_run0.csv"] = deviation_table(jb[0], grid)
    if series:
        t = grid.taus[1:]
        curves = {k: running_weighted_average(s).mean(axis=0) for k, s in series.items()}
        rep.figures["measures.svg"] = lambda p: plotting.series_plot(
            p, t, curves, ylabel="running weighted squared measure (seed mean)", logy=True)
    rep.values.update(seeds=batch.R, N=N, intervals=grid.n_intervals)
    return rep


def run_constants(cfg):
    """Bound constants, plus right-hand sides when a schedule and N are given."""
    require(cfg, "problem", "set")
    cset = build_set(cfg["set"])
    problem = build_problem(cfg.raw)
    consts = make_constants(problem, cset)
    rep = Report("constants")
    rep.constants = consts.report()
    if cfg.get("schedule") is not None and cfg.get("N") is not None:
        schedule = build_schedule(cfg["schedule"])
        grid = build_time_grid(schedule, cfg["N"])
        rep.values["theorem_rhs"] = theorem_rhs(consts, grid)
        rep.tables["breaks.csv"] = breaks_table(grid)
        if consts.sigma_hat is not None:
            d = cfg["deltas"][0]
            hs = [h_bound(consts, grid.interval_alphas(i), d) for i in range(grid.n_intervals)]
            rep.tables["h_bounds.csv"] = (["i", "s_i", "h_i"],
                                          [[i, grid.breaks[i], h] for i, h in enumerate(hs)])
            if is_constant(schedule):
                a = float(grid.alphas[0])
                radius, bound = hp_rhs(consts, grid, a, grid.N, d)
                rep.values.update(hp_radius=radius, hp_bound=bound)
    return rep


RUNNERS = {
    "run": run_generic,
    "example41": run_example41,
    "fig1": run_fig1,
    "rates": run_rate_sweep,
    "robbins_monro": run_robbins_monro,
    "constants": run_constants,
}


def write_report(rep, cfg, out_dir):
    """Write tables, figures, constants, the resolved config and ``summary.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.resolved.json").write_text(cfg.to_json() + "\n")
    for name, (header, rows) in rep.tables.items():
        write_csv(out / name, header, rows)
    for name, draw in rep.figures.items():
        draw(out / name)
    if rep.constants is not None:
        write_keyvalue(out / "constants.toml", rep.constants, title="constants")
        write_csv(out / "constants.csv", ["name", "value"], list(rep.constants.items()))
    summary = {
        "experiment": rep.name,
        "version": __version__,
        "config": cfg.raw,
        "constants": rep.constants,
        "values": rep.values,
        "labels": rep.labels,
        "assertions": [c.as_dict() for c in rep.checks],
        "all_passed": rep.all_passed,
    }
    (out / "summary.json").write_text(json.dumps(to_jsonable(summary), indent=2) + "\n")
    return out


__all__ = ["Report", "Check", "SweepResult", "RUNNERS", "write_report", "run_example41",
           "run_fig1", "run_rate_sweep", "run_robbins_monro", "run_generic", "run_constants"]
