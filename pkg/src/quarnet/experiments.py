"""Experiment suites: threshold sweeps, quarantine grids, multi-quarantine
strategies, infection-strength ablations, structural-change and immunization
reports, and robustness series.

Trials are embarrassingly parallel over a shared read-only graph.  Every
trial draws from a stream derived from (master seed, cell index, trial
index), so results are reproducible and independent of the worker count.
"""

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .genfun import (DegreeDistribution, NoThresholdExists, NoThresholdNeeded,
                     herd_threshold, removed_after_quarantine)
from .graph import Graph, graph_stats, immunize, induced_susceptible_subgraph
from .rng import py_rng
from .simulate import (EpidemicParams, FractionAffected, InfectedCount,
                       NoQuarantine, SimError, detect_second_wave, run_sir)

__all__ = [
    "SweepSpec",
    "SweepResult",
    "GridResult",
    "MultiQResult",
    "StructuralChangeReport",
    "ImmunizationReport",
    "sweep_single",
    "grid_two_quarantines",
    "multi_quarantine_equal_peaks",
    "infected_count_strategy",
    "beta_gamma_ablation",
    "structural_change_report",
    "immunization_comparison",
    "robustness_series",
]

DEFAULT_GRID = tuple(round(0.01 * i, 2) for i in range(101))


@dataclass
class SweepSpec:
    graph: Graph
    params: EpidemicParams
    thresholds: tuple = DEFAULT_GRID
    trials: int = 100
    master_seed: int = 0
    workers: int | None = None

    def __post_init__(self):
        thr = tuple(float(x) for x in self.thresholds)
        if any(not 0.0 <= x <= 1.0 for x in thr) or any(b <= a for a, b in zip(thr, thr[1:])):
            raise SimError("threshold grid must be ascending within [0, 1]")
        self.thresholds = thr
        if self.trials < 1:
            raise SimError("trials must be >= 1")


@dataclass
class SweepResult:
    thresholds: np.ndarray
    mean_total: np.ndarray
    stderr_total: np.ndarray
    mean_max: np.ndarray
    stderr_max: np.ndarray
    second_wave_prob: np.ndarray
    baseline_total: float          # NoQuarantine mean
    baseline_max: float
    per_trial_total: np.ndarray    # (len(thresholds), trials)
    per_trial_max: np.ndarray
    failures: list = field(default_factory=list)

    @property
    def argmin_total(self) -> float:
        return float(self.thresholds[int(np.nanargmin(self.mean_total))])

    @property
    def argmin_max(self) -> float:
        return float(self.thresholds[int(np.nanargmin(self.mean_max))])

    @property
    def min_total(self) -> float:
        return float(np.nanmin(self.mean_total))

    @property
    def min_max(self) -> float:
        return float(np.nanmin(self.mean_max))

    def conditional_min_total(self, floor: float = 0.05) -> float:
        """Per-threshold mean of totals conditioned on outbreak (total >= floor),
        minimized over thresholds; thresholds with no outbreak keep the plain mean."""
        cond = []
        for row in self.per_trial_total:
            big = row[row >= floor]
            cond.append(big.mean() if big.size else row.mean())
        return float(np.nanmin(cond))


# -- pooled trial running ----------------------------------------------------

_CTX: dict = {}


def _pool_init(graph, params, master_seed):
    _CTX["graph"] = graph
    _CTX["params"] = params
    _CTX["master"] = master_seed
    graph.adjacency_tuples()  # build once per worker


def _run_cell(task):
    cell_idx, policy, trials = task
    g, params, master = _CTX["graph"], _CTX["params"], _CTX["master"]
    out = []
    try:
        for trial in range(trials):
            rng = py_rng(master, cell_idx, trial)
            o = run_sir(g, params, policy, rng=rng)
            sw = (o.n_quarantines > 0 and detect_second_wave(o, 0))
            out.append((o.final_removed_fraction, o.max_infected_fraction,
                        o.n_quarantines, 1.0 if sw else 0.0))
    except SimError as exc:
        return cell_idx, None, f"{type(exc).__name__}: {exc}"
    return cell_idx, np.asarray(out), None


def _map_cells(graph, params, master_seed, tasks, workers):
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(tasks) == 1:
        _pool_init(graph, params, master_seed)
        return [_run_cell(t) for t in tasks]
    import multiprocessing as mp

    ctx = mp.get_context("fork")
    with ctx.Pool(workers, initializer=_pool_init,
                  initargs=(graph, params, master_seed)) as pool:
        return pool.map(_run_cell, tasks, chunksize=1)


def _stderr(a, axis=None):
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[-1] if axis else a.size
    return a.std(ddof=1, axis=axis) / math.sqrt(n) if n > 1 else np.zeros(a.shape[0] if axis else ())


def sweep_single(spec: SweepSpec) -> SweepResult:
    """Monte Carlo sweep of the single-quarantine threshold, plus a
    no-quarantine baseline cell."""
    thr = spec.thresholds
    tasks = [(i, FractionAffected((t,)), spec.trials) for i, t in enumerate(thr)]
    tasks.append((len(thr), NoQuarantine(), spec.trials))
    results = _map_cells(spec.graph, spec.params, spec.master_seed, tasks, spec.workers)
    per_total = np.full((len(thr) + 1, spec.trials), np.nan)
    per_max = np.full((len(thr) + 1, spec.trials), np.nan)
    sw = np.full((len(thr) + 1, spec.trials), np.nan)
    failures = []
    for cell_idx, arr, err in results:
        if err is not None:
            failures.append((thr[cell_idx] if cell_idx < len(thr) else None, err))
            continue
        per_total[cell_idx] = arr[:, 0]
        per_max[cell_idx] = arr[:, 1]
        sw[cell_idx] = arr[:, 3]
    return SweepResult(
        thresholds=np.asarray(thr),
        mean_total=per_total[:-1].mean(axis=1),
        stderr_total=_stderr(per_total[:-1], axis=1),
        mean_max=per_max[:-1].mean(axis=1),
        stderr_max=_stderr(per_max[:-1], axis=1),
        second_wave_prob=sw[:-1].mean(axis=1),
        baseline_total=float(per_total[-1].mean()),
        baseline_max=float(per_max[-1].mean()),
        per_trial_total=per_total[:-1],
        per_trial_max=per_max[:-1],
        failures=failures,
    )


@dataclass
class GridResult:
    q1_values: np.ndarray
    q2_values: np.ndarray
    mean_total: np.ndarray   # (len(q1), len(q2))
    mean_max: np.ndarray
    stderr_total: np.ndarray
    stderr_max: np.ndarray

    @property
    def min_total(self) -> float:
        return float(np.nanmin(self.mean_total))

    @property
    def min_max(self) -> float:
        return float(np.nanmin(self.mean_max))


def grid_two_quarantines(spec: SweepSpec, grid1, grid2) -> GridResult:
    """Two-quarantine grid; the second threshold counts the population affected
    after the first quarantine's end."""
    q1 = [float(x) for x in grid1]
    q2 = [float(x) for x in grid2]
    tasks = []
    for i, a in enumerate(q1):
        for j, b in enumerate(q2):
            tasks.append((i * len(q2) + j, FractionAffected((a, b), relative=True), spec.trials))
    results = _map_cells(spec.graph, spec.params, spec.master_seed, tasks, spec.workers)
    mt = np.full((len(q1), len(q2)), np.nan)
    mm = np.full((len(q1), len(q2)), np.nan)
    st = np.full((len(q1), len(q2)), np.nan)
    sm = np.full((len(q1), len(q2)), np.nan)
    for cell_idx, arr, err in results:
        if err is not None:
            continue
        i, j = divmod(cell_idx, len(q2))
        mt[i, j] = arr[:, 0].mean()
        mm[i, j] = arr[:, 1].mean()
        st[i, j] = _stderr(arr[:, 0])
        sm[i, j] = _stderr(arr[:, 1])
    return GridResult(np.asarray(q1), np.asarray(q2), mt, mm, st, sm)


def infected_count_strategy(graph, params, triggers, trials=50, master_seed=0,
                            workers=None, single_optimum=None):
    """Unbounded quarantines declared whenever the infected count reaches each
    trigger; reports mean final removed fraction and the ratio to a
    single-quarantine optimum when provided."""
    triggers = [int(t) for t in triggers]
    if any(t < params.rho for t in triggers):
        raise SimError("triggers must be >= rho")
    tasks = [(i, InfectedCount(t), trials) for i, t in enumerate(triggers)]
    results = _map_cells(graph, params, master_seed, tasks, workers)
    rows = {}
    for cell_idx, arr, err in results:
        if err is not None:
            continue
        rows[triggers[cell_idx]] = {
            "mean_total": float(arr[:, 0].mean()),
            "stderr_total": float(_stderr(arr[:, 0])),
            "mean_quarantines": float(arr[:, 2].mean()),
            "ratio_to_optimum": (float(arr[:, 0].mean() / single_optimum)
                                 if single_optimum else float("nan")),
        }
    return rows


def beta_gamma_ablation(graph, ratios, thresholds=DEFAULT_GRID, trials=100,
                        rho=10, master_seed=0, workers=None):
    """Sweep family over infection strengths beta = ratio, gamma = 1."""
    out = {}
    for k, ratio in enumerate(ratios):
        spec = SweepSpec(
            graph=graph,
            params=EpidemicParams(beta=float(ratio), gamma=1.0, rho=rho),
            thresholds=thresholds,
            trials=trials,
            master_seed=master_seed + 7919 * k,
            workers=workers,
        )
        out[float(ratio)] = sweep_single(spec)
    return out


def ablation_summary(results: dict):
    """Per-ratio argmin threshold and trough depth (baseline minus optimum)."""
    rows = []
    for ratio in sorted(results):
        r = results[ratio]
        rows.append({
            "ratio": ratio,
            "argmin_threshold": r.argmin_total,
            "min_total": r.min_total,
            "baseline_total": r.baseline_total,
            "trough_depth": r.baseline_total - r.min_total,
        })
    return rows


@dataclass
class MultiQResult:
    thresholds: list          # affected fraction at each quarantine (trial means)
    peak_cap: int             # infected-count cap found by the bisection
    wave_peaks: list          # mean peak height per wave (fractions)
    wave_fwhm: list           # mean FWHM per wave (NaN where undefined)
    mean_total: float
    search_exhausted: bool = False


def multi_quarantine_equal_peaks(graph, params, n_quarantines, trials=8,
                                 master_seed=0, refine_trials=16) -> MultiQResult:
    """Choose n quarantine timings that roughly equalize the wave peaks.

    Bisects on a peak cap H: quarantining whenever the infected count reaches
    H caps every controlled wave at H, and the cap is lowered until the final
    free-running wave matches it.
    """
    from .simulate import UndefinedWidthError, fwhm as _fwhm

    if n_quarantines < 1:
        raise SimError("n_quarantines must be >= 1")
    n = graph.n

    def max_peak(cap, seeds):
        peaks = []
        for s in seeds:
            o = run_sir(graph, params, InfectedCount(cap, n_quarantines),
                        rng=py_rng(master_seed, 0xE0, cap, s))
            peaks.append(max(o.wave_peaks))
        return float(np.mean(peaks))

    lo, hi = params.rho, n
    exhausted = False
    for _ in range(40):
        if hi - lo <= max(1, n // 2000):
            break
        mid = (lo + hi) // 2
        if max_peak(mid, range(trials)) > mid:
            lo = mid
        else:
            hi = mid
    else:
        exhausted = True
    cap = hi

    # refinement pass: measure the returned configuration
    thr_rows = []
    peaks_acc = []
    widths_acc = []
    totals = []
    for s in range(refine_trials):
        o = run_sir(graph, params, InfectedCount(cap, n_quarantines),
                    rng=py_rng(master_seed, 0xF1, s), record_timeseries=True)
        thr_rows.append(list(o.affected_at_quarantine[:n_quarantines]))
        peaks_acc.append([p / n for p in o.wave_peaks])
        widths = []
        for win in o.wave_windows:
            try:
                widths.append(_fwhm(o.timeseries, win))
            except UndefinedWidthError:
                widths.append(float("nan"))
        widths_acc.append(widths)
        totals.append(o.final_removed_fraction)
    n_q_seen = max(len(r) for r in thr_rows)
    thresholds = [float(np.mean([r[i] for r in thr_rows if len(r) > i]))
                  for i in range(n_q_seen)]
    n_waves = max(len(p) for p in peaks_acc)
    mean_peaks = [float(np.mean([p[w] for p in peaks_acc if len(p) > w])) for w in range(n_waves)]
    mean_widths = []
    for w in range(n_waves):
        vals = [v[w] for v in widths_acc if len(v) > w and not math.isnan(v[w])]
        mean_widths.append(float(np.mean(vals)) if vals else float("nan"))
    return MultiQResult(
        thresholds=thresholds,
        peak_cap=cap,
        wave_peaks=mean_peaks,
        wave_fwhm=mean_widths,
        mean_total=float(np.mean(totals)),
        search_exhausted=exhausted,
    )


@dataclass
class StructuralChangeReport:
    before: object
    after_avg_degree: float
    after_avg_path: float
    degree_change_pct: float
    path_change_pct: float
    threshold: float
    trials: int


def structural_change_report(graph, params, threshold, trials=8, master_seed=0,
                             path_sample_pairs=20_000) -> StructuralChangeReport:
    """Summary statistics of the susceptible subgraph left by an optimally
    timed quarantine, averaged over trials."""
    before = graph_stats(graph, path_sample_pairs=path_sample_pairs, seed=master_seed)
    degs, paths = [], []
    for s in range(trials):
        o = run_sir(graph, params, FractionAffected((threshold,)),
                    rng=py_rng(master_seed, 0x57, s))
        sub = induced_susceptible_subgraph(graph, o.final_states)
        if sub.n == 0:
            degs.append(0.0)
            paths.append(0.0)
            continue
        st = graph_stats(sub, path_sample_pairs=path_sample_pairs, seed=master_seed + s)
        degs.append(st.avg_degree)
        paths.append(st.avg_shortest_path)
    after_deg = float(np.mean(degs))
    after_path = float(np.mean(paths))
    return StructuralChangeReport(
        before=before,
        after_avg_degree=after_deg,
        after_avg_path=after_path,
        degree_change_pct=100.0 * (after_deg - before.avg_degree) / before.avg_degree,
        path_change_pct=100.0 * (after_path - before.avg_shortest_path) / before.avg_shortest_path,
        threshold=threshold,
        trials=trials,
    )


@dataclass
class ImmunizationReport:
    random_fraction: float | None
    top_degree_fraction: float | None
    quarantine_theory_fraction: float | None      # None = unattainable
    quarantine_theory_unattainable: bool
    quarantine_experiment_mean: float
    quarantine_experiment_conditional: float
    quarantine_experiment_threshold: float


def _outbreak_free(graph, removed_set, params, trials, master_seed, outbreak_floor=0.05,
                   quantile=0.95):
    """True if epidemics on the immunized graph stay below the outbreak size in
    at least `quantile` of trials.  Outbreak size counts post-seed infections
    against the original node count."""
    states = np.zeros(graph.n, dtype=np.int8)
    states[np.asarray(removed_set, dtype=np.int64)] = 2
    sub = induced_susceptible_subgraph(graph, states)
    if sub.n == 0:
        return True
    rho = min(params.rho, sub.n)
    p = EpidemicParams(params.beta, params.gamma, rho)
    ok = 0
    for s in range(trials):
        o = run_sir(sub, p, NoQuarantine(), rng=py_rng(master_seed, 0x1771, s))
        if o.infections_in_wave[0] < outbreak_floor * graph.n:
            ok += 1
    return ok >= quantile * trials


def _minimal_immunization_fraction(graph, strategy, params, trials, master_seed,
                                   step=0.01):
    """Smallest fraction on the 0.01 grid whose immunized graph passes the
    outbreak test, found by bisection over the grid index."""
    fracs = np.round(np.arange(0.0, 1.0 + step / 2, step), 10)

    def passes(idx):
        sel = immunize(graph, float(fracs[idx]), strategy, master_seed)
        return _outbreak_free(graph, sel, params, trials, master_seed)

    lo, hi = 0, len(fracs) - 1
    if passes(lo):
        return float(fracs[lo])
    if not passes(hi):
        return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return float(fracs[hi])


def immunization_comparison(graph, params, dist: DegreeDistribution | None = None,
                            sweep: SweepResult | None = None, trials=30,
                            master_seed=0, workers=None,
                            sweep_thresholds=None, sweep_trials=40) -> ImmunizationReport:
    """Minimal immunized/removed fraction under four strategies: random and
    top-degree vaccination, the quarantine-timing theory, and the measured
    single-quarantine optimum."""
    rand_f = _minimal_immunization_fraction(graph, "random", params, trials, master_seed)
    top_f = _minimal_immunization_fraction(graph, "top_degree", params, trials, master_seed + 1)
    theory = None
    unattainable = False
    if dist is not None:
        try:
            theory = removed_after_quarantine(dist, herd_threshold(dist))
        except NoThresholdExists:
            unattainable = True
        except NoThresholdNeeded:
            theory = 0.0
    if sweep is None:
        spec = SweepSpec(
            graph=graph, params=params,
            thresholds=sweep_thresholds or tuple(round(0.02 * i, 2) for i in range(51)),
            trials=sweep_trials, master_seed=master_seed + 2, workers=workers,
        )
        sweep = sweep_single(spec)
    return ImmunizationReport(
        random_fraction=rand_f,
        top_degree_fraction=top_f,
        quarantine_theory_fraction=theory,
        quarantine_theory_unattainable=unattainable,
        quarantine_experiment_mean=sweep.min_total,
        quarantine_experiment_conditional=sweep.conditional_min_total(),
        quarantine_experiment_threshold=sweep.argmin_total,
    )


def robustness_series(graphs: dict, params: EpidemicParams, thresholds=DEFAULT_GRID,
                      trials=50, master_seed=0, workers=None):
    """Sweep each graph in a family series; returns per-label results and the
    max pairwise deviation of the optimal total-infected fraction."""
    results = {}
    for k, (label, g) in enumerate(graphs.items()):
        spec = SweepSpec(graph=g, params=params, thresholds=thresholds,
                         trials=trials, master_seed=master_seed + 104729 * k,
                         workers=workers)
        results[label] = sweep_single(spec)
    mins = [r.min_total for r in results.values()]
    deviation = max(mins) - min(mins) if mins else 0.0
    return results, float(deviation)
