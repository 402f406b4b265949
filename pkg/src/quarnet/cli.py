"""Command-line interface.

Subcommands: generate, stats, analyze, simulate, sweep, grid2q, multiq,
ablate, immunize, report, robustness.  Every run emits its data files plus a
manifest.json with config echo, seed, checksums, and timing.

Exit codes: 0 success, 2 usage/validation, 3 runtime, 4 numeric
non-convergence.
"""

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import genfun as gf
from . import netgen
from .experiments import (SweepSpec, ablation_summary, beta_gamma_ablation,
                          grid_two_quarantines, immunization_comparison,
                          infected_count_strategy, multi_quarantine_equal_peaks,
                          robustness_series, structural_change_report,
                          sweep_single)
from .graph import (EdgeListParseError, GraphError, graph_stats, load_edge_list,
                    write_edge_list)
from .netgen import ParamError, gen_config_model, sample_degree_sequence
from .reporting import (ManifestWriter, fmt, render_curves_figure,
                        render_heatmap_figure, render_sweep_figure,
                        render_timeseries_figure, write_csv)
from .simulate import (EpidemicParams, FractionAffected, InfectedCount,
                       NoQuarantine, SimError, detect_second_wave, run_sir)

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# argument plumbing

GRAPH_FAMILIES = ("ba", "plc", "ws", "rw", "nn",
                  "cfg-powerlaw", "cfg-poisson", "cfg-regular", "cfg-ba")
DIST_FAMILIES = ("simple-powerlaw", "ba-analytic", "poisson", "regular")


def _add_graph_args(p):
    p.add_argument("--graph", help="edge-list file to load")
    p.add_argument("--family", choices=GRAPH_FAMILIES, help="synthetic graph family")
    p.add_argument("--n", type=int, default=10000, help="node count (default 10000)")
    p.add_argument("--m", type=int, help="edges per new node (ba/plc) or BA law m (cfg-ba)")
    p.add_argument("--p", type=float, help="triad probability (plc) or rewire probability (ws)")
    p.add_argument("--k", type=int, help="lattice degree (ws) or random pairs per node (nn)")
    p.add_argument("--qe", type=float, help="walk continuation probability (rw)")
    p.add_argument("--qv", type=float, help="per-step link probability (rw)")
    p.add_argument("--u", type=float, help="2-hop closure probability (nn)")
    p.add_argument("--alpha", type=float, help="powerlaw exponent (cfg-powerlaw)")
    p.add_argument("--lam", type=float, help="Poisson mean degree (cfg-poisson)")
    p.add_argument("--d", type=int, help="regular degree (cfg-regular)")


def _add_epi_args(p):
    p.add_argument("--beta", type=float, default=0.5, help="per-edge infection rate (default 0.5)")
    p.add_argument("--gamma", type=float, default=1.0, help="recovery rate (default 1.0)")
    p.add_argument("--rho", type=int, default=10, help="(re)seed count (default 10)")


def _add_common(p, trials_default=100):
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--trials", type=int, default=trials_default,
                   help=f"Monte Carlo trials (default {trials_default})")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: all cores)")
    p.add_argument("--out", default=None,
                   help="output directory (default $QUARNET_OUT or '.')")
    p.add_argument("--config", help="flat 'key = value' config file; flags override")
    fig = p.add_mutually_exclusive_group()
    fig.add_argument("--figures", dest="figures", action="store_true", default=True,
                     help="render figures alongside CSV output (default)")
    fig.add_argument("--no-figures", dest="figures", action="store_false",
                     help="skip figure rendering")


def _require(args, names):
    for name in names:
        if getattr(args, name.replace("-", "_"), None) is None:
            raise UsageError(f"missing required option --{name}")


def _positive(args, names):
    for name in names:
        v = getattr(args, name, None)
        if v is not None and v < 0:
            raise UsageError(f"invalid {name}: must be >= 0 (got {v})")


def build_graph(args):
    """Resolve the graph source: exactly one of --graph / --family."""
    if (args.graph is None) == (args.family is None):
        raise UsageError("specify exactly one graph source: --graph or --family")
    if args.graph is not None:
        g, report = load_edge_list(args.graph)
        if report.self_loops_dropped or report.duplicates_dropped:
            print(f"# cleaned input: {report.self_loops_dropped} self-loops, "
                  f"{report.duplicates_dropped} duplicates dropped", file=sys.stderr)
        return g
    fam, seed = args.family, args.seed
    if fam == "ba":
        _require(args, ["m"])
        return netgen.gen_ba(args.n, args.m, seed)
    if fam == "plc":
        _require(args, ["m", "p"])
        return netgen.gen_plc(args.n, args.m, args.p, seed)
    if fam == "ws":
        _require(args, ["k", "p"])
        return netgen.gen_ws(args.n, args.k, args.p, seed)
    if fam == "rw":
        _require(args, ["qe", "qv"])
        return netgen.gen_rw(args.n, args.qe, args.qv, seed)
    if fam == "nn":
        _require(args, ["u", "k"])
        return netgen.gen_nn(args.n, args.u, args.k, seed)
    dist = _config_dist(args)
    seq = sample_degree_sequence(dist, args.n, seed)
    return gen_config_model(seq, seed)


def _config_dist(args):
    fam = args.family
    if fam == "cfg-powerlaw":
        _require(args, ["alpha"])
        return gf.SimplePowerlaw(args.alpha)
    if fam == "cfg-poisson":
        _require(args, ["lam"])
        return gf.Poisson(args.lam)
    if fam == "cfg-regular":
        _require(args, ["d"])
        return gf.DRegular(args.d)
    if fam == "cfg-ba":
        _require(args, ["m"])
        return gf.BAAnalytic(args.m)
    raise UsageError(f"unknown config-model family {fam!r}")


def _analytic_dist(args):
    fam = args.dist
    if fam == "simple-powerlaw":
        _require(args, ["alpha"])
        return gf.SimplePowerlaw(args.alpha)
    if fam == "ba-analytic":
        _require(args, ["m"])
        return gf.BAAnalytic(args.m)
    if fam == "poisson":
        _require(args, ["lam"])
        return gf.Poisson(args.lam)
    if fam == "regular":
        _require(args, ["d"])
        return gf.DRegular(args.d)
    raise UsageError(f"unknown distribution family {fam!r}")


def parse_policy(spec: str, rho: int):
    """Policy syntax: 'none' | 'frac:t1,t2,...[:rel]' | 'count:N[:maxq]'."""
    if spec in (None, "", "none"):
        return NoQuarantine()
    parts = spec.split(":")
    kind = parts[0]
    if kind == "frac":
        if len(parts) < 2:
            raise UsageError("policy 'frac' needs thresholds, e.g. frac:0.2,0.5")
        thresholds = tuple(float(x) for x in parts[1].split(","))
        relative = len(parts) > 2 and parts[2] == "rel"
        return FractionAffected(thresholds, relative=relative)
    if kind == "count":
        if len(parts) < 2:
            raise UsageError("policy 'count' needs a trigger, e.g. count:100")
        trigger = int(parts[1])
        maxq = int(parts[2]) if len(parts) > 2 else None
        return InfectedCount(trigger, maxq)
    raise UsageError(f"unknown policy kind {kind!r}")


def _epi(args):
    _positive(args, ["beta", "rho"])
    if args.gamma is not None and args.gamma <= 0:
        raise UsageError(f"invalid gamma: must be > 0 (got {args.gamma})")
    if args.beta is not None and args.beta < 0:
        raise UsageError(f"invalid beta: must be >= 0 (got {args.beta})")
    return EpidemicParams(args.beta, args.gamma, args.rho)


def _out_dir(args):
    return Path(args.out or os.environ.get("QUARNET_OUT", "."))


def _grid(args):
    step = getattr(args, "grid_step", None) or 0.01
    k = int(round(1.0 / step))
    return tuple(round(i * step, 10) for i in range(k + 1))


def _echo_config(args):
    skip = {"func", "config"}
    return {k: v for k, v in vars(args).items() if k not in skip}


# ---------------------------------------------------------------------------
# subcommands

def cmd_generate(args):
    g = build_graph(args)
    out = Path(args.out_file)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_edge_list(g, out)
    man = ManifestWriter(out.parent, "generate", _echo_config(args), args.seed)
    man.files.append(out)
    man_path = man.out_dir / (out.name + ".manifest.json")
    tmp = man.write()
    tmp.rename(man_path)
    print(f"wrote {out} ({g.n} nodes, {g.edge_count} edges)")
    return EXIT_OK


def cmd_stats(args):
    g = build_graph(args)
    st = graph_stats(g, path_sample_pairs=args.pairs, seed=args.seed)
    print(st.CSV_HEADER)
    print(st.csv_row())
    if args.out:
        man = ManifestWriter(_out_dir(args), "stats", _echo_config(args), args.seed)
        write_csv(man.path("stats.csv"), st.CSV_HEADER, [st.csv_row().split(",")])
        man.write()
    return EXIT_OK


def cmd_analyze(args):
    dist = _analytic_dist(args)
    phi = args.phi if args.phi is not None else gf.transmissibility(args.beta, args.gamma)
    man = ManifestWriter(_out_dir(args), "analyze", _echo_config(args), args.seed)
    status = "ok"
    try:
        u_star = gf.herd_threshold(dist)
    except gf.NoThresholdNeeded:
        u_star, status = None, "no-threshold-needed"
    except gf.NoThresholdExists:
        u_star, status = None, "no-threshold-exists"
    us = [round(0.01 * i, 10) for i in range(1, 100)]
    if u_star is not None:
        us = sorted(set(us) | {round(u_star, 10)})
    rows = []
    for u in us:
        rows.append((u, gf.herd_condition(dist, u) if u < 1 else float("nan"),
                     gf.removed_after_quarantine(dist, u),
                     gf.total_removed(dist, u, phi)))
    write_csv(man.path("analysis.csv"), "u,herd_condition,removed_after_q,total_removed", rows)
    man.config["herd_threshold"] = None if u_star is None else round(u_star, 7)
    man.config["phi"] = phi
    man.write(status)
    if u_star is not None:
        print(f"herd threshold u* = {u_star:.6f}; removed at threshold = "
              f"{gf.removed_after_quarantine(dist, u_star):.6f}")
    else:
        print(f"herd threshold: {status}")
    return EXIT_OK


def cmd_simulate(args):
    g = build_graph(args)
    params = _epi(args)
    policy = parse_policy(args.policy, args.rho)
    man = ManifestWriter(_out_dir(args), "simulate", _echo_config(args), args.seed)
    rows = []
    series = []
    from .rng import py_rng
    for trial in range(args.trials):
        o = run_sir(g, params, policy, rng=py_rng(args.seed, 0xC11, trial),
                    record_timeseries=args.timeseries)
        sw = any(detect_second_wave(o, qi) for qi in range(o.n_quarantines))
        rows.append((trial, o.final_removed_fraction, o.max_infected_fraction,
                     o.n_quarantines, sw, o.reseed_shortfall))
        if args.timeseries:
            series.append(o.timeseries)
    write_csv(man.path("trials.csv"),
              "trial,final_R_frac,max_I_frac,n_quarantines,second_wave,shortfall", rows)
    if args.timeseries:
        ts_rows = []
        for trial, ts in enumerate(series):
            for row in zip([trial] * len(ts.t), ts.t, ts.s, ts.i, ts.r):
                ts_rows.append(row)
        write_csv(man.path("timeseries.csv"), "trial,t,S,I,R", ts_rows)
        if args.figures:
            render_timeseries_figure(man.path("infected_vs_time.png"), series,
                                     [f"trial {i}" for i in range(len(series))],
                                     g.n, "infected population versus time")
    man.write()
    print(f"{args.trials} trials done; mean final removed fraction = "
          f"{np.mean([r[1] for r in rows]):.4f}")
    return EXIT_OK


def _write_sweep(man, result, stem="sweep"):
    agg_rows = [(t, mt, st, mm, sm, sw) for t, mt, st, mm, sm, sw in zip(
        result.thresholds, result.mean_total, result.stderr_total,
        result.mean_max, result.stderr_max, result.second_wave_prob)]
    agg_rows.append((-1.0, result.baseline_total, 0.0, result.baseline_max, 0.0, 0.0))
    write_csv(man.path(f"{stem}_aggregates.csv"),
              "threshold,mean_total,stderr_total,mean_max,stderr_max,second_wave_prob",
              agg_rows)
    raw = []
    for i, t in enumerate(result.thresholds):
        for j in range(result.per_trial_total.shape[1]):
            raw.append((t, j, result.per_trial_total[i, j], result.per_trial_max[i, j]))
    write_csv(man.path(f"{stem}_trials.csv"), "threshold,trial,total,max_infected", raw)


def cmd_sweep(args):
    g = build_graph(args)
    params = _epi(args)
    spec = SweepSpec(graph=g, params=params, thresholds=_grid(args),
                     trials=args.trials, master_seed=args.seed, workers=args.workers)
    man = ManifestWriter(_out_dir(args), "sweep", _echo_config(args), args.seed)
    result = sweep_single(spec)
    _write_sweep(man, result)
    man.config["argmin_total"] = result.argmin_total
    man.config["argmin_max"] = result.argmin_max
    if args.figures:
        render_sweep_figure(man.path("sweep.png"), result,
                            f"single quarantine sweep (beta={params.beta}, gamma={params.gamma})")
    man.write("failed" if result.failures else "ok")
    print(f"argmin total = {result.argmin_total:.2f} (mean {result.min_total:.4f}); "
          f"argmin max = {result.argmin_max:.2f} (mean {result.min_max:.4f})")
    return EXIT_OK


def cmd_grid2q(args):
    g = build_graph(args)
    params = _epi(args)
    step = args.grid_step or 0.05
    q1 = tuple(round(step * i, 10) for i in range(int(round(1 / step))))
    spec = SweepSpec(graph=g, params=params, thresholds=(0.5,), trials=args.trials,
                     master_seed=args.seed, workers=args.workers)
    man = ManifestWriter(_out_dir(args), "grid2q", _echo_config(args), args.seed)
    result = grid_two_quarantines(spec, q1, q1)
    rows = []
    for i, a in enumerate(result.q1_values):
        for j, b in enumerate(result.q2_values):
            rows.append((a, b, "total", result.mean_total[i, j]))
            rows.append((a, b, "max_infected", result.mean_max[i, j]))
    write_csv(man.path("grid.csv"), "q1,q2,metric,value", rows)
    if args.figures:
        render_heatmap_figure(man.path("grid_total.png"), result, "total",
                              "two-quarantine total infected")
        render_heatmap_figure(man.path("grid_max.png"), result, "max",
                              "two-quarantine max infected")
    man.write()
    print(f"grid min total = {result.min_total:.4f}; grid min max-infected = {result.min_max:.4f}")
    return EXIT_OK


def cmd_multiq(args):
    g = build_graph(args)
    params = _epi(args)
    man = ManifestWriter(_out_dir(args), "multiq", _echo_config(args), args.seed)
    res = multi_quarantine_equal_peaks(g, params, args.quarantines,
                                       master_seed=args.seed)
    rows = [(i, thr) for i, thr in enumerate(res.thresholds)]
    write_csv(man.path("thresholds.csv"), "quarantine,affected_fraction", rows)
    wave_rows = [(w, p, h) for w, (p, h) in enumerate(zip(res.wave_peaks, res.wave_fwhm))]
    write_csv(man.path("waves.csv"), "wave,peak_fraction,fwhm", wave_rows)
    man.config["peak_cap"] = res.peak_cap
    man.config["mean_total"] = res.mean_total
    man.write()
    if args.figures:
        x = list(range(len(res.wave_peaks)))
        render_curves_figure(man.path("wave_peaks.png"),
                             {"peak height": (x, res.wave_peaks)},
                             "wave", "peak infected fraction",
                             f"{args.quarantines} quarantines, equalized peaks")
    print(f"peak cap = {res.peak_cap} nodes; thresholds = "
          + ",".join(f"{t:.3f}" for t in res.thresholds))
    return EXIT_OK


def cmd_ablate(args):
    g = build_graph(args)
    ratios = [float(x) for x in args.ratios.split(",")]
    man = ManifestWriter(_out_dir(args), "ablate", _echo_config(args), args.seed)
    results = beta_gamma_ablation(g, ratios, thresholds=_grid(args),
                                  trials=args.trials, rho=args.rho,
                                  master_seed=args.seed, workers=args.workers)
    for ratio, r in results.items():
        tag = fmt(ratio).replace(".", "_").replace("/", "_")
        _write_sweep(man, r, stem=f"ratio_{tag}")
    rows = [(s["ratio"], s["argmin_threshold"], s["min_total"], s["baseline_total"],
             s["trough_depth"]) for s in ablation_summary(results)]
    write_csv(man.path("ablation_summary.csv"),
              "ratio,argmin_threshold,min_total,baseline_total,trough_depth", rows)
    if args.figures:
        curves = {f"beta/gamma={fmt(r)}": (res.thresholds, res.mean_total)
                  for r, res in sorted(results.items())}
        render_curves_figure(man.path("ablation.png"), curves,
                             "quarantine threshold", "mean total infected fraction",
                             "infection-strength ablation")
    man.write()
    print("\n".join(f"ratio {r[0]}: argmin {r[1]:.2f}, trough depth {r[4]:.3f}" for r in rows))
    return EXIT_OK


def cmd_immunize(args):
    g = build_graph(args)
    params = _epi(args)
    dist = _analytic_dist(args) if args.dist else None
    man = ManifestWriter(_out_dir(args), "immunize", _echo_config(args), args.seed)
    rep = immunization_comparison(g, params, dist=dist, trials=args.trials,
                                  master_seed=args.seed, workers=args.workers)
    row = (rep.random_fraction if rep.random_fraction is not None else float("nan"),
           rep.top_degree_fraction if rep.top_degree_fraction is not None else float("nan"),
           rep.quarantine_theory_fraction if rep.quarantine_theory_fraction is not None
           else float("nan"),
           rep.quarantine_theory_unattainable,
           rep.quarantine_experiment_mean,
           rep.quarantine_experiment_conditional,
           rep.quarantine_experiment_threshold)
    write_csv(man.path("immunization.csv"),
              "random,top_degree,quarantine_theory,theory_unattainable,"
              "experiment_mean,experiment_conditional,experiment_threshold", [row])
    man.write()
    print(f"random={row[0]} top_degree={row[1]} theory="
          f"{'unattainable' if rep.quarantine_theory_unattainable else row[2]} "
          f"experiment={row[4]:.4f}")
    return EXIT_OK


def cmd_report(args):
    g = build_graph(args)
    params = _epi(args)
    man = ManifestWriter(_out_dir(args), "report", _echo_config(args), args.seed)
    threshold = args.threshold
    if threshold is None:
        spec = SweepSpec(graph=g, params=params,
                         thresholds=tuple(round(0.02 * i, 10) for i in range(51)),
                         trials=args.trials, master_seed=args.seed, workers=args.workers)
        threshold = sweep_single(spec).argmin_total
    rep = structural_change_report(g, params, threshold, trials=args.struct_trials,
                                   master_seed=args.seed)
    b = rep.before
    rows = [("before", b.avg_degree, b.avg_shortest_path),
            ("after", rep.after_avg_degree, rep.after_avg_path),
            ("pct_change", rep.degree_change_pct, rep.path_change_pct)]
    write_csv(man.path("structural_change.csv"), "row,avg_degree,avg_path", rows)
    man.config["threshold"] = threshold
    man.write()
    print(f"threshold {threshold:.2f}: degree {b.avg_degree:.2f} -> {rep.after_avg_degree:.2f} "
          f"({rep.degree_change_pct:+.1f}%), path {b.avg_shortest_path:.2f} -> "
          f"{rep.after_avg_path:.2f} ({rep.path_change_pct:+.1f}%)")
    return EXIT_OK


def cmd_robustness(args):
    params = _epi(args)
    values = [float(x) for x in args.values.split(",")]
    man = ManifestWriter(_out_dir(args), "robustness", _echo_config(args), args.seed)
    graphs = {}
    for v in values:
        a = argparse.Namespace(**vars(args))
        if args.vary == "p":
            a.p = v
        elif args.vary == "n":
            a.n = int(v)
        else:
            raise UsageError("--vary must be 'p' (clustering) or 'n' (size)")
        graphs[f"{args.vary}={fmt(v)}"] = build_graph(a)
    results, deviation = robustness_series(graphs, params, thresholds=_grid(args),
                                           trials=args.trials, master_seed=args.seed,
                                           workers=args.workers)
    rows = [(label, r.argmin_total, r.min_total, r.baseline_total)
            for label, r in results.items()]
    write_csv(man.path("robustness.csv"), "label,argmin_threshold,min_total,baseline_total", rows)
    man.config["max_pairwise_deviation"] = deviation
    if args.figures:
        curves = {label: (r.thresholds, r.mean_total) for label, r in results.items()}
        render_curves_figure(man.path("robustness.png"), curves,
                             "quarantine threshold", "mean total infected fraction",
                             f"robustness series over {args.vary}")
    man.write()
    print(f"max pairwise deviation of optimal totals: {deviation:.4f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def make_parser():
    ap = argparse.ArgumentParser(
        prog="quarnet",
        description="SIR epidemics on networks with perfect-quarantine interventions")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("generate", help="generate a synthetic graph and write its edge list")
    _add_graph_args(p)
    p.add_argument("--out-file", "--out", dest="out_file", required=True,
                   help="edge-list output path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="flat 'key = value' config file")
    p.set_defaults(func=cmd_generate, out=None)

    p = sub.add_parser("stats", help="graph summary statistics as one-row CSV")
    _add_graph_args(p)
    p.add_argument("--pairs", type=int, default=100000,
                   help="sampled node pairs for path length (default 100000)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--config", help="flat 'key = value' config file")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("analyze", help="generating-function analytics over a threshold grid")
    p.add_argument("--dist", "--family", dest="dist", choices=DIST_FAMILIES, required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--lam", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--phi", type=float, default=None,
                   help="transmissibility (default: beta/(beta+gamma))")
    _add_epi_args(p)
    _add_common(p, trials_default=1)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="run SIR trials under a quarantine policy")
    _add_graph_args(p)
    _add_epi_args(p)
    p.add_argument("--policy", default="none",
                   help="'none' | 'frac:t1,t2[:rel]' | 'count:N[:maxq]' (default none)")
    p.add_argument("--timeseries", action="store_true", help="emit t,S,I,R records")
    _add_common(p, trials_default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="single-quarantine threshold sweep")
    _add_graph_args(p)
    _add_epi_args(p)
    p.add_argument("--grid-step", type=float, default=0.01)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("grid2q", help="two-quarantine grid")
    _add_graph_args(p)
    _add_epi_args(p)
    p.add_argument("--grid-step", type=float, default=0.05)
    _add_common(p, trials_default=50)
    p.set_defaults(func=cmd_grid2q)

    p = sub.add_parser("multiq", help="multiple quarantines with equalized peaks")
    _add_graph_args(p)
    _add_epi_args(p)
    p.add_argument("--quarantines", type=int, required=True)
    _add_common(p, trials_default=8)
    p.set_defaults(func=cmd_multiq)

    p = sub.add_parser("ablate", help="beta/gamma ratio ablation of sweep curves")
    _add_graph_args(p)
    p.add_argument("--rho", type=int, default=10)
    p.add_argument("--beta", type=float, default=None, help=argparse.SUPPRESS)
    p.add_argument("--gamma", type=float, default=1.0, help=argparse.SUPPRESS)
    p.add_argument("--ratios", default="0.03125,0.0625,0.125,0.25,0.5,1,2,4,8,16,32",
                   help="comma list of beta/gamma ratios")
    p.add_argument("--grid-step", type=float, default=0.01)
    _add_common(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("immunize", help="compare immunization strategies")
    _add_graph_args(p)
    _add_epi_args(p)
    p.add_argument("--dist", choices=DIST_FAMILIES, default=None,
                   help="analytic distribution for the theory column")
    _add_common(p, trials_default=30)
    p.set_defaults(func=cmd_immunize)

    p = sub.add_parser("report", help="structural change of the optimal-quarantine subgraph")
    _add_graph_args(p)
    _add_epi_args(p)
    p.add_argument("--threshold", type=float, default=None,
                   help="quarantine threshold (default: sweep argmin)")
    p.add_argument("--struct-trials", type=int, default=8)
    _add_common(p, trials_default=40)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("robustness", help="sweep a family series varying clustering or size")
    _add_graph_args(p)
    _add_epi_args(p)
    p.add_argument("--vary", required=True, choices=("p", "n"))
    p.add_argument("--values", required=True, help="comma list of parameter values")
    p.add_argument("--grid-step", type=float, default=0.02)
    _add_common(p, trials_default=50)
    p.set_defaults(func=cmd_robustness)

    return ap


def _apply_config_file(argv):
    """Insert file-provided options before the explicit flags (flags win)."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise UsageError("--config needs a path")
    path = argv[idx + 1]
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    injected = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            injected.append(flag)
        else:
            injected.extend([flag, value])
    # file options first so explicit flags override them
    return injected + argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = make_parser()
    try:
        if argv and not argv[0].startswith("-"):
            argv = [argv[0]] + _apply_config_file(argv[1:])
        try:
            args = ap.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParamError, SimError, GraphError, gf.DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EdgeListParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (gf.NonConvergenceError, gf.DivergenceError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
