"""Command-line interface.

Subcommands: solve (one method on one instance), bench (manifest of instances,
summary tables), grid (hyperparameter search surface), oracle (exact solvers),
hw (hardware-emulation run with cycle projection).  Exit codes: 0 success,
2 bad flags or config, 3 parse failure, 4 capacity limit.

Flags override a key=value config file (--config), which overrides defaults.
The output directory defaults to $MULTISING_OUT or the working directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .bench import (
    ExperimentPlan,
    coloring_error,
    grid_search,
    grid_surface_csv,
    run_experiment,
    run_tsp_onehot,
    run_tsp_vectorized,
    tabucol,
)
from .errors import CapacityError, ParseError
from .gibbs import SamplerConfig, run_chains_batch, trace_to_csv
from .hwemu import hw_summary, run_hw
from .ingest import (
    ResultRecord,
    parse_dimacs_col,
    parse_edge_list,
    parse_tsplib,
    write_results,
)
from .model import ColoringInstance, EncodingKind, coloring_layout
from .onehot import build_onehot
from .oracles import exact_min_conflicts, held_karp
from .tempering import PtConfig, pt_log_to_csv, run_pt
from .vectorized import build_coloring_model

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_CAPACITY = 4

COLORING_CLI_METHODS = list(bench_mod.COLORING_METHODS)
TSP_CLI_METHODS = ["vectorized-tsp", "onehot-tsp"]


def _read_config_file(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"config line {lineno}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _add_global_flags(parser, suppress: bool) -> None:
    # defaults live on the main parser; subcommands re-accept the same flags
    # with SUPPRESS so they may appear on either side of the subcommand
    d = (lambda v: argparse.SUPPRESS if suppress else v)
    parser.add_argument("--config", default=d(None),
                        help="key=value config file (flags win)")
    parser.add_argument("--out", default=d(None),
                        help="output directory (default: $MULTISING_OUT or .)")
    parser.add_argument("--seed", type=int, default=d(0))
    parser.add_argument("--jobs", type=int, default=d(0),
                        help="worker threads for batched runs (0 = all cores)")
    parser.add_argument("--format", choices=("csv", "json"), default=d("csv"),
                        help="console summary style: aligned rows or JSON")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multising",
        description="Multi-state Ising solvers: one-hot QUBO and binary-vector "
                    "truth-table mappings with Gibbs sampling, parallel "
                    "tempering, and fixed-point hardware emulation.")
    _add_global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one method on one instance")
    _add_global_flags(solve, suppress=True)
    solve.add_argument("--instance", required=True)
    solve.add_argument("--method", required=True,
                       choices=COLORING_CLI_METHODS + TSP_CLI_METHODS)
    solve.add_argument("--q", type=int, default=None, help="color count")
    solve.add_argument("--wt", type=float, default=bench_mod.DEFAULT_TSP_WT,
                       help="TSP collision penalty weight")
    solve.add_argument("--T", type=float, default=None, dest="temperature")
    solve.add_argument("--A", type=float, default=1.0, dest="a_weight")
    solve.add_argument("--B", type=float, default=1.0, dest="b_weight")
    solve.add_argument("--runs", type=int, default=1)
    solve.add_argument("--sweeps", type=int, default=1000)
    solve.add_argument("--chains", type=int, default=100)
    solve.add_argument("--t-low", type=float, default=0.01)
    solve.add_argument("--t-high", type=float, default=40.0)
    solve.add_argument("--swap-interval", type=int, default=15)
    solve.add_argument("--export-model", default=None,
                       help="also write the expanded model to this path")

    benchp = sub.add_parser("bench", help="run a manifest of instances")
    _add_global_flags(benchp, suppress=True)
    benchp.add_argument("--manifest", required=True,
                        help="text file: one '<path> <q>' per line")
    benchp.add_argument("--methods", nargs="+", default=["vectorized-gibbs"],
                        choices=COLORING_CLI_METHODS)
    benchp.add_argument("--runs", type=int, default=200)
    benchp.add_argument("--sweeps", type=int, default=1000)
    benchp.add_argument("--T", type=float, default=bench_mod.DEFAULT_T_COLORING,
                        dest="temperature")
    benchp.add_argument("--A", type=float, default=1.0, dest="a_weight")
    benchp.add_argument("--B", type=float, default=1.0, dest="b_weight")
    benchp.add_argument("--threshold", type=float, default=0.02)
    benchp.add_argument("--chains", type=int, default=100)
    benchp.add_argument("--swap-interval", type=int, default=15)
    benchp.add_argument("--plot-data", action="store_true",
                        help="write energy histories and error histograms")

    grid = sub.add_parser("grid", help="hyperparameter grid search")
    _add_global_flags(grid, suppress=True)
    grid.add_argument("--instance", required=True)
    grid.add_argument("--method", required=True,
                      choices=["onehot-gibbs", "vectorized-gibbs",
                               "vectorized-tsp", "onehot-tsp"])
    grid.add_argument("--q", type=int, default=None)
    grid.add_argument("--a-grid", type=float, nargs="+",
                      default=list(bench_mod.DEFAULT_GRID))
    grid.add_argument("--b-grid", type=float, nargs="+",
                      default=list(bench_mod.DEFAULT_GRID))
    grid.add_argument("--wt-grid", type=float, nargs="+",
                      default=list(bench_mod.DEFAULT_GRID))
    grid.add_argument("--runs", type=int, default=20)
    grid.add_argument("--sweeps", type=int, default=1000)
    grid.add_argument("--T", type=float, default=None, dest="temperature")

    oracle = sub.add_parser("oracle", help="exact reference solvers")
    _add_global_flags(oracle, suppress=True)
    oracle.add_argument("--instance", help="coloring instance (.col)")
    oracle.add_argument("--tsp", help="TSP instance (.tsp)")
    oracle.add_argument("--q", type=int, default=None)

    hw = sub.add_parser("hw", help="fixed-point hardware emulation")
    _add_global_flags(hw, suppress=True)
    hw.add_argument("--instance", required=True)
    hw.add_argument("--q", type=int, default=None)
    hw.add_argument("--sweeps", type=int, default=1000)
    hw.add_argument("--T", type=float, default=bench_mod.DEFAULT_T_COLORING,
                    dest="temperature")
    return parser


def _load_coloring(path: str, q: int | None) -> ColoringInstance:
    text = Path(path).read_text()
    name = Path(path).stem
    if path.endswith(".col"):
        graph = parse_dimacs_col(text)
    else:
        graph = parse_edge_list(text)
    if q is None:
        from .instances import CITATION, TABLE1
        entry = TABLE1.get(name) or CITATION.get(name)
        if entry is None:
            raise ParseError(f"no color count known for {name}; pass --q")
        q = entry.q
    return ColoringInstance(graph=graph, q=q, name=name)


def _out_dir(args) -> Path:
    base = args.out or os.environ.get("MULTISING_OUT") or "."
    out = Path(base)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_solve(args) -> int:
    out = _out_dir(args)
    method = args.method

    if method in TSP_CLI_METHODS:
        instance = parse_tsplib(Path(args.instance).read_text())
        runner = run_tsp_vectorized if method == "vectorized-tsp" else run_tsp_onehot
        kwargs = {"wt": args.wt} if method == "vectorized-tsp" else {
            "a_weight": args.a_weight, "b_weight": args.b_weight}
        if args.temperature is not None:
            kwargs["temperature"] = args.temperature
        summary = runner(instance, args.runs, args.sweeps, seed=args.seed, **kwargs)
        print(f"optimal_cost: {summary.opt_cost:.6f}")
        print(f"best_cost: {summary.best_cost:.6f}")
        print(f"best_gap: {summary.best_gap:.6f}")
        (out / "tsp_result.json").write_text(json.dumps({
            "schema": "multising-tsp-result-v1", "mapping": summary.mapping,
            "runs": summary.runs, "sweeps": summary.sweeps,
            "opt_cost": summary.opt_cost, "best_cost": summary.best_cost,
            "best_gap": summary.best_gap}, indent=2))
        return EXIT_OK

    instance = _load_coloring(args.instance, args.q)
    temperature = (bench_mod.DEFAULT_T_COLORING if args.temperature is None
                   else args.temperature)

    if method == "tabucol":
        best_state, layout = None, None
        best_wrong = None
        t0 = time.perf_counter()
        for r in range(args.runs):
            res = tabucol(instance, args.sweeps, seed=bench_mod.run_seed(args.seed, r))
            if best_wrong is None or res.wrong_edges < best_wrong:
                best_wrong = res.wrong_edges
        wall = time.perf_counter() - t0
        best_energy = float(best_wrong)
    else:
        if method in ("onehot-gibbs", "onehot-pt"):
            model = build_onehot(instance, args.a_weight, args.b_weight)
            layout = coloring_layout(instance, EncodingKind.ONE_HOT)
        else:
            model = build_coloring_model(instance)
            layout = coloring_layout(instance, EncodingKind.BINARY_VECTOR)
        if args.export_model:
            from .onehot import export_qubo_text
            from .vectorized import export_truth_table
            if method.startswith("onehot"):
                Path(args.export_model).write_text(export_qubo_text(model))
            else:
                Path(args.export_model).write_text(export_truth_table(model.operator))

        t0 = time.perf_counter()
        if method.endswith("-pt"):
            best_wrong, best_energy, best_state = None, math.inf, None
            for r in range(args.runs):
                config = PtConfig(num_chains=args.chains, t_low=args.t_low,
                                  t_high=args.t_high,
                                  swap_interval=args.swap_interval,
                                  total_sweeps=args.sweeps,
                                  seed=bench_mod.run_seed(args.seed, r))
                res = run_pt(model, config)
                wrong, _ = coloring_error(res.best.best_state, instance, layout)
                if best_wrong is None or wrong < best_wrong:
                    best_wrong, best_state = wrong, res.best.best_state
                best_energy = min(best_energy, res.best.best_energy)
            (out / "pt_rounds.csv").write_text(pt_log_to_csv(res))
        elif method == "hw-emu":
            best_wrong, best_energy = None, math.inf
            for r in range(args.runs):
                res = run_hw(model, args.sweeps, temperature,
                             seed=bench_mod.run_seed(args.seed, r))
                wrong, _ = coloring_error(res.trace.best_state, instance, layout)
                best_wrong = wrong if best_wrong is None else min(best_wrong, wrong)
                best_energy = min(best_energy, res.trace.best_energy)
            (out / "hw_summary.json").write_text(json.dumps(hw_summary(res), indent=2))
        else:
            config = SamplerConfig(temperature=temperature, steps=args.sweeps,
                                   seed=args.seed)
            traces = run_chains_batch(model, args.runs, config)
            wrongs = [coloring_error(t.best_state, instance, layout)[0]
                      for t in traces]
            best_wrong = min(wrongs)
            best_energy = min(t.best_energy for t in traces)
            (out / "trace.csv").write_text(trace_to_csv(traces[0]))
        wall = time.perf_counter() - t0

    error_rate = best_wrong / max(instance.graph.num_edges, 1)
    print(f"best_energy: {best_energy}")
    print(f"wrong_edges: {best_wrong}")
    print(f"error_rate: {error_rate:.6f}")
    record = ResultRecord(instance=instance.name, method=method, run_id=0,
                          seed=args.seed, sweeps=args.sweeps,
                          best_energy=float(best_energy),
                          wrong_edges=int(best_wrong), error_rate=error_rate,
                          wall_time_s=wall)
    write_results([record], out / "result.csv", out / "result.json")
    return EXIT_OK


def _cmd_bench(args) -> int:
    out = _out_dir(args)
    instances = []
    for lineno, raw in enumerate(Path(args.manifest).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        path = parts[0]
        q = int(parts[1]) if len(parts) > 1 else None
        instances.append(_load_coloring(path, q))
    if not instances:
        raise ParseError("manifest lists no instances")
    plan = ExperimentPlan(
        instances=tuple(instances), methods=tuple(args.methods),
        runs=args.runs, sweeps=args.sweeps, threshold=args.threshold,
        seed=args.seed, temperature=args.temperature,
        a_weight=args.a_weight, b_weight=args.b_weight,
        pt_chains=args.chains, pt_swap_interval=args.swap_interval)
    records, summaries, failures = run_experiment(plan)
    write_results(records, out / "records.csv", out / "records.json")
    (out / "summary.json").write_text(json.dumps(
        {"schema": "multising-bench-summary-v1", "summaries": summaries,
         "failures": [{"instance": k[0], "method": k[1], "error": v}
                      for k, v in failures.items()]}, indent=2))
    if args.format == "json":
        print(json.dumps({"summaries": summaries}, indent=2))
    else:
        for row in summaries:
            print(f"{row['instance']:>12s} {row['method']:>18s} "
                  f"best_wrong={row['best_wrong_edges']:<4d} p_s={row['p_s']:.3f} "
                  f"tts={row['tts']:.4g}s")
    for (name, method), msg in failures.items():
        print(f"{name:>12s} {method:>18s} FAILED: {msg}")

    if args.plot_data:
        _write_plot_data(out, plan, records, summaries)
    return EXIT_OK


def _write_plot_data(out: Path, plan: ExperimentPlan, records, summaries) -> None:
    """Desk-scale plot inputs: error histograms, success/TTS table, and a
    representative per-instance energy history."""
    rows = ["instance,method,p_s,tts_s,mean_t_comp_s"]
    for s in summaries:
        rows.append(f"{s['instance']},{s['method']},{s['p_s']!r},"
                    f"{s['tts']!r},{s['mean_t_comp']!r}")
    (out / "success_tts.csv").write_text("\n".join(rows) + "\n")

    hist_lines = ["instance,method,wrong_edges,count"]
    by_key = {}
    for rec in records:
        by_key.setdefault((rec.instance, rec.method), []).append(rec.wrong_edges)
    for (name, method), wrongs in by_key.items():
        for value, count in zip(*np.unique(wrongs, return_counts=True)):
            hist_lines.append(f"{name},{method},{value},{count}")
    (out / "error_histogram.csv").write_text("\n".join(hist_lines) + "\n")

    for instance in plan.instances:
        model = build_coloring_model(instance)
        config = SamplerConfig(temperature=plan.temperature, steps=plan.sweeps,
                               seed=plan.seed, record_energy_every=1)
        trace = run_chains_batch(model, 1, config)[0]
        (out / f"energy_history_{instance.name}.csv").write_text(trace_to_csv(trace))


def _cmd_grid(args) -> int:
    out = _out_dir(args)
    if args.method.endswith("-tsp"):
        instance = parse_tsplib(Path(args.instance).read_text())
    else:
        instance = _load_coloring(args.instance, args.q)
    result = grid_search(instance, args.method, a_grid=tuple(args.a_grid),
                         b_grid=tuple(args.b_grid), wt_grid=tuple(args.wt_grid),
                         runs=args.runs, sweeps=args.sweeps,
                         temperature=args.temperature, seed=args.seed)
    (out / "grid_surface.csv").write_text(grid_surface_csv(result))
    print(f"best_params: {json.dumps(result.best_params)}")
    print(f"best_score: {result.best_score:.6f}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    if bool(args.instance) == bool(args.tsp):
        print("oracle needs exactly one of --instance or --tsp", file=sys.stderr)
        return EXIT_USAGE
    if args.tsp:
        instance = parse_tsplib(Path(args.tsp).read_text())
        res = held_karp(instance)
        print(f"optimal_cost: {res.value:.6f}")
        print(f"tour: {' '.join(map(str, res.witness))}")
    else:
        instance = _load_coloring(args.instance, args.q)
        res = exact_min_conflicts(instance)
        print(f"min_conflicts: {int(res.value)}")
        print(f"nodes_explored: {res.nodes_explored}")
    return EXIT_OK


def _cmd_hw(args) -> int:
    out = _out_dir(args)
    instance = _load_coloring(args.instance, args.q)
    model = build_coloring_model(instance)
    res = run_hw(model, args.sweeps, args.temperature, seed=args.seed)
    layout = coloring_layout(instance, EncodingKind.BINARY_VECTOR)
    wrong, rate = coloring_error(res.trace.best_state, instance, layout)
    print(f"cycles: {res.cycles}")
    print(f"projected_seconds: {res.projected_seconds:.6f}")
    print(f"wrong_edges: {wrong}")
    (out / "hw_summary.json").write_text(json.dumps(hw_summary(res), indent=2))
    (out / "hw_trace.csv").write_text(trace_to_csv(res.trace))
    return EXIT_OK


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()

    # config file values sit between defaults and explicit flags
    if "--config" in argv:
        try:
            cfg_path = argv[argv.index("--config") + 1]
        except IndexError:
            parser.error("--config needs a path")
        try:
            values = _read_config_file(cfg_path)
        except (OSError, ParseError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        known = {a.dest for a in parser._actions}
        for sub_action in parser._subparsers._group_actions:
            for sp in sub_action.choices.values():
                known |= {a.dest for a in sp._actions}
        unknown = set(values) - known
        if unknown:
            print(f"config error: unknown keys {sorted(unknown)}", file=sys.stderr)
            return EXIT_USAGE
        parser.set_defaults(**values)
        for sub_action in parser._subparsers._group_actions:
            for sp in sub_action.choices.values():
                sp.set_defaults(**{k: v for k, v in values.items()
                                   if k in {a.dest for a in sp._actions}})

    args = parser.parse_args(argv)

    if args.jobs:
        import numba
        numba.set_num_threads(max(1, args.jobs))

    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "grid":
            return _cmd_grid(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        if args.command == "hw":
            return _cmd_hw(args)
    except (ParseError, FileNotFoundError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ValueError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
