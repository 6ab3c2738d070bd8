"""Evaluation protocol: error metrics, success probability, time-to-solution,
the TabuCol baseline, hyperparameter grid search, and experiment orchestration.

A coloring run is scored by its wrongly colored edges: an edge counts as wrong
when its endpoints decode to the same color or when either endpoint fails to
decode (out-of-range vector value or malformed one-hot pattern).  TSP runs are
scored by the optimality gap of the decoded closed tour against the exact
Held-Karp optimum.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .gibbs import SamplerConfig, run_chains_batch
from .hwemu import run_hw
from .ingest import ResultRecord
from .model import (
    ColoringInstance,
    EncodingKind,
    EncodingLayout,
    TspInstance,
    coloring_layout,
    decode_values,
    tsp_layout,
)
from .onehot import build_onehot, build_tsp_onehot
from .oracles import held_karp
from .rng import Stream, splitmix64
from .tempering import PtConfig, run_pt
from .vectorized import build_coloring_model, build_tsp_operator_model

UNREACHABLE = math.inf  # sentinel for tts at zero success probability

COLORING_METHODS = ("onehot-gibbs", "vectorized-gibbs", "onehot-pt",
                    "vectorized-pt", "hw-emu", "tabucol")

DEFAULT_T_COLORING = 0.2
DEFAULT_T_TSP_VECTORIZED = 0.2
DEFAULT_T_TSP_ONEHOT = 0.02
DEFAULT_GRID = (0.25, 0.5, 1.0, 2.0, 4.0)
DEFAULT_TSP_WT = 0.5
DEFAULT_TSP_ONEHOT_A = 1.0
DEFAULT_TSP_ONEHOT_B = 1.0


# --- metrics ----------------------------------------------------------------

def coloring_error(state: np.ndarray, instance: ColoringInstance,
                   layout: EncodingLayout) -> tuple[int, float]:
    """(wrong edges, wrong/total); invalid decodes make their edges wrong."""
    vals = decode_values(state, layout)
    g = instance.graph
    if g.num_edges == 0:
        return 0, 0.0
    u = vals[g.edges[:, 0]]
    v = vals[g.edges[:, 1]]
    wrong = int(np.count_nonzero((u < 0) | (v < 0) | (u == v)))
    return wrong, wrong / g.num_edges


def success_probability(error_rates, threshold: float) -> float:
    """Fraction of runs with error strictly below the threshold."""
    rates = list(error_rates)
    if not rates:
        raise ValueError("no runs to score")
    return sum(1 for r in rates if r < threshold) / len(rates)


def tts(t_comp: float, p_s: float) -> float:
    """Expected time to reach the success criterion with 99% confidence.

    At p_s >= 0.99 this is the average single-run time itself; at p_s == 0 it
    is unreachable (returned as math.inf).
    """
    if t_comp <= 0:
        raise ValueError("t_comp must be positive")
    if not (0.0 <= p_s <= 1.0):
        raise ValueError("p_s must lie in [0, 1]")
    if p_s == 0.0:
        return UNREACHABLE
    if p_s >= 0.99:
        return t_comp
    return t_comp * math.log(0.01) / math.log(1.0 - p_s)


def optimality_gap(alg_cost: float, opt_cost: float) -> float:
    """Relative excess over the optimum (alg/opt - 1, larger is worse)."""
    if opt_cost <= 0:
        raise ValueError("optimal cost must be positive")
    return alg_cost / opt_cost - 1.0


def tour_cost(tour, weights: np.ndarray) -> float:
    """Closed-tour cost including the edge back to the first city."""
    n = len(tour)
    total = 0.0
    for t in range(n):
        total += weights[tour[t], tour[(t + 1) % n]]
    return float(total)


def decode_tour(state: np.ndarray, instance: TspInstance,
                layout: EncodingLayout) -> tuple[list, float]:
    """Tour (city permutation) and its closed cost.

    Binary layout: cities sorted by decoded position value (out-of-range
    values sort as decoded), ties broken by city index.  One-hot layout: each
    position's unique hot city is kept when first seen; unmatched positions
    are filled with the remaining cities in ascending order.
    """
    n = instance.num_cities
    if layout.kind is EncodingKind.BINARY_VECTOR:
        bits = state.reshape(n, layout.bits_per_node)
        powers = (1 << np.arange(layout.bits_per_node)).astype(np.int64)
        positions = bits.astype(np.int64) @ powers
        tour = sorted(range(n), key=lambda city: (positions[city], city))
    else:
        vals = decode_values(state, layout)  # per position: city or -1
        used = set()
        slots: list = []
        for pos in range(n):
            city = int(vals[pos])
            if city >= 0 and city not in used:
                used.add(city)
                slots.append(city)
            else:
                slots.append(-1)
        remaining = iter(sorted(set(range(n)) - used))
        tour = [c if c >= 0 else next(remaining) for c in slots]
    return tour, tour_cost(tour, instance.weights)


# --- TabuCol baseline -------------------------------------------------------

@dataclass
class TabucolResult:
    colors: np.ndarray
    wrong_edges: int
    iterations: int


def tabucol(instance: ColoringInstance, max_iters: int, seed: int = 0) -> TabucolResult:
    """Classic TabuCol: recolor one conflicted vertex per move, forbidding the
    reverse move for floor(0.6 * conflicts) + uniform{0..9} iterations, with
    aspiration for moves beating the best coloring seen."""
    g = instance.graph
    q = instance.q
    n = g.num_nodes
    stream = Stream(seed, 0)
    colors = np.array([stream.randint(q) for _ in range(n)], dtype=np.int64)
    adj = g.neighbors()

    cnt = np.zeros((n, q), dtype=np.int64)  # neighbor color counts
    for v in range(n):
        for u in adj[v]:
            cnt[v, colors[u]] += 1
    vert_conf = cnt[np.arange(n), colors]
    total = int(vert_conf.sum()) // 2
    best_total = total
    best_colors = colors.copy()
    tabu_until = np.zeros((n, q), dtype=np.int64)

    it = 0
    while it < max_iters and best_total > 0:
        it += 1
        conflicted = np.flatnonzero(vert_conf > 0)
        if conflicted.size == 0:
            break
        deltas = cnt[conflicted] - vert_conf[conflicted][:, None]
        allowed = tabu_until[conflicted] <= it
        aspiration = (total + deltas) < best_total
        candidate = allowed | aspiration
        candidate[np.arange(conflicted.size), colors[conflicted]] = False
        masked = np.where(candidate, deltas, np.iinfo(np.int64).max)
        best_delta = masked.min()
        if best_delta == np.iinfo(np.int64).max:
            v = int(conflicted[stream.randint(conflicted.size)])
            c = stream.randint(q - 1)
            c = c if c < colors[v] else c + 1
            delta = int(cnt[v, c] - vert_conf[v])
        else:
            flat = np.flatnonzero(masked == best_delta)
            pick = int(flat[stream.randint(flat.size)])
            v = int(conflicted[pick // q])
            c = pick % q
            delta = int(best_delta)

        old = int(colors[v])
        tenure = int(0.6 * total) + stream.randint(10)
        tabu_until[v, old] = it + tenure
        colors[v] = c
        for u in adj[v]:
            cnt[u, old] -= 1
            cnt[u, c] += 1
        vert_conf[adj[v]] = cnt[adj[v], colors[adj[v]]]
        vert_conf[v] = cnt[v, c]
        total += delta
        if total < best_total:
            best_total = total
            best_colors = colors.copy()
    return TabucolResult(colors=best_colors, wrong_edges=best_total, iterations=it)


# --- experiment orchestration -------------------------------------------------

@dataclass(frozen=True)
class ExperimentPlan:
    instances: tuple          # ColoringInstance entries
    methods: tuple            # subset of COLORING_METHODS
    runs: int = 200
    sweeps: int = 1000
    threshold: float = 0.02   # success = error rate strictly below this
    seed: int = 0
    temperature: float = DEFAULT_T_COLORING
    a_weight: float = 1.0
    b_weight: float = 1.0
    pt_chains: int = 100
    pt_t_low: float = 0.01
    pt_t_high: float = 40.0
    pt_swap_interval: int = 15

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not (0.0 < self.threshold < 1.0):
            raise ValueError("threshold must lie in (0, 1)")
        unknown = set(self.methods) - set(COLORING_METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")


def run_seed(plan_seed: int, run_id: int) -> int:
    """Per-run seed policy for sequentially seeded methods."""
    return splitmix64((plan_seed << 8) ^ run_id)


def _best_states_for_method(instance, method, plan):
    """Per-run (best_state, layout, energy, wall_time) for one method."""
    if method in ("onehot-gibbs", "onehot-pt"):
        model = build_onehot(instance, plan.a_weight, plan.b_weight)
        layout = coloring_layout(instance, EncodingKind.ONE_HOT)
    elif method in ("vectorized-gibbs", "vectorized-pt", "hw-emu"):
        model = build_coloring_model(instance)
        layout = coloring_layout(instance, EncodingKind.BINARY_VECTOR)
    elif method == "tabucol":
        model, layout = None, coloring_layout(instance, EncodingKind.BINARY_VECTOR)
    else:
        raise ValueError(f"unknown method {method}")

    out = []
    if method in ("onehot-gibbs", "vectorized-gibbs"):
        config = SamplerConfig(temperature=plan.temperature, steps=plan.sweeps,
                               seed=plan.seed, record_energy_every=plan.sweeps)
        traces = run_chains_batch(model, plan.runs, config)
        for trace in traces:
            out.append((trace.best_state, layout, trace.best_energy, trace.wall_time))
    elif method in ("onehot-pt", "vectorized-pt"):
        for r in range(plan.runs):
            config = PtConfig(num_chains=plan.pt_chains, t_low=plan.pt_t_low,
                              t_high=plan.pt_t_high,
                              swap_interval=plan.pt_swap_interval,
                              total_sweeps=plan.sweeps, seed=run_seed(plan.seed, r))
            res = run_pt(model, config)
            out.append((res.best.best_state, layout, res.best.best_energy,
                        res.best.wall_time / plan.pt_chains))
    elif method == "hw-emu":
        for r in range(plan.runs):
            res = run_hw(model, plan.sweeps, plan.temperature,
                         seed=run_seed(plan.seed, r))
            out.append((res.trace.best_state, layout, res.trace.best_energy,
                        res.trace.wall_time))
    elif method == "tabucol":
        for r in range(plan.runs):
            t0 = time.perf_counter()
            res = tabucol(instance, plan.sweeps, seed=run_seed(plan.seed, r))
            elapsed = time.perf_counter() - t0
            out.append((res.colors, None, float(res.wrong_edges), elapsed))
    return out


def run_experiment(plan: ExperimentPlan):
    """Execute the plan; returns (records, summaries, per-instance errors).

    Capacity errors (hardware emulation limits) are reported per instance and
    do not abort the remaining work.
    """
    records: list[ResultRecord] = []
    summaries: list[dict] = []
    failures: dict = {}
    for instance in plan.instances:
        for method in plan.methods:
            try:
                runs = _best_states_for_method(instance, method, plan)
            except CapacityError as exc:
                failures[(instance.name, method)] = str(exc)
                continue
            rates = []
            best_wrong = None
            best_energy = math.inf
            times = []
            for r, (state, layout, energy, wall) in enumerate(runs):
                if layout is None:  # tabucol returns a coloring directly
                    wrong = int(energy)
                    rate = wrong / max(instance.graph.num_edges, 1)
                else:
                    wrong, rate = coloring_error(state, instance, layout)
                rates.append(rate)
                times.append(wall)
                best_wrong = wrong if best_wrong is None else min(best_wrong, wrong)
                best_energy = min(best_energy, float(energy))
                records.append(ResultRecord(
                    instance=instance.name, method=method, run_id=r,
                    seed=plan.seed, sweeps=plan.sweeps, best_energy=float(energy),
                    wrong_edges=wrong, error_rate=rate, wall_time_s=wall))
            p_s = success_probability(rates, plan.threshold)
            mean_t = float(np.mean(times))
            summaries.append({
                "instance": instance.name, "method": method,
                "runs": plan.runs, "sweeps": plan.sweeps,
                "best_wrong_edges": int(best_wrong),
                "best_energy": best_energy,
                "p_s": p_s, "mean_t_comp": mean_t,
                "tts": tts(mean_t, p_s) if mean_t > 0 else UNREACHABLE,
            })
    return records, summaries, failures


# --- grid search --------------------------------------------------------------

@dataclass
class GridSearchResult:
    best_params: dict
    best_score: float
    surface: list  # one dict per grid point with its mean score


def _mean_coloring_error(model, instance, layout, runs, sweeps, temperature, seed):
    config = SamplerConfig(temperature=temperature, steps=sweeps, seed=seed,
                           record_energy_every=sweeps)
    traces = run_chains_batch(model, runs, config)
    rates = [coloring_error(t.best_state, instance, layout)[1] for t in traces]
    return float(np.mean(rates))


def grid_search(instance, method: str, a_grid=DEFAULT_GRID, b_grid=DEFAULT_GRID,
                wt_grid=DEFAULT_GRID, runs: int = 20, sweeps: int = 1000,
                temperature: float | None = None, seed: int = 0) -> GridSearchResult:
    """Mean-error (coloring) or mean-gap (TSP) over a parameter grid with
    fixed seeds; returns the argmin point and the full surface."""
    surface = []
    best = None
    if method == "onehot-gibbs":
        t = DEFAULT_T_COLORING if temperature is None else temperature
        layout = coloring_layout(instance, EncodingKind.ONE_HOT)
        for a in a_grid:
            for b in b_grid:
                model = build_onehot(instance, a, b)
                score = _mean_coloring_error(model, instance, layout, runs,
                                             sweeps, t, seed)
                surface.append({"a": a, "b": b, "score": score})
                if best is None or score < best[1]:
                    best = ({"a": a, "b": b}, score)
    elif method == "vectorized-gibbs":
        t = DEFAULT_T_COLORING if temperature is None else temperature
        layout = coloring_layout(instance, EncodingKind.BINARY_VECTOR)
        model = build_coloring_model(instance)
        for a in a_grid:
            for b in b_grid:
                score = _mean_coloring_error(model, instance, layout, runs,
                                             sweeps, t, seed)
                surface.append({"a": a, "b": b, "score": score})
                if best is None or score < best[1]:
                    best = ({"a": a, "b": b}, score)
    elif method == "vectorized-tsp":
        t = DEFAULT_T_TSP_VECTORIZED if temperature is None else temperature
        for wt in wt_grid:
            summary = run_tsp_vectorized(instance, runs, sweeps, temperature=t,
                                         wt=wt, seed=seed)
            score = float(np.mean(summary.gaps))
            surface.append({"wt": wt, "score": score})
            if best is None or score < best[1]:
                best = ({"wt": wt}, score)
    elif method == "onehot-tsp":
        t = DEFAULT_T_TSP_ONEHOT if temperature is None else temperature
        for a in a_grid:
            for b in b_grid:
                summary = run_tsp_onehot(instance, runs, sweeps, temperature=t,
                                         a_weight=a, b_weight=b, seed=seed)
                score = float(np.mean(summary.gaps))
                surface.append({"a": a, "b": b, "score": score})
                if best is None or score < best[1]:
                    best = ({"a": a, "b": b}, score)
    else:
        raise ValueError(f"unknown grid-search method {method}")
    return GridSearchResult(best_params=best[0], best_score=best[1], surface=surface)


def grid_surface_csv(result: GridSearchResult) -> str:
    keys = [k for k in result.surface[0] if k != "score"]
    lines = [",".join(keys + ["score"])]
    for row in result.surface:
        lines.append(",".join([repr(row[k]) for k in keys] + [repr(row["score"])]))
    return "\n".join(lines) + "\n"


# --- TSP experiments -----------------------------------------------------------

@dataclass
class TspRunSummary:
    mapping: str
    runs: int
    sweeps: int
    opt_cost: float
    best_cost: float
    best_gap: float
    gaps: list
    mean_t_comp: float


def _tsp_summary(mapping, instance, model, layout, runs, sweeps, temperature,
                 seed, stop_gap, chunk):
    opt = held_karp(instance).value
    gaps = []
    times = []
    best_cost = math.inf
    done = 0
    while done < runs:
        count = min(chunk, runs - done)
        config = SamplerConfig(temperature=temperature, steps=sweeps, seed=seed,
                               record_energy_every=sweeps)
        traces = run_chains_batch(model, count, config, base_stream=done)
        for trace in traces:
            _, cost = decode_tour(trace.best_state, instance, layout)
            gaps.append(optimality_gap(cost, opt))
            times.append(trace.wall_time)
            best_cost = min(best_cost, cost)
        done += count
        if stop_gap is not None and min(gaps) <= stop_gap:
            break
    return TspRunSummary(mapping=mapping, runs=done, sweeps=sweeps,
                         opt_cost=float(opt), best_cost=float(best_cost),
                         best_gap=float(min(gaps)), gaps=gaps,
                         mean_t_comp=float(np.mean(times)))


def run_tsp_vectorized(instance: TspInstance, runs: int, sweeps: int,
                       temperature: float = DEFAULT_T_TSP_VECTORIZED,
                       wt: float = DEFAULT_TSP_WT, seed: int = 0,
                       stop_gap: float | None = None,
                       chunk: int = 100) -> TspRunSummary:
    model = build_tsp_operator_model(instance, wt)
    layout = tsp_layout(instance, EncodingKind.BINARY_VECTOR)
    return _tsp_summary("vectorized", instance, model, layout, runs, sweeps,
                        temperature, seed, stop_gap, chunk)


def run_tsp_onehot(instance: TspInstance, runs: int, sweeps: int,
                   temperature: float = DEFAULT_T_TSP_ONEHOT,
                   a_weight: float = DEFAULT_TSP_ONEHOT_A,
                   b_weight: float = DEFAULT_TSP_ONEHOT_B, seed: int = 0,
                   stop_gap: float | None = None,
                   chunk: int = 100) -> TspRunSummary:
    model = build_tsp_onehot(instance, a_weight, b_weight)
    layout = tsp_layout(instance, EncodingKind.ONE_HOT)
    return _tsp_summary("onehot", instance, model, layout, runs, sweeps,
                        temperature, seed, stop_gap, chunk)
