#!/usr/bin/env python3
"""TSP comparison on burma14 sub-instances: binary-vector mapping vs the
one-hot position/city QUBO, 500 runs x 4000 sweeps each, optimality gap
against Held-Karp."""

import argparse
import json
from pathlib import Path

from multising.bench import (
    DEFAULT_GRID,
    run_tsp_onehot,
    run_tsp_vectorized,
)
from multising.ingest import tsp_subinstance, tsplib_distance_matrix
from multising.instances import BURMA14_TSP


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[4, 5, 6, 7, 8, 10, 12, 14])
    parser.add_argument("--runs", type=int, default=500)
    parser.add_argument("--sweeps", type=int, default=4000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tune", action="store_true",
                        help="pick wt per size from the default grid")
    parser.add_argument("--out", default="tsp_results")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    mat = tsplib_distance_matrix(BURMA14_TSP)

    rows = []
    for n in args.sizes:
        inst = tsp_subinstance(mat, n, name=f"burma{n}")
        if args.tune:
            best = None
            for wt in DEFAULT_GRID:
                s = run_tsp_vectorized(inst, args.runs, args.sweeps, wt=wt,
                                       seed=args.seed)
                if best is None or s.best_gap < best.best_gap:
                    best, best_wt = s, wt
            vec, wt_used = best, best_wt
        else:
            wt_used = 0.25 if n > 8 else 0.5
            vec = run_tsp_vectorized(inst, args.runs, args.sweeps, wt=wt_used,
                                     seed=args.seed)
        oh = run_tsp_onehot(inst, args.runs, args.sweeps, a_weight=2.0,
                            b_weight=0.5, seed=args.seed)
        row = {"cities": n, "wt": wt_used,
               "vectorized_best_gap": vec.best_gap,
               "onehot_best_gap": oh.best_gap,
               "opt_cost": vec.opt_cost}
        rows.append(row)
        print(f"N={n:2d} wt={wt_used:<5} vec_gap={vec.best_gap:.4f} "
              f"onehot_gap={oh.best_gap:.4f}")

    (out / "tsp_gaps.json").write_text(json.dumps(rows, indent=2))
    print(f"wrote {out / 'tsp_gaps.json'}")


if __name__ == "__main__":
    main()
