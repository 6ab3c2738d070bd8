"""Exact reference solvers.

These are deliberately independent of the sampling code paths: conflicts are
counted straight off adjacency lists, tours come from Held-Karp dynamic
programming, and minimum energies from exhaustive state enumeration.  Every
witness re-evaluates to the reported optimum through the public energy/cost
APIs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import CapacityError
from .model import ColoringInstance, TspInstance
from .onehot import QuboModel
from .vectorized import PairOperatorModel

ENUM_MAX_BITS = 24
HELD_KARP_MAX_CITIES = 20
MIN_CONFLICTS_MAX_NODES = 64
MIN_CONFLICTS_MAX_STATES = 10 ** 7


@dataclass
class OracleResult:
    value: float
    witness: object        # coloring array, tour list, or bit state
    nodes_explored: int


def exact_min_conflicts(instance: ColoringInstance) -> OracleResult:
    """Minimum monochromatic-edge count over all q-colorings, by depth-first
    branch and bound (highest degree first, canonical color order)."""
    g = instance.graph
    q = instance.q
    n = g.num_nodes
    if n > MIN_CONFLICTS_MAX_NODES and q ** n > MIN_CONFLICTS_MAX_STATES:
        raise CapacityError(
            f"instance too large for the exact oracle ({n} nodes, q={q})")

    adj = g.neighbors()
    order = sorted(range(n), key=lambda v: -adj[v].size)
    rank = {v: t for t, v in enumerate(order)}
    # neighbors already placed earlier in the search order
    placed_nbrs = [np.array([u for u in adj[v] if rank[u] < rank[v]], dtype=np.int64)
                   for v in order]

    colors = np.full(n, -1, dtype=np.int64)
    best_colors = colors.copy()
    best = g.num_edges + 1
    explored = 0

    def descend(t: int, conflicts: int, used: int) -> None:
        nonlocal best, best_colors, explored
        if conflicts >= best:
            return
        if t == n:
            best = conflicts
            best_colors = colors.copy()
            return
        v = order[t]
        # canonical form: at most one previously unused color is worth trying
        span = min(q, used + 1)
        for c in range(span):
            explored += 1
            extra = 0
            for u in placed_nbrs[t]:
                if colors[u] == c:
                    extra += 1
            colors[v] = c
            descend(t + 1, conflicts + extra, max(used, c + 1))
            colors[v] = -1
            if best == 0:
                return

    descend(0, 0, 0)
    return OracleResult(value=float(best), witness=best_colors,
                        nodes_explored=explored)


def held_karp_matrix(weights: np.ndarray) -> tuple[float, list[int]]:
    """Optimal closed tour over an explicit symmetric matrix (start city 0)."""
    n = weights.shape[0]
    if n > HELD_KARP_MAX_CITIES:
        raise CapacityError(f"{n} cities exceed the Held-Karp limit "
                            f"of {HELD_KARP_MAX_CITIES}")
    if n == 1:
        return 0.0, [0]
    if n == 2:
        return float(2 * weights[0, 1]), [0, 1]
    full = 1 << n
    inf = np.inf
    cost = np.full((full, n), inf)
    parent = np.full((full, n), -1, dtype=np.int64)
    cost[1, 0] = 0.0
    for mask in range(1, full):
        if not mask & 1:
            continue  # tours start at city 0
        for last in range(n):
            if not mask & (1 << last):
                continue
            c = cost[mask, last]
            if c == inf:
                continue
            for nxt in range(1, n):
                if mask & (1 << nxt):
                    continue
                nmask = mask | (1 << nxt)
                nc = c + weights[last, nxt]
                if nc < cost[nmask, nxt]:
                    cost[nmask, nxt] = nc
                    parent[nmask, nxt] = last
    fullmask = full - 1
    closing = cost[fullmask, :] + weights[:, 0]
    closing[0] = inf if n > 1 else closing[0]
    last = int(np.argmin(closing))
    total = float(closing[last])
    tour = []
    mask = fullmask
    while last != -1:
        tour.append(last)
        nlast = int(parent[mask, last])
        mask ^= 1 << last
        last = nlast
    tour.reverse()
    return total, tour


def held_karp(instance: TspInstance) -> OracleResult:
    value, tour = held_karp_matrix(instance.weights)
    return OracleResult(value=value, witness=tour,
                        nodes_explored=(1 << instance.num_cities))


def _all_states(num_bits: int, offset: int, count: int) -> np.ndarray:
    idx = np.arange(offset, offset + count, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(num_bits)[None, :]) & 1
    return bits.astype(np.uint8)


def enumerate_min_energy(model: Union[QuboModel, PairOperatorModel],
                         chunk: int = 1 << 16) -> OracleResult:
    """Exact minimum energy and argmin over all 2^bits states."""
    num_bits = model.total_bits
    if num_bits > ENUM_MAX_BITS:
        raise CapacityError(f"{num_bits} bits exceed the enumeration limit "
                            f"of {ENUM_MAX_BITS}")
    best_val = np.inf
    best_state = None
    total = 1 << num_bits
    done = 0
    while done < total:
        count = min(chunk, total - done)
        states = _all_states(num_bits, done, count)
        energies = _energies_batch(model, states)
        k = int(np.argmin(energies))
        if energies[k] < best_val:
            best_val = float(energies[k])
            best_state = states[k].copy()
        done += count
    return OracleResult(value=best_val, witness=best_state, nodes_explored=total)


def _energies_batch(model, states: np.ndarray) -> np.ndarray:
    if isinstance(model, QuboModel):
        return model.energies(states)
    n = model.layout.bits_per_node
    span = 1 << n
    bits = states.reshape(states.shape[0], model.layout.num_nodes, n)
    powers = (1 << np.arange(n)).astype(np.int64)
    values = bits.astype(np.int64) @ powers
    idx = values[:, model.pair_i] * span + values[:, model.pair_j]
    cols = model.table_cols[idx]
    return model.pair_energies[np.arange(model.num_pairs)[None, :], cols].sum(axis=1)
