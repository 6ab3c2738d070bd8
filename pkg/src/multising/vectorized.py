"""Binary-vector (truth table) Hamiltonians.

Each node's value lives in ceil(log2 q) bits and every interacting pair (i, j)
contributes an energy chosen by a truth-table operator applied to the two
decoded values.  The coloring operator marks same-color and out-of-range pairs;
the TSP operator distinguishes tour-adjacent, colliding, and out-of-range
position pairs, in that branch order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError
from .model import (
    ColoringInstance,
    EncodingKind,
    EncodingLayout,
    TspInstance,
    bits_for,
    validate_state,
)


@dataclass(frozen=True)
class TruthTableOperator:
    """Dense lookup over value pairs; index = value_i * 2^n + value_j."""

    n: int                 # bits per node
    table: np.ndarray      # int8, length 2^(2n)

    def __post_init__(self):
        if self.table.shape != (1 << (2 * self.n),):
            raise ValueError("table must have 2^(2n) entries")

    def code(self, a: int, b: int) -> int:
        span = 1 << self.n
        if not (0 <= a < span and 0 <= b < span):
            raise IndexError(f"values ({a}, {b}) out of range for n={self.n}")
        return int(self.table[a * span + b])


def build_coloring_operator(q: int) -> TruthTableOperator:
    """Code 1 when both values are equal or either is >= q, else 0."""
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    n = bits_for(q)
    span = 1 << n
    a = np.arange(span)[:, None]
    b = np.arange(span)[None, :]
    table = ((a == b) | (a >= q) | (b >= q)).astype(np.int8)
    return TruthTableOperator(n=n, table=table.ravel())


def build_tsp_operator(num_cities: int) -> TruthTableOperator:
    """Position-pair codes, tested in order: adjacent-in-tour (1), same
    position (-1), outside [0, N) (-2), otherwise 0."""
    if num_cities < 3:
        raise ValueError("need at least 3 cities")
    n = bits_for(num_cities)
    span = 1 << n
    table = np.zeros((span, span), dtype=np.int8)
    for a in range(span):
        for b in range(span):
            if abs(a - b) == 1:
                table[a, b] = 1
            elif a == b:
                table[a, b] = -1
            elif a >= num_cities or b >= num_cities:
                table[a, b] = -2
    return TruthTableOperator(n=n, table=table.ravel())


@dataclass(frozen=True)
class PairOperatorModel:
    """Pairwise truth-table energy model over a binary-vector layout."""

    layout: EncodingLayout
    operator: TruthTableOperator
    pair_i: np.ndarray          # (P,) int64 first node of each pair
    pair_j: np.ndarray          # (P,) int64 second node
    code_values: tuple          # distinct codes, in table-column order
    pair_energies: np.ndarray   # (P, len(code_values)) float64

    # derived lookup structures (built once in __post_init__)
    table_cols: np.ndarray = field(init=False, repr=False)
    bit_pair_indptr: np.ndarray = field(init=False, repr=False)
    bit_pair_ids: np.ndarray = field(init=False, repr=False)
    bit_pair_side: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.layout.kind is not EncodingKind.BINARY_VECTOR:
            raise ValueError("pair-operator models use the binary-vector layout")
        col_of = {c: k for k, c in enumerate(self.code_values)}
        try:
            cols = np.array([col_of[int(c)] for c in self.operator.table],
                            dtype=np.uint8)
        except KeyError as exc:
            raise ValueError(f"table code {exc} missing from code_values") from exc
        object.__setattr__(self, "table_cols", cols)

        # per-bit incidence: every bit of node i touches every pair on i
        n = self.layout.bits_per_node
        counts = np.zeros(self.layout.total_bits, dtype=np.int64)
        for arr in (self.pair_i, self.pair_j):
            for node in arr:
                base = node * n
                counts[base:base + n] += 1
        indptr = np.zeros(self.layout.total_bits + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        ids = np.zeros(indptr[-1], dtype=np.int64)
        side = np.zeros(indptr[-1], dtype=np.uint8)
        cursor = indptr[:-1].copy()
        for p in range(self.pair_i.size):
            for s, node in enumerate((int(self.pair_i[p]), int(self.pair_j[p]))):
                base = node * n
                for k in range(n):
                    pos = cursor[base + k]
                    ids[pos] = p
                    side[pos] = s
                    cursor[base + k] += 1
        object.__setattr__(self, "bit_pair_indptr", indptr)
        object.__setattr__(self, "bit_pair_ids", ids)
        object.__setattr__(self, "bit_pair_side", side)

    @property
    def total_bits(self) -> int:
        return self.layout.total_bits

    @property
    def num_pairs(self) -> int:
        return self.pair_i.size

    def node_values(self, state: np.ndarray) -> np.ndarray:
        n = self.layout.bits_per_node
        bits = state.reshape(self.layout.num_nodes, n)
        powers = (1 << np.arange(n)).astype(np.int64)
        return bits.astype(np.int64) @ powers

    def energy(self, state: np.ndarray) -> float:
        validate_state(state, self.total_bits)
        vals = self.node_values(state)
        span = 1 << self.layout.bits_per_node
        idx = vals[self.pair_i] * span + vals[self.pair_j]
        cols = self.table_cols[idx]
        return float(self.pair_energies[np.arange(self.num_pairs), cols].sum())

    def delta_h_node_bit(self, state: np.ndarray, node: int, k: int) -> float:
        """Summed per-pair energy difference with bit k of ``node`` at 1 vs 0,
        all other bits held fixed (multiplexer-select semantics)."""
        n = self.layout.bits_per_node
        if not (0 <= node < self.layout.num_nodes) or not (0 <= k < n):
            raise IndexError(f"node {node} bit {k} out of range")
        vals = self.node_values(state)
        cur = int(vals[node])
        v1 = cur | (1 << k)
        v0 = cur & ~(1 << k)
        span = 1 << n
        bit = node * n + k
        lo, hi = self.bit_pair_indptr[bit], self.bit_pair_indptr[bit + 1]
        acc = 0.0
        for t in range(lo, hi):
            p = int(self.bit_pair_ids[t])
            if self.bit_pair_side[t] == 0:
                other = int(vals[self.pair_j[p]])
                i1, i0 = v1 * span + other, v0 * span + other
            else:
                other = int(vals[self.pair_i[p]])
                i1, i0 = other * span + v1, other * span + v0
            acc += (self.pair_energies[p, self.table_cols[i1]]
                    - self.pair_energies[p, self.table_cols[i0]])
        return acc

    def delta_h(self, state: np.ndarray, bit: int) -> float:
        n = self.layout.bits_per_node
        return self.delta_h_node_bit(state, bit // n, bit % n)


def build_coloring_model(instance: ColoringInstance) -> PairOperatorModel:
    """One pair per graph edge; conflict code 1 costs the edge weight."""
    op = build_coloring_operator(instance.q)
    g = instance.graph
    layout = EncodingLayout.binary(g.num_nodes, instance.q)
    energies = np.zeros((g.num_edges, 2), dtype=np.float64)
    energies[:, 1] = g.edge_weights
    return PairOperatorModel(
        layout=layout, operator=op,
        pair_i=g.edges[:, 0].astype(np.int64).copy(),
        pair_j=g.edges[:, 1].astype(np.int64).copy(),
        code_values=(0, 1), pair_energies=energies)


def build_tsp_operator_model(instance: TspInstance, wt: float) -> PairOperatorModel:
    """All-pairs TSP model: adjacency pays the normalized distance, a shared
    position pays wt times the column sum of the second city, an out-of-range
    position pays the maximum distance."""
    if wt <= 0:
        raise ValueError("wt must be positive")
    n_cities = instance.num_cities
    op = build_tsp_operator(n_cities)
    layout = EncodingLayout.binary(n_cities, n_cities)
    pair_i, pair_j = np.triu_indices(n_cities, k=1)
    w = instance.weights
    col_sums = w.sum(axis=0)
    top = float(w.max())
    num = pair_i.size
    energies = np.zeros((num, 4), dtype=np.float64)
    # column order mirrors code_values below
    energies[:, 1] = w[pair_i, pair_j]              # code 1: tour-adjacent
    energies[:, 2] = wt * col_sums[pair_j]          # code -1: same position
    energies[:, 3] = top                            # code -2: out of range
    return PairOperatorModel(
        layout=layout, operator=op,
        pair_i=pair_i.astype(np.int64), pair_j=pair_j.astype(np.int64),
        code_values=(0, 1, -1, -2), pair_energies=energies)


def energy_vec(model: PairOperatorModel, state: np.ndarray) -> float:
    return model.energy(state)


def delta_h_vec(model: PairOperatorModel, state: np.ndarray, node: int, k: int) -> float:
    return model.delta_h_node_bit(state, node, k)


def export_truth_table(op: TruthTableOperator) -> str:
    """One "a b code" row per table entry, in index order."""
    span = 1 << op.n
    lines = [f"{a} {b} {op.code(a, b)}" for a in range(span) for b in range(span)]
    return "\n".join(lines) + "\n"


def load_truth_table(text: str) -> TruthTableOperator:
    """Inverse of :func:`export_truth_table`; n is inferred from the row count."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected 'a b code'")
        entries[(int(parts[0]), int(parts[1]))] = int(parts[2])
    count = len(entries)
    n = 0
    while (1 << (2 * n)) < count:
        n += 1
    if n == 0 or (1 << (2 * n)) != count:
        raise ParseError(f"expected 4^n rows, got {count}")
    span = 1 << n
    table = np.zeros(span * span, dtype=np.int8)
    for (a, b), code in entries.items():
        if not (0 <= a < span and 0 <= b < span):
            raise ParseError(f"value pair ({a}, {b}) out of range for n={n}")
        table[a * span + b] = code
    return TruthTableOperator(n=n, table=table)
