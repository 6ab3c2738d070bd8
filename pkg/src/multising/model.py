"""Problem instances, physical-bit layouts, and color encode/decode.

A multi-valued assignment (a color per graph node, or a tour position per
city) is flattened to a binary state over "physical" bits.  Two layouts are
supported: one-hot (q bits per node, exactly one set) and binary vector
(ceil(log2 q) bits per node, least-significant bit first).  States themselves
are plain ``numpy.uint8`` arrays; everything else here is immutable after
construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .rng import Stream


def bits_for(q: int) -> int:
    """ceil(log2 q) for q >= 2."""
    if q < 2:
        raise ValueError(f"need at least 2 values, got {q}")
    return (q - 1).bit_length()


@dataclass(frozen=True)
class Graph:
    """Undirected graph with deduplicated edges and positive weights."""

    num_nodes: int
    edges: np.ndarray         # (m, 2) int64, each row u < v, rows sorted
    edge_weights: np.ndarray  # (m,) float64, finite and > 0

    @classmethod
    def from_edges(
        cls,
        num_nodes: int,
        edges: Iterable[tuple[int, int]],
        weights: Optional[Iterable[float]] = None,
    ) -> "Graph":
        """Validate, deduplicate, and canonicalize an edge list.

        Self-loops are rejected; duplicate undirected edges keep the first
        weight seen.  Node ids must lie in [0, num_nodes).
        """
        if num_nodes < 0:
            raise ValueError("num_nodes must be non-negative")
        pairs = []
        wlist = []
        witer = iter(weights) if weights is not None else None
        seen = {}
        for u, v in edges:
            w = 1.0 if witer is None else float(next(witer))
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not (0 <= u < num_nodes and 0 <= v < num_nodes):
                raise ValueError(f"edge ({u}, {v}) out of range for {num_nodes} nodes")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                continue
            if not np.isfinite(w) or w <= 0:
                raise ValueError(f"edge {key} has invalid weight {w}")
            seen[key] = True
            pairs.append(key)
            wlist.append(w)
        if pairs:
            order = sorted(range(len(pairs)), key=lambda i: pairs[i])
            edge_arr = np.array([pairs[i] for i in order], dtype=np.int64)
            w_arr = np.array([wlist[i] for i in order], dtype=np.float64)
        else:
            edge_arr = np.zeros((0, 2), dtype=np.int64)
            w_arr = np.zeros(0, dtype=np.float64)
        edge_arr.setflags(write=False)
        w_arr.setflags(write=False)
        return cls(num_nodes=num_nodes, edges=edge_arr, edge_weights=w_arr)

    @property
    def num_edges(self) -> int:
        return self.edges.shape[0]

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.num_nodes, dtype=np.int64)
        if self.num_edges:
            np.add.at(deg, self.edges[:, 0], 1)
            np.add.at(deg, self.edges[:, 1], 1)
        return deg

    def neighbors(self) -> list[np.ndarray]:
        """Adjacency lists as arrays, sorted per node."""
        adj: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for u, v in self.edges:
            adj[u].append(int(v))
            adj[v].append(int(u))
        return [np.array(sorted(a), dtype=np.int64) for a in adj]


@dataclass(frozen=True)
class ColoringInstance:
    graph: Graph
    q: int
    name: str

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"q must be >= 2, got {self.q}")
        if not self.name:
            raise ValueError("name must be nonempty")


@dataclass(frozen=True)
class TspInstance:
    """Symmetric TSP with weights normalized so the maximum entry is 1."""

    num_cities: int
    weights: np.ndarray  # (N, N) float64, symmetric, zero diagonal, in [0, 1]
    name: str = ""

    def __post_init__(self):
        w = self.weights
        n = self.num_cities
        if w.shape != (n, n):
            raise ValueError(f"weight matrix shape {w.shape} != ({n}, {n})")
        if not np.allclose(w, w.T):
            raise ValueError("weight matrix must be symmetric")
        if np.any(np.diag(w) != 0):
            raise ValueError("diagonal must be zero")
        if np.any(w < 0) or np.any(w > 1) or not np.all(np.isfinite(w)):
            raise ValueError("weights must lie in [0, 1]")
        if n >= 2 and w.max() > 0 and not np.isclose(w.max(), 1.0):
            raise ValueError("nontrivial instances must be normalized to max 1")

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, name: str = "") -> "TspInstance":
        """Normalize an arbitrary symmetric distance matrix by its maximum."""
        mat = np.asarray(matrix, dtype=np.float64)
        top = mat.max()
        if top > 0:
            mat = mat / top
        mat = mat.copy()
        mat.setflags(write=False)
        return cls(num_cities=mat.shape[0], weights=mat, name=name)


class EncodingKind(Enum):
    ONE_HOT = "onehot"
    BINARY_VECTOR = "binary"


@dataclass(frozen=True)
class EncodingLayout:
    """How node values map to physical bits.

    ``num_values`` is the count of valid values per node (q for coloring,
    N for TSP positions); bit k of a binary-vector node carries weight 2^k.
    """

    kind: EncodingKind
    num_nodes: int
    num_values: int
    bits_per_node: int
    total_bits: int

    @classmethod
    def one_hot(cls, num_nodes: int, num_values: int) -> "EncodingLayout":
        if num_values < 2:
            raise ValueError("need at least 2 values")
        return cls(EncodingKind.ONE_HOT, num_nodes, num_values,
                   num_values, num_nodes * num_values)

    @classmethod
    def binary(cls, num_nodes: int, num_values: int) -> "EncodingLayout":
        n = bits_for(num_values)
        return cls(EncodingKind.BINARY_VECTOR, num_nodes, num_values,
                   n, num_nodes * n)

    def node_slice(self, node: int) -> slice:
        if not (0 <= node < self.num_nodes):
            raise IndexError(f"node {node} out of range")
        base = node * self.bits_per_node
        return slice(base, base + self.bits_per_node)


def physical_node_count(instance: ColoringInstance, kind: EncodingKind) -> int:
    """Physical bits needed to encode the instance under the given layout."""
    n = instance.graph.num_nodes
    if kind is EncodingKind.ONE_HOT:
        return n * instance.q
    return n * bits_for(instance.q)


def coloring_layout(instance: ColoringInstance, kind: EncodingKind) -> EncodingLayout:
    if kind is EncodingKind.ONE_HOT:
        return EncodingLayout.one_hot(instance.graph.num_nodes, instance.q)
    return EncodingLayout.binary(instance.graph.num_nodes, instance.q)


def tsp_layout(instance: TspInstance, kind: EncodingKind) -> EncodingLayout:
    if kind is EncodingKind.ONE_HOT:
        return EncodingLayout.one_hot(instance.num_cities, instance.num_cities)
    return EncodingLayout.binary(instance.num_cities, instance.num_cities)


def validate_state(state: np.ndarray, total_bits: int) -> None:
    if state.shape != (total_bits,):
        raise ValueError(f"state length {state.shape} != ({total_bits},)")
    if state.dtype != np.uint8:
        raise ValueError("state must be uint8")
    if np.any(state > 1):
        raise ValueError("state values must be 0 or 1")


def decode_color(state: np.ndarray, node: int, layout: EncodingLayout) -> Optional[int]:
    """Value of one node, or None when the bits are not a valid value.

    Binary vector: positional value (LSB first); invalid when >= num_values.
    One-hot: index of the unique hot bit; invalid when zero or several are hot.
    """
    bits = state[layout.node_slice(node)]
    if layout.kind is EncodingKind.BINARY_VECTOR:
        value = 0
        for k in range(layout.bits_per_node):
            value |= int(bits[k]) << k
        return value if value < layout.num_values else None
    hot = np.flatnonzero(bits)
    if hot.size != 1:
        return None
    return int(hot[0])


def decode_values(state: np.ndarray, layout: EncodingLayout) -> np.ndarray:
    """All node values at once; -1 marks an invalid decode."""
    if layout.kind is EncodingKind.BINARY_VECTOR:
        bits = state.reshape(layout.num_nodes, layout.bits_per_node)
        powers = (1 << np.arange(layout.bits_per_node)).astype(np.int64)
        vals = bits.astype(np.int64) @ powers
        vals[vals >= layout.num_values] = -1
        return vals
    bits = state.reshape(layout.num_nodes, layout.bits_per_node)
    counts = bits.sum(axis=1)
    vals = bits.argmax(axis=1).astype(np.int64)
    vals[counts != 1] = -1
    return vals


def encode_values(values: Sequence[int], layout: EncodingLayout) -> np.ndarray:
    """Inverse of decode for valid values (used by tests and oracles)."""
    state = np.zeros(layout.total_bits, dtype=np.uint8)
    for node, value in enumerate(values):
        if not (0 <= value < layout.num_values):
            raise ValueError(f"value {value} out of range for node {node}")
        base = node * layout.bits_per_node
        if layout.kind is EncodingKind.ONE_HOT:
            state[base + value] = 1
        else:
            for k in range(layout.bits_per_node):
                state[base + k] = (value >> k) & 1
    return state


def random_state(total_bits: int, stream: Stream) -> np.ndarray:
    """Each bit set with probability 1/2; one uniform draw per bit."""
    state = np.empty(total_bits, dtype=np.uint8)
    for i in range(total_bits):
        state[i] = 1 if stream.uniform() < 0.5 else 0
    return state
