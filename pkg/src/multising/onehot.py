"""One-hot QUBO Hamiltonians.

Graph coloring uses the classic two-term penalty form: an edge term that
charges ``A`` whenever the endpoints of an edge share a hot color bit, plus a
one-hot constraint term charging ``B`` per node for deviating from exactly one
hot bit.  The TSP variant adds the tour-cost coupling between consecutive
positions and one-hot penalties over both rows (positions) and columns
(cities).

Energy convention: ``E(s) = s^T P s + bias . s + offset`` with ``P`` symmetric
and zero-diagonal, so each unordered pair {a, b} contributes ``2 P[a,b]``.
Diagonal terms are folded into the bias at build time (s^2 = s).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .errors import ParseError
from .model import (
    ColoringInstance,
    EncodingKind,
    EncodingLayout,
    TspInstance,
    coloring_layout,
    decode_color,
    validate_state,
)


@dataclass(frozen=True)
class QuboModel:
    """Quadratic pseudo-boolean energy in symmetric normal form."""

    dim: int
    pair_weights: sp.csr_matrix  # symmetric, zero diagonal
    bias: np.ndarray
    offset: float
    layout: Optional[EncodingLayout] = None

    def __post_init__(self):
        if self.pair_weights.shape != (self.dim, self.dim):
            raise ValueError("pair_weights shape mismatch")
        if self.bias.shape != (self.dim,):
            raise ValueError("bias shape mismatch")

    @classmethod
    def from_dense(cls, matrix: np.ndarray, bias: np.ndarray, offset: float = 0.0,
                   layout: Optional[EncodingLayout] = None) -> "QuboModel":
        mat = np.asarray(matrix, dtype=np.float64)
        if not np.allclose(mat, mat.T):
            raise ValueError("pair weights must be symmetric")
        if np.any(np.diag(mat) != 0):
            raise ValueError("diagonal must be zero (fold it into the bias)")
        return cls(dim=mat.shape[0], pair_weights=sp.csr_matrix(mat),
                   bias=np.asarray(bias, dtype=np.float64), offset=float(offset),
                   layout=layout)

    @property
    def total_bits(self) -> int:
        return self.dim

    def energy(self, state: np.ndarray) -> float:
        validate_state(state, self.dim)
        s = state.astype(np.float64)
        return float(s @ (self.pair_weights @ s) + self.bias @ s + self.offset)

    def energies(self, states: np.ndarray) -> np.ndarray:
        """Batched energy over rows of ``states``."""
        s = states.astype(np.float64)
        quad = ((self.pair_weights @ s.T).T * s).sum(axis=1)
        return quad + s @ self.bias + self.offset

    def delta_h(self, state: np.ndarray, bit: int) -> float:
        """E(bit=1) - E(bit=0) with every other bit fixed; O(degree of bit)."""
        if not (0 <= bit < self.dim):
            raise IndexError(f"bit {bit} out of range")
        m = self.pair_weights
        lo, hi = m.indptr[bit], m.indptr[bit + 1]
        cols = m.indices[lo:hi]
        acc = float(m.data[lo:hi] @ state[cols].astype(np.float64))
        return 2.0 * acc + float(self.bias[bit])

    def csr_arrays(self):
        m = self.pair_weights
        return m.indptr, m.indices, m.data


def energy_qubo(model: QuboModel, state: np.ndarray) -> float:
    return model.energy(state)


def delta_h_qubo(model: QuboModel, state: np.ndarray, bit: int) -> float:
    return model.delta_h(state, bit)


def _coo_to_model(dim, rows, cols, vals, bias, offset, layout) -> QuboModel:
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    mat.sum_duplicates()
    return QuboModel(dim=dim, pair_weights=mat, bias=bias, offset=float(offset),
                     layout=layout)


def build_onehot(instance: ColoringInstance, a_weight: float, b_weight: float) -> QuboModel:
    """Coloring QUBO: edge conflicts weighted by A, one-hot penalty by B.

    Expansion of the penalty places -B on every bit, B on each intra-node
    symmetric entry (2B per unordered pair), A/2 on each matching-color entry
    of an edge (A per unordered pair), and B*N in the constant offset.
    """
    if a_weight <= 0 or b_weight <= 0:
        raise ValueError("A and B must be positive")
    g = instance.graph
    q = instance.q
    n = g.num_nodes
    layout = coloring_layout(instance, EncodingKind.ONE_HOT)
    dim = layout.total_bits

    rows, cols, vals = [], [], []

    # intra-node one-hot pairs: B each side per (k, l), k != l
    ks, ls = np.triu_indices(q, k=1)
    for i in range(n):
        base = i * q
        a = base + ks
        b = base + ls
        rows.extend((a, b))
        cols.extend((b, a))
        vals.extend((np.full(ks.size, b_weight), np.full(ks.size, b_weight)))

    # inter-node matching-color pairs: A/2 each side
    if g.num_edges:
        colors = np.arange(q)
        u_bits = (g.edges[:, 0][:, None] * q + colors[None, :]).ravel()
        v_bits = (g.edges[:, 1][:, None] * q + colors[None, :]).ravel()
        half = np.full(u_bits.size, a_weight / 2.0)
        rows.extend((u_bits, v_bits))
        cols.extend((v_bits, u_bits))
        vals.extend((half, half))

    rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    vals = np.concatenate(vals) if vals else np.zeros(0)
    bias = np.full(dim, -b_weight, dtype=np.float64)
    return _coo_to_model(dim, rows, cols, vals, bias, b_weight * n, layout)


def build_tsp_onehot(instance: TspInstance, a_weight: float, b_weight: float) -> QuboModel:
    """Position/city one-hot TSP Hamiltonian.

    Bit (i, k) means city k sits at tour position i (bit index i*N + k).  The
    tour-cost term couples consecutive positions cyclically (closing edge
    included); both the one-position-per-city and one-city-per-position
    one-hot penalties are included.
    """
    if a_weight <= 0 or b_weight <= 0:
        raise ValueError("A and B must be positive")
    n = instance.num_cities
    if n < 3:
        raise ValueError("need at least 3 cities")
    w = instance.weights
    layout = EncodingLayout.one_hot(n, n)
    dim = layout.total_bits

    rows, cols, vals = [], [], []

    # tour cost: bit (i, k) with bit (i+1 mod N, l), k != l, coefficient A*W_kl
    ks, ls = np.nonzero(w)  # symmetric, zero diagonal: all ordered k != l with W > 0
    coup = a_weight * w[ks, ls] / 2.0
    for i in range(n):
        j = (i + 1) % n
        a = i * n + ks
        b = j * n + ls
        rows.extend((a, b))
        cols.extend((b, a))
        vals.extend((coup, coup))

    # one-hot per position (cities k < l) and per city (positions i < i2)
    ks, ls = np.triu_indices(n, k=1)
    bvals = np.full(ks.size, b_weight)
    for i in range(n):
        a = i * n + ks
        b = i * n + ls
        rows.extend((a, b))
        cols.extend((b, a))
        vals.extend((bvals, bvals))
    for k in range(n):
        a = ks * n + k
        b = ls * n + k
        rows.extend((a, b))
        cols.extend((b, a))
        vals.extend((bvals, bvals))

    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    bias = np.full(dim, -2.0 * b_weight, dtype=np.float64)
    return _coo_to_model(dim, rows, cols, vals, bias, 2.0 * b_weight * n, layout)


def decode_onehot_coloring(state: np.ndarray, instance: ColoringInstance) -> list:
    """Per-node color, or None where the one-hot pattern is malformed."""
    layout = coloring_layout(instance, EncodingKind.ONE_HOT)
    validate_state(state, layout.total_bits)
    return [decode_color(state, i, layout) for i in range(layout.num_nodes)]


def export_qubo_text(model: QuboModel) -> str:
    """Plain-text coefficient dump: offset header, "i i b" bias rows, and one
    "i j w" row per stored upper-triangle entry (the symmetric half)."""
    lines = [f"offset {float(model.offset)!r}"]
    for i in range(model.dim):
        if model.bias[i] != 0.0:
            lines.append(f"{i} {i} {float(model.bias[i])!r}")
    coo = model.pair_weights.tocoo()
    order = np.lexsort((coo.col, coo.row))
    for idx in order:
        i, j, w = int(coo.row[idx]), int(coo.col[idx]), float(coo.data[idx])
        if i < j and w != 0.0:
            lines.append(f"{i} {j} {w!r}")
    return "\n".join(lines) + "\n"


def parse_qubo_text(text: str) -> QuboModel:
    """Inverse of :func:`export_qubo_text` (layout is not preserved)."""
    offset = 0.0
    entries = []
    dim = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "offset":
            offset = float(parts[1])
            continue
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected 'i j w'")
        i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        entries.append((i, j, w))
        dim = max(dim, i + 1, j + 1)
    bias = np.zeros(dim)
    rows, cols, vals = [], [], []
    for i, j, w in entries:
        if i == j:
            bias[i] += w
        else:
            rows.extend((i, j))
            cols.extend((j, i))
            vals.extend((w, w))
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    return QuboModel(dim=dim, pair_weights=mat, bias=bias, offset=offset)
