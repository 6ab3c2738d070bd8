"""Compiled single-flip sampling kernels.

All kernels run a batch of independent chains (rows) and may execute chains in
parallel; each chain owns one xorshift64* stream and one state row, so results
do not depend on thread scheduling.  The RNG recurrence mirrors
``multising.rng.Stream`` bit for bit.
"""

import math

import numpy as np
from numba import njit, prange
from numba import uint8, uint16, uint64

_MULT = uint64(0x2545F4914F6CDD1D)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(inline="always")
def _next_u64(rng, r):
    x = rng[r]
    x ^= x >> uint64(12)
    x ^= x << uint64(25)
    x ^= x >> uint64(27)
    rng[r] = x
    return x * _MULT


@njit(inline="always")
def _uniform(rng, r):
    return (_next_u64(rng, r) >> uint64(11)) * _INV_2_53


@njit(inline="always")
def _accept_prob(dh, inv_t):
    z = dh * inv_t
    if z >= 0.0:
        ez = math.exp(-z)
        return ez / (1.0 + ez)
    ez = math.exp(z)
    return 1.0 / (1.0 + ez)


@njit(parallel=True, cache=True)
def init_states(rng, states):
    n_runs, dim = states.shape
    for r in prange(n_runs):
        for a in range(dim):
            states[r, a] = uint8(1) if _uniform(rng, r) < 0.5 else uint8(0)


@njit(parallel=True, cache=True)
def energy_qubo_batch(indptr, indices, data, bias, offset, states, out):
    n_runs, dim = states.shape
    for r in prange(n_runs):
        e = offset
        for a in range(dim):
            if states[r, a] == uint8(1):
                acc = 0.0
                for t in range(indptr[a], indptr[a + 1]):
                    acc += data[t] * states[r, indices[t]]
                e += acc + bias[a]
        out[r] = e


@njit(parallel=True, cache=True)
def sweeps_qubo(indptr, indices, data, bias, states, energies, rng, inv_t,
                n_sweeps, best_e, best_s):
    n_runs, dim = states.shape
    for r in prange(n_runs):
        e = energies[r]
        be = best_e[r]
        for _ in range(n_sweeps):
            for a in range(dim):
                acc = 0.0
                for t in range(indptr[a], indptr[a + 1]):
                    acc += data[t] * states[r, indices[t]]
                dh = 2.0 * acc + bias[a]
                u = _uniform(rng, r)
                new = uint8(1) if _accept_prob(dh, inv_t[r]) > u else uint8(0)
                old = states[r, a]
                if new != old:
                    e += dh if new == uint8(1) else -dh
                    states[r, a] = new
            if e < be:
                be = e
                for a in range(dim):
                    best_s[r, a] = states[r, a]
        energies[r] = e
        best_e[r] = be


@njit(parallel=True, cache=True)
def node_values_batch(states, n_bits, values):
    n_runs = states.shape[0]
    n_nodes = values.shape[1]
    for r in prange(n_runs):
        for i in range(n_nodes):
            v = 0
            for k in range(n_bits):
                if states[r, i * n_bits + k] == uint8(1):
                    v |= 1 << k
            values[r, i] = v


@njit(parallel=True, cache=True)
def energy_pairop_batch(pair_i, pair_j, table_cols, pair_e, span, values, out):
    n_runs = values.shape[0]
    n_pairs = pair_i.shape[0]
    for r in prange(n_runs):
        e = 0.0
        for p in range(n_pairs):
            idx = values[r, pair_i[p]] * span + values[r, pair_j[p]]
            e += pair_e[p, table_cols[idx]]
        out[r] = e


@njit(parallel=True, cache=True)
def sweeps_pairop(pair_i, pair_j, table_cols, pair_e, bp_indptr, bp_ids,
                  bp_side, n_bits, span, states, values, energies, rng, inv_t,
                  n_sweeps, best_e, best_s):
    n_runs, dim = states.shape
    for r in prange(n_runs):
        e = energies[r]
        be = best_e[r]
        for _ in range(n_sweeps):
            for a in range(dim):
                node = a // n_bits
                k = a - node * n_bits
                cur = values[r, node]
                v1 = cur | (1 << k)
                v0 = cur & ~(1 << k)
                dh = 0.0
                for t in range(bp_indptr[a], bp_indptr[a + 1]):
                    p = bp_ids[t]
                    if bp_side[t] == uint8(0):
                        other = values[r, pair_j[p]]
                        dh += (pair_e[p, table_cols[v1 * span + other]]
                               - pair_e[p, table_cols[v0 * span + other]])
                    else:
                        other = values[r, pair_i[p]]
                        dh += (pair_e[p, table_cols[other * span + v1]]
                               - pair_e[p, table_cols[other * span + v0]])
                u = _uniform(rng, r)
                new = uint8(1) if _accept_prob(dh, inv_t[r]) > u else uint8(0)
                old = states[r, a]
                if new != old:
                    e += dh if new == uint8(1) else -dh
                    states[r, a] = new
                    values[r, node] = v1 if new == uint8(1) else v0
            if e < be:
                be = e
                for a2 in range(dim):
                    best_s[r, a2] = states[r, a2]
        energies[r] = e
        best_e[r] = be


@njit(parallel=True, cache=True)
def sweeps_hw(pair_i, pair_j, table_cols, pair_e_q, bp_indptr, bp_ids, bp_side,
              n_bits, span, states, values, energies, lfsr, shifts, lut,
              n_sweeps, best_e, best_s):
    """Fixed-point datapath: saturating 8-bit local-field accumulation, 16-bit
    sigmoid LUT, per-bit 16-bit LFSR comparator.  Energies track the true
    (unsaturated) quantized Hamiltonian for diagnostics."""
    n_runs, dim = states.shape
    n_shifts = shifts.shape[0]
    for r in prange(n_runs):
        e = energies[r]
        be = best_e[r]
        for _ in range(n_sweeps):
            for a in range(dim):
                node = a // n_bits
                k = a - node * n_bits
                cur = values[r, node]
                v1 = cur | (1 << k)
                v0 = cur & ~(1 << k)
                acc = np.int64(0)
                true_dh = np.int64(0)
                for t in range(bp_indptr[a], bp_indptr[a + 1]):
                    p = bp_ids[t]
                    if bp_side[t] == uint8(0):
                        other = values[r, pair_j[p]]
                        contrib = (pair_e_q[p, table_cols[v1 * span + other]]
                                   - pair_e_q[p, table_cols[v0 * span + other]])
                    else:
                        other = values[r, pair_i[p]]
                        contrib = (pair_e_q[p, table_cols[other * span + v1]]
                                   - pair_e_q[p, table_cols[other * span + v0]])
                    true_dh += contrib
                    acc += contrib
                    if acc > 127:
                        acc = 127
                    elif acc < -128:
                        acc = -128
                s = lfsr[r, a]
                fb = uint16(0)
                for t in range(n_shifts):
                    fb ^= s >> uint16(shifts[t])
                fb = fb & uint16(1)
                s = (s >> uint16(1)) | (fb << uint16(15))
                lfsr[r, a] = s
                new = uint8(1) if lut[acc & 0xFF] > s else uint8(0)
                old = states[r, a]
                if new != old:
                    e += true_dh if new == uint8(1) else -true_dh
                    states[r, a] = new
                    values[r, node] = v1 if new == uint8(1) else v0
            if e < be:
                be = e
                for a2 in range(dim):
                    best_s[r, a2] = states[r, a2]
        energies[r] = e
        best_e[r] = be
