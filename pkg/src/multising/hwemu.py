"""Bit-exact emulation of the FPGA sampling datapath.

One physical bit updates per clock cycle: its local-field difference is
accumulated in a saturating signed 8-bit register, pushed through a 256-entry
16-bit sigmoid lookup table (temperature is baked into the table), and
compared against a per-bit 16-bit LFSR draw.  ``hw_node_update`` is the
single-cycle reference; ``run_hw`` drives the compiled kernel, which follows
the identical sequence.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, replace
import numpy as np

from . import _kernels
from .errors import CapacityError
from .gibbs import SampleTrace
from .rng import splitmix64
from .vectorized import PairOperatorModel

ACC_MIN = -128
ACC_MAX = 127
CLOCK_HZ = 90_000_000  # published accelerator clock; used only for projections


@dataclass(frozen=True)
class FixedPointConfig:
    acc_bits: int = 8
    lut_entries: int = 256
    lut_out_bits: int = 16
    lfsr_bits: int = 16
    lfsr_taps: tuple = (16, 15, 13, 4)  # maximal-length polynomial
    weight_scale: int = 1

    def __post_init__(self):
        if self.lut_entries != (1 << self.acc_bits):
            raise ValueError("lut_entries must equal 2^acc_bits")
        if self.weight_scale < 1:
            raise ValueError("weight_scale must be >= 1")
        if any(not (1 <= t <= self.lfsr_bits) for t in self.lfsr_taps):
            raise ValueError("taps must lie in [1, lfsr_bits]")


@dataclass(frozen=True)
class HwLimits:
    max_graph_nodes: int = 256
    max_colors: int = 16
    max_physical_nodes: int = 1024


def check_limits(model: PairOperatorModel, limits: HwLimits = HwLimits()) -> None:
    layout = model.layout
    if layout.num_nodes > limits.max_graph_nodes:
        raise CapacityError(
            f"{layout.num_nodes} graph nodes exceed the {limits.max_graph_nodes}-node capacity")
    if layout.num_values > limits.max_colors:
        raise CapacityError(
            f"{layout.num_values} values exceed the {limits.max_colors}-color capacity")
    if layout.total_bits > limits.max_physical_nodes:
        raise CapacityError(
            f"{layout.total_bits} physical nodes exceed the {limits.max_physical_nodes} capacity")


def build_sigmoid_lut(t: float, config: FixedPointConfig = FixedPointConfig()) -> np.ndarray:
    """entry[d & 0xFF] = rint((2^16 - 1) * sigmoid(-d / T)) for signed 8-bit d."""
    if t <= 0:
        raise ValueError("temperature must be positive")
    scale = (1 << config.lut_out_bits) - 1
    half = config.lut_entries // 2
    lut = np.zeros(config.lut_entries, dtype=np.uint16)
    for idx in range(config.lut_entries):
        d = idx if idx < half else idx - config.lut_entries
        z = d / t
        if z >= 0:
            ez = math.exp(-z) if z < 745.0 else 0.0
            p = ez / (1.0 + ez)
        else:
            p = 1.0 / (1.0 + math.exp(z))
        lut[idx] = int(np.rint(scale * p))
    return lut


def lfsr_next(state: int, taps: tuple = (16, 15, 13, 4), bits: int = 16) -> int:
    """One Fibonacci shift; feedback is the XOR of the tap bits."""
    if state == 0:
        raise ValueError("LFSR state must be nonzero")
    fb = 0
    for tap in taps:
        fb ^= state >> (bits - tap)
    fb &= 1
    return (state >> 1) | (fb << (bits - 1))


def derive_node_seeds(seed: int, count: int, bits: int = 16) -> np.ndarray:
    """Per-bit LFSR seeds mixed from the global seed; forced nonzero."""
    mask = (1 << bits) - 1
    seeds = np.empty(count, dtype=np.uint16)
    for i in range(count):
        s = splitmix64(splitmix64(seed) ^ (i + 1)) & mask
        seeds[i] = s if s != 0 else 0xACE1
    return seeds


def quantize_model(model: PairOperatorModel,
                   config: FixedPointConfig = FixedPointConfig()) -> PairOperatorModel:
    """Scale pair energies by weight_scale and round to integers.

    Warns when any single quantized pair energy exceeds the accumulator range,
    since such contributions saturate.
    """
    quant = np.rint(model.pair_energies * config.weight_scale).astype(np.int64)
    if np.any(np.abs(quant) > ACC_MAX):
        warnings.warn("quantized pair energy exceeds the 8-bit accumulator range; "
                      "local fields will saturate", RuntimeWarning)
    return replace(model, pair_energies=quant)


def _saturating_delta(model: PairOperatorModel, values: np.ndarray,
                      node: int, k: int) -> tuple[int, int]:
    """(saturated, true) integer dH for one bit given current node values."""
    span = 1 << model.layout.bits_per_node
    cur = int(values[node])
    v1 = cur | (1 << k)
    v0 = cur & ~(1 << k)
    bit = node * model.layout.bits_per_node + k
    lo, hi = model.bit_pair_indptr[bit], model.bit_pair_indptr[bit + 1]
    acc = 0
    true_dh = 0
    for t in range(lo, hi):
        p = int(model.bit_pair_ids[t])
        if model.bit_pair_side[t] == 0:
            other = int(values[model.pair_j[p]])
            i1, i0 = v1 * span + other, v0 * span + other
        else:
            other = int(values[model.pair_i[p]])
            i1, i0 = other * span + v1, other * span + v0
        contrib = int(model.pair_energies[p, model.table_cols[i1]]
                      - model.pair_energies[p, model.table_cols[i0]])
        true_dh += contrib
        acc = min(ACC_MAX, max(ACC_MIN, acc + contrib))
    return acc, true_dh


def hw_node_update(model: PairOperatorModel, state: np.ndarray, bit: int,
                   lut: np.ndarray, lfsr_state: int,
                   config: FixedPointConfig = FixedPointConfig()) -> tuple[int, int]:
    """One emulated cycle: returns (new bit value, advanced LFSR state) and
    applies the update to ``state``.  ``model`` must already be quantized."""
    n = model.layout.bits_per_node
    values = model.node_values(state)
    acc, _ = _saturating_delta(model, values, bit // n, bit % n)
    rnd = lfsr_next(lfsr_state, config.lfsr_taps, config.lfsr_bits)
    new = 1 if int(lut[acc & 0xFF]) > rnd else 0
    state[bit] = new
    return new, rnd


@dataclass
class HwRunResult:
    trace: SampleTrace
    cycles: int
    projected_seconds: float  # cycles / 90 MHz, a projection only
    weight_scale: int


def initial_hw_state(seed: int, total_bits: int) -> np.ndarray:
    """Deterministic pseudo-random initial bits derived from the seed."""
    state = np.empty(total_bits, dtype=np.uint8)
    base = splitmix64(seed ^ 0xB105F00D)
    for i in range(total_bits):
        state[i] = splitmix64(base ^ i) & 1
    return state


def run_hw(model: PairOperatorModel, sweeps: int, t: float, seed: int = 0,
           config: FixedPointConfig = FixedPointConfig(),
           limits: HwLimits = HwLimits(),
           quantized: bool = False) -> HwRunResult:
    """Full emulated run: one bit per cycle, sweeps * total_bits cycles."""
    check_limits(model, limits)
    qmodel = model if quantized else quantize_model(model, config)
    t0 = time.perf_counter()
    dim = qmodel.total_bits
    lut = build_sigmoid_lut(t, config)
    states = initial_hw_state(seed, dim)[None, :].copy()
    lfsr = derive_node_seeds(seed, dim)[None, :].copy()
    n_bits = qmodel.layout.bits_per_node
    values = np.zeros((1, qmodel.layout.num_nodes), dtype=np.int64)
    _kernels.node_values_batch(states, n_bits, values)
    energies = np.empty(1, dtype=np.float64)
    _kernels.energy_pairop_batch(qmodel.pair_i, qmodel.pair_j, qmodel.table_cols,
                                 qmodel.pair_energies, 1 << n_bits, values, energies)
    best_e = energies.copy()
    best_s = states.copy()
    shifts = np.array([config.lfsr_bits - tap for tap in config.lfsr_taps],
                      dtype=np.int64)
    history = [(0, float(energies[0]))]
    _kernels.sweeps_hw(qmodel.pair_i, qmodel.pair_j, qmodel.table_cols,
                       qmodel.pair_energies, qmodel.bit_pair_indptr,
                       qmodel.bit_pair_ids, qmodel.bit_pair_side, n_bits,
                       1 << n_bits, states, values, energies, lfsr, shifts,
                       lut, sweeps, best_e, best_s)
    history.append((sweeps, float(energies[0])))
    cycles = sweeps * dim
    trace = SampleTrace(best_energy=float(best_e[0]), best_state=best_s[0].copy(),
                        energy_history=history,
                        wall_time=time.perf_counter() - t0)
    return HwRunResult(trace=trace, cycles=cycles,
                       projected_seconds=cycles / CLOCK_HZ,
                       weight_scale=config.weight_scale)


def hw_summary(result: HwRunResult) -> dict:
    """JSON-ready cycle/projection summary."""
    return {
        "schema": "multising-hw-summary-v1",
        "cycles": result.cycles,
        "clock_hz": CLOCK_HZ,
        "projected_seconds": result.projected_seconds,
        "best_energy": result.trace.best_energy,
        "weight_scale": result.weight_scale,
    }
