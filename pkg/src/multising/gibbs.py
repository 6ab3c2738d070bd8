"""Single-flip Gibbs sampling.

Every bit is visited once per sweep in ascending index order and resampled
from its conditional distribution: the bit becomes 1 exactly when
``sigmoid(-dH/T) > u`` for a fresh uniform ``u`` in [0, 1), where
``dH = H(bit=1) - H(bit=0)``.  ``gibbs_sweep`` is the pure-Python reference;
``run_chain``/``run_chains_batch`` drive the compiled kernels, which consume
the identical random stream and therefore produce bit-identical trajectories.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels
from .onehot import QuboModel
from .rng import Stream, stream_state
from .vectorized import PairOperatorModel

Model = Union[QuboModel, PairOperatorModel]


@dataclass(frozen=True)
class SamplerConfig:
    temperature: float
    steps: int                      # number of full sweeps
    seed: int = 0
    record_energy_every: int = 1
    scan_order: str = "sequential"  # or "random" (reference path only)

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.steps < 1:
            raise ValueError("need at least one sweep")
        if self.record_energy_every < 1:
            raise ValueError("record_energy_every must be >= 1")
        if self.scan_order not in ("sequential", "random"):
            raise ValueError(f"unknown scan order {self.scan_order!r}")


@dataclass
class SampleTrace:
    """Outcome of one chain: best state seen (at sweep granularity), energy
    samples, and wall time."""

    best_energy: float
    best_state: np.ndarray
    energy_history: list  # (sweep index, energy at that sweep)
    wall_time: float


def accept_probability(delta_h: float, t: float) -> float:
    """P(bit -> 1) = 1 / (1 + exp(dH / T)); saturates to 0/1 on overflow."""
    if t <= 0:
        raise ValueError("temperature must be positive")
    z = delta_h / t
    if z >= 0.0:
        ez = math.exp(-z) if z < 745.0 else 0.0
        return ez / (1.0 + ez)
    ez = math.exp(z) if z > -745.0 else 0.0
    return 1.0 / (1.0 + ez)


def gibbs_sweep(model: Model, state: np.ndarray, t: float, stream: Stream,
                order: Optional[Sequence[int]] = None) -> np.ndarray:
    """One full sweep in place; ascending bit order unless ``order`` is given."""
    bits = range(model.total_bits) if order is None else order
    for bit in bits:
        dh = model.delta_h(state, bit)
        u = stream.uniform()
        state[bit] = 1 if accept_probability(dh, t) > u else 0
    return state


def _model_arrays(model: Model):
    if isinstance(model, QuboModel):
        indptr, indices, data = model.csr_arrays()
        return ("qubo", indptr, indices, data, model.bias, model.offset)
    if isinstance(model, PairOperatorModel):
        return ("pairop", model.pair_i, model.pair_j, model.table_cols,
                model.pair_energies, model.bit_pair_indptr, model.bit_pair_ids,
                model.bit_pair_side, model.layout.bits_per_node,
                1 << model.layout.bits_per_node)
    raise TypeError(f"unsupported model type {type(model).__name__}")


class _BatchDriver:
    """Shared state for advancing a batch of chains via the kernels."""

    def __init__(self, model: Model, n_runs: int, seed: int, base_stream: int = 0,
                 init: Optional[np.ndarray] = None):
        self.model = model
        self.arrays = _model_arrays(model)
        dim = model.total_bits
        self.rng = np.array(
            [stream_state(seed, base_stream + r) for r in range(n_runs)],
            dtype=np.uint64)
        self.states = np.empty((n_runs, dim), dtype=np.uint8)
        if init is None:
            _kernels.init_states(self.rng, self.states)
        else:
            self.states[:] = init
        if self.arrays[0] == "pairop":
            n_bits = self.arrays[8]
            self.values = np.zeros((n_runs, model.layout.num_nodes), dtype=np.int64)
            _kernels.node_values_batch(self.states, n_bits, self.values)
        else:
            self.values = None
        self.energies = self.compute_energies()
        self.best_e = self.energies.copy()
        self.best_s = self.states.copy()

    def compute_energies(self) -> np.ndarray:
        out = np.empty(self.states.shape[0], dtype=np.float64)
        if self.arrays[0] == "qubo":
            _, indptr, indices, data, bias, offset = self.arrays
            _kernels.energy_qubo_batch(indptr, indices, data, bias, offset,
                                       self.states, out)
        else:
            (_, pair_i, pair_j, cols, pair_e, _, _, _, n_bits, span) = self.arrays
            _kernels.node_values_batch(self.states, n_bits, self.values)
            _kernels.energy_pairop_batch(pair_i, pair_j, cols, pair_e, span,
                                         self.values, out)
        return out

    def advance(self, n_sweeps: int, inv_t: np.ndarray) -> None:
        if n_sweeps <= 0:
            return
        if self.arrays[0] == "qubo":
            _, indptr, indices, data, bias, _ = self.arrays
            _kernels.sweeps_qubo(indptr, indices, data, bias, self.states,
                                 self.energies, self.rng, inv_t, n_sweeps,
                                 self.best_e, self.best_s)
        else:
            (_, pair_i, pair_j, cols, pair_e, bp_indptr, bp_ids, bp_side,
             n_bits, span) = self.arrays
            _kernels.sweeps_pairop(pair_i, pair_j, cols, pair_e, bp_indptr,
                                   bp_ids, bp_side, n_bits, span, self.states,
                                   self.values, self.energies, self.rng, inv_t,
                                   n_sweeps, self.best_e, self.best_s)


def run_chains_batch(model: Model, n_runs: int, config: SamplerConfig,
                     base_stream: int = 0,
                     init: Optional[np.ndarray] = None) -> list[SampleTrace]:
    """Independent chains run in lockstep; chain r uses stream base_stream+r.

    Wall time is the batch total divided evenly across runs.
    """
    t0 = time.perf_counter()
    drv = _BatchDriver(model, n_runs, config.seed, base_stream, init)
    inv_t = np.full(n_runs, 1.0 / config.temperature)
    histories = [[(0, float(e))] for e in drv.energies]
    done = 0
    while done < config.steps:
        step = min(config.record_energy_every, config.steps - done)
        drv.advance(step, inv_t)
        done += step
        for r in range(n_runs):
            histories[r].append((done, float(drv.energies[r])))
    per_run = (time.perf_counter() - t0) / n_runs
    return [
        SampleTrace(best_energy=float(drv.best_e[r]),
                    best_state=drv.best_s[r].copy(),
                    energy_history=histories[r],
                    wall_time=per_run)
        for r in range(n_runs)
    ]


def run_chain(model: Model, config: SamplerConfig,
              initial: Optional[np.ndarray] = None,
              chain_id: int = 0, use_kernel: bool = True) -> SampleTrace:
    """One chain; ``initial=None`` draws a random start from the chain stream.

    The compiled path and the reference path share one random sequence, so
    both yield the same trajectory; random-scan order forces the reference
    path.
    """
    if config.scan_order == "random":
        use_kernel = False
    if use_kernel:
        init = None if initial is None else initial[None, :]
        return run_chains_batch(model, 1, config, base_stream=chain_id,
                                init=init)[0]

    t0 = time.perf_counter()
    stream = Stream(config.seed, chain_id)
    dim = model.total_bits
    if initial is None:
        state = np.empty(dim, dtype=np.uint8)
        for i in range(dim):
            state[i] = 1 if stream.uniform() < 0.5 else 0
    else:
        state = initial.copy()
    energy = model.energy(state)
    best_e, best_s = energy, state.copy()
    history = [(0, energy)]
    order_stream = Stream(config.seed, chain_id ^ (1 << 62))
    for sweep in range(1, config.steps + 1):
        order = None
        if config.scan_order == "random":
            order = [order_stream.randint(dim) for _ in range(dim)]
        gibbs_sweep(model, state, config.temperature, stream, order)
        energy = model.energy(state)
        if energy < best_e:
            best_e, best_s = energy, state.copy()
        if sweep % config.record_energy_every == 0 or sweep == config.steps:
            history.append((sweep, energy))
    return SampleTrace(best_energy=best_e, best_state=best_s,
                       energy_history=history,
                       wall_time=time.perf_counter() - t0)


def trace_to_csv(trace: SampleTrace) -> str:
    lines = ["sweep,energy"]
    lines.extend(f"{s},{e!r}" for s, e in trace.energy_history)
    return "\n".join(lines) + "\n"
