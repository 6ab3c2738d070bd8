"""Parallel tempering (replica exchange) over single-flip Gibbs chains.

A ladder of geometrically spaced temperatures runs one chain each; after every
``swap_interval`` sweeps, adjacent chains attempt a state exchange with
acceptance ``min(1, exp[(1/T_a - 1/T_b)(H_a - H_b)])``.  Swap rounds alternate
between even-leading pairs (0,1)(2,3)... and odd-leading pairs (1,2)(3,4)...;
the first round is even-leading.  States move between chains, temperatures
stay put, and each chain keeps its own random stream.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .gibbs import Model, SampleTrace, _BatchDriver
from .rng import Stream


@dataclass(frozen=True)
class PtConfig:
    num_chains: int = 100
    t_low: float = 0.01
    t_high: float = 40.0
    swap_interval: int = 15
    total_sweeps: int = 1000
    seed: int = 0
    audit_energies: bool = False  # recompute and check cached energies per round

    def __post_init__(self):
        if self.num_chains < 1:
            raise ValueError("need at least one chain")
        if self.num_chains >= 2 and not (0 < self.t_low < self.t_high):
            raise ValueError("need 0 < t_low < t_high")
        if self.swap_interval < 1:
            raise ValueError("swap_interval must be >= 1")
        if self.total_sweeps < 1:
            raise ValueError("total_sweeps must be >= 1")


@dataclass
class PtRoundEntry:
    round_index: int
    chain: int
    temperature: float
    energy: float
    swapped: bool


@dataclass
class PtResult:
    best: SampleTrace
    temperatures: np.ndarray
    chain_energies: np.ndarray      # final per-chain energies
    chain_best_energies: np.ndarray
    log: list                       # PtRoundEntry per (round, chain)


def temperature_ladder(num_chains: int, t_low: float, t_high: float) -> np.ndarray:
    """Geometric ladder T_m = t_low * (t_high/t_low)^(m/(M-1)), endpoints exact."""
    if num_chains < 2:
        raise ValueError("a ladder needs at least two temperatures")
    if not (0 < t_low < t_high):
        raise ValueError("need 0 < t_low < t_high")
    m = np.arange(num_chains, dtype=np.float64)
    ladder = t_low * (t_high / t_low) ** (m / (num_chains - 1))
    ladder[0] = t_low
    ladder[-1] = t_high
    return ladder


def swap_attempt(state_a: np.ndarray, energy_a: float, t_a: float,
                 state_b: np.ndarray, energy_b: float, t_b: float,
                 stream: Stream) -> bool:
    """Metropolis replica swap; exchanges the two state rows on acceptance.

    The caller owns any cached energies and must swap them when True is
    returned.
    """
    if t_a == 0 or t_b == 0:
        raise ValueError("temperatures must be nonzero")
    u = stream.uniform()
    arg = (1.0 / t_a - 1.0 / t_b) * (energy_a - energy_b)
    accepted = arg >= 0.0 or u < math.exp(arg)
    if accepted:
        tmp = state_a.copy()
        state_a[:] = state_b
        state_b[:] = tmp
    return accepted


def run_pt(model: Model, config: PtConfig) -> PtResult:
    """Replica-exchange run returning the global best over all chains/rounds."""
    t0 = time.perf_counter()
    m = config.num_chains
    if m == 1:
        temps = np.array([config.t_low])
    else:
        temps = temperature_ladder(m, config.t_low, config.t_high)
    inv_t = 1.0 / temps
    drv = _BatchDriver(model, m, config.seed, base_stream=0)
    coordinator = Stream(config.seed, m)  # dedicated stream for swap decisions

    log: list[PtRoundEntry] = []
    done = 0
    round_index = 0
    while done < config.total_sweeps:
        step = min(config.swap_interval, config.total_sweeps - done)
        drv.advance(step, inv_t)
        done += step

        if config.audit_energies:
            fresh = drv.compute_energies()
            if not np.allclose(fresh, drv.energies, atol=1e-9):
                raise AssertionError("cached chain energies drifted from recompute")
            drv.energies = fresh

        swapped = np.zeros(m, dtype=bool)
        first = 0 if round_index % 2 == 0 else 1
        for a in range(first, m - 1, 2):
            b = a + 1
            ok = swap_attempt(drv.states[a], float(drv.energies[a]), temps[a],
                              drv.states[b], float(drv.energies[b]), temps[b],
                              coordinator)
            if ok:
                drv.energies[[a, b]] = drv.energies[[b, a]]
                if drv.values is not None:
                    tmp = drv.values[a].copy()
                    drv.values[a] = drv.values[b]
                    drv.values[b] = tmp
                swapped[a] = swapped[b] = True
        for c in range(m):
            log.append(PtRoundEntry(round_index, c, float(temps[c]),
                                    float(drv.energies[c]), bool(swapped[c])))
        round_index += 1

    best_chain = int(np.argmin(drv.best_e))
    best = SampleTrace(
        best_energy=float(drv.best_e[best_chain]),
        best_state=drv.best_s[best_chain].copy(),
        energy_history=[(config.total_sweeps, float(drv.energies.min()))],
        wall_time=time.perf_counter() - t0)
    return PtResult(best=best, temperatures=temps,
                    chain_energies=drv.energies.copy(),
                    chain_best_energies=drv.best_e.copy(), log=log)


def pt_log_to_csv(result: PtResult) -> str:
    lines = ["round,chain,temperature,energy,swapped"]
    lines.extend(
        f"{e.round_index},{e.chain},{e.temperature!r},{e.energy!r},{int(e.swapped)}"
        for e in result.log)
    return "\n".join(lines) + "\n"
