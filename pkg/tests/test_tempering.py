import numpy as np
import pytest

from multising.gibbs import SamplerConfig, run_chain
from multising.model import ColoringInstance, Graph
from multising.onehot import QuboModel
from multising.oracles import enumerate_min_energy
from multising.rng import Stream
from multising.tempering import (
    PtConfig,
    pt_log_to_csv,
    run_pt,
    swap_attempt,
    temperature_ladder,
)
from multising.vectorized import build_coloring_model


def double_well_model():
    """6-bit chain with ferromagnetic couplings: local minimum at all-zeros,
    unique global minimum at all-ones, barrier of +3 between them."""
    dim = 6
    mat = np.zeros((dim, dim))
    for a in range(dim - 1):
        mat[a, a + 1] = mat[a + 1, a] = -2.0
    bias = np.full(dim, 3.0)
    return QuboModel.from_dense(mat, bias=bias)


class TestLadder:
    def test_endpoints_exact(self):
        ladder = temperature_ladder(100, 0.01, 40.0)
        assert ladder[0] == 0.01
        assert ladder[-1] == 40.0
        assert np.all(np.diff(ladder) > 0)

    def test_geometric_middle(self):
        ladder = temperature_ladder(3, 0.01, 40.0)
        assert ladder[1] == pytest.approx(0.01 * math_sqrt(4000.0))

    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            temperature_ladder(3, 1.0, 0.5)
        with pytest.raises(ValueError):
            temperature_ladder(1, 0.1, 1.0)


def math_sqrt(x):
    return float(np.sqrt(x))


class TestSwapAttempt:
    def test_equal_temperature_always_swaps(self):
        stream = Stream(0)
        for _ in range(20):
            a = np.array([0, 1], dtype=np.uint8)
            b = np.array([1, 0], dtype=np.uint8)
            assert swap_attempt(a, 5.0, 1.0, b, -3.0, 1.0, stream)
            assert a.tolist() == [1, 0] and b.tolist() == [0, 1]

    def test_equal_energy_always_swaps(self):
        stream = Stream(1)
        for _ in range(20):
            a = np.zeros(2, dtype=np.uint8)
            b = np.ones(2, dtype=np.uint8)
            assert swap_attempt(a, 2.5, 0.3, b, 2.5, 7.0, stream)

    def test_cold_chain_sheds_worse_state(self):
        stream = Stream(2)
        for _ in range(20):
            a = np.zeros(1, dtype=np.uint8)
            b = np.ones(1, dtype=np.uint8)
            assert swap_attempt(a, 10.0, 0.1, b, 1.0, 5.0, stream)

    def test_unfavorable_swap_sometimes_rejected(self):
        stream = Stream(3)
        results = [swap_attempt(np.zeros(1, dtype=np.uint8), -10.0, 0.1,
                                np.ones(1, dtype=np.uint8), 10.0, 5.0, stream)
                   for _ in range(50)]
        assert not any(results)  # exp(large negative) is effectively zero

    def test_zero_temperature_rejected(self):
        with pytest.raises(ValueError):
            swap_attempt(np.zeros(1, dtype=np.uint8), 0.0, 0.0,
                         np.ones(1, dtype=np.uint8), 1.0, 1.0, Stream(0))


class TestRunPt:
    def test_temperature_multiset_preserved(self):
        model = double_well_model()
        cfg = PtConfig(num_chains=8, t_low=0.05, t_high=2.0, swap_interval=2,
                       total_sweeps=40, seed=0, audit_energies=True)
        res = run_pt(model, cfg)
        by_round = {}
        for entry in res.log:
            by_round.setdefault(entry.round_index, []).append(entry.temperature)
        expected = sorted(res.temperatures.tolist())
        for temps in by_round.values():
            assert sorted(temps) == expected

    def test_audit_passes_with_swaps(self):
        model = build_coloring_model(ColoringInstance(
            graph=Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]), q=3,
            name="c4"))
        cfg = PtConfig(num_chains=6, t_low=0.05, t_high=3.0, swap_interval=1,
                       total_sweeps=50, seed=4, audit_energies=True)
        res = run_pt(model, cfg)
        assert any(e.swapped for e in res.log)

    def test_single_chain_degenerates_to_run_chain(self):
        model = double_well_model()
        cfg = PtConfig(num_chains=1, t_low=0.7, t_high=40.0, swap_interval=5,
                       total_sweeps=30, seed=9)
        res = run_pt(model, cfg)
        ref = run_chain(model, SamplerConfig(temperature=0.7, steps=30, seed=9),
                        chain_id=0)
        assert res.best.best_energy == ref.best_energy
        assert np.array_equal(res.best.best_state, ref.best_state)
        assert not any(e.swapped for e in res.log)

    def test_global_best_bounded_by_round_energies(self):
        model = double_well_model()
        cfg = PtConfig(num_chains=6, t_low=0.1, t_high=2.0, swap_interval=3,
                       total_sweeps=60, seed=2)
        res = run_pt(model, cfg)
        assert res.best.best_energy <= min(e.energy for e in res.log)
        assert res.best.best_energy == res.chain_best_energies.min()

    def test_swap_parity_alternates(self):
        # with 3 chains, even rounds may swap only pair (0,1); odd rounds (1,2)
        model = double_well_model()
        cfg = PtConfig(num_chains=3, t_low=0.5, t_high=1.0, swap_interval=1,
                       total_sweeps=12, seed=1)
        res = run_pt(model, cfg)
        for entry in res.log:
            if entry.round_index % 2 == 0:
                assert not (entry.chain == 2 and entry.swapped)
            else:
                assert not (entry.chain == 0 and entry.swapped)

    def test_pt_beats_cold_single_chain_on_double_well(self):
        model = double_well_model()
        optimum = enumerate_min_energy(model).value
        assert optimum == -2.0  # all-ones well

        seeds = range(200)
        sweeps = 60
        pt_hits = 0
        cold_hits = 0
        for seed in seeds:
            cfg = PtConfig(num_chains=6, t_low=0.05, t_high=2.0,
                           swap_interval=3, total_sweeps=sweeps, seed=seed)
            if run_pt(model, cfg).best.best_energy == optimum:
                pt_hits += 1
            single = run_chain(model, SamplerConfig(
                temperature=0.05, steps=sweeps, seed=seed), chain_id=0)
            if single.best_energy == optimum:
                cold_hits += 1
        assert pt_hits >= cold_hits
        assert pt_hits > 100  # tempering reliably crosses the barrier


def test_pt_log_csv():
    model = double_well_model()
    cfg = PtConfig(num_chains=2, t_low=0.5, t_high=1.0, swap_interval=2,
                   total_sweeps=4, seed=0)
    res = run_pt(model, cfg)
    lines = pt_log_to_csv(res).strip().splitlines()
    assert lines[0] == "round,chain,temperature,energy,swapped"
    assert len(lines) == 1 + 2 * 2


def test_config_validation():
    with pytest.raises(ValueError):
        PtConfig(num_chains=0)
    with pytest.raises(ValueError):
        PtConfig(t_low=2.0, t_high=1.0)
    with pytest.raises(ValueError):
        PtConfig(swap_interval=0)
