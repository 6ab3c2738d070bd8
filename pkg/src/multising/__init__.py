"""Probabilistic Ising machine solvers for multi-state combinatorial problems.

Two problem mappings share the samplers: the conventional one-hot QUBO form
and a binary-vector form whose pairwise interactions are truth-table
operators.  Single-flip Gibbs sampling, parallel tempering, a bit-exact
fixed-point hardware emulation, exact oracles, benchmark parsers, and an
evaluation harness round out the package.
"""

from .bench import (
    ExperimentPlan,
    coloring_error,
    decode_tour,
    grid_search,
    optimality_gap,
    run_experiment,
    success_probability,
    tabucol,
    tts,
)
from .errors import CapacityError, ParseError
from .gibbs import SamplerConfig, SampleTrace, accept_probability, gibbs_sweep, run_chain
from .hwemu import FixedPointConfig, HwLimits, build_sigmoid_lut, lfsr_next, run_hw
from .ingest import parse_dimacs_col, parse_edge_list, parse_tsplib, write_results
from .model import (
    ColoringInstance,
    EncodingKind,
    EncodingLayout,
    Graph,
    TspInstance,
    decode_color,
    physical_node_count,
)
from .onehot import QuboModel, build_onehot, build_tsp_onehot, delta_h_qubo, energy_qubo
from .oracles import enumerate_min_energy, exact_min_conflicts, held_karp
from .tempering import PtConfig, run_pt, swap_attempt, temperature_ladder
from .vectorized import (
    PairOperatorModel,
    TruthTableOperator,
    build_coloring_model,
    build_coloring_operator,
    build_tsp_operator_model,
    delta_h_vec,
    energy_vec,
)

__version__ = "0.1.0"
