"""QAOA parameter-sharing schemes on hypergraph PUBO problems, simulated exactly."""

from .ansatz import (
    Ansatz,
    InitKind,
    InitStrategy,
    ParameterLayout,
    Scheme,
    SchemeKind,
    broadcast,
    build_layout,
    evaluate,
    initialize,
)
from .errors import CapacityError, ConsistencyError, NonFiniteObjectiveError
from .hypergraph import (
    IsingProblem,
    PuboProblem,
    SpectrumSummary,
    Term,
    brute_force,
    generate_cyclic,
    generate_random,
    is_degenerate,
    order_histogram,
    pubo_to_ising,
)
from .magic import MagicRecord, PauliSpectrum, normalize, pauli_spectrum, sre, stabilizer_renyi_entropy
from .metrics import RunRecord, approximation_ratio, assemble_record, fidelity
from .optimize import Method, OptimizerConfig, OptResult, finite_diff_gradient, minimize
from .statevector import (
    DiagonalTable,
    QuantumState,
    apply_phase,
    apply_rx,
    build_diagonal,
    expectation,
    plus_state,
    subspace_fidelity,
)
from .symmetry import find_orbits

__version__ = "0.1.0"
