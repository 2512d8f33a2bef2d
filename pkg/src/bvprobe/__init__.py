"""Probabilistic Bernstein-Vazirani performance, coherence and DQC1 bounds."""

__version__ = "0.1.0"

from .exceptions import (
    BadIndex,
    BVProbeError,
    DimensionTooLarge,
    ExtractionFailed,
    GammaOutOfRange,
    InvalidState,
    NotConverged,
    NotHermitian,
)
from .linalg import DensityOperator, PureState, partial_trace, tensor, tensor_all
from .model import DitString, OracleSpec, oracle_unitary
from .povm import Povm
from .sdp import (
    DiscriminationProblem,
    RobustnessProblem,
    SdpSolution,
    extract_povm,
    solve_discrimination,
    solve_robustness,
)
from .coherence import l1_coherence, pseudopure, relative_entropy_coherence, robustness, theorem2_frontier
from .guessing import performance_closed_minus, performance_oracle_sdp, performance_theorem1, product_povm
from .entanglement import geometric_entanglement, build_w_state, WStateSpec, Dqc1Instance, dqc1_bound_check
