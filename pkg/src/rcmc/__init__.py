"""Rate constant matrix contraction (RCMC) for reaction-network kinetics.

Step 1 selects steady states greedily (five interchangeable
implementations, from the dense reference to the relaxed segment-tree
variant); Step 2 projects initial populations to reference times and
approximate yield vectors.  Hot kernels run from a compiled extension when
available (``rcmc.backend.current()`` tells you which backend is active).
"""

from . import backend
from .cholesky import CholeskyFactor, doolittle_cholesky, fast_greedy, gaussian_cholesky
from .counters import InstrumentationCounters
from .generator import GeneratorSpec, generate
from .greedy_ref import GreedyResult, greedy, greedy_factored, marginal_gain_logdet
from .instance_io import read_instance, read_raw_k, write_instance
from .lazy import lazy_fast_greedy
from .model import (
    Laplacian,
    RateConstantMatrix,
    YieldVector,
    exact_solve_small,
    from_edge_weights,
    schur_complement_dense,
    to_laplacian,
    validate,
)
from .projection import Trajectory, project, stationary_limit
from .segtree import NonnegSegmentTree
from .stable import (
    DEFAULT_EPS_RELAX,
    CompressedRow,
    SegmentTreeBank,
    compressed_entry_L,
    stable_lazy_fast_greedy,
    stably_compute_diagonal,
    subtraction_error_bound,
)

__version__ = "0.1.0"

__all__ = [
    "backend",
    "CholeskyFactor",
    "CompressedRow",
    "DEFAULT_EPS_RELAX",
    "GeneratorSpec",
    "GreedyResult",
    "InstrumentationCounters",
    "Laplacian",
    "NonnegSegmentTree",
    "RateConstantMatrix",
    "SegmentTreeBank",
    "Trajectory",
    "YieldVector",
    "compressed_entry_L",
    "doolittle_cholesky",
    "exact_solve_small",
    "fast_greedy",
    "from_edge_weights",
    "gaussian_cholesky",
    "generate",
    "greedy",
    "greedy_factored",
    "lazy_fast_greedy",
    "marginal_gain_logdet",
    "project",
    "read_instance",
    "read_raw_k",
    "schur_complement_dense",
    "stable_lazy_fast_greedy",
    "stably_compute_diagonal",
    "stationary_limit",
    "subtraction_error_bound",
    "to_laplacian",
    "validate",
    "write_instance",
]
