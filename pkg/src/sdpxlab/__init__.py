"""Linear-SDP workbench: instances, color refinement, first-order solving,
relaxation generators, forward-pass embeddings, and a verification harness."""

from .colors import Algo, ColorState, Partition, init_colors, refines, run_to_stable, step
from .core import (
    SdpInstance,
    SdpxlabError,
    SolutionTriple,
    SparseSymMatrix,
    apply_A,
    apply_A_adjoint,
    constraint_residual,
    objective,
    quantize_key,
    relative_obj_gap,
    symmetrize,
)
from .pdhg import (
    PdhgConfig,
    eig_sym,
    kkt_residuals,
    lambda_max_op,
    min_norm_solution,
    pdhg_step,
    project_psd,
    solve,
    solve_continuation,
    warm_start_solve,
)
from .sdpa import read_sdpa, write_sdpa

__all__ = [
    "Algo", "ColorState", "Partition", "PdhgConfig", "SdpInstance",
    "SdpxlabError", "SolutionTriple", "SparseSymMatrix", "apply_A",
    "apply_A_adjoint", "constraint_residual", "eig_sym", "init_colors",
    "kkt_residuals", "lambda_max_op", "min_norm_solution", "objective",
    "pdhg_step", "project_psd", "quantize_key", "read_sdpa", "refines",
    "relative_obj_gap", "run_to_stable", "solve", "solve_continuation",
    "step", "symmetrize", "warm_start_solve", "write_sdpa",
]

__version__ = "0.1.0"
