"""Min-sum belief propagation for the random assignment problem.

The package bundles the dense message-passing engine, exact solvers used as
oracles, matching metrics and repair, a truncated Poisson-weighted-tree
simulator, the discretized message-law dynamics, and the experiment CLI that
ties them together.
"""

from .bp import (BipartiteDecision, MessageState, argmin_index_histogram, bp_step,
                 bp_step_reference, decide, init_messages, run)
from .estimators import BeliefPropagationAssignment, ExactAssignment, check_cost_matrix
from .exact import Assignment, solve_bruteforce, solve_exact
from .instances import (CostMatrix, WeightDistribution, exponential, generate,
                        load_matrix, rescale, save_matrix, uniform01)
from .ks import ks_sample_vs_tail, ks_two_sample
from .message_law import (ShiftEstimate, TailGrid, TailGridError, amplitude,
                          apply_update, derivative_identity_check, estimate_shift,
                          hat_transform, iterate_update, logistic, shift, unit_step)
from .metrics import ErrorReport, error_report, hamming, is_perfect_matching, repair
from .pwit import PwitTree, RootSample, TreeMessages, root_decision, sample_pwit, sample_root, tree_bp

__version__ = "0.1.0"

__all__ = [
    "Assignment", "BeliefPropagationAssignment", "BipartiteDecision", "CostMatrix",
    "ErrorReport", "ExactAssignment", "MessageState", "PwitTree", "RootSample",
    "ShiftEstimate", "TailGrid", "TailGridError", "TreeMessages", "WeightDistribution",
    "amplitude", "apply_update", "argmin_index_histogram", "bp_step", "bp_step_reference",
    "check_cost_matrix", "decide", "derivative_identity_check", "error_report",
    "estimate_shift", "exponential", "generate", "hamming", "hat_transform",
    "init_messages", "is_perfect_matching", "iterate_update", "ks_sample_vs_tail",
    "ks_two_sample", "load_matrix", "logistic", "repair", "rescale", "root_decision",
    "run", "sample_pwit", "sample_root", "save_matrix", "shift", "solve_bruteforce",
    "solve_exact", "tree_bp", "uniform01", "unit_step",
]
