"""Fair graph clustering via fairness-constrained algebraic distance."""
from .algebraic import (RelaxationConfig, algebraic_distance, build_algebraic_affinity,
                        compute_test_vectors, constrained_jacobi, woodbury_apply)
from .anchors import (AnchorConfig, AnchorSet, build_anchor_constraints, select_coarse_level,
                      spectral_cluster_coarse)
from .baseline import SCConfig, ncut_value, run_sc
from .coarsening import (CoarseHierarchy, CoarseningConfig, build_hierarchy, coarsen_level,
                         galerkin_coarse_affinity, interpolation_matrix, volume_ordering)
from .errors import FairADError, ValidationError
from .fairness import (GroupPartition, average_balance, balance, build_fairness_matrix,
                       fairness_residual)
from .graph import (NormalizedLaplacian, SparseGraph, degree_vector, largest_connected_component,
                    load_edge_list, normalized_laplacian_apply)
from .kernels import BACKEND
from .metrics import MetricsReport, compile_report, error_rate, optimal_permutation
from .msbm import MsbmConfig, MsbmInstance, msbm_generate, write_instance
from .solver import (AnchoredSystem, ClusterAssignment, FairADConfig, assign_labels, run_fairad,
                     solve_indicator, solve_indicators)

__version__ = "0.1.0"
