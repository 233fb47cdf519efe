"""Sign-dependent decomposition of polyharmonic Dirichlet problems.

Solves (-Delta)^m u = f (m = 1, 2) on discretized 2D/3D domains and
splits the solution as u = u_oplus - u_ominus, where both parts are
nonnegative and each inherits its regularity from one sign part of the
source.  The split rests on a rank-one correction of the discrete Green
matrix by the boundary weight w = e1^m built from the torsion function.
"""

from .ball import (BallKernelQuery, ball_green_normalization, ball_solution,
                   boggio_green)
from .decompose import (SignedSolution, SignedSource, apply_D, apply_H,
                        chain_slack, signed_decompose, split_source)
from .discretize import (DiscreteOperator, WeightFunction, assemble_operator,
                         boundary_weight, solve, torsion_function)
from .domain import (DomainSpec, GridDomain, GridFunction, build_domain,
                     distance_to_boundary, domain_for)
from .errors import (AssemblyError, CapabilityError, DecompositionError,
                     DomainMismatchError, NumericalError, PolysignError,
                     PositivityError, SingularityError, ValidationError)
from .experiments import (EstimateReport, ExperimentConfig, Pipeline,
                          build_pipeline, random_bump_source,
                          run_estimate_experiment)
from .kernels import (GreenMatrix, KernelEstimate, apply_green,
                      estimate_sandwich_constants, green_matrix,
                      max_riesz_ratio, reference_kernel_H, riesz_constant,
                      riesz_kernel)
from .norms import discrete_derivative_norm, lp_norm, sobolev_exponent
from .verification import CheckResult, run_suite

__version__ = "1.0.0"

__all__ = [
    "AssemblyError", "BallKernelQuery", "CapabilityError", "CheckResult",
    "DecompositionError", "DiscreteOperator", "DomainMismatchError",
    "DomainSpec", "EstimateReport", "ExperimentConfig", "GreenMatrix",
    "GridDomain", "GridFunction", "KernelEstimate", "NumericalError",
    "Pipeline", "PolysignError", "PositivityError", "SignedSolution",
    "SignedSource", "SingularityError", "ValidationError",
    "WeightFunction", "apply_D", "apply_H", "apply_green",
    "assemble_operator", "ball_green_normalization", "ball_solution",
    "boggio_green", "boundary_weight", "build_domain", "build_pipeline",
    "chain_slack", "discrete_derivative_norm", "distance_to_boundary",
    "domain_for", "estimate_sandwich_constants", "green_matrix",
    "lp_norm", "max_riesz_ratio", "random_bump_source",
    "reference_kernel_H", "riesz_constant", "riesz_kernel", "run_suite",
    "run_estimate_experiment", "signed_decompose", "sobolev_exponent",
    "solve", "split_source", "torsion_function",
]
