"""Global solver for polynomial multiparameter eigenvalue problems.

A system of d matrix polynomials in d variables is solved by hiding the last
variable, building the tensor Dixon resultant R(x_d), solving the resulting
univariate polynomial eigenvalue problem with QZ, and reading the remaining
coordinates off the structured eigenvectors.  `solve` runs the whole
pipeline; the building blocks are exported for direct use.
"""

from .dixon import DixonShape, ResultantPoly, build_resultant, dixon_numerator_eval
from .errors import (
    DixonConsistencyError,
    ExtractionFailureError,
    MultiPolyEigError,
    ParseError,
    ProjectionFailureError,
    ReductionDepthExceededError,
    SingularMepError,
)
from .extract import (
    ExtractionConfig,
    Solution,
    SolutionSet,
    filter_solutions,
    generic_nullspace_mask,
    residual,
    vandermonde_ratios,
)
from .io import (
    flutter_pmep,
    load_flutter_data,
    parse_pmep,
    parse_solutions,
    serialize_pmep,
    serialize_solutions,
)
from .mpoly import Basis, MatrixPoly, Pmep
from .opdet import LinearMep, delta, solve_linear_mep
from .oracle import newton_oracle
from .pep import normal_rank, project_singular, solve_pep
from .solver import SolverConfig, choose_hidden_variable, random_orthogonal, solve

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "MatrixPoly",
    "Pmep",
    "DixonShape",
    "ResultantPoly",
    "build_resultant",
    "dixon_numerator_eval",
    "LinearMep",
    "delta",
    "solve_linear_mep",
    "solve_pep",
    "normal_rank",
    "project_singular",
    "Solution",
    "SolutionSet",
    "ExtractionConfig",
    "vandermonde_ratios",
    "generic_nullspace_mask",
    "residual",
    "filter_solutions",
    "SolverConfig",
    "solve",
    "choose_hidden_variable",
    "random_orthogonal",
    "newton_oracle",
    "parse_pmep",
    "serialize_pmep",
    "parse_solutions",
    "serialize_solutions",
    "load_flutter_data",
    "flutter_pmep",
    "MultiPolyEigError",
    "DixonConsistencyError",
    "SingularMepError",
    "ProjectionFailureError",
    "ExtractionFailureError",
    "ReductionDepthExceededError",
    "ParseError",
    "__version__",
]
