"""Extreme learning machines with shifted Gaussian encoding for stiff linear ODEs and multiscale fits."""
from .assembly import LinearSystem, OdeProblem, apply_row_weights, assemble_fit, assemble_ode
from .basis import BasisRow, ElmConfig, EncodedBasis, basis_row, basis_rows, build_basis, encoding_value, forward, preactivation
from .linalg import (DecompositionError, SingularSpectrum, condition_number, gram_psd_check, least_squares_solve,
                     numerical_rank, pseudoinverse, svd)
from .solver import (ConditioningReport, Metrics, SolveResult, evaluate, exact_ade_solution, fit_samples,
                     multiscale_target, predict, solve_ade, solve_ode, sweep_epsilon, train)

__version__ = "0.1.0"
