"""
Package overview
================
"""
from ._version import __version__
from .config import Settings, load_config_file
from .exceptions import (
    ArgZetaError,
    BracketError,
    CapacityError,
    ConvergenceError,
    DomainError,
    InvariantViolation,
    PrecisionOverflowError,
    QuadratureError,
)
from .numerics import ErrorBudget, PrecisionContext
from .primes import PrimeTable, prime_zeta, sieve, sigma0, sigma1, support_length
from .qpoly import QTable, build_qtable, eval_Q
from .ifunc import i_asymptotic, i_quadrature, i_rational, i_series, log_i_series
from .charfun import PsiEvaluator, psi, psi_batch, psi_with_budget
from .density import (
    DensityResult,
    RhoSeries,
    SumParams,
    density_ak,
    density_d,
    density_dminus,
    density_dplus,
    density_gap,
    density_to_digits,
    rho_tilde,
)
from .mcverify import McConfig, McEstimate, estimate_densities, histogram_vs_rho, sample_im_s
