"""Complex-order Riemann-Liouville fractional integration on (0, 1).

Exact actions, a product-integration discretisation, singular spectra and
Schatten-class estimates, Fourier-diagonal asymptotics and norm bounds.
"""

from .asymptotics import diagonal_asymptote, diagonal_exact, diagonal_report, psi_hat, psi_hat_direct
from .discretize import OperatorMatrix, build_matrix, compose, fast_apply, read_matrix, write_matrix
from .laws import bound_formula, check_bound, numeric_norm_lower, semigroup_residual, strong_continuity_gap
from .rl_core import (
    ComplexOrder,
    CyclicityReport,
    GridSpec,
    SampledFunction,
    adjoint_apply,
    apply,
    apply_monomial,
    cyclicity_index,
    kernel,
)
from .specfun import DomainError, gamma, log_gamma, lower_incomplete_gamma
from .spectral import (
    InterpolationSpec,
    SchattenVerdict,
    SingularSpectrum,
    classify_schatten,
    hs_norm_exact,
    interpolation_check,
    schatten_norm,
    singular_values,
)

__version__ = "0.1.0"
