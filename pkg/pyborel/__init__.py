"""
PyBorel - Borel sums, Stokes constants and the alpha = 1/e dichotomy for S_gamma + alpha S_delta
"""

from .alpha import Alpha, AlphaKind, LinearFormCoefficient, parse_alpha
from .borel import (
    StokesEstimate,
    TransformKind,
    TransformSeries,
    bdelta_closed,
    bgamma_closed,
    combined_closed,
    laplace_borel_sum,
    radius_of_convergence,
    regular_part,
    stokes_constant,
    transform_coefficients,
)
from .combinatorics import (
    RationalInterval,
    derangement,
    e_tail_enclosure,
    factorial,
    stirling_first,
    telescoping_mismatches,
    telescoping_sum,
)
from .core import ExperimentLogger, experiment_log_function
from .decorators import log_experiment, log_result
from .errors import (
    DomainError,
    EstimationError,
    PoleError,
    PrecisionError,
    PreconditionError,
    PyBorelError,
    QuadratureError,
    RangeError,
    ToleranceNotMetError,
)
from .filters import LargeNumberAbbreviator, LargeNumberFilter
from .generalized import (
    coefficient_stokes,
    generalized_cancellation_bound,
    generalized_limit_estimate,
    generalized_partial_sums,
    generalized_term,
    log_power_fit,
)
from .gumbel import (
    e_function,
    moment_conditional,
    moment_full,
    moment_positive,
    moment_report,
    monte_carlo_moments,
    prob_nonpositive,
)
from .precision import PrecisionConfig, PrecisionReal, const_e, const_pi, reciprocal_e
from .quadrature import QuadratureConfig
from .series import (
    Verdict,
    combined_term,
    limit_estimate,
    optimal_truncation,
    partial_sums,
    prop1_finite_identity,
)
from .special import constant_report, ei, ein, euler_gamma, gompertz_delta, identity_residuals
from .utils import configure_logging, set_log_level

__version__ = "0.1.0"
__all__ = [
    'Alpha',
    'AlphaKind',
    'LinearFormCoefficient',
    'parse_alpha',
    'StokesEstimate',
    'TransformKind',
    'TransformSeries',
    'bdelta_closed',
    'bgamma_closed',
    'combined_closed',
    'laplace_borel_sum',
    'radius_of_convergence',
    'regular_part',
    'stokes_constant',
    'transform_coefficients',
    'RationalInterval',
    'derangement',
    'e_tail_enclosure',
    'factorial',
    'stirling_first',
    'telescoping_mismatches',
    'telescoping_sum',
    'ExperimentLogger',
    'experiment_log_function',
    'log_experiment',
    'log_result',
    'DomainError',
    'EstimationError',
    'PoleError',
    'PrecisionError',
    'PreconditionError',
    'PyBorelError',
    'QuadratureError',
    'RangeError',
    'ToleranceNotMetError',
    'LargeNumberAbbreviator',
    'LargeNumberFilter',
    'coefficient_stokes',
    'generalized_cancellation_bound',
    'generalized_limit_estimate',
    'generalized_partial_sums',
    'generalized_term',
    'log_power_fit',
    'e_function',
    'moment_conditional',
    'moment_full',
    'moment_positive',
    'moment_report',
    'monte_carlo_moments',
    'prob_nonpositive',
    'PrecisionConfig',
    'PrecisionReal',
    'const_e',
    'const_pi',
    'reciprocal_e',
    'QuadratureConfig',
    'Verdict',
    'combined_term',
    'limit_estimate',
    'optimal_truncation',
    'partial_sums',
    'prop1_finite_identity',
    'constant_report',
    'ei',
    'ein',
    'euler_gamma',
    'gompertz_delta',
    'identity_residuals',
    'configure_logging',
    'set_log_level',
]
